"""Pydantic schemas for experiment configuration."""

from typing import Annotated, Literal, get_args

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from ..evolution.lifespan import HorizonPolicy
from ..evolution.solver import SolverOptions
from ..radial.families import BlowupFamily, CompactBump, DataFamily, GaussianBump
from ..radial.grid import Grid

BatteryItem = Literal[
    "interval_reciprocal",
    "interval_power",
    "interval_log_power",
    "interval_lower",
    "potential_critical",
    "potential_supercritical",
    "potential_weak_log2",
    "duhamel_critical",
    "duhamel_supercritical",
    "recursion",
    "envelope",
    "first_estimate",
    "potential_lower",
    "positivity",
    "scaling",
    "norm_scaling",
    "interval_power_control",
    "potential_no_log_control",
    "potential_weakened_control",
    "duhamel_no_log_control",
    "recursion_corrupted_control",
]

BATTERY_ITEMS: tuple[str, ...] = get_args(BatteryItem)


class _Section(BaseModel):
    model_config = ConfigDict(extra="forbid")


class BlowupDataConfig(_Section):
    """Blow-up data u0 = 0, u1 = B <x>^(-(kappa+1))."""

    family: Literal["blowup"] = "blowup"
    amplitude: float = Field(1.0, gt=0, description="Amplitude B of u1")
    kappa: float = Field(1.5, gt=0, description="Decay rate kappa of the data")

    def build_family(self) -> DataFamily:
        return BlowupFamily(amplitude=self.amplitude, kappa=self.kappa)


class GaussianDataConfig(_Section):
    """Gaussian bump in u0, u1 = 0."""

    family: Literal["gaussian"] = "gaussian"
    amplitude: float = Field(1.0, description="Peak value A of u0 (0 gives zero data)")
    width: float = Field(1.0, gt=0, description="Gaussian width")
    kappa: float = Field(1.5, gt=0, description="Decay rate kappa assigned to the data")

    def build_family(self) -> DataFamily:
        return GaussianBump(amplitude=self.amplitude, width=self.width, kappa=self.kappa)


class CompactDataConfig(_Section):
    """Compactly supported C^1 bump in u0, u1 = 0."""

    family: Literal["compact"] = "compact"
    amplitude: float = Field(1.0, description="Peak value A of u0 (0 gives zero data)")
    radius: float = Field(2.0, gt=0, description="Support radius")
    kappa: float = Field(1.5, gt=0, description="Decay rate kappa assigned to the data")

    def build_family(self) -> DataFamily:
        return CompactBump(amplitude=self.amplitude, radius=self.radius, kappa=self.kappa)


DataConfig = Annotated[
    BlowupDataConfig | GaussianDataConfig | CompactDataConfig,
    Field(discriminator="family"),
]


class GridConfig(_Section):
    """Characteristic grid (dt = dr)."""

    dr: float = Field(0.125, gt=0, description="Radial step; the time step equals it")
    t_max: float = Field(16.0, gt=0, description="Time horizon")
    support_radius: float | None = Field(
        None,
        ge=0,
        description="Extra radial margin beyond t_max; defaults to the data family's support radius",
    )

    def build(self, family: DataFamily) -> Grid:
        margin = family.support_radius if self.support_radius is None else self.support_radius
        return Grid.build(self.dr, self.t_max, margin)


class SolveConfig(_Section):
    """Options for a single solve."""

    eps: float = Field(1.0, ge=0, description="Data size eps")
    value_cap: float | None = Field(None, gt=0, description="Blow-up cap; 1e6 * eps * sup|data| when omitted")
    method: Literal["integral", "fd"] = Field("integral", description="Integral-equation solver or FD fast path")
    full_picard: bool = Field(False, description="Iterate the corrector to picard_tolerance")
    picard_tolerance: float = Field(1e-10, gt=0, description="Relative correction accepted in full Picard mode")
    max_picard_iterations: int = Field(50, ge=1, description="Corrector iterations allowed in full Picard mode")
    divergence_ratio: float = Field(0.5, gt=0, description="Relative correction treated as Picard divergence")

    def solver_options(self) -> SolverOptions:
        return SolverOptions(
            value_cap=self.value_cap,
            full_picard=self.full_picard,
            picard_tolerance=self.picard_tolerance,
            max_picard_iterations=self.max_picard_iterations,
            divergence_ratio=self.divergence_ratio,
        )


class HorizonConfig(_Section):
    """Per-eps horizon t_max(eps) = min(t_cap, max(min_t_max, 4 exp(c_fit / eps^2)))."""

    t_cap: float = Field(256.0, gt=0, description="Largest horizon a sweep entry may use")
    c_fit: float = Field(1.0, ge=0, description="Expected slope of log T against eps^-2")
    min_t_max: float = Field(8.0, gt=0, description="Smallest horizon")


class SweepConfig(_Section):
    """Lifespan sweep over data sizes."""

    eps_list: list[float] = Field(
        default_factory=lambda: [1.2, 1.0, 0.9, 0.8, 0.7],
        description="Strictly decreasing positive data sizes",
    )
    horizon: HorizonConfig = Field(default_factory=HorizonConfig)
    min_points: int = Field(4, ge=2, description="Uncapped entries required for a fit")
    grid_check: bool = Field(False, description="Repeat the sweep at dr/2 and compare T brackets")

    @field_validator("eps_list")
    @classmethod
    def _descending(cls, value: list[float]) -> list[float]:
        if any(eps <= 0 for eps in value):
            raise ValueError("sweep eps values must be positive")
        if any(b >= a for a, b in zip(value, value[1:])):
            raise ValueError("sweep eps_list must be strictly decreasing")
        return value

    def policy(self, dr: float, support_radius: float) -> HorizonPolicy:
        return HorizonPolicy(
            dr=dr,
            t_cap=self.horizon.t_cap,
            c_fit=self.horizon.c_fit,
            support_radius=support_radius,
            min_t_max=self.horizon.min_t_max,
        )


class VerifyConfig(_Section):
    """Verifier battery selection and sizes."""

    battery: list[BatteryItem] = Field(
        default_factory=lambda: list(BATTERY_ITEMS),
        description="Battery items to run; an empty list is a no-op",
    )
    base_horizon: float = Field(25.0, gt=0, description="Smallest nested domain for sup-ratio trends")
    doublings: int = Field(3, ge=1, description="Domain doublings for sup-ratio trends")
    growth_tolerance: float = Field(1.2, gt=1, description="Accepted final/first growth of sup-ratio trends")
    lemma_samples: int = Field(200, ge=1, description="Samples per regime for interval estimates")
    lower_samples: int = Field(10000, ge=1, description="Random samples for the explicit lower estimate")
    potential_base_horizon: float = Field(50.0, gt=0, description="Smallest nested domain for the potential bounds")
    potential_samples: int = Field(80, ge=1, description="Grid nodes per regime for potential bounds")
    potential_dr: float = Field(0.5, gt=0, description="Grid step of the synthetic exact-weight fields")
    duhamel_horizons: list[float] = Field(
        default_factory=lambda: [10.0, 100.0, 1000.0],
        description="Horizons T of the Duhamel bound",
    )
    duhamel_dr: float = Field(1.0, gt=0, description="Grid step of the Duhamel check")
    envelope_j: list[int] = Field(default_factory=lambda: [1], description="Ladder rungs compared with a solved field")
    envelope_eps: float = Field(1.0, gt=0, description="Data size of the blow-up field used by envelope checks")
    envelope_dr: float = Field(0.0625, gt=0, description="Grid step of the blow-up field")
    envelope_t_max: float = Field(8.0, gt=0, description="Horizon of the blow-up field")
    ladder_j_max: int = Field(200, ge=1, description="Highest rung of the recursion check")
    scaling_sigma: float = Field(2.0, gt=0, description="Scaling factor of the paired runs")
    falsification: bool = Field(True, description="Run the falsification controls in the battery")


class PersistenceConfig(_Section):
    """Long small-data runs in the supercritical range."""

    eps_list: list[float] = Field(default_factory=lambda: [0.05, 0.1], description="Data sizes")
    horizon: float = Field(200.0, gt=0, description="Time horizon")
    dr: float = Field(0.5, gt=0, description="Grid step")
    plateau_tolerance: float = Field(0.05, ge=0, description="Accepted relative norm growth over the last half")

    @field_validator("eps_list")
    @classmethod
    def _non_negative(cls, value: list[float]) -> list[float]:
        if not value or any(eps < 0 for eps in value):
            raise ValueError("persistence eps_list must be non-empty and non-negative")
        return value


class OracleConfig(_Section):
    """Monte-Carlo cross-check of the deterministic potential."""

    n_samples: int = Field(1_000_000, ge=1000, description="Monte-Carlo samples per case")
    cases: int = Field(20, ge=1, description="Random (profile, gamma, r) cases")
    gammas: list[float] = Field(default_factory=lambda: [1.0, 2.0, 2.5, 2.9], description="Exponents drawn from")
    stderr_multiple: float = Field(3.0, gt=0, description="Accepted |difference| in standard errors")

    @field_validator("gammas")
    @classmethod
    def _gamma_range(cls, value: list[float]) -> list[float]:
        if not value or any(not 0.0 < g < 3.0 for g in value):
            raise ValueError("oracle gammas must lie in (0, 3)")
        return value


class OutputConfig(_Section):
    """Where artifacts go."""

    directory: str | None = Field(None, description="Output directory; the global output_dir when omitted")
    checkpoint_format: Literal["npz", "csv"] | None = Field(
        None, description="Field checkpoint format; the global setting when omitted"
    )


class ExperimentConfig(_Section):
    """Complete experiment configuration."""

    name: str = Field("experiment", description="Experiment name, used in provenance and log prefixes")
    seed: int | None = Field(None, description="Seed for samplers and Monte-Carlo oracles")
    gamma: float = Field(2.0, gt=0, lt=3, description="Potential exponent, 0 < gamma < 3")
    data: DataConfig = Field(default_factory=BlowupDataConfig)
    grid: GridConfig = Field(default_factory=GridConfig)
    solve: SolveConfig = Field(default_factory=SolveConfig)
    sweep: SweepConfig = Field(default_factory=SweepConfig)
    verify: VerifyConfig = Field(default_factory=VerifyConfig)
    persistence: PersistenceConfig = Field(default_factory=PersistenceConfig)
    oracle: OracleConfig = Field(default_factory=OracleConfig)
    output: OutputConfig = Field(default_factory=OutputConfig)

    @model_validator(mode="after")
    def _grid_matches_horizon(self) -> "ExperimentConfig":
        if self.grid.dr > self.grid.t_max:
            raise ValueError("grid.dr must not exceed grid.t_max")
        return self

    @property
    def family(self) -> DataFamily:
        return self.data.build_family()

    def build_grid(self) -> Grid:
        return self.grid.build(self.family)
