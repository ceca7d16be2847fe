"""WaveLab - wave equation lab CLI.

Solves the radial integral equation for the 3D wave equation with cubic
convolution nonlinearity, measures lifespans and runs the verifier battery.
"""

import logging
import math
from dataclasses import replace
from pathlib import Path
from typing import Annotated, Optional

import typer

from . import __version__
from .config import LabSettings, get_settings
from .errors import ConfigurationError, InsufficientDataError, LabError
from .experiment_config import ConfigLoader, ExperimentConfig, dump_config
from .experiment_config.schema import VerifyConfig
from .utils.logger import RunLogger, setup_logging

logger = logging.getLogger(__name__)

# Exit codes
EXIT_OK = 0
EXIT_FAILED = 1
EXIT_BAD_CONFIG = 2
EXIT_INTERNAL = 3

# Main app
app = typer.Typer(
    name="wavelab",
    help="WaveLab - numerical laboratory for the 3D wave equation with Hartree nonlinearity",
    no_args_is_help=True,
    rich_markup_mode="rich",
)

# Subcommand groups
config_app = typer.Typer(help="Show or validate configuration")

app.add_typer(config_app, name="config")


def version_callback(value: bool):
    if value:
        print(f"wavelab {__version__}")
        raise typer.Exit()


@app.callback()
def main_callback(
    version: Annotated[
        Optional[bool],
        typer.Option("--version", "-v", callback=version_callback, is_eager=True, help="Show version"),
    ] = None,
):
    """WaveLab - wave equation lab CLI."""
    settings = get_settings()
    setup_logging(settings.log_level, settings.log_dir)


ConfigOption = Annotated[str, typer.Option("--config", "-c", help="Path to experiment config (YAML)")]
OptionalConfigOption = Annotated[
    Optional[str], typer.Option("--config", "-c", help="Path to experiment config (YAML)")
]
SeedOption = Annotated[Optional[int], typer.Option("--seed", help="Seed for samplers and Monte-Carlo oracles")]
OutputOption = Annotated[Optional[str], typer.Option("--output", "-o", help="Output directory")]


# ============================================================
# Main Commands
# ============================================================


@app.command()
def solve(
    config: ConfigOption,
    output: OutputOption = None,
    checkpoint_format: Annotated[
        Optional[str], typer.Option("--format", help="Field checkpoint format: npz or csv")
    ] = None,
):
    """Solve one configured run; write the field, its lifespan bracket and X-norm history."""
    settings = get_settings()
    args = {"--config": config, "--output": output, "--format": checkpoint_format}
    raise typer.Exit(handle_solve(args, settings))


@app.command("lifespan-sweep")
def lifespan_sweep(
    config: ConfigOption,
    output: OutputOption = None,
    workers: Annotated[Optional[int], typer.Option("--workers", "-w", help="Worker processes")] = None,
):
    """Measure T(eps) over the configured eps list and fit log T against eps^-2."""
    settings = get_settings()
    args = {"--config": config, "--output": output, "--workers": workers}
    raise typer.Exit(handle_lifespan_sweep(args, settings))


@app.command()
def verify(
    config: ConfigOption,
    output: OutputOption = None,
    seed: SeedOption = None,
    item: Annotated[
        Optional[list[str]], typer.Option("--item", "-i", help="Run only these battery items")
    ] = None,
):
    """Run the verifier battery and write a JSON bundle with an outcome per item."""
    settings = get_settings()
    args = {"--config": config, "--output": output, "--seed": seed, "--item": item}
    raise typer.Exit(handle_verify(args, settings))


@app.command("global-persistence")
def global_persistence(
    config: ConfigOption,
    output: OutputOption = None,
):
    """Long small-data runs for 2 < gamma < 3 with critical decay; report X-norm plateaus."""
    settings = get_settings()
    args = {"--config": config, "--output": output}
    raise typer.Exit(handle_global_persistence(args, settings))


@app.command("blowup-seq")
def blowup_seq(
    config: OptionalConfigOption = None,
    output: OutputOption = None,
    j_max: Annotated[int, typer.Option("--j-max", help="Highest ladder rung")] = 10,
    eps: Annotated[Optional[float], typer.Option("--eps", help="Data size")] = None,
    amplitude: Annotated[Optional[float], typer.Option("--amplitude", "-B", help="Blow-up amplitude B")] = None,
):
    """Write the blow-up ladder table and the predicted upper lifespan."""
    settings = get_settings()
    args = {"--config": config, "--output": output, "--j-max": j_max, "--eps": eps, "--amplitude": amplitude}
    raise typer.Exit(handle_blowup_seq(args, settings))


@app.command("conv-oracle")
def conv_oracle(
    config: OptionalConfigOption = None,
    output: OutputOption = None,
    seed: SeedOption = None,
    samples: Annotated[Optional[int], typer.Option("--samples", "-n", help="Monte-Carlo samples per case")] = None,
    cases: Annotated[Optional[int], typer.Option("--cases", help="Number of random cases")] = None,
):
    """Cross-check the deterministic potential against the Monte-Carlo oracle."""
    settings = get_settings()
    args = {"--config": config, "--output": output, "--seed": seed, "--samples": samples, "--cases": cases}
    raise typer.Exit(handle_conv_oracle(args, settings))


# ============================================================
# Config Subcommands
# ============================================================


@config_app.command("show")
def config_show(
    config_path: Annotated[Optional[str], typer.Argument(help="Config file to print in canonical form")] = None,
):
    """Show global settings, or a config in canonical form."""
    settings = get_settings()
    args = {"show": True, "validate": False, "<config_path>": config_path}
    raise typer.Exit(handle_config_command(args, settings))


@config_app.command("validate")
def config_validate(
    config_path: Annotated[str, typer.Argument(help="Path to config file to validate")],
):
    """Validate a config file."""
    settings = get_settings()
    args = {"show": False, "validate": True, "<config_path>": config_path}
    raise typer.Exit(handle_config_command(args, settings))


# ============================================================
# Command Handlers
# ============================================================


def load_experiment(config_path: Optional[str]) -> ExperimentConfig:
    """Load an experiment config; the defaults when no path is given.

    Raises:
        ConfigurationError: If the file is missing, malformed or invalid.
    """
    if config_path is None:
        return ExperimentConfig()
    try:
        return ConfigLoader().load_from_file(config_path)
    except FileNotFoundError as e:
        raise ConfigurationError(str(e)) from e


def _writer(config: ExperimentConfig, args: dict, settings: LabSettings, seed: int | None = None, grid=None):
    from .results import Provenance, ResultWriter

    if args.get("--output"):
        directory = Path(args["--output"])
    elif config.output.directory:
        directory = Path(config.output.directory)
    else:
        directory = settings.output_dir / config.name
    return ResultWriter(directory, Provenance.for_config(config, grid, seed))


def _resolve_seed(args: dict, config: ExperimentConfig, settings: LabSettings) -> int:
    if args.get("--seed") is not None:
        return int(args["--seed"])
    return config.seed if config.seed is not None else settings.default_seed


def handle_config_command(args: dict, settings: LabSettings) -> int:
    """Handle config commands."""
    if args["show"]:
        if args.get("<config_path>"):
            try:
                config = load_experiment(args["<config_path>"])
            except ConfigurationError as e:
                print(f"Config validation failed: {e}")
                return EXIT_BAD_CONFIG
            print(dump_config(config), end="")
            return EXIT_OK
        print("Current Configuration:")
        print("-" * 40)
        print(f"Log Level: {settings.log_level}")
        print(f"Log Dir: {settings.log_dir or 'Not set'}")
        print(f"Workers: {settings.workers} ({'parallel' if settings.parallel else 'serial'})")
        print(f"Output Dir: {settings.output_dir}")
        print(f"Checkpoint Format: {settings.checkpoint_format}")
        print(f"Default Seed: {settings.default_seed}")
        shipped = ConfigLoader().list_configs()
        print(f"Shipped Configs: {', '.join(shipped) if shipped else 'none'}")
        return EXIT_OK
    elif args["validate"]:
        from .experiment_config import config_hash

        try:
            config = load_experiment(args["<config_path>"])
        except ConfigurationError as e:
            print(f"Config validation failed: {e}")
            return EXIT_BAD_CONFIG
        print(f"Config valid: {config.name} ({config_hash(config)})")
        print(f"  Gamma: {config.gamma}")
        print(f"  Data: {config.data.family} (kappa={config.data.kappa})")
        print(f"  Grid: dr={config.grid.dr}, t_max={config.grid.t_max}")
        print(f"  Battery: {len(config.verify.battery)} items")
        return EXIT_OK
    return EXIT_FAILED


def handle_solve(args: dict, settings: LabSettings) -> int:
    """Solve one run and write its artifacts."""
    from .analysis import x_norm_history
    from .evolution import solve as solve_integral
    from .evolution import solve_fd_fastpath
    from .evolution.field import estimate_to_dict
    from .radial import build_on_grid

    try:
        config = load_experiment(args["--config"])
        grid = config.build_grid()
    except LabError as e:
        print(f"Error: {e}")
        return EXIT_BAD_CONFIG

    run_logger = RunLogger(config.name)
    data = build_on_grid(config.family, grid)
    solver = solve_fd_fastpath if config.solve.method == "fd" else solve_integral
    run_logger.info(f"solving gamma={config.gamma}, eps={config.solve.eps} on {grid.describe()}")
    try:
        with run_logger.timed("solve"):
            field, estimate = solver(data, config.solve.eps, config.gamma, grid, options=config.solve.solver_options())
    except LabError as e:
        print(f"Error: {e}")
        return EXIT_BAD_CONFIG

    history = x_norm_history(field, config.gamma)
    fmt = args.get("--format") or config.output.checkpoint_format or settings.checkpoint_format
    writer = _writer(config, args, settings, grid=grid)
    writer.write_field("field", field, fmt=fmt)
    writer.write_profile("u0.csv", data.u0)
    writer.write_profile("u1.csv", data.u1)
    writer.write_csv(
        "x_norm_history.csv",
        ({"t": float(t), "x_norm": float(v)} for t, v in zip(grid.t, history)),
        columns=["t", "x_norm"],
    )
    writer.write_json(
        "lifespan.json",
        {
            "estimate": estimate_to_dict(estimate),
            "gamma": config.gamma,
            "regime": data.regime(config.gamma),
            "slabs": field.finalized_count,
            "t_final": field.t_final,
            "x_norm": float(history[-1]) if history.size else 0.0,
        },
    )
    run_logger.info(f"T in [{estimate.T_low:.4g}, {estimate.T_high:.4g}) ({estimate.reason.value})")
    print(f"T in [{estimate.T_low:.6g}, {estimate.T_high:.6g}) ({estimate.reason.value})")
    print(f"Wrote {len(writer.written)} files to {writer.directory}")
    return EXIT_OK


def handle_lifespan_sweep(args: dict, settings: LabSettings) -> int:
    """Run a lifespan sweep and fit the lifespan models."""
    from .blowup import predicted_upper_lifespan
    from .evolution import lifespan_estimate
    from .sweep import compare_models, grid_convergence

    try:
        config = load_experiment(args["--config"])
    except ConfigurationError as e:
        print(f"Error: {e}")
        return EXIT_BAD_CONFIG

    family = config.family
    margin = family.support_radius if config.grid.support_radius is None else config.grid.support_radius
    workers = args.get("--workers") or settings.workers
    try:
        policy = config.sweep.policy(config.grid.dr, margin)
        estimates = lifespan_estimate(
            family,
            config.gamma,
            config.sweep.eps_list,
            policy,
            options=config.solve.solver_options(),
            workers=workers,
            method=config.solve.method,
        )
    except LabError as e:
        print(f"Error: {e}")
        return EXIT_BAD_CONFIG

    writer = _writer(config, args, settings)
    rows = []
    blowup = config.data.family == "blowup" and math.isclose(config.gamma, 2.0)
    for estimate in estimates:
        row = {**estimate.to_row(), "t_max": estimate.t_max, "capped": estimate.capped}
        if blowup:
            row["log_T_predicted_upper"] = predicted_upper_lifespan(estimate.eps, config.data.amplitude).log_T
        rows.append(row)
    writer.write_csv("lifespan_sweep.csv", rows)

    try:
        comparison = compare_models(
            estimates,
            amplitude=config.data.amplitude if blowup else None,
            min_points=config.sweep.min_points,
        )
    except InsufficientDataError as e:
        writer.write_json("sweep_fit.json", {"error": str(e), "entries": rows})
        print(f"Error: {e}")
        return EXIT_FAILED

    report = comparison.to_dict()
    stable = True
    if config.sweep.grid_check:
        try:
            fine = lifespan_estimate(
                family,
                config.gamma,
                config.sweep.eps_list,
                replace(policy, dr=0.5 * policy.dr),
                options=config.solve.solver_options(),
                workers=workers,
                method=config.solve.method,
            )
        except LabError as e:
            print(f"Error: {e}")
            return EXIT_BAD_CONFIG
        checks = grid_convergence(estimates, fine)
        writer.write_csv("grid_check.csv", (c.to_row() for c in checks))
        stable = all(c.stable for c in checks)
        report["grid_stable"] = stable
    writer.write_json("sweep_fit.json", report)
    primary = comparison.primary
    print(f"log T = {primary.slope:.6g} eps^-2 + {primary.intercept:.6g}  (R^2 = {primary.r_squared:.4f})")
    print(f"eps^-1 competitor R^2 = {comparison.competitor.r_squared:.4f}")
    if not primary.success:
        print("Error: fitted slope is not positive")
        return EXIT_FAILED
    if not stable:
        print("Error: T brackets are not stable under dr halving")
        return EXIT_FAILED
    return EXIT_OK


def handle_verify(args: dict, settings: LabSettings) -> int:
    """Run the verifier battery."""
    from .verification import battery_summary, exit_code, run_battery

    try:
        config = load_experiment(args["--config"])
        if args.get("--item"):
            section = VerifyConfig.model_validate({**config.verify.model_dump(), "battery": args["--item"]})
            config = config.model_copy(update={"verify": section})
    except (ConfigurationError, ValueError) as e:
        print(f"Error: {e}")
        return EXIT_BAD_CONFIG

    seed = _resolve_seed(args, config, settings)
    results = run_battery(config, seed=seed)
    if not results:
        print("Empty battery; nothing to verify")
        return EXIT_OK

    writer = _writer(config, args, settings, seed=seed)
    writer.write_json("verify.json", battery_summary(results))
    for result in results:
        expectation = "pass" if result.expect_pass else "fail"
        print(f"  [{result.status:>10}] {result.name} (expected {expectation})")
    code = exit_code(results)
    print(f"{sum(r.as_expected for r in results)}/{len(results)} items as expected")
    return code


def handle_global_persistence(args: dict, settings: LabSettings) -> int:
    """Solve long small-data runs and report X-norm plateaus."""
    from .analysis import x_norm_history
    from .evolution import solve as solve_integral
    from .radial import Grid, build_on_grid

    try:
        config = load_experiment(args["--config"])
    except ConfigurationError as e:
        print(f"Error: {e}")
        return EXIT_BAD_CONFIG
    critical = 0.5 * (5.0 - config.gamma)
    if not 2.0 < config.gamma < 3.0 or not math.isclose(config.data.kappa, critical, rel_tol=1e-9):
        print(f"Error: global persistence needs 2 < gamma < 3 and kappa = (5 - gamma)/2 = {critical}")
        return EXIT_BAD_CONFIG

    persistence = config.persistence
    family = config.family
    rows = []
    try:
        grid = Grid.build(persistence.dr, persistence.horizon, family.support_radius)
        data = build_on_grid(family, grid)
        runs = []
        for eps in persistence.eps_list:
            runs.append((eps, *solve_integral(data, eps, config.gamma, grid, options=config.solve.solver_options())))
    except LabError as e:
        print(f"Error: {e}")
        return EXIT_BAD_CONFIG

    for eps, field, estimate in runs:
        run_logger = RunLogger(f"eps={eps:.3f}")
        history = x_norm_history(field, config.gamma)
        half = history.size // 2
        growth = float(history[-1] / history[half] - 1.0) if history.size > 1 and history[half] > 0 else 0.0
        plateaued = estimate.capped and growth <= persistence.plateau_tolerance
        rows.append(
            {
                "eps": eps,
                "reason": estimate.reason.value,
                "T_high": estimate.T_high,
                "x_norm": float(history[-1]) if history.size else 0.0,
                "late_growth": growth,
                "plateaued": plateaued,
            }
        )
        run_logger.info(f"{estimate.reason.value}, X norm {rows[-1]['x_norm']:.4g}, late growth {growth:.3%}")

    writer = _writer(config, args, settings, grid=grid)
    writer.write_csv("persistence.csv", rows)
    writer.write_json(
        "persistence.json",
        {
            "gamma": config.gamma,
            "kappa": config.data.kappa,
            "regime": data.regime(config.gamma),
            "runs": rows,
            "note": "global existence is a small-data statement; large eps may blow up",
        },
    )
    for row in rows:
        status = "plateau" if row["plateaued"] else "no plateau"
        print(f"  eps={row['eps']:<8g} {row['reason']:<18} X norm={row['x_norm']:.4g} ({status})")
    return EXIT_OK


def handle_blowup_seq(args: dict, settings: LabSettings) -> int:
    """Write the blow-up ladder."""
    from .blowup import eps0_threshold, predicted_upper_lifespan, recursion_residuals, sequences, verify_recursion

    try:
        config = load_experiment(args.get("--config"))
    except ConfigurationError as e:
        print(f"Error: {e}")
        return EXIT_BAD_CONFIG

    eps = args["--eps"] if args.get("--eps") is not None else config.solve.eps
    if args.get("--amplitude") is not None:
        amplitude = args["--amplitude"]
    else:
        amplitude = config.data.amplitude if config.data.family == "blowup" else 1.0
    try:
        ladder = sequences(int(args["--j-max"]), eps, amplitude)
        predicted = predicted_upper_lifespan(eps, amplitude)
    except LabError as e:
        print(f"Error: {e}")
        return EXIT_BAD_CONFIG

    residuals = recursion_residuals(ladder)
    holds = verify_recursion(ladder)
    writer = _writer(config, args, settings)
    writer.write_csv("ladder.csv", (s.to_row() for s in ladder), columns=["j", "log_C_j", "a_j", "l_j", "S_j"])
    writer.write_json(
        "ladder.json",
        {
            "eps": eps,
            "B": amplitude,
            "j_max": len(ladder),
            "recursion_holds": holds,
            "max_residual": max(residuals) if residuals else 0.0,
            "predicted": predicted.to_dict(),
            "eps0_threshold": eps0_threshold(amplitude),
        },
    )
    print(f"log T_upper = {predicted.log_T:.6g}, log t_K = {predicted.log_t_K:.6g}")
    print(f"recursion {'holds' if holds else 'FAILS'} for j <= {len(ladder)}")
    return EXIT_OK if holds else EXIT_FAILED


def handle_conv_oracle(args: dict, settings: LabSettings) -> int:
    """Monte-Carlo cross-check of hartree_potential."""
    from .convolution import draw_oracle_cases, hartree_potential, hartree_potential_mc

    try:
        config = load_experiment(args.get("--config"))
    except ConfigurationError as e:
        print(f"Error: {e}")
        return EXIT_BAD_CONFIG

    oracle = config.oracle
    seed = _resolve_seed(args, config, settings)
    n_samples = int(args.get("--samples") or oracle.n_samples)
    n_cases = int(args.get("--cases") or oracle.cases)
    rows = []
    for case in draw_oracle_cases(n_cases, oracle.gammas, seed):
        try:
            deterministic = float(hartree_potential(case.profile, case.gamma, case.r))
            estimate = hartree_potential_mc(case.profile, case.gamma, case.r, n_samples, seed + case.index)
        except LabError as e:
            logger.error(f"oracle case {case.index} failed: {e}")
            return EXIT_INTERNAL
        agrees = estimate.agrees_with(deterministic, oracle.stderr_multiple)
        rows.append(
            {
                "case": case.index,
                "family": case.family,
                "gamma": case.gamma,
                "r": case.r,
                "deterministic": deterministic,
                "mc_mean": estimate.mean,
                "mc_stderr": estimate.stderr,
                "agrees": agrees,
            }
        )

    writer = _writer(config, args, settings, seed=seed)
    writer.write_csv("conv_oracle.csv", rows)
    agreed = sum(row["agrees"] for row in rows)
    print(f"{agreed}/{len(rows)} cases within {oracle.stderr_multiple} standard errors")
    return EXIT_OK if agreed == len(rows) else EXIT_FAILED


def main():
    """Main entry point."""
    app()


if __name__ == "__main__":
    main()
