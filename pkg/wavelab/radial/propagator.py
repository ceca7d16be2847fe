"""Spherical means, the free propagator W, and the free solution."""

import math

import numpy as np
from scipy import integrate

from ..errors import DomainError
from .families import InitialDataSet
from .grid import Grid
from .profile import ArrayLike, RadialFunction, RadialProfile

FOUR_PI = 4.0 * math.pi

# Adaptive quadrature targets for closed-form radial functions
QUAD_EPSREL = 1e-13
QUAD_LIMIT = 200
# Relative step of the r = 0 difference quotient for callables
ORIGIN_STEP = 1e-5

Radial = RadialProfile | RadialFunction


def _broadcast(r: ArrayLike, t: ArrayLike) -> tuple[np.ndarray, np.ndarray, bool]:
    scalar = np.ndim(r) == 0 and np.ndim(t) == 0
    r_arr, t_arr = np.broadcast_arrays(
        np.atleast_1d(np.asarray(r, dtype=float)), np.atleast_1d(np.asarray(t, dtype=float))
    )
    if np.any(r_arr < 0) or np.any(t_arr < 0):
        raise DomainError("r and t must be non-negative")
    return r_arr, t_arr, scalar


def _finish(out: np.ndarray, scalar: bool) -> ArrayLike:
    return float(out.reshape(-1)[0]) if scalar else out


def _evaluate(b: Radial, lam: np.ndarray) -> np.ndarray:
    return np.broadcast_to(np.asarray(b(lam), dtype=float), lam.shape)


def radial_moment(b: Radial, lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
    """Integral of lambda * b(lambda) over [lo, hi].

    Profiles integrate their interpolant exactly; plain callables are integrated
    adaptively, so closed-form inputs are limited only by QUAD_EPSREL.
    """
    if isinstance(b, RadialProfile):
        return np.asarray(b.moment(lo, hi), dtype=float)

    def integrand(lam: float) -> float:
        return lam * float(_evaluate(b, np.array([lam]))[0])

    out = np.empty(np.shape(lo))
    for k, (a, c) in enumerate(zip(np.ravel(lo), np.ravel(hi))):
        value, _ = integrate.quad(integrand, a, c, epsabs=0.0, epsrel=QUAD_EPSREL, limit=QUAD_LIMIT)
        out.flat[k] = value
    return out


def spherical_mean(b: Radial, r: ArrayLike, rho: ArrayLike) -> ArrayLike:
    """Surface integral of b(|x + rho*omega|) over the unit sphere, |x| = r.

    Uses the radial reduction (2 pi / (r rho)) * integral_{|rho - r|}^{rho + r} lambda b(lambda) d lambda,
    with the limit 4 pi b(rho) at r = 0. `b` is a sampled profile or a vectorized callable.

    Raises:
        DomainError: If rho <= 0 or r < 0.
    """
    if np.any(np.asarray(rho) <= 0):
        raise DomainError("rho must be positive")
    r_arr, rho_arr, scalar = _broadcast(r, rho)
    out = np.empty(r_arr.shape)
    origin = r_arr == 0.0
    out[origin] = FOUR_PI * _evaluate(b, rho_arr[origin])
    rr, pp = r_arr[~origin], rho_arr[~origin]
    out[~origin] = 2.0 * math.pi / (rr * pp) * radial_moment(b, np.abs(pp - rr), pp + rr)
    return _finish(out, scalar)


def w_operator(phi: Radial, r: ArrayLike, t: ArrayLike) -> ArrayLike:
    """W(phi|r,t) = (1/2r) integral_{|r-t|}^{r+t} lambda phi(lambda) d lambda; t*phi(t) at r = 0."""
    r_arr, t_arr, scalar = _broadcast(r, t)
    out = np.empty(r_arr.shape)
    origin = r_arr == 0.0
    out[origin] = t_arr[origin] * _evaluate(phi, t_arr[origin])
    rr, tt = r_arr[~origin], t_arr[~origin]
    out[~origin] = radial_moment(phi, np.abs(rr - tt), rr + tt) / (2.0 * rr)
    return _finish(out, scalar)


def _origin_rate(phi: Radial, t: np.ndarray) -> np.ndarray:
    """d/dt [t phi(t)]; callables use a central difference of the odd extension s phi(|s|)."""
    if isinstance(phi, RadialProfile):
        return np.atleast_1d(phi(t)) + t * np.atleast_1d(phi.slope(t))
    h = ORIGIN_STEP * np.maximum(1.0, t)
    return ((t + h) * _evaluate(phi, t + h) - (t - h) * _evaluate(phi, np.abs(t - h))) / (2.0 * h)


def dt_w_operator(phi: Radial, r: ArrayLike, t: ArrayLike) -> ArrayLike:
    """Time derivative of W(phi|r,t).

    (1/2r) [(r+t) phi(r+t) + (r-t) phi(|r-t|)], with the limit phi(t) + t phi'(t) at r = 0
    and phi(r) at t = 0.
    """
    r_arr, t_arr, scalar = _broadcast(r, t)
    out = np.empty(r_arr.shape)
    origin = r_arr == 0.0
    start = (t_arr == 0.0) & ~origin
    rest = ~(origin | start)

    out[origin] = _origin_rate(phi, t_arr[origin])
    out[start] = _evaluate(phi, r_arr[start])
    rr, tt = r_arr[rest], t_arr[rest]
    out[rest] = ((rr + tt) * _evaluate(phi, rr + tt) + (rr - tt) * _evaluate(phi, np.abs(rr - tt))) / (2.0 * rr)
    return _finish(out, scalar)


def free_solution(data: InitialDataSet, eps: float, r: ArrayLike, t: ArrayLike) -> ArrayLike:
    """u0(r,t) = eps * [dW(u0|r,t)/dt + W(u1|r,t)].

    Raises:
        DomainError: If eps is negative.
    """
    if eps < 0:
        raise DomainError(f"eps must be non-negative, got {eps}")
    if eps == 0.0:
        r_arr, _, scalar = _broadcast(r, t)
        return _finish(np.zeros(r_arr.shape), scalar)
    value = np.add(dt_w_operator(data.u0, r, t), w_operator(data.u1, r, t))
    return eps * value if np.ndim(value) else float(eps * value)


def free_solution_grid(data: InitialDataSet, eps: float, grid: Grid) -> np.ndarray:
    """Free solution on every (slab, node) of a grid, shape (n_t, n_r + 1)."""
    tt, rr = np.meshgrid(grid.t, grid.r, indexing="ij")
    return np.asarray(free_solution(data, eps, rr, tt)).reshape(grid.n_t, grid.n_r + 1)
