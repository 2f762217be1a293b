"""Numerical Fourier-Laplace checks of mild solutions.

For ``rho > max(s0, 0)`` the mild solution ``u`` satisfies

    (L_rho u)(t) = (2 pi)^{-1/2} int_0^inf e^{-(i t + rho) s} u(s) ds
                 = (2 pi)^{-1/2} M(i t + rho)^{-1} M0 u0.

:func:`transform_residual` evaluates the left side by quadrature of the
time-domain trajectory and compares it with the resolvent formula.  The tail
beyond the truncation horizon is bounded with the exponential envelope of the
trajectory, so the truncation error is controlled a priori.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .asymptotics import _envelope_constants
from .consistent_iv import iv_for
from .errors import NonConvergent, RhoTooSmall
from .pencil import block_factorize, resolvent, spectrum
from .quadrature import adaptive_simpson
from .solvers import mild_evolution
from .subspaces import as_vector

__all__ = [
    "LaplaceConfig",
    "LaplaceCheckReport",
    "weighted_l2_norm",
    "transform_residual",
    "default_rho",
    "truncation_horizon",
]

SQRT_2PI = math.sqrt(2.0 * math.pi)
MAX_TRUNCATION = 1e4


@dataclass(frozen=True)
class LaplaceConfig:
    rho: float
    frequencies: tuple = (-10.0, -1.0, 0.0, 1.0, 10.0)
    quad_tol: float = 1e-9
    truncation_t: float = None  # None: derived from the envelope tail bound


@dataclass(frozen=True)
class LaplaceCheckReport:
    rho: float
    rho_alt: float
    frequencies: np.ndarray
    residuals: np.ndarray
    residuals_alt: np.ndarray
    max_residual: float
    rho_pair_discrepancy: float
    truncation_t: float
    truncation_t_alt: float
    transforms: np.ndarray = field(repr=False, default=None)


def weighted_l2_norm(u, rho, truncation_t=None, tol=1e-10, envelope=None):
    """``(int_0^inf |u(t)|^2 e^{-2 rho t} dt)^{1/2}`` of a vectorized callable ``u``.

    ``u`` maps an array of times to an array of states (or scalars).  With
    ``envelope=(C, alpha)`` meaning ``|u(t)| <= C e^{alpha t}`` and
    ``alpha < rho``, the tail beyond ``truncation_t`` is bounded by
    ``C^2 e^{2(alpha - rho) T} / (2 (rho - alpha))`` and, when
    ``truncation_t`` is omitted, ``T`` is chosen to make that bound smaller
    than ``tol / 2``; half the bound is added to the quadrature value as a
    midpoint correction.  Without an envelope the horizon is doubled (from 8) until
    the integral over ``[T, 2T]`` falls below ``tol``.
    """

    def integrand(ts):
        with np.errstate(over="ignore", invalid="ignore"):
            vals = np.asarray(u(ts))
            vals = vals.reshape(len(ts), -1)
            return np.sum(np.abs(vals) ** 2, axis=1) * np.exp(-2.0 * rho * ts)

    if envelope is not None:
        c, alpha = envelope
        if not alpha < rho:
            raise NonConvergent(f"envelope growth {alpha} is not below rho = {rho}")
        gap = rho - alpha
        if truncation_t is None:
            truncation_t = max(1.0, math.log(max(c * c / (gap * tol), 1.0)) / (2 * gap))
        if truncation_t > MAX_TRUNCATION:
            raise NonConvergent(f"truncation horizon {truncation_t:.3g} exceeds {MAX_TRUNCATION:g}")
        tail = c * c * math.exp(-2 * gap * truncation_t) / (2 * gap)
        if tail > tol / 2 * (1 + 1e-9):
            raise NonConvergent(f"tail bound {tail:.2e} exceeds tol {tol:.1e}")
        val, _ = adaptive_simpson(integrand, 0.0, truncation_t, tol / 2)
        return math.sqrt(max(float(val) + tail / 2, 0.0))
    if truncation_t is not None:
        val, _ = adaptive_simpson(integrand, 0.0, truncation_t, tol / 2)
        return math.sqrt(max(float(val), 0.0))
    big_t = 8.0
    total, _ = adaptive_simpson(integrand, 0.0, big_t, tol / 2)
    while big_t <= MAX_TRUNCATION:
        piece, _ = adaptive_simpson(integrand, big_t, 2 * big_t, tol / 2)
        total = total + piece
        big_t *= 2
        if abs(piece) < tol:
            return math.sqrt(max(float(total), 0.0))
    raise NonConvergent("weighted L2 integral did not converge within the maximal horizon")


def default_rho(p):
    """``max(0, s0) + 1``."""
    s0 = spectrum(p).s0
    return max(0.0, s0) + 1.0


def truncation_horizon(bound_const, alpha, rho, tol):
    """Smallest ``T >= 1`` with ``bound_const e^{(alpha - rho) T} / (rho - alpha) < tol``."""
    gap = rho - alpha
    if not gap > 0:
        raise NonConvergent(f"rho = {rho} does not exceed the growth rate {alpha}")
    t = max(1.0, math.log(max(bound_const / (gap * tol), 1.0)) / gap)
    if t > MAX_TRUNCATION:
        raise NonConvergent(f"truncation horizon {t:.3g} exceeds {MAX_TRUNCATION:g}")
    return t


def _transform_at(p, f, evolve, u0, rho, freqs, quad_tol, big_t):
    """Quadrature transforms and resolvent values at every frequency."""
    out, ref = [], []
    m0u0 = p.m0 @ u0
    for w in freqs:
        s = complex(rho, w)
        # frequency-dependent panel count keeps the first pass from undersampling oscillations
        panels = int(min(4096, max(8, math.ceil(big_t * (abs(w) + rho + 1.0)))))
        val, _ = adaptive_simpson(
            lambda ts: evolve(ts) * np.exp(-s * ts)[:, None], 0.0, big_t, quad_tol, initial=panels
        )
        out.append(val / SQRT_2PI)
        ref.append(resolvent(p, s, f=f) @ m0u0 / SQRT_2PI)
    return np.array(out), np.array(ref)


def transform_residual(p, u0, cfg=None, rho_alt=None):
    """Compare the Fourier-Laplace transform of the mild solution with the
    resolvent formula at ``cfg.rho`` and again at ``rho_alt`` (default
    ``cfg.rho + 1``).

    ``rho_pair_discrepancy`` is the largest residual at ``rho_alt``: the same
    trajectory must satisfy the representation for every admissible weight.
    """
    f = block_factorize(p)
    iv = iv_for(p)
    u0 = as_vector(u0, p.n, "u0")
    spec = spectrum(p, f)
    floor = max(0.0, spec.s0)
    if cfg is None:
        cfg = LaplaceConfig(rho=floor + 1.0)
    if not cfg.rho > floor:
        raise RhoTooSmall(f"rho = {cfg.rho} must exceed max(s0, 0) = {floor}")
    rho_alt = cfg.rho + 1.0 if rho_alt is None else rho_alt
    if not rho_alt > floor:
        raise RhoTooSmall(f"rho_alt = {rho_alt} must exceed max(s0, 0) = {floor}")
    freqs = np.asarray(cfg.frequencies, dtype=float)
    evolve = mild_evolution(f, iv, u0)
    kappa, gnorm = _envelope_constants(f.reduced_generator_a, f)
    x0 = f.decomp.conull_m0.coords(u0)
    bound_const = kappa * gnorm * float(np.linalg.norm(x0))
    alpha = spec.spectral_abscissa if np.isfinite(spec.spectral_abscissa) else -1.0

    def horizon(rho):
        if cfg.truncation_t is not None:
            return float(cfg.truncation_t)
        if bound_const == 0.0:
            return 1.0
        return truncation_horizon(bound_const, alpha, rho, cfg.quad_tol)

    results = []
    for rho in (cfg.rho, rho_alt):
        big_t = horizon(rho)
        got, ref = _transform_at(p, f, evolve, u0, rho, freqs, cfg.quad_tol, big_t)
        results.append((big_t, got, np.linalg.norm(got - ref, axis=1)))
    (t1, got1, res1), (t2, _, res2) = results
    return LaplaceCheckReport(
        rho=float(cfg.rho),
        rho_alt=float(rho_alt),
        frequencies=freqs,
        residuals=res1,
        residuals_alt=res2,
        max_residual=float(np.max(res1)) if res1.size else 0.0,
        rho_pair_discrepancy=float(np.max(res2)) if res2.size else 0.0,
        truncation_t=t1,
        truncation_t_alt=t2,
        transforms=got1,
    )
