"""Strong and mild solutions of ``M0 u' + M1 u = 0``.

Strong solutions start in ``IV`` and evolve by ``exp(-t G)`` inside ``IV``.
Mild solutions accept any ``u0``: the ``N(M0)^perp`` component obeys the
ordinary equation ``x' = A x`` with the reduced generator ``A`` and the
``N(M0)`` component follows from the graph relation, so for ``t > 0``

    u(t) = iota_{N^perp} x(t) + iota_N (-B^{-1} C) x(t),   x(t) = exp(tA) iota_{N^perp}^* u0.

The mild solution is an ``L2``-class object; the stored value at ``t = 0`` is
the given ``u0`` and ``Trajectory.jump`` carries the right limit ``u(0+)``.
"""

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .consistent_iv import compute_iv, iv_for, iv_membership
from .errors import InconsistentInitialValue, InternalInconsistency, InvalidGrid, Overflow
from .pencil import block_factorize, reversed_pencil
from .quadrature import cumulative_simpson
from .subspaces import as_matrix, as_vector

__all__ = [
    "ExpmResult",
    "Trajectory",
    "expm",
    "expm_batch",
    "solve_strong",
    "solve_mild",
    "solve_backward",
    "mild_evolution",
    "strong_evolution",
    "integrated_identity_residual",
    "duality_check",
]

# Higham (2005) backward-error bounds for the [m/m] Pade approximant in the 1-norm.
_THETA = {3: 1.495585217958292e-2, 5: 2.539398330063230e-1, 7: 9.504178996162932e-1,
          9: 2.097847961257068e0, 13: 5.371920351148152e0}


@lru_cache(maxsize=None)
def _pade_coefficients(m):
    fm, f2m = math.factorial(m), math.factorial(2 * m)
    return tuple(
        math.factorial(2 * m - j) * fm / (f2m * math.factorial(j) * math.factorial(m - j))
        for j in range(m + 1)
    )


def _pade(a, m):
    """[m/m] Pade approximant of exp for a stack of matrices ``a`` (..., n, n)."""
    n = a.shape[-1]
    eye = np.broadcast_to(np.eye(n, dtype=a.dtype), a.shape)
    c = _pade_coefficients(m)
    a2 = a @ a
    if m == 13:
        a4 = a2 @ a2
        a6 = a4 @ a2
        u = a @ (a6 @ (c[13] * a6 + c[11] * a4 + c[9] * a2) + c[7] * a6 + c[5] * a4 + c[3] * a2 + c[1] * eye)
        v = a6 @ (c[12] * a6 + c[10] * a4 + c[8] * a2) + c[6] * a6 + c[4] * a4 + c[2] * a2 + c[0] * eye
    else:
        powers = [eye, a2]
        for _ in range(2, m // 2 + 1):
            powers.append(powers[-1] @ a2)
        u = sum(c[j] * powers[(j - 1) // 2] for j in range(1, m + 1, 2))
        u = a @ u
        v = sum(c[j] * powers[j // 2] for j in range(0, m + 1, 2))
    return np.linalg.solve(v - u, v + u)


@dataclass(frozen=True)
class ExpmResult:
    value: np.ndarray
    scaling_squaring_order: int
    method: str = "pade"


def expm_batch(a):
    """``exp`` of every matrix in the stack ``a`` (shape ``(k, n, n)``).

    Scaling and squaring with diagonal Pade approximants; each matrix gets its
    own number of squarings.  Returns ``(values, squarings)``.
    """
    a = np.asarray(a, dtype=complex)
    if a.ndim != 3 or a.shape[1] != a.shape[2]:
        raise ValueError(f"expected a stack of square matrices, got shape {a.shape}")
    k, n = a.shape[0], a.shape[1]
    if n == 0 or k == 0:
        return np.broadcast_to(np.eye(n, dtype=complex), a.shape).copy(), np.zeros(k, dtype=int)
    norms = np.abs(a).sum(axis=1).max(axis=1)
    nmax = float(norms.max())
    if not np.isfinite(nmax):
        raise ValueError("matrix has non-finite entries")
    for m in (3, 5, 7, 9):
        if nmax <= _THETA[m]:
            return _pade(a, m), np.zeros(k, dtype=int)
    s = np.zeros(k, dtype=int)
    big = norms > _THETA[13]
    s[big] = np.ceil(np.log2(norms[big] / _THETA[13])).astype(int)
    x = _pade(a / (2.0 ** s)[:, None, None], 13)
    for level in range(int(s.max())):
        sel = s > level
        x[sel] = x[sel] @ x[sel]
    if not np.all(np.isfinite(x)):
        raise Overflow("matrix exponential overflowed")
    return x, s


def expm(a, t=1.0, method="pade", eig_cond_limit=1e6):
    """``exp(t*a)``.

    ``method="pade"`` uses scaling and squaring.  ``method="auto"`` takes the
    eigendecomposition path when ``a`` is diagonalizable with eigenvector
    condition number below ``eig_cond_limit`` and falls back to Pade
    otherwise.
    """
    a = as_matrix(a, "a", square=True)
    t = float(t)
    if not np.isfinite(t):
        raise ValueError("t must be finite")
    ta = t * a
    if method == "auto" and a.shape[0]:
        w, v = np.linalg.eig(ta)
        if np.linalg.cond(v) < eig_cond_limit:
            with np.errstate(over="ignore", invalid="ignore"):
                val = (v * np.exp(w)) @ np.linalg.inv(v)
            if not np.all(np.isfinite(val)):
                raise Overflow("matrix exponential overflowed")
            return ExpmResult(val, 0, "eig")
    elif method not in ("pade", "auto"):
        raise ValueError(f"unknown method {method!r}")
    with np.errstate(over="ignore", invalid="ignore"):
        val, s = expm_batch(ta[None])
    if not np.all(np.isfinite(val)):
        raise Overflow("matrix exponential overflowed")
    return ExpmResult(val[0], int(s[0]), "pade")


@dataclass(frozen=True)
class Trajectory:
    times: np.ndarray
    states: np.ndarray  # shape (len(times), n)
    kind: str
    jump: tuple = None  # (u0_given, u(0+)) for mild solutions

    def __post_init__(self):
        if len(self.times) != len(self.states):
            raise ValueError("times and states differ in length")

    @property
    def n(self):
        return self.states.shape[1]

    def max_norm(self):
        return float(np.max(np.linalg.norm(self.states, axis=1))) if len(self.states) else 0.0


def _check_times(times):
    t = np.asarray(times, dtype=float).reshape(-1)
    if t.size == 0 or t[0] != 0.0:
        raise InvalidGrid("time grid must start at 0")
    if np.any(np.diff(t) < 0) or not np.all(np.isfinite(t)):
        raise InvalidGrid("time grid must be finite and sorted")
    return t


def strong_evolution(iv, u0):
    """Vectorized ``t -> iota_IV exp(-t G) iota_IV^* u0``."""
    c0 = iv.basis.coords(u0)
    g = iv.generator_g
    q = iv.basis.basis

    def evaluate(ts):
        ts = np.asarray(ts, dtype=float).reshape(-1)
        if g.size == 0:
            return np.zeros((ts.size, iv.n), dtype=complex)
        e, _ = expm_batch(-ts[:, None, None] * g[None])
        return (e @ c0) @ q.T

    return evaluate


def mild_evolution(f, iv, u0):
    """Vectorized continuous representative of the mild solution on ``t >= 0``.

    At ``t = 0`` this returns ``u(0+)``, not the given ``u0``.
    """
    x0 = f.decomp.conull_m0.coords(u0)
    a = f.reduced_generator_a
    graph = iv.graph

    def evaluate(ts):
        ts = np.asarray(ts, dtype=float).reshape(-1)
        if a.size == 0:
            return np.zeros((ts.size, f.n), dtype=complex)
        e, _ = expm_batch(ts[:, None, None] * a[None])
        return (e @ x0) @ graph.T

    return evaluate


def solve_strong(iv, u0, times, tol=1e-9):
    """Strong solution for ``u0`` in ``IV``.

    Raises :class:`InconsistentInitialValue` otherwise; use :func:`solve_mild`
    for arbitrary data.
    """
    u0 = as_vector(u0, iv.n, "u0")
    t = _check_times(times)
    if not iv_membership(iv, u0, tol):
        proj = iv.basis.embed(iv.basis.coords(u0))
        raise InconsistentInitialValue(
            f"u0 is not a consistent initial value; its projection onto IV is {np.round(proj, 12).tolist()}"
        )
    with np.errstate(over="ignore", invalid="ignore"):
        states = strong_evolution(iv, u0)(t)
    states[0] = u0
    return Trajectory(t, states, "strong")


def solve_mild(f, iv, u0, times, check=False, quad_tol=1e-9):
    """Mild solution for arbitrary ``u0``.

    With ``check=True`` the integrated identity ``M0 u(t) + int_0^t M1 u =
    M0 u0`` is verified on the grid (adaptive Simpson) and, for ``u0`` in
    ``IV``, agreement with the strong solution; a violation raises
    :class:`~regdae.errors.InternalInconsistency`.
    """
    u0 = as_vector(u0, f.n, "u0")
    t = _check_times(times)
    evolve = mild_evolution(f, iv, u0)
    states = evolve(t)
    u_plus = states[0].copy()
    states[0] = u0
    traj = Trajectory(t, states, "mild", (u0, u_plus))
    if check:
        res = integrated_identity_residual(f, u0, t, evolve, quad_tol)
        bound = 1e-7 * (1.0 + np.linalg.norm(u0))
        if res.max() > bound:
            raise InternalInconsistency(f"integrated identity residual {res.max():.3e} > {bound:.3e}")
        if iv_membership(iv, u0):
            strong = solve_strong(iv, u0, t)
            gap = float(np.max(np.abs(strong.states - states)))
            if gap > 1e-9 * max(1.0, traj.max_norm()):
                raise InternalInconsistency(f"mild and strong solutions differ by {gap:.3e}")
    return traj


def integrated_identity_residual(f, u0, times, evolve=None, quad_tol=1e-9):
    """``|M0 u(t) + int_0^t M1 u(s) ds - M0 u0|`` at every grid time.

    ``quad_tol`` is the tolerance per grid gap, relative to ``max(1, |M1 u|)``
    on the grid.
    """
    u0 = as_vector(u0, f.n, "u0")
    times = np.asarray(times, dtype=float)
    if evolve is None:
        evolve = mild_evolution(f, compute_iv(f), u0)
    m0, m1 = f.m0, f.m1
    on_grid = evolve(times)
    scale = max(1.0, float(np.max(np.linalg.norm(on_grid @ m1.T, axis=1))) if len(times) else 1.0)
    integrals, _ = cumulative_simpson(lambda s: evolve(s) @ m1.T, times, quad_tol * scale)
    lhs = on_grid @ m0.T + integrals
    res = np.linalg.norm(lhs - m0 @ u0, axis=1)
    # at t = 0 the stored value is the given u0, for which the identity is trivial
    if len(times) and times[0] == 0.0:
        res[0] = 0.0
    return res


def solve_backward(f_rev, iv_rev, w0, times, check=False):
    """Mild solution of the reversed pencil ``M0 w' - M1 w = 0``."""
    return solve_mild(f_rev, iv_rev, w0, times, check=check)


def duality_check(p, u0, big_t, grid, tol=None, rank_tol=None):
    """Forward-backward consistency of mild solutions.

    Solves forward from ``u0`` on ``[0, T]``, then solves the reversed pencil
    from ``u(T)`` and returns ``max ||w(t) - u(T - t)||`` over interior grid
    points.
    """
    if not big_t > 0:
        raise ValueError("big_t must be positive")
    if grid < 3:
        raise ValueError("grid must have at least 3 points")
    f = block_factorize(p, tol, rank_tol)
    iv = iv_for(p, tol, rank_tol)
    rev = reversed_pencil(p)
    f_rev = block_factorize(rev, tol, rank_tol)
    iv_rev = iv_for(rev, tol, rank_tol)
    t = np.linspace(0.0, big_t, grid)
    u = solve_mild(f, iv, u0, t)
    w = solve_backward(f_rev, iv_rev, u.states[-1], t)
    interior = slice(1, grid - 1)
    diff = w.states[interior] - u.states[::-1][interior]
    return float(np.max(np.linalg.norm(diff, axis=1)))
