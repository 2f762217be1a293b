"""Exponential stability and exponential dichotomy of regular pencils.

Both the strong and the mild notion are decided by the same spectral
condition, because ``sigma(-G) = sigma(A) = sigma(M)``:

* exponentially stable  iff  ``sigma(M)`` lies in ``Re < 0``;
* exponential dichotomy iff  ``sigma(M)`` avoids the imaginary axis.

Numerically an eigenvalue within ``margin_tol`` of ``iR`` cannot be placed on
either side, so :func:`classify` has a ``marginal`` verdict that claims
nothing.
"""

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .consistent_iv import iv_for
from .errors import NoDichotomy, SpectrumTooCloseToAxis
from .pencil import SpectrumReport, block_factorize, resolvent, reversed_pencil, spectrum
from .solvers import expm_batch, mild_evolution
from .subspaces import SubspaceBasis, as_matrix, as_vector, orthonormalize

__all__ = [
    "STABLE",
    "DICHOTOMY",
    "MARGINAL",
    "UNSTABLE",
    "DichotomyReport",
    "SplitSubspaces",
    "DecayCheck",
    "classify",
    "dunford_projection",
    "split_subspaces",
    "verify_decay",
]

STABLE = "exponentially_stable"
DICHOTOMY = "dichotomy"
MARGINAL = "marginal"
UNSTABLE = "unstable_no_dichotomy"


@dataclass(frozen=True)
class DichotomyReport:
    spectrum: SpectrumReport
    verdict: str
    margin: float
    margin_tol: float
    projector_p: np.ndarray = None
    s_basis: SubspaceBasis = None  # N(M0)^perp coordinates
    t_basis: SubspaceBasis = None
    decay_rate: float = 0.0
    nonnormality_constant: float = float("inf")
    eigvec_cond: float = float("inf")
    graph_norm: float = 1.0

    @property
    def dim_s(self):
        return self.s_basis.dim if self.s_basis is not None else None

    @property
    def dim_t(self):
        return self.t_basis.dim if self.t_basis is not None else None

    @property
    def has_dichotomy(self):
        return self.verdict in (STABLE, DICHOTOMY)


def dunford_projection(a, margin_tol=1e-10):
    """Spectral projection of ``a`` onto its part in ``Re < 0``.

    Computed from an ordered Schur form ``Z [[T11, T12], [0, T22]] Z^*``
    (stable eigenvalues first) and the Sylvester equation
    ``T11 Y - Y T22 = T12``, which yields ``P = Z [[I, Y], [0, 0]] Z^*``.
    """
    a = as_matrix(a, "a", square=True)
    n = a.shape[0]
    if n == 0:
        return np.zeros((0, 0), dtype=complex)
    ev = np.linalg.eigvals(a)
    if np.min(np.abs(ev.real)) <= margin_tol:
        raise SpectrumTooCloseToAxis(
            f"eigenvalue within {margin_tol:.2e} of the imaginary axis (min |Re| = {np.min(np.abs(ev.real)):.3e})"
        )
    t, z, k = scipy.linalg.schur(a, output="complex", sort="lhp")
    p_hat = np.zeros((n, n), dtype=complex)
    p_hat[:k, :k] = np.eye(k)
    if 0 < k < n:
        y = scipy.linalg.solve_sylvester(t[:k, :k], -t[k:, k:], t[:k, k:])
        p_hat[:k, k:] = y
    return z @ p_hat @ z.conj().T


def _projector_range(proj):
    # nonzero singular values of a projection are >= 1
    u, sv, _ = np.linalg.svd(proj)
    return u[:, : int(np.sum(sv > 0.5))]


def _envelope_constants(a, f):
    """``(kappa(V), ||graph||)`` for the decay envelope.

    ``kappa(V)`` is the condition number of the eigenvector matrix with unit
    columns; it bounds ``||exp(tA) x|| <= kappa e^{t Re lambda_max} |x|`` on
    every spectral subspace.  Multiplying by the graph norm converts the
    ``N(M0)^perp`` estimate into one for the full state.
    """
    if a.size == 0:
        return 1.0, 1.0
    _, v = np.linalg.eig(a)
    v = v / np.linalg.norm(v, axis=0)
    kappa = float(np.linalg.cond(v))
    graph = f.decomp.conull_m0.basis + f.decomp.null_m0.basis @ (-f.b_inv_c)
    return kappa, float(np.linalg.norm(graph, 2))


def classify(p, margin_tol=None, tol=None, rank_tol=None):
    """Stability/dichotomy verdict from ``sigma(M)``.

    ``margin_tol`` defaults to ``1e-8 * ||A||``.  Verdicts:

    * ``exponentially_stable``: abscissa ``< -margin_tol``;
    * ``dichotomy``: every eigenvalue at distance ``> margin_tol`` from ``iR``
      and some eigenvalue in ``Re > 0``;
    * ``marginal``: some eigenvalue within ``margin_tol`` of ``iR`` and none
      clearly in ``Re > 0``;
    * ``unstable_no_dichotomy``: some eigenvalue within ``margin_tol`` of
      ``iR`` and another one clearly in ``Re > 0``.
    """
    f = block_factorize(p, tol, rank_tol)
    spec = spectrum(p, f)
    a = f.reduced_generator_a
    if margin_tol is None:
        margin_tol = 1e-8 * max(float(np.linalg.norm(a, 2)) if a.size else 0.0, 1.0)
    margin = spec.imag_axis_margin
    if spec.spectral_abscissa < -margin_tol:
        verdict = STABLE
    elif margin > margin_tol:
        verdict = DICHOTOMY
    elif spec.spectral_abscissa > margin_tol:
        verdict = UNSTABLE
    else:
        verdict = MARGINAL
    if verdict not in (STABLE, DICHOTOMY):
        return DichotomyReport(spec, verdict, float(margin), float(margin_tol))
    r = f.rank
    proj = dunford_projection(a, margin_tol) if r else np.zeros((0, 0), dtype=complex)
    s_b = SubspaceBasis(_projector_range(proj), "S (N(M0)^perp coords)")
    t_b = SubspaceBasis(_projector_range(np.eye(r) - proj), "T (N(M0)^perp coords)")
    kappa, gnorm = _envelope_constants(a, f)
    return DichotomyReport(
        spectrum=spec,
        verdict=verdict,
        margin=float(margin),
        margin_tol=float(margin_tol),
        projector_p=proj,
        s_basis=s_b,
        t_basis=t_b,
        decay_rate=float(margin) if r else float("inf"),
        nonnormality_constant=kappa * gnorm,
        eigvec_cond=kappa,
        graph_norm=gnorm,
    )


@dataclass(frozen=True)
class SplitSubspaces:
    s_mild: SubspaceBasis  # in N(M0)^perp coordinates
    t_mild: SubspaceBasis
    s_iv: SubspaceBasis  # in orthonormal IV coordinates
    t_iv: SubspaceBasis
    s_state: SubspaceBasis  # as subspaces of H
    t_state: SubspaceBasis
    direct_sum_residual: float
    direct_sum_sigma_min: float
    invariance_residual: float
    invariance_points: np.ndarray = field(repr=False, default=None)


def split_subspaces(report, p, iv=None, samples=20, seed=0, tol=None, rank_tol=None):
    """Stable/unstable splitting ``S (+) T`` in mild, ``IV`` and state coordinates.

    The strong splitting is the image of the mild one under ``K^{-1}``.
    Checks run here: the direct-sum residual ``||W W^{-1} - I||`` with
    ``W = [S T]``, and invariance of ``S`` under ``M(z)^{-1} M0`` for
    ``samples`` points ``z`` outside the disc containing ``sigma(M)``.
    """
    if not report.has_dichotomy:
        raise NoDichotomy(f"verdict is {report.verdict!r}; no splitting exists or can be certified")
    f = block_factorize(p, tol, rank_tol)
    iv = iv_for(p, tol, rank_tol) if iv is None else iv
    r = f.rank
    k_inv = np.linalg.inv(iv.iso_k) if r else np.zeros((0, 0), dtype=complex)
    s_m, t_m = report.s_basis, report.t_basis
    s_iv = SubspaceBasis(orthonormalize(k_inv @ s_m.basis), "S (IV coords)")
    t_iv = SubspaceBasis(orthonormalize(k_inv @ t_m.basis), "T (IV coords)")
    s_state = SubspaceBasis(orthonormalize(iv.basis.basis @ s_iv.basis), "S")
    t_state = SubspaceBasis(orthonormalize(iv.basis.basis @ t_iv.basis), "T")
    if r:
        w = np.hstack([s_m.basis, t_m.basis])
        if w.shape[1] != r:
            ds_res, smin = float("inf"), 0.0
        else:
            ds_res = float(np.linalg.norm(w @ np.linalg.inv(w) - np.eye(r)))
            smin = float(np.linalg.svd(w, compute_uv=False)[-1])
    else:
        ds_res, smin = 0.0, 1.0
    ev = report.spectrum.eigenvalues
    rad = (float(np.max(np.abs(ev))) if ev.size else 0.0) + 1.0
    rng = np.random.default_rng(seed)
    pts = rad * rng.uniform(1.0, 2.0, samples) * np.exp(2j * np.pi * rng.uniform(0, 1, samples))
    inv_res = 0.0
    if s_state.dim:
        proj = s_state.projector()
        for z in pts:
            y = resolvent(p, z, f=f) @ (p.m0 @ s_state.basis)
            inv_res = max(inv_res, float(np.max(np.linalg.norm(y - proj @ y, axis=0))))
    return SplitSubspaces(s_m, t_m, s_iv, t_iv, s_state, t_state, ds_res, smin, inv_res, pts)


@dataclass(frozen=True)
class DecayCheck:
    fitted_rate: float
    envelope_ok: bool
    max_envelope_ratio: float
    growth_ok: bool = None
    times: np.ndarray = field(repr=False, default=None)
    norms: np.ndarray = field(repr=False, default=None)


def _fit_rate(t, norms):
    mask = norms > 0
    if mask.sum() < 2:
        return float("inf")
    slope = np.polyfit(t[mask], np.log(norms[mask]), 1)[0]
    return float(-slope)


def verify_decay(p, report, u0, horizon=10.0, grid=101, part="S", slack=1.01):
    """Check the dichotomy envelope on one trajectory.

    ``part="S"``: the forward solution must satisfy
    ``|u(t)| <= slack * C e^{-rho t} |u0|``.  ``part="T"``: the reversed
    pencil's solution must satisfy the same decay bound, and the forward
    solution the growth bound ``|u(t)| >= e^{rho t} |u0| / (slack * C)``.
    ``rho`` and ``C`` come from ``report``.  The decaying trajectory is
    evolved inside its invariant subspace, which is the same trajectory for
    ``u0`` in that part and avoids rounding-driven growth.  ``fitted_rate``
    is the least-squares decay rate of ``log |u|`` and is diagnostic only.
    """
    if not report.has_dichotomy:
        raise NoDichotomy(f"verdict is {report.verdict!r}")
    u0 = as_vector(u0, p.n, "u0")
    rho, c = report.decay_rate, report.nonnormality_constant
    t = np.linspace(0.0, horizon, grid)
    nu0 = float(np.linalg.norm(u0))
    target = reversed_pencil(p) if part == "T" else p
    f = block_factorize(target)
    iv = iv_for(target)
    if report.projector_p is not None and report.projector_p.size:
        # Evolve inside the invariant subspace W: exp(tA) W = W exp(t W^* A W).
        # Integrating on the whole space lets rounding excite the modes that
        # grow along the other part, which swamp a decaying trajectory.
        keep = report.projector_p if part == "S" else np.eye(f.rank) - report.projector_p
        w = _projector_range(keep)
        a_w = w.conj().T @ f.reduced_generator_a @ w
        c0 = w.conj().T @ (f.decomp.conull_m0.basis.conj().T @ u0)
        e, _ = expm_batch(t[:, None, None] * a_w[None])
        states = ((e @ c0) @ w.T) @ iv.graph.T
    else:
        states = mild_evolution(f, iv, u0)(t)
    states[0] = u0
    norms = np.linalg.norm(states, axis=1)
    bound = slack * c * np.exp(-rho * t) * nu0
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(bound > 0, norms / bound, np.where(norms > 0, np.inf, 0.0))
    ok = bool(np.all(norms <= bound + 1e-300))
    growth_ok = None
    if part == "T":
        fwd = mild_evolution(block_factorize(p), iv_for(p), u0)(t)
        fwd[0] = u0
        growth_ok = bool(np.all(np.linalg.norm(fwd, axis=1) >= np.exp(rho * t) * nu0 / (slack * c) - 1e-300))
    elif part != "S":
        raise ValueError("part must be 'S' or 'T'")
    return DecayCheck(_fit_rate(t, norms), ok, float(np.max(ratio)), growth_ok, t, norms)
