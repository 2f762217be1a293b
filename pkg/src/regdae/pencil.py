"""The linear pencil ``M(z) = z*M0 + M1`` of an index-0 DAE.

Regularity is decided by the block criterion: ``B = iota_{R(M0)^perp}^* M1
iota_{N(M0)}`` must be invertible.  For regular pencils the block
factorization

    M(z) = U1^* V1 diag(z*M0t + M1t, B) V0 U0

reduces the spectrum to the ordinary eigenvalue problem of the reduced
generator ``A = -M0t^{-1} M1t``.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import BadRank, DegenerateTolerance, DimensionMismatch, NotRegular, SpectrumHit
from .subspaces import (
    FundamentalDecomposition,
    as_matrix,
    compress,
    fundamental_decomposition,
)


__all__ = [
    "Pencil",
    "RegularityVerdict",
    "BlockFactorization",
    "SpectrumReport",
    "REGULARITY_TOL",
    "SPECTRUM_HIT_TOL",
    "is_regular",
    "block_factorize",
    "resolvent",
    "spectrum",
    "resolvent_bound_probe",
    "reversed_pencil",
    "generate_regular",
]

REGULARITY_TOL = 1e-10
SPECTRUM_HIT_TOL = 1e-12


@dataclass(frozen=True)
class Pencil:
    """The pair ``(M0, M1)`` of square complex matrices of equal size."""

    m0: np.ndarray
    m1: np.ndarray
    _cache: dict = field(default_factory=dict, init=False, repr=False, compare=False)

    def __post_init__(self):
        m0 = as_matrix(self.m0, "m0", square=True)
        m1 = as_matrix(self.m1, "m1", square=True)
        if m0.shape != m1.shape:
            raise DimensionMismatch(f"m0 is {m0.shape} but m1 is {m1.shape}")
        m0.setflags(write=False)
        m1.setflags(write=False)
        object.__setattr__(self, "m0", m0)
        object.__setattr__(self, "m1", m1)

    @property
    def n(self):
        return self.m0.shape[0]

    def __call__(self, z):
        return z * self.m0 + self.m1

    def __eq__(self, other):
        if not isinstance(other, Pencil):
            return NotImplemented
        return np.array_equal(self.m0, other.m0) and np.array_equal(self.m1, other.m1)

    __hash__ = None


@dataclass(frozen=True)
class RegularityVerdict:
    regular: bool
    sigma_min_b: float
    threshold: float
    rank_m0: int
    criterion: str
    reason: str = ""

    def __bool__(self):
        return self.regular


@dataclass(frozen=True)
class BlockFactorization:
    m0: np.ndarray
    m1: np.ndarray
    decomp: FundamentalDecomposition
    m0_tilde: np.ndarray
    m1_tilde: np.ndarray
    b: np.ndarray
    c: np.ndarray
    d: np.ndarray  # iota_R^* M1 iota_N
    m1_r_nperp: np.ndarray  # iota_R^* M1 iota_{N^perp}
    v0: np.ndarray
    v1: np.ndarray
    reduced_generator_a: np.ndarray
    b_inv_c: np.ndarray
    d_b_inv: np.ndarray

    @property
    def n(self):
        return self.decomp.n

    @property
    def rank(self):
        return self.decomp.rank

    @property
    def u0(self):
        """Unitary ``H -> N(M0)^perp (+) N(M0)``."""
        d = self.decomp
        return np.vstack([d.conull_m0.basis.conj().T, d.null_m0.basis.conj().T])

    @property
    def u1(self):
        """Unitary ``H -> R(M0) (+) R(M0)^perp``."""
        d = self.decomp
        return np.vstack([d.range_m0.basis.conj().T, d.corange_m0.basis.conj().T])

    def middle(self, z):
        r = self.rank
        out = np.zeros((self.n, self.n), dtype=complex)
        out[:r, :r] = z * self.m0_tilde + self.m1_tilde
        out[r:, r:] = self.b
        return out

    def reconstruct(self, z):
        """``U1^* V1 diag(z*M0t + M1t, B) V0 U0``."""
        return self.u1.conj().T @ self.v1 @ self.middle(z) @ self.v0 @ self.u0


@dataclass(frozen=True)
class SpectrumReport:
    eigenvalues: np.ndarray
    spectral_abscissa: float
    s0: float
    imag_axis_margin: float

    @property
    def empty(self):
        return self.eigenvalues.size == 0


def _decomposition(p, tol):
    key = ("decomp", tol)
    if key not in p._cache:
        p._cache[key] = fundamental_decomposition(p.m0, tol)
    return p._cache[key]


def is_regular(p, tol=None, rank_tol=None):
    """Block-criterion regularity test.

    The pencil is declared regular iff ``sigma_min(B) > tol * ||M1||_2``.
    When ``M0`` is invertible ``B`` is empty and the pencil is regular; when
    ``M0 = 0`` the criterion reduces to invertibility of ``M1``.
    """
    tol = REGULARITY_TOL if tol is None else tol
    criterion = "sigma_min(iota_{R(M0)^perp}^* M1 iota_{N(M0)}) > tol * ||M1||"
    try:
        d = _decomposition(p, rank_tol)
    except DegenerateTolerance as exc:
        return RegularityVerdict(False, float("nan"), float("nan"), -1, criterion, f"ambiguous rank: {exc}")
    b = compress(p.m1, d.corange_m0, d.null_m0)
    threshold = tol * np.linalg.norm(p.m1, 2) if p.n else 0.0
    if b.size == 0:
        return RegularityVerdict(True, float("inf"), threshold, d.rank, criterion, "M0 invertible, B is empty")
    smin = float(np.linalg.svd(b, compute_uv=False)[-1])
    ok = smin > threshold
    reason = "" if ok else "B is numerically singular"
    return RegularityVerdict(bool(ok), smin, float(threshold), d.rank, criterion, reason)


def block_factorize(p, tol=None, rank_tol=None):
    """Block factorization of a regular pencil (cached per tolerance pair)."""
    key = ("factor", tol, rank_tol)
    if key in p._cache:
        return p._cache[key]
    verdict = is_regular(p, tol, rank_tol)
    if not verdict.regular:
        raise NotRegular(f"pencil is not regular: {verdict.reason} (sigma_min(B) = {verdict.sigma_min_b:.3e})")
    dec = _decomposition(p, rank_tol)
    rng_, corng, nul, conul = dec.range_m0, dec.corange_m0, dec.null_m0, dec.conull_m0
    r, n = dec.rank, p.n
    b = compress(p.m1, corng, nul)
    c = compress(p.m1, corng, conul)
    d = compress(p.m1, rng_, nul)
    m1_rn = compress(p.m1, rng_, conul)
    m0t = compress(p.m0, rng_, conul)
    if b.size:
        b_inv_c = np.linalg.solve(b, c)
        d_b_inv = np.linalg.solve(b.T, d.T).T
    else:
        b_inv_c = np.zeros((n - r, r), dtype=complex)
        d_b_inv = np.zeros((r, n - r), dtype=complex)
    m1t = m1_rn - d @ b_inv_c
    a = -np.linalg.solve(m0t, m1t) if r else np.zeros((0, 0), dtype=complex)
    v0 = np.eye(n, dtype=complex)
    v0[r:, :r] = b_inv_c
    v1 = np.eye(n, dtype=complex)
    v1[:r, r:] = d_b_inv
    f = BlockFactorization(
        m0=p.m0,
        m1=p.m1,
        decomp=dec,
        m0_tilde=m0t,
        m1_tilde=m1t,
        b=b,
        c=c,
        d=d,
        m1_r_nperp=m1_rn,
        v0=v0,
        v1=v1,
        reduced_generator_a=a,
        b_inv_c=b_inv_c,
        d_b_inv=d_b_inv,
    )
    for arr in (m0t, m1t, b, c, d, m1_rn, v0, v1, a, b_inv_c, d_b_inv):
        arr.setflags(write=False)
    p._cache[key] = f
    return f


def resolvent(p, z, hit_tol=SPECTRUM_HIT_TOL, f=None):
    """``M(z)^{-1}`` evaluated through the block factorization.

    Raises :class:`SpectrumHit` when ``sigma_min(z*M0t + M1t) <= hit_tol *
    ||z*M0t + M1t||``.
    """
    f = block_factorize(p) if f is None else f
    r, n = f.rank, f.n
    z = complex(z)
    inner = np.zeros((n, n), dtype=complex)
    if r:
        mz = z * f.m0_tilde + f.m1_tilde
        s = np.linalg.svd(mz, compute_uv=False)
        if s[-1] <= hit_tol * s[0]:
            raise SpectrumHit(f"z = {z} lies on the spectrum (sigma_min = {s[-1]:.3e})")
        inner[:r, :r] = np.linalg.inv(mz)
    if n - r:
        inner[r:, r:] = np.linalg.inv(f.b)
    v0_inv = np.eye(n, dtype=complex)
    v0_inv[r:, :r] = -f.b_inv_c
    v1_inv = np.eye(n, dtype=complex)
    v1_inv[:r, r:] = -f.d_b_inv
    return f.u0.conj().T @ v0_inv @ inner @ v1_inv @ f.u1


def _sorted_eigs(ev):
    return np.asarray(sorted(ev, key=lambda z: (round(z.real, 12), round(z.imag, 12))), dtype=complex)


def spectrum(p, f=None):
    """``sigma(M)`` as the eigenvalues of the reduced generator ``A``.

    ``s0`` equals the spectral abscissa: for a regular finite-dimensional
    pencil the resolvent is bounded on ``Re z > nu`` iff ``nu >= max Re sigma``.
    An empty spectrum (``M0 = 0``) reports abscissa ``-inf`` and margin ``inf``.
    """
    f = block_factorize(p) if f is None else f
    a = f.reduced_generator_a
    if a.size == 0:
        return SpectrumReport(np.zeros(0, dtype=complex), -np.inf, -np.inf, np.inf)
    ev = _sorted_eigs(np.linalg.eigvals(a))
    abscissa = float(np.max(ev.real))
    return SpectrumReport(ev, abscissa, abscissa, float(np.min(np.abs(ev.real))))


def resolvent_bound_probe(p, radius, samples=64):
    """Max of ``||M(z)^{-1}||_2`` over circles of radius ``R, 2R, 4R``."""
    f = block_factorize(p)
    ev = spectrum(p, f).eigenvalues
    rmax = float(np.max(np.abs(ev))) if ev.size else 0.0
    if not radius > rmax + 1:
        raise ValueError(f"radius {radius} must exceed max|sigma| + 1 = {rmax + 1}")
    theta = 2 * np.pi * (np.arange(samples) + 0.5) / samples
    best = 0.0
    for rr in (radius, 2 * radius, 4 * radius):
        for z in rr * np.exp(1j * theta):
            best = max(best, float(np.linalg.norm(resolvent(p, z, f=f), 2)))
    return best


def reversed_pencil(p):
    """The pencil ``(M0, -M1)``, i.e. ``N(z) = -M(-z)``."""
    return Pencil(p.m0, -p.m1)


def _random_unitary(rng, n):
    z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def generate_regular(n, rank, seed, spectrum_hint=None, kind="accretive"):
    """Random regular pencil.

    ``kind="accretive"``: ``M0 = Q diag(D, 0) Q^*`` with ``D`` Hermitian
    positive definite and ``M1`` strictly accretive on ``N(M0)``, which makes
    the pencil regular.  ``kind="general"``: ``M0 = L diag(D, 0) R^*`` with
    independent unitaries, so ``R(M0) != N(M0)^perp``; ``B`` is drawn well
    conditioned.

    With ``spectrum_hint`` (``rank`` complex numbers) the ``R``-block of
    ``M1`` is solved for so that the reduced generator is similar to
    ``diag(spectrum_hint)``.
    """
    if not 0 <= rank <= n or n < 1:
        raise BadRank(f"need 0 <= rank <= n and n >= 1, got n={n}, rank={rank}")
    if kind not in ("accretive", "general"):
        raise ValueError(f"unknown kind {kind!r}")
    rng = np.random.default_rng(seed)
    r, k = rank, n - rank
    left = _random_unitary(rng, n)
    right = left if kind == "accretive" else _random_unitary(rng, n)
    qd = _random_unitary(rng, r) if r else np.zeros((0, 0))
    dvals = rng.uniform(0.5, 2.0, r)
    dmat = (qd * dvals) @ qd.conj().T if r else np.zeros((0, 0), dtype=complex)
    if kind == "general" and r:
        dmat = dmat @ _random_unitary(rng, r)
    core = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2 * n)
    if k:
        bn = core[r:, r:]
        herm = 0.5 * (bn + bn.conj().T)
        shift = max(0.0, -float(np.linalg.eigvalsh(herm)[0])) + 0.5
        core[r:, r:] = bn + shift * np.eye(k)
    if spectrum_hint is not None:
        hint = np.asarray(spectrum_hint, dtype=complex).reshape(-1)
        if hint.size != r:
            raise BadRank(f"spectrum_hint has {hint.size} points but rank is {r}")
        x = np.eye(r) + 0.3 * (rng.standard_normal((r, r)) + 1j * rng.standard_normal((r, r))) / np.sqrt(max(r, 1))
        a_target = (x * hint) @ np.linalg.inv(x) if r else np.zeros((0, 0))
        schur_part = core[:r, r:] @ np.linalg.solve(core[r:, r:], core[r:, :r]) if k else 0.0
        core[:r, :r] = -dmat @ a_target + schur_part
    m0_core = np.zeros((n, n), dtype=complex)
    m0_core[:r, :r] = dmat
    m0 = left @ m0_core @ right.conj().T
    m1 = left @ core @ right.conj().T
    if kind == "accretive":
        m0 = 0.5 * (m0 + m0.conj().T)
    return Pencil(m0, m1)
