"""Fundamental subspaces of ``M0`` and compression/embedding algebra.

A closed subspace ``S`` of ``C^n`` is carried as a matrix with orthonormal
columns.  With that representation the canonical embedding is ``basis @ x``
and its adjoint (which acts as the orthogonal projection onto ``S``) is
``basis.conj().T @ v``.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateTolerance, DimensionMismatch, NonSquare

__all__ = [
    "SubspaceBasis",
    "FundamentalDecomposition",
    "as_matrix",
    "as_vector",
    "default_rank_tol",
    "fundamental_decomposition",
    "compress",
    "subspace_contains",
    "orthonormalize",
]

ORTHONORMAL_TOL = 1e-12


def as_matrix(a, name="matrix", square=False):
    """Return ``a`` as a finite complex 2-D array (copy)."""
    m = np.array(a, dtype=complex)
    if m.ndim != 2:
        raise DimensionMismatch(f"{name} must be 2-D, got shape {m.shape}")
    if square and m.shape[0] != m.shape[1]:
        raise NonSquare(f"{name} must be square, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError(f"{name} has non-finite entries")
    return m


def as_vector(v, n=None, name="vector"):
    x = np.array(v, dtype=complex).reshape(-1)
    if n is not None and x.shape[0] != n:
        raise DimensionMismatch(f"{name} has length {x.shape[0]}, expected {n}")
    if not np.all(np.isfinite(x)):
        raise ValueError(f"{name} has non-finite entries")
    return x


def default_rank_tol(n):
    """Relative singular-value cutoff ``32 * n * eps``."""
    return 32.0 * max(n, 1) * np.finfo(float).eps


@dataclass(frozen=True)
class SubspaceBasis:
    """Orthonormal basis of a subspace of ``C^ambient_dim``."""

    basis: np.ndarray
    label: str = ""

    def __post_init__(self):
        b = np.array(self.basis, dtype=complex)
        if b.ndim != 2:
            raise DimensionMismatch("basis must be 2-D")
        k = b.shape[1]
        if k > b.shape[0]:
            raise DimensionMismatch("more basis vectors than the ambient dimension")
        if k and np.linalg.norm(b.conj().T @ b - np.eye(k)) > ORTHONORMAL_TOL * max(k, 1) * 10:
            raise ValueError(f"basis of {self.label or 'subspace'} is not orthonormal")
        b.setflags(write=False)
        object.__setattr__(self, "basis", b)

    @property
    def ambient_dim(self):
        return self.basis.shape[0]

    @property
    def dim(self):
        return self.basis.shape[1]

    def embed(self, coords):
        """The embedding ``iota_S``: coordinates to ambient vectors."""
        return self.basis @ coords

    def coords(self, v):
        """The adjoint ``iota_S^*``: ambient vectors to coordinates."""
        return self.basis.conj().T @ v

    def projector(self):
        return self.basis @ self.basis.conj().T

    @classmethod
    def span(cls, vectors, label="", tol=1e-12):
        """Orthonormal basis of the column span of ``vectors``."""
        return cls(orthonormalize(vectors, tol), label)


def orthonormalize(vectors, tol=1e-12):
    """Orthonormal basis for the column span (rank-revealing via SVD)."""
    v = np.atleast_2d(np.asarray(vectors, dtype=complex))
    if v.shape[1] == 0:
        return np.zeros((v.shape[0], 0), dtype=complex)
    u, s, _ = np.linalg.svd(v, full_matrices=False)
    if s.size == 0 or s[0] == 0:
        return np.zeros((v.shape[0], 0), dtype=complex)
    r = int(np.sum(s > tol * s[0]))
    return u[:, :r]


@dataclass(frozen=True)
class FundamentalDecomposition:
    null_m0: SubspaceBasis
    conull_m0: SubspaceBasis
    range_m0: SubspaceBasis
    corange_m0: SubspaceBasis
    rank: int
    tolerance_used: float
    singular_values: np.ndarray

    @property
    def n(self):
        return self.null_m0.ambient_dim


def fundamental_decomposition(m0, tol=None):
    """Orthonormal bases of ``N(M0)``, ``N(M0)^perp``, ``R(M0)``, ``R(M0)^perp``.

    Singular values ``<= tol * sigma_max`` count as zero.  The rank is refused
    (:class:`DegenerateTolerance`) when some singular value lies within a
    factor of 10 of the cutoff on either side, since then a slightly
    different ``tol`` would give a different rank.
    """
    m0 = as_matrix(m0, "m0", square=True)
    n = m0.shape[0]
    if tol is None:
        tol = default_rank_tol(n)
    if not tol > 0:
        raise ValueError("tol must be positive")
    u, s, vh = np.linalg.svd(m0)
    v = vh.conj().T
    smax = s[0] if n else 0.0
    if smax == 0.0:
        rank = 0
    else:
        cutoff = tol * smax
        rank = int(np.sum(s > cutoff))
        near = (s > cutoff / 10.0) & (s <= cutoff * 10.0)
        if np.any(near):
            raise DegenerateTolerance(
                f"singular values {s[near]} lie within a factor 10 of the cutoff {cutoff:.3e}"
            )
    return FundamentalDecomposition(
        null_m0=SubspaceBasis(v[:, rank:], "N(M0)"),
        conull_m0=SubspaceBasis(v[:, :rank], "N(M0)^perp"),
        range_m0=SubspaceBasis(u[:, :rank], "R(M0)"),
        corange_m0=SubspaceBasis(u[:, rank:], "R(M0)^perp"),
        rank=rank,
        tolerance_used=float(tol),
        singular_values=s,
    )


def compress(t, left, right):
    """The block ``iota_left^* T iota_right``."""
    t = np.asarray(t, dtype=complex)
    if t.ndim != 2 or t.shape != (left.ambient_dim, right.ambient_dim):
        raise DimensionMismatch(
            f"cannot compress {t.shape} between subspaces of C^{left.ambient_dim} and C^{right.ambient_dim}"
        )
    return left.basis.conj().T @ t @ right.basis


def subspace_contains(s, v, tol=1e-10):
    """``True`` iff ``||(I - P_S) v|| <= tol * ||v||`` (always true for ``v = 0``)."""
    v = as_vector(v, s.ambient_dim)
    resid = v - s.basis @ (s.basis.conj().T @ v)
    return bool(np.linalg.norm(resid) <= tol * np.linalg.norm(v))
