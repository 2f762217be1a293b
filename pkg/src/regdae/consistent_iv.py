"""Consistent initial values ``IV = {x : M1 x in R(M0)}``.

For a regular pencil ``IV`` is the graph of the coupling ``-B^{-1} C`` over
``N(M0)^perp``::

    u in IV  <=>  iota_N^* u = -B^{-1} C iota_{N^perp}^* u

so it has dimension ``rank M0`` and ``K = iota_{N^perp}^* iota_IV`` is an
isomorphism onto ``N(M0)^perp``.
"""

from dataclasses import dataclass

import numpy as np

from .errors import InternalInconsistency
from .pencil import block_factorize
from .subspaces import SubspaceBasis, as_vector

__all__ = ["IvSpace", "compute_iv", "iv_membership", "iv_structure_predicates", "iv_for"]


@dataclass(frozen=True)
class IvSpace:
    basis: SubspaceBasis
    b: np.ndarray
    c: np.ndarray
    coupling: np.ndarray
    graph: np.ndarray  # iota_{N^perp} + iota_N @ coupling, maps N^perp coords into H
    generator_g: np.ndarray
    iso_k: np.ndarray
    m0_iv: np.ndarray  # iota_R^* M0 iota_IV
    m1_iv: np.ndarray  # iota_R^* M1 iota_IV
    m0_iv_cond: float
    corange_m1: np.ndarray  # iota_{R^perp}^* M1, the null-space route to IV

    @property
    def dim(self):
        return self.basis.dim

    @property
    def n(self):
        return self.basis.ambient_dim


def compute_iv(f):
    """Assemble ``IV``, the strong generator ``G`` and the isomorphism ``K``.

    ``G = (iota_R^* M0 iota_IV)^{-1} (iota_R^* M1 iota_IV)`` acts in the
    orthonormal ``IV`` coordinates; strong solutions are
    ``iota_IV exp(-t G) iota_IV^* u0``.
    """
    dec = f.decomp
    n, r = f.n, f.rank
    coupling = -f.b_inv_c
    graph = dec.conull_m0.basis + dec.null_m0.basis @ coupling
    if r:
        q, rr = np.linalg.qr(graph)
        ph = np.diag(rr) / np.abs(np.diag(rr))
        q = q * ph
    else:
        q = np.zeros((n, 0), dtype=complex)
    basis = SubspaceBasis(q, "IV")
    m0, m1 = f.m0, f.m1
    m0_iv = dec.range_m0.basis.conj().T @ m0 @ q
    m1_iv = dec.range_m0.basis.conj().T @ m1 @ q
    if r:
        g = np.linalg.solve(m0_iv, m1_iv)
        cond = float(np.linalg.cond(m0_iv))
    else:
        g = np.zeros((0, 0), dtype=complex)
        cond = 1.0
    k = dec.conull_m0.basis.conj().T @ q
    corange_m1 = dec.corange_m0.basis.conj().T @ m1
    for arr in (coupling, graph, g, k, m0_iv, m1_iv, corange_m1):
        arr.setflags(write=False)
    return IvSpace(
        basis=basis,
        b=f.b,
        c=f.c,
        coupling=coupling,
        graph=graph,
        generator_g=g,
        iso_k=k,
        m0_iv=m0_iv,
        m1_iv=m1_iv,
        m0_iv_cond=cond,
        corange_m1=corange_m1,
    )


def iv_for(p, tol=None, rank_tol=None):
    """Factorize ``p`` and build its ``IV`` space (cached on the pencil)."""
    key = ("iv", tol, rank_tol)
    if key not in p._cache:
        p._cache[key] = compute_iv(block_factorize(p, tol, rank_tol))
    return p._cache[key]


def iv_membership(iv, u0, tol=1e-9):
    """Decide ``u0 in IV`` by distance to the ``IV`` basis.

    The null-space route (``e = B^{-1} iota_{R^perp}^* M1 u0`` is the
    ``N(M0)``-defect of ``u0`` from the graph) is run as a cross-check: the
    distance lies in ``[|e| / sqrt(1 + |L|^2), |e|]`` with ``L`` the
    coupling, so a verdict outside that window is an internal error.
    """
    u0 = as_vector(u0, iv.n, "u0")
    nu = float(np.linalg.norm(u0))
    if nu == 0.0:
        return True
    dist = float(np.linalg.norm(u0 - iv.basis.embed(iv.basis.coords(u0))))
    inside = dist <= tol * nu
    if iv.b.size:
        e = np.linalg.solve(iv.b, iv.corange_m1 @ u0)
        defect = float(np.linalg.norm(e))
        lnorm = float(np.linalg.norm(iv.coupling, 2)) if iv.coupling.size else 0.0
        slack = 1e-12 * nu * (1.0 + lnorm) * max(1.0, float(np.linalg.cond(iv.b)))
        lower = defect / np.sqrt(1.0 + lnorm**2) - slack
        upper = defect + slack
        if not (lower - 1e-14 * nu <= dist <= upper + 1e-14 * nu):
            raise InternalInconsistency(
                f"IV distance {dist:.3e} outside the null-space window [{lower:.3e}, {upper:.3e}]"
            )
    return bool(inside)


@dataclass(frozen=True)
class StructurePredicates:
    nbot_subset_iv: bool
    iv_meets_nbot_trivially: bool


def iv_structure_predicates(f, tol=1e-10):
    """Whether ``N(M0)^perp`` lies in ``IV`` (iff ``C = 0``) and whether
    ``IV`` meets ``N(M0)^perp`` only in 0 (iff ``C`` is injective).

    When ``C`` has no entries both predicates are reported true.
    """
    c = f.c
    if c.size == 0:
        return StructurePredicates(True, True)
    scale = float(np.linalg.norm(f.m1, 2))
    zero = float(np.linalg.norm(c, 2)) <= tol * scale
    rows, cols = c.shape
    if rows < cols:
        injective = False
    else:
        injective = float(np.linalg.svd(c, compute_uv=False)[-1]) > tol * scale
    return StructurePredicates(bool(zero), bool(injective))
