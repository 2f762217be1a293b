"""Independent reference computations used to cross-check the main routes.

Nothing here touches the block factorization: the eigenvalue oracle works
from ``det(z M0 + M1)`` alone and the projector oracle from a contour
integral of the plain resolvent ``(z - A)^{-1}``.
"""

import numpy as np
from scipy.optimize import linear_sum_assignment

from .subspaces import as_matrix

__all__ = ["determinant_roots", "matched_distance", "contour_dunford_projection"]


def determinant_roots(m0, m1, radius=1.0, nodes=None, degree=None):
    """Roots of the polynomial ``z -> det(z M0 + M1)``.

    The polynomial is sampled at ``nodes`` equispaced points on the circle
    ``|z| = radius`` and its coefficients recovered by an FFT (exact for
    polynomials of degree below the node count).  The degree defaults to
    ``rank M0``, the number of finite eigenvalues of a regular pencil; the
    roots of the truncated polynomial come from ``numpy.roots``.
    """
    m0 = as_matrix(m0, "m0", square=True)
    m1 = as_matrix(m1, "m1", square=True)
    n = m0.shape[0]
    nodes = 4 * (n + 1) if nodes is None else nodes
    if nodes <= n:
        raise ValueError("need more nodes than the matrix dimension")
    if degree is None:
        degree = int(np.linalg.matrix_rank(m0))
    if degree == 0:
        return np.zeros(0, dtype=complex)
    z = radius * np.exp(2j * np.pi * np.arange(nodes) / nodes)
    vals = np.linalg.det(z[:, None, None] * m0[None] + m1[None])
    coeffs = np.fft.fft(vals) / nodes / radius ** np.arange(nodes)
    # numpy.roots expects the leading coefficient first
    return np.roots(coeffs[: degree + 1][::-1])


def matched_distance(a, b):
    """Largest pairwise distance after optimal assignment of two multisets.

    Returns ``inf`` when the sizes differ.
    """
    a = np.asarray(a, dtype=complex).reshape(-1)
    b = np.asarray(b, dtype=complex).reshape(-1)
    if a.size != b.size:
        return float("inf")
    if a.size == 0:
        return 0.0
    cost = np.abs(a[:, None] - b[None, :])
    rows, cols = linear_sum_assignment(cost)
    return float(np.max(cost[rows, cols]))


def contour_dunford_projection(a, tol=1e-12, max_nodes=1 << 16):
    """Spectral projection of ``a`` onto ``Re < 0`` by the trapezoid rule.

    The contour is the circle of radius ``c`` centred at ``-c``, which
    touches the imaginary axis only at 0 and, for ``c`` large enough,
    encloses every eigenvalue in the open left half-plane.  Node counts are
    doubled until two successive approximations agree to ``tol``.
    """
    a = as_matrix(a, "a", square=True)
    n = a.shape[0]
    if n == 0:
        return np.zeros((0, 0), dtype=complex)
    ev = np.linalg.eigvals(a)
    stable = ev[ev.real < 0]
    # |lam + c| < c  iff  c > |lam|^2 / (2 |Re lam|)
    need = float(np.max(np.abs(stable) ** 2 / (2 * np.abs(stable.real)))) if stable.size else 1.0
    c = 1.5 * max(need, 1.0)
    eye = np.eye(n)

    def approx(m):
        theta = 2 * np.pi * (np.arange(m) + 0.5) / m
        w = c * np.exp(1j * theta)
        z = -c + w
        res = np.linalg.inv(z[:, None, None] * eye - a[None])
        # (1 / 2 pi i) dz = (1 / 2 pi i) i w dtheta = w dtheta / (2 pi)
        return np.einsum("k,kij->ij", w, res) / m

    m = 64
    prev = approx(m)
    while m < max_nodes:
        m *= 2
        cur = approx(m)
        if np.linalg.norm(cur - prev) <= tol * max(1.0, np.linalg.norm(cur)):
            return cur
        prev = cur
    return prev
