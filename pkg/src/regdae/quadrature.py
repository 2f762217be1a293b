"""Adaptive Simpson quadrature for vector-valued integrands.

Intervals are refined breadth-first so that the integrand is always called
on a whole batch of abscissae at once.
"""

import numpy as np

from .errors import NonConvergent

__all__ = ["adaptive_simpson", "cumulative_simpson"]


def _finite(vals):
    vals = np.asarray(vals)
    if not np.all(np.isfinite(vals)):
        raise NonConvergent("integrand is not finite on the integration interval")
    return vals


def adaptive_simpson(f, a, b, tol=1e-9, initial=8, max_level=40, max_evals=2_000_000):
    """Integrate ``f`` over ``[a, b]``.

    Parameters
    ----------
    f : callable
        Maps a 1-D array of abscissae of length ``m`` to an array of shape
        ``(m, ...)``.
    tol : float
        Absolute tolerance on the 2-norm of the integral error; it is
        distributed over subintervals in proportion to their width.
    initial : int
        Number of equal subintervals to start from.

    Returns
    -------
    value, error_estimate
        ``error_estimate`` is the sum of the accepted local estimates
        ``|S2 - S1| / 15``; Richardson's correction is applied to each
        accepted panel.
    """
    a, b = float(a), float(b)
    if b == a:
        probe = np.asarray(f(np.array([a])))
        return np.zeros(probe.shape[1:], dtype=probe.dtype), 0.0
    if b < a:
        val, err = adaptive_simpson(f, b, a, tol, initial, max_level, max_evals)
        return -val, err
    length = b - a
    edges = np.linspace(a, b, initial + 1)
    lo, hi = edges[:-1], edges[1:]
    mid = 0.5 * (lo + hi)
    vals = _finite(f(np.concatenate([lo, mid, hi[-1:]])))
    m = initial
    f_lo, f_mid = vals[:m], vals[m : 2 * m]
    f_hi = np.concatenate([vals[1:m], vals[2 * m :]])
    total = np.zeros(vals.shape[1:], dtype=np.result_type(vals.dtype, float))
    err_total = 0.0
    evals = vals.shape[0]
    trailing = (slice(None),) + (None,) * (vals.ndim - 1)
    for level in range(max_level + 1):
        h = hi - lo
        q1 = 0.5 * (lo + mid)
        q3 = 0.5 * (mid + hi)
        fq = _finite(f(np.concatenate([q1, q3])))
        evals += fq.shape[0]
        k = lo.shape[0]
        f_q1, f_q3 = fq[:k], fq[k:]
        coarse = (h / 6.0)[trailing] * (f_lo + 4.0 * f_mid + f_hi)
        left = (h / 12.0)[trailing] * (f_lo + 4.0 * f_q1 + f_mid)
        right = (h / 12.0)[trailing] * (f_mid + 4.0 * f_q3 + f_hi)
        fine = left + right
        diff = (fine - coarse).reshape(k, -1)
        est = np.linalg.norm(diff, axis=1) / 15.0
        ok = est <= tol * h / length
        if level == max_level or evals > max_evals:
            if not np.all(ok):
                raise NonConvergent(
                    f"adaptive Simpson did not reach tol={tol:.1e} "
                    f"(worst panel estimate {est.max():.2e}, {evals} evaluations)"
                )
        acc = fine[ok] + (fine[ok] - coarse[ok]) / 15.0
        total = total + acc.sum(axis=0)
        err_total += float(est[ok].sum())
        bad = ~ok
        if not np.any(bad):
            return total, err_total
        # split each rejected panel into its two halves
        lo_b, mid_b, hi_b = lo[bad], mid[bad], hi[bad]
        lo = np.concatenate([lo_b, mid_b])
        hi = np.concatenate([mid_b, hi_b])
        mid = np.concatenate([q1[bad], q3[bad]])
        f_lo_new = np.concatenate([f_lo[bad], f_mid[bad]])
        f_hi_new = np.concatenate([f_mid[bad], f_hi[bad]])
        f_mid = np.concatenate([f_q1[bad], f_q3[bad]])
        f_lo, f_hi = f_lo_new, f_hi_new
    raise NonConvergent("adaptive Simpson exhausted its refinement levels")


def cumulative_simpson(f, times, tol=1e-9, initial=4):
    """Integrals ``int_0^{t_k} f`` for every ``t_k`` in the sorted grid ``times``.

    Each gap between consecutive grid points is integrated separately with
    tolerance ``tol``; the returned error bound is the running sum.
    """
    times = np.asarray(times, dtype=float)
    out, errs = [], []
    acc, err = None, 0.0
    prev = 0.0
    for t in times:
        val, e = adaptive_simpson(f, prev, t, tol, initial=initial)
        acc = val if acc is None else acc + val
        err += e
        out.append(acc)
        errs.append(err)
        prev = t
    return np.array(out), np.array(errs)
