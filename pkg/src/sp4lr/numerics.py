"""Shared numerical kernels: matrix exponential, small dense eigensolver,
quadrature, finite differences and norms.

Everything here is sized for the fixed shapes of this problem (4x4 and
10x10 complex matrices, 1-d time grids); there are no sparse or
large-scale paths.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import GridTooCoarse, NoConvergence

__all__ = [
    "Tolerances",
    "expm",
    "eig4",
    "cumulative_simpson",
    "central_diff",
    "frobenius",
]


@dataclass(frozen=True)
class Tolerances:
    """Default numerical tolerances used across the package."""

    expm_tol: float = 1e-13
    proj_tol: float = 1e-10
    fd_step: float | None = None  # None: use the grid step
    quad_tol: float = 1e-10
    eig_tol: float = 1e-10

    def __post_init__(self):
        for name in ("expm_tol", "proj_tol", "quad_tol", "eig_tol"):
            if getattr(self, name) <= 0:
                raise ValueError("%s must be strictly positive" % name)
        if self.fd_step is not None and self.fd_step <= 0:
            raise ValueError("fd_step must be strictly positive")


DEFAULT_TOL = Tolerances()

_EXPM_THETA = 0.5  # series evaluated only after scaling the 1-norm below this


def expm(m, tol: float = DEFAULT_TOL.expm_tol):
    """Matrix exponential by scaling and squaring of a truncated Taylor series.

    Parameters
    ----------
    m : array_like, shape (..., n, n)
        Square complex matrix or stack of matrices.
    tol : float
        Bound on the series truncation error of the scaled matrix.

    Returns
    -------
    numpy.ndarray, shape (..., n, n)

    The input is scaled by 2**-s so its 1-norm drops below 0.5, the
    series is summed until the a-priori remainder bound
    theta**(k+1)/(k+1)! / (1 - theta/(k+2)) falls below ``tol``, and the
    result is squared s times.
    """
    a = np.asarray(m, dtype=complex)
    if a.shape[-1] != a.shape[-2]:
        raise ValueError("expm expects square matrices, got shape %r" % (a.shape,))
    if not np.all(np.isfinite(a)):
        raise ValueError("expm requires finite entries")
    n = a.shape[-1]
    norm = np.abs(a).sum(axis=-2).max(axis=-1)  # 1-norm per matrix
    nmax = float(np.max(norm)) if norm.size else 0.0
    s = max(0, int(np.ceil(np.log2(nmax / _EXPM_THETA))) if nmax > _EXPM_THETA else 0)
    a = a / (2.0**s)

    # truncation order from the remainder bound at theta
    k, bound, fact = 1, _EXPM_THETA, 1.0
    while True:
        fact *= k + 1
        bound = _EXPM_THETA ** (k + 1) / fact / (1.0 - _EXPM_THETA / (k + 2))
        if bound < tol or k > 40:
            break
        k += 1
    order = k

    eye = np.broadcast_to(np.eye(n, dtype=complex), a.shape).copy()
    result = eye.copy()
    term = eye
    for j in range(1, order + 1):
        term = term @ a / j
        result += term
    for _ in range(s):
        result = result @ result
    return result


def _hessenberg(a):
    """Reduce ``a`` in place to upper Hessenberg form by Householder reflectors."""
    h = a.copy()
    n = h.shape[0]
    for k in range(n - 2):
        x = h[k + 1 :, k]
        nx = np.linalg.norm(x)
        if nx < 1e-300:
            continue
        v = x.copy()
        phase = x[0] / abs(x[0]) if abs(x[0]) > 0 else 1.0
        v[0] += phase * nx
        v /= np.linalg.norm(v)
        h[k + 1 :, :] -= 2.0 * np.outer(v, v.conj() @ h[k + 1 :, :])
        h[:, k + 1 :] -= 2.0 * np.outer(h[:, k + 1 :] @ v, v.conj())
    return h


def _wilkinson_shift(h):
    """Eigenvalue of the trailing 2x2 block closest to its bottom-right entry."""
    a, b = h[-2, -2], h[-2, -1]
    c, d = h[-1, -2], h[-1, -1]
    tr, det = a + d, a * d - b * c
    disc = np.lib.scimath.sqrt(tr * tr - 4.0 * det)
    r1, r2 = (tr + disc) / 2.0, (tr - disc) / 2.0
    return r1 if abs(r1 - d) <= abs(r2 - d) else r2


def eig4(m, tol: float = DEFAULT_TOL.eig_tol, max_iter: int = 256):
    """Eigenvalues of a small dense complex matrix.

    Hessenberg reduction followed by shifted QR iteration with deflation.
    Returned values are sorted by (real, imag).

    Raises
    ------
    NoConvergence
        If a subdiagonal entry fails to deflate within ``max_iter``
        iterations.
    """
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("eig4 expects a single square matrix")
    n = a.shape[0]
    scale = max(np.abs(a).max(), 1e-300)
    h = _hessenberg(a / scale)
    eigs = []
    hi = n
    it = 0
    while hi > 1:
        # deflate converged subdiagonals
        k = hi - 1
        while k > 0 and abs(h[k, k - 1]) > 1e-15 * (abs(h[k - 1, k - 1]) + abs(h[k, k])):
            k -= 1
        if k == hi - 1:
            eigs.append(h[hi - 1, hi - 1])
            hi -= 1
            it = 0
            continue
        if it >= max_iter:
            raise NoConvergence("QR iteration failed to deflate after %d sweeps" % max_iter)
        it += 1
        blk = h[:hi, :hi]
        if it % 12 == 0:
            # exceptional shift: symmetric spectra (e.g. roots of unity)
            # make the Wilkinson shift cycle without ever deflating
            mu = blk[hi - 1, hi - 1] + 1.1 * abs(blk[hi - 1, hi - 2]) + 0.37j * abs(blk[hi - 1, hi - 2])
        else:
            mu = _wilkinson_shift(blk)
        q, r = np.linalg.qr(blk - mu * np.eye(hi))
        h[:hi, :hi] = r @ q + mu * np.eye(hi)
    if hi == 1:
        eigs.append(h[0, 0])
    vals = scale * np.array(eigs[::-1])
    order = np.lexsort((vals.imag, vals.real))
    return vals[order]


def cumulative_simpson(f, grid, tol: float = DEFAULT_TOL.quad_tol,
                       error_estimate: bool = True):
    """Cumulative integral of ``f`` on ``grid`` by per-interval Simpson rule.

    Parameters
    ----------
    f : callable
        Vectorized real function of time.
    grid : array_like, strictly increasing
    tol : float
        Bound on the Richardson error estimate of each interval.
    error_estimate : bool
        When True, each interval is also integrated with two half-width
        Simpson panels and ``GridTooCoarse`` is raised if the estimated
        error exceeds ``tol``.

    Returns
    -------
    numpy.ndarray, same length as ``grid``; first entry is 0.
    """
    t = np.asarray(grid, dtype=float)
    if t.ndim != 1 or t.size < 2:
        raise GridTooCoarse("quadrature grid needs at least 2 points")
    if np.any(np.diff(t) <= 0):
        raise ValueError("grid must be strictly increasing")
    h = np.diff(t)
    f0 = np.asarray(f(t[:-1]), dtype=float)
    f1 = np.asarray(f(t[1:]), dtype=float)
    fm = np.asarray(f(t[:-1] + h / 2.0), dtype=float)
    coarse = h / 6.0 * (f0 + 4.0 * fm + f1)
    if error_estimate:
        fq = np.asarray(f(t[:-1] + h / 4.0), dtype=float)
        f3q = np.asarray(f(t[:-1] + 3.0 * h / 4.0), dtype=float)
        fine = h / 12.0 * (f0 + 4.0 * fq + 2.0 * fm + 4.0 * f3q + f1)
        est = np.abs(fine - coarse) / 15.0
        if np.any(est > tol):
            raise GridTooCoarse(
                "Simpson per-interval error estimate %.3e exceeds %.3e"
                % (float(est.max()), tol)
            )
        intervals = fine + (fine - coarse) / 15.0  # one Richardson sweep
    else:
        intervals = coarse
    out = np.empty(t.size, dtype=float)
    out[0] = 0.0
    np.cumsum(intervals, out=out[1:])
    return out


# contracted alias: the quadrature op is Simpson accumulation
cumulative_integral = cumulative_simpson

_ONESIDED4 = np.array([-25.0, 48.0, -36.0, 16.0, -3.0]) / 12.0


def central_diff(samples, step: float, order: int = 4):
    """Differentiate uniformly spaced samples with a 4th-order stencil.

    Interior points use the 5-point central stencil; the two points at
    each end fall back to one-sided 4th-order stencils so the output has
    the same length as the input.  Residual maxima downstream are taken
    over interior points only.

    ``samples`` may have arbitrary trailing dimensions (time on axis 0).
    """
    if order != 4:
        raise ValueError("only the 4th-order stencil is implemented")
    y = np.asarray(samples)
    n = y.shape[0]
    if n < 5:
        raise GridTooCoarse("need at least 5 samples for the 4th-order stencil")
    if step <= 0:
        raise ValueError("step must be positive")
    d = np.empty_like(y, dtype=complex if np.iscomplexobj(y) else float)
    d[2:-2] = (-y[4:] + 8.0 * y[3:-1] - 8.0 * y[1:-3] + y[:-4]) / (12.0 * step)
    for k in (0, 1):
        d[k] = np.tensordot(_ONESIDED4, y[k : k + 5], axes=(0, 0)) / step
        d[n - 1 - k] = -np.tensordot(_ONESIDED4, y[n - 5 - k : n - k][::-1], axes=(0, 0)) / step
    return d


def frobenius(m):
    """Frobenius norm over the last two axes."""
    a = np.asarray(m)
    return np.sqrt((np.abs(a) ** 2).sum(axis=(-2, -1)))
