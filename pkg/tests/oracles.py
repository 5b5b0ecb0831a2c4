"""Independent oracles the tests check the library against.

Nothing here shares a computation path with the package: eigenvalues come
from inertia counting plus bisection, Levy distances from a brute-force
feasibility scan, and the limit-law values from closed forms or QUADPACK.
"""

from __future__ import annotations

from math import comb, sqrt

import numpy as np
from scipy import integrate


def hermitian_eigen_bisect(matrix, tol: float = 1e-10) -> np.ndarray:
    """All eigenvalues of a Hermitian matrix by Sylvester inertia bisection.

    count_below(x) runs a symmetric elimination of (A - xI) and counts
    negative pivots; each eigenvalue is then located by bisecting between the
    Gershgorin bounds.
    """
    a = np.asarray(matrix, dtype=complex)
    dim = a.shape[0]
    radii = np.sum(np.abs(a), axis=1) - np.abs(np.diag(a))
    lo_all = float(np.min(np.diag(a).real - radii)) - 1.0
    hi_all = float(np.max(np.diag(a).real + radii)) + 1.0

    def count_below(x: float) -> int:
        work = a - x * np.eye(dim)
        negatives = 0
        for i in range(dim):
            pivot = work[i, i].real
            if abs(pivot) < 1e-300:
                # pivot breakdown: nudge the shift; measure-zero event
                return count_below(x + 1e-11)
            if pivot < 0.0:
                negatives += 1
            if i + 1 < dim:
                factors = work[i + 1 :, i] / pivot
                work[i + 1 :, i + 1 :] -= np.outer(factors, work[i, i + 1 :])
        return negatives

    eigs = np.empty(dim)
    for j in range(dim):
        lo, hi = lo_all, hi_all
        while hi - lo > tol:
            mid = 0.5 * (lo + hi)
            if count_below(mid) >= j + 1:
                hi = mid
            else:
                lo = mid
        eigs[j] = 0.5 * (lo + hi)
    return eigs


def step_eval(breakpoints, cumulative, x):
    """Right-continuous step-function evaluation, local to the oracle."""
    idx = np.searchsorted(breakpoints, x, side="right")
    padded = np.concatenate([[0.0], cumulative])
    return padded[idx]


def levy_bruteforce(f, g, eps_grid) -> float:
    """Smallest grid eps for which the sandwich holds on a dense x grid."""
    points = np.union1d(f.breakpoints, g.breakpoints)
    span = points[-1] - points[0] + 1.0
    for eps in np.sort(np.asarray(eps_grid, dtype=float)):
        xs = np.unique(
            np.concatenate(
                [
                    points,
                    points - eps,
                    points + eps,
                    np.linspace(points[0] - span, points[-1] + span, 2001),
                ]
            )
        )
        fv_minus = step_eval(f.breakpoints, f.cumulative, xs - eps)
        fv_plus = step_eval(f.breakpoints, f.cumulative, xs + eps)
        gv = step_eval(g.breakpoints, g.cumulative, xs)
        if np.all(fv_minus - eps <= gv + 1e-12) and np.all(gv <= fv_plus + eps + 1e-12):
            return float(eps)
    return float("inf")


def mp_moment_closed_form(c: float, q: int) -> float:
    """Narayana-polynomial closed form of the limit-law moments."""
    return sum(c ** (r + 1) / (r + 1) * comb(q, r) * comb(q - 1, r) for r in range(q))


def _mp_density(c: float, x: float) -> float:
    lo, hi = (1.0 - sqrt(c)) ** 2, (1.0 + sqrt(c)) ** 2
    if not (lo < x < hi and x > 0.0):
        return 0.0
    return sqrt((hi - x) * (x - lo)) / (2.0 * np.pi * x)


def mp_cdf_quad(c: float, x: float) -> float:
    """Limit-law CDF through QUADPACK, atom included."""
    lo = (1.0 - sqrt(c)) ** 2
    hi = (1.0 + sqrt(c)) ** 2
    atom = max(0.0, 1.0 - c) if x >= 0.0 else 0.0
    upper = min(x, hi)
    if upper <= lo:
        return atom
    value, _ = integrate.quad(lambda s: _mp_density(c, s), lo, upper, limit=400)
    return atom + value


def mp_moment_quad(c: float, q: int) -> float:
    lo = (1.0 - sqrt(c)) ** 2
    hi = (1.0 + sqrt(c)) ** 2
    value, _ = integrate.quad(lambda s: s**q * _mp_density(c, s), lo, hi, limit=400)
    return value
