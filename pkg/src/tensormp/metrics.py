"""Distances between distribution functions, plus the trace identity and the
Levy fourth-power trace bound as executable, property-testable statements.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import mp
from .gram import SpectralDistribution, eigenvalues, esd

LEVY_TOL = 1e-9
MP_GRID_POINTS = 4096
MP_GRID_MARGIN = 0.1


@dataclass(frozen=True)
class EmpiricalCDF:
    """Right-continuous step function: value cumulative[i] on
    [breakpoints[i], breakpoints[i+1]), zero before the first breakpoint,
    and exactly one from the last onwards."""

    breakpoints: np.ndarray
    cumulative: np.ndarray

    def __post_init__(self):
        bp = np.asarray(self.breakpoints, dtype=float)
        cm = np.asarray(self.cumulative, dtype=float)
        if bp.ndim != 1 or bp.shape != cm.shape or bp.size == 0:
            raise ValueError("breakpoints and cumulative must be equal-length 1-d arrays")
        if np.any(np.diff(bp) <= 0.0):
            raise ValueError("breakpoints must be strictly increasing")
        if np.any(np.diff(cm) < 0.0) or cm[0] < 0.0 or cm[-1] != 1.0:
            raise ValueError("cumulative must be nondecreasing in [0, 1] and end at 1")
        bp.setflags(write=False)
        cm.setflags(write=False)
        object.__setattr__(self, "breakpoints", bp)
        object.__setattr__(self, "cumulative", cm)

    @classmethod
    def from_spectral(cls, dist: SpectralDistribution) -> "EmpiricalCDF":
        values, counts = np.unique(dist.atoms, return_counts=True)
        zeros = dist.implied_zeros
        if zeros > 0 and not (values.size and values[0] == 0.0):
            values = np.concatenate([[0.0], values])
            counts = np.concatenate([[0], counts])
        if zeros > 0:
            counts = counts.copy()
            counts[values == 0.0] += zeros
        # integer cumsum first: the final mass is then N/N = 1 exactly
        cumulative = np.cumsum(counts) / dist.ambient_dim
        return cls(breakpoints=values, cumulative=cumulative)

    @classmethod
    def from_mp_law(
        cls, law: mp.MPLaw, points: int = MP_GRID_POINTS, margin: float = MP_GRID_MARGIN
    ) -> "EmpiricalCDF":
        """Analytic CDF sampled on a fixed grid spanning the support, with the
        zero atom kept on the grid exactly."""
        lo = law.lambda_minus - margin
        hi = law.lambda_plus + margin
        xs = np.unique(np.concatenate([[0.0], np.linspace(lo, hi, points)]))
        values = np.asarray(mp.cdf(law, xs), dtype=float)
        values = np.maximum.accumulate(values)
        if abs(values[-1] - 1.0) > 1e-8:
            raise ValueError("law CDF does not reach 1 at the grid end")
        values[-1] = 1.0
        return cls(breakpoints=xs, cumulative=values)

    def evaluate(self, x) -> np.ndarray:
        idx = np.searchsorted(self.breakpoints, np.asarray(x, dtype=float), side="right")
        padded = np.concatenate([[0.0], self.cumulative])
        return padded[idx]

    def left_limit(self, x) -> np.ndarray:
        idx = np.searchsorted(self.breakpoints, np.asarray(x, dtype=float), side="left")
        padded = np.concatenate([[0.0], self.cumulative])
        return padded[idx]


def ks_distance(f: EmpiricalCDF, g: EmpiricalCDF) -> float:
    """sup |F - G|, exact over the merged breakpoints and their left limits."""
    grid = np.union1d(f.breakpoints, g.breakpoints)
    after = np.max(np.abs(f.evaluate(grid) - g.evaluate(grid)))
    before = np.max(np.abs(f.left_limit(grid) - g.left_limit(grid)))
    return float(max(after, before))


def _levy_feasible(f: EmpiricalCDF, g: EmpiricalCDF, eps: float) -> bool:
    # each condition only needs checking where one side jumps: between events
    # every function involved is constant. The side whose sup binds (G above,
    # F below) is evaluated at its own breakpoints with no shift, so its jump
    # is never lost to rounding; shift rounding on the other side only errs
    # conservative.
    xs = np.union1d(g.breakpoints, f.breakpoints - eps)
    if np.any(g.evaluate(xs) > f.evaluate(xs + eps) + eps):
        return False
    # F(x-eps)-eps <= G(x) for all x, rewritten with y = x-eps
    ys = np.union1d(f.breakpoints, g.breakpoints - eps)
    if np.any(f.evaluate(ys) - eps > g.evaluate(ys + eps)):
        return False
    return True


def levy_distance(f: EmpiricalCDF, g: EmpiricalCDF, tol: float = LEVY_TOL) -> float:
    """inf{eps > 0 : F(x-eps)-eps <= G(x) <= F(x+eps)+eps for all x}.

    Feasibility of a given eps is decided exactly by scanning breakpoints
    shifted by +-eps; only eps itself is bisected (to absolute tolerance
    1e-9). Identical step functions give exactly 0. The arguments are put in
    a canonical order first, so the distance is exactly symmetric.
    """
    fk = (f.breakpoints.tobytes(), f.cumulative.tobytes())
    gk = (g.breakpoints.tobytes(), g.cumulative.tobytes())
    if gk < fk:
        f, g = g, f
    hi = ks_distance(f, g)
    if hi == 0.0:
        return 0.0
    lo = 0.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if _levy_feasible(f, g, mid):
            hi = mid
        else:
            lo = mid
    return hi


def column_normalization_identity(a: np.ndarray, weights) -> tuple[float, float]:
    """Both sides of the trace identity for column normalization.

    lhs = Tr((A/sqrt(n) - B) W (A/sqrt(n) - B)*) with B the column-normalized
    A and W = diag(weights); rhs = sum_j w_j (||A_j||^2/n - 1)
    - 2 sum_j w_j (||A_j||/sqrt(n) - 1). The weight matrix is p x p, one
    entry per column (an n x n weight would be dimensionally inconsistent
    unless p = n).
    """
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2:
        raise ValueError("expected an n x p matrix")
    n, p = a.shape
    w = np.asarray(weights, dtype=float)
    if w.shape != (p,):
        raise ValueError(f"expected {p} column weights")
    if np.any(w <= 0.0):
        raise ValueError("weights must be positive")
    norms = np.linalg.norm(a, axis=0)
    if np.any(norms == 0.0):
        raise ValueError("zero column")
    b = a / norms
    d = a / np.sqrt(n) - b
    lhs = float(np.trace((d * w) @ d.conj().T).real)
    rhs = float(np.sum(w * (norms**2 / n - 1.0)) - 2.0 * np.sum(w * (norms / np.sqrt(n) - 1.0)))
    return lhs, rhs


def levy_distance_trace_bound(a: np.ndarray, b: np.ndarray) -> tuple[float, float]:
    """lhs = L^4 between the spectral CDFs of AA* and BB*; rhs = the trace
    bound (2/p^2) Tr((A-B)(A-B)*) Tr(AA* + BB*). Always lhs <= rhs."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.shape != b.shape or a.ndim != 2:
        raise ValueError("expected two p x n matrices of equal shape")
    p = a.shape[0]
    ga = a @ a.conj().T
    gb = b @ b.conj().T
    fa = EmpiricalCDF.from_spectral(esd(eigenvalues(0.5 * (ga + ga.conj().T)), p))
    fb = EmpiricalCDF.from_spectral(esd(eigenvalues(0.5 * (gb + gb.conj().T)), p))
    lhs = levy_distance(fa, fb) ** 4
    rhs = float(2.0 / p**2 * np.sum(np.abs(a - b) ** 2) * (np.sum(np.abs(a) ** 2) + np.sum(np.abs(b) ** 2)))
    return lhs, rhs


def empirical_moment(dist: SpectralDistribution, q: int) -> float:
    """(1/N) sum atoms^q; the implied zeros contribute nothing for q >= 1."""
    if not 1 <= q <= 20:
        raise ValueError("moment order must be in [1, 20]")
    return float(np.sum(np.asarray(dist.atoms, dtype=float) ** q) / dist.ambient_dim)


def write_distance_csv(path, rows) -> None:
    """Distance report: one line per (replica, metric, value)."""
    lines = ["replica,metric,value"]
    for replica, metric, value in rows:
        lines.append(f"{replica},{metric},{float(value)!r}")
    Path(path).write_text("\n".join(lines) + "\n")
