"""Rescaled occupation functionals of a sampled scenery.

X_n(t) accumulates the potential along the path with a left-endpoint
Riemann rule and divides by the dimension-dependent scaling factor.
The conditional variance replaces the scenery by its covariance and
sums R over all step pairs, truncated exactly by compact support
through the spatial hash.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels

__all__ = ["MODES", "FunctionalTrajectory", "scaling_factor",
           "evaluate_functional", "conditional_variance", "cross_window_sum"]

MODES = ("nondegenerate", "degenerate")


@dataclass(frozen=True, eq=False)
class FunctionalTrajectory:
    """Values of X_n on a time grid, with the run geometry that made them."""

    t_grid: np.ndarray
    values: np.ndarray
    n: float
    dim: int
    mode: str
    scaling_value: float
    step: float
    seed: int


def scaling_factor(n, d, mode="nondegenerate"):
    """Normalization a(n): n^(3/4), sqrt(n ln n), or sqrt(n) by regime."""
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}")
    if n < 2:
        raise ValueError("need n >= 2")
    if d < 1:
        raise ValueError("dimension must be at least 1")
    if mode == "degenerate":
        if d not in (1, 2):
            raise ValueError("degenerate scaling only applies in dimensions 1 and 2")
        return math.sqrt(n)
    if d == 1:
        return n**0.75
    if d == 2:
        return math.sqrt(n * math.log(n))
    return math.sqrt(n)


def _tick_counts(path, n, t_grid):
    t_grid = np.asarray(t_grid, dtype=float)
    if t_grid.ndim != 1 or t_grid.size == 0:
        raise ValueError("t_grid must be a nonempty 1-d array")
    if np.any(np.diff(t_grid) <= 0):
        raise ValueError("t_grid must be strictly increasing")
    if t_grid[0] < 0.0 or t_grid[-1] > 1.0 + 1e-12:
        raise ValueError("t_grid must lie in [0, 1]")
    horizon_needed = n * t_grid[-1]
    if path.horizon < horizon_needed * (1.0 - 1e-12):
        raise ValueError(f"path horizon {path.horizon} is shorter than n*t = {horizon_needed}")
    return np.floor(n * t_grid / path.step + 1e-9).astype(np.int64)


def evaluate_functional(evaluator, path, n, t_grid, mode="nondegenerate"):
    """Left-endpoint Riemann sums of the potential, rescaled by a(n)."""
    ticks = _tick_counts(path, n, t_grid)
    call = evaluator.evaluate if hasattr(evaluator, "evaluate") else evaluator
    a = scaling_factor(n, path.dim, mode)
    vals = np.asarray(call(path.positions[:ticks[-1]]), dtype=float)
    if vals.shape != (int(ticks[-1]),):
        raise ValueError("potential evaluator must return one value per step")
    cum = np.concatenate([[0.0], np.cumsum(vals)])
    values = (path.step / a) * cum[ticks]
    return FunctionalTrajectory(t_grid=np.asarray(t_grid, dtype=float),
                                values=values, n=float(n), dim=path.dim,
                                mode=mode, scaling_value=a, step=path.step,
                                seed=path.seed)


def conditional_variance(path, model, n, mode="nondegenerate", t=1.0):
    """Scenery-conditional second moment of X_n(t) given the path.

    Equals a(n)^-2 * step^2 * sum over all step pairs of R(B_j - B_k);
    the hash restricts to pairs within the covariance support, which is
    exact because R vanishes beyond it.
    """
    ticks = _tick_counts(path, n, np.array([t]))
    m = int(ticks[0])
    if m < 1:
        raise ValueError("need at least one step before n*t")
    a = scaling_factor(n, path.dim, mode)
    if not model.terms:
        return 0.0
    kernel = model.kernel_spec()
    pos = path.positions[:m]
    bucks = _kernels.bucket(pos, kernel.axis_support)
    off_diag = _kernels.cov_pair_sum_self(bucks, kernel)
    total = m * model.r_zero + 2.0 * off_diag
    return (path.step / a) ** 2 * total


def cross_window_sum(path, model, n, window_a, window_b, mode="nondegenerate"):
    """Normalized covariance-kernel sum between two disjoint time windows.

    Windows are (lo, hi) fractions of [0, 1]; the value is
    a(n)^-2 * step^2 * sum over pairs (j in A, k in B) of R(B_j - B_k).
    """
    lo_a, hi_a = window_a
    lo_b, hi_b = window_b
    if not (0.0 <= lo_a < hi_a <= 1.0 and 0.0 <= lo_b < hi_b <= 1.0):
        raise ValueError("windows must be increasing pairs in [0, 1]")
    if not (hi_a <= lo_b or hi_b <= lo_a):
        raise ValueError("windows must be disjoint")
    if path.horizon < n * max(hi_a, hi_b) * (1.0 - 1e-12):
        raise ValueError("path horizon is shorter than the windows need")
    ka0, ka1, kb0, kb1 = (int(math.floor(n * f / path.step + 1e-9))
                          for f in (lo_a, hi_a, lo_b, hi_b))
    if ka1 <= ka0 or kb1 <= kb0:
        raise ValueError("each window must contain at least one step")
    if not model.terms:
        return 0.0
    a = scaling_factor(n, path.dim, mode)
    kernel = model.kernel_spec()
    apos = path.positions[ka0:ka1]
    bucks = _kernels.bucket(path.positions[kb0:kb1], kernel.axis_support)
    total = _kernels.cov_pair_sum_cross(apos, bucks, kernel)
    return (path.step / a) ** 2 * total
