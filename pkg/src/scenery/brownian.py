"""Brownian paths, bounding boxes, the heat kernel, and 1-d local time."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from . import policy
from .seeds import generator

__all__ = ["BrownianPath", "LocalTimeProfile", "sample_path", "local_time",
           "heat_kernel", "bounding_box", "path_to_csv"]


@dataclass(frozen=True, eq=False)
class BrownianPath:
    """Discretized path: positions[k] is the location at time k * step."""

    dim: int
    step: float
    horizon: float
    positions: np.ndarray
    seed: int

    @property
    def steps(self):
        return self.positions.shape[0] - 1

    def tick(self, t):
        """Index of time t on the step grid; t must sit on the grid."""
        k = int(round(t / self.step))
        if not math.isclose(k * self.step, t, rel_tol=1e-9, abs_tol=1e-12):
            raise ValueError(f"time {t} is not a multiple of the step {self.step}")
        if k < 0 or k > self.steps:
            raise ValueError(f"time {t} is outside the horizon {self.horizon}")
        return k


@dataclass(frozen=True, eq=False)
class LocalTimeProfile:
    """Binned occupation density of a 1-d path up to time t."""

    bin_width: float
    bin_centers: np.ndarray
    values: np.ndarray
    t: float

    def energy(self):
        """Integral of the squared profile."""
        return float(np.sum(self.values**2) * self.bin_width)


def sample_path(d, horizon, step, seed):
    """Cumulative sum of N(0, step * I_d) increments, starting at zero."""
    d = int(d)
    if d < 1:
        raise ValueError("dimension must be at least 1")
    if step <= 0 or horizon <= 0:
        raise ValueError("horizon and step must be positive")
    n_steps = int(round(horizon / step))
    if not math.isclose(n_steps * step, horizon, rel_tol=1e-8):
        raise ValueError(f"horizon {horizon} is not a whole number of steps {step}")
    if n_steps > policy.PATH_STEPS_MAX:
        raise ValueError(f"{n_steps} steps exceeds the {policy.PATH_STEPS_MAX:.0e} guard")
    rng = generator(seed, "path")
    increments = rng.normal(0.0, math.sqrt(step), size=(n_steps, d))
    positions = np.empty((n_steps + 1, d))
    positions[0] = 0.0
    np.cumsum(increments, axis=0, out=positions[1:])
    return BrownianPath(dim=d, step=float(step), horizon=n_steps * float(step),
                        positions=positions, seed=seed)


def local_time(path, t, w):
    """Occupation density of the first t time units, binned at width w.

    Left-endpoint convention: the step starting at time k*step deposits
    mass step/w into the bin holding positions[k], so the profile
    integrates to t exactly.
    """
    if path.dim != 1:
        raise ValueError("local time requires a 1-d path")
    if w <= 0:
        raise ValueError("bin width must be positive")
    m = path.tick(t)
    if m < 1:
        raise ValueError("need at least one step before time t")
    xs = path.positions[:m, 0]
    idx = np.floor(xs / w).astype(np.int64)
    lo = idx.min()
    counts = np.bincount(idx - lo)
    centers = (lo + np.arange(counts.size) + 0.5) * w
    values = counts * (path.step / w)
    return LocalTimeProfile(bin_width=float(w), bin_centers=centers,
                            values=values, t=m * path.step)


def heat_kernel(t, x, d):
    """Density of N(0, t * I_d) at x."""
    if t <= 0:
        raise ValueError("time must be positive")
    x = np.asarray(x, dtype=float)
    if d == 1 and (x.ndim == 0 or x.shape[-1] != 1):
        x = x[..., None]
    if x.shape[-1] != d:
        raise ValueError(f"expected points with last axis {d}")
    r2 = np.sum(x * x, axis=-1)
    out = (2.0 * math.pi * t) ** (-0.5 * d) * np.exp(-r2 / (2.0 * t))
    return out if out.ndim else float(out)


def bounding_box(path, pad):
    """Componentwise [min - pad, max + pad] of the path positions."""
    if pad < 0:
        raise ValueError("pad must be nonnegative")
    lo = path.positions.min(axis=0) - pad
    hi = path.positions.max(axis=0) + pad
    return np.stack([lo, hi], axis=1)


def path_to_csv(path, file):
    """Dump tick index, time, and coordinates for audits."""
    if path.positions.shape[0] > 10**6:
        raise ValueError("path too long for a CSV dump")
    with open(file, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["k", "t"] + [f"x{i}" for i in range(path.dim)])
        for k, row in enumerate(path.positions):
            writer.writerow([k, f"{k * path.step:.9g}"]
                            + [f"{c:.9g}" for c in row])
