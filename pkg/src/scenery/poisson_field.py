"""Poisson shot-noise potential over path-adapted windows.

Two exact samplers: a full-window sampler (points uniform over a padded
box) and a cell-restricted sampler that seeds the unit-intensity process
only in hash cells within reach of a requested point set.  Points
outside those cells cannot contribute to any evaluation near the
requested set, so the restriction is exact, not approximate.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from . import policy, _kernels
from .seeds import generator

__all__ = ["PoissonField", "sample_poisson_field", "sample_poisson_field_near",
           "poisson_value", "points_to_csv", "poisson_diagnostics"]


@dataclass(frozen=True, eq=False)
class PoissonField:
    """Sampled points with their spatial hash and centering constant."""

    shape: object
    window: np.ndarray
    points: np.ndarray
    seed: int
    pitch: float
    bucks: object
    cell_ids: object
    volume: float

    @property
    def count(self):
        return self.points.shape[0]


def _points_array(x, dim):
    pts = np.asarray(x, dtype=float)
    if dim == 1:
        if pts.ndim == 0 or pts.shape[-1] != 1:
            pts = pts[..., None]
    elif pts.ndim == 0 or pts.shape[-1] != dim:
        raise ValueError(f"expected points with last axis {dim}")
    return pts


def sample_poisson_field(shape, window, seed):
    """Unit-intensity Poisson points over the whole window box."""
    d = shape.dim
    window = np.asarray(window, dtype=float)
    if d == 1 and window.shape == (2,):
        window = window[None, :]
    if window.shape != (d, 2) or np.any(window[:, 1] <= window[:, 0]):
        raise ValueError(f"window must be a ({d}, 2) box")
    widths = window[:, 1] - window[:, 0]
    volume = float(np.prod(widths))
    if volume > policy.POISSON_POINTS_MAX:
        raise ValueError(f"expected {volume:.3e} points, above the "
                         f"{policy.POISSON_POINTS_MAX:.0e} guard")
    rng = generator(seed, "poisson")
    count = rng.poisson(volume)
    pts = window[:, 0] + rng.uniform(size=(count, d)) * widths
    pitch = _kernels.shape_axis_support(shape)
    return PoissonField(shape=shape, window=window, points=pts, seed=seed,
                        pitch=pitch, bucks=_kernels.bucket(pts, pitch),
                        cell_ids=None, volume=volume)


def sample_poisson_field_near(shape, near, seed):
    """Poisson points in all hash cells within shape reach of the rows of near."""
    d = shape.dim
    near = np.ascontiguousarray(_points_array(near, d)).reshape(-1, d)
    if near.shape[0] == 0:
        raise ValueError("need at least one anchor point")
    pitch = _kernels.shape_axis_support(shape)
    base = np.unique(np.floor(near / pitch).astype(np.int64), axis=0)
    stencil = _kernels.full_stencil(d)
    cells = np.unique((base[:, None, :] + stencil[None, :, :]).reshape(-1, d), axis=0)
    volume = cells.shape[0] * pitch**d
    if volume > policy.POISSON_POINTS_MAX:
        raise ValueError(f"expected {volume:.3e} points, above the "
                         f"{policy.POISSON_POINTS_MAX:.0e} guard")
    rng = generator(seed, "poisson")
    counts = rng.poisson(pitch**d, size=cells.shape[0])
    total = int(counts.sum())
    u = rng.uniform(size=(total, d))
    pts = (np.repeat(cells, counts, axis=0) + u) * pitch
    window = np.stack([cells.min(axis=0) * pitch,
                       (cells.max(axis=0) + 1) * pitch], axis=1)
    ids = {tuple(c) for c in cells}
    return PoissonField(shape=shape, window=window, points=pts, seed=seed,
                        pitch=pitch, bucks=_kernels.bucket(pts, pitch),
                        cell_ids=ids, volume=volume)


def _check_region(field, pts):
    if field.cell_ids is None:
        lo = field.window[:, 0] + field.pitch
        hi = field.window[:, 1] - field.pitch
        if np.any(pts < lo - 1e-12) or np.any(pts > hi + 1e-12):
            raise ValueError("point outside the evaluable core of the window")
        return
    cells = np.floor(pts.reshape(-1, pts.shape[-1]) / field.pitch).astype(np.int64)
    stencil = _kernels.full_stencil(pts.shape[-1])
    for cell in np.unique(cells, axis=0):
        for off in stencil:
            if tuple(cell + off) not in field.cell_ids:
                raise ValueError("point outside the seeded neighborhood")


def poisson_value(field, x):
    """Shot-noise potential: hash-neighbor sum of the shape minus c_p."""
    pts = _points_array(x, field.shape.dim)
    _check_region(field, pts)
    flat = pts.reshape(-1, pts.shape[-1])
    sums = _kernels.shape_sums(flat, field.bucks, field.shape)
    out = (sums - field.shape.c_p).reshape(pts.shape[:-1])
    return out if out.ndim else float(out)


def poisson_diagnostics(field):
    return {"count": field.count, "volume": field.volume,
            "pitch": field.pitch, "seed": field.seed,
            "restricted": field.cell_ids is not None}


def points_to_csv(field, path):
    """Dump sampled point locations for audits."""
    if field.count > 10**6:
        raise ValueError("point set too large for a CSV dump")
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow([f"x{k}" for k in range(field.shape.dim)])
        for row in field.points:
            writer.writerow([f"{c:.9g}" for c in row])
