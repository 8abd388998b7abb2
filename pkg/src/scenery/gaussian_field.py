"""Stationary Gaussian scenery samplers.

Two samplers share one covariance model: an exact grid sampler built on
circulant embedding (evaluable by multilinear interpolation), and a
mesh-free sum-of-cosines sampler whose frequencies are drawn from the
normalized spectrum.  Frequencies can be drawn axis by axis because
every buildable model has a spectrum that factorizes across axes; the
shape builder enforces the one-moving-axis constraint that guarantees
this.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np
from scipy import fft as sfft

from . import policy
from .seeds import generator
from .spectra import ModelError

__all__ = ["GaussianField", "FeatureField", "sample_grid_field", "field_value",
           "sample_feature_field", "field_to_csv", "field_diagnostics"]


@dataclass(frozen=True, eq=False)
class GaussianField:
    """Grid sample of the field with its interpolation window."""

    model: object
    box: np.ndarray
    h: float
    origin: np.ndarray
    values: np.ndarray
    seed: int
    clamped_mass: float
    padding: float
    interp: str = "multilinear"

    def evaluate(self, x):
        pts = _points(x, self.values.ndim)
        lo, hi = self.box[:, 0], self.box[:, 1]
        slack = 1e-9 * self.h
        if np.any(pts < lo - slack) or np.any(pts > hi + slack):
            raise ValueError("point outside the field box")
        u = (pts - self.origin) / self.h
        base = np.floor(u).astype(np.int64)
        shape = self.values.shape
        for k in range(len(shape)):
            base[..., k] = np.clip(base[..., k], 0, shape[k] - 2)
        frac = u - base
        out = np.zeros(pts.shape[:-1])
        for corner in np.ndindex(*(2,) * len(shape)):
            weight = np.ones(pts.shape[:-1])
            idx = []
            for k, c in enumerate(corner):
                weight = weight * (frac[..., k] if c else 1.0 - frac[..., k])
                idx.append(base[..., k] + c)
            out = out + weight * self.values[tuple(idx)]
        return out if out.ndim else float(out)


@dataclass(frozen=True, eq=False)
class FeatureField:
    """Mesh-free field: amplitude * sum of K random-frequency cosines."""

    model: object
    K: int
    frequencies: np.ndarray
    phases: np.ndarray
    amplitude: float
    seed: int

    def evaluate(self, x):
        pts = _points(x, self.frequencies.shape[1])
        flat = pts.reshape(-1, pts.shape[-1])
        out = np.zeros(flat.shape[0])
        for start in range(0, self.K, 1024):
            freq = self.frequencies[start:start + 1024]
            phase = self.phases[start:start + 1024]
            out += np.sum(np.cos(flat @ freq.T + phase), axis=1)
        out = self.amplitude * out.reshape(pts.shape[:-1])
        return out if out.ndim else float(out)


def _points(x, dim):
    pts = np.asarray(x, dtype=float)
    if dim == 1:
        if pts.ndim == 0 or pts.shape[-1] != 1:
            pts = pts[..., None]
    elif pts.ndim == 0 or pts.shape[-1] != dim:
        raise ValueError(f"expected points with last axis {dim}")
    return pts


def _as_box(box, dim):
    arr = np.asarray(box, dtype=float)
    if dim == 1 and arr.shape == (2,):
        arr = arr[None, :]
    if arr.shape != (dim, 2):
        raise ValueError(f"box must have shape ({dim}, 2)")
    if np.any(arr[:, 1] <= arr[:, 0]):
        raise ValueError("box upper edges must exceed lower edges")
    return arr


def _torus_cov(model, deltas):
    """Covariance tensor over signed torus offsets, axis by axis."""
    out = np.zeros(tuple(len(d) for d in deltas))
    for term in model.terms:
        prod = term.coef * term.factors[0].evaluate(deltas[0])
        for k in range(1, model.dim):
            prod = np.multiply.outer(prod, term.factors[k].evaluate(deltas[k]))
        out += prod
    if math.isfinite(model.trunc_radius):
        r2 = np.zeros(out.shape)
        for k, d in enumerate(deltas):
            shape = [1] * model.dim
            shape[k] = len(d)
            r2 = r2 + (d**2).reshape(shape)
        out[r2 > model.trunc_radius**2] = 0.0
    return out


def sample_grid_field(model, box, h, seed):
    """Exact stationary Gaussian grid sample by circulant embedding."""
    box = _as_box(box, model.dim)
    sup = model.support_radius
    if h <= 0:
        raise ValueError("grid spacing must be positive")
    if h > policy.GRID_SPACING_MAX_FRACTION * sup * (1.0 + 1e-12):
        raise ValueError(
            f"grid spacing {h} exceeds support_radius/8 = {sup / 8.0}")
    last_mass = math.inf
    for attempt in range(policy.EMBED_RETRIES + 1):
        pad = sup * 2.0**attempt
        lo = box[:, 0] - pad
        counts = np.ceil((box[:, 1] + pad - lo) / h).astype(int) + 1
        wrap = int(math.ceil(sup / h)) + 1
        sizes = [sfft.next_fast_len(int(c) + wrap) for c in counts]
        cells = int(np.prod([float(s) for s in sizes]))
        if cells > policy.GRID_CELLS_MAX:
            raise ValueError(
                f"embedding grid needs {cells} cells, above the "
                f"{policy.GRID_CELLS_MAX} guard; use sample_feature_field instead")
        deltas = [h * np.where(np.arange(m) <= m // 2,
                               np.arange(m), np.arange(m) - m) for m in sizes]
        cov = _torus_cov(model, deltas)
        lam = np.fft.fftn(cov).real
        neg = lam < 0.0
        total = float(np.sum(np.abs(lam)))
        clamped = float(np.sum(np.abs(lam[neg]))) / total if total > 0 else 0.0
        last_mass = clamped
        if clamped >= policy.CLAMP_MASS_MAX:
            continue
        lam[neg] = 0.0
        rng = generator(seed, "grid_field")
        noise = rng.normal(size=(2, *lam.shape))
        spectrum = np.sqrt(lam) * (noise[0] + 1j * noise[1])
        grid = np.fft.ifftn(spectrum).real * math.sqrt(lam.size)
        keep = tuple(slice(0, int(c)) for c in counts)
        return GaussianField(model=model, box=box, h=float(h), origin=lo,
                             values=np.ascontiguousarray(grid[keep]), seed=seed,
                             clamped_mass=clamped, padding=pad)
    raise ModelError(
        f"circulant embedding failed: clamped eigenvalue mass {last_mass:.3e} "
        f"still above {policy.CLAMP_MASS_MAX} after {policy.EMBED_RETRIES} retries")


def field_value(field, x):
    """Evaluate a grid or feature field at points x."""
    return field.evaluate(x)


def _axis_tables(model):
    """Inverse-CDF tables of the per-axis spectral densities (cached)."""
    cached = model.meta.get("_axis_tables")
    if cached is not None:
        return cached
    tables = []
    n = policy.SPECTRUM_TABLE_POINTS * policy.SPECTRUM_PAD_FACTOR
    theta = (np.arange(n) + 0.5) / n * math.pi - math.pi / 2.0
    for k in range(model.dim):
        width = 0.0
        for term in model.terms:
            sup = term.factors[k].support_radius
            if not math.isfinite(sup):
                sup = 4.0 * term.factors[k].length
            width = max(width, sup)
        scale = 2.0 * math.pi / width
        xi = scale * np.tan(theta)
        points = np.zeros((n, model.dim))
        points[:, k] = xi
        dens = np.clip(model.spectrum(points if model.dim > 1 else xi), 0.0, None)
        dens = dens * scale / np.cos(theta) ** 2
        cdf = np.concatenate([[0.0], np.cumsum((dens[1:] + dens[:-1])
                                               * np.diff(theta) / 2.0)])
        if cdf[-1] <= 0:
            raise ModelError("axis spectral density has no mass")
        cdf /= cdf[-1]
        grid, first = np.unique(cdf, return_index=True)
        tables.append((grid, xi[first]))
    model.meta["_axis_tables"] = tables
    return tables


def sample_feature_field(model, K, seed):
    """Mesh-free sampler: frequencies from the normalized spectrum."""
    if K < 64:
        raise ValueError("need at least 64 features")
    r0 = model.r_zero
    if model.degenerate or r0 <= 0.0:
        raise ModelError("feature sampler requires R(0) > 0")
    tables = _axis_tables(model)
    rng = generator(seed, "features")
    u = rng.uniform(size=(K, model.dim))
    freqs = np.empty((K, model.dim))
    for k, (grid, xi) in enumerate(tables):
        freqs[:, k] = np.interp(u[:, k], grid, xi)
    phases = rng.uniform(0.0, 2.0 * math.pi, size=K)
    return FeatureField(model=model, K=int(K), frequencies=freqs, phases=phases,
                        amplitude=math.sqrt(2.0 * r0 / K), seed=seed)


def field_diagnostics(field):
    """Embedding diagnostics for reports."""
    return {"clamped_mass": field.clamped_mass, "padding": field.padding,
            "h": field.h, "grid_shape": list(field.values.shape),
            "seed": field.seed}


def field_to_csv(field, path):
    """Dump node coordinates and values for small grids."""
    if field.values.size > 10**6:
        raise ValueError("grid too large for a CSV dump")
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow([f"x{k}" for k in range(field.values.ndim)] + ["value"])
        for idx in np.ndindex(*field.values.shape):
            coords = field.origin + field.h * np.asarray(idx)
            writer.writerow([f"{c:.9g}" for c in coords]
                            + [f"{field.values[idx]:.9g}"])
