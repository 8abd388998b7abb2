"""Compiled kernels: bucketed pair sums and shot-noise evaluation.

The spatial hash is a flat sorted cell index.  Cell pitch is at least
the per-axis covariance (or shape) support, so a one-cell stencil is
exhaustive and truncation by support is exact, not approximate.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

import numba as nb
import numpy as np

__all__ = ["Buckets", "bucket", "half_stencil", "full_stencil",
           "pair_sum_self", "pair_sum_cross", "shot_values",
           "cov_pair_sum_self", "cov_pair_sum_cross", "shape_sums",
           "shape_axis_support"]


@dataclass(frozen=True)
class Buckets:
    """Points sorted by flat cell id, with the cell directory."""

    pos: np.ndarray
    order: np.ndarray
    uniq_ids: np.ndarray
    uniq_coords: np.ndarray
    starts: np.ndarray
    ext: np.ndarray
    strides: np.ndarray
    cmin: np.ndarray
    pitch: float


def bucket(positions, pitch):
    pos = np.ascontiguousarray(positions, dtype=np.float64)
    if pos.ndim != 2:
        raise ValueError("positions must be a (N, d) array")
    n, d = pos.shape
    if n == 0:
        z = np.zeros((0, d), dtype=np.int64)
        return Buckets(pos=pos, order=np.zeros(0, dtype=np.int64),
                       uniq_ids=np.zeros(0, dtype=np.int64), uniq_coords=z,
                       starts=np.zeros(1, dtype=np.int64),
                       ext=np.ones(d, dtype=np.int64),
                       strides=np.ones(d, dtype=np.int64),
                       cmin=np.zeros(d, dtype=np.int64), pitch=float(pitch))
    cells = np.floor(pos / pitch).astype(np.int64)
    cmin = cells.min(axis=0)
    cells -= cmin
    ext = cells.max(axis=0) + 1
    strides = np.ones(d, dtype=np.int64)
    for k in range(d - 2, -1, -1):
        strides[k] = strides[k + 1] * ext[k + 1]
    ids = cells @ strides
    order = np.argsort(ids, kind="stable")
    ids = ids[order]
    uniq_ids, first = np.unique(ids, return_index=True)
    starts = np.append(first, n).astype(np.int64)
    return Buckets(pos=np.ascontiguousarray(pos[order]), order=order,
                   uniq_ids=uniq_ids.astype(np.int64),
                   uniq_coords=np.ascontiguousarray(cells[order][first]),
                   starts=starts, ext=ext.astype(np.int64),
                   strides=strides, cmin=cmin.astype(np.int64), pitch=float(pitch))


def half_stencil(d):
    """Offsets in {-1,0,1}^d whose first nonzero entry is positive."""
    offs = []
    for off in product((-1, 0, 1), repeat=d):
        for entry in off:
            if entry > 0:
                offs.append(off)
                break
            if entry < 0:
                break
    return np.array(offs, dtype=np.int64).reshape(len(offs), d)


def full_stencil(d):
    return np.array(list(product((-1, 0, 1), repeat=d)), dtype=np.int64)


@nb.njit(inline="always", cache=True)
def _factor_value(kind, a, b, off, ln, table, dx):
    if kind == 0:  # tent, a = width
        t = 1.0 - abs(dx) / a
        return t if t > 0.0 else 0.0
    if kind == 1:  # cubic spline bump, a = scale, b = shift
        ay = abs((dx - b) / a)
        if ay >= 2.0:
            return 0.0
        if ay <= 1.0:
            return 2.0 / 3.0 - ay * ay * (1.0 - 0.5 * ay)
        c = 2.0 - ay
        return c * c * c / 6.0
    if kind == 2:  # gaussian, a = 1/(2 length^2)
        return np.exp(-a * dx * dx)
    # piecewise-linear table, a = x0, b = spacing
    p = (dx - a) / b
    i = int(np.floor(p))
    if i < 0 or i >= ln - 1:
        return 0.0
    w = p - i
    return table[off + i] * (1.0 - w) + table[off + i + 1] * w


@nb.njit(inline="always", cache=True)
def _pair_cov(A, i, B, j, sup, coefs, kinds, p0, p1, toff, tlen, table, trunc_r2):
    d = A.shape[1]
    r2 = 0.0
    for k in range(d):
        dx = A[i, k] - B[j, k]
        if dx > sup or -dx > sup:
            return 0.0
        r2 += dx * dx
    if r2 > trunc_r2:
        return 0.0
    total = 0.0
    for t in range(coefs.shape[0]):
        prod = coefs[t]
        for k in range(d):
            v = _factor_value(kinds[t, k], p0[t, k], p1[t, k],
                              toff[t, k], tlen[t, k], table, A[i, k] - B[j, k])
            if v == 0.0:
                prod = 0.0
                break
            prod *= v
        total += prod
    return total


@nb.njit(inline="always", cache=True)
def _find_cell(uniq_ids, target):
    lo, hi = 0, uniq_ids.shape[0]
    while lo < hi:
        mid = (lo + hi) // 2
        if uniq_ids[mid] < target:
            lo = mid + 1
        else:
            hi = mid
    if lo < uniq_ids.shape[0] and uniq_ids[lo] == target:
        return lo
    return -1


@nb.njit(cache=True)
def pair_sum_self(pos, uniq_ids, uniq_coords, starts, ext, strides, stencil,
                  sup, coefs, kinds, p0, p1, toff, tlen, table, trunc_r2):
    """Sum of R(x_i - x_j) over unordered pairs of bucketed points."""
    d = pos.shape[1]
    total = 0.0
    for ci in range(uniq_ids.shape[0]):
        a0, a1 = starts[ci], starts[ci + 1]
        for i in range(a0, a1):
            for j in range(i + 1, a1):
                total += _pair_cov(pos, i, pos, j, sup, coefs, kinds,
                                   p0, p1, toff, tlen, table, trunc_r2)
        for s in range(stencil.shape[0]):
            target = 0
            ok = True
            for k in range(d):
                c = uniq_coords[ci, k] + stencil[s, k]
                if c < 0 or c >= ext[k]:
                    ok = False
                    break
                target += c * strides[k]
            if not ok:
                continue
            cj = _find_cell(uniq_ids, target)
            if cj < 0:
                continue
            b0, b1 = starts[cj], starts[cj + 1]
            for i in range(a0, a1):
                for j in range(b0, b1):
                    total += _pair_cov(pos, i, pos, j, sup, coefs, kinds,
                                       p0, p1, toff, tlen, table, trunc_r2)
    return total


@nb.njit(cache=True)
def pair_sum_cross(apos, bpos, uniq_ids, starts, ext, strides, cmin, pitch,
                   stencil, sup, coefs, kinds, p0, p1, toff, tlen,
                   table, trunc_r2):
    """Sum of R(a - b) over all pairs from two point sets (b bucketed)."""
    d = apos.shape[1]
    total = 0.0
    for i in range(apos.shape[0]):
        for s in range(stencil.shape[0]):
            target = 0
            ok = True
            for k in range(d):
                c = int(np.floor(apos[i, k] / pitch)) - cmin[k] + stencil[s, k]
                if c < 0 or c >= ext[k]:
                    ok = False
                    break
                target += c * strides[k]
            if not ok:
                continue
            cj = _find_cell(uniq_ids, target)
            if cj < 0:
                continue
            for j in range(starts[cj], starts[cj + 1]):
                total += _pair_cov(apos, i, bpos, j, sup, coefs, kinds,
                                   p0, p1, toff, tlen, table, trunc_r2)
    return total


def cov_pair_sum_self(bucks, kernel):
    """Sum of R over unordered point pairs; diagonal not included."""
    _require_pitch(bucks, kernel.axis_support)
    d = bucks.pos.shape[1]
    return pair_sum_self(bucks.pos, bucks.uniq_ids, bucks.uniq_coords,
                         bucks.starts, bucks.ext, bucks.strides, half_stencil(d),
                         kernel.axis_support, kernel.coefs, kernel.kinds,
                         kernel.p0, kernel.p1, kernel.tab_offset,
                         kernel.tab_length, kernel.table, kernel.trunc_r2)


def cov_pair_sum_cross(apos, bucks, kernel):
    """Sum of R(a - b) over all pairs between apos rows and bucketed points."""
    _require_pitch(bucks, kernel.axis_support)
    apos = np.ascontiguousarray(apos, dtype=np.float64)
    d = bucks.pos.shape[1]
    return pair_sum_cross(apos, bucks.pos, bucks.uniq_ids, bucks.starts,
                          bucks.ext, bucks.strides, bucks.cmin, bucks.pitch,
                          full_stencil(d), kernel.axis_support, kernel.coefs,
                          kernel.kinds, kernel.p0, kernel.p1, kernel.tab_offset,
                          kernel.tab_length, kernel.table, kernel.trunc_r2)


def shape_axis_support(shape):
    """Per-axis reach of the shape: max center offset plus the tent scale."""
    if shape.weights.size == 0:
        return float(shape.scale)
    return float(np.max(np.abs(shape.centers)) + shape.scale)


def shape_sums(xs, bucks, shape):
    """Shot-noise sums of the shape over bucketed points at each row of xs."""
    _require_pitch(bucks, shape_axis_support(shape))
    xs = np.ascontiguousarray(xs, dtype=np.float64)
    d = bucks.pos.shape[1]
    weights = np.ascontiguousarray(shape.weights, dtype=np.float64)
    centers = np.ascontiguousarray(shape.centers, dtype=np.float64).reshape(-1, d)
    return shot_values(xs, bucks.pos, bucks.uniq_ids, bucks.starts, bucks.ext,
                       bucks.strides, bucks.cmin, bucks.pitch, full_stencil(d),
                       weights, centers, float(shape.scale))


def _require_pitch(bucks, support):
    if bucks.pitch < support * (1.0 - 1e-12):
        raise ValueError(f"bucket pitch {bucks.pitch} is below the support {support}")


@nb.njit(cache=True)
def shot_values(xs, points, uniq_ids, starts, ext, strides, cmin, pitch,
                stencil, weights, centers, scale):
    """Shot-noise sums of the shape over bucketed points, at each row of xs."""
    d = xs.shape[1]
    na = weights.shape[0]
    out = np.zeros(xs.shape[0])
    for i in range(xs.shape[0]):
        acc = 0.0
        for s in range(stencil.shape[0]):
            target = 0
            ok = True
            for k in range(d):
                c = int(np.floor(xs[i, k] / pitch)) - cmin[k] + stencil[s, k]
                if c < 0 or c >= ext[k]:
                    ok = False
                    break
                target += c * strides[k]
            if not ok:
                continue
            cj = _find_cell(uniq_ids, target)
            if cj < 0:
                continue
            for j in range(starts[cj], starts[cj + 1]):
                for a in range(na):
                    prod = weights[a]
                    for k in range(d):
                        t = 1.0 - abs(xs[i, k] - points[j, k] - centers[a, k]) / scale
                        if t <= 0.0:
                            prod = 0.0
                            break
                        prod *= t
                    acc += prod
        out[i] = acc
    return out
