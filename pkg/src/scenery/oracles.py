"""Simulation-free and simulation-light targets for the statistics suite.

The exact finite-n second moment of the rescaled functional reduces to
a one-dimensional weighted integral of the covariance heat moment
m(tau) = integral of R against the time-tau Gaussian kernel:

    E X_n(t)^2 = a(n)^-2 * 2 * integral_0^{nt} (nt - u) m(u) du.

Window covariances of trajectory increments reduce to the same primitive
through the even second antiderivative G (G'' = m(|x|), G(0)=G'(0)=0).
The d=1 mixture limit is served by Monte Carlo over local-time profiles,
which also yields the mixture kurtosis target.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from . import policy
from .brownian import local_time, sample_path
from .functional import scaling_factor
from .seeds import derive_seed, generator

__all__ = ["OracleError", "finite_n_variance", "finite_n_variance_discrete",
           "window_covariance", "local_time_energy", "local_time_energy_moments",
           "probe_energy_moments", "limit_cf_d1", "sample_limit_d1",
           "variance_table"]

LOCAL_TIME_ENERGY_1 = 8.0 / (3.0 * math.sqrt(2.0 * math.pi))


class OracleError(ArithmeticError):
    """Quadrature failed to reach the required tolerance."""


def _sum_octave_quads(f, T, epsabs, epsrel):
    """Adaptive quadrature of f over [0, T] split octave by octave.

    Per-octave relative tolerances would over-demand accuracy from tail
    pieces that contribute almost nothing, so the caller supplies an
    absolute floor and this helper reports the aggregate error instead of
    trusting the per-piece heuristics.
    """
    edges = [0.0, min(1.0, T)]
    while edges[-1] < T:
        edges.append(min(2.0 * edges[-1], T))
    total, err = 0.0, 0.0
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        for lo, hi in zip(edges[:-1], edges[1:]):
            val_k, err_k = integrate.quad(f, lo, hi, epsabs=epsabs,
                                          epsrel=epsrel, limit=200)
            total += val_k
            err += err_k
    return total, err


def _weighted_heat_integral(model, T):
    """Integral of (T - tau) * m(tau) over [0, T] by split quadrature."""
    if T <= 0.0:
        return 0.0, 0.0
    m = model.heat_moment
    f = lambda u: (T - u) * m(u)
    rough, _ = _sum_octave_quads(f, T, 0.0, 1e-4)
    floor = policy.QUAD_REL * max(abs(rough), 1e-300) / math.log2(T + 4.0)
    total, err = _sum_octave_quads(f, T, floor, policy.QUAD_REL)
    if err > policy.QUAD_GUARD_REL * max(abs(total), 1e-300):
        raise OracleError(f"heat-moment quadrature reached only {err:.3e} "
                          f"absolute error on a value of {total:.6e}")
    return total, err


def finite_n_variance(model, n, t, d, mode="nondegenerate"):
    """Exact second moment of X_n(t) for the continuous-time functional."""
    if t < 0.0:
        raise ValueError("t must be nonnegative")
    if t == 0.0:
        return 0.0
    a = scaling_factor(n, d, mode)
    total, _ = _weighted_heat_integral(model, n * t)
    return 2.0 * total / a**2


def finite_n_variance_discrete(model, n, t, d, step, mode="nondegenerate"):
    """Exact second moment of the step-discretized functional.

    Matches the Monte Carlo estimator's expectation exactly, Riemann
    bias included, so the gap to finite_n_variance measures the bias.
    """
    count = int(round(n * t / step))
    if not math.isclose(count * step, n * t, rel_tol=1e-9):
        raise ValueError("n*t must be a whole number of steps")
    if count < 1:
        raise ValueError("need at least one step")
    a = scaling_factor(n, d, mode)
    lags = step * np.arange(1, count)
    weights = np.arange(count - 1, 0, -1, dtype=float)
    total = count * model.r_zero + 2.0 * float(weights @ model.heat_moment(lags))
    return (step / a) ** 2 * total


def window_covariance(model, n, window_a, window_b, d, mode="nondegenerate"):
    """Exact covariance of trajectory increments over two time windows.

    Windows are (lo, hi) fractions of [0, 1].  Uses the even second
    antiderivative of the heat moment, so overlapping and disjoint
    windows are handled by one formula.
    """
    lo_a, hi_a = window_a
    lo_b, hi_b = window_b
    if not (0.0 <= lo_a < hi_a and 0.0 <= lo_b < hi_b):
        raise ValueError("windows must be increasing pairs")
    a = scaling_factor(n, d, mode)
    combo = 0.0
    for x, sign in (((hi_b - lo_a), 1.0), ((lo_b - hi_a), 1.0),
                    ((hi_b - hi_a), -1.0), ((lo_b - lo_a), -1.0)):
        piece, _ = _weighted_heat_integral(model, n * abs(x))
        combo += sign * piece
    return combo / a**2


def local_time_energy(t):
    """Expected integral of the squared Brownian local time at time t."""
    if t < 0.0:
        raise ValueError("t must be nonnegative")
    return LOCAL_TIME_ENERGY_1 * t**1.5


def local_time_energy_moments(t, m, seed, step=2.0**-12, w=2.0**-6):
    """MC first and second moments of the squared-profile integral.

    Serves as the brute-force cross-check of local_time_energy and as
    the source of the mixture kurtosis target.
    """
    vals = np.empty(m)
    for r in range(m):
        path = sample_path(1, t, step, seed=_child(seed, "energy", r))
        vals[r] = local_time(path, t, w).energy()
    first = float(vals.mean())
    second = float(np.mean(vals**2))
    se_first = float(vals.std(ddof=1) / math.sqrt(m))
    se_second = float(np.std(vals**2, ddof=1) / math.sqrt(m))
    return first, second, se_first, se_second


def _child(seed, tag, r):
    """Stable per-replica seed for oracle-internal streams."""
    return derive_seed(seed, tag, r)


def _profile_quadratic(path, probe, w):
    """Integral of (sum_i alpha_i (L_{t_i} - L_{t_{i-1}})(x))^2 dx."""
    times = np.asarray(probe.times, dtype=float)
    weights = np.asarray(probe.weights, dtype=float)
    ticks = [0] + [path.tick(t) for t in times]
    xs = path.positions[:ticks[-1], 0]
    idx = np.floor(xs / w).astype(np.int64)
    lo, hi = idx.min(), idx.max()
    combined = np.zeros(hi - lo + 1)
    for i, alpha in enumerate(weights):
        seg = idx[ticks[i]:ticks[i + 1]]
        if seg.size:
            combined += alpha * (path.step / w) * np.bincount(
                seg - lo, minlength=combined.size)
    return float(np.sum(combined**2) * w)


def probe_energy_moments(probe, m, seed, step=2.0**-12, w=2.0**-6):
    """MC first and second moments of the probe's local-time quadratic form.

    The first moment times the spectrum at 0 is the limit variance of the
    probe combination, which calibrates finite-n targets for the d=1 law.
    """
    times = np.asarray(probe.times, dtype=float)
    horizon = float(times[-1])
    vals = np.empty(m)
    for r in range(m):
        path = sample_path(1, horizon, step, seed=_child(seed, "probe", r))
        vals[r] = _profile_quadratic(path, probe, w)
    first = float(vals.mean())
    second = float(np.mean(vals**2))
    se_first = float(vals.std(ddof=1) / math.sqrt(m))
    se_second = float(np.std(vals**2, ddof=1) / math.sqrt(m))
    return first, second, se_first, se_second


def limit_cf_d1(model, theta_grid, probe, m, seed, step=2.0**-12, w=2.0**-6):
    """Characteristic function of the d=1 limit law at each theta.

    MC average over local-time profiles of
    exp(-theta^2 * spectrum(0) * S / 2) with S the quadratic form of
    the probe's local-time increments.  Values are real by symmetry.
    """
    theta = np.asarray(theta_grid, dtype=float)
    r_hat0 = model.r_hat_zero
    times = np.asarray(probe.times, dtype=float)
    horizon = float(times[-1])
    quads = np.empty(m)
    for r in range(m):
        path = sample_path(1, horizon, step, seed=_child(seed, "cf", r))
        quads[r] = _profile_quadratic(path, probe, w)
    phi = np.exp(-0.5 * np.outer(theta**2, quads) * r_hat0)
    values = phi.mean(axis=1)
    se = phi.std(axis=1, ddof=1) / math.sqrt(m)
    return values.astype(complex), se


def sample_limit_d1(model, t, seed, step=2.0**-12, w=2.0**-6):
    """One draw of the d=1 limit: centered Gaussian given the local time."""
    path = sample_path(1, t, step, seed=_child(seed, "limit_path", 0))
    energy = local_time(path, t, w).energy()
    rng = generator(seed, "limit_gauss")
    return float(rng.normal(0.0, math.sqrt(model.r_hat_zero * energy)))


def variance_table(model, ns, t, d, mode="nondegenerate"):
    """Oracle rows (n, d, mode, value, tol) for persistence.

    tol is the quadrature error bound, floored at QUAD_REL relative.
    """
    rows = []
    for n in ns:
        a = scaling_factor(n, d, mode)
        total, err = _weighted_heat_integral(model, n * t)
        value = 2.0 * total / a**2
        tol = max(2.0 * err / a**2, policy.QUAD_REL * abs(value))
        rows.append({"n": int(n), "d": int(d), "mode": mode,
                     "value": value, "tol": tol})
    return rows
