"""Hypothesis tests turning replica samples plus oracle targets into verdicts.

Every estimator here is a pure fold over the supplied arrays: given the same
samples and the same policy constants the verdict is bitwise reproducible.
Randomized internals (the ECF bootstrap) draw from a fixed declared seed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import stats as scipy_stats

from . import policy
from .seeds import generator

__all__ = ["FiniteDimProbe", "TestReport", "variance_test", "ecf_test",
           "normality_test", "kurtosis_test", "cross_term_test",
           "moment_scaling_test", "concentration_test"]


@dataclass(frozen=True)
class FiniteDimProbe:
    """Weighted sum of trajectory increments Y = sum_i w_i (X(t_i) - X(t_{i-1})).

    Times are strictly increasing in (0, 1] with the implicit t_0 = 0, where
    every trajectory starts at X(0) = 0.
    """

    times: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float)
        weights = np.asarray(self.weights, dtype=float)
        if times.ndim != 1 or times.size < 1:
            raise ValueError("probe needs at least one time")
        if weights.shape != times.shape:
            raise ValueError("probe needs one weight per time")
        if times[0] <= 0.0 or np.any(np.diff(times) <= 0.0) or times[-1] > 1.0:
            raise ValueError("probe times must be strictly increasing in (0, 1]")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "weights", weights)

    def evaluate(self, t_grid, values):
        """Combine trajectory values (replicas, len(t_grid)) into Y samples."""
        t_grid = np.asarray(t_grid, dtype=float)
        block = np.atleast_2d(np.asarray(values, dtype=float))
        if block.shape[-1] != t_grid.size:
            raise ValueError("values must have one column per grid time")
        at = np.zeros((len(self.times) + 1, block.shape[0]))
        for i, t in enumerate(self.times):
            j = int(np.argmin(np.abs(t_grid - t)))
            if not math.isclose(t_grid[j], t, rel_tol=1e-9, abs_tol=1e-12):
                raise ValueError(f"probe time {t} is not on the trajectory grid")
            at[i + 1] = block[:, j]
        out = self.weights @ np.diff(at, axis=0)
        return out if np.asarray(values).ndim > 1 else float(out[0])


@dataclass(frozen=True)
class TestReport:
    """Verdict of one statistical test, fully determined by declared policy."""

    name: str
    statistic: float
    target: float | None
    se: float | None
    p_value: float | None
    gate: str
    passed: bool
    gated: bool = True
    metadata: dict = field(default_factory=dict)

    def to_dict(self):
        def plain(value):
            if isinstance(value, (np.floating, np.integer)):
                return value.item()
            if isinstance(value, np.ndarray):
                return value.tolist()
            if isinstance(value, (list, tuple)):
                return [plain(v) for v in value]
            if isinstance(value, dict):
                return {k: plain(v) for k, v in value.items()}
            return value
        return {"name": self.name, "statistic": plain(self.statistic),
                "target": plain(self.target), "se": plain(self.se),
                "p_value": plain(self.p_value), "gate": self.gate,
                "passed": bool(self.passed), "gated": bool(self.gated),
                "metadata": plain(self.metadata)}


def _variance_and_se(samples):
    """Sample variance and its SE from the fourth central moment."""
    m = samples.size
    centered = samples - samples.mean()
    var = float(np.sum(centered**2) / (m - 1))
    m4 = float(np.mean(centered**4))
    se2 = (m4 - (m - 3) / (m - 1) * var**2) / m
    return var, math.sqrt(max(se2, 0.0))


def variance_test(samples, oracle_value, name="variance_test"):
    """Two-sided z-test of the sample variance against the oracle value."""
    samples = np.asarray(samples, dtype=float)
    if samples.ndim != 1 or samples.size < policy.MIN_REPLICAS_VARIANCE:
        raise ValueError(f"variance_test needs at least "
                         f"{policy.MIN_REPLICAS_VARIANCE} replicas")
    var, se = _variance_and_se(samples)
    if se == 0.0:
        z = 0.0 if var == oracle_value else math.inf
    else:
        z = (var - oracle_value) / se
    return TestReport(
        name=name, statistic=var, target=float(oracle_value), se=se,
        p_value=None, gate=f"|z| <= {policy.Z_MAX}", passed=abs(z) <= policy.Z_MAX,
        metadata={"z": z, "replicas": int(samples.size)})


def _default_theta_grid(sigma_hat):
    half = 3.0 / sigma_hat
    return np.linspace(-half, half, policy.ECF_THETA_POINTS)


def ecf_test(samples, target_cf, theta_grid=None, name="ecf_test"):
    """Uniform band test of the empirical characteristic function.

    The statistic is max_theta |ECF - target|; the pass band is the
    ECF_LEVEL bootstrap quantile of the same sup-distance between bootstrap
    ECFs and the point estimate, so the target passes iff it sits inside
    the simultaneous band everywhere on the grid.
    """
    samples = np.asarray(samples, dtype=float)
    if samples.ndim != 1 or samples.size < policy.MIN_REPLICAS_ECF:
        raise ValueError(f"ecf_test needs at least {policy.MIN_REPLICAS_ECF} "
                         f"replicas")
    sigma_hat = float(samples.std(ddof=1))
    if sigma_hat == 0.0:
        raise ValueError("ecf_test needs nondegenerate samples")
    theta = (_default_theta_grid(sigma_hat) if theta_grid is None
             else np.asarray(theta_grid, dtype=float))
    target = np.asarray(target_cf(theta), dtype=complex)
    zero = np.isclose(theta, 0.0, atol=1e-300)
    if np.any(zero) and not np.all(target[zero] == 1.0 + 0.0j):
        raise ValueError("target characteristic function must be exactly 1 "
                         "at theta = 0")
    phases = np.exp(1j * np.outer(theta, samples))
    ecf = phases.mean(axis=1)
    distance = float(np.max(np.abs(ecf - target)))
    rng = generator(policy.ECF_BOOTSTRAP_SEED, "ecf")
    m = samples.size
    boot = np.empty(policy.ECF_BOOTSTRAP)
    for b in range(policy.ECF_BOOTSTRAP):
        idx = rng.integers(0, m, size=m)
        boot[b] = np.max(np.abs(phases[:, idx].mean(axis=1) - ecf))
    band = float(np.quantile(boot, policy.ECF_LEVEL))
    return TestReport(
        name=name, statistic=distance, target=0.0, se=band, p_value=None,
        gate=f"sup distance <= bootstrap {policy.ECF_LEVEL:.0%} band",
        passed=distance <= band,
        metadata={"theta": theta, "ecf_real": ecf.real, "ecf_imag": ecf.imag,
                  "target_real": target.real, "target_imag": target.imag,
                  "sigma_hat": sigma_hat, "replicas": int(m),
                  "bootstrap": policy.ECF_BOOTSTRAP})


def normality_test(samples, variance_target, name="normality_test"):
    """KS test of samples / sqrt(variance_target) against the standard normal."""
    samples = np.asarray(samples, dtype=float)
    if samples.ndim != 1 or samples.size < policy.MIN_REPLICAS_NORMALITY:
        raise ValueError(f"normality_test needs at least "
                         f"{policy.MIN_REPLICAS_NORMALITY} samples")
    if variance_target <= 0.0:
        raise ValueError("variance_target must be positive")
    rescaled = samples / math.sqrt(variance_target)
    result = scipy_stats.kstest(rescaled, "norm")
    return TestReport(
        name=name, statistic=float(result.statistic), target=None, se=None,
        p_value=float(result.pvalue), gate=f"KS p > {policy.KS_P_MIN}",
        passed=result.pvalue > policy.KS_P_MIN,
        metadata={"replicas": int(samples.size),
                  "variance_target": float(variance_target)})


def _jackknife_kurtosis(samples):
    """Excess kurtosis and its jackknife SE via leave-one-out power sums."""
    x = samples - samples.mean()
    m = x.size
    p1, p2 = np.sum(x), np.sum(x**2)
    p3, p4 = np.sum(x**3), np.sum(x**4)
    excess = float(m * p4 / p2**2 - 3.0)
    k = m - 1
    mu = (p1 - x) / k
    s2 = (p2 - x**2) / k - mu**2
    s4 = ((p4 - x**4) - 4.0 * mu * (p3 - x**3) + 6.0 * mu**2 * (p2 - x**2)
          - 4.0 * mu**3 * (p1 - x) + k * mu**4) / k
    loo = s4 / s2**2 - 3.0
    se = math.sqrt((m - 1) / m * float(np.sum((loo - loo.mean())**2)))
    return excess, se


def kurtosis_test(samples, mode, target=None, target_se=0.0,
                  name="kurtosis_test"):
    """Excess-kurtosis gate for the Gaussian or the mixture limit.

    gaussian_limit expects excess kurtosis 0 within KURT_Z_MAX jackknife SE.
    mixture_limit expects it positive by more than KURT_Z_MAX SE and, when a
    target ratio is supplied, within KURT_Z_MAX combined SE of that target.
    """
    samples = np.asarray(samples, dtype=float)
    if samples.ndim != 1 or samples.size < policy.MIN_REPLICAS_KURTOSIS:
        raise ValueError(f"kurtosis_test needs at least "
                         f"{policy.MIN_REPLICAS_KURTOSIS} samples")
    if mode not in ("gaussian_limit", "mixture_limit"):
        raise ValueError(f"unknown kurtosis mode {mode!r}")
    excess, se = _jackknife_kurtosis(samples)
    if mode == "gaussian_limit":
        passed = abs(excess) <= policy.KURT_Z_MAX * se
        gate = f"|excess| <= {policy.KURT_Z_MAX} SE"
        shown_target = 0.0
    else:
        passed = excess > policy.KURT_Z_MAX * se
        gate = f"excess > {policy.KURT_Z_MAX} SE"
        shown_target = target
        if target is not None:
            combined = math.hypot(se, target_se)
            passed = passed and abs(excess - target) <= policy.KURT_Z_MAX * combined
            gate += f" and |excess - target| <= {policy.KURT_Z_MAX} combined SE"
    return TestReport(
        name=name, statistic=excess, target=shown_target, se=se, p_value=None,
        gate=gate, passed=bool(passed),
        metadata={"mode": mode, "replicas": int(samples.size),
                  "target_se": float(target_se)})


def cross_term_test(ladder, d, name="cross_term_test"):
    """Vanishing check for cross-window interaction sums along an n-ladder.

    ladder is a sequence of (n, samples) pairs with n increasing.  The gate
    requires the mean magnitude to decrease along the ladder and the final
    mean to sit within Z_MAX SE of zero.  For d = 2 the report also carries
    a 1/ln n envelope fit, recorded as advisory metadata.
    """
    if len(ladder) < 2:
        raise ValueError("cross_term_test needs at least two ladder points")
    ns, means, ses = [], [], []
    for n, samples in ladder:
        samples = np.asarray(samples, dtype=float)
        if samples.size < 2:
            raise ValueError("each ladder point needs at least two replicas")
        ns.append(int(n))
        means.append(float(samples.mean()))
        ses.append(float(samples.std(ddof=1) / math.sqrt(samples.size)))
    if any(b <= a for a, b in zip(ns, ns[1:])):
        raise ValueError("ladder sizes must be strictly increasing")
    magnitudes = [abs(v) for v in means]
    decreasing = all(b < a for a, b in zip(magnitudes, magnitudes[1:]))
    final_small = magnitudes[-1] <= policy.Z_MAX * ses[-1]
    metadata = {"n": ns, "means": means, "ses": ses}
    if d == 2:
        envelope = [m * math.log(n) for m, n in zip(magnitudes, ns)]
        metadata["ln_n_envelope"] = envelope
    return TestReport(
        name=name, statistic=magnitudes[-1], target=0.0, se=ses[-1],
        p_value=None,
        gate=f"|mean| decreasing and final within {policy.Z_MAX} SE of 0",
        passed=decreasing and final_small, metadata=metadata)


def _slope_with_jackknife(log_gaps, per_replica):
    """OLS slope of log means against log gaps, SE by replica jackknife."""
    x = log_gaps - log_gaps.mean()
    weights = x / np.sum(x**2)
    m = per_replica.shape[0]
    sums = per_replica.sum(axis=0)
    slope = float(weights @ np.log(sums / m))
    loo = np.log((sums[None, :] - per_replica) / (m - 1)) @ weights
    se = math.sqrt((m - 1) / m * float(np.sum((loo - loo.mean())**2)))
    return slope, se


def moment_scaling_test(t_grid, values, beta, target_slope,
                        gap_exponents=policy.MOMENT_GAP_EXPONENTS,
                        name="moment_scaling_test"):
    """Log-log slope fit of E|X(t + gap) - X(t)|^beta against the gap.

    Uses non-overlapping increments at every anchor the grid resolves, one
    mean per replica per gap, with a leave-one-replica-out jackknife SE.
    Passes iff the fitted slope is at least target_slope - Z_MAX SE.
    """
    t_grid = np.asarray(t_grid, dtype=float)
    block = np.atleast_2d(np.asarray(values, dtype=float))
    if block.shape[0] < 2:
        raise ValueError("moment_scaling_test needs at least two replicas")
    if block.shape[1] != t_grid.size:
        raise ValueError("values must have one column per grid time")
    gaps, per_replica = [], []
    for e in gap_exponents:
        gap = 2.0**-e
        edges = np.arange(0.0, 1.0 + 0.5 * gap, gap)
        cols = []
        for t in edges:
            if math.isclose(t, 0.0, abs_tol=1e-12):
                cols.append(None)
                continue
            j = int(np.argmin(np.abs(t_grid - t)))
            if not math.isclose(t_grid[j], t, rel_tol=1e-9, abs_tol=1e-12):
                raise ValueError(f"trajectory grid does not resolve gap 2^-{e}")
            cols.append(j)
        at = np.stack([np.zeros(block.shape[0]) if j is None else block[:, j]
                       for j in cols], axis=1)
        increments = np.diff(at, axis=1)
        gaps.append(gap)
        per_replica.append(np.mean(np.abs(increments)**beta, axis=1))
    slope, se = _slope_with_jackknife(np.log(np.asarray(gaps)),
                                      np.stack(per_replica, axis=1))
    passed = slope >= target_slope - policy.Z_MAX * se
    return TestReport(
        name=name, statistic=slope, target=float(target_slope), se=se,
        p_value=None, gate=f"slope >= target - {policy.Z_MAX} SE",
        passed=bool(passed),
        metadata={"beta": float(beta), "gaps": gaps,
                  "replicas": int(block.shape[0])})


def concentration_test(ladder, d, name="concentration_test"):
    """Concentration of conditional variances along an n-ladder (d >= 2).

    The spread of the conditional variance must decrease strictly along the
    ladder and the final coefficient of variation must clear CV_MAX.  The
    d = 2 report is advisory (gated=False): the decay there is logarithmic,
    so the CV gate is only enforced for d >= 3.
    """
    if d < 2:
        raise ValueError("concentration_test applies to d >= 2 only")
    if len(ladder) < 2:
        raise ValueError("concentration_test needs at least two ladder points")
    ns, spreads, cvs = [], [], []
    for n, samples in ladder:
        samples = np.asarray(samples, dtype=float)
        if samples.size < 2:
            raise ValueError("each ladder point needs at least two replicas")
        ns.append(int(n))
        spreads.append(float(samples.var(ddof=1)))
        mean = float(samples.mean())
        cvs.append(math.inf if mean == 0.0
                   else float(samples.std(ddof=1) / abs(mean)))
    if any(b <= a for a, b in zip(ns, ns[1:])):
        raise ValueError("ladder sizes must be strictly increasing")
    decreasing = all(b < a for a, b in zip(spreads, spreads[1:]))
    passed = decreasing and cvs[-1] < policy.CV_MAX
    return TestReport(
        name=name, statistic=cvs[-1], target=None, se=None, p_value=None,
        gate=f"Var decreasing and final CV < {policy.CV_MAX}",
        passed=bool(passed), gated=d >= 3,
        metadata={"n": ns, "variances": spreads, "cv": cvs})
