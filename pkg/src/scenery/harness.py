"""Experiment configuration, deterministic execution, persistence, reports.

A run is a grid of (n, replica) cells.  Every cell derives its random
streams from (master_seed, stream tag, n, replica) alone, is computed by a
pure function, and is appended to a per-n CSV in replica order, so results
are byte-identical for any worker count and crash-safe to resume.  All
downstream artifacts (trajectory tables, oracle tables, test reports, the
summary) are regenerated from the parsed cell files on every run.
"""

from __future__ import annotations

import dataclasses
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import functional, oracles, policy, spectra, stats
from .brownian import bounding_box, sample_path
from .gaussian_field import sample_feature_field, sample_grid_field
from .poisson_field import poisson_value, sample_poisson_field, sample_poisson_field_near
from .seeds import derive_seed

__all__ = ["ExperimentConfig", "RunResult", "load_config", "config_from_dict",
           "run_experiment", "report", "step_for"]

SUITE_NAMES = ("variance", "ecf", "normality", "kurtosis", "cross_term",
               "moment_scaling", "concentration")
CONTROL_NAMES = ("mis_scaled_variance", "gaussian_cf_d1", "normality_d1")
_SUITE_MIN_REPLICAS = {
    "variance": policy.MIN_REPLICAS_VARIANCE,
    "ecf": policy.MIN_REPLICAS_ECF,
    "normality": policy.MIN_REPLICAS_NORMALITY,
    "kurtosis": policy.MIN_REPLICAS_KURTOSIS,
    "cross_term": 2,
    "moment_scaling": 2,
    "concentration": 2,
}


class ConfigError(ValueError):
    """Invalid or inconsistent experiment configuration."""


@dataclass(frozen=True)
class ExperimentConfig:
    """Validated experiment description with the built potential attached."""

    dimension: int
    mode: str
    family: str
    model: spectra.CovarianceModel
    shape: spectra.ShapeFunction | None
    n_ladder: tuple
    t_grid: np.ndarray
    replicas: int
    kappa: float
    master_seed: int
    suites: tuple
    probe: stats.FiniteDimProbe
    windows: tuple
    negative_controls: tuple
    out_dir: str | None
    feature_count: int
    oracle_replicas: int
    payload: dict


@dataclass(frozen=True)
class RunResult:
    """Artifacts of one completed experiment run."""

    out_dir: Path
    reports: tuple
    oracle_rows: tuple
    exit_code: int


def _fraction(value, label):
    scaled = float(value) * policy.TIME_GRID_DEN
    if not math.isclose(scaled, round(scaled), rel_tol=0.0, abs_tol=1e-9):
        raise ConfigError(f"{label} must be a multiple of "
                          f"1/{policy.TIME_GRID_DEN}, got {value}")
    return round(scaled) / policy.TIME_GRID_DEN


def _default_suites(dimension, mode):
    if mode == "degenerate":
        return ("variance", "ecf", "normality", "kurtosis", "moment_scaling")
    if dimension == 1:
        return ("variance", "ecf", "kurtosis", "moment_scaling")
    return SUITE_NAMES


def _build_potential(raw, dimension):
    family = raw.get("family")
    if family == "gaussian":
        spec = dict(raw.get("model", {}))
        if spec.get("dim", dimension) != dimension:
            raise ConfigError("potential dim does not match the experiment "
                              "dimension")
        spec["dim"] = dimension
        return family, spectra.build_gaussian_model(spec), None
    if family == "poisson":
        spec = dict(raw.get("shape", {}))
        if spec.get("dim", dimension) != dimension:
            raise ConfigError("shape dim does not match the experiment "
                              "dimension")
        spec["dim"] = dimension
        shape = spectra.build_shape(spec)
        return family, spectra.shot_noise_model(shape), shape
    raise ConfigError(f"potential family must be 'gaussian' or 'poisson', "
                      f"got {family!r}")


def config_from_dict(raw):
    """Validate a JSON-style experiment description."""
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    known = {"dimension", "mode", "potential", "n_ladder", "t_grid",
             "replicas", "kappa", "master_seed", "suites", "probe", "windows",
             "negative_controls", "out_dir", "feature_count",
             "oracle_replicas"}
    unknown = set(raw) - known
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")

    dimension = int(raw.get("dimension", 0))
    if dimension < 1:
        raise ConfigError("dimension must be a positive integer")
    mode = raw.get("mode", "nondegenerate")
    if mode not in functional.MODES:
        raise ConfigError(f"mode must be one of {functional.MODES}")
    if mode == "degenerate" and dimension not in (1, 2):
        raise ConfigError("degenerate mode is defined for dimensions 1 and 2")

    family, model, shape = _build_potential(raw.get("potential", {}), dimension)
    if mode == "degenerate" and not model.degenerate:
        raise ConfigError("degenerate mode needs a potential with vanishing "
                          "spectrum at 0 (shot-noise shapes need c_p = 0)")
    if mode == "nondegenerate" and dimension <= 2 and model.degenerate:
        raise ConfigError("nondegenerate mode needs a positive spectrum at 0 "
                          "for dimensions 1 and 2")

    ladder = tuple(int(n) for n in raw.get("n_ladder", []))
    if not ladder or any(n < 2 for n in ladder):
        raise ConfigError("n_ladder must list integers >= 2")
    if any(b <= a for a, b in zip(ladder, ladder[1:])):
        raise ConfigError("n_ladder must be strictly increasing")

    den = policy.TIME_GRID_DEN
    default_grid = [k / den for k in range(1, den + 1)]
    t_raw = raw.get("t_grid", default_grid)
    t_grid = np.array([_fraction(t, "every t_grid entry") for t in t_raw])
    if t_grid.size == 0 or t_grid[0] <= 0.0 or t_grid[-1] > 1.0:
        raise ConfigError("t_grid must live in (0, 1]")
    if np.any(np.diff(t_grid) <= 0.0):
        raise ConfigError("t_grid must be strictly increasing")

    replicas = int(raw.get("replicas", 0))
    if replicas < 1:
        raise ConfigError("replicas must be a positive integer")
    kappa = float(raw.get("kappa", policy.KAPPA))
    if kappa <= 0.0:
        raise ConfigError("kappa must be positive")
    if "master_seed" not in raw:
        raise ConfigError("master_seed is required")
    master_seed = int(raw["master_seed"])

    suites = tuple(raw.get("suites", _default_suites(dimension, mode)))
    for name in suites:
        if name not in SUITE_NAMES:
            raise ConfigError(f"unknown suite {name!r}")
        if replicas < _SUITE_MIN_REPLICAS[name]:
            raise ConfigError(f"suite {name!r} needs at least "
                              f"{_SUITE_MIN_REPLICAS[name]} replicas")
    if len(set(suites)) != len(suites):
        raise ConfigError("suites must not repeat")
    if "concentration" in suites and dimension < 2:
        raise ConfigError("concentration suite applies to dimension >= 2")
    if "normality" in suites and dimension == 1 and mode == "nondegenerate":
        raise ConfigError("the d=1 nondegenerate limit is not Gaussian; "
                          "normality runs there only as a negative control")

    probe_raw = raw.get("probe", {"times": [0.5, 1.0], "weights": [1.0, 1.0]})
    probe = stats.FiniteDimProbe(
        times=np.array([_fraction(t, "every probe time")
                        for t in probe_raw["times"]]),
        weights=np.asarray(probe_raw["weights"], dtype=float))
    for t in probe.times:
        if not np.any(np.isclose(t_grid, t, rtol=0.0, atol=1e-12)):
            raise ConfigError(f"probe time {t} is not on the t grid")

    windows_raw = raw.get("windows", [[0.0, 0.5], [0.5, 1.0]])
    if len(windows_raw) != 2:
        raise ConfigError("windows must be a pair of (lo, hi) fractions")
    windows = []
    for lo, hi in windows_raw:
        lo = _fraction(lo, "window edges")
        hi = _fraction(hi, "window edges")
        if not 0.0 <= lo < hi <= 1.0:
            raise ConfigError("windows must be increasing pairs in [0, 1]")
        windows.append((lo, hi))
    (lo_a, hi_a), (lo_b, hi_b) = windows
    if not (hi_a <= lo_b or hi_b <= lo_a):
        raise ConfigError("windows must be disjoint")

    if "moment_scaling" in suites:
        for e in policy.MOMENT_GAP_EXPONENTS:
            gap = 2.0**-e
            needed = np.arange(gap, 1.0 + 0.5 * gap, gap)
            hit = np.isclose(t_grid[None, :], needed[:, None],
                             rtol=0.0, atol=1e-12).any(axis=1)
            if not np.all(hit):
                raise ConfigError(f"t_grid does not resolve gap 2^-{e} "
                                  f"needed by moment_scaling")
    needs_final = {"variance", "ecf", "normality", "kurtosis"} & set(suites)
    if needs_final and not math.isclose(t_grid[-1], 1.0, abs_tol=1e-12):
        raise ConfigError("suites evaluated at t=1 need t_grid ending at 1.0")

    controls = tuple(raw.get("negative_controls", ()))
    for name in controls:
        if name not in CONTROL_NAMES:
            raise ConfigError(f"unknown negative control {name!r}")
        if name == "mis_scaled_variance":
            if mode != "nondegenerate" or dimension > 2:
                raise ConfigError("mis_scaled_variance distinguishes scalings "
                                  "only for nondegenerate d <= 2")
            if replicas < policy.MIN_REPLICAS_VARIANCE:
                raise ConfigError("mis_scaled_variance needs the variance "
                                  "replica minimum")
        else:
            if dimension != 1 or mode != "nondegenerate":
                raise ConfigError(f"{name} applies to nondegenerate d=1 runs")
            if replicas < policy.MIN_REPLICAS_ECF:
                raise ConfigError(f"{name} needs at least "
                                  f"{policy.MIN_REPLICAS_ECF} replicas")

    feature_count = int(raw.get("feature_count", 4096))
    if feature_count < 64:
        raise ConfigError("feature_count must be at least 64")
    oracle_replicas = int(raw.get("oracle_replicas", 400))
    if oracle_replicas < 50:
        raise ConfigError("oracle_replicas must be at least 50")
    out_dir = raw.get("out_dir")

    payload = {
        "dimension": dimension, "mode": mode,
        "potential": raw.get("potential", {}),
        "n_ladder": list(ladder), "t_grid": [float(t) for t in t_grid],
        "replicas": replicas, "kappa": kappa, "master_seed": master_seed,
        "suites": list(suites),
        "probe": {"times": [float(t) for t in probe.times],
                  "weights": [float(w) for w in probe.weights]},
        "windows": [[float(lo), float(hi)] for lo, hi in windows],
        "negative_controls": list(controls),
        "feature_count": feature_count, "oracle_replicas": oracle_replicas,
    }
    return ExperimentConfig(
        dimension=dimension, mode=mode, family=family, model=model,
        shape=shape, n_ladder=ladder, t_grid=t_grid, replicas=replicas,
        kappa=kappa, master_seed=master_seed, suites=suites, probe=probe,
        windows=(tuple(windows[0]), tuple(windows[1])),
        negative_controls=controls, out_dir=out_dir,
        feature_count=feature_count, oracle_replicas=oracle_replicas,
        payload=payload)


def load_config(path):
    """Load and validate an experiment config from a JSON file."""
    with open(path, "r", encoding="utf-8") as handle:
        return config_from_dict(json.load(handle))


def step_for(config, n):
    """Time step for ladder size n: the policy step snapped so that every
    t-grid boundary lands on a whole number of steps."""
    raw = (config.model.support_radius / config.kappa) ** 2
    unit = n / policy.TIME_GRID_DEN
    pieces = max(1, math.ceil(unit / raw - 1e-9))
    return unit / pieces


def _worker_count(requested):
    cap = os.environ.get("SCENERY_THREADS")
    cap = int(cap) if cap else (os.cpu_count() or 1)
    if cap < 1:
        raise ConfigError("SCENERY_THREADS must be a positive integer")
    return min(requested or cap, cap)


def _scenery_evaluator(config, path, n, replica):
    """Sample one scenery covering the path and return its evaluator."""
    seed = derive_seed(config.master_seed, "scenery", n, replica)
    if config.family == "poisson":
        pitch = max(config.shape.support_radius, 1e-12)
        box = bounding_box(path, pad=2.0 * pitch)
        widths = box[:, 1] - box[:, 0]
        if float(np.prod(widths)) > policy.POISSON_FULL_WINDOW_MAX:
            field = sample_poisson_field_near(config.shape, path.positions,
                                              seed)
        else:
            field = sample_poisson_field(config.shape, box, seed)
        return lambda xs: poisson_value(field, xs), "poisson"
    h = config.model.support_radius * policy.GRID_SPACING_FRACTION
    box = bounding_box(path, pad=2.0 * h)
    cells = float(np.prod(np.ceil((box[:, 1] - box[:, 0]) / h) + 1.0))
    if cells > policy.GRID_CELLS_SWITCH:
        field = sample_feature_field(config.model, config.feature_count, seed)
        return field, "gaussian-feature"
    field = sample_grid_field(config.model, box, h, seed)
    return field, "gaussian-grid"


def _cell_row(config, n, replica):
    """Compute one (n, replica) cell: trajectory values and suite inputs."""
    delta = step_for(config, n)
    horizon = float(n) * float(config.t_grid[-1])
    path = sample_path(config.dimension, horizon, delta,
                       seed=derive_seed(config.master_seed, "path", n, replica))
    evaluator, _ = _scenery_evaluator(config, path, n, replica)
    traj = functional.evaluate_functional(evaluator, path, n, config.t_grid,
                                          config.mode)
    row = list(traj.values)
    if "concentration" in config.suites:
        row.append(functional.conditional_variance(
            path, config.model, n, config.mode, t=float(config.t_grid[-1])))
    if "cross_term" in config.suites:
        row.append(functional.cross_window_sum(
            path, config.model, n, config.windows[0], config.windows[1],
            config.mode))
    return row


def _fmt(value):
    return f"{value:.17g}"


def _cells_header(config):
    cols = ["replica"] + [f"x@{_fmt(t)}" for t in config.t_grid]
    if "concentration" in config.suites:
        cols.append("vhat")
    if "cross_term" in config.suites:
        cols.append("cross")
    return ",".join(cols)


def _read_cells(path, header, repair=False):
    """Parse a cells file, enforcing the schema and replica-prefix order.

    With repair=True a malformed final line (an interrupted write) is
    dropped instead of raising, so a crashed run can resume.
    """
    with open(path, "r", encoding="utf-8") as handle:
        lines = handle.read().splitlines()
    if not lines or lines[0] != header:
        raise ValueError(f"cell file {path} does not match the configured "
                         f"schema; use a fresh output directory")
    width = header.count(",")
    rows = []
    for k, line in enumerate(lines[1:]):
        try:
            parts = line.split(",")
            if len(parts) != width + 1 or int(parts[0]) != k:
                raise ValueError
            rows.append([float(v) for v in parts[1:]])
        except ValueError:
            if repair and k == len(lines) - 2:
                break
            raise ValueError(f"cell file {path} is not a replica prefix")
    return rows


def _cells_dir(out, n):
    return Path(out) / f"n{n:08d}"


def run_experiment(config, out_dir=None, workers=None):
    """Execute every (n, replica) cell, persist artifacts, run the suites.

    Completed cells found on disk are kept and skipped; the config must
    match the one stored in the output directory exactly.
    """
    out = Path(out_dir or config.out_dir or "")
    if str(out) in ("", "."):
        raise ConfigError("an output directory is required (config out_dir "
                          "or the out_dir argument)")
    out.mkdir(parents=True, exist_ok=True)
    stored = out / "config.json"
    text = json.dumps(config.payload, indent=2, sort_keys=True) + "\n"
    if stored.exists():
        if json.loads(stored.read_text(encoding="utf-8")) != config.payload:
            raise ConfigError(f"output directory {out} holds a different "
                              f"experiment; use a fresh directory")
    else:
        stored.write_text(text, encoding="utf-8")

    header = _cells_header(config)
    workers = _worker_count(workers)
    data = {}
    for n in config.n_ladder:
        folder = _cells_dir(out, n)
        folder.mkdir(parents=True, exist_ok=True)
        cells = folder / "cells.csv"
        done = _read_cells(cells, header, repair=True) if cells.exists() else []
        if len(done) > config.replicas:
            raise ConfigError(f"{cells} holds more replicas than configured")
        body = [",".join([str(r)] + [_fmt(v) for v in row])
                for r, row in enumerate(done)]
        cells.write_text("\n".join([header] + body) + "\n", encoding="utf-8")
        todo = range(len(done), config.replicas)
        if todo:
            with open(cells, "a", encoding="utf-8") as sink:
                if workers <= 1:
                    produced = (_cell_row(config, n, r) for r in todo)
                else:
                    pool = ThreadPoolExecutor(max_workers=workers)
                    produced = pool.map(lambda r: _cell_row(config, n, r), todo)
                for r, row in zip(todo, produced):
                    sink.write(",".join([str(r)] + [_fmt(v) for v in row]))
                    sink.write("\n")
                    sink.flush()
                if workers > 1:
                    pool.shutdown()
        data[n] = np.asarray(_read_cells(cells, header))

    grid_len = config.t_grid.size
    for n in config.n_ladder:
        lines = ["replica,t,x"]
        for r in range(config.replicas):
            for j in range(grid_len):
                lines.append(f"{r},{_fmt(config.t_grid[j])},"
                             f"{_fmt(data[n][r, j])}")
        (_cells_dir(out, n) / "trajectories.csv").write_text(
            "\n".join(lines) + "\n", encoding="utf-8")

    oracle_rows = oracles.variance_table(
        config.model, config.n_ladder, float(config.t_grid[-1]),
        config.dimension, config.mode)
    lines = ["n,d,mode,value,tol"]
    for row in oracle_rows:
        lines.append(f"{row['n']},{row['d']},{row['mode']},"
                     f"{_fmt(row['value'])},{_fmt(row['tol'])}")
    (out / "oracles.csv").write_text("\n".join(lines) + "\n", encoding="utf-8")

    reports = run_suites(config, data)
    payload = json.dumps([r.to_dict() for r in reports], indent=2) + "\n"
    (out / "reports.json").write_text(payload, encoding="utf-8")
    exit_code = int(any(r.gated and not r.passed for r in reports))
    (out / "summary.md").write_text(_summary_text(config, oracle_rows, reports),
                                    encoding="utf-8")
    return RunResult(out_dir=out, reports=tuple(reports),
                     oracle_rows=tuple(oracle_rows), exit_code=exit_code)


def _with_metadata(report, **extra):
    return dataclasses.replace(report,
                               metadata={**report.metadata, **extra})


def _increment_windows(probe):
    times = [0.0] + [float(t) for t in probe.times]
    return list(zip(times[:-1], times[1:]))


def _probe_variance_oracle(config, n):
    """Exact finite-n variance of the probe combination."""
    wins = _increment_windows(config.probe)
    weights = config.probe.weights
    total = 0.0
    for i, win_i in enumerate(wins):
        for j, win_j in enumerate(wins):
            total += weights[i] * weights[j] * oracles.window_covariance(
                config.model, n, win_i, win_j, config.dimension, config.mode)
    return total


def _gaussian_cf(variance):
    return lambda theta: np.exp(-0.5 * np.asarray(theta, dtype=float)**2
                                * variance)


def _mixture_cf(config, n):
    """Finite-n-corrected mixture characteristic function for d=1."""
    first, _, _, _ = oracles.probe_energy_moments(
        config.probe, config.oracle_replicas,
        derive_seed(config.master_seed, "cf-oracle"))
    limit_var = config.model.r_hat_zero * first
    ratio = _probe_variance_oracle(config, n) / limit_var
    scale = math.sqrt(ratio)

    def target(theta):
        values, _ = oracles.limit_cf_d1(
            config.model, np.asarray(theta, dtype=float) * scale, config.probe,
            config.oracle_replicas,
            derive_seed(config.master_seed, "cf-oracle"))
        return values

    return target, ratio


def run_suites(config, data):
    """Run the configured suites and negative controls over parsed cells."""
    top = max(config.n_ladder)
    final = data[top][:, config.t_grid.size - 1]
    col = config.t_grid.size
    mixture = config.dimension == 1 and config.mode == "nondegenerate"
    reports = []

    if "variance" in config.suites:
        oracle = oracles.finite_n_variance(config.model, top,
                                           float(config.t_grid[-1]),
                                           config.dimension, config.mode)
        reports.append(_with_metadata(stats.variance_test(final, oracle),
                                      n=top))
    if "ecf" in config.suites:
        samples = config.probe.evaluate(config.t_grid, data[top][:, :col])
        if mixture:
            target, ratio = _mixture_cf(config, top)
            report = stats.ecf_test(samples, target)
            report = _with_metadata(report, n=top, target_kind="mixture",
                                    variance_ratio=ratio)
        else:
            variance = _probe_variance_oracle(config, top)
            report = stats.ecf_test(samples, _gaussian_cf(variance))
            report = _with_metadata(report, n=top, target_kind="gaussian",
                                    probe_variance=variance)
        reports.append(report)
    if "normality" in config.suites:
        oracle = oracles.finite_n_variance(config.model, top,
                                           float(config.t_grid[-1]),
                                           config.dimension, config.mode)
        reports.append(_with_metadata(stats.normality_test(final, oracle),
                                      n=top))
    if "kurtosis" in config.suites:
        if mixture:
            f, s, se_f, se_s = oracles.local_time_energy_moments(
                float(config.t_grid[-1]), config.oracle_replicas,
                derive_seed(config.master_seed, "kurt-oracle"))
            ratio = 3.0 * s / f**2 - 3.0
            ratio_se = math.hypot(3.0 * se_s / f**2, 6.0 * s * se_f / f**3)
            report = stats.kurtosis_test(final, "mixture_limit", target=ratio,
                                         target_se=ratio_se)
        else:
            report = stats.kurtosis_test(final, "gaussian_limit")
        reports.append(_with_metadata(report, n=top))
    if "cross_term" in config.suites:
        ladder = [(n, data[n][:, -1]) for n in config.n_ladder]
        reports.append(_with_metadata(
            stats.cross_term_test(ladder, config.dimension),
            windows=[list(w) for w in config.windows]))
    if "moment_scaling" in config.suites:
        if mixture:
            beta, target = 2.0, 1.5
        else:
            beta, target = 4.0, 2.0
        reports.append(_with_metadata(
            stats.moment_scaling_test(config.t_grid, data[top][:, :col],
                                      beta, target), n=top))
    if "concentration" in config.suites:
        ladder = [(n, data[n][:, col]) for n in config.n_ladder]
        reports.append(stats.concentration_test(ladder, config.dimension))

    for name in config.negative_controls:
        if name == "mis_scaled_variance":
            factor = functional.scaling_factor(
                top, config.dimension, config.mode) / math.sqrt(top)
            oracle = oracles.finite_n_variance(config.model, top,
                                               float(config.t_grid[-1]),
                                               config.dimension, config.mode)
            report = stats.variance_test(final * factor, oracle,
                                         name="variance_test_mis_scaled")
        elif name == "gaussian_cf_d1":
            samples = config.probe.evaluate(config.t_grid, data[top][:, :col])
            variance = _probe_variance_oracle(config, top)
            report = stats.ecf_test(samples, _gaussian_cf(variance),
                                    name="ecf_test_gaussian_target")
        else:
            oracle = oracles.finite_n_variance(config.model, top,
                                               float(config.t_grid[-1]),
                                               config.dimension, config.mode)
            report = stats.normality_test(final, oracle,
                                          name="normality_test_d1")
        reports.append(_with_metadata(report, n=top, negative_control=True))
    return reports


def _summary_text(config, oracle_rows, reports):
    lines = ["# Scenery experiment summary", ""]
    lines.append(f"- dimension: {config.dimension}")
    lines.append(f"- mode: {config.mode}")
    kind = config.model.kind if config.family == "gaussian" else "shot noise"
    lines.append(f"- potential: {config.family} ({kind})")
    lines.append(f"- n ladder: {list(config.n_ladder)}")
    lines.append(f"- replicas: {config.replicas}")
    lines.append(f"- master seed: {config.master_seed}")
    lines.append("")
    lines.append("## Oracle variance ladder")
    lines.append("")
    lines.append("| n | value | tol |")
    lines.append("| --- | --- | --- |")
    for row in oracle_rows:
        lines.append(f"| {row['n']} | {row['value']:.6g} | {row['tol']:.2g} |")
    lines.append("")
    lines.append("## Suite verdicts")
    lines.append("")
    lines.append("| test | statistic | target | spread | verdict |")
    lines.append("| --- | --- | --- | --- | --- |")
    for rep in reports:
        target = "-" if rep.target is None else f"{rep.target:.6g}"
        spread = (f"p={rep.p_value:.3g}" if rep.p_value is not None
                  else ("-" if rep.se is None else f"{rep.se:.3g}"))
        verdict = "pass" if rep.passed else "FAIL"
        if not rep.gated:
            verdict += " (advisory)"
        lines.append(f"| {rep.name} | {rep.statistic:.6g} | {target} "
                     f"| {spread} | {verdict} |")
    lines.append("")
    failed = [r.name for r in reports if r.gated and not r.passed]
    lines.append("Gated failures: " + (", ".join(failed) if failed else "none"))
    lines.append("")
    return "\n".join(lines)


def report(out_dir):
    """Summarize a persisted run: (summary text, exit code)."""
    out = Path(out_dir)
    reports_file = out / "reports.json"
    summary_file = out / "summary.md"
    if not reports_file.exists() or not summary_file.exists():
        raise FileNotFoundError(f"{out} does not hold a completed run "
                                f"(missing reports.json or summary.md)")
    entries = json.loads(reports_file.read_text(encoding="utf-8"))
    exit_code = int(any(e["gated"] and not e["passed"] for e in entries))
    return summary_file.read_text(encoding="utf-8"), exit_code
