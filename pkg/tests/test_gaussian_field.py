"""Grid and feature samplers against their covariance model."""

import math

import numpy as np
import pytest

from scenery import gaussian_field as gf
from scenery import spectra


def triangular_1d():
    return spectra.build_gaussian_model({"kind": "triangular", "dim": 1,
                                         "scale": 1.0, "variance": 1.0})


def triangular_2d():
    return spectra.build_gaussian_model({"kind": "triangular", "dim": 2,
                                         "scale": 1.2, "variance": 0.8})


def test_grid_field_is_deterministic():
    model = triangular_1d()
    a = gf.sample_grid_field(model, [-2.0, 2.0], 1.0 / 16.0, seed=5)
    b = gf.sample_grid_field(model, [-2.0, 2.0], 1.0 / 16.0, seed=5)
    c = gf.sample_grid_field(model, [-2.0, 2.0], 1.0 / 16.0, seed=6)
    assert np.array_equal(a.values, b.values)
    assert not np.array_equal(a.values, c.values)
    assert a.clamped_mass < 1e-6


def test_grid_spacing_guard():
    model = triangular_1d()
    with pytest.raises(ValueError):
        gf.sample_grid_field(model, [-2.0, 2.0], model.support_radius / 4.0, seed=1)
    with pytest.raises(ValueError):
        gf.sample_grid_field(model, [-2.0, 2.0], -0.1, seed=1)


def test_grid_cell_guard_mentions_feature_sampler():
    model = triangular_2d()
    with pytest.raises(ValueError, match="feature"):
        gf.sample_grid_field(model, [[-4000.0, 4000.0], [-4000.0, 4000.0]],
                             model.support_radius / 8.0, seed=1)


def test_node_variance_and_two_point_statistics():
    model = triangular_1d()
    m = 10000
    h = 1.0 / 16.0
    lags = [0.25, 0.5, 1.0, 1.5]
    node = np.empty(m)
    pairs = np.empty((m, len(lags)))
    for r in range(m):
        fld = gf.sample_grid_field(model, [-2.0, 2.0], h, seed=r)
        node[r] = fld.values[32]
        for j, lag in enumerate(lags):
            pairs[r, j] = fld.values[32] * fld.values[32 + int(round(lag / h))]
    r0 = model.r_zero
    var = node.var(ddof=1)
    assert abs(var - r0) < 4.0 * r0 * math.sqrt(2.0 / (m - 1))
    for j, lag in enumerate(lags):
        want = float(model.evaluate(lag))
        se = pairs[:, j].std(ddof=1) / math.sqrt(m)
        assert abs(pairs[:, j].mean() - want) < 4.0 * se


def test_covariance_beyond_support_vanishes():
    model = triangular_1d()
    m, h = 10000, 1.0 / 16.0
    prods = np.empty(m)
    for r in range(m):
        fld = gf.sample_grid_field(model, [-2.0, 2.0], h, seed=60000 + r)
        prods[r] = fld.values[0] * fld.values[int(round(1.5 * model.support_radius / h))]
    se = prods.std(ddof=1) / math.sqrt(m)
    assert abs(prods.mean()) < 4.0 * se


def test_grid_field_2d_statistics():
    model = triangular_2d()
    m, h = 4000, model.support_radius / 10.0
    rng_lags = np.random.default_rng(3)
    lags = rng_lags.uniform(-1.0, 1.0, size=(4, 2))
    vals0 = np.empty(m)
    vals = np.empty((m, len(lags)))
    for r in range(m):
        fld = gf.sample_grid_field(model, [[-1.5, 1.5], [-1.5, 1.5]], h, seed=80000 + r)
        vals0[r] = fld.evaluate([0.0, 0.0])
        for j, lag in enumerate(lags):
            vals[r, j] = fld.evaluate(lag)
    for j, lag in enumerate(lags):
        want = float(model.evaluate(lag))
        got = np.mean(vals0 * vals[:, j])
        se = np.std(vals0 * vals[:, j], ddof=1) / math.sqrt(m)
        bias = 2.0 * model.r_zero * h
        assert abs(got - want) < 5.0 * se + bias


def test_interpolation_identities():
    model = triangular_1d()
    fld = gf.sample_grid_field(model, [-2.0, 2.0], 0.125, seed=11)
    i0 = int(round((0.0 - fld.origin[0]) / 0.125))
    node = fld.origin[0] + i0 * 0.125
    assert fld.evaluate(node) == pytest.approx(fld.values[i0], rel=1e-12)
    mid = node + 0.5 * 0.125
    assert fld.evaluate(mid) == pytest.approx(0.5 * (fld.values[i0] + fld.values[i0 + 1]),
                                              rel=1e-12)
    with pytest.raises(ValueError):
        fld.evaluate(fld.box[0, 1] + 1.0)
    assert gf.field_value(fld, 0.0) == fld.evaluate(0.0)


def test_interpolation_error_shrinks_with_h():
    model = triangular_1d()
    errs = []
    for h in [model.support_radius / 8.0, model.support_radius / 16.0,
              model.support_radius / 32.0]:
        diffs = []
        for r in range(200):
            fld = gf.sample_grid_field(model, [-1.0, 1.0], h, seed=90000 + r)
            i0 = int(round((0.0 - fld.origin[0]) / h))
            x = fld.origin[0] + (i0 + 0.5) * h
            diffs.append(abs(fld.evaluate(x) - fld.values[i0]))
        errs.append(np.mean(diffs))
    assert errs[2] < errs[1] < errs[0]


def test_feature_field_determinism_and_mean():
    model = triangular_2d()
    a = gf.sample_feature_field(model, 128, seed=21)
    b = gf.sample_feature_field(model, 128, seed=21)
    c = gf.sample_feature_field(model, 128, seed=22)
    assert np.array_equal(a.frequencies, b.frequencies)
    assert np.array_equal(a.phases, b.phases)
    assert not np.array_equal(a.phases, c.phases)
    m = 100000
    x = np.array([0.3, -0.7])
    vals = np.empty(m)
    for r in range(m):
        fld = gf.sample_feature_field(model, 64, seed=r)
        vals[r] = fld.evaluate(x)
    se = vals.std(ddof=1) / math.sqrt(m)
    assert abs(vals.mean()) < 4.0 * se


def test_feature_field_covariance():
    model = triangular_2d()
    m = 4000
    lag = np.array([0.5, -0.3])
    v0 = np.empty(m)
    v1 = np.empty(m)
    for r in range(m):
        fld = gf.sample_feature_field(model, 4096, seed=300000 + r)
        v0[r] = fld.evaluate([0.0, 0.0])
        v1[r] = fld.evaluate(lag)
    prod = v0 * v1
    se = prod.std(ddof=1) / math.sqrt(m)
    assert prod.mean() == pytest.approx(float(model.evaluate(lag)), abs=4.0 * se)
    sq = v0 * v0
    se0 = sq.std(ddof=1) / math.sqrt(m)
    assert sq.mean() == pytest.approx(model.r_zero, abs=4.0 * se0)


def test_feature_frequencies_follow_the_spectrum():
    model = triangular_1d()
    fld = gf.sample_feature_field(model, 200000, seed=77)
    for x in (0.3, 0.9, 1.7):
        want = float(model.evaluate(x)) / model.r_zero
        got = np.mean(np.cos(fld.frequencies[:, 0] * x))
        assert abs(got - want) < 0.01


def test_feature_field_rejects_bad_input():
    model = triangular_2d()
    with pytest.raises(ValueError):
        gf.sample_feature_field(model, 32, seed=1)
    shape = spectra.build_shape({"dim": 1, "scale": 1.0,
                                 "atoms": [{"weight": 1.0, "center": [0.0]},
                                           {"weight": -1.0, "center": [2.0]}]})
    degenerate = spectra.shot_noise_model(shape)
    with pytest.raises(spectra.ModelError):
        gf.sample_feature_field(degenerate, 128, seed=1)


def test_field_csv_and_diagnostics(tmp_path):
    model = triangular_1d()
    fld = gf.sample_grid_field(model, [-1.0, 1.0], 0.125, seed=2)
    out = tmp_path / "field.csv"
    gf.field_to_csv(fld, out)
    rows = out.read_text().strip().splitlines()
    assert rows[0] == "x0,value"
    assert len(rows) == fld.values.size + 1
    diag = gf.field_diagnostics(fld)
    assert diag["clamped_mass"] < 1e-6
    assert diag["grid_shape"] == [fld.values.size]
