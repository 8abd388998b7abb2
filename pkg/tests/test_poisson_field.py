"""Poisson shot-noise samplers and hash evaluation."""

import math

import numpy as np
import pytest
from scipy import stats

from scenery import poisson_field as pf
from scenery import spectra


def unit_tent_shape(dim):
    return spectra.build_shape({"dim": dim, "scale": 1.0,
                                "atoms": [{"weight": 1.0, "center": [0.0] * dim}]})


def tent_difference_shape(dim, offset=2.0):
    minus = [0.0] * dim
    minus[0] = offset
    return spectra.build_shape({"dim": dim, "scale": 1.0,
                                "atoms": [{"weight": 1.0, "center": [0.0] * dim},
                                          {"weight": -1.0, "center": minus}]})


def test_full_sampler_determinism_and_guard():
    shape = unit_tent_shape(2)
    a = pf.sample_poisson_field(shape, [[0.0, 10.0], [0.0, 10.0]], seed=4)
    b = pf.sample_poisson_field(shape, [[0.0, 10.0], [0.0, 10.0]], seed=4)
    c = pf.sample_poisson_field(shape, [[0.0, 10.0], [0.0, 10.0]], seed=5)
    assert np.array_equal(a.points, b.points)
    assert not np.array_equal(a.points, c.points)
    with pytest.raises(ValueError):
        pf.sample_poisson_field(shape, [[0.0, 2e5], [0.0, 2e5]], seed=1)


def test_count_moments_match_poisson():
    shape = unit_tent_shape(2)
    m = 10000
    counts = np.array([pf.sample_poisson_field(shape, [[0.0, 10.0], [0.0, 10.0]],
                                               seed=r).count for r in range(m)],
                      dtype=float)
    lam = 100.0
    assert abs(counts.mean() - lam) < 4.0 * math.sqrt(lam / m)
    mu4 = lam * (1.0 + 3.0 * lam)
    se_var = math.sqrt((mu4 - lam**2 * (m - 3) / (m - 1)) / m)
    assert abs(counts.var(ddof=1) - lam) < 4.0 * se_var


def test_complete_spatial_randomness():
    shape = unit_tent_shape(2)
    cells = 4
    stat = 0.0
    dof = 0
    for r in range(200):
        fld = pf.sample_poisson_field(shape, [[0.0, 12.0], [0.0, 12.0]],
                                      seed=30000 + r)
        if fld.count == 0:
            continue
        idx = np.floor(fld.points / (12.0 / cells)).astype(int)
        idx = np.clip(idx, 0, cells - 1)
        counts = np.zeros((cells, cells))
        np.add.at(counts, (idx[:, 0], idx[:, 1]), 1.0)
        expect = fld.count / cells**2
        stat += float(np.sum((counts - expect) ** 2 / expect))
        dof += cells**2 - 1
    assert stats.chi2.sf(stat, dof) > 0.01


def test_value_mean_and_variance():
    shape = unit_tent_shape(1)
    m = 100000
    vals = np.empty(m)
    for r in range(m):
        fld = pf.sample_poisson_field(shape, [-4.0, 4.0], seed=100000 + r)
        vals[r] = pf.poisson_value(fld, 0.3)
    se = vals.std(ddof=1) / math.sqrt(m)
    assert abs(vals.mean()) < 4.0 * se
    model = spectra.shot_noise_model(shape)
    want = model.r_zero
    sq = vals**2
    assert abs(sq.mean() - want) < 4.0 * sq.std(ddof=1) / math.sqrt(m)


def test_covariance_matches_model_within_support():
    shape = tent_difference_shape(1)
    model = spectra.shot_noise_model(shape)
    m = 10000
    lags = np.array([0.3, 0.9, 1.6, 2.4, 3.1])
    v0 = np.empty(m)
    vlag = np.empty((m, lags.size))
    for r in range(m):
        fld = pf.sample_poisson_field(shape, [-6.0, 10.0], seed=200000 + r)
        v0[r] = pf.poisson_value(fld, 0.0)
        vlag[r] = pf.poisson_value(fld, lags)
    for j, lag in enumerate(lags):
        prods = v0 * vlag[:, j]
        want = float(model.evaluate(lag))
        se = prods.std(ddof=1) / math.sqrt(m)
        assert abs(prods.mean() - want) < 4.0 * se


def test_covariance_beyond_support_vanishes():
    shape = unit_tent_shape(2)
    m = 10000
    prods = np.empty(m)
    for r in range(m):
        fld = pf.sample_poisson_field(shape, [[-8.0, 8.0], [-8.0, 8.0]],
                                      seed=300000 + r)
        prods[r] = (pf.poisson_value(fld, [0.0, 0.0])
                    * pf.poisson_value(fld, [5.0, 0.0]))
    se = prods.std(ddof=1) / math.sqrt(m)
    assert abs(prods.mean()) < 4.0 * se


def test_hash_matches_bruteforce():
    shape = tent_difference_shape(2)
    rng = np.random.default_rng(9)
    for r in range(20):
        fld = pf.sample_poisson_field(shape, [[-6.0, 6.0], [-6.0, 6.0]],
                                      seed=400000 + r)
        xs = rng.uniform(-2.0, 2.0, size=(10, 2))
        got = pf.poisson_value(fld, xs)
        want = np.array([float(np.sum(shape.evaluate(x - fld.points))) - shape.c_p
                         for x in xs])
        np.testing.assert_allclose(got, want, rtol=1e-11, atol=1e-12)


def test_out_of_region_evaluation_fails():
    shape = unit_tent_shape(1)
    fld = pf.sample_poisson_field(shape, [-4.0, 4.0], seed=7)
    with pytest.raises(ValueError):
        pf.poisson_value(fld, 3.5)


def test_near_sampler_is_exact_for_anchor_evaluations():
    shape = unit_tent_shape(3)
    rng = np.random.default_rng(13)
    anchors = rng.uniform(-5.0, 5.0, size=(50, 3))
    fld = pf.sample_poisson_field_near(shape, anchors, seed=21)
    got = pf.poisson_value(fld, anchors)
    want = np.array([float(np.sum(shape.evaluate(a - fld.points))) - shape.c_p
                     for a in anchors])
    np.testing.assert_allclose(got, want, rtol=1e-11, atol=1e-12)
    again = pf.sample_poisson_field_near(shape, anchors, seed=21)
    assert np.array_equal(fld.points, again.points)


def test_near_sampler_matches_poisson_counts():
    shape = unit_tent_shape(2)
    anchors = np.array([[0.0, 0.0]])
    m = 4000
    counts = np.array([pf.sample_poisson_field_near(shape, anchors, seed=r).count
                       for r in range(m)], dtype=float)
    lam = 9.0 * pf._kernels.shape_axis_support(shape) ** 2
    assert abs(counts.mean() - lam) < 4.0 * math.sqrt(lam / m)


def test_near_sampler_value_moments():
    shape = unit_tent_shape(2)
    model = spectra.shot_noise_model(shape)
    anchors = np.array([[0.0, 0.0], [1.0, 0.5]])
    m = 20000
    vals = np.empty((m, 2))
    for r in range(m):
        fld = pf.sample_poisson_field_near(shape, anchors, seed=500000 + r)
        vals[r] = pf.poisson_value(fld, anchors)
    for j in range(2):
        se = vals[:, j].std(ddof=1) / math.sqrt(m)
        assert abs(vals[:, j].mean()) < 4.0 * se
    prods = vals[:, 0] * vals[:, 1]
    want = float(model.evaluate(anchors[1] - anchors[0]))
    se = prods.std(ddof=1) / math.sqrt(m)
    assert abs(prods.mean() - want) < 4.0 * se


def test_near_sampler_region_guard():
    shape = unit_tent_shape(2)
    fld = pf.sample_poisson_field_near(shape, np.array([[0.0, 0.0]]), seed=3)
    with pytest.raises(ValueError):
        pf.poisson_value(fld, [10.0, 0.0])


def test_points_csv(tmp_path):
    shape = unit_tent_shape(2)
    fld = pf.sample_poisson_field(shape, [[0.0, 5.0], [0.0, 5.0]], seed=2)
    out = tmp_path / "points.csv"
    pf.points_to_csv(fld, out)
    rows = out.read_text().strip().splitlines()
    assert rows[0] == "x0,x1"
    assert len(rows) == fld.count + 1
    diag = pf.poisson_diagnostics(fld)
    assert diag["count"] == fld.count
    assert not diag["restricted"]
