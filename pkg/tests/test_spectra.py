"""Covariance model, spectrum, and limit-constant tests."""

import math

import numpy as np
import pytest
from scipy import integrate

from scenery import spectra


def unit_tent_shape(dim=1):
    return spectra.build_shape({
        "kind": "tent", "dim": dim, "scale": 1.0,
        "atoms": [{"weight": 1.0, "center": [0.0] * dim}],
    })


def tent_difference_shape(dim, offset=2.0):
    center = [0.0] * dim
    shifted = [0.0] * dim
    shifted[0] = offset
    return spectra.build_shape({
        "kind": "tent", "dim": dim, "scale": 1.0,
        "atoms": [{"weight": 1.0, "center": center}, {"weight": -1.0, "center": shifted}],
    })


def chopped_cosine_spec():
    x = np.linspace(-4.0, 4.0, 257)
    return {"kind": "tabulated", "dim": 1, "x": x, "values": np.cos(3.5 * x)}


# --- factors -----------------------------------------------------------------

def test_tent_factor_moments_match_quadrature():
    rng = np.random.Generator(np.random.PCG64(10))
    for _ in range(4):
        w = float(rng.uniform(0.3, 2.5))
        f = spectra.TentFactor(w)
        for u in (1e-4, 0.2, 3.0, 80.0):
            ref, _ = integrate.quad(lambda x: f.evaluate(x) * math.exp(-u * x * x),
                                    -w, w, points=[0.0], epsrel=1e-12)
            assert f.real_moment(u) == pytest.approx(ref, rel=1e-10)
            ref_s, _ = integrate.quad(lambda xi: f.spectrum(xi) * math.exp(-u * xi * xi),
                                      0.0, np.inf, limit=600)
            assert f.spec_moment(u) == pytest.approx(2.0 * ref_s, rel=1e-8)


def test_spline_factor_matches_tent_autocorrelation():
    s = 0.7
    f = spectra.CubicSplineFactor(s, 0.0)
    tent = spectra.TentFactor(s)
    for x in np.linspace(-1.5 * s, 2.1 * s, 9):
        ref, _ = integrate.quad(lambda y: tent.evaluate(y) * tent.evaluate(y + x), -s, s,
                                points=[0.0], epsrel=1e-11)
        assert s * f.evaluate(x) == pytest.approx(ref, rel=1e-9, abs=1e-10)


def test_spline_factor_moments_and_parseval():
    f = spectra.CubicSplineFactor(0.8, 1.7)
    for u in (1e-3, 0.5, 7.0, 2e3):
        ref, _ = integrate.quad(lambda x: f.evaluate(x) * math.exp(-u * x * x),
                                0.1, 3.3, points=f.breakpoints()[1:-1], epsrel=1e-12)
        assert f.real_moment(u) == pytest.approx(ref, rel=1e-9, abs=1e-15)
        parseval = math.sqrt(math.pi / u) * f.real_moment(0.25 / u)
        assert f.spec_moment(u) == pytest.approx(parseval, rel=1e-8, abs=1e-14)


def test_spline_spectrum_is_shifted_quartic_sinc():
    f = spectra.CubicSplineFactor(1.0, 2.0)
    xi = np.linspace(-9.0, 9.0, 31)
    ref = np.cos(2.0 * xi) * np.sinc(xi / (2.0 * np.pi)) ** 4
    np.testing.assert_allclose(f.spectrum(xi), ref, rtol=1e-12, atol=1e-15)


def test_gaussian_factor_closed_forms():
    f = spectra.GaussianFactor(0.6)
    for u in (0.05, 1.0, 30.0):
        ref, _ = integrate.quad(lambda x: f.evaluate(x) * math.exp(-u * x * x),
                                -np.inf, np.inf)
        assert f.real_moment(u) == pytest.approx(ref, rel=1e-10)
        ref_s, _ = integrate.quad(lambda xi: f.spectrum(xi) * math.exp(-u * xi * xi),
                                  -np.inf, np.inf)
        assert f.spec_moment(u) == pytest.approx(ref_s, rel=1e-10)


def test_tabulated_factor_is_its_own_interpolant():
    x = np.linspace(-2.0, 2.0, 129)
    vals = np.clip(1.0 - np.abs(x) / 2.0, 0.0, None) ** 2
    vals = (vals + vals[::-1]) / 2.0
    f = spectra.TabulatedFactor(x, vals)
    probe = np.linspace(-2.5, 2.5, 41)
    np.testing.assert_allclose(f.evaluate(probe), np.interp(probe, f.x, f.values), atol=0.0)
    for u in (0.1, 2.0):
        ref, _ = integrate.quad(lambda t: f.evaluate(t) * math.exp(-u * t * t),
                                -2.0, 2.0, limit=400)
        assert f.real_moment(u) == pytest.approx(ref, rel=1e-7)


# --- gaussian model builders --------------------------------------------------

def test_triangular_examples():
    m1 = spectra.build_gaussian_model({"kind": "triangular", "dim": 1, "variance": 1.0})
    assert m1.r_hat_zero == pytest.approx(1.0, rel=1e-12)
    assert m1.support_radius == pytest.approx(1.0)
    m2 = spectra.build_gaussian_model({"kind": "triangular", "dim": 2, "variance": 1.0})
    assert m2.r_hat_zero == pytest.approx(1.0, rel=1e-12)


def test_power_spectrum_triangular_values():
    m1 = spectra.build_gaussian_model({"kind": "triangular", "dim": 1})
    assert spectra.power_spectrum(m1, 0.0) == pytest.approx(1.0, rel=1e-12)
    assert spectra.power_spectrum(m1, 2.0 * math.pi) == pytest.approx(0.0, abs=1e-20)
    rng = np.random.Generator(np.random.PCG64(3))
    xi = rng.uniform(-20, 20, size=17)
    np.testing.assert_allclose(spectra.power_spectrum(m1, xi),
                               spectra.power_spectrum(m1, -xi), rtol=0.0, atol=1e-15)


def test_model_even_symmetry_and_support():
    shapes = [
        spectra.build_gaussian_model({"kind": "triangular", "dim": 2}),
        spectra.build_gaussian_model({"kind": "gauss_bump", "dim": 3, "length": 0.5}),
        spectra.shot_noise_model(tent_difference_shape(2)),
    ]
    rng = np.random.Generator(np.random.PCG64(4))
    for model in shapes:
        pts = rng.uniform(-model.support_radius, model.support_radius, size=(64, model.dim))
        np.testing.assert_allclose(model.evaluate(pts), model.evaluate(-pts),
                                   rtol=1e-12, atol=1e-14)
        far = rng.normal(size=(32, model.dim))
        far /= np.linalg.norm(far, axis=1, keepdims=True)
        far *= model.support_radius * rng.uniform(1.001, 3.0, size=(32, 1))
        np.testing.assert_allclose(model.evaluate(far), 0.0, atol=1e-14)


def test_bump_rejections_and_tabulated_validation():
    with pytest.raises(spectra.ModelError):
        spectra.build_gaussian_model({"kind": "nonsense", "dim": 1})
    with pytest.raises(spectra.ModelError):
        spectra.build_gaussian_model({"kind": "triangular", "dim": 0})
    with pytest.raises(spectra.ModelError):
        spectra.build_gaussian_model({"kind": "tabulated", "dim": 2,
                                      "x": [-1, 0, 1], "values": [0, 1, 0]})
    x = np.array([-2.0, -1.0, 0.5, 2.0])
    with pytest.raises(spectra.ModelError):
        spectra.build_gaussian_model({"kind": "tabulated", "dim": 1,
                                      "x": x, "values": np.zeros(4)})


def test_bochner_rejection_of_oscillating_table():
    with pytest.raises(spectra.BochnerError):
        spectra.build_gaussian_model(chopped_cosine_spec())
    bad = spectra.build_gaussian_model(chopped_cosine_spec(), validate=False)
    report = spectra.check_bochner(bad)
    assert not report.passed
    assert report.min_value < -0.1
    with pytest.raises(spectra.BochnerError):
        spectra.power_spectrum(bad, 2.4)


def test_check_bochner_passes_shipped_models():
    for model in (
        spectra.build_gaussian_model({"kind": "triangular", "dim": 1}),
        spectra.build_gaussian_model({"kind": "gauss_bump", "dim": 3, "length": 0.4}),
        spectra.shot_noise_model(unit_tent_shape(2)),
    ):
        report = spectra.check_bochner(model)
        assert report.passed
        assert report.min_value >= -report.tolerance


# --- shot noise ---------------------------------------------------------------

def test_shot_noise_unit_tent_values():
    shape = unit_tent_shape(1)
    model = spectra.shot_noise_model(shape)
    assert shape.c_p == pytest.approx(1.0)
    assert model.evaluate(0.0) == pytest.approx(2.0 / 3.0, rel=1e-12)
    assert model.r_hat_zero == pytest.approx(1.0, rel=1e-12)
    assert model.support_radius == pytest.approx(2.0)
    assert not model.degenerate


def test_shot_noise_covariance_matches_direct_convolution():
    shape = tent_difference_shape(1)
    model = spectra.shot_noise_model(shape)
    for lag in np.linspace(-4.0, 4.0, 17):
        ref, _ = integrate.quad(lambda y: shape.evaluate(y) * shape.evaluate(y + lag),
                                -1.0, 3.0, limit=300)
        assert model.evaluate(lag) == pytest.approx(ref, abs=1e-9)


def test_shot_noise_spectrum_is_shape_transform_squared():
    shape = tent_difference_shape(1)
    model = spectra.shot_noise_model(shape)
    for xi in np.linspace(0.15, 6.0, 9):
        re, _ = integrate.quad(lambda y: shape.evaluate(y) * math.cos(xi * y), -1.0, 3.0, limit=300)
        im, _ = integrate.quad(lambda y: shape.evaluate(y) * math.sin(xi * y), -1.0, 3.0, limit=300)
        ref = re * re + im * im
        got = spectra.power_spectrum(model, xi)
        assert got == pytest.approx(ref, rel=1e-4, abs=1e-9)


def test_zero_shape_gives_zero_model():
    shape = spectra.build_shape({"kind": "tent", "dim": 1, "scale": 1.0,
                                 "atoms": [{"weight": 0.0, "center": [0.0]}]})
    model = spectra.shot_noise_model(shape)
    assert model.degenerate
    assert model.evaluate(0.3) == 0.0
    assert model.r_hat_zero == 0.0


def test_shape_constraints():
    with pytest.raises(spectra.ModelError):
        spectra.build_shape({"kind": "tent", "dim": 2, "scale": 1.0,
                             "atoms": [{"weight": 1.0, "center": [0.0, 0.0]},
                                       {"weight": -1.0, "center": [1.0, 1.0]}]})
    shape = tent_difference_shape(2)
    assert shape.c_p == pytest.approx(0.0, abs=1e-15)
    grid = np.linspace(-3.5, 5.5, 361)
    xx, yy = np.meshgrid(grid, grid, indexing="ij")
    pts = np.stack([xx, yy], axis=-1)
    quad_mass = np.trapezoid(np.trapezoid(shape.evaluate(pts), grid, axis=1), grid)
    assert quad_mass == pytest.approx(shape.c_p, abs=1e-9)


# --- sigma --------------------------------------------------------------------

def test_sigma_low_dimensions():
    m1 = spectra.build_gaussian_model({"kind": "triangular", "dim": 1})
    assert spectra.sigma_limit(m1, 1, "nondegenerate") == pytest.approx(1.0, rel=1e-12)
    m2pi = spectra.build_gaussian_model({"kind": "triangular", "dim": 2, "variance": math.pi})
    assert spectra.sigma_limit(m2pi, 2, "nondegenerate") == pytest.approx(1.0, rel=1e-12)


def test_sigma_dual_routes_bump_closed_form():
    for d, closed in ((3, lambda v, l: 2.0 * l * math.sqrt(v)),
                      (4, lambda v, l: l * math.sqrt(2.0 * v))):
        v, length = 1.7, 0.45
        model = spectra.build_gaussian_model(
            {"kind": "gauss_bump", "dim": d, "variance": v, "length": length})
        s_spec, s_real = spectra.sigma_routes(model)
        assert abs(s_spec - s_real) <= 1e-6 * s_spec
        assert s_spec == pytest.approx(closed(v, length), rel=1e-8)
        assert spectra.sigma_limit(model, d, "nondegenerate") == pytest.approx(s_spec)


def test_sigma_dual_routes_triangular_and_shot_d3():
    tri = spectra.build_gaussian_model({"kind": "triangular", "dim": 3, "variance": 2.0})
    s_spec, s_real = spectra.sigma_routes(tri)
    assert abs(s_spec - s_real) <= 1e-6 * s_spec
    shot = spectra.shot_noise_model(unit_tent_shape(3))
    s_spec, s_real = spectra.sigma_routes(shot)
    assert abs(s_spec - s_real) <= 1e-6 * s_spec


def test_sigma_scaling_homogeneity():
    for d in (1, 2, 3):
        a = spectra.build_gaussian_model({"kind": "triangular", "dim": d, "variance": 1.0})
        b = spectra.build_gaussian_model({"kind": "triangular", "dim": d, "variance": 4.0})
        ra = spectra.sigma_limit(a, d, "nondegenerate")
        rb = spectra.sigma_limit(b, d, "nondegenerate")
        assert rb == pytest.approx(2.0 * ra, rel=1e-9)


def test_sigma_degenerate_matches_direct_quadrature():
    model = spectra.shot_noise_model(tent_difference_shape(1))
    sigma = spectra.sigma_limit(model, 1, "degenerate")

    def integrand(xi):
        return 2.0 * np.sinc(xi / (2 * np.pi)) ** 4 * 2.0 * (1.0 - np.cos(2.0 * xi)) / xi**2

    ref, _ = integrate.quad(integrand, 0.0, np.inf, limit=4000)
    assert sigma == pytest.approx(math.sqrt(4.0 / (2.0 * math.pi) * ref), rel=1e-6)


def test_sigma_degenerate_scaling():
    base = spectra.shot_noise_model(tent_difference_shape(2))
    doubled_shape = spectra.build_shape({
        "kind": "tent", "dim": 2, "scale": 1.0,
        "atoms": [{"weight": 2.0, "center": [0.0, 0.0]}, {"weight": -2.0, "center": [2.0, 0.0]}],
    })
    doubled = spectra.shot_noise_model(doubled_shape)
    sa = spectra.sigma_limit(base, 2, "degenerate")
    sb = spectra.sigma_limit(doubled, 2, "degenerate")
    assert sb == pytest.approx(2.0 * sa, rel=1e-8)


def test_sigma_mode_errors():
    deg = spectra.shot_noise_model(tent_difference_shape(1))
    nondeg = spectra.build_gaussian_model({"kind": "triangular", "dim": 1})
    with pytest.raises(spectra.SigmaError):
        spectra.sigma_limit(deg, 1, "nondegenerate")
    with pytest.raises(spectra.SigmaError):
        spectra.sigma_limit(nondeg, 1, "degenerate")
    with pytest.raises(spectra.SigmaError):
        spectra.sigma_limit(nondeg, 2, "nondegenerate")
    tri3 = spectra.build_gaussian_model({"kind": "triangular", "dim": 3})
    with pytest.raises(spectra.SigmaError):
        spectra.sigma_limit(tri3, 3, "degenerate")
    with pytest.raises(spectra.SigmaError):
        spectra.sigma_limit(nondeg, 1, "weird")


def test_sigma_degenerate_rejects_slow_spectrum():
    class SlowFactor:
        support_radius = 1.0

        def evaluate(self, x):
            return np.zeros_like(np.asarray(x, dtype=float))

        def spectrum(self, xi):
            return np.sqrt(np.abs(np.asarray(xi, dtype=float)))

        def spec_moment(self, u):
            raise AssertionError("should reject before integrating")

    model = spectra.CovarianceModel(
        dim=1, kind="mock", terms=(spectra.Term(1.0, (SlowFactor(),)),),
        support_radius=1.0, spectrum_kind="closed-form",
        r_hat_zero=0.0, degenerate=True,
    )
    with pytest.raises(spectra.SigmaError):
        spectra.sigma_limit(model, 1, "degenerate")


# --- misc ---------------------------------------------------------------------

def test_tabulated_csv_roundtrip(tmp_path):
    x = np.linspace(-1.0, 1.0, 201)
    vals = np.clip(1.0 - np.abs(x), 0.0, None)
    path = tmp_path / "cov.csv"
    np.savetxt(path, np.column_stack([x, vals]), delimiter=",")
    model = spectra.tabulated_from_csv(path)
    assert model.r_hat_zero == pytest.approx(1.0, rel=1e-9)
    assert model.evaluate(0.25) == pytest.approx(0.75, rel=1e-12)


def test_kernel_spec_layout():
    model = spectra.shot_noise_model(tent_difference_shape(2))
    spec = model.kernel_spec()
    assert spec.coefs.shape[0] == len(model.terms)
    assert spec.kinds.shape == (len(model.terms), 2)
    assert np.all(spec.kinds == spectra.KIND_SPLINE)
    tri = spectra.build_gaussian_model({"kind": "triangular", "dim": 1})
    assert np.all(tri.kernel_spec().kinds == spectra.KIND_TENT)


def test_heat_moment_matches_quadrature_d2():
    model = spectra.build_gaussian_model({"kind": "triangular", "dim": 2})
    for tau in (0.05, 0.7, 9.0):
        ref, _ = integrate.dblquad(
            lambda y, x: model.evaluate(np.array([x, y]))
            * math.exp(-(x * x + y * y) / (2.0 * tau)) / (2.0 * math.pi * tau),
            -1.0, 1.0, -1.0, 1.0, epsabs=1e-12)
        assert model.heat_moment(tau) == pytest.approx(ref, rel=1e-8)
