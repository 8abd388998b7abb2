"""Covariance models, power spectra, and limit-constant quadrature.

A covariance model is a sum of separable terms, each term a coefficient
times a product of one-dimensional factors.  Every factor knows its own
closed-form (or exactly integrable) Gaussian-weighted moments, which is
what the finite-horizon variance oracle and the limit-constant
quadratures are built from.  Real-space and spectral moments are derived
independently per factor so that agreement between the two limit-constant
routes is a genuine cross-check, not an identity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate, special

from . import policy

__all__ = [
    "BochnerError",
    "BochnerReport",
    "CovarianceModel",
    "CubicSplineFactor",
    "DualFormulaMismatch",
    "GaussianFactor",
    "KernelSpec",
    "ModelError",
    "ShapeFunction",
    "SigmaError",
    "TabulatedFactor",
    "TentFactor",
    "Term",
    "build_gaussian_model",
    "build_shape",
    "check_bochner",
    "power_spectrum",
    "shot_noise_model",
    "sigma_limit",
    "sigma_routes",
    "tabulated_from_csv",
]

KIND_TENT = 0
KIND_SPLINE = 1
KIND_GAUSS = 2
KIND_TABLE = 3


class ModelError(ValueError):
    """Rejected covariance or shape specification."""


class BochnerError(ModelError):
    """Spectrum dips below the declared negativity tolerance."""


class SigmaError(ValueError):
    """Invalid mode/dimension combination or non-integrable spectrum."""


class DualFormulaMismatch(ArithmeticError):
    """The two limit-constant formulas disagree beyond tolerance."""


def _sinc(z):
    return np.sinc(np.asarray(z) / np.pi)


def _power_gauss_integrals(a, b, u, kmax):
    """Integrals of x^k exp(-u x^2) over [a, b] for k = 0..kmax.

    a and b broadcast against each other; u is a positive scalar.
    Switches to a short Taylor expansion when u x^2 is tiny, where the
    erf difference would lose precision.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    xmax = np.maximum(np.abs(a), np.abs(b))
    out = []
    small = u * xmax * xmax < 1e-4
    if np.all(small):
        use_closed = False
    else:
        use_closed = True
        su = math.sqrt(u)
        ea = np.exp(-u * a * a)
        eb = np.exp(-u * b * b)
        i0 = 0.5 * math.sqrt(math.pi / u) * (special.erf(su * b) - special.erf(su * a))
        i1 = (ea - eb) / (2.0 * u)
        i2 = (a * ea - b * eb) / (2.0 * u) + i0 / (2.0 * u)
        i3 = 0.5 * ((a * a / u + 1.0 / u**2) * ea - (b * b / u + 1.0 / u**2) * eb)
        closed = [i0, i1, i2, i3]
    for k in range(kmax + 1):
        series = np.zeros(np.broadcast(a, b).shape)
        term_u = 1.0
        for m in range(6):
            p = k + 2 * m + 1
            series = series + term_u * (b**p - a**p) / p
            term_u *= -u / (m + 1)
        if use_closed:
            out.append(np.where(small, series, closed[k]))
        else:
            out.append(series)
    return out


class TentFactor:
    """Triangular factor max(0, 1 - |x|/width)."""

    def __init__(self, width=1.0):
        if width <= 0:
            raise ModelError("tent width must be positive")
        self.width = float(width)
        self.support_radius = float(width)

    def evaluate(self, x):
        return np.clip(1.0 - np.abs(np.asarray(x, dtype=float)) / self.width, 0.0, None)

    def spectrum(self, xi):
        return self.width * _sinc(self.width * np.asarray(xi, dtype=float) / 2.0) ** 2

    def real_moment(self, u):
        u = np.asarray(u, dtype=float)
        a = u * self.width**2
        return self.width * (
            np.sqrt(np.pi / a) * special.erf(np.sqrt(a)) + np.expm1(-a) / a
        )

    def spec_moment(self, u):
        u = np.asarray(u, dtype=float)
        c = self.width / (2.0 * np.sqrt(u))
        return 2.0 * np.pi * special.erf(c) + 2.0 * math.sqrt(np.pi) * np.expm1(-c * c) / c

    def heat_moment(self, tau):
        tau = np.asarray(tau, dtype=float)
        return self.real_moment(0.5 / tau) / np.sqrt(2.0 * np.pi * tau)

    def breakpoints(self):
        return [-self.width, 0.0, self.width]

    def kernel_params(self):
        return KIND_TENT, self.width, 0.0, None


_SPLINE_PIECES_Y = (
    ((-2.0, -1.0), (4.0 / 3.0, 2.0, 1.0, 1.0 / 6.0)),
    ((-1.0, 0.0), (2.0 / 3.0, 0.0, -1.0, -0.5)),
    ((0.0, 1.0), (2.0 / 3.0, 0.0, -1.0, 0.5)),
    ((1.0, 2.0), (4.0 / 3.0, -2.0, 1.0, -1.0 / 6.0)),
)


def _shift_poly(coeffs, scale, delta):
    """Coefficients in x of p((x - delta)/scale) given ascending coeffs of p(y)."""
    out = np.zeros(4)
    for j, cj in enumerate(coeffs):
        for k in range(j + 1):
            out[k] += cj * math.comb(j, k) * (-delta) ** (j - k) / scale**j
    return out


class CubicSplineFactor:
    """Cubic B-spline bump B((x - shift)/scale).

    B is the normalized cubic B-spline with support [-2, 2] and B(0)=2/3;
    it is the autocorrelation of the unit tent, so products of these
    factors are exactly the covariances of tent shot noise.
    """

    def __init__(self, scale=1.0, shift=0.0):
        if scale <= 0:
            raise ModelError("spline scale must be positive")
        self.scale = float(scale)
        self.shift = float(shift)
        self.support_radius = 2.0 * self.scale + abs(self.shift)
        self._pieces_x = []
        for (ylo, yhi), cy in _SPLINE_PIECES_Y:
            cx = _shift_poly(cy, self.scale, self.shift)
            self._pieces_x.append((self.shift + self.scale * ylo, self.shift + self.scale * yhi, cx))
        # cosine decomposition of cos(shift*xi) * sin^4(scale*xi/2):
        # coefficients and frequencies with vanishing 0th and 2nd moments
        s, d = self.scale, self.shift
        self._cos_c = np.array([3.0 / 8.0, -0.25, -0.25, 1.0 / 16.0, 1.0 / 16.0])
        self._cos_b = np.array([d, s - d, s + d, 2.0 * s - d, 2.0 * s + d])
        self._cos_m = np.array(
            [np.sum(self._cos_c * self._cos_b ** (2 * k)) for k in range(26)]
        )

    def evaluate(self, x):
        y = (np.asarray(x, dtype=float) - self.shift) / self.scale
        ay = np.abs(y)
        inner = 2.0 / 3.0 - ay * ay * (1.0 - 0.5 * ay)
        outer = (2.0 - ay) ** 3 / 6.0
        return np.where(ay <= 1.0, inner, np.where(ay < 2.0, outer, 0.0))

    def spectrum(self, xi):
        xi = np.asarray(xi, dtype=float)
        return self.scale * np.cos(self.shift * xi) * _sinc(self.scale * xi / 2.0) ** 4

    def real_moment(self, u):
        u = np.asarray(u, dtype=float)
        flat = np.atleast_1d(u)
        out = np.zeros(flat.shape)
        for i, ui in enumerate(flat):
            total = 0.0
            for lo, hi, cx in self._pieces_x:
                ints = _power_gauss_integrals(lo, hi, ui, 3)
                total += sum(cx[k] * ints[k] for k in range(4))
            out[i] = total
        return out.reshape(u.shape) if u.ndim else float(out[0])

    def _cos_sum(self, w):
        """sum_j c_j exp(-b_j^2 / (4 w)) with exact small-argument cancellation."""
        bmax2 = float(np.max(self._cos_b**2))
        if bmax2 / (4.0 * w) < 0.5:
            t = -1.0 / (4.0 * w)
            total, power = 0.0, 1.0
            for k in range(2, 26):
                power = t**k / math.factorial(k)
                total += power * self._cos_m[k]
                if k > 4 and abs(power * self._cos_m[k]) < 1e-18 * (abs(total) + 1e-30):
                    break
            return total
        return float(np.sum(self._cos_c * np.exp(-self._cos_b**2 / (4.0 * w))))

    def _tail_series(self, u, w0):
        """Closed form of the far part of the (w-u)-weighted moment integral."""
        total = 0.0
        for k in range(2, 26):
            mk = self._cos_m[k]
            if mk == 0.0:
                continue
            coef = (-0.25) ** k / math.factorial(k) * mk
            total += coef * (w0 ** (1.5 - k) / (k - 1.5) - u * w0 ** (0.5 - k) / (k - 0.5))
        return math.sqrt(math.pi) * total

    def spec_moment(self, u):
        u = np.asarray(u, dtype=float)
        flat = np.atleast_1d(u)
        out = np.zeros(flat.shape)
        bmax2 = float(np.max(self._cos_b**2))
        for i, ui in enumerate(flat):
            w0 = 4.0 * max(ui, bmax2, 1e-12)

            def near(w):
                return (w - ui) * math.sqrt(math.pi / w) * self._cos_sum(w)

            val, _ = integrate.quad(near, ui, w0, epsabs=1e-13, epsrel=1e-11, limit=200)
            val += self._tail_series(ui, w0)
            out[i] = 16.0 / self.scale**3 * val
        return out.reshape(u.shape) if u.ndim else float(out[0])

    def heat_moment(self, tau):
        tau = np.asarray(tau, dtype=float)
        return self.real_moment(0.5 / tau) / np.sqrt(2.0 * np.pi * tau)

    def breakpoints(self):
        return [self.shift + k * self.scale for k in (-2.0, -1.0, 0.0, 1.0, 2.0)]

    def kernel_params(self):
        return KIND_SPLINE, self.scale, self.shift, None


class GaussianFactor:
    """Gaussian factor exp(-x^2 / (2 length^2)); truncation is model-level."""

    def __init__(self, length=1.0):
        if length <= 0:
            raise ModelError("gaussian length must be positive")
        self.length = float(length)
        self.support_radius = math.inf

    def evaluate(self, x):
        x = np.asarray(x, dtype=float)
        return np.exp(-x * x / (2.0 * self.length**2))

    def spectrum(self, xi):
        xi = np.asarray(xi, dtype=float)
        return self.length * math.sqrt(2.0 * math.pi) * np.exp(-self.length**2 * xi * xi / 2.0)

    def real_moment(self, u):
        u = np.asarray(u, dtype=float)
        return np.sqrt(np.pi / (u + 0.5 / self.length**2))

    def spec_moment(self, u):
        u = np.asarray(u, dtype=float)
        return self.length * math.sqrt(2.0 * math.pi) * np.sqrt(np.pi / (u + self.length**2 / 2.0))

    def heat_moment(self, tau):
        tau = np.asarray(tau, dtype=float)
        return self.real_moment(0.5 / tau) / np.sqrt(2.0 * np.pi * tau)

    def kernel_params(self):
        return KIND_GAUSS, 0.5 / self.length**2, 0.0, None


class TabulatedFactor:
    """Piecewise-linear factor from a uniform symmetric table.

    The factor *is* the linear interpolant: evaluation, spectrum, and
    moments all refer to that same function exactly, so the numeric
    transform is the analytic transform of a sum of shifted tents.
    """

    def __init__(self, x, values):
        x = np.asarray(x, dtype=float)
        values = np.asarray(values, dtype=float)
        if x.ndim != 1 or x.shape != values.shape or x.size < 3:
            raise ModelError("tabulated factor needs matching 1-d x and value arrays")
        h = np.diff(x)
        if not np.allclose(h, h[0], rtol=1e-9, atol=0.0):
            raise ModelError("tabulated grid must be uniform")
        if not np.allclose(x, -x[::-1], rtol=0.0, atol=1e-9 * x[-1]):
            raise ModelError("tabulated grid must be symmetric about 0")
        if not np.allclose(values, values[::-1], rtol=0.0, atol=1e-9 * np.max(np.abs(values) + 1e-300)):
            raise ModelError("tabulated values must be even in x")
        if values[0] != 0.0 or values[-1] != 0.0:
            x = np.concatenate(([x[0] - h[0]], x, [x[-1] + h[0]]))
            values = np.concatenate(([0.0], values, [0.0]))
        self.x = x
        self.values = values
        self.h = float(x[1] - x[0])
        self.support_radius = float(x[-1])
        half = (x.size - 1) // 2
        self._pos_x = x[half:]
        self._pos_v = values[half:]

    def evaluate(self, x):
        return np.interp(np.asarray(x, dtype=float), self.x, self.values, left=0.0, right=0.0)

    def spectrum(self, xi):
        xi = np.asarray(xi, dtype=float)
        phases = np.cos(np.multiply.outer(xi, self._pos_x[1:]))
        series = self._pos_v[0] + 2.0 * phases @ self._pos_v[1:]
        return self.h * _sinc(self.h * xi / 2.0) ** 2 * series

    def real_moment(self, u):
        u = np.asarray(u, dtype=float)
        flat = np.atleast_1d(u)
        out = np.zeros(flat.shape)
        a, b = self.x[:-1], self.x[1:]
        va, vb = self.values[:-1], self.values[1:]
        slope = (vb - va) / (b - a)
        intercept = va - slope * a
        for i, ui in enumerate(flat):
            i0, i1 = _power_gauss_integrals(a, b, ui, 1)
            out[i] = float(np.sum(intercept * i0 + slope * i1))
        return out.reshape(u.shape) if u.ndim else float(out[0])

    def spec_moment(self, u):
        u = np.asarray(u, dtype=float)
        return np.sqrt(np.pi / u) * self.real_moment(0.25 / u)

    def heat_moment(self, tau):
        tau = np.asarray(tau, dtype=float)
        return self.real_moment(0.5 / tau) / np.sqrt(2.0 * np.pi * tau)

    def kernel_params(self):
        return KIND_TABLE, float(self.x[0]), self.h, self.values


@dataclass(frozen=True, eq=False)
class Term:
    coef: float
    factors: tuple


@dataclass(frozen=True, eq=False)
class KernelSpec:
    """Flat arrays describing a model for compiled pair-sum kernels."""

    coefs: np.ndarray
    kinds: np.ndarray
    p0: np.ndarray
    p1: np.ndarray
    tab_offset: np.ndarray
    tab_length: np.ndarray
    table: np.ndarray
    trunc_r2: float
    axis_support: float


@dataclass(eq=False)
class CovarianceModel:
    """Stationary covariance R(x) as a sum of separable factor products."""

    dim: int
    kind: str
    terms: tuple
    support_radius: float
    spectrum_kind: str
    r_hat_zero: float
    degenerate: bool
    trunc_radius: float = math.inf
    meta: dict = field(default_factory=dict)
    _kernel: KernelSpec | None = field(default=None, repr=False)

    def _points(self, x):
        pts = np.asarray(x, dtype=float)
        if self.dim == 1:
            if pts.ndim == 0 or pts.shape[-1] != 1:
                pts = pts[..., None]
        elif pts.ndim == 0 or pts.shape[-1] != self.dim:
            raise ValueError(f"expected points with last axis {self.dim}")
        return pts

    def evaluate(self, x):
        pts = self._points(x)
        out = np.zeros(pts.shape[:-1])
        for term in self.terms:
            prod = np.full(pts.shape[:-1], term.coef)
            for i, factor in enumerate(term.factors):
                prod = prod * factor.evaluate(pts[..., i])
            out = out + prod
        if math.isfinite(self.trunc_radius):
            r2 = np.sum(pts * pts, axis=-1)
            out = np.where(r2 <= self.trunc_radius**2, out, 0.0)
        return out if out.ndim else float(out)

    def spectrum(self, xi):
        pts = self._points(xi)
        out = np.zeros(pts.shape[:-1])
        for term in self.terms:
            prod = np.full(pts.shape[:-1], term.coef)
            for i, factor in enumerate(term.factors):
                prod = prod * factor.spectrum(pts[..., i])
            out = out + prod
        return out if out.ndim else float(out)

    def real_gauss_moment(self, u):
        """Integral of R(x) exp(-u |x|^2) over the whole space."""
        u = np.asarray(u, dtype=float)
        out = np.zeros(u.shape)
        for term in self.terms:
            prod = np.full(u.shape, term.coef)
            for factor in term.factors:
                prod = prod * factor.real_moment(u)
            out = out + prod
        return out if out.ndim else float(out)

    def spec_gauss_moment(self, u):
        """Integral of the spectrum times exp(-u |xi|^2)."""
        u = np.asarray(u, dtype=float)
        out = np.zeros(u.shape)
        for term in self.terms:
            prod = np.full(u.shape, term.coef)
            for factor in term.factors:
                prod = prod * factor.spec_moment(u)
            out = out + prod
        return out if out.ndim else float(out)

    def heat_moment(self, tau):
        """Integral of R(x) against the time-tau Gaussian kernel."""
        tau = np.asarray(tau, dtype=float)
        out = np.zeros(tau.shape)
        for term in self.terms:
            prod = np.full(tau.shape, term.coef)
            for factor in term.factors:
                prod = prod * factor.heat_moment(tau)
            out = out + prod
        return out if out.ndim else float(out)

    @property
    def r_zero(self):
        total = 0.0
        for term in self.terms:
            prod = term.coef
            for factor in term.factors:
                prod *= float(factor.evaluate(0.0))
            total += prod
        return total

    @property
    def axis_support(self):
        """Largest per-axis support radius over all factors."""
        sup = 0.0
        for term in self.terms:
            for factor in term.factors:
                sup = max(sup, factor.support_radius)
        if not math.isfinite(sup):
            sup = self.trunc_radius
        return sup

    def kernel_spec(self):
        if self._kernel is None:
            nt = len(self.terms)
            coefs = np.array([t.coef for t in self.terms])
            kinds = np.zeros((nt, self.dim), dtype=np.int8)
            p0 = np.zeros((nt, self.dim))
            p1 = np.zeros((nt, self.dim))
            off = np.zeros((nt, self.dim), dtype=np.int64)
            length = np.zeros((nt, self.dim), dtype=np.int64)
            chunks = []
            cursor = 0
            for ti, term in enumerate(self.terms):
                for fi, factor in enumerate(term.factors):
                    kind, a, b, table = factor.kernel_params()
                    kinds[ti, fi] = kind
                    p0[ti, fi] = a
                    p1[ti, fi] = b
                    if table is not None:
                        off[ti, fi] = cursor
                        length[ti, fi] = table.size
                        chunks.append(np.asarray(table, dtype=float))
                        cursor += table.size
            table = np.concatenate(chunks) if chunks else np.zeros(1)
            trunc_r2 = self.trunc_radius**2 if math.isfinite(self.trunc_radius) else np.inf
            self._kernel = KernelSpec(
                coefs=coefs, kinds=kinds, p0=p0, p1=p1,
                tab_offset=off, tab_length=length, table=table,
                trunc_r2=trunc_r2, axis_support=self.axis_support,
            )
        return self._kernel


@dataclass(frozen=True, eq=False)
class ShapeFunction:
    """Sum of weighted product-tent bumps placed at fixed centers."""

    dim: int
    scale: float
    weights: np.ndarray
    centers: np.ndarray

    @property
    def c_p(self):
        return float(np.sum(self.weights)) * self.scale**self.dim

    @property
    def support_radius(self):
        if self.weights.size == 0:
            return 0.0
        axis = np.max(np.abs(self.centers), axis=0) + self.scale
        return float(np.sqrt(np.sum(axis**2)))

    def evaluate(self, x):
        pts = np.asarray(x, dtype=float)
        if self.dim == 1:
            if pts.ndim == 0 or pts.shape[-1] != 1:
                pts = pts[..., None]
        elif pts.ndim == 0 or pts.shape[-1] != self.dim:
            raise ValueError(f"expected points with last axis {self.dim}")
        out = np.zeros(pts.shape[:-1])
        for w, c in zip(self.weights, self.centers):
            prod = np.full(pts.shape[:-1], w)
            for i in range(self.dim):
                prod = prod * np.clip(1.0 - np.abs(pts[..., i] - c[i]) / self.scale, 0.0, None)
            out = out + prod
        return out if out.ndim else float(out)


def build_shape(spec):
    """Build a ShapeFunction from a JSON-style description."""
    if spec.get("kind", "tent") != "tent":
        raise ModelError(f"unknown shape kind {spec.get('kind')!r}")
    dim = int(spec["dim"])
    scale = float(spec.get("scale", 1.0))
    if dim < 1 or scale <= 0:
        raise ModelError("shape needs dim >= 1 and positive scale")
    atoms = spec.get("atoms", [{"weight": 1.0, "center": [0.0] * dim}])
    weights = np.array([float(a["weight"]) for a in atoms])
    centers = np.array([[float(c) for c in a["center"]] for a in atoms], dtype=float)
    if weights.size and centers.shape != (weights.size, dim):
        raise ModelError("every atom center must have length dim")
    if weights.size:
        moving = np.ptp(centers, axis=0) > 0
        if np.count_nonzero(moving) > 1:
            raise ModelError("atom centers may differ along at most one axis")
    return ShapeFunction(dim=dim, scale=scale, weights=weights, centers=centers)


def _quad_r_integral(model):
    """Integral of R by quadrature on model.evaluate, independent of spectra."""
    if model.meta.get("radial"):
        rad = model.trunc_radius

        def g(r):
            x = np.zeros(model.dim)
            x[0] = r
            return model.evaluate(x) * r ** (model.dim - 1)

        surface = 2.0 * math.pi ** (model.dim / 2.0) / math.gamma(model.dim / 2.0)
        val, _ = integrate.quad(g, 0.0, rad, epsrel=1e-10, epsabs=1e-14, limit=200)
        return surface * val
    total = 0.0
    for term in model.terms:
        prod = term.coef
        for factor in term.factors:
            if isinstance(factor, TabulatedFactor):
                prod *= float(np.trapezoid(factor.values, factor.x))
                continue
            lo, hi = -factor.support_radius, factor.support_radius
            kinks = [k for k in getattr(factor, "breakpoints", lambda: [])() if lo < k < hi]
            val, _ = integrate.quad(
                factor.evaluate, lo, hi,
                epsrel=1e-10, epsabs=1e-14, limit=200, points=kinks or None,
            )
            prod *= val
        total += prod
    return total


def _validate_model(model):
    if not math.isfinite(model.support_radius):
        raise ModelError("covariance support must be compact")
    r0 = model.r_zero
    if r0 < 0:
        raise ModelError("R(0) must be nonnegative")
    if r0 == 0.0:
        return model
    report = check_bochner(model)
    if not report.passed:
        raise BochnerError(
            f"spectrum reaches {report.min_value:.3e} at |xi|={report.argmin_norm:.3g}, "
            f"below tolerance -{report.tolerance:.3e}"
        )
    quad_val = _quad_r_integral(model)
    tol = 1e-6 * max(abs(model.r_hat_zero), r0)
    if abs(quad_val - model.r_hat_zero) > tol:
        raise ModelError(
            f"integral of R by quadrature ({quad_val!r}) disagrees with "
            f"declared spectrum value at 0 ({model.r_hat_zero!r})"
        )
    degenerate = abs(model.r_hat_zero) <= policy.DEGENERATE_REL * r0
    if degenerate != model.degenerate:
        raise ModelError("degeneracy flag inconsistent with spectrum value at 0")
    return model


def build_gaussian_model(spec, validate=True):
    """Build a CovarianceModel from a JSON-style parametric description.

    Shipped kinds: "triangular" (tensor product of unit-width tents,
    optional scale), "gauss_bump" (radially truncated Gaussian), and
    "tabulated" (piecewise-linear table, dim 1).
    """
    kind = spec.get("kind")
    dim = int(spec.get("dim", 0))
    if dim < 1:
        raise ModelError("model needs dim >= 1")
    variance = float(spec.get("variance", 1.0))
    if variance < 0:
        raise ModelError("variance must be nonnegative")
    if kind == "triangular":
        scale = float(spec.get("scale", 1.0))
        factors = tuple(TentFactor(scale) for _ in range(dim))
        terms = (Term(variance, factors),)
        model = CovarianceModel(
            dim=dim, kind=kind, terms=terms,
            support_radius=math.sqrt(dim) * scale,
            spectrum_kind="closed-form",
            r_hat_zero=variance * scale**dim,
            degenerate=False,
            meta={"spec": dict(spec)},
        )
    elif kind == "gauss_bump":
        length = float(spec.get("length", 1.0))
        cut = 8.0 * length
        factors = tuple(GaussianFactor(length) for _ in range(dim))
        terms = (Term(variance, factors),)
        model = CovarianceModel(
            dim=dim, kind=kind, terms=terms,
            support_radius=cut,
            spectrum_kind="closed-form",
            r_hat_zero=variance * (2.0 * math.pi * length**2) ** (dim / 2.0),
            degenerate=False,
            trunc_radius=cut,
            meta={"spec": dict(spec), "radial": True},
        )
    elif kind == "tabulated":
        if dim != 1:
            raise ModelError("tabulated models are one-dimensional")
        factor = TabulatedFactor(spec["x"], spec["values"])
        terms = (Term(1.0, (factor,)),)
        rhz = float(factor.spectrum(0.0))
        r0 = float(factor.evaluate(0.0))
        model = CovarianceModel(
            dim=1, kind=kind, terms=terms,
            support_radius=factor.support_radius,
            spectrum_kind="numeric-transform",
            r_hat_zero=rhz,
            degenerate=abs(rhz) <= policy.DEGENERATE_REL * max(r0, 1e-300),
            meta={"spec": {"kind": "tabulated", "dim": 1}},
        )
    else:
        raise ModelError(f"unknown covariance kind {kind!r}")
    return _validate_model(model) if validate else model


def tabulated_from_csv(path):
    """Load a dim-1 tabulated covariance from CSV columns (x, R)."""
    data = np.loadtxt(path, delimiter=",", dtype=float)
    if data.ndim != 2 or data.shape[1] != 2:
        raise ModelError("tabulated CSV needs two columns: x, value")
    return build_gaussian_model({"kind": "tabulated", "dim": 1, "x": data[:, 0], "values": data[:, 1]})


def shot_noise_model(shape, validate=True):
    """Covariance of the centered shot-noise potential built from shape.

    The covariance is the autocorrelation of the shape; for a sum of
    product tents that is an exact sum of separable cubic-spline terms.
    """
    if not isinstance(shape, ShapeFunction):
        shape = build_shape(shape)
    dim, s = shape.dim, shape.scale
    grouped = {}
    for wa, ca in zip(shape.weights, shape.centers):
        for wb, cb in zip(shape.weights, shape.centers):
            shift = tuple(np.round(cb - ca, 12))
            grouped[shift] = grouped.get(shift, 0.0) + wa * wb * s**dim
    terms = []
    for shift, coef in sorted(grouped.items()):
        if coef == 0.0:
            continue
        factors = tuple(CubicSplineFactor(s, shift[i]) for i in range(dim))
        terms.append(Term(coef, factors))
    c_p = shape.c_p
    model = CovarianceModel(
        dim=dim, kind="shot_noise", terms=tuple(terms),
        support_radius=2.0 * shape.support_radius,
        spectrum_kind="closed-form",
        r_hat_zero=c_p**2,
        degenerate=abs(c_p**2) <= policy.DEGENERATE_REL * max(sum(
            t.coef * np.prod([float(f.evaluate(0.0)) for f in t.factors]) for t in terms
        ) if terms else 0.0, 1e-300),
        meta={"c_p": c_p, "shape_support": shape.support_radius},
    )
    if not terms:
        model.degenerate = True
        return model
    return _validate_model(model) if validate else model


def power_spectrum(model, xi):
    """Spectrum value at xi, clamped at tiny negative quadrature noise."""
    val = model.spectrum(xi)
    eps = policy.EPS_BOCHNER_REL * max(model.r_zero, 1e-300)
    arr = np.asarray(val, dtype=float)
    if np.any(arr < -eps):
        raise BochnerError(f"spectrum value {arr.min():.3e} below -{eps:.3e}")
    out = np.where(arr < 0.0, 0.0, arr)
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class BochnerReport:
    passed: bool
    min_value: float
    argmin_norm: float
    tolerance: float
    points_scanned: int


def check_bochner(model, seed=7):
    """Scan the spectrum on a support-radius-scaled grid for negativity."""
    sup = max(model.axis_support, 1e-6)
    xi_max = 96.0 / sup
    eps = policy.EPS_BOCHNER_REL * max(model.r_zero, 1e-300)
    if model.dim <= 2:
        axis = np.linspace(0.0, xi_max, 768)
        grids = np.meshgrid(*([axis] * model.dim), indexing="ij")
        pts = np.stack([g.ravel() for g in grids], axis=-1)
    else:
        rng = np.random.Generator(np.random.PCG64(seed))
        dirs = [np.eye(model.dim)[i] for i in range(model.dim)]
        dirs.append(np.ones(model.dim) / math.sqrt(model.dim))
        extra = rng.normal(size=(32, model.dim))
        dirs.extend(extra / np.linalg.norm(extra, axis=1, keepdims=True))
        radii = np.linspace(0.0, xi_max, 512)
        pts = np.concatenate([np.multiply.outer(radii, d) for d in dirs], axis=0)
    vals = np.atleast_1d(model.spectrum(pts))
    imin = int(np.argmin(vals))
    min_val = float(vals[imin])
    argmin = float(np.linalg.norm(np.atleast_2d(pts)[imin]))
    return BochnerReport(
        passed=min_val >= -eps,
        min_value=min_val,
        argmin_norm=argmin,
        tolerance=eps,
        points_scanned=int(vals.size),
    )


def _tail_quad(g, scale=1.0):
    """Integral of g over [1, inf) via the substitution u = w^-2."""

    def f(w):
        return 2.0 * w**-3 * g(w**-2)

    val, _ = integrate.quad(f, 0.0, 1.0, epsabs=1e-14 * scale, epsrel=1e-11, limit=400)
    return val


def _sigma2_spectral(model):
    d = model.dim
    scale = max(model.r_zero, 1e-300)
    near, _ = integrate.quad(
        model.spec_gauss_moment, 0.0, 1.0, epsabs=1e-14 * scale, epsrel=1e-11, limit=400
    )
    far = _tail_quad(model.spec_gauss_moment, scale)
    return 4.0 * (2.0 * math.pi) ** (-d) * (near + far)


def _sigma2_real(model):
    d = model.dim
    scale = max(model.r_zero, 1e-300)
    if d == 3:
        near, _ = integrate.quad(
            lambda y: 2.0 * model.real_gauss_moment(y * y), 0.0, 1.0,
            epsabs=1e-14 * scale, epsrel=1e-11, limit=400,
        )
    else:
        near, _ = integrate.quad(
            lambda u: u ** ((d - 4) / 2.0) * model.real_gauss_moment(u), 0.0, 1.0,
            epsabs=1e-14 * scale, epsrel=1e-11, limit=400,
        )
    far, _ = integrate.quad(
        lambda w: 2.0 * w ** (1 - d) * model.real_gauss_moment(w**-2), 0.0, 1.0,
        epsabs=1e-14 * scale, epsrel=1e-11, limit=400,
    )
    return math.pi ** (-d / 2.0) * (near + far)


def sigma_routes(model):
    """The two independent limit-constant evaluations for dim >= 3."""
    if model.dim < 3:
        raise SigmaError("dual-formula evaluation applies to dim >= 3")
    s2_spec = _sigma2_spectral(model)
    s2_real = _sigma2_real(model)
    return math.sqrt(max(s2_spec, 0.0)), math.sqrt(max(s2_real, 0.0))


def _fit_small_frequency_exponent(model):
    lo, hi = policy.ALPHA_FIT_DECADE
    radii = np.geomspace(lo, hi, 25)
    if model.dim == 1:
        vals = np.atleast_1d(model.spectrum(radii[:, None]))
    else:
        angles = np.linspace(0.0, math.pi, 8, endpoint=False)
        dirs = np.stack([np.cos(angles), np.sin(angles)], axis=-1)
        pts = radii[:, None, None] * dirs[None, :, :]
        vals = np.atleast_1d(model.spectrum(pts)).mean(axis=1)
    if np.any(vals <= 0.0):
        raise SigmaError(
            "spectrum is not strictly positive on the small-frequency fit window; "
            "cannot certify integrability of spectrum/|xi|^2"
        )
    slope = np.polyfit(np.log(radii), np.log(vals), 1)[0]
    return float(slope)


def sigma_limit(model, d, mode):
    """Limit constant of the rescaled occupation functional.

    Nondegenerate: sqrt of the spectrum at 0 (d=1), sqrt of that over pi
    (d=2), and for d >= 3 the spectral integral of R_hat(xi)/|xi|^2,
    cross-validated against the real-space route.  Degenerate (d=1,2):
    the same spectral integral, defined because the spectrum vanishes at
    the origin fast enough.
    """
    if d != model.dim:
        raise SigmaError(f"model has dim {model.dim}, requested d={d}")
    if mode not in ("nondegenerate", "degenerate"):
        raise SigmaError(f"unknown mode {mode!r}")
    if mode == "nondegenerate":
        if d <= 2 and model.r_hat_zero <= 0.0:
            raise SigmaError("nondegenerate mode needs a positive spectrum at 0 when d <= 2")
        if d == 1:
            return math.sqrt(model.r_hat_zero)
        if d == 2:
            return math.sqrt(model.r_hat_zero / math.pi)
        s_spec, s_real = sigma_routes(model)
        ref = max(s_spec, s_real)
        if ref > 0 and abs(s_spec - s_real) > policy.SIGMA_DUAL_REL * ref:
            raise DualFormulaMismatch(
                f"spectral route {s_spec!r} vs real-space route {s_real!r}"
            )
        return s_spec
    if d not in (1, 2):
        raise SigmaError("degenerate mode is defined for d in {1, 2}")
    if not model.degenerate:
        raise SigmaError("degenerate mode needs a model with vanishing spectrum at 0")
    alpha = _fit_small_frequency_exponent(model)
    bound = policy.ALPHA_MIN[d]
    if alpha < bound + policy.ALPHA_MARGIN:
        raise SigmaError(
            f"fitted small-frequency exponent {alpha:.3f} does not clear the "
            f"integrability bound {bound:.1f}"
        )
    s2 = _sigma2_spectral(model)
    return math.sqrt(max(s2, 0.0))
