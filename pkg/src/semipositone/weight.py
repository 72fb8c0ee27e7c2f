"""Radial weights g: the annulus example chi_[r_in,r_out] |y|^{-d}, integrability
norms, and verification of the Riesz growth bound

    |x|^{(N-4) delta} int g(y)^delta / |x-y|^{(N-4) delta} dy <= C_g

for delta = 1 and delta = 2** on exterior probe points.
"""

import warnings
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.integrate import quad

from .nonlinearity import CheckReport, critical_exponent
from .radial_core import RadialField, sphere_area
from .riesz_potential import ring_kernel_pairs

_NORM_QUAD_TOL = 1e-12


@dataclass(frozen=True)
class WeightSpec:
    """A nonnegative radial weight supported on [r_in, r_out].

    For the example family profile(r) = r^{-d} on the annulus; for table
    weights (r_in, r_out) just bound the support. norms and c_g are caches
    filled on demand, keyed by p and by delta respectively.
    """
    profile: Callable
    dim: int
    r_in: float
    r_out: float
    d: float = 0.0
    name: str = "custom"
    norms: dict = field(default_factory=dict)
    c_g: dict = field(default_factory=dict)
    grid_cache: dict = field(default_factory=dict, repr=False)

    def norm(self, p):
        p = float(p)
        if p not in self.norms:
            self.norms[p] = _quad_norm(self, p)
        return self.norms[p]


def _annulus_lp(dim, d, r_in, r_out, p):
    """Closed form ||r^{-d} chi_[r_in,r_out]||_p over R^N."""
    if np.isinf(p):
        return r_in ** (-d)
    s = dim - d * p
    if abs(s) < 1e-13:
        block = np.log(r_out / r_in)
    else:
        block = (r_out ** s - r_in ** s) / s
    return (sphere_area(dim) * block) ** (1.0 / p)


def _quad_norm(spec, p):
    if np.isinf(p):
        r = np.linspace(spec.r_in, spec.r_out, 20001)
        return float(np.max(spec.profile(r)))
    val, _ = quad(lambda r: spec.profile(r) ** p * r ** (spec.dim - 1),
                  spec.r_in, spec.r_out, epsabs=_NORM_QUAD_TOL, limit=400)
    return float((sphere_area(spec.dim) * val) ** (1.0 / p))


def example_weight(d=1.0, r_in=0.5, r_out=1.0, dim=5):
    """g(y) = |y|^{-d} on the annulus r_in <= |y| <= r_out, zero elsewhere.

    The annulus must sit inside the closed shell between radii 1/2 and 1 so
    that the support stays in B_1 \\ B_{1/2}.
    """
    if not (0.5 <= r_in < r_out <= 1.0):
        raise ValueError("annulus radii need 0.5 <= r_in < r_out <= 1, got [%g, %g]"
                         % (r_in, r_out))
    if not d > 0:
        raise ValueError("singularity exponent d must be positive")

    def profile(r):
        r = np.asarray(r, dtype=float)
        out = np.zeros_like(r)
        inside = (r >= r_in) & (r <= r_out)
        out[inside] = r[inside] ** (-d)
        return out if out.ndim else float(out)

    norms = {p: _annulus_lp(dim, d, r_in, r_out, p)
             for p in (1.0, float(dim) / 4.0, _conjugate(critical_exponent(dim)), np.inf)}
    return WeightSpec(profile=profile, dim=dim, r_in=r_in, r_out=r_out, d=d,
                      name="paper_example", norms=norms)


def table_weight(r_values, g_values, dim=5, name="custom_table"):
    """Piecewise-linear weight from tabulated (r, g) samples; zero outside
    the tabulated range."""
    r_values = np.asarray(r_values, dtype=float)
    g_values = np.asarray(g_values, dtype=float)
    if r_values.ndim != 1 or r_values.shape != g_values.shape or r_values.size < 2:
        raise ValueError("need matching 1-D r and g tables with >= 2 entries")
    if np.any(np.diff(r_values) <= 0):
        raise ValueError("r table must be strictly increasing")
    if np.any(g_values < 0):
        raise ValueError("weight table must be nonnegative")

    def profile(r):
        r = np.asarray(r, dtype=float)
        return np.interp(r, r_values, g_values, left=0.0, right=0.0)

    return WeightSpec(profile=profile, dim=dim, r_in=float(r_values[0]),
                      r_out=float(r_values[-1]), name=name)


def zero_weight(dim=5):
    def profile(r):
        return np.zeros_like(np.asarray(r, dtype=float))
    return WeightSpec(profile=profile, dim=dim, r_in=0.5, r_out=1.0, name="zero")


def _conjugate(p):
    return p / (p - 1.0)


def sample_on_grid(spec, grid):
    """Grid representation of g preserving cell masses at the support edges.

    Plain nodal sampling of a characteristic-function weight loses O(h) mass
    wherever r_in or r_out falls between nodes; here each node instead gets
    the exact mass of g over its trapezoid cell divided by the node's
    quadrature measure, so integrate(g_grid) reproduces ||g||_1 to roundoff
    and weighted quadratures keep their O(h^2) accuracy.
    """
    if grid.dim != spec.dim:
        raise ValueError("grid dim %d != weight dim %d" % (grid.dim, spec.dim))
    if spec.r_out >= grid.r_max:
        raise ValueError("grid r_max=%g does not cover the support [%g, %g]"
                         % (grid.r_max, spec.r_in, spec.r_out))
    key = grid.key()
    if key in spec.grid_cache:
        return spec.grid_cache[key]
    h = grid.h
    lo = np.clip(grid.r - 0.5 * h, 0.0, None)
    hi = np.minimum(grid.r + 0.5 * h, grid.r_max)
    vals = np.zeros(grid.n)
    a = np.maximum(lo, spec.r_in)
    b = np.minimum(hi, spec.r_out)
    touched = b > a
    for i in np.nonzero(touched)[0]:
        mass, _ = quad(lambda r: spec.profile(r) * r ** (grid.dim - 1),
                       a[i], b[i], epsabs=1e-14, limit=100)
        measure = grid.r[i] ** (grid.dim - 1) * grid.w[i]
        vals[i] = mass / measure if measure > 0 else 0.0
    out = RadialField(grid=grid, values=vals)
    spec.grid_cache[key] = out
    return out


def check_g1(spec):
    """Integrability report: L^1, L^{N/4}, L^{(2**)'} and L^inf norms by
    adaptive quadrature over the support, cross-checked against any cached
    closed forms."""
    ps = (1.0, float(spec.dim) / 4.0, _conjugate(critical_exponent(spec.dim)), np.inf)
    quad_norms = {p: _quad_norm(spec, p) for p in ps}
    mismatch = 0.0
    for p, v in spec.norms.items():
        if p in quad_norms and v > 0:
            mismatch = max(mismatch, abs(quad_norms[p] - v) / v)
    finite = all(np.isfinite(v) for v in quad_norms.values())
    details = {"norms": quad_norms, "closed_mismatch": mismatch}
    if quad_norms[1.0] == 0.0:
        warnings.warn("degenerate weight: ||g||_1 = 0")
        details["warning"] = "degenerate weight"
    return CheckReport("g1", finite, details)


def g2_left_side(spec, delta, x, n_nodes=160):
    """|x|^alpha int g^delta |x-y|^{-alpha} dy at a single probe radius,
    alpha = (N-4) delta, via the ring-reduced kernel and Gauss-Legendre in
    the radial variable.
    """
    dim = spec.dim
    alpha = (dim - 4.0) * delta
    x = float(x)
    if x <= 0:
        raise ValueError("probe radius must be positive")
    if alpha >= dim and spec.r_in <= x <= spec.r_out:
        return np.inf  # diagonal non-integrable once the probe meets the support
    margin = 0.02 * (spec.r_out - spec.r_in)
    if min(abs(x - spec.r_in), abs(x - spec.r_out)) < margin \
            or (spec.r_in < x < spec.r_out):
        return _g2_left_side_direct(spec, delta, x)
    nodes, wts = np.polynomial.legendre.leggauss(n_nodes)
    s = 0.5 * (spec.r_out - spec.r_in) * nodes + 0.5 * (spec.r_out + spec.r_in)
    jw = 0.5 * (spec.r_out - spec.r_in) * wts
    kern = ring_kernel_pairs(dim, np.full_like(s, x), s, alpha)
    integrand = spec.profile(s) ** delta * s ** (dim - 1) * kern
    return float(x ** alpha * np.sum(jw * integrand))


def _g2_left_side_direct(spec, delta, x):
    """Nested adaptive quadrature in (s, polar angle); slow but safe when the
    probe sits close to or inside the support."""
    dim = spec.dim
    alpha = (dim - 4.0) * delta
    ring = sphere_area(dim - 1)

    def inner(s):
        def ang(th):
            d2 = x * x + s * s - 2.0 * x * s * np.cos(th)
            return np.sin(th) ** (dim - 2) * d2 ** (-0.5 * alpha)
        val, _ = quad(ang, 0.0, np.pi, epsabs=1e-11, limit=400)
        return spec.profile(s) ** delta * s ** (dim - 1) * ring * val

    val, _ = quad(inner, spec.r_in, spec.r_out, epsabs=1e-11, limit=400)
    return float(x ** alpha * val)


def support_mass_delta(spec, delta):
    """int g^delta dy, the large-|x| limit of the (g2) left side."""
    if spec.name == "paper_example":
        p = _annulus_lp(spec.dim, spec.d, spec.r_in, spec.r_out, delta)
        return float(p ** delta)
    val, _ = quad(lambda r: spec.profile(r) ** delta * r ** (spec.dim - 1),
                  spec.r_in, spec.r_out, epsabs=_NORM_QUAD_TOL, limit=400)
    return float(sphere_area(spec.dim) * val)


def check_g2(spec, delta, x_samples=None, variant="exterior"):
    """Estimate C_g = sup over probes of the (g2) left side.

    delta must be 1 or 2** (within round-off). Probes default to a log grid
    on [1.05, 1e3]; the exterior variant requires probes >= 1, the punctured
    variant (delta = 1 only) allows any positive radius. Non-finite values
    are reported as failure rather than clipped.
    """
    dim = spec.dim
    two_ss = critical_exponent(dim)
    if not (abs(delta - 1.0) < 1e-12 or abs(delta - two_ss) < 1e-12):
        raise ValueError("delta=%g not in {1, 2**=%g}" % (delta, two_ss))
    if variant not in ("exterior", "punctured"):
        raise ValueError("variant must be 'exterior' or 'punctured'")
    if variant == "punctured" and abs(delta - 1.0) > 1e-12:
        raise ValueError("punctured-domain variant is stated for delta = 1 only")
    if x_samples is None:
        x_samples = np.geomspace(1.05, 1e3, 24)
    x_samples = np.asarray(x_samples, dtype=float)
    if variant == "exterior" and np.any(x_samples < 1.0):
        raise ValueError("exterior probes must satisfy |x| >= 1")
    if np.any(x_samples <= 0):
        raise ValueError("probe radii must be positive")

    values = np.array([g2_left_side(spec, delta, x) for x in x_samples])
    finite = np.isfinite(values)
    c_g = float(np.max(values[finite])) if np.any(finite) else np.inf
    limit_mass = support_mass_delta(spec, delta)
    far_ratio = float(values[finite][-1] / limit_mass) if np.any(finite) and limit_mass > 0 else np.nan
    passed = bool(np.all(finite))
    if passed:
        spec.c_g[float(delta)] = c_g
    return CheckReport("g2", passed, {
        "delta": float(delta), "alpha": (dim - 4.0) * delta,
        "x_samples": x_samples, "values": values, "c_g": c_g,
        "limit_mass": limit_mass, "far_field_ratio": far_ratio,
        "variant": variant})
