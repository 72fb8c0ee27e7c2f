import numpy as np
import pytest

import semipositone as sp
from semipositone.radial_core import RadialField
from semipositone.weight import g2_left_side, support_mass_delta


def test_example_norms_closed_forms(example_w):
    # ||g||_1 = omega_5 int_{1/2}^1 r^{-1} r^4 dr = (8 pi^2/3)(15/64) = 5 pi^2/8
    assert example_w.norm(1.0) == pytest.approx(5.0 * np.pi**2 / 8.0, rel=1e-12)
    assert example_w.norm(np.inf) == pytest.approx(2.0, rel=1e-12)
    # N/4 norm drives the eigenvalue bound; closed annulus formula
    p = 5.0 / 4.0
    closed = (sp.sphere_area(5) * (1.0 - 0.5 ** (5 - p)) / (5 - p)) ** (1.0 / p)
    assert example_w.norm(p) == pytest.approx(closed, rel=1e-12)


def test_check_g1_quadrature_agreement(example_w):
    rep = sp.check_g1(example_w)
    assert rep.passed
    assert rep.details["closed_mismatch"] < 1e-8


def test_check_g1_warns_on_zero_weight():
    with pytest.warns(UserWarning, match="degenerate"):
        rep = sp.check_g1(sp.zero_weight())
    assert rep.details["warning"] == "degenerate weight"


def test_example_weight_rejects_bad_geometry():
    with pytest.raises(ValueError):
        sp.example_weight(r_in=0.4)
    with pytest.raises(ValueError):
        sp.example_weight(r_out=1.2)
    with pytest.raises(ValueError):
        sp.example_weight(d=0.0)
    with pytest.raises(ValueError):
        sp.example_weight(r_in=0.9, r_out=0.6)


def test_sample_on_grid_mass_identity(example_w):
    # partial-cell corrected sampling reproduces ||g||_1 exactly under the
    # grid trapezoid rule, even though the support edges fall inside cells
    for n in (97, 128, 256):
        g = sp.make_grid(5, n, 20.0)
        gf = sp.sample_on_grid(example_w, g)
        assert sp.integrate(gf) == pytest.approx(example_w.norm(1.0), rel=1e-13)


def test_sample_on_grid_cached(example_w, grid128):
    a = sp.sample_on_grid(example_w, grid128)
    assert sp.sample_on_grid(example_w, grid128) is a


def test_weighted_moment_accuracy(example_w, grid512):
    # second moment against the closed annulus integral; cell-average
    # sampling is O(h^2) here
    g = grid512
    gf = sp.sample_on_grid(example_w, g)
    got = sp.integrate(RadialField(g, gf.values * g.r**2))
    closed = g.sphere_area * (1.0**6 - 0.5**6) / 6.0
    assert abs(got - closed) < 5e-3 * closed


def test_table_weight_roundtrip():
    r = np.linspace(0.0, 2.0, 101)
    vals = np.where((r >= 0.5) & (r <= 1.0), 1.3, 0.0)
    w = sp.table_weight(r, vals)
    assert w.profile(0.75) == pytest.approx(1.3)
    assert w.profile(1.5) == 0.0
    with pytest.raises(ValueError):
        sp.table_weight(r, vals[:-1])
    with pytest.raises(ValueError):
        sp.table_weight(r, -vals)


def test_g2_exterior_paper_bound(example_w):
    # annulus with r_out < 1 so dist(A, B_1^c) > 0: the left side at every
    # exterior probe is bounded by dist^{(4-N)delta} * int_A g^delta
    w = sp.example_weight(r_out=0.9)
    delta = 1.0
    dist = 1.0 - 0.9
    bound = dist ** ((4 - 5) * delta) * support_mass_delta(w, delta)
    for x in (1.5, 3.0, 10.0, 100.0):
        val = g2_left_side(w, delta, x)
        assert val <= bound * (1.0 + 1e-9)


def test_g2_far_field_limit(example_w):
    # |x|^{(N-4)delta} I(x) -> int g^delta as |x| -> infinity
    for delta in (1.0, sp.critical_exponent(5)):
        mass = support_mass_delta(example_w, delta)
        val = g2_left_side(example_w, delta, 1e3)
        assert abs(val / mass - 1.0) < 1e-2


def test_g2_direct_quadrature_fallback_matches(example_w):
    # probes hugging the support edge switch to the 2-d quadrature; the two
    # routes must agree where both are trustworthy
    delta = 1.0
    from semipositone.weight import _g2_left_side_direct
    for x in (1.5, 2.5):
        a = g2_left_side(example_w, delta, x)
        b = _g2_left_side_direct(example_w, delta, x)
        assert abs(a - b) < 1e-6 * max(abs(a), abs(b))


def test_check_g2_exterior(example_w):
    rep = sp.check_g2(example_w, 1.0)
    assert rep.passed
    assert np.isfinite(rep.details["c_g"])
    assert example_w.c_g[1.0] == rep.details["c_g"]


def test_check_g2_rejects_bad_delta(example_w):
    with pytest.raises(ValueError):
        sp.check_g2(example_w, 2.0)


def test_check_g2_punctured_needs_delta_one(example_w):
    with pytest.raises(ValueError):
        sp.check_g2(example_w, sp.critical_exponent(5), variant="punctured")


def test_check_g2_exterior_rejects_interior_probes(example_w):
    with pytest.raises(ValueError):
        sp.check_g2(example_w, 1.0, x_samples=np.array([0.7, 2.0]))


def test_g2_interior_probe_divergent(example_w):
    # on the support, alpha = (N-4) * 2** = 10 >= N: self-interaction diverges
    v = g2_left_side(example_w, sp.critical_exponent(5), 0.75)
    assert np.isinf(v)
