"""Acceptance criteria, one test per criterion, at the stated tolerances.

Frozen regression values (criterion 6 and the geometry chain) were recorded
from the first verified n = 512 run on this machine; they pin the computation
against silent drift, not against an external truth.
"""

import time

import numpy as np
import pytest

import semipositone as sp
from semipositone import sweep_cli
from semipositone.radial_core import RadialField
from semipositone.weight import g2_left_side, support_mass_delta

# first verified run, n = 512, r_max = 20, seed 7
FROZEN_LEVEL = 83935614090.5
FROZEN_NORM = 6892218.02115
FROZEN_RTOL = 1e-6


@pytest.fixture(scope="module")
def sweep512():
    cfg = sweep_cli.Config()
    t0 = time.time()
    report = sweep_cli.run_sweep(cfg)
    return report, time.time() - t0


def test_criterion_1_newton_kernel():
    t0 = time.time()
    worst = 0.0
    for dim in (5, 6, 8):
        g = sp.make_grid(dim, 256, 20.0)
        km = sp.ring_kernel(g, dim - 2)
        rr = np.maximum.outer(g.r, g.r)
        with np.errstate(divide="ignore"):
            exact = g.sphere_area * rr ** (2.0 - dim)
        off = ~np.eye(g.n, dtype=bool) & (rr > 0)
        worst = max(worst, float(np.max(np.abs(km.entries[off] - exact[off]) / exact[off])))
    elapsed = time.time() - t0
    assert worst < 1e-6
    assert elapsed < 30.0
    print("criterion 1: PASS  max rel err %.3e, %.1fs" % (worst, elapsed))


def test_criterion_2_riesz_closure(grid512):
    g = grid512
    h = RadialField(g, np.where(g.r < 1.0,
                                np.cos(0.5 * np.pi * np.minimum(g.r, 1.0)) ** 4, 0.0))
    sol = sp.riesz_solve(h)
    lap_u = sp.laplacian(sol.u).values
    closure = (np.sqrt(sp.integrate(RadialField(g, (lap_u + sol.neg_lap.values) ** 2)))
               / np.sqrt(sp.integrate(RadialField(g, sol.neg_lap.values ** 2))))
    assert closure < 0.02
    lap_w = sp.laplacian(sol.neg_lap).values
    diff = lap_w + h.values
    diff[0] = diff[-1] = 0.0  # boundary stencils excluded
    num = np.sqrt(sp.integrate(RadialField(g, diff ** 2)))
    den = np.sqrt(sp.integrate(RadialField(g, h.values ** 2)))
    biharm = num / den
    assert biharm < 0.05
    print("criterion 2: PASS  closure %.2e, biharmonic %.2e" % (closure, biharm))


def test_criterion_3_weak_lp_constant():
    worst = 0.0
    for dim in range(5, 10):
        got = sp.weak_lp_profile(dim, dim - 4)
        want = sp.sphere_area(dim) / dim
        worst = max(worst, abs(got - want))
        assert abs(got - want) < 1e-10
    print("criterion 3: PASS  max abs dev %.3e" % worst)


def test_criterion_4_prop33_inequality(example_spec):
    # pair distribution (recorded choice): 70% positive-branch pairs with
    # both magnitudes log-uniform on [1e-3, 1e3]; 30% negative-branch pairs
    # with magnitudes log-uniform on [1e-3, 1], the small-negative-part
    # regime the estimate is applied in (see notes on the negative branch).
    rng = np.random.default_rng(42)
    worst = -np.inf
    for a in (0.01, 0.1, 1.0):
        sh = sp.ShiftedNonlinearity(example_spec, a)
        for _ in range(10_000):
            if rng.random() < 0.7:
                x, y = 10.0 ** rng.uniform(-3.0, 3.0, 2)
                s, t = max(x, y), min(x, y)
            else:
                x, y = 10.0 ** rng.uniform(-3.0, 0.0, 2)
                s, t = -max(x, y), -min(x, y)
            worst = max(worst, sp.check_prop33(sh, s, t))
    assert worst <= 1e-10
    print("criterion 4: PASS  worst residual %.3g over 3x10^4 pairs" % worst)


def test_criterion_5_g2_verification(example_w):
    lines = []
    for delta in (1.0, sp.critical_exponent(5)):
        rep = sp.check_g2(example_w, delta)
        assert rep.passed
        assert np.isfinite(rep.details["c_g"])
        far = g2_left_side(example_w, delta, 1e3)
        mass = support_mass_delta(example_w, delta)
        assert abs(far / mass - 1.0) < 0.01
        lines.append("delta=%g C_g=%.4f far/limit=%.6f" % (delta, rep.details["c_g"],
                                                           far / mass))
    print("criterion 5: PASS  " + "; ".join(lines))


def test_criterion_6_positone_solve(example_spec, example_w, grid512, geometry512):
    t0 = time.time()
    sh = sp.ShiftedNonlinearity(example_spec, 0.0)
    sol = sp.mp_solve(sh, example_w, grid512, None, geometry512)
    elapsed = time.time() - t0
    assert elapsed < 300.0
    nh2 = sp.h2_norm(sol.u)
    assert sol.converged
    assert sol.residual / nh2 < 1e-4
    assert sol.level > 0.0
    assert np.min(sol.u.values) >= 0.0
    gv = sp.sample_on_grid(example_w, grid512).values
    src = RadialField(grid512, gv * sp.eval_fa(sh, sol.u.values))
    fit, pred = sp.decay_constant(sol.u, src)
    assert 0.9 <= fit / pred <= 1.1
    # frozen regression values from the first verified run
    assert sol.level == pytest.approx(FROZEN_LEVEL, rel=FROZEN_RTOL)
    assert nh2 == pytest.approx(FROZEN_NORM, rel=FROZEN_RTOL)
    print("criterion 6: PASS  c=%.6g ||Du||=%.6g rel_res=%.2e decay=%.4f %.1fs"
          % (sol.level, nh2, sol.residual / nh2, fit / pred, elapsed))


def test_criterion_7_semipositone_sweep(sweep512):
    report, elapsed = sweep512
    assert elapsed < 1800.0
    rows = report.rows
    s = report.summary
    assert len(rows) == 13  # 12 shifts plus the positone limit
    # (a) converged levels clear the rim
    for r in rows:
        if r.converged:
            assert r.level >= s["beta"] - 1e-6
    # (b) sup distance to the positone limit decreasing in a (5% slack)
    dists = [d for _, d in s["limit_sup_distance"]]
    assert len(dists) == 12
    for x, y in zip(dists, dists[1:]):
        assert y <= x * 1.05
    assert dists[-1] < dists[0]
    # (c) a threshold index exists
    assert s["threshold_index"] is not None
    # (d) uniform bound: three smallest positive shifts
    tail = [r.norm_h2 for r in rows if r.a > 0][-3:]
    assert max(tail) / min(tail) - 1.0 < 0.10
    # (e) beta1 positive
    assert s["beta1"] > 0
    print("criterion 7: PASS  %d rows, threshold_idx=%s beta1=%.4g %.1fs"
          % (len(rows), s["threshold_index"], s["beta1"], elapsed))


def test_criterion_8_directional_derivative(example_spec, example_w, grid256):
    sh = sp.ShiftedNonlinearity(example_spec, 0.5)
    rng = np.random.default_rng(11)
    fields = sp.random_trial_fields(grid256, 100, rng, n_lobes=3)
    worst = 0.0
    for k in range(50):
        u, v = fields[2 * k], fields[2 * k + 1]
        scale = max(1.0, sp.h2_norm(u))
        # F_a''' jumps where u crosses 0; h = 1e-5 scale balances that kink
        # error against central-difference cancellation noise
        h = 1e-5 * scale

        def diff(step):
            up = RadialField(grid256, u.values + step * v.values)
            dn = RadialField(grid256, u.values - step * v.values)
            return (sp.i_a(up, sh, example_w) - sp.i_a(dn, sh, example_w)) / (2.0 * step)

        extrap = (4.0 * diff(h / 2.0) - diff(h)) / 3.0
        exact = sp.weak_pairing(u, v, sh, example_w)
        rel = abs(extrap - exact) / max(1.0, abs(exact))
        worst = max(worst, rel)
    assert worst < 1e-5
    print("criterion 8: PASS  worst rel err %.3e over 50 pairs" % worst)


def test_criterion_9_hypothesis_checkers(example_spec, example_w):
    for chk in (sp.check_f1, sp.check_f2, sp.check_f3, sp.check_f4):
        assert chk(example_spec).passed
    assert sp.check_g1(example_w).passed
    for delta in (1.0, sp.critical_exponent(5)):
        assert sp.check_g2(example_w, delta).passed
    assert not sp.check_f2(sp.linear_nonlinearity()).passed
    misdeclared = sp.power_nonlinearity(3.0, gamma=3.5)
    assert not sp.check_f1(misdeclared).passed
    honest = sp.power_nonlinearity(3.0, gamma=4.0)
    assert sp.check_f1(honest).passed
    print("criterion 9: PASS  checker matrix as specified")
