"""Variational layer: the functionals G, N_a, I_a over radial fields, the
gradient realized through the Riesz fixed-point map T(u) = riesz_solve(g f_a(u)),
and empirical estimation of the mountain-pass geometry constants.

Norm convention: the energy space is D^{2,2}, norm ||Delta u||_2; h2_inner
from radial_core realizes it with the finite-difference Laplacian. Inside the
power iteration for B_g the inner products are taken through the kernel route
instead (the map u -> riesz_solve(g u).u is exactly self-adjoint there, which
keeps the Rayleigh quotients monotone).
"""

from dataclasses import dataclass, asdict

import numpy as np

from . import radial_core as rc
from .nonlinearity import (eval_Fa, eval_fa, eval_f0prime, growth_envelope,
                           c_r_constant)
from .weight import sample_on_grid
from .riesz_potential import riesz_solve

_BG_TOL = 1e-12
_BG_MAX_ITER = 500
_SAFETY = 1.5


def _g_values(weight, grid):
    if isinstance(weight, rc.RadialField):
        return weight.values
    return sample_on_grid(weight, grid).values


def big_g(u, weight):
    """G(u) = int g u^2."""
    g = _g_values(weight, u.grid)
    return rc.integrate(rc.RadialField(u.grid, g * u.values ** 2))


def n_a(u, shifted, weight):
    """N_a(u) = int g F_a(u)."""
    g = _g_values(weight, u.grid)
    return rc.integrate(rc.RadialField(u.grid, g * eval_Fa(shifted, u.values)))


def i_a(u, shifted, weight):
    """I_a(u) = ||Delta u||^2 / 2 - N_a(u)."""
    return 0.5 * rc.h2_inner(u, u) - n_a(u, shifted, weight)


def weak_pairing(u, v, shifted, weight):
    """<I_a'(u), v> = int Delta u Delta v - int g f_a(u) v."""
    g = _g_values(weight, u.grid)
    nonlin = rc.integrate(rc.RadialField(u.grid, g * eval_fa(shifted, u.values) * v.values))
    return rc.h2_inner(u, v) - nonlin


def gradient_map(u, shifted, weight):
    """The fixed-point map T(u) = riesz_solve(g f_a(u)).u and the gradient
    residual ||Delta(u - T(u))||_2; residual 0 characterizes discrete weak
    solutions."""
    g = _g_values(weight, u.grid)
    with np.errstate(over="ignore", invalid="ignore"):
        src = g * eval_fa(shifted, u.values)
    if not np.all(np.isfinite(src)):
        raise ValueError("divergent source norm: g f_a(u) is not finite at all nodes")
    t_u = riesz_solve(rc.RadialField(u.grid, src)).u
    diff = rc.RadialField(u.grid, u.values - t_u.values)
    return t_u, rc.h2_norm(diff)


@dataclass
class EnergyReport:
    value: float
    norm_h2: float
    nonlinear_term: float
    grad_residual: float

    def to_dict(self):
        return asdict(self)


def energy_report(u, shifted, weight):
    nh2 = rc.h2_norm(u)
    nl = n_a(u, shifted, weight)
    _, res = gradient_map(u, shifted, weight)
    return EnergyReport(value=0.5 * nh2 ** 2 - nl, norm_h2=nh2,
                        nonlinear_term=nl, grad_residual=res)


@dataclass
class GeometryConstants:
    b_g: float
    eps: float
    c_gamma: float
    rho: float
    beta: float
    a1: float
    c_lin: float
    rho1: float
    c_env: float
    gamma: float

    def to_dict(self):
        return asdict(self)


def estimate_bg(weight, grid, tol=_BG_TOL, max_iter=_BG_MAX_ITER,
                return_field=False):
    """Largest eigenvalue of int g u^2 relative to ||Delta u||^2 by power
    iteration on M(u) = riesz_solve(g u).u.

    M is self-adjoint and positive in the D^{2,2} inner product, and both
    <u, Mu>_D = int g u^2 and ||Mu||_D^2 = int g u Mu reduce to plain
    weighted quadratures, so the iteration never differentiates anything.
    """
    g = _g_values(weight, grid)
    mass = g * grid.r ** (grid.dim - 1) * grid.w * grid.sphere_area

    def m_apply(vals):
        return riesz_solve(rc.RadialField(grid, g * vals)).u.values

    def wdot(x, y):
        return float(np.sum(mass * x * y))

    v = np.exp(-((grid.r - 0.75) ** 2))  # anything with mass on the support
    if wdot(v, v) == 0.0:
        return (0.0, rc.zeros(grid)) if return_field else 0.0
    lam_prev = np.inf
    for _ in range(max_iter):
        mv = m_apply(v)
        # <Mv, Mv>_D = int g v (Mv) by the representation, for any v
        norm_d = np.sqrt(wdot(v, mv))
        if norm_d == 0.0:
            return (0.0, rc.zeros(grid)) if return_field else 0.0
        v = mv / norm_d  # D-normalized from here on
        lam = wdot(v, v)  # Rayleigh quotient <v, Mv>_D = int g v^2
        if abs(lam - lam_prev) <= tol * max(lam, 1e-300):
            return (lam, rc.RadialField(grid, v)) if return_field else lam
        lam_prev = lam
    raise RuntimeError("power iteration for B_g did not converge in %d steps"
                       % max_iter)


def random_trial_fields(grid, count, rng, n_lobes=4, r_span=None):
    """Smooth random fields: sums of gaussian lobes with random centers,
    widths and signed amplitudes. Not normalized."""
    if r_span is None:
        r_span = 0.5 * grid.r_max
    fields = []
    for _ in range(count):
        vals = np.zeros(grid.n)
        for _ in range(n_lobes):
            c = rng.uniform(0.0, r_span)
            w = rng.uniform(0.3, 1.5)
            amp = rng.normal()
            vals += amp * np.exp(-((grid.r - c) ** 2) / (2.0 * w * w))
        fields.append(rc.RadialField(grid, vals))
    return fields


def _focused_trial_fields(weight, grid):
    """Deterministic shapes concentrated where g lives; these dominate the
    weighted-vs-D ratios and keep the empirical constants honest (pure random
    lobes rarely sit on a thin annulus)."""
    mid = 0.5 * (weight.r_in + weight.r_out)
    fields = []
    for width in (0.15, 0.3, 0.6, 1.0, 2.0):
        fields.append(rc.RadialField(
            grid, np.exp(-((grid.r - mid) ** 2) / (2.0 * width * width))))
    for R in (1.5, 2.0, 3.0, 5.0):
        x = np.clip(grid.r / R, 0.0, 1.0)
        fields.append(rc.RadialField(grid, (1.0 - x * x) ** 4))
    try:
        _, phi = estimate_bg(weight, grid, return_field=True)
        fields.append(phi)
    except RuntimeError:
        pass
    return fields


def _empirical_ratio(fields, g, power):
    """max over fields of int g |u|^power / ||Delta u||^power."""
    best = 0.0
    for u in fields:
        nh2 = rc.h2_norm(u)
        if nh2 == 0:
            continue
        num = rc.integrate(rc.RadialField(u.grid, g * np.abs(u.values) ** power))
        best = max(best, num / nh2 ** power)
    return best


def estimate_a1(spec, weight, grid, eps=None, n_fields=100, seed=7,
                safety=_SAFETY):
    """Mountain-pass geometry constants for the shifted family built on spec.

    Chain: with q = 1/2 - (eps/2) B_g and c_gamma the (safety-inflated)
    empirical constant of int g|u|^gamma <= c_gamma ||Delta u||^gamma,

        I_a(u) >= A(rho) - a c_lin rho on ||Delta u|| = rho,
        A(rho) = q rho^2 - c_gamma rho^gamma,

    maximized at rho* = (2q / (gamma c_gamma))^{1/(gamma-2)}; the first
    nontrivial zero is rho1 = (q / c_gamma)^{1/(gamma-2)} > rho*. Splitting
    A(rho*) in half between rim level and shift budget gives

        a1 = A(rho*) / (2 c_lin rho*),   beta = A(rho*) / 2.
    """
    gamma = spec.gamma
    b_g = estimate_bg(weight, grid)
    gn4 = weight.norm(grid.dim / 4.0)
    cap = 1.0 / (b_g * gn4) if b_g * gn4 > 0 else np.inf
    if eps is None:
        eps = 0.5 * cap
    if not eps < cap:
        raise ValueError("eps=%g must stay below 1/(B_g ||g||_{N/4}) = %g"
                         % (eps, cap))
    q = 0.5 - 0.5 * eps * b_g
    if q <= 0:
        raise ValueError("geometry collapsed: quadratic coefficient q=%g <= 0" % q)

    rng = np.random.default_rng(seed)
    fields = random_trial_fields(grid, n_fields, rng) + _focused_trial_fields(weight, grid)
    g = _g_values(weight, grid)
    c_env = growth_envelope(spec, eps)
    e_gamma = _empirical_ratio(fields, g, gamma) * safety
    c_lin = _empirical_ratio(fields, g, 1.0) * safety
    c_gamma = c_env / gamma * e_gamma
    if c_gamma <= 0 or c_lin <= 0:
        raise ValueError("degenerate constants: c_gamma=%g, c_lin=%g (A has no "
                         "positive zero to work under)" % (c_gamma, c_lin))

    rho1 = (q / c_gamma) ** (1.0 / (gamma - 2.0))
    rho_star = (2.0 * q / (gamma * c_gamma)) ** (1.0 / (gamma - 2.0))
    a_rho = q * rho_star ** 2 * (gamma - 2.0) / gamma
    a1 = a_rho / (2.0 * c_lin * rho_star)
    beta = 0.5 * a_rho
    return GeometryConstants(b_g=b_g, eps=eps, c_gamma=c_gamma, rho=rho_star,
                             beta=beta, a1=a1, c_lin=c_lin, rho1=rho1,
                             c_env=c_env, gamma=gamma)


def rim_levels(shifted, weight, geometry, grid, n_fields=100, seed=11):
    """I_a over n_fields random fields scaled to the rim ||Delta u|| = rho*;
    the geometry promises min >= beta for a < a1."""
    rng = np.random.default_rng(seed)
    fields = random_trial_fields(grid, n_fields, rng)
    levels = []
    for u in fields:
        nh2 = rc.h2_norm(u)
        if nh2 == 0:
            continue
        scaled = rc.RadialField(grid, u.values * (geometry.rho / nh2))
        levels.append(i_a(scaled, shifted, weight))
    return np.asarray(levels)


def lower_bound_beta1(solutions):
    """Empirical beta_1: the smallest sup norm among computed solutions.
    Accepts RadialFields or plain sup-norm floats."""
    sups = []
    for s in solutions:
        if isinstance(s, rc.RadialField):
            sups.append(float(np.max(np.abs(s.values))))
        else:
            sups.append(float(s))
    if not sups:
        raise ValueError("empty sweep: no solutions to bound")
    return min(sups)


def prop33_constant(spec, eps=0.5):
    """C_R of the two-sided comparison used in the compactness argument."""
    return c_r_constant(spec, eps)


def fa_prime_values(shifted, values):
    """Derivative of f_a along a field: f'(u) where u > 0, 0 where u <= 0."""
    return eval_f0prime(shifted.base, values)
