"""Nonlinearity families f, the shift f_a, the positone limit f_0, primitives,
and samplable growth/monotonicity checks.

Conventions:
    f_a(t) = f(t) - a for t >= 0,   f_a(t) = -a for t <= 0,
    f_0(t) = f(t)     for t >= 0,   f_0(t) = 0  for t <= 0,
    F(t) = int_0^t f,  F_a(t) = F(t) - a t (t >= 0),  F_a(t) = -a t (t <= 0).

The growth hypotheses are limits and monotonicity statements; the checkers
here sample dense logarithmic grids and report falsifiable evidence, they do
not prove anything.
"""

import functools
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.integrate import quad

T_BIG = 1e6          # top of the default sampling range
_ORIGIN_TOL = 0.01   # f(t)/t must sit below this on the smallest decade
_GROWTH_TOL = 0.05   # slack on the subcritical ratio bound


def critical_exponent(dim):
    """2** = 2N/(N-4), the D^{2,2} Sobolev exponent."""
    if dim < 5:
        raise ValueError("dim=%d rejected: the problem class needs N >= 5" % dim)
    return 2.0 * dim / (dim - 4.0)


@dataclass(frozen=True)
class NonlinearitySpec:
    f: Callable
    gamma: float
    c_f: float
    r_mono: float
    lipschitz: bool
    dim: int = 5
    name: str = "custom"
    F_closed: Optional[Callable] = None
    fprime: Optional[Callable] = None

    def __post_init__(self):
        two_ss = critical_exponent(self.dim)
        if not 2.0 < self.gamma < two_ss:
            raise ValueError(
                "gamma=%g must lie in (2, 2**) = (2, %g) for N=%d"
                % (self.gamma, two_ss, self.dim))
        f0 = float(self.f(0.0))
        if abs(f0) > 0.0:
            raise ValueError("f(0)=%g but the hypotheses need f(0)=0 exactly" % f0)


@dataclass(frozen=True)
class ShiftedNonlinearity:
    """f_a = f - a on t >= 0 and -a on t <= 0; a = 0 is the positone limit f_0."""
    base: NonlinearitySpec
    a: float

    def __post_init__(self):
        if self.a < 0:
            raise ValueError("shift a must be nonnegative")


def example_nonlinearity(dim=5, gamma=2.5):
    """The built-in log-type example f(t) = 2 t ln(1 + t) with closed forms."""
    def f(t):
        t = np.asarray(t, dtype=float)
        return 2.0 * t * np.log1p(np.abs(t))

    def F(t):
        t = np.asarray(t, dtype=float)
        return (t * t - 1.0) * np.log1p(t) - 0.5 * t * t + t

    def fprime(t):
        t = np.asarray(t, dtype=float)
        return 2.0 * np.log1p(t) + 2.0 * t / (1.0 + t)

    return NonlinearitySpec(f=f, gamma=float(gamma), c_f=1.0, r_mono=1.0,
                            lipschitz=True, dim=dim, name="paper_example",
                            F_closed=F, fprime=fprime)


def power_nonlinearity(power, dim=5, gamma=None, coef=1.0):
    """f(t) = coef t^power; gamma defaults to the exact growth power + 1."""
    if gamma is None:
        gamma = power + 1.0

    def f(t):
        t = np.asarray(t, dtype=float)
        return coef * t ** power

    def F(t):
        t = np.asarray(t, dtype=float)
        return coef * t ** (power + 1.0) / (power + 1.0)

    def fprime(t):
        t = np.asarray(t, dtype=float)
        return coef * power * t ** (power - 1.0)

    return NonlinearitySpec(f=f, gamma=float(gamma), c_f=float(coef),
                            r_mono=1.0, lipschitz=power >= 1, dim=dim,
                            name="power", F_closed=F, fprime=fprime)


def linear_nonlinearity(slope=1.0, dim=5, gamma=2.5):
    """f(t) = slope * t. Fails superlinearity; used as a checker counterexample."""
    def f(t):
        t = np.asarray(t, dtype=float)
        return slope * t

    def F(t):
        t = np.asarray(t, dtype=float)
        return 0.5 * slope * t * t

    return NonlinearitySpec(f=f, gamma=float(gamma), c_f=float(slope),
                            r_mono=1.0, lipschitz=True, dim=dim, name="linear",
                            F_closed=F, fprime=lambda t: np.full_like(np.asarray(t, dtype=float), slope))


def zero_nonlinearity(dim=5, gamma=2.5):
    """f identically 0; the shifted problem is pure -a (no superlinearity)."""
    def f(t):
        return np.zeros_like(np.asarray(t, dtype=float))

    return NonlinearitySpec(f=f, gamma=float(gamma), c_f=1.0, r_mono=1.0,
                            lipschitz=True, dim=dim, name="zero",
                            F_closed=lambda t: np.zeros_like(np.asarray(t, dtype=float)),
                            fprime=lambda t: np.zeros_like(np.asarray(t, dtype=float)))


def eval_f(spec, t):
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValueError("eval_f takes t >= 0; use eval_f0 for signed arguments")
    return spec.f(t)


def eval_F(spec, t):
    """Primitive F(t) = int_0^t f; closed form if registered, else QUADPACK
    with 1e-10 absolute tolerance."""
    if spec.F_closed is not None:
        return spec.F_closed(np.asarray(t, dtype=float))
    scalar = np.isscalar(t)
    tt = np.atleast_1d(np.asarray(t, dtype=float))
    if np.any(tt < 0):
        raise ValueError("eval_F takes t >= 0")
    out = np.array([quad(spec.f, 0.0, x, epsabs=1e-10, limit=200)[0] for x in tt])
    return float(out[0]) if scalar else out


def eval_f0(spec, t):
    t = np.asarray(t, dtype=float)
    pos = t > 0
    out = np.zeros_like(t)
    if np.any(pos):
        out[pos] = spec.f(t[pos])
    return out if out.ndim else float(out)


def eval_fa(shifted, t):
    t = np.asarray(t, dtype=float)
    out = eval_f0(shifted.base, t) - shifted.a
    return out if np.ndim(out) else float(out)


def eval_Fa(shifted, t):
    t = np.asarray(t, dtype=float)
    pos = t > 0
    out = -shifted.a * t
    if np.any(pos):
        out = np.where(pos, np.asarray(eval_F(shifted.base, np.where(pos, t, 0.0)))
                       - shifted.a * t, out)
    return out if out.ndim else float(out)


def eval_f0prime(spec, t):
    """Derivative of f_0 where it exists (0 on t < 0); needs a registered fprime."""
    if spec.fprime is None:
        raise ValueError("spec has no registered derivative")
    t = np.asarray(t, dtype=float)
    pos = t > 0
    out = np.zeros_like(t)
    if np.any(pos):
        out[pos] = spec.fprime(t[pos])
    return out


@functools.lru_cache(maxsize=64)
def growth_envelope(spec, eps):
    """Smallest sampled C with f(t) <= eps t + C t^{gamma-1} on t > 0.

    Least-upper fit over a dense log grid, refined linearly around the argmax
    so points falling between log-grid samples stay dominated too, then bumped
    by a hair.
    """
    def ratio(tt):
        return (np.asarray(eval_f(spec, tt)) - eps * tt) / tt ** (spec.gamma - 1.0)

    t = np.geomspace(1e-8, T_BIG, 4001)
    rho = ratio(t)
    i = int(np.argmax(rho))
    fine = np.linspace(t[max(i - 1, 0)], t[min(i + 1, t.size - 1)], 20001)
    c = max(float(np.max(rho)), float(np.max(ratio(fine))))
    return float(max(c, 0.0) * (1.0 + 1e-9) + 1e-300)


def c_r_constant(spec, eps):
    """C_R = (eps/2) R^2 + (C/gamma) R^gamma with R = r_mono and the
    registered envelope pair (eps, C)."""
    C = growth_envelope(spec, eps)
    R = spec.r_mono
    return 0.5 * eps * R * R + C / spec.gamma * R ** spec.gamma


@dataclass
class CheckReport:
    name: str
    passed: bool
    details: dict = field(default_factory=dict)


def _default_samples():
    return np.geomspace(1e-6, T_BIG, 2000)


def check_f1(spec, t_samples=None):
    """f(t)/t -> 0 at the origin and f(t)/t^{gamma-1} bounded by c_f at the top."""
    t = _default_samples() if t_samples is None else np.asarray(t_samples, dtype=float)
    if t.size == 0:
        raise ValueError("empty sample set")
    t = t[t > 0]
    ft = np.asarray(eval_f(spec, t))
    small = t <= 10.0 * t.min()
    origin_ratio = float(np.max(np.abs(ft[small] / t[small])))
    big = t >= t.max() / 10.0
    growth_ratio = float(np.max(ft[big] / t[big] ** (spec.gamma - 1.0)))
    origin_ok = origin_ratio <= _ORIGIN_TOL
    growth_ok = growth_ratio <= spec.c_f * (1.0 + _GROWTH_TOL)
    return CheckReport("f1", origin_ok and growth_ok, {
        "origin_ratio": origin_ratio, "growth_ratio": growth_ratio,
        "c_f": spec.c_f, "origin_ok": origin_ok, "growth_ok": growth_ok})


def check_f2(spec, t_samples=None, probes=(1.0, 10.0)):
    """f(t)/t must exceed every probe level somewhere in the sample range."""
    t = _default_samples() if t_samples is None else np.asarray(t_samples, dtype=float)
    if t.size == 0:
        raise ValueError("empty sample set")
    t = t[t > 0]
    ratio = np.asarray(eval_f(spec, t)) / t
    exceeded = {float(m): bool(np.any(ratio > m)) for m in probes}
    return CheckReport("f2", all(exceeded.values()), {
        "max_ratio": float(np.max(ratio)), "probes": exceeded})


def check_f3(spec, t_samples=None):
    """Discrete monotonicity of f(t)/t beyond the registered threshold R."""
    t = _default_samples() if t_samples is None else np.asarray(t_samples, dtype=float)
    if t.size == 0:
        raise ValueError("empty sample set")
    t = np.sort(t[t > spec.r_mono])
    ratio = np.asarray(eval_f(spec, t)) / t
    drops = np.diff(ratio)
    worst = float(np.min(drops)) if drops.size else 0.0
    ok = worst >= -1e-12 * max(1.0, float(np.max(np.abs(ratio))))
    return CheckReport("f3", ok, {"worst_drop": worst, "r_mono": spec.r_mono})


def check_f4(spec, t_samples=None, compact=100.0):
    """Difference quotients on [0, compact] must stay bounded as the step
    shrinks (growth between scales reads as a Lipschitz failure)."""
    t = _default_samples() if t_samples is None else np.asarray(t_samples, dtype=float)
    if t.size == 0:
        raise ValueError("empty sample set")
    base = np.unique(np.clip(t[t <= compact], 0.0, compact))
    scales = (1e-2, 1e-4, 1e-6)
    maxq = []
    for hstep in scales:
        pts = base[base + hstep <= compact]
        q = np.abs(np.asarray(eval_f(spec, pts + hstep)) - np.asarray(eval_f(spec, pts))) / hstep
        maxq.append(float(np.max(q)))
    growth = max(maxq[i + 1] / maxq[i] for i in range(len(maxq) - 1)) if maxq[0] > 0 else 1.0
    ok = growth <= 2.0
    return CheckReport("f4", ok, {"max_quotients": maxq, "scale_growth": growth})


def check_prop33(shifted, s, t, eps=0.5):
    """Residual of F_a(s) - F_a(t) <= (s^2 - t^2)/(2s) f_a(s) + C_R on the
    admissible orderings 0 < t <= s or s <= t < 0. Negative residual = holds."""
    if not ((0 < t <= s) or (s <= t < 0)):
        raise ValueError("(s, t)=(%g, %g) outside the admissible orderings" % (s, t))
    lhs = eval_Fa(shifted, s) - eval_Fa(shifted, t)
    rhs = (s * s - t * t) / (2.0 * s) * eval_fa(shifted, s)
    return float(lhs - rhs - c_r_constant(shifted.base, eps))


def prop33_negative_excess(shifted, s, t):
    """Exact excess of the negative branch: for s <= t < 0,

        [F_a(s) - F_a(t)] - (s^2 - t^2)/(2s) f_a(s) = a (t - s)^2 / (2|s|) >= 0,

    so the chain claimed for that branch runs the other way; the factor-2
    relaxation lhs <= 2 * rhs holds exactly instead. Returns the excess."""
    if not (s <= t < 0):
        raise ValueError("negative branch needs s <= t < 0")
    return shifted.a * (t - s) ** 2 / (2.0 * abs(s))
