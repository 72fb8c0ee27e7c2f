"""Ring-reduced Riesz kernels and potentials.

The inverse of Delta^2 on R^N is convolution with R4 |x|^{4-N}; -Delta of the
same function is convolution with R2 |x|^{2-N}. For radial sources the
convolution reduces to a one-dimensional integral against the spherical
average

    kappa_alpha(r, s) = int_{S^{N-1}} |r e1 - s w|^{-alpha} dsigma(w),

which this module assembles as a dense matrix over the grid. Potentials are
then plain matrix-vector products against the volume-weighted source.
"""

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.special import beta as _beta

from .radial_core import RadialField, sphere_area, same_grid, integrate

# Gauss-Legendre node counts for the two angular pieces. 64/64 puts the
# Newton-identity error at round-off for N up to 9 on 512-node grids.
_GL_INNER = 64
_GL_OUTER = 64


@dataclass(frozen=True)
class RieszConstants:
    dim: int
    r4: float
    r2: float


def riesz_constants(dim):
    om = sphere_area(dim)
    return RieszConstants(dim=dim,
                          r4=1.0 / (2.0 * (dim - 2) * (dim - 4) * om),
                          r2=1.0 / ((dim - 2) * om))


@dataclass(eq=False)
class KernelMatrix:
    alpha: float
    entries: np.ndarray
    grid: object


def _gl(nodes):
    x, w = np.polynomial.legendre.leggauss(nodes)
    return x, w


def _ring_values(dim, alpha, A, B):
    """kappa_alpha for arrays of A = |r-s|, B = 2 sqrt(rs), all A > 0, B > 0.

    After x = sin(theta/2) the angular integral is
        2^{N-1} |S^{N-2}| int_0^1 (A^2 + B^2 x^2)^{-alpha/2}
                            x^{N-2} (1 - x^2)^{(N-3)/2} dx.
    Piece 1 (x <= 1/sqrt 2) substitutes x = (A/B) sinh y, which absorbs the
    near-diagonal singularity; piece 2 (x >= 1/sqrt 2) substitutes x = sin u,
    which absorbs the endpoint branch of (1 - x^2)^{(N-3)/2}.
    """
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    N = dim
    xs = 1.0 / np.sqrt(2.0)

    y1, w1 = _gl(_GL_INNER)
    Y = np.arcsinh(B * xs / A)
    # map [-1,1] -> [0, Y]
    yy = 0.5 * Y[..., None] * (y1 + 1.0)
    jac1 = 0.5 * Y[..., None]
    sh = np.sinh(yy)
    ch = np.cosh(yy)
    x = (A / B)[..., None] * sh
    f1 = (A ** (N - 1.0 - alpha) * B ** (1.0 - N))[..., None] \
        * ch ** (1.0 - alpha) * sh ** (N - 2.0) \
        * (1.0 - x * x) ** ((N - 3.0) / 2.0)
    p1 = np.sum(f1 * w1 * jac1, axis=-1)

    u2, w2 = _gl(_GL_OUTER)
    lo = np.pi / 4.0
    hi = np.pi / 2.0
    uu = 0.5 * (hi - lo) * (u2 + 1.0) + lo
    jac2 = 0.5 * (hi - lo)
    su = np.sin(uu)
    cu = np.cos(uu)
    f2 = (A[..., None] ** 2 + (B[..., None] * su) ** 2) ** (-alpha / 2.0) \
        * su ** (N - 2.0) * cu ** (N - 2.0)
    p2 = np.sum(f2 * w2 * jac2, axis=-1)

    return 2.0 ** (N - 1.0) * sphere_area(N - 1) * (p1 + p2)


def ring_kernel_pairs(dim, r, s, alpha):
    """Pointwise kappa_alpha(r_i, s_i) for broadcast arrays of radii.

    Handles r = 0 or s = 0 (exact omega_N max^{-alpha}) and r = s > 0
    (closed Beta form, needs alpha < N - 1; +inf otherwise).
    """
    r, s = np.broadcast_arrays(np.asarray(r, dtype=float), np.asarray(s, dtype=float))
    out = np.empty(r.shape)
    om = sphere_area(dim)

    zero = (r == 0) | (s == 0)
    diag = (r == s) & ~zero
    rest = ~zero & ~diag

    if np.any(zero):
        m = np.maximum(r[zero], s[zero])
        with np.errstate(divide="ignore"):
            out[zero] = np.where(m > 0, om * m ** (-alpha), np.inf)
    if np.any(diag):
        if alpha < dim - 1:
            const = 2.0 ** (dim - 1.0) * sphere_area(dim - 1) \
                * 0.5 * _beta((dim - 1.0 - alpha) / 2.0, (dim - 1.0) / 2.0)
            out[diag] = const * (2.0 * r[diag]) ** (-alpha)
        else:
            out[diag] = np.inf
    if np.any(rest):
        A = np.abs(r[rest] - s[rest])
        B = 2.0 * np.sqrt(r[rest] * s[rest])
        out[rest] = _ring_values(dim, alpha, A, B)
    return out


_KERNEL_CACHE = {}
_CACHE_VERSION = 1


def ring_kernel(grid, alpha, cache=True):
    """Dense kappa_alpha(r_i, s_j) matrix over the grid.

    alpha must lie in (0, N): at the diagonal the volume-weighted integrand
    s^{N-1} |r-s|^{...} stops being integrable at alpha = N. Pointwise
    diagonal entries additionally need alpha < N - 1 (true for the production
    exponents N-4 and N-2); the r = 0 diagonal entry is set to 0 since its
    volume weight vanishes identically.
    """
    if not 0 < alpha < grid.dim:
        raise ValueError("alpha=%g outside (0, N=%d)" % (alpha, grid.dim))
    key = grid.key() + (round(float(alpha), 12),)
    if cache and key in _KERNEL_CACHE:
        return _KERNEL_CACHE[key]

    r = grid.r
    n = grid.n
    entries = np.empty((n, n))
    # row/column 0 exactly
    with np.errstate(divide="ignore"):
        col = np.where(r > 0, grid.sphere_area * r ** (-float(alpha)), 0.0)
    entries[0, :] = col
    entries[:, 0] = col
    entries[0, 0] = 0.0

    rr = r[1:]
    A = np.abs(rr[:, None] - rr[None, :])
    B = 2.0 * np.sqrt(rr[:, None] * rr[None, :])
    iu = np.triu_indices(n - 1, k=1)
    vals = _ring_values(grid.dim, float(alpha), A[iu], B[iu])
    block = np.zeros((n - 1, n - 1))
    block[iu] = vals
    block = block + block.T
    dconst = 2.0 ** (grid.dim - 1.0) * sphere_area(grid.dim - 1) \
        * 0.5 * _beta((grid.dim - 1.0 - alpha) / 2.0, (grid.dim - 1.0) / 2.0)
    np.fill_diagonal(block, dconst * (2.0 * rr) ** (-float(alpha)))
    entries[1:, 1:] = block

    km = KernelMatrix(alpha=float(alpha), entries=entries, grid=grid)
    if cache:
        _KERNEL_CACHE[key] = km
    return km


def save_kernel(km, path):
    """Binary cache of one kernel matrix with a version header."""
    np.savez(path, version=_CACHE_VERSION, alpha=km.alpha,
             dim=km.grid.dim, n=km.grid.n, r_max=km.grid.r_max,
             entries=km.entries)


def load_kernel(path, grid):
    with np.load(path) as z:
        if int(z["version"]) != _CACHE_VERSION:
            raise ValueError("kernel cache version %s unsupported" % z["version"])
        if (int(z["dim"]), int(z["n"]), float(z["r_max"])) != grid.key():
            raise ValueError("kernel cache grid mismatch")
        return KernelMatrix(alpha=float(z["alpha"]), entries=z["entries"], grid=grid)


def apply_potential(kernel, h):
    """(I h)(r_i) = sum_j kappa(r_i, s_j) h(s_j) s_j^{N-1} w_j.

    kappa already integrates over the sphere, so the quadrature carries the
    radial measure only.
    """
    if not same_grid(kernel.grid, h.grid):
        raise ValueError("grid mismatch between kernel and field")
    g = h.grid
    src = h.values * g.r ** (g.dim - 1) * g.w
    return RadialField(g, kernel.entries @ src)


class RieszSolution(NamedTuple):
    u: RadialField
    neg_lap: RadialField


def riesz_solve(h, constants=None):
    """u with Delta^2 u = h, via u = R4 I_{N-4} h, and -Delta u = R2 I_{N-2} h."""
    g = h.grid
    if not np.all(np.isfinite(h.values)):
        raise ValueError("source has non-finite values (divergent norms)")
    c = constants or riesz_constants(g.dim)
    k4 = ring_kernel(g, g.dim - 4)
    k2 = ring_kernel(g, g.dim - 2)
    u = apply_potential(k4, h)
    u.values *= c.r4
    neg_lap = apply_potential(k2, h)
    neg_lap.values *= c.r2
    return RieszSolution(u=u, neg_lap=neg_lap)


def weak_lp_profile(dim, alpha):
    """sup_s s^{N/(N-4)} |{ |x|^{4-N} > s }|, which must equal omega_N / N.

    The level set is the ball of radius rho(s) solving rho^{4-N} = s; rho is
    recovered numerically (bracketed root) and the measure analytically.
    """
    from scipy.optimize import brentq

    if alpha != dim - 4:
        raise ValueError("profile is defined for the biharmonic exponent alpha = N - 4")
    om = sphere_area(dim)
    p = dim / (dim - 4.0)
    vals = []
    for s in np.geomspace(1e-3, 1e3, 25):
        rho = brentq(lambda t: t ** (4.0 - dim) - s, 1e-12, 1e12, xtol=1e-15, rtol=1e-15)
        measure = om / dim * rho ** dim
        vals.append(s ** p * measure)
    vals = np.asarray(vals)
    if np.ptp(vals) > 1e-10 * vals.max():
        raise AssertionError("level-set profile is not constant in s")
    return float(vals.max())


def decay_constant(u, source, constants=None):
    """Far-field law r^{N-4} u(r) -> R4 int source.

    fitted: median of r^{N-4} u(r) over the outer half of the grid;
    predicted: R4 times the integral of the source. Both are returned; a
    non-positive prediction is flagged in the result.
    """
    g = u.grid
    c = constants or riesz_constants(g.dim)
    outer = g.r >= 0.5 * g.r_max
    fitted = float(np.median(g.r[outer] ** (g.dim - 4) * u.values[outer]))
    predicted = float(c.r4 * integrate(source))
    return fitted, predicted
