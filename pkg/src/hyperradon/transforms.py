"""Radon and Abel transforms along a_s, the profile G_f, F(z) and its Taylor data.

Two independent routes to R f(s):

* ``radon_direct`` integrates f over N^* through the closed-form orbit
  a_s exp(N) x0, in the free/tail/w coordinates of the nilpotent parameter
  (tail in polar form, w box scaled by e^{-s} because the orbit only sees
  e^s w).  Works for every p, q.
* ``radon_reduced`` (p < q) uses v = -sinh s + e^s |v'|^2 / 2, |v'| on the
  unit sphere and w-bar = e^s w, leaving a half-line in v with the endpoint
  weight (1 + 2 z v - z^2)^{(dq-dp)/2 - 1}, z = e^{-s}.

The measure on N^* is plain Lebesgue measure in these coordinates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from math import factorial

import numpy as np

from .geometry import assemble, fconj, orbit_points
from .params import OperatorD, SpaceParams, k0_eps, rho_1
from .quadrature import (
    Axis, NoConvergence, QuadratureSpec, box_axes, gauss_legendre, halfline_rule,
    integrate_product, sphere_axes, sphere_points,
)
from .testfuncs import DecayKind, TestFunction


class DomainError(ValueError):
    """G_f was requested outside the cone t1^2 - t2^2 - t3^2 < 0."""


class GridTooCoarse(ValueError):
    """Finite-difference noise amplification exceeds the requested tolerance."""


class StepAuditFailure(RuntimeError):
    """Halving the z-step changed a Taylor coefficient beyond tolerance."""


# ---------------------------------------------------------------------------
# finite-difference weights

def fd_weights(offsets, deriv: int):
    """Weights c_k with sum c_k g(x + k h) ~ h^deriv g^(deriv)(x)."""
    offsets = np.asarray(offsets, dtype=float)
    n = len(offsets)
    A = np.vander(offsets, n, increasing=True).T
    b = np.zeros(n)
    b[deriv] = factorial(deriv)
    return np.linalg.solve(A, b)


def central_stencil(deriv: int, order: int = 8):
    """Symmetric stencil (offsets, weights) of the given even accuracy order."""
    half = (deriv + order - 1) // 2
    offsets = np.arange(-half, half + 1)
    return offsets, fd_weights(offsets, deriv)


# ---------------------------------------------------------------------------
# point assembly for the reduced / G_f forms

def _mid_blocks(sp: SpaceParams, u):
    """Positive middle conj(u) and the dependent first p negative entries reverse(u)."""
    k = u.shape[0]
    ub = u.reshape(k, sp.p, sp.d)
    return fconj(ub), ub[:, ::-1, :]


def g_points(sp: SpaceParams, t1, t2, t3, sigma, u, wbar):
    """Points (wbar + t1, u; u, t2 sigma, t3 + wbar) in the package layout.

    Arrays are (k,) for t's, (k, d(q-p)) for sigma, (k, dp) for u and
    (k, d-1) for wbar.
    """
    k = len(t1)
    d = sp.d
    first = np.empty((k, d))
    last = np.empty((k, d))
    first[:, :-1] = wbar
    last[:, :-1] = wbar
    first[:, -1] = t1
    last[:, -1] = t3
    mpos, mneg_u = _mid_blocks(sp, u)
    tail = (t2[:, None] * sigma).reshape(k, sp.q - sp.p, d)
    mneg = np.concatenate([mneg_u, tail], axis=1)
    return assemble(sp, first, mpos, mneg, last)


def _require_reduced(sp: SpaceParams):
    if sp.p >= sp.q:
        raise ValueError(f"the reduced representation needs p < q; {sp.label()} uses radon_direct")


def _alpha(sp: SpaceParams) -> float:
    return sp.codim / 2.0 - 1.0


def _cone_axes(sp: SpaceParams, spec: QuadratureSpec):
    """Axes for S^{d(q-p)-1} x R^{dp} x R^{d-1} and the column slices they fill."""
    r = sp.codim - 1
    sph = sphere_axes(r, spec)
    axes = list(sph) + box_axes(sp.d * sp.p, spec) + box_axes(sp.d - 1, spec)
    return axes, len(sph), r


def _split_cone(X, sp, start, n_sph, r):
    sig = sphere_points(X[:, start:start + n_sph], r)
    j = start + n_sph
    u = X[:, j:j + sp.d * sp.p]
    j += sp.d * sp.p
    wbar = X[:, j:j + sp.d - 1]
    return sig, u, wbar


# ---------------------------------------------------------------------------
# Radon transform

def radon_direct(f: TestFunction, sp: SpaceParams, s: float, spec: QuadratureSpec, strict=True):
    """R f(s) as the integral of f over N^* through the orbit formula.

    The tail block (u' or v') is integrated in polar coordinates so that the
    shell |v'|^2 ~ 2 e^{-s} sinh s is resolved by a one-dimensional rule.
    """
    f.check_space(sp)
    d = sp.d
    nfree = d * min(sp.p, sp.q)
    m = d * abs(sp.q - sp.p)
    T = spec.truncation_radius
    if sp.p >= sp.q and f.decay.kind is DecayKind.COMPACT and f.decay.R:
        # every coordinate sits in x+, and |x+|^2 < sinh^2 R on the support
        T = min(T, math.sinh(f.decay.R))
    axes = box_axes(nfree, spec, radius=T)
    n_sph = 0
    if m:
        axes.append(Axis(lambda n: gauss_legendre(n, 0.0, T), spec.nodes_per_dim, "radius"))
        sph = sphere_axes(m - 1, spec)
        n_sph = len(sph)
        axes += sph
    axes += box_axes(d - 1, spec, radius=T * math.exp(-s))

    def integrand(X):
        free = X[:, :nfree]
        j = nfree
        if m:
            rad = X[:, j]
            sig = sphere_points(X[:, j + 1:j + 1 + n_sph], m - 1)
            tail = rad[:, None] * sig
            jac = rad ** (m - 1)
            j += 1 + n_sph
        else:
            tail = np.zeros((len(X), 0))
            jac = 1.0
        w = X[:, j:j + d - 1]
        pts = orbit_points(sp, s, free, tail, w)
        return f.batch(pts, sp) * jac

    return integrate_product(integrand, axes, spec, strict=strict)


def radon_reduced(f: TestFunction, sp: SpaceParams, s: float, spec: QuadratureSpec, strict=True):
    """R f(s) = e^{-ds} int_{-sinh s}^inf int f[...] (1 + 2zv - z^2)^alpha, z = e^{-s}."""
    _require_reduced(sp)
    f.check_space(sp)
    z = math.exp(-s)
    a = -math.sinh(s)
    alpha = _alpha(sp)
    hspec = spec.with_(endpoint_power=alpha)
    vaxis = Axis(lambda n: halfline_rule(n, a, hspec)[:2], spec.nodes_per_dim, "v")
    cone, n_sph, r = _cone_axes(sp, spec)

    def integrand(X):
        v = X[:, 0]
        sig, u, wbar = _split_cone(X, sp, 1, n_sph, r)
        r2 = np.maximum(2.0 * z * (v - a), 0.0)
        pts = g_points(sp, -v, -np.sqrt(r2), z - v, sig, u, wbar)
        return f.batch(pts, sp) * r2 ** alpha

    val, err = integrate_product(integrand, [vaxis] + cone, hspec, strict=strict)
    scale = math.exp(-sp.d * s)
    return val * scale, err * scale


def radon(f, sp, s, spec, method="auto", strict=True):
    if method == "auto":
        method = "reduced" if sp.p < sp.q else "direct"
    if method == "reduced":
        return radon_reduced(f, sp, s, spec, strict=strict)
    if method == "direct":
        return radon_direct(f, sp, s, spec, strict=strict)
    raise ValueError(f"unknown method {method!r}")


def abel(f, sp, s, spec, method="auto", strict=True):
    """A f(s) = e^{rho_1 s} R f(s)."""
    val, err = radon(f, sp, s, spec, method=method, strict=strict)
    g = math.exp(float(rho_1(sp)) * s)
    return val * g, err * g


# ---------------------------------------------------------------------------
# G_f and F(z)

def g_function(f: TestFunction, sp: SpaceParams, t, spec: QuadratureSpec, strict=True,
               natural_scale=True):
    """G_f(t1, t2, t3) on the cone t1^2 - t2^2 - t3^2 < 0.

    The u and w-bar integrands spread over a width ~ lam = (t2^2 + t3^2 - t1^2)^{1/2},
    so by default the box is taken in units of lam (Jacobian lam^{dp+d-1}),
    which keeps the truncation radius meaningful for any t.
    """
    _require_reduced(sp)
    f.check_space(sp)
    t1, t2, t3 = (float(c) for c in t)
    if t1 * t1 - t2 * t2 - t3 * t3 >= 0:
        raise DomainError(f"G_f needs t1^2 - t2^2 - t3^2 < 0, got t = {tuple(t)}")
    lam = math.sqrt(t2 * t2 + t3 * t3 - t1 * t1) if natural_scale else 1.0
    cone, n_sph, r = _cone_axes(sp, spec)

    def integrand(X):
        sig, u, wbar = _split_cone(X, sp, 0, n_sph, r)
        k = len(X)
        pts = g_points(sp, np.full(k, t1), np.full(k, t2), np.full(k, t3), sig, lam * u, lam * wbar)
        return f.batch(pts, sp)

    val, err = integrate_product(integrand, cone, spec, strict=strict)
    jac = lam ** (sp.d * sp.p + sp.d - 1)
    return val * jac, err * jac


def t_of(z, v):
    """t(z, v) = (-v, -(1 + 2zv - z^2)^{1/2}, z - v)."""
    v = np.asarray(v, dtype=float)
    return -v, -np.sqrt(1.0 + 2.0 * z * v - z * z), z - v


def _h_integrand(f, sp, z, n_sph, r, v, X, start):
    """G_f(t(z, v)) (1 + 2zv - z^2)^alpha at the cone nodes of X."""
    sig, u, wbar = _split_cone(X, sp, start, n_sph, r)
    base = 1.0 + 2.0 * z * v - z * z
    t1, t2, t3 = -v, -np.sqrt(base), z - v
    pts = g_points(sp, t1, t2, t3, sig, u, wbar)
    return f.batch(pts, sp) * base ** _alpha(sp)


def f_of_z(f: TestFunction, sp: SpaceParams, z: float, spec: QuadratureSpec, strict=True):
    """F(z) = int_{(z - 1/z)/2}^inf G_f(t(z, v)) (1 + 2zv - z^2)^alpha dv, 0 < z < 1."""
    _require_reduced(sp)
    f.check_space(sp)
    if not 0 < z < 1:
        raise ValueError("F(z) is evaluated for 0 < z < 1")
    a = 0.5 * (z - 1.0 / z)
    alpha = _alpha(sp)
    hspec = spec.with_(endpoint_power=alpha)
    vaxis = Axis(lambda n: halfline_rule(n, a, hspec)[:2], spec.nodes_per_dim, "v")
    cone, n_sph, r = _cone_axes(sp, spec)

    def integrand(X):
        v = X[:, 0]
        # 1 + 2zv - z^2 = 2z (v - a) exactly; keeps the endpoint clean
        base = np.maximum(2.0 * z * (v - a), 0.0)
        sig, u, wbar = _split_cone(X, sp, 1, n_sph, r)
        pts = g_points(sp, -v, -np.sqrt(base), z - v, sig, u, wbar)
        return f.batch(pts, sp) * base ** alpha

    return integrate_product(integrand, [vaxis] + cone, hspec, strict=strict)


@dataclass
class TaylorResult:
    coeffs: np.ndarray
    errs: np.ndarray
    scale: float
    step: float
    audit: np.ndarray = field(default_factory=lambda: np.zeros(0))


def taylor_coeffs(f: TestFunction, sp: SpaceParams, spec: QuadratureSpec, n_coeffs=None,
                  order: int = 8, step=None, audit_tol=1e-7) -> TaylorResult:
    """c_j = (1/j!) int_R d^j/dz^j|_{z=0} G_f(t(z, v)) (1 + 2zv - z^2)^alpha dv.

    Central differences of the given accuracy order in z, applied to the
    integrand on a fixed v-grid over [-V, V], V = 0.8 T.  ``n_coeffs``
    defaults to k0; it may exceed k0 when the integrals still converge (as
    they do for the super-Schwartz probes).  The step is audited by halving.
    """
    _require_reduced(sp)
    f.check_space(sp)
    k0, _ = k0_eps(sp)
    if sp.codim <= 1:
        raise ValueError("Taylor coefficients need d(q-p) > 1")
    n = k0 if n_coeffs is None else int(n_coeffs)
    if n < 1:
        raise ValueError(f"no Taylor coefficients for {sp.label()} (k0 = {k0})")
    V = 0.8 * spec.truncation_radius
    half_max = (n - 1 + order - 1) // 2
    if step is None:
        step = 0.25 / (half_max * V)
    zmax = half_max * step
    if zmax * (2 * V + zmax) >= 1:
        raise ValueError(f"z-step {step:g} leaves the domain 1 + 2zv - z^2 > 0 on |v| <= {V:g}")
    vaxis = Axis(lambda m: gauss_legendre(m, -V, V), 2 * spec.nodes_per_dim, "v")
    cone, n_sph, r = _cone_axes(sp, spec)
    axes = [vaxis] + cone

    def coeff(j, h):
        offs, wts = central_stencil(j, order)

        def integrand(X):
            v = X[:, 0]
            acc = np.zeros(len(X))
            for o, c in zip(offs, wts):
                if c != 0.0:
                    acc += c * _h_integrand(f, sp, o * h, n_sph, r, v, X, 1)
            return acc / (h ** j * factorial(j))

        return integrate_product(integrand, axes, spec, strict=False)

    def zero_scale(X):
        return np.abs(_h_integrand(f, sp, 0.0, n_sph, r, X[:, 0], X, 1))

    scale = integrate_product(zero_scale, axes, spec, strict=False)[0]
    coeffs, errs, audit = [], [], []
    for j in range(n):
        c, e = coeff(j, step)
        c2, e2 = coeff(j, step / 2)
        gap = abs(c - c2)
        coeffs.append(c2)
        errs.append(e2 + gap)
        audit.append(gap)
        if not gap <= audit_tol * max(scale, abs(c2)):
            raise StepAuditFailure(f"c_{j} moved by {gap:.3e} when the z-step was halved")
    return TaylorResult(np.array(coeffs), np.array(errs), scale, step / 2, np.array(audit))


def x_operator_g(f: TestFunction, sp: SpaceParams, t, k: int, spec: QuadratureSpec,
                 step: float = 0.05, order: int = 8) -> float:
    """X^k G_f(t) for X = t3 d/dt2 - t2 d/dt3.

    X generates the rotation (t2, t3) -> (t2 cos th + t3 sin th, -t2 sin th + t3 cos th),
    so X^k G_f(t) is the k-th theta-derivative at 0 of G_f along that circle.
    """
    if k > 3:
        raise ValueError("x_operator_g supports k <= 3")
    t1, t2, t3 = (float(c) for c in t)
    if t1 * t1 - t2 * t2 - t3 * t3 >= 0:
        raise DomainError(f"G_f needs t1^2 - t2^2 - t3^2 < 0, got t = {tuple(t)}")
    if k == 0:
        return g_function(f, sp, (t1, t2, t3), spec)[0]
    offs, wts = central_stencil(k, order)
    acc = 0.0
    for o, c in zip(offs, wts):
        if c == 0.0:
            continue
        th = o * step
        rt2 = t2 * math.cos(th) + t3 * math.sin(th)
        rt3 = -t2 * math.sin(th) + t3 * math.cos(th)
        acc += c * g_function(f, sp, (t1, rt2, rt3), spec)[0]
    return acc / step ** k


# ---------------------------------------------------------------------------
# grids and the Abel-side operator

@dataclass
class TransformGrid:
    s_values: np.ndarray
    rf: np.ndarray
    af: np.ndarray
    point_err: np.ndarray
    adf: np.ndarray | None = None
    adf_err: np.ndarray | None = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        n = len(self.s_values)
        if not (len(self.rf) == len(self.af) == len(self.point_err) == n):
            raise ValueError("grid arrays must have equal length")

    @property
    def h(self) -> float:
        return float(self.s_values[1] - self.s_values[0])

    def window(self, lo, hi):
        return (self.s_values >= lo - 1e-12) & (self.s_values <= hi + 1e-12)


def s_grid(s_min: float, s_max: float, h: float) -> np.ndarray:
    if h <= 0:
        raise ValueError("grid step must be positive")
    n = int(round((s_max - s_min) / h))
    return s_min + h * np.arange(n + 1)


def compute_grid(f: TestFunction, sp: SpaceParams, s_values, spec: QuadratureSpec,
                 method="auto", rel_tol=None) -> TransformGrid:
    """R f and A f on a uniform grid.

    Points are computed independently without per-point strictness; the
    grid as a whole must reach ``rel_tol`` (default spec.target_rel_tol)
    relative to max |A f|, otherwise NoConvergence names the worst s.
    """
    s_values = np.asarray(s_values, dtype=float)
    r1 = float(rho_1(sp))
    rf = np.empty(len(s_values))
    err = np.empty(len(s_values))
    for i, s in enumerate(s_values):
        rf[i], err[i] = radon(f, sp, float(s), spec, method=method, strict=False)
    g = np.exp(r1 * s_values)
    af = g * rf
    aerr = g * err
    tol = spec.target_rel_tol if rel_tol is None else rel_tol
    scale = np.max(np.abs(af)) if len(af) else 0.0
    if len(af) and np.max(aerr) > tol * scale + spec.abs_tol:
        i = int(np.argmax(aerr))
        exc = NoConvergence(f"A f error {aerr[i]:.3e} at s = {s_values[i]:.6g} exceeds "
                            f"{tol:.1e} x max|A f| = {tol * scale:.3e}", af[i], aerr[i])
        exc.s = float(s_values[i])
        raise exc
    meta = {"space": sp.label(), "probe": f.describe(), "method": method, "spec": spec}
    return TransformGrid(s_values, rf, af, aerr, meta=meta)


def l_stencil(D: OperatorD, h: float = 1.0, order: int = 8):
    """Weights of L(D2) with D2 the order-``order`` centred second difference / h^2."""
    _, w2 = central_stencil(2, order)
    w2 = w2 / (h * h)
    total = np.zeros(1)
    power = np.ones(1)
    for k, c in enumerate(float(c) for c in D.image_poly):
        if k > 0:
            power = np.convolve(power, w2)
        if c != 0.0:
            pad = (len(power) - len(total)) // 2
            total = np.pad(total, pad) + c * power if pad >= 0 else total + np.pad(c * power, -pad)
    half = (len(total) - 1) // 2
    return np.arange(-half, half + 1), total


def stencil_margin(D: OperatorD, order: int = 8) -> int:
    """Grid points lost at each end by apply_L."""
    return (len(l_stencil(D, 1.0, order)[0]) - 1) // 2


def apply_L(grid: TransformGrid, D: OperatorD, order: int = 8, decay_tol=None):
    """A(Df) = L(d^2/ds^2) A f on the grid interior; NaN where the stencil does not fit.

    Returns (adf, adf_err).  adf_err propagates the point errors through the
    absolute stencil weights, which carry the h^{-2(r+1)} amplification.
    With ``decay_tol``, GridTooCoarse is raised when that noise exceeds it.
    """
    offs, w = l_stencil(D, grid.h, order)
    half = int(offs[-1])
    n = len(grid.af)
    adf = np.full(n, np.nan)
    aerr = np.full(n, np.nan)
    aw = np.abs(w)
    for i in range(half, n - half):
        adf[i] = math.fsum(w * grid.af[i - half:i + half + 1])
        aerr[i] = float(np.dot(aw, grid.point_err[i - half:i + half + 1]))
    if decay_tol is not None and np.nanmax(aerr, initial=0.0) > decay_tol:
        raise GridTooCoarse(f"propagated noise {np.nanmax(aerr):.3e} exceeds {decay_tol:.3e} at h = {grid.h}")
    grid.adf, grid.adf_err = adf, aerr
    return adf, aerr
