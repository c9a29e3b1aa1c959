"""Radial part of the Laplace-Beltrami operator and manifold-side application of D.

For K-invariant f with profile phi(s) = g(sinh(s)**2),

    Delta phi = phi'' + A(s) phi',
    A(s) = dp coth s + dq tanh s + 2(d-1) coth 2s
         = (dp + d - 1) coth s + (dq + d - 1) tanh s.

In y = sinh(s)**2 the same operator reads

    Delta g = 4y(1+y) g'' + 2((dp + d) + (dp + dq + 2d) y) g',

with polynomial coefficients, which is how D is applied symbolically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import sympy

from .params import OperatorD, SpaceParams, rho_q
from .testfuncs import Invariance, RadialProfile, TestFunction, Y, radial_function


class MissingProfile(ValueError):
    """The probe carries no radial profile (not K-invariant)."""


class PoleAtZero(ValueError):
    """phi'(0) != 0, so A(s) phi'(s) has no finite limit at s = 0."""


class DepthExceeded(ValueError):
    """Too many finite-difference derivatives requested for a profile-free probe."""


FD_DEPTH = 4


def degree_count(sp: SpaceParams) -> bool:
    """dp + dq + (d - 1) + 1 = d(p + q + 1) = dim G/H."""
    d = sp.d
    return d * sp.p + d * sp.q + (d - 1) + 1 == d * (sp.p + sp.q + 1)


@dataclass(frozen=True)
class RadialOperator:
    sp: SpaceParams

    def __post_init__(self):
        if not degree_count(self.sp):
            raise AssertionError(f"multiplicity count fails for {self.sp.label()}")

    @property
    def shift(self) -> float:
        return float(rho_q(self.sp)) ** 2

    def A(self, s):
        """Coefficient in the defining form."""
        sp = self.sp
        d = sp.d
        s = np.asarray(s, dtype=float)
        return d * sp.p / np.tanh(s) + d * sp.q * np.tanh(s) + 2 * (d - 1) / np.tanh(2 * s)

    def A_split(self, s):
        """Equivalent form (dp + d - 1) coth s + (dq + d - 1) tanh s."""
        sp = self.sp
        d = sp.d
        s = np.asarray(s, dtype=float)
        return (d * sp.p + d - 1) / np.tanh(s) + (d * sp.q + d - 1) * np.tanh(s)

    def y_coeffs(self):
        """(a2, a1) with Delta g = a2(y) g'' + a1(y) g'."""
        sp = self.sp
        d = sp.d
        return 4 * Y * (1 + Y), 2 * ((d * sp.p + d) + (d * sp.p + d * sp.q + 2 * d) * Y)

    def apply_y(self, expr, shifted=False):
        a2, a1 = self.y_coeffs()
        out = a2 * sympy.diff(expr, Y, 2) + a1 * sympy.diff(expr, Y)
        if shifted:
            out += sympy.Rational(rho_q(self.sp)) ** 2 * expr
        return out


def _profile(f: TestFunction) -> RadialProfile:
    if f.radial_profile is None:
        raise MissingProfile(f"probe {f.name} has no radial profile")
    return f.radial_profile


def delta_radial(f: TestFunction, sp: SpaceParams, s):
    """Delta f at a_s x0 from the analytic s-derivatives of the profile."""
    prof = _profile(f)
    op = RadialOperator(sp)
    s = np.asarray(s, dtype=float)
    d1 = prof.derivative(1)(s)
    d2 = prof.derivative(2)(s)
    zero = s == 0
    out = np.empty_like(s)
    nz = ~zero
    out[nz] = d2[nz] + op.A(s[nz]) * d1[nz]
    if np.any(zero):
        if abs(float(prof.derivative(1)(0.0))) > 1e-12:
            raise PoleAtZero("phi'(0) != 0")
        out[zero] = (1 + sp.d * sp.p + sp.d - 1) * d2[zero]
    return out if out.ndim else float(out)


def delta_rho_radial(f: TestFunction, sp: SpaceParams, s):
    """Delta_rho f = Delta f + rho_q^2 f."""
    prof = _profile(f)
    return delta_radial(f, sp, s) + float(rho_q(sp)) ** 2 * prof.phi(s)


def _d_expr(expr, sp: SpaceParams, D: OperatorD):
    op = RadialOperator(sp)
    out = op.apply_y(expr, shifted=True)
    for lam in D.lambdas:
        out = op.apply_y(out, shifted=True) - sympy.Rational(lam) ** 2 * out
    return out


def apply_delta(f: TestFunction, sp: SpaceParams, shifted=False) -> TestFunction:
    """Delta f (or Delta_rho f) as a new K-invariant probe."""
    prof = _profile(f)
    expr = RadialOperator(sp).apply_y(prof.expr, shifted=shifted)
    tag = "delta_rho" if shifted else "delta"
    return radial_function(RadialProfile(expr, prof.y_max), name=f"{tag}[{f.name}]",
                           decay=f.decay, params=f.params)


def apply_D(f: TestFunction, sp: SpaceParams, D: OperatorD) -> TestFunction:
    """D f = Delta_rho prod_j (Delta_rho - lambda_j^2) f as a new K-invariant probe."""
    prof = _profile(f)
    expr = _d_expr(prof.expr, sp, D)
    return radial_function(RadialProfile(expr, prof.y_max), name=f"D[{f.name}]",
                           decay=f.decay, params=f.params)


def _fd_delta_rho(phi, sp: SpaceParams, s, h):
    """Delta_rho phi at s != 0 by Richardson-extrapolated central differences."""
    op = RadialOperator(sp)

    def once(hh):
        p0, pp, pm = phi(s), phi(s + hh), phi(s - hh)
        d1 = (pp - pm) / (2 * hh)
        d2 = (pp - 2 * p0 + pm) / (hh * hh)
        return d2 + op.A(s) * d1 + op.shift * p0

    return (4 * once(h / 2) - once(h)) / 3


def apply_D_radial(f: TestFunction, sp: SpaceParams, s, D: OperatorD, fd_step=1e-2):
    """D f at a_s x0.

    Uses the symbolic y-form when the probe carries a profile; otherwise a
    K-invariant probe is differentiated numerically along a_s x0 (nested
    Richardson differences, at most FD_DEPTH factors).
    """
    if f.radial_profile is not None:
        prof = f.radial_profile
        expr = _d_expr(prof.expr, sp, D)
        g = RadialProfile(expr, prof.y_max)
        return g.phi(s) if np.ndim(s) else float(g.phi(s))
    if f.invariance is not Invariance.K_INVARIANT:
        raise MissingProfile(f"probe {f.name} is not K-invariant")
    if D.r + 1 > FD_DEPTH:
        raise DepthExceeded(f"{D.r + 1} nested factors exceed the finite-difference depth {FD_DEPTH}")
    from .geometry import orbit_points

    def phi0(t):
        t = float(t)
        x = orbit_points(sp, t, np.zeros((1, sp.d * min(sp.p, sp.q))),
                         np.zeros((1, sp.d * abs(sp.q - sp.p))), np.zeros((1, sp.d - 1)))
        return float(f.batch(x, sp)[0])

    def layer(phi, lam2):
        return lambda t: _fd_delta_rho(phi, sp, t, fd_step) - lam2 * phi(t)

    fn = layer(phi0, 0.0)
    for lam in D.lambdas:
        fn = layer(fn, float(lam) ** 2)
    return np.vectorize(fn)(s) if np.ndim(s) else fn(s)


def exchange_residual(af_delta, af, h, rq2, order=8):
    """A(Delta f) - (A f'' - rho_q^2 A f) at interior grid points, NaN near the ends."""
    from .transforms import central_stencil

    offs, w = central_stencil(2, order)
    half = int(offs[-1])
    af = np.asarray(af, dtype=float)
    out = np.full(len(af), np.nan)
    for i in range(half, len(af) - half):
        d2 = math.fsum(w * af[i - half:i + half + 1]) / (h * h)
        out[i] = af_delta[i] - (d2 - rq2 * af[i])
    return out
