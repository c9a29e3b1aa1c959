"""Deterministic tensor-product quadrature with per-axis doubling error estimates.

Every integral in the package is a product of one-dimensional rules:
Gauss-Legendre on truncated boxes, Gauss-Legendre after a tau or tau**2
substitution on half-lines, and Gauss-Jacobi / periodic trapezoid factors
for spheres.  The error estimate of a product rule is the sum over axes of
the change caused by doubling the node count on that axis alone; axes whose
contribution is too large are refined, up to ``doubling_rounds`` times.

Summation order is fixed (chunked pairwise sums combined with ``math.fsum``)
so identical inputs give bit-identical results.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np
from scipy.special import roots_jacobi, roots_legendre

CHUNK = 1 << 17


class NoConvergence(RuntimeError):
    """Doubling rounds were exhausted before the error target was met."""

    def __init__(self, msg, value=None, err=None):
        super().__init__(msg)
        self.value = value
        self.err = err


@dataclass(frozen=True)
class QuadratureSpec:
    nodes_per_dim: int = 32
    truncation_radius: float = 7.0
    target_rel_tol: float = 1e-10
    endpoint_power: float = 0.0
    doubling_rounds: int = 2
    sphere_nodes: int = 4
    abs_tol: float = 0.0

    def __post_init__(self):
        if self.nodes_per_dim < 2:
            raise ValueError("nodes_per_dim must be >= 2")
        if not self.target_rel_tol > 0:
            raise ValueError("target_rel_tol must be positive")
        if not self.endpoint_power > -1:
            raise ValueError("endpoint_power must be > -1")
        if self.truncation_radius <= 0:
            raise ValueError("truncation_radius must be positive")
        if self.doubling_rounds < 0 or self.sphere_nodes < 1:
            raise ValueError("doubling_rounds >= 0 and sphere_nodes >= 1 required")

    def with_(self, **kw) -> "QuadratureSpec":
        return replace(self, **kw)


# ---------------------------------------------------------------------------
# one-dimensional rules (cached; arrays are treated as read-only)

@lru_cache(maxsize=256)
def gauss_legendre(n: int, a: float = -1.0, b: float = 1.0):
    x, w = roots_legendre(n)
    half = 0.5 * (b - a)
    nodes = a + half * (x + 1.0)
    return nodes, w * half


@lru_cache(maxsize=256)
def gauss_jacobi_sym(n: int, alpha: float):
    """Nodes/weights for the weight (1 - t**2)**alpha on [-1, 1]."""
    if alpha == 0:
        return gauss_legendre(n)
    return roots_jacobi(n, alpha, alpha)


@lru_cache(maxsize=64)
def periodic_rule(n: int):
    phi = 2.0 * np.pi * np.arange(n) / n
    return phi, np.full(n, 2.0 * np.pi / n)


def halfline_rule(n: int, a: float, spec: QuadratureSpec):
    """Rule for int_a^inf g(v) dv with g decaying beyond the truncation radius.

    Returns (v, weights, v - a).  The interval is [max(a, -T), max(a, 0) + T].
    For a non-integer endpoint power the substitution v = a + tau**2 is used,
    which turns (v - a)**k * dv into a smooth tau**(2k+1) * dtau whenever 2k
    is an integer.  If a lies below -T the endpoint region is dropped with
    the rest of the truncated tail and the rule is a plain Gauss rule.
    """
    T = spec.truncation_radius
    lo = max(a, -T)
    hi = max(a, 0.0) + T
    singular = not float(spec.endpoint_power).is_integer()
    if singular and lo == a:
        tmax = math.sqrt(hi - lo)
        tau, wt = gauss_legendre(n, 0.0, tmax)
        gap = tau * tau
        return a + gap, 2.0 * tau * wt, gap
    v, wv = gauss_legendre(n, lo, hi)
    return v, wv, v - a


# ---------------------------------------------------------------------------
# product engine

@dataclass(frozen=True)
class Axis:
    """A one-dimensional factor: ``rule(n) -> (nodes, weights)`` at base size n."""

    rule: Callable[[int], tuple]
    n: int
    name: str = ""


def _fsum_chunks(parts):
    return math.fsum(parts)


def tensor_sum(g, axes: Sequence[Axis], levels: Sequence[int], transform=None):
    """Apply the tensor rule at the given per-axis node counts.

    Returns (sum w*g, sum w*|g|).  ``transform`` maps the raw (k, n_axes)
    coordinate matrix to the integrand input; the integrand maps that to
    k values.
    """
    rules = [ax.rule(n) for ax, n in zip(axes, levels)]
    shape = tuple(len(r[1]) for r in rules)
    total = int(np.prod(shape)) if shape else 1
    if not rules:
        val = float(g(np.zeros((1, 0)) if transform is None else transform(np.zeros((1, 0))))[0])
        return val, abs(val)
    sums, asums = [], []
    for start in range(0, total, CHUNK):
        idx = np.unravel_index(np.arange(start, min(start + CHUNK, total)), shape)
        cols = [r[0][i] for r, i in zip(rules, idx)]
        w = rules[0][1][idx[0]].copy()
        for r, i in zip(rules[1:], idx[1:]):
            w *= r[1][i]
        X = np.stack(cols, axis=1)
        if transform is not None:
            X = transform(X)
        vals = np.asarray(g(X), dtype=float)
        prod = w * vals
        sums.append(float(np.sum(prod)))
        asums.append(float(np.sum(np.abs(prod))))
    return _fsum_chunks(sums), _fsum_chunks(asums)


def integrate_product(g, axes: Sequence[Axis], spec: QuadratureSpec, transform=None, strict=True):
    """Tensor-product integral with per-axis doubling refinement.

    Returns (value, err).  ``value`` is the rule at the current levels and
    ``err`` the summed per-axis doubling differences plus a rounding floor
    of 16 ulp of sum w|g|.  With ``strict`` a
    NoConvergence is raised if the error target is still missed after
    ``spec.doubling_rounds`` refinement rounds.
    """
    levels = [ax.n for ax in axes]
    for rnd in range(spec.doubling_rounds + 1):
        value, scale = tensor_sum(g, axes, levels, transform)
        diffs = []
        for k in range(len(axes)):
            lv = list(levels)
            lv[k] *= 2
            diffs.append(abs(tensor_sum(g, axes, lv, transform)[0] - value))
        # the doubling differences can cancel below the rounding level of the sum itself
        err = float(sum(diffs)) + 16 * np.finfo(float).eps * scale
        target = spec.target_rel_tol * scale + spec.abs_tol
        if err <= target or not axes:
            return value, err
        if rnd == spec.doubling_rounds:
            break
        share = target / len(axes)
        levels = [n * 2 if d > share else n for n, d in zip(levels, diffs)]
    if strict:
        raise NoConvergence(
            f"quadrature error {err:.3e} above target {target:.3e} at levels {levels}",
            value, err)
    return value, err


# ---------------------------------------------------------------------------
# public engines

def box_axes(m: int, spec: QuadratureSpec, radius=None):
    T = spec.truncation_radius if radius is None else radius
    return [Axis(lambda n, T=T: gauss_legendre(n, -T, T), spec.nodes_per_dim, f"box{k}") for k in range(m)]


def sphere_axes(r: int, spec: QuadratureSpec):
    """Axes for S^r in R^{r+1}; pair with :func:`sphere_points`."""
    if r == 0:
        return [Axis(lambda n: (np.array([-1.0, 1.0]), np.array([1.0, 1.0])), 2, "s0")]
    axes = []
    for k in range(r - 1):
        alpha = (r - k - 2) / 2.0
        axes.append(Axis(lambda n, a=alpha: gauss_jacobi_sym(n, a), spec.sphere_nodes, f"t{k}"))
    axes.append(Axis(periodic_rule, 2 * spec.sphere_nodes, "phi"))
    return axes


def sphere_points(X, r: int):
    """Map sphere axis coordinates (k, r) to unit vectors (k, r+1)."""
    if r == 0:
        return X[:, :1].copy()
    k = X.shape[0]
    out = np.empty((k, r + 1))
    radius = np.ones(k)
    for j in range(r - 1):
        t = X[:, j]
        out[:, j] = radius * t
        radius = radius * np.sqrt(np.clip(1.0 - t * t, 0.0, None))
    phi = X[:, r - 1]
    out[:, r - 1] = radius * np.cos(phi)
    out[:, r] = radius * np.sin(phi)
    return out


def sphere_volume(r: int) -> float:
    """Surface measure of S^r in R^{r+1}."""
    return 2.0 * math.pi ** ((r + 1) / 2.0) / math.gamma((r + 1) / 2.0)


def integrate_box(g, m: int, spec: QuadratureSpec, strict=True):
    """Integral of g over R^m truncated to [-T, T]^m; g maps (k, m) -> (k,)."""
    if m == 0:
        val = float(np.asarray(g(np.zeros((1, 0))))[0])
        return val, 0.0
    return integrate_product(g, box_axes(m, spec), spec, strict=strict)


def integrate_halfline(g, a: float, spec: QuadratureSpec, strict=True):
    """Integral of g over [a, inf); g maps an array of v to values."""
    ax = Axis(lambda n: halfline_rule(n, a, spec)[:2], spec.nodes_per_dim, "v")
    return integrate_product(lambda X: g(X[:, 0]), [ax], spec, strict=strict)


def integrate_sphere(g, r: int, spec: QuadratureSpec, strict=True):
    """Integral over S^r (unit sphere in R^{r+1}); g maps (k, r+1) -> (k,)."""
    axes = sphere_axes(r, spec)
    if r == 0:
        return integrate_product(g, axes, spec, strict=strict)
    return integrate_product(g, axes, spec, transform=lambda X: sphere_points(X, r), strict=strict)
