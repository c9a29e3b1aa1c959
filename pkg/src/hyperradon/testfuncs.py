"""Degree-0 homogeneous probe functions on the cone [z, z] < 0.

Every probe is evaluated in batches: ``f.batch(X, sp)`` maps an array of
ambient points (k, D) to k values.  K-invariant probes carry a
:class:`RadialProfile`, a sympy expression in y = sinh(s)**2, from which
exact s-derivatives are generated on demand.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable

import numpy as np
import sympy

from .geometry import AmbientVector, block_norms2
from .params import SpaceParams

Y = sympy.Symbol("y", nonnegative=True)
S = sympy.Symbol("s", real=True)


class Invariance(enum.Enum):
    K_INVARIANT = "K-invariant"
    GENERIC = "generic"
    ODD = "odd"


class DecayKind(enum.Enum):
    SUPER_SCHWARTZ = "super-schwartz"
    SCHWARTZ = "schwartz"
    COMPACT = "compact"


@dataclass(frozen=True)
class Decay:
    kind: DecayKind
    R: float | None = None


class RadialProfile:
    """phi(s) = g(sinh(s)**2) with g a sympy expression in ``Y``.

    ``y_max`` marks a support cutoff: g is taken to vanish for y >= y_max.
    """

    def __init__(self, expr, y_max=None):
        self.expr = sympy.sympify(expr)
        self.y_max = y_max
        self._g = sympy.lambdify(Y, self.expr, "numpy")

    def g(self, y):
        y = np.asarray(y, dtype=float)
        if self.y_max is None:
            return np.asarray(self._g(y), dtype=float) * np.ones_like(y)
        inside = y < self.y_max
        out = np.zeros_like(y)
        if np.any(inside):
            out[inside] = self._g(y[inside])
        return out

    @lru_cache(maxsize=16)
    def _s_derivative(self, k: int):
        e = self.expr.subs(Y, sympy.sinh(S) ** 2)
        return sympy.lambdify(S, sympy.diff(e, S, k), "numpy")

    def derivative(self, k: int) -> Callable:
        """k-th s-derivative of phi as a vectorized procedure."""
        fn = self._s_derivative(k)

        def phi_k(s):
            s = np.asarray(s, dtype=float)
            with np.errstate(all="ignore"):
                val = np.asarray(fn(s), dtype=float) * np.ones_like(s)
            if self.y_max is not None:
                val = np.where(np.sinh(s) ** 2 < self.y_max, val, 0.0)
            return val

        return phi_k

    def phi(self, s):
        return self.g(np.sinh(np.asarray(s, dtype=float)) ** 2)


@dataclass(frozen=True)
class TestFunction:
    __test__ = False

    name: str
    batch_fn: Callable
    invariance: Invariance
    decay: Decay
    projective_ok: bool
    radial_profile: RadialProfile | None = None
    params: dict = field(default_factory=dict)

    def batch(self, X, sp: SpaceParams):
        return self.batch_fn(np.asarray(X, dtype=float), sp)

    def __call__(self, x: AmbientVector):
        vals = self.batch(np.atleast_2d(x.coords), x.sp)
        return vals[0] if np.ndim(x.coords) == 1 else vals

    def describe(self) -> str:
        args = ",".join(f"{k}={v}" for k, v in self.params.items())
        return f"{self.name}({args})"

    def check_space(self, sp: SpaceParams):
        if sp.projective and not self.projective_ok:
            raise ValueError(f"probe {self.name} is not well defined on the projective space {sp.label()}")


def _y_of(X, sp):
    pos, neg = block_norms2(X, sp)
    return pos / (neg - pos), neg - pos


def radial_function(profile: RadialProfile, name="radial", decay=None, params=None) -> TestFunction:
    """K-invariant probe f[x] = g(|x+|^2 / -[x, x])."""

    def batch(X, sp):
        y, _ = _y_of(X, sp)
        return profile.g(y)

    return TestFunction(name, batch, Invariance.K_INVARIANT,
                        decay or Decay(DecayKind.SUPER_SCHWARTZ), True, profile, dict(params or {}))


def gaussian_radial(beta: float = 1.0) -> TestFunction:
    if beta <= 0:
        raise ValueError("beta must be positive")
    prof = RadialProfile(sympy.exp(-sympy.nsimplify(beta) * Y))

    def batch(X, sp):
        y, _ = _y_of(X, sp)
        return np.exp(-beta * y)

    return TestFunction("gaussian", batch, Invariance.K_INVARIANT,
                        Decay(DecayKind.SUPER_SCHWARTZ), True, prof, {"beta": beta})


def bump_radial(R: float = 1.0) -> TestFunction:
    """chi(sinh^2 s / sinh^2 R), chi(t) = exp(1 - 1/(1 - t)) on t < 1."""
    if R <= 0:
        raise ValueError("R must be positive")
    ymax = float(np.sinh(R) ** 2)
    prof = RadialProfile(sympy.exp(1 - 1 / (1 - Y / sympy.Float(ymax, 17))), y_max=ymax)

    def batch(X, sp):
        y, _ = _y_of(X, sp)
        t = y / ymax
        out = np.zeros_like(t)
        inside = t < 1.0
        out[inside] = np.exp(1.0 - 1.0 / (1.0 - t[inside]))
        return out

    return TestFunction("bump", batch, Invariance.K_INVARIANT,
                        Decay(DecayKind.COMPACT, R), True, prof, {"R": R})


def angular_modulated(beta: float = 1.0, i: int = 0, j: int = -1) -> TestFunction:
    """Re(z_i conj(z_j)) / -[x, x] times the Gaussian; i, j are F-coordinate indices."""
    if beta <= 0:
        raise ValueError("beta must be positive")

    def batch(X, sp):
        m = sp.n_coords
        ii, jj = i % m, j % m
        if ii == jj:
            raise ValueError("angular_modulated needs two distinct coordinates")
        d = sp.d
        y, mh = _y_of(X, sp)
        dot = np.einsum("ki,ki->k", X[:, ii * d:(ii + 1) * d], X[:, jj * d:(jj + 1) * d])
        return dot / mh * np.exp(-beta * y)

    return TestFunction("angular", batch, Invariance.GENERIC,
                        Decay(DecayKind.SUPER_SCHWARTZ), True, None, {"beta": beta, "i": i, "j": j})


def odd_modulated(beta: float = 1.0, i: int = 0, sp: SpaceParams | None = None) -> TestFunction:
    """x_i / sqrt(-[x, x]) times the Gaussian; odd under x -> -x.

    Only meaningful on the real non-projective space; ``i`` is a real
    coordinate index.
    """
    if sp is not None and sp.projective:
        raise ValueError("odd_modulated needs the real non-projective space")
    if beta <= 0:
        raise ValueError("beta must be positive")

    def batch(X, sp):
        y, mh = _y_of(X, sp)
        return X[:, i] / np.sqrt(mh) * np.exp(-beta * y)

    return TestFunction("odd", batch, Invariance.ODD,
                        Decay(DecayKind.SUPER_SCHWARTZ), False, None, {"beta": beta, "i": i})


def zero_function() -> TestFunction:
    return TestFunction("zero", lambda X, sp: np.zeros(len(X)), Invariance.K_INVARIANT,
                        Decay(DecayKind.COMPACT, 0.0), True, RadialProfile(sympy.Integer(0)), {})


PROBES = {
    "gaussian": gaussian_radial,
    "bump": bump_radial,
    "angular": angular_modulated,
    "odd": odd_modulated,
    "zero": zero_function,
}


def make_probe(name: str, **kw) -> TestFunction:
    try:
        factory = PROBES[name]
    except KeyError:
        raise ValueError(f"unknown probe {name!r}; choose from {sorted(PROBES)}") from None
    return factory(**kw)
