"""Space parameters, rho-factors, discrete-series bookkeeping and the operator D.

Half-integer quantities (rho-factors, series parameters) are kept as
``fractions.Fraction`` so parity tests never see rounding; call ``float``
at the boundary.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np


class FieldKind(enum.Enum):
    REAL = 1
    COMPLEX = 2
    QUATERNION = 4

    @property
    def d(self) -> int:
        return self.value

    @classmethod
    def parse(cls, text) -> "FieldKind":
        if isinstance(text, cls):
            return text
        key = str(text).strip().upper()
        aliases = {"R": "REAL", "C": "COMPLEX", "H": "QUATERNION", "Q": "QUATERNION"}
        try:
            return cls[aliases.get(key, key)]
        except KeyError:
            raise ValueError(f"unknown field {text!r} (use R, C or H)") from None


class Variant(enum.Enum):
    PROJECTIVE = "projective"
    REAL_NONPROJECTIVE = "nonprojective"

    @classmethod
    def parse(cls, text) -> "Variant":
        if isinstance(text, cls):
            return text
        key = str(text).strip().lower().replace("-", "").replace("_", "")
        for v in cls:
            if v.value == key or v.name.lower().replace("_", "") == key:
                return v
        if key in ("realnonprojective", "nonproj"):
            return cls.REAL_NONPROJECTIVE
        raise ValueError(f"unknown variant {text!r}")


@dataclass(frozen=True)
class SpaceParams:
    field: FieldKind
    p: int
    q: int
    variant: Variant = Variant.PROJECTIVE

    def __post_init__(self):
        if self.p < 0 or self.q < 1:
            raise ValueError(f"need p >= 0 and q >= 1, got p={self.p}, q={self.q}")
        if self.variant is Variant.REAL_NONPROJECTIVE and self.field is not FieldKind.REAL:
            raise ValueError("the non-projective variant exists only over R")

    @classmethod
    def make(cls, field, p, q, variant=Variant.PROJECTIVE):
        return cls(FieldKind.parse(field), int(p), int(q), Variant.parse(variant))

    @property
    def d(self) -> int:
        return self.field.d

    @property
    def n_coords(self) -> int:
        """Number of F-coordinates, p + q + 2."""
        return self.p + self.q + 2

    @property
    def real_dim(self) -> int:
        return self.d * self.n_coords

    @property
    def codim(self) -> int:
        """d(q - p), the quantity every regime split is phrased in."""
        return self.d * (self.q - self.p)

    @property
    def projective(self) -> bool:
        return self.variant is Variant.PROJECTIVE

    def label(self) -> str:
        f = {1: "R", 2: "C", 4: "H"}[self.d]
        tag = "" if self.projective else ",nonproj"
        return f"({f},{self.p},{self.q}{tag})"


@dataclass(frozen=True)
class SeriesParam:
    lam: Fraction
    mu: int
    spherical: bool
    cuspidal: bool


@dataclass(frozen=True)
class OperatorD:
    """D = Delta_rho * prod_j (Delta_rho - lambda_j**2).

    ``image_poly`` holds the coefficients of L(xi) = xi * prod_j (xi - lambda_j**2)
    in increasing degree, so that A(Df) = L(d^2/ds^2) A f.
    """

    lambdas: tuple
    image_poly: tuple

    @property
    def r(self) -> int:
        return len(self.lambdas)

    def L(self, xi):
        return np.polynomial.polynomial.polyval(xi, [float(c) for c in self.image_poly])


def rho_q(sp: SpaceParams) -> Fraction:
    d = sp.d
    return Fraction(d * sp.p + d * sp.q + 2 * (d - 1), 2)


def rho_1(sp: SpaceParams) -> Fraction:
    d = sp.d
    return Fraction(abs(d * sp.p - d * sp.q) + 2 * (d - 1), 2)


def k0_eps(sp: SpaceParams):
    """Integer/fractional split of d(q-p)/2: k0 < d(q-p)/2 <= k0 + 1."""
    m = sp.codim
    if m <= 0:
        raise ValueError(f"k0 is defined only for d(q-p) >= 1; {sp.label()} has d(q-p) = {m}")
    half = Fraction(m, 2)
    k0 = (m - 1) // 2
    return k0, half - k0


def series_base(sp: SpaceParams) -> Fraction:
    """(dq - dp)/2 - 1, the parameter attached to mu = 0."""
    return Fraction(sp.codim, 2) - 1


def discrete_series(sp: SpaceParams, lambda_max=20) -> list[SeriesParam]:
    """Discrete-series parameters 0 < lambda <= lambda_max, ascending."""
    if lambda_max <= 0:
        raise ValueError("lambda_max must be positive")
    lmax = Fraction(lambda_max).limit_denominator(10**6)
    base = series_base(sp)
    nc = set(noncuspidal(sp))
    out = []
    if sp.q == 1 and sp.d == 1:
        # |lambda| + rho_q in 2Z, no spherical members
        rq = rho_q(sp)
        k = 0
        while True:
            lam = 2 * k - rq
            if lam > lmax:
                break
            if lam > 0:
                out.append(SeriesParam(lam, int(lam - base), False, True))
            k += 1
    else:
        mu = 2 * math.floor(-base / 2)
        while base + mu <= lmax:
            lam = base + mu
            if lam > 0:
                out.append(SeriesParam(lam, mu, mu <= 0, lam not in nc))
            mu += 2
    if not sp.projective:
        # exceptional members with odd negative mu: non-spherical, non-cuspidal
        mu = -1
        while base + mu > 0:
            if base + mu <= lmax:
                out.append(SeriesParam(base + mu, mu, False, False))
            mu -= 2
    out.sort(key=lambda s: s.lam)
    return out


def noncuspidal(sp: SpaceParams) -> list[Fraction]:
    """Non-cuspidal parameters lambda_1 > ... > lambda_r > 0."""
    if sp.codim <= 2:
        return []
    k0, _ = k0_eps(sp)
    base = series_base(sp)
    step = 2 if sp.projective else 1
    return [base - j for j in range(0, k0, step) if base - j > 0]


def image_poly(lambdas) -> tuple:
    coeffs = [Fraction(0), Fraction(1)]
    for lam in lambdas:
        root = Fraction(lam) ** 2
        shifted = [Fraction(0)] + coeffs
        for i, c in enumerate(coeffs):
            shifted[i] -= root * c
        coeffs = shifted
    return tuple(coeffs)


def build_D(sp: SpaceParams) -> OperatorD:
    if sp.codim <= 1:
        raise ValueError(
            f"D is only defined for d(q-p) > 1; {sp.label()} is in the regime where A f is already Schwartz")
    lams = tuple(noncuspidal(sp))
    return OperatorD(lams, image_poly(lams))


def format_poly(coeffs, var="xi") -> str:
    terms = []
    for k in range(len(coeffs) - 1, -1, -1):
        c = Fraction(coeffs[k])
        if c == 0:
            continue
        mag = abs(c)
        sign = "-" if c < 0 else "+"
        mono = "" if k == 0 else (var if k == 1 else f"{var}^{k}")
        body = str(mag) if (mag != 1 or k == 0) else ""
        terms.append((sign, body + mono))
    if not terms:
        return "0"
    head = ("-" if terms[0][0] == "-" else "") + terms[0][1]
    return head + "".join(f" {s} {t}" for s, t in terms[1:])
