"""Ambient coordinates on F^{p+q+2}, the orbit a_s exp(N) x0 and its matrix oracle.

Real layout: F-coordinate j occupies reals [j*d, (j+1)*d); inside a block
the imaginary parts come first (i, j, k order for H) and the real part sits
in the last slot.  The first d(p+1) reals form the positive block, the last
d(q+1) the negative block.

The fast path (``orbit_points``) uses the closed form of the orbit in real
coordinates; quaternion arithmetic only appears in :func:`matrix_oracle`.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .params import SpaceParams


class NonTimelike(ValueError):
    """The point has [x, x] >= 0 and does not represent a point of X."""


# ---------------------------------------------------------------------------
# F-arithmetic on real blocks (..., d), layout (imag..., real)

def fconj(a):
    out = np.array(a, dtype=float, copy=True)
    out[..., :-1] *= -1.0
    return out


def fmul(a, b):
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    d = a.shape[-1]
    if d == 1:
        return a * b
    if d == 2:
        ai, ar = a[..., 0], a[..., 1]
        bi, br = b[..., 0], b[..., 1]
        return np.stack([ar * bi + ai * br, ar * br - ai * bi], axis=-1)
    if d == 4:
        ai, aj, ak, ar = (a[..., k] for k in range(4))
        bi, bj, bk, br = (b[..., k] for k in range(4))
        return np.stack([
            ar * bi + ai * br + aj * bk - ak * bj,
            ar * bj - ai * bk + aj * br + ak * bi,
            ar * bk + ai * bj - aj * bi + ak * br,
            ar * br - ai * bi - aj * bj - ak * bk,
        ], axis=-1)
    raise ValueError(f"unsupported block size {d}")


def left_mul_matrix(a):
    """Real d x d matrix of x -> a*x."""
    a = np.asarray(a, dtype=float)
    d = a.shape[-1]
    basis = np.eye(d)
    return np.stack([fmul(a, basis[k]) for k in range(d)], axis=-1)


def right_mul_coords(X, u, sp: SpaceParams):
    """Multiply every F-coordinate of X on the right by the F-element u."""
    X = np.asarray(X, dtype=float)
    blocks = X.reshape(X.shape[:-1] + (sp.n_coords, sp.d))
    return fmul(blocks, np.asarray(u, dtype=float)).reshape(X.shape)


# ---------------------------------------------------------------------------
# points

@dataclass
class AmbientVector:
    coords: np.ndarray
    sp: SpaceParams

    def __post_init__(self):
        self.coords = np.asarray(self.coords, dtype=float)
        if self.coords.shape[-1] != self.sp.real_dim:
            raise ValueError(f"expected {self.sp.real_dim} reals, got {self.coords.shape[-1]}")

    @property
    def positive(self):
        return self.coords[..., : self.sp.d * (self.sp.p + 1)]

    @property
    def negative(self):
        return self.coords[..., self.sp.d * (self.sp.p + 1):]

    def __mul__(self, a):
        return AmbientVector(self.coords * a, self.sp)

    __rmul__ = __mul__

    def __neg__(self):
        return AmbientVector(-self.coords, self.sp)


def base_point(sp: SpaceParams) -> AmbientVector:
    x = np.zeros(sp.real_dim)
    x[-1] = 1.0
    return AmbientVector(x, sp)


def block_norms2(X, sp: SpaceParams):
    """(|x+|^2, |x-|^2) for an array of points (..., D)."""
    X = np.asarray(X, dtype=float)
    npos = sp.d * (sp.p + 1)
    pos = np.einsum("...i,...i->...", X[..., :npos], X[..., :npos])
    neg = np.einsum("...i,...i->...", X[..., npos:], X[..., npos:])
    return pos, neg


def hermitian_self(x, sp: SpaceParams | None = None):
    """[x, x] = |x+|^2 - |x-|^2; accepts an AmbientVector or (array, sp)."""
    if isinstance(x, AmbientVector):
        x, sp = x.coords, x.sp
    pos, neg = block_norms2(x, sp)
    return pos - neg


def radial_coordinate(x, sp: SpaceParams | None = None):
    """s >= 0 with x ~ k a_s x0.

    Uses |x+| / sqrt(-[x,x]) = sinh s, which is the same quantity as
    arccosh(|x-| / sqrt(-[x,x])) but well conditioned near s = 0.
    """
    if isinstance(x, AmbientVector):
        x, sp = x.coords, x.sp
    pos, neg = block_norms2(x, sp)
    h = pos - neg
    if np.any(h >= 0):
        raise NonTimelike("radial coordinate needs [x, x] < 0")
    return np.arcsinh(np.sqrt(pos / -h))


def normalize(x: AmbientVector) -> AmbientVector:
    h = hermitian_self(x)
    if np.any(h >= 0):
        raise NonTimelike("cannot normalize a point with [x, x] >= 0")
    return AmbientVector(x.coords / np.sqrt(-h)[..., None] if np.ndim(h) else x.coords / np.sqrt(-h), x.sp)


# ---------------------------------------------------------------------------
# nilpotent parameters and the orbit

@dataclass
class NilpotentParam:
    """Free coordinates of n* in N^*.

    ``free`` is v (p >= q) or u (p < q) with d*min(p, q) reals; ``tail`` is
    u' (p >= q) or v' (p < q) with d|q - p| reals; ``w`` holds the d - 1
    imaginary components of w.  The constrained part is derived.
    """

    free: np.ndarray
    tail: np.ndarray
    w: np.ndarray = field(default_factory=lambda: np.zeros(0))

    @classmethod
    def zero(cls, sp: SpaceParams):
        d = sp.d
        return cls(np.zeros(d * min(sp.p, sp.q)), np.zeros(d * abs(sp.q - sp.p)), np.zeros(d - 1))

    @classmethod
    def random(cls, sp: SpaceParams, rng, scale=1.0):
        d = sp.d
        return cls(scale * rng.standard_normal(d * min(sp.p, sp.q)),
                   scale * rng.standard_normal(d * abs(sp.q - sp.p)),
                   scale * rng.standard_normal(d - 1))

    def check(self, sp: SpaceParams):
        d = sp.d
        want = (d * min(sp.p, sp.q), d * abs(sp.q - sp.p), d - 1)
        got = (np.shape(self.free)[-1], np.shape(self.tail)[-1], np.shape(self.w)[-1])
        if want != got:
            raise ValueError(f"nilpotent parameter sizes {got} do not match {want} for {sp.label()}")


def split_uv(sp: SpaceParams, free, tail):
    """F-vectors (u, v) of shapes (..., p, d), (..., q, d) from the free/tail reals."""
    d = sp.d
    free = np.asarray(free, dtype=float)
    tail = np.asarray(tail, dtype=float)
    lead = free.shape[:-1]
    f = free.reshape(lead + (min(sp.p, sp.q), d))
    t = tail.reshape(tail.shape[:-1] + (abs(sp.q - sp.p), d))
    dep = -fconj(f[..., ::-1, :])
    if sp.p >= sp.q:
        return np.concatenate([dep, t], axis=-2), f
    return f, np.concatenate([dep, t], axis=-2)


def assemble(sp: SpaceParams, first, mid_pos, mid_neg, last):
    """Stack F-blocks (first, p middle, q middle, last) into real coordinates."""
    lead = np.shape(first)[:-1]
    parts = [np.reshape(first, lead + (sp.d,)),
             np.reshape(mid_pos, lead + (sp.p * sp.d,)),
             np.reshape(mid_neg, lead + (sp.q * sp.d,)),
             np.reshape(last, lead + (sp.d,))]
    return np.concatenate(parts, axis=-1)


def orbit_points(sp: SpaceParams, s: float, free, tail, w):
    """Vectorized a_s exp(N_{u,v,w}) x0 with n* constrained per the p/q branch."""
    d = sp.d
    u, v = split_uv(sp, free, tail)
    tail = np.asarray(tail, dtype=float)
    c = 0.5 * np.einsum("...i,...i->...", tail, tail)
    if sp.p < sp.q:
        c = -c
    es = np.exp(s)
    w = np.asarray(w, dtype=float)
    lead = c.shape
    first = np.empty(lead + (d,))
    last = np.empty(lead + (d,))
    first[..., :-1] = es * w
    last[..., :-1] = es * w
    first[..., -1] = np.sinh(s) + es * c
    last[..., -1] = np.cosh(s) + es * c
    return assemble(sp, first, fconj(u), -fconj(v), last)


def orbit_point(sp: SpaceParams, s: float, n: NilpotentParam) -> AmbientVector:
    n.check(sp)
    return AmbientVector(orbit_points(sp, s, n.free, n.tail, n.w), sp)


# ---------------------------------------------------------------------------
# matrix oracle

def _real_rep(M):
    """(n, n, d) F-matrix -> (n d, n d) real matrix of left multiplication."""
    n, _, d = M.shape
    R = np.zeros((n * d, n * d))
    for i in range(n):
        for j in range(n):
            if np.any(M[i, j]):
                R[i * d:(i + 1) * d, j * d:(j + 1) * d] = left_mul_matrix(M[i, j])
    return R


def nilpotent_matrix(sp: SpaceParams, n: NilpotentParam):
    """N_{u,v,w} as an (m, m, d) F-matrix, m = p + q + 2."""
    d, p, q = sp.d, sp.p, sp.q
    m = sp.n_coords
    u, v = split_uv(sp, n.free, n.tail)
    w = np.zeros(d)
    w[:-1] = n.w
    N = np.zeros((m, m, d))
    for row in (0, m - 1):
        N[row, 0] = -w
        N[row, 1:p + 1] = u
        N[row, p + 1:p + q + 1] = v
        N[row, m - 1] = w
    for i in range(p):
        N[1 + i, 0] = -fconj(u[i])
        N[1 + i, m - 1] = fconj(u[i])
    for i in range(q):
        N[p + 1 + i, 0] = fconj(v[i])
        N[p + 1 + i, m - 1] = -fconj(v[i])
    return N


def flow_matrix(sp: SpaceParams, s: float):
    """Real representation of a_s = exp(X_s)."""
    D = sp.real_dim
    d = sp.d
    A = np.eye(D)
    c, sh = np.cosh(s), np.sinh(s)
    I = np.eye(d)
    A[:d, :d] = c * I
    A[-d:, -d:] = c * I
    A[:d, -d:] = sh * I
    A[-d:, :d] = sh * I
    return A


def matrix_oracle(sp: SpaceParams, s: float, n: NilpotentParam):
    """exp(X_s) (I + N + N^2/2) as a real matrix; a test oracle only."""
    n.check(sp)
    N = _real_rep(nilpotent_matrix(sp, n))
    E = np.eye(sp.real_dim) + N + 0.5 * N @ N
    return flow_matrix(sp, s) @ E


def form_matrix(sp: SpaceParams):
    """Diagonal of Re[x, y] in real coordinates."""
    npos = sp.d * (sp.p + 1)
    J = np.ones(sp.real_dim)
    J[npos:] = -1.0
    return np.diag(J)


def hermitian_pair(x, y, sp: SpaceParams):
    """Full F-valued form sum_i eps_i conj(y_i) x_i, as a d-block.

    Matrices act on the left and scalars on the right, so over H this is
    the ordering the group preserves; over R and C it equals x_i conj(y_i).
    """
    m = sp.n_coords
    xb = np.asarray(x, dtype=float).reshape(m, sp.d)
    yb = np.asarray(y, dtype=float).reshape(m, sp.d)
    eps = np.ones(m)
    eps[sp.p + 1:] = -1.0
    return np.einsum("i,ij->j", eps, fmul(fconj(yb), xb))
