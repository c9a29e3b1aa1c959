import numpy as np
import pytest
from hypothesis import given, strategies as st

from hyperradon.geometry import (AmbientVector, NilpotentParam, NonTimelike, base_point, fconj, fmul,
                                 form_matrix, hermitian_pair, hermitian_self, matrix_oracle, normalize,
                                 orbit_point, orbit_points, radial_coordinate, right_mul_coords)
from hyperradon.params import SpaceParams

spaces = st.builds(SpaceParams.make, st.sampled_from(["R", "C", "H"]), st.integers(0, 3), st.integers(1, 3))


def test_base_point():
    sp = SpaceParams.make("C", 1, 2)
    x0 = base_point(sp)
    assert hermitian_self(x0) == -1
    assert radial_coordinate(x0) == 0


def test_quaternion_units():
    i, j, k, one = np.eye(4)
    assert np.allclose(fmul(i, j), k)
    assert np.allclose(fmul(j, i), -k)
    assert np.allclose(fmul(i, i), -one)
    assert np.allclose(fmul(one, k), k)


@given(st.integers(0, 10**6))
def test_quaternion_norm_multiplicative(seed):
    r = np.random.default_rng(seed)
    a, b = r.standard_normal(4), r.standard_normal(4)
    assert np.isclose(np.linalg.norm(fmul(a, b)), np.linalg.norm(a) * np.linalg.norm(b))
    assert np.allclose(fconj(fmul(a, b)), fmul(fconj(b), fconj(a)))


def test_nontimelike_rejected():
    sp = SpaceParams.make("R", 1, 1)
    x = AmbientVector(np.array([1.0, 0, 0, 0]), sp)
    with pytest.raises(NonTimelike):
        radial_coordinate(x)
    with pytest.raises(NonTimelike):
        normalize(x)


@given(spaces, st.floats(-3, 3), st.integers(0, 10**6))
def test_orbit_matches_matrix_oracle(sp, s, seed):
    n = NilpotentParam.random(sp, np.random.default_rng(seed))
    x = orbit_point(sp, s, n).coords
    M = matrix_oracle(sp, s, n)
    ref = M[:, -1]
    assert np.allclose(x, ref, rtol=1e-12, atol=1e-12 * np.max(np.abs(ref)))


@given(spaces, st.floats(-2, 2), st.integers(0, 10**6))
def test_orbit_stays_on_hyperboloid(sp, s, seed):
    n = NilpotentParam.random(sp, np.random.default_rng(seed))
    x = orbit_point(sp, s, n)
    assert np.isclose(hermitian_self(x), -1.0, rtol=0, atol=1e-9 * np.max(x.coords ** 2))


@given(spaces, st.integers(0, 10**6))
def test_oracle_preserves_form(sp, seed):
    r = np.random.default_rng(seed)
    n = NilpotentParam.random(sp, r)
    M = matrix_oracle(sp, 0.7, n)
    J = form_matrix(sp)
    assert np.allclose(M.T @ J @ M, J, atol=1e-9 * np.max(np.abs(M)) ** 2)
    x, y = r.standard_normal(sp.real_dim), r.standard_normal(sp.real_dim)
    lhs = hermitian_pair(M @ x, M @ y, sp)
    rhs = hermitian_pair(x, y, sp)
    assert np.allclose(lhs, rhs, atol=1e-8 * np.max(np.abs(M)) ** 2 * np.linalg.norm(x) * np.linalg.norm(y))


@given(spaces, st.floats(0.0, 4.0))
def test_radial_coordinate_of_flow(sp, s):
    x = orbit_point(sp, s, NilpotentParam.zero(sp))
    assert np.isclose(radial_coordinate(x), s, atol=1e-12)


@given(spaces, st.integers(0, 10**6))
def test_projective_unit_invariance(sp, seed):
    r = np.random.default_rng(seed)
    x = orbit_point(sp, 0.5, NilpotentParam.random(sp, r))
    u = r.standard_normal(sp.d)
    u /= np.linalg.norm(u)
    y = right_mul_coords(x.coords, u, sp)
    assert np.isclose(hermitian_self(y, sp), hermitian_self(x), atol=1e-9 * np.max(x.coords ** 2))
    assert np.isclose(radial_coordinate(y, sp), radial_coordinate(x), atol=1e-9)


def test_orbit_points_vectorized():
    sp = SpaceParams.make("C", 1, 3)
    r = np.random.default_rng(3)
    ns = [NilpotentParam.random(sp, r) for _ in range(4)]
    batch = orbit_points(sp, 0.3, np.stack([n.free for n in ns]), np.stack([n.tail for n in ns]),
                         np.stack([n.w for n in ns]))
    for row, n in zip(batch, ns):
        assert np.allclose(row, orbit_point(sp, 0.3, n).coords)


def test_param_size_mismatch():
    sp = SpaceParams.make("R", 1, 2)
    with pytest.raises(ValueError):
        orbit_point(sp, 0.0, NilpotentParam(np.zeros(2), np.zeros(1), np.zeros(0)))


def _block_rotation(sp, r):
    n_pos = sp.d * (sp.p + 1)
    n_neg = sp.d * (sp.q + 1)
    qa, _ = np.linalg.qr(r.standard_normal((n_pos, n_pos)))
    qb, _ = np.linalg.qr(r.standard_normal((n_neg, n_neg)))
    return qa, qb


@given(spaces, st.floats(-3, 3), st.integers(0, 10**6))
def test_radial_coordinate_block_rotation_invariant(sp, s, seed):
    r = np.random.default_rng(seed)
    x = orbit_point(sp, s, NilpotentParam.random(sp, r, 1.0)).coords
    # positive blocks: first and p middle; negative: q middle and last
    d = sp.d
    pos_idx = np.r_[0:d, d:d + d * sp.p]
    neg_idx = np.r_[d + d * sp.p:len(x)]
    qa, qb = _block_rotation(sp, r)
    y = x.copy()
    y[pos_idx] = qa @ x[pos_idx]
    y[neg_idx] = qb @ x[neg_idx]
    assert np.isclose(radial_coordinate(y, sp), radial_coordinate(x, sp), rtol=1e-12, atol=1e-12)
