import numpy as np
import pytest
from hypothesis import assume, given, strategies as st

from hyperradon.geometry import NilpotentParam, base_point, orbit_point, right_mul_coords
from hyperradon.params import SpaceParams
from hyperradon.testfuncs import (DecayKind, Invariance, angular_modulated, bump_radial, gaussian_radial,
                                  make_probe, odd_modulated, zero_function)

spaces = st.builds(SpaceParams.make, st.sampled_from(["R", "C", "H"]), st.integers(0, 2), st.integers(1, 3))


def test_gaussian_at_base_point():
    sp = SpaceParams.make("C", 0, 2)
    assert gaussian_radial()(base_point(sp)) == 1.0
    assert zero_function()(base_point(sp)) == 0.0


@given(spaces, st.floats(0.1, 5.0), st.integers(0, 10**6))
def test_degree_zero_homogeneity(sp, a, seed):
    x = orbit_point(sp, 0.4, NilpotentParam.random(sp, np.random.default_rng(seed), 0.5))
    for f in (gaussian_radial(0.7), bump_radial(1.5), angular_modulated()):
        assert np.isclose(f(x * a), f(x), rtol=1e-12, atol=1e-300)


@given(spaces, st.integers(0, 10**6))
def test_projective_probes_ignore_unit_scalars(sp, seed):
    r = np.random.default_rng(seed)
    x = orbit_point(sp, 0.3, NilpotentParam.random(sp, r, 0.5))
    u = r.standard_normal(sp.d)
    u /= np.linalg.norm(u)
    y = right_mul_coords(x.coords, u, sp)
    for f in (gaussian_radial(), angular_modulated()):
        assert np.isclose(f.batch(y[None], sp)[0], f(x), rtol=1e-10, atol=1e-14)


def test_odd_probe_is_odd_and_guarded():
    sp = SpaceParams.make("R", 0, 6, "nonprojective")
    f = odd_modulated(sp=sp)
    x = orbit_point(sp, 0.8, NilpotentParam.random(sp, np.random.default_rng(1), 0.5))
    assert np.isclose(f(-x), -f(x))
    assert f.invariance is Invariance.ODD
    with pytest.raises(ValueError):
        odd_modulated(sp=SpaceParams.make("R", 0, 6))
    with pytest.raises(ValueError):
        f.check_space(SpaceParams.make("R", 0, 6))


@given(st.floats(-2.0, 2.0))
def test_profile_derivatives_match_fd(s):
    prof = gaussian_radial(1.3).radial_profile
    h = 1e-4
    fd = (prof.phi(s + h) - prof.phi(s - h)) / (2 * h)
    assert np.isclose(prof.derivative(1)(s), fd, rtol=1e-6, atol=1e-9)
    fd2 = (prof.phi(s + h) - 2 * prof.phi(s) + prof.phi(s - h)) / h ** 2
    assert np.isclose(prof.derivative(2)(s), fd2, rtol=1e-5, atol=1e-6)


def test_bump_support_and_value():
    f = bump_radial(1.0)
    assert f.decay.kind is DecayKind.COMPACT and f.decay.R == 1.0
    prof = f.radial_profile
    s = np.array([0.0, 0.5, 0.999, 1.0, 1.5])
    vals = prof.phi(s)
    assert vals[0] == 1.0 and vals[1] > 0 and vals[3] == 0 and vals[4] == 0
    assert np.all(prof.derivative(3)(np.array([1.0, 2.0])) == 0)


def test_probe_parameters_validated():
    with pytest.raises(ValueError):
        gaussian_radial(0)
    with pytest.raises(ValueError):
        bump_radial(-1)
    with pytest.raises(ValueError):
        make_probe("nope")
    assert make_probe("gaussian", beta=2.0).describe() == "gaussian(beta=2.0)"


@given(spaces, st.floats(-4, 4))
def test_profile_matches_probe_on_flow(sp, s):
    for f in (gaussian_radial(0.6), bump_radial(2.0)):
        x = orbit_point(sp, s, NilpotentParam.zero(sp))
        assert abs(f(x) - float(f.radial_profile.phi(s))) <= 1e-12


@given(spaces, st.sampled_from([0.1, 2.0, 10.0]), st.integers(0, 10**6))
def test_homogeneity_large_factors(sp, a, seed):
    x = orbit_point(sp, 0.7, NilpotentParam.random(sp, np.random.default_rng(seed), 1.0))
    f = gaussian_radial()
    # far out on the cone one ulp in x moves y by ~y^2 ulp, so keep y moderate
    assume(f(x) > np.exp(-10.0))
    assert abs(f(x * a) - f(x)) <= 1e-12 * abs(f(x))


def test_super_schwartz_decay_on_flow():
    s = np.linspace(0, 6, 601)
    phi = gaussian_radial().radial_profile.phi(s)
    for N in range(11):
        m = np.exp(N * s) * phi
        k = int(np.argmax(m))
        assert k < len(s) - 1 and np.all(np.diff(m[k:]) <= 0)
