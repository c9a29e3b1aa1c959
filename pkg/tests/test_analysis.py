import numpy as np
import pytest
from hypothesis import given, strategies as st

from hyperradon import analysis as A


def test_fit_exponents_synthetic():
    s = np.linspace(0, 5, 101)
    rows = A.fit_exponents((s, 2 * np.exp(s) + np.exp(-s)), [1.0, -1.0], (0, 5))
    assert abs(rows[0][1] - 2) < 1e-10 and abs(rows[1][1] - 1) < 1e-10


def test_fit_exponents_empty_is_rms():
    s = np.linspace(0, 1, 11)
    v = np.full(11, 3.0)
    assert A.fit_exponents((s, v), [], (0, 1)) == [(None, 0.0, 3.0)]


def test_fit_exponents_errors():
    s = np.linspace(0, 1, 11)
    with pytest.raises(A.IllConditioned):
        A.fit_exponents((s, np.exp(s)), [1.0, 1.0 + 1e-9], (0, 1), max_cond=1e6)
    with pytest.raises(ValueError):
        A.fit_exponents((s, np.exp(s)), [1.0], (0, 2))


@given(st.floats(-2, 2), st.floats(-2, 2), st.floats(0.5, 2.0), st.floats(3.0, 6.0))
def test_fit_recovers_separated_exponents(a, b, gap, length):
    s = np.linspace(0, length, 200)
    mu = [0.5, 0.5 - gap]
    v = a * np.exp(mu[0] * s) + b * np.exp(mu[1] * s)
    rows = A.fit_exponents((s, v), mu, (0, length))
    assert abs(rows[0][1] - a) < 1e-10 and abs(rows[1][1] - b) < 1e-10


def test_rapid_decay_examples():
    s = np.linspace(5, 30, 200)
    z = np.zeros_like(s)
    assert all(v.passed for v in A.rapid_decay_check((s, np.exp(-s), z), 4))
    assert not A.rapid_decay_check((s, np.exp(0.5 * s), z), 4)[0].passed
    v = A.rapid_decay_check((s, 1 / (1 + s * s), z), 3)
    assert v[0].passed and v[1].passed and not v[3].passed


def test_rapid_decay_oscillating_tails():
    # window starts on a peak of cos(3s), as tail_onset would choose
    s = np.linspace(2 * np.pi, 20, 400)
    z = np.zeros_like(s)
    # zero crossings in a rapidly decreasing tail are allowed
    assert all(v.passed for v in A.rapid_decay_check((s, np.exp(-s) * np.cos(3 * s), z), 4))
    # lobes that grow are not
    assert not A.rapid_decay_check((s, np.exp(0.2 * s) * np.cos(3 * s), z), 0)[0].passed
    # nor is a rise inside the first lobe
    bump = np.exp(-s) + 0.5 * np.exp(-5 - ((s - 8) ** 2) * 4)
    assert not A.rapid_decay_check((s, bump, z), 0)[0].passed


def test_rapid_decay_needs_points():
    s = np.linspace(5, 6, 10)
    assert not any(v.passed for v in A.rapid_decay_check((s, np.exp(-s), 0 * s), 2))


def test_rapid_decay_minus_side():
    s = np.linspace(-25, -5, 100)
    assert all(v.passed for v in A.rapid_decay_check((s, np.exp(s), 0 * s), 4, side="-"))


@given(st.floats(1e-12, 1e-3), st.integers(0, 4))
def test_no_vacuous_passes(noise, N):
    s = np.linspace(1, 20, 200)
    v = np.exp(-2 * s)
    verdict = A.rapid_decay_check((s, v, np.full_like(s, noise)), N)[N]
    if verdict.passed:
        # at least five points above the floor and the weighted start beats the weighted floor
        above = v > A.noise_floor(v, np.full_like(s, noise))
        assert above[:5].all()


def test_noise_floor_covers_errors():
    v = np.array([1.0, 2.0])
    assert A.noise_floor(v, np.array([1e-3, 0])) == 1e-3
    assert A.noise_floor(v, np.zeros(2)) > 0


def test_tail_onset():
    s = np.linspace(0, 10, 101)
    v = s * np.exp(-s)
    assert abs(A.tail_onset(s, v) - 1.0) < 1e-9
    assert A.tail_onset(s, np.exp(s)) == 10.0


def test_support_examples():
    s = np.linspace(-3, 3, 121)
    bump = np.where(np.abs(s) < 1, np.exp(1 - 1 / (1 - np.minimum(s * s, 0.999999))), 0.0)
    v = A.support_check((s, bump), 1.0, 1e-8)
    assert v.passed and 0.8 < v.observed_radius <= 1.0
    assert not A.support_check((s, np.exp(-s * s)), 1.0, 1e-8).passed
    z = A.support_check((s, 0 * s), 1.0, 1e-8)
    assert z.passed and z.observed_radius == 0


def test_constant_term_examples():
    s = np.linspace(1, 20, 200)
    c = A.constant_term(s, 1 + np.exp(-s))
    assert abs(c.value - 1) < 1e-6 and c.converged
    c2 = A.constant_term(s, 1 + 1 / s)
    assert abs(c2.value - 1) < 1e-6
    assert c2.uncertainty > c.uncertainty
