"""Acceptance criteria A1-A9 at their stated tolerances.

Each test prints one PASS/FAIL line; the lines are repeated in the
terminal summary.
"""

import math

import numpy as np
import pytest

from hyperradon import analysis, suites, transforms
from hyperradon.params import SpaceParams, build_D, noncuspidal
from hyperradon.quadrature import QuadratureSpec
from hyperradon.testfuncs import angular_modulated, bump_radial, gaussian_radial, odd_modulated

SPEC = QuadratureSpec()


def sp_of(*lab):
    return SpaceParams.make(*lab)


def summary(checks):
    return "; ".join(f"{c.name}: {c.measured:.3g} ({'ok' if c.passed else 'BAD'} vs {c.threshold:.3g})"
                     for c in checks)


def test_A1_representation_consistency(accept):
    checks = []
    for lab in (("R", 0, 2), ("R", 0, 4)):
        out = suites.suite_consistency(suites.SuiteInput(sp_of(*lab), gaussian_radial(), SPEC))
        for c in out:
            c.name = f"{lab} {c.name}"
        checks += out
    ok = all(c.passed for c in checks)
    worst = max(c.measured for c in checks if "F(e^-s)" in c.name)
    accept("A1", ok, f"{len(checks)} checks, worst F-identity gap {worst:.2e} (<= 1e-8)")
    assert ok, summary(checks)


def test_A2_lemma_g(accept):
    checks = []
    for lab in (("R", 1, 3), ("C", 0, 2)):
        sp = sp_of(*lab)
        for probe in (gaussian_radial(), angular_modulated()):
            out = suites.suite_lemma_g(suites.SuiteInput(sp, probe, SPEC))
            for c in out:
                c.name = f"{lab} {probe.name} {c.name}"
            checks += out
    ok = all(c.passed for c in checks)
    expo = max(c.measured for c in checks if "exponent" in c.name)
    sym = max(c.measured for c in checks if "exponent" not in c.name)
    accept("A2", ok, f"exponent gap {expo:.1e} (<= 1e-6), symmetry gap {sym:.1e} (<= 1e-9)")
    assert ok, summary(checks)


def test_A3_support(accept):
    sp = sp_of("R", 1, 1)
    checks = []
    for R in (1.0, 2.0):
        inp = suites.SuiteInput(sp, bump_radial(R), SPEC, s_min=-(R + 1.5), s_max=R + 1.5, h=0.05)
        checks += suites.suite_support(inp)
    ok = all(c.passed for c in checks)
    accept("A3", ok, "; ".join(f"R={R:g}: worst outside {c.measured:.1e}, {c.detail}"
                                for R, c in zip((1, 2), checks)))
    assert ok, summary(checks)


def test_A4_exchange(accept):
    runs = [(("R", 0, 3), 0.05), (("C", 0, 2), 0.1)]
    checks = []
    for lab, h in runs:
        inp = suites.SuiteInput(sp_of(*lab), gaussian_radial(), SPEC, s_min=-3.0, s_max=5.0, h=h)
        checks += suites.suite_exchange(inp)
    ok = all(c.passed for c in checks)
    accept("A4", ok, "; ".join(f"{lab}: {c.measured:.1e} of max|Af| (<= 1e-4)" for (lab, _), c in zip(runs, checks)))
    assert ok, summary(checks)


def test_A5_theorem_vi_pipeline(accept):
    sp = sp_of("R", 0, 4)
    parts, ok = [], True
    for probe in (gaussian_radial(), angular_modulated()):
        inp = suites.SuiteInput(sp, probe, SPEC)
        grid = transforms.compute_grid(probe, sp, inp.grid(), SPEC)
        w = grid.window(5.0, 8.0)
        slope = analysis.log_slope(grid.s_values[w], grid.af[w])
        a = abs(slope - 1.0) <= 0.05
        tr = transforms.taylor_coeffs(probe, sp, SPEC, n_coeffs=2)
        ratio = abs(tr.coeffs[1]) / abs(tr.coeffs[0])
        b = ratio <= 1e-6
        vi = suites.suite_theorem_vi(inp, grid=grid)
        decay = [c for c in vi if "decay" in c.name]
        c_ok = all(c.passed for c in decay)
        two = [c for c in vi if "route" in c.name]
        d_ok = all(c.passed for c in two)
        if probe.name == "gaussian":
            d_ok = d_ok and len(two) == 1
        ok &= a and b and c_ok and d_ok
        parts.append(f"{probe.name}: slope {slope:.4f}, |c1/c0| {ratio:.1e}, decay N<="
                     f"{min(c.measured for c in decay)} (floor {decay[0].noise_floor:.1e})"
                     + (f", two-route {two[0].measured:.1e}" if two else ""))
    accept("A5", ok, "; ".join(parts))
    assert ok, parts


def test_A6_schwartz_without_D(accept):
    sp = sp_of("R", 0, 1)
    inp = suites.SuiteInput(sp, gaussian_radial(), SPEC, s_min=-4.0, s_max=30.0, h=0.05)
    checks = suites.suite_schwartz(inp, n_max=4)
    ok = all(c.passed for c in checks)
    accept("A6", ok, "; ".join(f"{c.name}: N<={c.measured}" + (f" ({c.detail})" if c.detail else "")
                                for c in checks))
    assert ok, summary(checks)


def test_A7_boundary_case(accept):
    sp = sp_of("R", 1, 3)
    assert build_D(sp).lambdas == ()
    inp = suites.SuiteInput(sp, gaussian_radial(), SPEC, s_min=-4.0, s_max=22.0, h=0.05)
    grid = transforms.compute_grid(gaussian_radial(), sp, inp.grid(), SPEC)
    w = grid.window(18.0, 22.0)
    (_, const, resid), = analysis.fit_exponents(grid, [0.0], (18.0, 22.0))
    floor = analysis.noise_floor(grid.af[w], grid.point_err[w])
    ct = analysis.constant_term(grid.s_values[grid.s_values > 1], grid.af[grid.s_values > 1])
    a = resid <= floor
    checks = suites.suite_theorem_vi(inp, grid=grid)
    decay = [c for c in checks if "decay" in c.name]
    ok = a and all(c.passed for c in checks)
    accept("A7", ok, f"constant {const:.10g} (limit fit {ct.value:.10g} +- {ct.uncertainty:.1e}), "
                     f"residual {resid:.1e} vs floor {floor:.1e}; A f'' decay N<={min(c.measured for c in decay)}")
    assert ok, summary(checks)


def test_A8_nonprojective_parity(accept):
    sp = sp_of("R", 0, 6, "nonprojective")
    probe = odd_modulated(sp=sp)
    assert [float(x) for x in build_D(sp).lambdas] == [2.0, 1.0]
    par = suites.suite_parity(suites.SuiteInput(sp, probe, SPEC))
    # h = 0.1 keeps the h^-6 noise amplification of the cubic L below the tail signal
    inp = suites.SuiteInput(sp, probe, SPEC, s_min=-6.0, s_max=7.0, h=0.1, n_max=2)
    vi = suites.suite_theorem_vi(inp)
    ok = all(c.passed for c in par + vi)
    accept("A8", ok, f"largest odd |c_j|/scale {par[0].measured:.3g} (> 1e-3); "
                     + "; ".join(f"{c.name}: N<={c.measured}" for c in vi))
    assert ok, summary(par + vi)


def test_A9_noncuspidal_table(accept):
    table = {("R", 0, 4): [1], ("C", 0, 4): [3, 1], ("R", 1, 3): [], ("H", 0, 2): [3, 1]}
    got = {lab: [float(x) for x in noncuspidal(sp_of(*lab))] for lab in table}
    ok = got == {k: [float(x) for x in v] for k, v in table.items()}
    accept("A9", ok, ", ".join(f"{k}: {v}" for k, v in got.items()))
    assert ok
