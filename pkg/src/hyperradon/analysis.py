"""Asymptotic diagnostics for Abel-transform grids.

Exponential fits against sums c_j e^{mu_j s}, rapid-decay certification
above an explicit noise floor, support radius checks and constant-term
extraction from a converging tail.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

EPS = np.finfo(float).eps


class IllConditioned(ValueError):
    """The window cannot separate the requested exponents."""


@dataclass
class DecayVerdict:
    N: int
    passed: bool
    s_noise: float | None
    reason: str = ""


@dataclass
class DecayReport:
    fitted_exponents: list = field(default_factory=list)
    noise_floor: float = 0.0
    decay_certified_orders: list = field(default_factory=list)
    support_radius_observed: float | None = None
    constant_term: float | None = None

    @property
    def certified_up_to(self) -> int:
        """Largest N with all of 0..N passing, -1 if N = 0 fails."""
        top = -1
        for v in sorted(self.decay_certified_orders, key=lambda v: v.N):
            if not v.passed or v.N != top + 1:
                break
            top = v.N
        return top


# ---------------------------------------------------------------------------
# exponent fits

def fit_exponents(grid, exponents, window, values=None, max_cond=1e12):
    """Least-squares coefficients of values ~ sum_j c_j e^{mu_j s} over a window.

    ``grid`` is a TransformGrid or an (s, values) pair; ``values`` overrides
    the fitted array (for instance grid.adf).  Returns a list of
    (exponent, coefficient, residual), residual being the RMS misfit, the
    same for every row.  With no exponents a single row (None, 0, rms) is
    returned.
    """
    if isinstance(grid, tuple):
        s_all, v_all = (np.asarray(a, dtype=float) for a in grid)
    else:
        s_all = grid.s_values
        v_all = grid.af if values is None else values
    v_all = np.asarray(v_all if values is None else values, dtype=float)
    lo, hi = window
    if lo < s_all[0] - 1e-12 or hi > s_all[-1] + 1e-12:
        raise ValueError(f"window [{lo}, {hi}] leaves the grid [{s_all[0]}, {s_all[-1]}]")
    mask = (s_all >= lo - 1e-12) & (s_all <= hi + 1e-12) & np.isfinite(v_all)
    s, v = s_all[mask], v_all[mask]
    exps = [float(e) for e in exponents]
    if len(set(exps)) != len(exps):
        raise ValueError("exponents must be distinct")
    if not exps:
        rms = float(np.sqrt(np.mean(v * v))) if len(v) else 0.0
        return [(None, 0.0, rms)]
    if len(s) < len(exps) + 1:
        raise IllConditioned("window holds too few samples")
    # columns normalised at the window centre to keep the scaling sane
    mid = 0.5 * (lo + hi)
    B = np.exp(np.outer(s - mid, exps))
    norms = np.linalg.norm(B, axis=0)
    Bn = B / norms
    if np.linalg.cond(Bn) > max_cond:
        raise IllConditioned(f"basis condition number {np.linalg.cond(Bn):.2e} exceeds {max_cond:.0e}")
    sol, *_ = np.linalg.lstsq(Bn, v, rcond=None)
    coef = sol / norms * np.exp(-np.array(exps) * mid)
    fit = B @ (sol / norms)
    rms = float(np.sqrt(np.mean((v - fit) ** 2)))
    return [(e, float(c), rms) for e, c in zip(exps, coef)]


def log_slope(s, values):
    """Least-squares slope of log|values| against s."""
    s = np.asarray(s, dtype=float)
    y = np.log(np.abs(np.asarray(values, dtype=float)))
    return float(np.polyfit(s, y, 1)[0])


# ---------------------------------------------------------------------------
# rapid decay

def noise_floor(values, errs) -> float:
    """Scalar floor: the largest point error or 64 ulp of the largest value."""
    values = np.asarray(values, dtype=float)
    errs = np.asarray(errs, dtype=float)
    ok = np.isfinite(values)
    if not np.any(ok):
        return 0.0
    return float(max(np.max(errs[ok]), 64 * EPS * np.max(np.abs(values[ok]))))


def tail_onset(s, values, side: str = "+", floor: float = 0.0, N: int = 0) -> float:
    """Start of the final monotone stretch of (1 + |s|)^N |values| before the noise floor.

    Starting from the outermost point whose unweighted value exceeds
    ``floor`` and scanning inwards, returns the s at which the weighted
    value stops increasing.
    A signal that grows up to the grid edge yields that edge, which leaves
    too few points for a decay verdict.
    """
    s = np.asarray(s, dtype=float)
    v = np.abs(np.asarray(values, dtype=float))
    keep = np.isfinite(v)
    s, v = s[keep], v[keep]
    order = np.argsort(s)
    if side == "-":
        order = order[::-1]
    s, v = s[order], v[order]
    above = np.nonzero(v > floor)[0]
    if len(above) == 0:
        return float(s[0])
    m = (1.0 + np.abs(s)) ** N * v
    k = int(above[-1])
    while k > 0 and m[k - 1] >= m[k]:
        k -= 1
    return float(s[k])


def _first_rise(m, slack, sign):
    """Index of the first forbidden rise of ``m`` or None.

    The samples split into lobes of constant sign.  The first lobe may not
    rise; a later lobe may climb out of its zero crossing to one peak and
    then must fall, and lobe peaks may not rise.
    """
    cuts = np.nonzero(sign[1:] != sign[:-1])[0] + 1
    bounds = np.r_[0, cuts, len(m)]
    prev_peak, prev_sl = None, 0.0
    for a, b in zip(bounds[:-1], bounds[1:]):
        seg, sl = m[a:b], slack[a:b]
        top = a if prev_peak is None else a + int(np.argmax(seg))
        for i in range(top + 1, b):
            if m[i] > m[i - 1] + slack[i] + slack[i - 1]:
                return i
        if prev_peak is not None and m[top] > prev_peak + prev_sl + slack[top]:
            return top
        prev_peak, prev_sl = m[top], slack[top]
    return None


def rapid_decay_check(samples, N_max: int = 4, side: str = "+", min_points: int = 20,
                      floor=None) -> list[DecayVerdict]:
    """Per-N verdicts on (1 + |s|)^N |value| over a tail window.

    ``samples`` is (s, value, err) in any order; ``side`` = "+" treats the
    smallest s as the window start, "-" the largest.  A verdict passes when
    the weighted values do not rise (beyond the weighted errors) while the
    signal stays above the noise floor, apart from the climb out of a zero
    crossing to a lower lobe peak, the maximum sits at the window start
    and at least five points lie above the floor (no vacuous passes).
    """
    s, val, err = (np.asarray(a, dtype=float) for a in samples)
    keep = np.isfinite(val)
    s, val, err = s[keep], val[keep], err[keep]
    order = np.argsort(s)
    if side == "-":
        order = order[::-1]
    elif side != "+":
        raise ValueError("side must be '+' or '-'")
    s, val, err = s[order], val[order], err[order]
    if len(s) < min_points:
        return [DecayVerdict(N, False, None, f"window has {len(s)} < {min_points} points")
                for N in range(N_max + 1)]
    nf = noise_floor(val, err) if floor is None else float(floor)
    above = np.abs(val) > nf
    # signal region: up to the first point at or below the floor
    n_sig = len(s) if np.all(above) else int(np.argmin(above))
    s_noise = None if n_sig == len(s) else float(s[n_sig])
    out = []
    for N in range(N_max + 1):
        wgt = (1.0 + np.abs(s)) ** N
        m = wgt * np.abs(val)
        slack = wgt * (err + nf)
        if n_sig < 5:
            out.append(DecayVerdict(N, False, s_noise, "fewer than five points above the noise floor"))
            continue
        ms, sl = m[:n_sig], slack[:n_sig]
        k = _first_rise(ms, sl, np.sign(val[:n_sig]))
        if k is not None:
            out.append(DecayVerdict(N, False, s_noise, f"weighted value rises at s = {s[k]:.4g}"))
            continue
        if np.max(ms) > ms[0] + sl[0] + np.max(sl):
            out.append(DecayVerdict(N, False, s_noise, "maximum not at the window start"))
            continue
        if ms[0] <= wgt[n_sig - 1] * nf:
            out.append(DecayVerdict(N, False, s_noise, "signal at the start is below the weighted floor"))
            continue
        out.append(DecayVerdict(N, True, s_noise))
    return out


# ---------------------------------------------------------------------------
# support and constant term

@dataclass
class SupportVerdict:
    passed: bool
    observed_radius: float
    worst_outside: float


def support_check(grid, R: float, tol: float, values=None, margin: float = 0.05) -> SupportVerdict:
    """|A f(s)| <= tol max|A f| for |s| > R (1 + margin)."""
    if isinstance(grid, tuple):
        s, v = (np.asarray(a, dtype=float) for a in grid)
    else:
        s, v = grid.s_values, (grid.af if values is None else values)
    v = np.abs(np.asarray(v, dtype=float))
    top = float(np.max(v)) if len(v) else 0.0
    if top == 0.0:
        return SupportVerdict(True, 0.0, 0.0)
    big = v > tol * top
    observed = float(np.max(np.abs(s[big]))) if np.any(big) else 0.0
    outside = np.abs(s) > R * (1 + margin)
    worst = float(np.max(v[outside]) / top) if np.any(outside) else 0.0
    return SupportVerdict(worst <= tol, observed, worst)


@dataclass
class ConstantTerm:
    value: float
    uncertainty: float
    converged: bool


def _fit_limit(basis, v):
    B = np.column_stack([np.ones_like(v)] + basis)
    sol, *_ = np.linalg.lstsq(B, v, rcond=None)
    return float(sol[0]), float(np.sqrt(np.mean((B @ sol - v) ** 2)))


def constant_term(s, values, rel_tol=1e-3) -> ConstantTerm:
    """Limit of a converging tail from its last tenth of samples (at least five).

    Two convergence models are fitted by least squares: exponential,
    C + b e^{-(s - s_end)}, and algebraic, C + b/s + c/s^2.  The better fit
    supplies the value, the gap between the two limits the uncertainty.
    The tail is flagged non-converged when the uncertainty exceeds rel_tol
    times the value or the samples are not monotone.
    """
    s = np.asarray(s, dtype=float)
    v = np.asarray(values, dtype=float)
    order = np.argsort(s)
    s, v = s[order], v[order]
    if len(v) < 5:
        raise ValueError("need at least five samples")
    if s[0] <= 0:
        raise ValueError("tail samples need s > 0")
    k = max(5, len(v) // 10)
    ts, tv = s[-k:], v[-k:]
    c_exp, r_exp = _fit_limit([np.exp(-(ts - ts[-1]))], tv)
    c_alg, r_alg = _fit_limit([1.0 / ts, 1.0 / ts ** 2], tv)
    value = c_exp if r_exp <= r_alg else c_alg
    unc = max(abs(c_exp - c_alg), 4 * EPS * abs(value))
    diffs = np.diff(tv)
    monotone = bool(np.all(diffs >= 0) or np.all(diffs <= 0))
    ok = bool(monotone and np.isfinite(value) and unc <= rel_tol * max(abs(value), 1e-300))
    return ConstantTerm(value, float(unc), ok)
