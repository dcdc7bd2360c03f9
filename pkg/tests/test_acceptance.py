"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest -s tests/test_acceptance.py -v`` to see the lines as they
happen.  Sweep data is cached across criteria so the expensive E_inf(N)
runs happen once.
"""

import math
import time

import numpy as np
import pytest

from caputodr import (
    Method,
    Signal,
    TimeGrid,
    caputo_derivative,
    caputo_l1,
    initial_state,
    advance_euler,
    advance_trapezoid,
    kernel_reference,
    max_error,
)
from caputodr.oracle import builtin_cases
from caputodr.quadrature import gauss_laguerre
from caputodr.report import fit_loglog

SWEEP = (10, 20, 40, 80, 160)
N_TIME = 10_000
CASES = builtin_cases()

_sweep_cache = {}


def _report(name, ok, detail):
    print(f"{'PASS' if ok else 'FAIL'} {name}: {detail}")
    return ok


def sweep_errors(case_name, method):
    """E_inf(N) over the standard sweep, backward Euler, n = 10^4."""
    key = (case_name, method)
    if key not in _sweep_cache:
        case = CASES[case_name]
        grid = TimeGrid(horizon=case.horizon, count=N_TIME)
        exact = np.asarray(case.exact(grid.times()), dtype=float)
        errors = []
        for order in SWEEP:
            approx = caputo_derivative(method, "euler", case.alpha, order, grid, case.signal)
            errors.append(max_error(approx, exact))
        _sweep_cache[key] = np.array(errors)
    return _sweep_cache[key]


def sweep_slope(case_name, method):
    return fit_loglog(SWEEP, sweep_errors(case_name, method)).slope


def test_criterion_1_quadrature_exactness():
    start = time.perf_counter()
    worst = 0.0
    for gamma in (-0.6, -0.4, 0.5):
        for order in (5, 20, 60):
            rule = gauss_laguerre(order, gamma)
            log_w = np.log(rule.scaled_weights) - rule.nodes
            log_z = np.log(rule.nodes)
            for degree in range(2 * order):
                log_terms = log_w + degree * log_z
                top = log_terms.max()
                got = top + math.log(np.sum(np.exp(log_terms - top)))
                rel = abs(math.expm1(got - math.lgamma(gamma + degree + 1.0)))
                worst = max(worst, rel)
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-10 and elapsed < 1.0
    assert _report(
        "criterion 1 (quadrature exactness)",
        ok,
        f"worst rel err {worst:.2e} (tol 1e-10), runtime {elapsed:.2f}s (< 1s)",
    )


def test_criterion_2_oracle_cross_validation():
    start = time.perf_counter()
    details = []
    ok = True
    for name, case in CASES.items():
        grid = TimeGrid(horizon=case.horizon, count=100_000)
        t = grid.times()
        approx = caputo_l1(case.signal, case.alpha, grid)
        exact = np.asarray(case.exact(t), dtype=float)
        mask = t >= case.horizon / 10.0
        rel = float(np.max(np.abs(approx[mask] - exact[mask]) / np.abs(exact[mask])))
        ok &= rel <= 5e-3
        details.append(f"{name} {rel:.2e}")
    elapsed = time.perf_counter() - start
    ok = ok and elapsed < 60.0
    assert _report(
        "criterion 2 (L1 vs closed forms)",
        ok,
        f"max rel on [T/10,T]: {', '.join(details)} (tol 5e-3), runtime {elapsed:.1f}s (< 60s)",
    )


WINDOWS = {
    Method.CDR: (-1.7, -1.1),
    Method.SDR: (-0.7, -0.1),
    Method.YA: (-1.1, -0.5),
    Method.ISDR: (-1.1, -0.5),
}


def test_criterion_3_rate_reproduction():
    start = time.perf_counter()
    details = []
    ok = True
    for method, (lo, hi) in WINDOWS.items():
        slope = sweep_slope("cubic", method)
        inside = lo <= slope <= hi
        ok &= inside
        details.append(f"{method.value} {slope:+.3f} in [{lo},{hi}]{'' if inside else ' VIOLATED'}")
    elapsed = time.perf_counter() - start
    ok = ok and elapsed < 300.0
    assert _report(
        "criterion 3 (convergence rates, cubic)",
        ok,
        f"{'; '.join(details)}; runtime {elapsed:.1f}s (< 300s)",
    )


def test_criterion_4_qualitative_ordering():
    e2 = {m: sweep_errors("cubic", m)[-1] for m in (Method.CDR, Method.YA, Method.SDR)}
    ordering_e2 = e2[Method.CDR] < e2[Method.YA] < e2[Method.SDR]
    s1 = {m: sweep_slope("power16", m) for m in (Method.CDR, Method.YA, Method.SDR)}
    ordering_e1 = s1[Method.CDR] < s1[Method.YA] < s1[Method.SDR]
    cdr_window = -1.9 <= s1[Method.CDR] <= -1.3
    ok = ordering_e2 and ordering_e1 and cdr_window
    assert _report(
        "criterion 4 (method ordering)",
        ok,
        f"cubic E(160): CDR {e2[Method.CDR]:.2e} < YA {e2[Method.YA]:.2e} < SDR "
        f"{e2[Method.SDR]:.2e} ({ordering_e2}); power16 rate order CDR {s1[Method.CDR]:+.2f} < "
        f"YA {s1[Method.YA]:+.2f} < SDR {s1[Method.SDR]:+.2f} ({ordering_e1}); "
        f"CDR slope in [-1.9,-1.3] ({cdr_window})",
    )


def test_criterion_5_isdr_dichotomy():
    pairs = [
        ("cubic", Method.YA),
        ("bessel", Method.YA),
        ("power16", Method.SDR),
        ("sine", Method.SDR),
    ]
    details = []
    ok = True
    for case_name, partner in pairs:
        gap = abs(sweep_slope(case_name, Method.ISDR) - sweep_slope(case_name, partner))
        good = gap <= 0.3
        ok &= good
        details.append(f"{case_name} |ISDR-{partner.value}|={gap:.3f}{'' if good else ' VIOLATED'}")
    assert _report("criterion 5 (ISDR dichotomy)", ok, "; ".join(details) + " (tol 0.3)")


def _stepped_node_error(method, solver, alpha, z, h, signal, ref):
    n = int(round(1.0 / h)) + 1
    grid = TimeGrid(horizon=1.0, count=n)
    times = grid.times()
    yv = signal.y(times)
    fv = signal.y_prime(times) if method.forcing == "derivative" else yv
    nodes = np.array([z])
    state = initial_state(method, alpha, 1, initial_slope=signal.y_prime(0.0))
    euler = state
    for k in range(1, n):
        if solver == "euler":
            state = advance_euler(method, alpha, state, nodes, grid, fv[k - 1], fv[k])
        else:
            euler = advance_euler(method, alpha, euler, nodes, grid, fv[k - 1], fv[k])
            state = advance_trapezoid(method, alpha, state, euler, nodes, grid, fv[k - 1], fv[k])
    return abs(state.x1[0] - ref)


def test_criterion_6_stepper_correctness():
    signal = Signal(y=lambda t: np.asarray(t, float) ** 2, y_prime=lambda t: 2.0 * np.asarray(t, float))
    z, alpha = 0.5, 0.4
    details = []
    ok = True
    for method in Method:
        ref = kernel_reference(method, alpha, z, 1.0, signal, tol=1e-12)
        for solver, bound in (("euler", 0.6), ("trapezoid", 0.35)):
            errs = [
                _stepped_node_error(method, solver, alpha, z, h, signal, ref)
                for h in (1e-2, 5e-3, 2.5e-3, 1.25e-3)
            ]
            ratios = [e2 / e1 for e1, e2 in zip(errs, errs[1:])]
            good = all(r <= bound for r in ratios)
            ok &= good
            details.append(
                f"{method.value}/{solver} ratios {','.join(f'{r:.2f}' for r in ratios)}"
                f"{'' if good else f' exceed {bound}'}"
            )
    assert _report("criterion 6 (stepper vs kernel)", ok, "; ".join(details))


def test_criterion_7_invariants():
    rng = np.random.default_rng(2024)
    grid = TimeGrid(horizon=1.0, count=501)
    worst = 0.0
    for _ in range(20):
        c1 = rng.uniform(-1.0, 1.0, size=5)
        c2 = rng.uniform(-1.0, 1.0, size=5)
        a, b = rng.uniform(-2.0, 2.0, size=2)
        p1, p2 = np.polynomial.Polynomial(c1), np.polynomial.Polynomial(c2)
        p12 = a * p1 + b * p2
        method = list(Method)[rng.integers(0, 4)]
        out1 = caputo_derivative(method, "euler", 0.5, 20, grid, Signal(p1, p1.deriv()))
        out2 = caputo_derivative(method, "euler", 0.5, 20, grid, Signal(p2, p2.deriv()))
        both = caputo_derivative(method, "euler", 0.5, 20, grid, Signal(p12, p12.deriv()))
        worst = max(worst, float(np.max(np.abs(a * out1 + b * out2 - both))))
        worst = max(worst, abs(both[0]))
        const = np.polynomial.Polynomial([float(c1[0])])
        flat = caputo_derivative(method, "euler", 0.5, 20, grid, Signal(const, const.deriv()))
        worst = max(worst, float(np.max(np.abs(flat))))
    ok = worst <= 1e-11
    assert _report(
        "criterion 7 (linearity / zero invariants)",
        ok,
        f"max violation {worst:.2e} over 20 random polynomial pairs (tol 1e-11)",
    )


def test_criterion_8_linear_complexity():
    case = CASES["cubic"]

    def timed(count, repeats):
        grid = TimeGrid(horizon=case.horizon, count=count)
        best = math.inf
        for _ in range(repeats):
            t0 = time.perf_counter()
            caputo_derivative(Method.CDR, "euler", case.alpha, 50, grid, case.signal)
            best = min(best, time.perf_counter() - t0)
        return best

    timed(1000, 1)  # warm-up
    small = timed(10_000, 3)
    large = timed(100_000, 2)
    ratio = large / small
    ok = 8.0 <= ratio <= 12.0
    assert _report(
        "criterion 8 (O(n) wall-time scaling)",
        ok,
        f"t(n=1e5)/t(n=1e4) = {ratio:.2f} (window [8, 12]; {small*1e3:.0f}ms vs {large*1e3:.0f}ms)",
    )
