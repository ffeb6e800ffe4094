"""Robustness and boolean semantics, plus the fast path equivalence."""

import numpy as np
import pytest

from stlconcepts.bank import GrammarConfig, sample_formula
from stlconcepts.formula import (
    GE,
    LE,
    TRUE,
    And,
    Eventually,
    Globally,
    Not,
    Or,
    Pred,
    Until,
    horizon,
)
from stlconcepts.monitor import (
    LARGE,
    boolean_sat,
    robustness,
    robustness_trace,
    robustness_trace_batch,
    sat_trace_batch,
)
from stlconcepts.parser import parse_formula
from stlconcepts.trajectory import Trajectory

RISING = Trajectory(np.array([0.5, 0.1, 0.9]))


def test_predicate_margin():
    assert robustness(parse_formula("x0 >= 0.2"), RISING, 0) == 0.5 - 0.2
    assert robustness(parse_formula("x0 <= 0.2"), RISING, 0) == 0.2 - 0.5


def test_globally_takes_window_minimum():
    assert robustness(parse_formula("G[0,2](x0 >= 0.2)"), RISING, 0) == 0.1 - 0.2


def test_until_worked_example():
    phi = parse_formula("(x0 >= 0) U[0,2] (x0 >= 0.8)")
    assert robustness(phi, RISING, 0) == 0.9 - 0.8


def test_boolean_worked_examples():
    assert boolean_sat(parse_formula("F[0,2](x0 >= 0.8)"), RISING, 0) is True
    assert boolean_sat(parse_formula("G[0,2](x0 >= 0.2)"), RISING, 0) is False
    assert boolean_sat(parse_formula("x0 >= 0.5"), RISING, 0) is True


def test_connective_semantics():
    a = Pred(0, GE, 0.2)
    b = Pred(0, LE, 0.7)
    assert robustness(And(a, b), RISING, 0) == min(0.3, 0.7 - 0.5)
    assert robustness(Or(a, b), RISING, 0) == max(0.3, 0.7 - 0.5)
    assert robustness(Not(a), RISING, 0) == -0.3
    assert robustness(TRUE, RISING, 0) == LARGE


def test_windows_clip_at_trajectory_end():
    tau = Trajectory(np.array([0.1, 0.2, 0.3, 0.4]))
    phi = Globally(0, 10, Pred(0, GE, 0.0))
    assert robustness(phi, tau, 2) == 0.3
    psi = Eventually(0, 10, Pred(0, GE, 0.35))
    assert robustness(psi, tau, 1) == pytest.approx(0.05)


def test_vacuous_windows_use_large_surrogates():
    tau = Trajectory(np.array([0.1, 0.2, 0.3]))
    assert robustness(Eventually(5, 7, Pred(0, GE, 0.0)), tau, 0) == -LARGE
    assert robustness(Globally(5, 7, Pred(0, GE, 0.0)), tau, 0) == LARGE
    assert robustness(Until(5, 7, TRUE, Pred(0, GE, 0.0)), tau, 0) == -LARGE
    assert boolean_sat(Eventually(5, 7, Pred(0, GE, 0.0)), tau, 0) is False
    assert boolean_sat(Globally(5, 7, Pred(0, GE, 0.0)), tau, 0) is True


def test_time_and_variable_bounds_are_checked():
    tau = Trajectory(np.array([0.1, 0.2]))
    with pytest.raises(ValueError, match="outside trajectory"):
        robustness(TRUE, tau, 2)
    with pytest.raises(ValueError, match="outside trajectory"):
        boolean_sat(TRUE, tau, -1)
    with pytest.raises(ValueError, match="variable x3"):
        robustness(Pred(3, GE, 0.0), tau, 0)
    with pytest.raises(ValueError, match="variable x3"):
        boolean_sat(Pred(3, GE, 0.0), tau, 0)


def test_and_is_exact_min_on_random_pairs():
    rng = np.random.default_rng(3)
    cfg = GrammarConfig(base_length=10, num_vars=2, max_depth=3)
    for _ in range(100):
        phi = sample_formula(cfg, rng)
        psi = sample_formula(cfg, rng)
        tau = Trajectory(rng.normal(size=(2, 25)))
        both = robustness(And(phi, psi), tau, 0)
        assert both == min(robustness(phi, tau, 0), robustness(psi, tau, 0))


def test_eventually_matches_direct_window_loop():
    rng = np.random.default_rng(4)
    cfg = GrammarConfig(base_length=8, num_vars=1, max_depth=2)
    for _ in range(100):
        child = sample_formula(cfg, rng)
        lo = int(rng.integers(0, 5))
        hi = lo + int(rng.integers(0, 5))
        tau = Trajectory(rng.normal(size=(1, 20)))
        for t in range(tau.length):
            stop = min(t + hi, tau.length - 1)
            expected = -LARGE
            if t + lo <= stop:
                expected = max(robustness(child, tau, s) for s in range(t + lo, stop + 1))
            assert robustness(Eventually(lo, hi, child), tau, t) == expected


def test_until_matches_definition_oracle():
    rng = np.random.default_rng(5)
    for _ in range(60):
        left = Pred(0, GE if rng.random() < 0.5 else LE, float(rng.normal()))
        right = Pred(0, GE if rng.random() < 0.5 else LE, float(rng.normal()))
        lo = int(rng.integers(0, 4))
        hi = lo + int(rng.integers(0, 5))
        phi = Until(lo, hi, left, right)
        tau = Trajectory(rng.normal(size=(1, 15)))
        for t in range(tau.length):
            stop = min(t + hi, tau.length - 1)
            expected = -LARGE
            if t + lo <= stop:
                candidates = []
                for s in range(t + lo, stop + 1):
                    held = min(robustness(left, tau, u) for u in range(t, s + 1))
                    candidates.append(min(robustness(right, tau, s), held))
                expected = max(candidates)
            assert robustness(phi, tau, t) == expected


def test_sign_soundness_on_random_pairs():
    rng = np.random.default_rng(6)
    cfg = GrammarConfig(base_length=24, num_vars=2, max_depth=4)
    ties = 0
    for _ in range(300):
        phi = sample_formula(cfg, rng)
        tau = Trajectory(rng.normal(size=(2, 50)))
        rho = robustness(phi, tau, 0)
        sat = boolean_sat(phi, tau, 0)
        if rho > 0:
            assert sat
        elif rho < 0:
            assert not sat
        else:
            ties += 1
    assert ties < 30


def test_batch_trace_equals_naive_recursion_bitwise():
    rng = np.random.default_rng(8)
    cfg = GrammarConfig(base_length=12, num_vars=2, max_depth=4)
    for _ in range(100):
        phi = sample_formula(cfg, rng)
        values = rng.normal(size=(2, 2, 26))
        traces = robustness_trace_batch(phi, values)
        for m in range(2):
            tau = Trajectory(values[m])
            for t in range(26):
                assert traces[m, t] == robustness(phi, tau, t)


def test_batch_sat_equals_naive_recursion():
    rng = np.random.default_rng(9)
    cfg = GrammarConfig(base_length=12, num_vars=2, max_depth=4)
    for _ in range(100):
        phi = sample_formula(cfg, rng)
        values = rng.normal(size=(2, 2, 22))
        sats = sat_trace_batch(phi, values)
        for m in range(2):
            tau = Trajectory(values[m])
            for t in range(22):
                assert bool(sats[m, t]) == boolean_sat(phi, tau, t)


def test_batch_handles_extreme_magnitudes_exactly():
    values = np.array([[[3e9, -4e9, 2e9, -1e9, 5e9]]])
    formulas = [
        parse_formula("F[0,3](x0 >= 2500000000)"),
        parse_formula("G[1,4](x0 <= 4500000000)"),
        parse_formula("(x0 <= 6000000000) U[0,4] (x0 >= 4000000000)"),
    ]
    tau = Trajectory(values[0])
    for phi in formulas:
        trace = robustness_trace_batch(phi, values)[0]
        for t in range(5):
            assert trace[t] == robustness(phi, tau, t)


def test_trace_single_trajectory_wrapper():
    phi = parse_formula("F[0,1](x0 >= 0.8)")
    trace = robustness_trace(phi, RISING)
    assert trace.shape == (3,)
    assert trace[0] == robustness(phi, RISING, 0)
    assert trace[2] == robustness(phi, RISING, 2)


def test_batch_shape_validation():
    with pytest.raises(ValueError, match="count, dims, length"):
        robustness_trace_batch(TRUE, np.zeros((3, 4)))


def test_horizon_never_breaks_evaluation():
    rng = np.random.default_rng(10)
    cfg = GrammarConfig(base_length=40, num_vars=1, max_depth=4)
    for _ in range(50):
        phi = sample_formula(cfg, rng)
        tau = Trajectory(rng.normal(size=(1, 8)))
        value = robustness(phi, tau, 0)
        assert np.isfinite(value)
        assert horizon(phi) >= 0
