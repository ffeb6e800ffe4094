"""Syntax tree construction, structural helpers, and negation normal form."""

import numpy as np
import pytest

from stlconcepts.formula import (
    FALSE,
    GE,
    LE,
    TRUE,
    And,
    Eventually,
    Globally,
    Not,
    Or,
    Pred,
    TrueNode,
    Until,
    format_formula,
    format_number,
    horizon,
    nnf,
    size,
    variables,
)
from stlconcepts.monitor import robustness
from stlconcepts.trajectory import Trajectory


def test_pred_coerces_and_validates():
    p = Pred(np.int64(2), GE, np.float64(0.25))
    assert isinstance(p.var, int) and p.var == 2
    assert isinstance(p.threshold, float) and p.threshold == 0.25
    with pytest.raises(ValueError):
        Pred(-1, GE, 0.0)
    with pytest.raises(ValueError):
        Pred(0, ">", 0.0)
    with pytest.raises(ValueError):
        Pred(0, GE, float("nan"))
    with pytest.raises(ValueError):
        Pred(0, LE, float("inf"))


def test_interval_validation():
    with pytest.raises(ValueError, match="lower bound exceeds upper bound"):
        Globally(3, 1, Pred(0, GE, 0.0))
    with pytest.raises(ValueError, match="non-negative"):
        Eventually(-1, 2, Pred(0, GE, 0.0))
    with pytest.raises(ValueError, match="non-negative"):
        Until(0, -2, TRUE, TRUE)
    g = Globally(np.int64(1), np.int64(4), TRUE)
    assert (g.lo, g.hi) == (1, 4)
    assert isinstance(g.lo, int) and isinstance(g.hi, int)


def test_formulae_compare_and_hash_structurally():
    a = And(Pred(0, GE, 0.5), Not(Pred(1, LE, 0.0)))
    b = And(Pred(0, GE, 0.5), Not(Pred(1, LE, 0.0)))
    assert a == b
    assert hash(a) == hash(b)
    assert len({a, b}) == 1
    assert a != And(Pred(0, GE, 0.5), Not(Pred(1, LE, 0.1)))


def test_false_is_negated_true():
    assert FALSE == Not(TRUE)
    assert isinstance(TRUE, TrueNode)


def test_size_counts_nodes():
    assert size(TRUE) == 1
    assert size(Pred(0, GE, 0.0)) == 1
    assert size(Not(Pred(0, GE, 0.0))) == 2
    assert size(And(Pred(0, GE, 0.0), Pred(1, LE, 1.0))) == 3
    assert size(Until(0, 3, Pred(0, GE, 0.0), Not(Pred(0, LE, 1.0)))) == 4
    assert size(Globally(0, 2, Eventually(1, 3, Pred(0, GE, 0.0)))) == 3


def test_horizon_sums_nested_upper_bounds():
    assert horizon(Pred(0, GE, 0.0)) == 0
    assert horizon(Globally(0, 5, Pred(0, GE, 0.0))) == 5
    assert horizon(Eventually(2, 4, Globally(1, 3, Pred(0, GE, 0.0)))) == 7
    assert horizon(Until(0, 2, Globally(0, 5, Pred(0, GE, 0.0)), Pred(0, GE, 0.0))) == 7
    assert horizon(And(Eventually(0, 9, Pred(0, GE, 0.0)), Pred(1, LE, 0.0))) == 9


def test_variables_collects_indices():
    phi = Until(0, 2, Pred(3, GE, 0.0), And(Pred(0, LE, 1.0), Not(Pred(3, GE, 2.0))))
    assert variables(phi) == {0, 3}
    assert variables(TRUE) == set()


def test_nnf_flips_predicates():
    assert nnf(Not(Pred(0, GE, 0.2))) == Pred(0, LE, 0.2)
    assert nnf(Not(Pred(1, LE, -0.3))) == Pred(1, GE, -0.3)


def test_nnf_dualizes_temporal_operators():
    assert nnf(Not(Globally(0, 5, Pred(0, GE, 0.2)))) == Eventually(0, 5, Pred(0, LE, 0.2))
    assert nnf(Not(Eventually(1, 3, Pred(0, LE, 0.0)))) == Globally(1, 3, Pred(0, GE, 0.0))


def test_nnf_cancels_double_negation():
    phi = And(Pred(0, GE, 0.1), Or(Pred(1, LE, 0.2), Pred(0, GE, 0.3)))
    assert nnf(Not(Not(phi))) == phi


def test_nnf_dualizes_connectives():
    phi = Not(And(Pred(0, GE, 0.1), Pred(1, LE, 0.2)))
    assert nnf(phi) == Or(Pred(0, LE, 0.1), Pred(1, GE, 0.2))
    psi = Not(Or(Pred(0, GE, 0.1), Pred(1, LE, 0.2)))
    assert nnf(psi) == And(Pred(0, LE, 0.1), Pred(1, GE, 0.2))


def test_nnf_keeps_negated_until_wrapped():
    phi = Not(Until(0, 2, Not(Not(Pred(0, GE, 0.0))), Pred(0, GE, 0.8)))
    out = nnf(phi)
    assert isinstance(out, Not)
    assert out.child == Until(0, 2, Pred(0, GE, 0.0), Pred(0, GE, 0.8))
    assert nnf(Not(TRUE)) == Not(TRUE)


def test_nnf_preserves_negated_robustness_on_random_formulae():
    from stlconcepts.bank import GrammarConfig, sample_formula

    rng = np.random.default_rng(7)
    cfg = GrammarConfig(base_length=12, num_vars=2, max_depth=4)
    for _ in range(200):
        phi = sample_formula(cfg, rng)
        tau = Trajectory(rng.normal(size=(2, 30)))
        assert robustness(nnf(Not(phi)), tau, 0) == -robustness(phi, tau, 0)


def test_format_number_round_trips():
    assert format_number(0.2) == "0.2"
    assert format_number(1.0) == "1"
    assert format_number(-3.0) == "-3"
    assert format_number(0.1 + 0.2) == "0.30000000000000004"
    for value in [0.1, -1.5, 2e-7, 123456.789, -0.0003]:
        assert float(format_number(value)) == value


def test_format_formula_canonical_forms():
    assert format_formula(Pred(0, GE, 0.2)) == "x0 >= 0.2"
    assert format_formula(Not(Pred(1, LE, 0.0))) == "not (x1 <= 0)"
    assert format_formula(Until(0, 2, Pred(0, GE, 0.0), Pred(0, GE, 0.8))) == "(x0 >= 0) U[0,2] (x0 >= 0.8)"
    assert format_formula(Globally(0, 5, Pred(0, GE, 0.2))) == "G[0,5](x0 >= 0.2)"
    assert format_formula(TRUE) == "true"


def test_format_formula_brackets_by_precedence():
    a, b, c = Pred(0, GE, 0.0), Pred(1, LE, 1.0), Pred(0, GE, 2.0)
    assert format_formula(Or(And(a, b), c)) == "x0 >= 0 and x1 <= 1 or x0 >= 2"
    assert format_formula(And(a, Or(b, c))) == "x0 >= 0 and (x1 <= 1 or x0 >= 2)"
    assert format_formula(And(And(a, b), c)) == "x0 >= 0 and x1 <= 1 and x0 >= 2"
    assert format_formula(And(a, And(b, c))) == "x0 >= 0 and (x1 <= 1 and x0 >= 2)"
    assert format_formula(Not(And(a, b))) == "not (x0 >= 0 and x1 <= 1)"
