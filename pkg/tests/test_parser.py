"""Formula text syntax: parsing, error positions, and print round-trips."""

import numpy as np
import pytest

from stlconcepts.bank import GrammarConfig, sample_formula
from stlconcepts.errors import ParseError
from stlconcepts.formula import (
    GE,
    LE,
    And,
    Eventually,
    Globally,
    Not,
    Or,
    Pred,
    TrueNode,
    Until,
    format_formula,
)
from stlconcepts.parser import parse_formula


def test_parse_globally():
    assert parse_formula("G[0,5](x0 >= 0.2)") == Globally(0, 5, Pred(0, GE, 0.2))


def test_parse_precedence_not_binds_tighter_than_and():
    phi = parse_formula("not (x1 <= 0.0) and F[1,3](x0 >= 1.0)")
    assert phi == And(Not(Pred(1, LE, 0.0)), Eventually(1, 3, Pred(0, GE, 1.0)))


def test_parse_and_binds_tighter_than_or():
    phi = parse_formula("x0 >= 0 or x1 <= 1 and x0 >= 2")
    assert phi == Or(Pred(0, GE, 0.0), And(Pred(1, LE, 1.0), Pred(0, GE, 2.0)))


def test_parse_chains_left_associated():
    phi = parse_formula("x0 >= 0 and x0 >= 1 and x0 >= 2")
    assert phi == And(And(Pred(0, GE, 0.0), Pred(0, GE, 1.0)), Pred(0, GE, 2.0))
    psi = parse_formula("x0 >= 0 or x0 >= 1 or x0 >= 2")
    assert psi == Or(Or(Pred(0, GE, 0.0), Pred(0, GE, 1.0)), Pred(0, GE, 2.0))


def test_parse_until():
    phi = parse_formula("(x0 >= 0) U[0,2] (x0 >= 0.8)")
    assert phi == Until(0, 2, Pred(0, GE, 0.0), Pred(0, GE, 0.8))


def test_parse_parenthesized_group_without_until():
    assert parse_formula("(x0 >= 0 or true)") == Or(Pred(0, GE, 0.0), TrueNode())


def test_parse_true_and_negative_threshold():
    assert parse_formula("true") == TrueNode()
    assert parse_formula("x2 <= -1.5e-3") == Pred(2, LE, -1.5e-3)
    assert parse_formula("x0 >= +2") == Pred(0, GE, 2.0)


def test_parse_is_whitespace_insensitive():
    a = parse_formula("G[0,5](x0>=0.2)and not(x1<=0)")
    b = parse_formula("  G[ 0 , 5 ] ( x0 >= 0.2 )  and\n not ( x1 <= 0 ) ")
    assert a == b


def test_parse_rejects_bad_interval():
    with pytest.raises(ParseError, match="interval lower bound exceeds upper bound"):
        parse_formula("G[3,1](x0 >= 0)")
    with pytest.raises(ParseError, match="non-negative"):
        parse_formula("F[-1,2](x0 >= 0)")
    with pytest.raises(ParseError, match="integer"):
        parse_formula("F[0.5,2](x0 >= 0)")


def test_parse_errors_carry_position():
    with pytest.raises(ParseError) as info:
        parse_formula("x0 >= 0.2 and\nx1 ** 3")
    assert info.value.line == 2
    assert info.value.column == 4
    with pytest.raises(ParseError) as info:
        parse_formula("banana")
    assert "unknown identifier" in str(info.value)
    assert info.value.line == 1
    assert info.value.column == 1


def test_parse_rejects_trailing_input():
    with pytest.raises(ParseError, match="trailing"):
        parse_formula("x0 >= 0.2 x1 <= 0")


def test_parse_rejects_incomplete_forms():
    with pytest.raises(ParseError):
        parse_formula("")
    with pytest.raises(ParseError):
        parse_formula("x0 >=")
    with pytest.raises(ParseError):
        parse_formula("G[0,5] x0 >= 0")
    with pytest.raises(ParseError):
        parse_formula("(x0 >= 0")
    with pytest.raises(ParseError):
        parse_formula("x0 0.2")


def test_round_trip_on_random_formulae():
    rng = np.random.default_rng(11)
    cfg = GrammarConfig(base_length=20, num_vars=3, max_depth=4, max_vars_per_formula=3)
    for _ in range(1000):
        phi = sample_formula(cfg, rng)
        assert parse_formula(format_formula(phi)) == phi


def test_round_trip_keeps_awkward_thresholds():
    texts = [
        "x0 >= 0.30000000000000004",
        "x1 <= -1e-09",
        "x0 >= 123456789.123456",
    ]
    for text in texts:
        phi = parse_formula(text)
        assert parse_formula(format_formula(phi)) == phi
