"""Syntax trees for a discrete-time temporal logic over real-valued signals.

The grammar has atomic threshold predicates on single variables, the boolean
connectives, and the temporal operators F (eventually), G (globally) and U
(until), each with an inclusive integer sample interval [lo, hi].  Nodes are
frozen dataclasses, so formulae hash and compare structurally and can be used
as dict keys.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

GE = ">="
LE = "<="


@dataclass(frozen=True)
class TrueNode:
    """The constant true."""


@dataclass(frozen=True)
class Pred:
    """Threshold comparison ``x<var> op threshold`` on one signal variable."""

    var: int
    op: str
    threshold: float

    def __post_init__(self):
        object.__setattr__(self, "var", int(self.var))
        object.__setattr__(self, "threshold", float(self.threshold))
        if self.var < 0:
            raise ValueError(f"variable index must be non-negative, got {self.var}")
        if self.op not in (GE, LE):
            raise ValueError(f"comparison must be '>=' or '<=', got {self.op!r}")
        if not math.isfinite(self.threshold):
            raise ValueError(f"threshold must be finite, got {self.threshold}")


@dataclass(frozen=True)
class Not:
    child: "Formula"


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"


def _check_interval(lo: int, hi: int) -> tuple[int, int]:
    lo, hi = int(lo), int(hi)
    if lo < 0 or hi < 0:
        raise ValueError(f"interval bounds must be non-negative, got [{lo},{hi}]")
    if lo > hi:
        raise ValueError(f"interval lower bound exceeds upper bound: [{lo},{hi}]")
    return lo, hi


@dataclass(frozen=True)
class Eventually:
    """F[lo,hi] phi: the child holds at some sample offset in [lo, hi]."""

    lo: int
    hi: int
    child: "Formula"

    def __post_init__(self):
        lo, hi = _check_interval(self.lo, self.hi)
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)


@dataclass(frozen=True)
class Globally:
    """G[lo,hi] phi: the child holds at every sample offset in [lo, hi]."""

    lo: int
    hi: int
    child: "Formula"

    def __post_init__(self):
        lo, hi = _check_interval(self.lo, self.hi)
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)


@dataclass(frozen=True)
class Until:
    """(left) U[lo,hi] (right): right holds at some offset in [lo, hi] and left holds from now until then."""

    lo: int
    hi: int
    left: "Formula"
    right: "Formula"

    def __post_init__(self):
        lo, hi = _check_interval(self.lo, self.hi)
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)


Formula = Union[TrueNode, Pred, Not, And, Or, Eventually, Globally, Until]

TRUE = TrueNode()
# The grammar has no falsum literal; "not (true)" plays that role.
FALSE = Not(TRUE)


def size(phi: Formula) -> int:
    """Number of syntax tree nodes; the complexity cost used throughout."""
    if isinstance(phi, (TrueNode, Pred)):
        return 1
    if isinstance(phi, Not):
        return 1 + size(phi.child)
    if isinstance(phi, (And, Or)):
        return 1 + size(phi.left) + size(phi.right)
    if isinstance(phi, (Eventually, Globally)):
        return 1 + size(phi.child)
    if isinstance(phi, Until):
        return 1 + size(phi.left) + size(phi.right)
    raise TypeError(f"not a formula node: {phi!r}")


def horizon(phi: Formula) -> int:
    """How many samples past the evaluation instant the formula can inspect."""
    if isinstance(phi, (TrueNode, Pred)):
        return 0
    if isinstance(phi, Not):
        return horizon(phi.child)
    if isinstance(phi, (And, Or)):
        return max(horizon(phi.left), horizon(phi.right))
    if isinstance(phi, (Eventually, Globally)):
        return phi.hi + horizon(phi.child)
    if isinstance(phi, Until):
        return phi.hi + max(horizon(phi.left), horizon(phi.right))
    raise TypeError(f"not a formula node: {phi!r}")


def variables(phi: Formula) -> set[int]:
    """Indices of the signal variables the formula reads."""
    if isinstance(phi, TrueNode):
        return set()
    if isinstance(phi, Pred):
        return {phi.var}
    if isinstance(phi, Not):
        return variables(phi.child)
    if isinstance(phi, (And, Or)):
        return variables(phi.left) | variables(phi.right)
    if isinstance(phi, (Eventually, Globally)):
        return variables(phi.child)
    if isinstance(phi, Until):
        return variables(phi.left) | variables(phi.right)
    raise TypeError(f"not a formula node: {phi!r}")


def nnf(phi: Formula) -> Formula:
    """Negation normal form: negations pushed down to the predicates.

    Double negations cancel, the boolean connectives and F/G dualise, and a
    negated predicate flips its comparison direction at the same threshold.
    There is no dual operator for U in this grammar, so a negated until stays
    wrapped in ``not`` with its operands normalised in positive polarity; a
    negated ``true`` stays wrapped as well.
    """
    if isinstance(phi, Not):
        return _nnf_negated(phi.child)
    if isinstance(phi, (TrueNode, Pred)):
        return phi
    if isinstance(phi, And):
        return And(nnf(phi.left), nnf(phi.right))
    if isinstance(phi, Or):
        return Or(nnf(phi.left), nnf(phi.right))
    if isinstance(phi, Eventually):
        return Eventually(phi.lo, phi.hi, nnf(phi.child))
    if isinstance(phi, Globally):
        return Globally(phi.lo, phi.hi, nnf(phi.child))
    if isinstance(phi, Until):
        return Until(phi.lo, phi.hi, nnf(phi.left), nnf(phi.right))
    raise TypeError(f"not a formula node: {phi!r}")


def _nnf_negated(phi: Formula) -> Formula:
    if isinstance(phi, TrueNode):
        return Not(phi)
    if isinstance(phi, Pred):
        return Pred(phi.var, LE if phi.op == GE else GE, phi.threshold)
    if isinstance(phi, Not):
        return nnf(phi.child)
    if isinstance(phi, And):
        return Or(_nnf_negated(phi.left), _nnf_negated(phi.right))
    if isinstance(phi, Or):
        return And(_nnf_negated(phi.left), _nnf_negated(phi.right))
    if isinstance(phi, Eventually):
        return Globally(phi.lo, phi.hi, _nnf_negated(phi.child))
    if isinstance(phi, Globally):
        return Eventually(phi.lo, phi.hi, _nnf_negated(phi.child))
    if isinstance(phi, Until):
        return Not(Until(phi.lo, phi.hi, nnf(phi.left), nnf(phi.right)))
    raise TypeError(f"not a formula node: {phi!r}")


def format_number(x: float) -> str:
    """Shortest text that reads back as exactly the same float."""
    if x == int(x) and abs(x) < 1e16:
        return str(int(x))
    return repr(x)


# Precedence levels of the printer, loosest first.
_LEVEL_OR = 0
_LEVEL_AND = 1
_LEVEL_UNARY = 2


def format_formula(phi: Formula) -> str:
    """Render a formula in its canonical text form.

    The output parses back to a structurally identical tree: binary chains
    print left associated without brackets, anything tighter is bracketed,
    and until always brackets both operands.
    """
    return _format(phi, _LEVEL_OR)


def _format(phi: Formula, required: int) -> str:
    if isinstance(phi, TrueNode):
        text, level = "true", _LEVEL_UNARY
    elif isinstance(phi, Pred):
        text, level = f"x{phi.var} {phi.op} {format_number(phi.threshold)}", _LEVEL_UNARY
    elif isinstance(phi, Not):
        text, level = f"not ({_format(phi.child, _LEVEL_OR)})", _LEVEL_UNARY
    elif isinstance(phi, And):
        text = f"{_format(phi.left, _LEVEL_AND)} and {_format(phi.right, _LEVEL_UNARY)}"
        level = _LEVEL_AND
    elif isinstance(phi, Or):
        text = f"{_format(phi.left, _LEVEL_OR)} or {_format(phi.right, _LEVEL_AND)}"
        level = _LEVEL_OR
    elif isinstance(phi, Eventually):
        text, level = f"F[{phi.lo},{phi.hi}]({_format(phi.child, _LEVEL_OR)})", _LEVEL_UNARY
    elif isinstance(phi, Globally):
        text, level = f"G[{phi.lo},{phi.hi}]({_format(phi.child, _LEVEL_OR)})", _LEVEL_UNARY
    elif isinstance(phi, Until):
        left = _format(phi.left, _LEVEL_OR)
        right = _format(phi.right, _LEVEL_OR)
        text, level = f"({left}) U[{phi.lo},{phi.hi}] ({right})", _LEVEL_UNARY
    else:
        raise TypeError(f"not a formula node: {phi!r}")
    if level < required:
        return f"({text})"
    return text
