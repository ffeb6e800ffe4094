"""Local and global symbolic explanations of model predictions.

A prediction is explained locally by the concepts that contributed most to
the winning logit.  Concept i's relevance is its own weight-times-score term
r[i] = W[y][i*K + y] * z[i][y]; cross terms for other classes are not
attributed to single concepts and are reported as one residual.  Selected
concepts are simplified against the sample and the training data, then
conjoined.  Globally, the conjuncts collected from correctly classified
samples of a class are filtered by leakage and combined into a disjunction
by a greedy weighted set cover, where the cost of a formula is its syntax
tree size.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .data import Dataset
from .formula import (
    And,
    Eventually,
    FALSE,
    Formula,
    GE,
    Globally,
    Not,
    Or,
    Pred,
    TRUE,
    TrueNode,
    Until,
    format_formula,
    nnf,
    size,
)
from .model import ConceptModel, ForwardPass, forward, predict_batch
from .monitor import LARGE, _sliding_max, _sliding_min, robustness_trace_batch, sat_trace_batch
from .trajectory import Trajectory


def relevance(pass_: ForwardPass, model: ConceptModel) -> tuple[np.ndarray, float]:
    """Per-concept contribution to the predicted logit, plus the cross-class residual.

    The logit decomposes exactly as bias + sum(relevances) + residual.
    """
    y = pass_.predicted
    k = model.num_classes
    weights_row = model.weights[y].reshape(-1, k)
    contributions = weights_row * pass_.modulated
    scores = contributions[:, y]
    residual = float(contributions.sum() - scores.sum())
    return scores, residual


def select_relevant(scores: np.ndarray, mode: str = "top_gamma", gamma: int = 3, theta: float = 0.9) -> list[int]:
    """Indices of the concepts to report, ranked by |relevance| descending.

    Zero-relevance concepts are never selected.  top_gamma takes at most
    gamma of the ranked indices; cumulative takes the shortest prefix whose
    relevance mass reaches theta of the total.  Ties rank lower indices
    first.
    """
    magnitudes = np.abs(np.asarray(scores, dtype=np.float64))
    order = np.lexsort((np.arange(magnitudes.size), -magnitudes))
    order = order[magnitudes[order] > 0]
    if order.size == 0:
        return []
    if mode == "top_gamma":
        if gamma < 1:
            raise ValueError(f"gamma must be positive, got {gamma}")
        return [int(i) for i in order[:gamma]]
    if mode == "cumulative":
        if not 0 < theta <= 1:
            raise ValueError(f"theta must lie in (0, 1], got {theta}")
        masses = np.cumsum(magnitudes[order])
        cutoff = int(np.argmax(masses >= theta * masses[-1]))
        return [int(i) for i in order[: cutoff + 1]]
    raise ValueError(f"unknown selection mode: {mode!r}")


def _is_true(phi: Formula) -> bool:
    return isinstance(phi, TrueNode)


def _is_false(phi: Formula) -> bool:
    return isinstance(phi, Not) and isinstance(phi.child, TrueNode)


def _apply_root_rule(phi: Formula) -> Formula | None:
    """One rewrite at the root, or None when no rule matches."""
    if isinstance(phi, Not) and isinstance(phi.child, Not):
        return phi.child.child
    if isinstance(phi, And):
        if phi.left == phi.right:
            return phi.left
        if _is_true(phi.left):
            return phi.right
        if _is_true(phi.right):
            return phi.left
        if _is_false(phi.left) or _is_false(phi.right):
            return FALSE
    if isinstance(phi, Or):
        if phi.left == phi.right:
            return phi.left
        if _is_true(phi.left) or _is_true(phi.right):
            return TRUE
        if _is_false(phi.left):
            return phi.right
        if _is_false(phi.right):
            return phi.left
    if isinstance(phi, Globally) and isinstance(phi.child, Globally):
        inner = phi.child
        return Globally(phi.lo + inner.lo, phi.hi + inner.hi, inner.child)
    if isinstance(phi, Eventually) and isinstance(phi.child, Eventually):
        inner = phi.child
        return Eventually(phi.lo + inner.lo, phi.hi + inner.hi, inner.child)
    return None


def _rewrite_pass(phi: Formula) -> Formula:
    if isinstance(phi, Not):
        phi = Not(_rewrite_pass(phi.child))
    elif isinstance(phi, And):
        phi = And(_rewrite_pass(phi.left), _rewrite_pass(phi.right))
    elif isinstance(phi, Or):
        phi = Or(_rewrite_pass(phi.left), _rewrite_pass(phi.right))
    elif isinstance(phi, Eventually):
        phi = Eventually(phi.lo, phi.hi, _rewrite_pass(phi.child))
    elif isinstance(phi, Globally):
        phi = Globally(phi.lo, phi.hi, _rewrite_pass(phi.child))
    elif isinstance(phi, Until):
        phi = Until(phi.lo, phi.hi, _rewrite_pass(phi.left), _rewrite_pass(phi.right))
    while True:
        rewritten = _apply_root_rule(phi)
        if rewritten is None:
            return phi
        phi = rewritten


def rewrite(phi: Formula) -> Formula:
    """Apply the logical simplification rules everywhere until nothing fires.

    Rules: double negation, idempotent and/or, true/false absorption on
    either side, and merging directly nested windows of the same temporal
    operator (G inside G, F inside F).  Every rule shrinks the tree, so the
    fixpoint exists.
    """
    while True:
        rewritten = _rewrite_pass(phi)
        if rewritten == phi:
            return phi
        phi = rewritten


def _sign_class(value: float) -> int:
    return int(value > 0) - int(value < 0)


def _rho_at_zero(phi: Formula, x: Trajectory) -> float:
    return float(robustness_trace_batch(phi, x.values[np.newaxis])[0, 0])


_CHILD_FIELDS = {
    Not: ("child",),
    And: ("left", "right"),
    Or: ("left", "right"),
    Eventually: ("child",),
    Globally: ("child",),
    Until: ("left", "right"),
}


def _children(phi: Formula) -> tuple:
    return _CHILD_FIELDS.get(type(phi), ())


def _replace_at(phi: Formula, path: tuple, replacement: Formula) -> Formula:
    if not path:
        return replacement
    fields = _CHILD_FIELDS[type(phi)]
    name = fields[path[0]]
    updated = _replace_at(getattr(phi, name), path[1:], replacement)
    kwargs = {f: getattr(phi, f) for f in phi.__dataclass_fields__}
    kwargs[name] = updated
    return type(phi)(**kwargs)


def _constant_sites(phi: Formula, train_values: np.ndarray) -> list[tuple[tuple, Formula]]:
    """Outermost strict subformulae whose truth at time 0 is uniform over training data."""
    sites: list[tuple[tuple, Formula]] = []

    def walk(node: Formula, path: tuple):
        if path:
            truths = sat_trace_batch(node, train_values)[:, 0]
            if truths.all():
                sites.append((path, TRUE))
                return
            if not truths.any():
                sites.append((path, FALSE))
                return
        for index, name in enumerate(_children(node)):
            walk(getattr(node, name), path + (index,))

    walk(phi, ())
    return sites


def _predicate_sites(phi: Formula) -> list[tuple[tuple, Pred]]:
    sites: list[tuple[tuple, Pred]] = []

    def walk(node: Formula, path: tuple):
        if isinstance(node, Pred):
            sites.append((path, node))
            return
        for index, name in enumerate(_children(node)):
            walk(getattr(node, name), path + (index,))

    walk(phi, ())
    return sites


def _contextual_robustness(phi: Formula, path: tuple, pred: Pred, values: np.ndarray) -> tuple[np.ndarray, float]:
    """Robustness each sample would assign the predicate through its windows.

    Follows the ancestor chain from the root to the predicate, applying the
    window extremum of every temporal ancestor (siblings of the chain are
    ignored) with the threshold set to zero.  Returns one value per sample
    plus the coefficient the real threshold would enter with, so the full
    contextual robustness is ``returned_values + coefficient * threshold``.
    """
    node = phi
    operations = []
    for step in path:
        if isinstance(node, Not):
            operations.append(("neg", 0, 0))
            node = node.child
        elif isinstance(node, (And, Or)):
            node = node.left if step == 0 else node.right
        elif isinstance(node, Eventually):
            operations.append(("max", node.lo, node.hi))
            node = node.child
        elif isinstance(node, Globally):
            operations.append(("min", node.lo, node.hi))
            node = node.child
        elif isinstance(node, Until):
            if step == 0:
                operations.append(("min", 0, node.hi))
                node = node.left
            else:
                operations.append(("max", node.lo, node.hi))
                node = node.right
        else:
            raise ValueError("path does not match formula structure")

    column = values[:, pred.var, :]
    trace = column.copy() if pred.op == GE else -column
    coefficient = -1.0 if pred.op == GE else 1.0
    for kind, lo, hi in reversed(operations):
        if kind == "neg":
            trace = -trace
            coefficient = -coefficient
        elif kind == "min":
            trace = _sliding_min(trace, lo, hi, LARGE)
        else:
            trace = _sliding_max(trace, lo, hi, -LARGE)
    return trace[:, 0], coefficient


def simplify_for_sample(phi: Formula, x: Trajectory, train: Dataset, predicted_class: int) -> Formula:
    """Rewrite a concept into the form reported for sample x.

    In order: (1) if x falsifies the concept, explain its negation instead,
    pushed into negation normal form; (2) logical rewriting to fixpoint;
    (3) subformulae that hold (or fail) on every training sample at time 0
    become constants, each replacement kept only when x's satisfaction does
    not degrade, then the rewrite rules run again; (4) each predicate
    threshold is moved so the predicate's robustness, viewed through its
    enclosing temporal windows, has class-conditional means of equal size
    and opposite sign for the predicted class and its complement, again
    kept only when x still satisfies the result.
    """
    if _rho_at_zero(phi, x) < 0:
        phi = nnf(Not(phi))
    phi = rewrite(phi)

    current_rho = _rho_at_zero(phi, x)
    for path, constant in _constant_sites(phi, train.values):
        candidate = _replace_at(phi, path, constant)
        candidate_rho = _rho_at_zero(candidate, x)
        if _sign_class(candidate_rho) >= _sign_class(current_rho):
            phi = candidate
            current_rho = candidate_rho
    phi = rewrite(phi)

    class_mask = train.labels == predicted_class
    if class_mask.any() and (~class_mask).any():
        current_rho = _rho_at_zero(phi, x)
        for path, pred in _predicate_sites(phi):
            if pred.var >= train.dims:
                continue
            contextual, coefficient = _contextual_robustness(phi, path, pred, train.values)
            class_mean = float(contextual[class_mask].mean())
            other_mean = float(contextual[~class_mask].mean())
            adjusted = -(class_mean + other_mean) / (2.0 * coefficient)
            if not math.isfinite(adjusted) or adjusted == pred.threshold:
                continue
            candidate = _replace_at(phi, path, Pred(pred.var, pred.op, adjusted))
            candidate_rho = _rho_at_zero(candidate, x)
            if _sign_class(candidate_rho) >= _sign_class(current_rho):
                phi = candidate
                current_rho = candidate_rho
    return phi


@dataclass
class LocalExplanation:
    """Ranked, simplified conjuncts behind one prediction."""

    predicted_class: int
    predicted_label: float
    conjuncts: list
    formula: Formula | None
    robustness: float | None
    vacuous: bool
    mode: str
    selected: list
    residual: float
    sample_index: int | None = None

    def to_dict(self) -> dict:
        return {
            "sample_index": self.sample_index,
            "predicted_class": self.predicted_class,
            "predicted_label": self.predicted_label,
            "conjuncts": [
                {
                    "concept_index": index,
                    "formula": format_formula(phi),
                    "relevance": score,
                }
                for (index, phi, score) in self.conjuncts
            ],
            "formula": format_formula(self.formula) if self.formula is not None else None,
            "robustness": self.robustness,
            "vacuous": self.vacuous,
            "mode": self.mode,
            "off_column_residual": self.residual,
        }


def local_explanation(
    x: Trajectory,
    model: ConceptModel,
    train: Dataset,
    mode: str = "top_gamma",
    gamma: int = 3,
    theta: float = 0.9,
    sample_index: int | None = None,
) -> LocalExplanation:
    """Explain the model's prediction on x as a satisfied conjunction.

    The training split provides the data views for simplification; it must
    be on the same scale as x (both standardized, or both raw).
    """
    pass_ = forward(x, model)
    scores, residual = relevance(pass_, model)
    selected = select_relevant(scores, mode=mode, gamma=gamma, theta=theta)
    conjuncts = []
    for index in selected:
        simplified = simplify_for_sample(model.bank.concepts[index], x, train, pass_.predicted)
        conjuncts.append((index, simplified, float(scores[index])))
    if conjuncts:
        combined = conjuncts[0][1]
        for _, phi, _ in conjuncts[1:]:
            combined = And(combined, phi)
        rho = _rho_at_zero(combined, x)
    else:
        combined = None
        rho = None
    return LocalExplanation(
        predicted_class=pass_.predicted,
        predicted_label=float(model.label_values[pass_.predicted]) if model.label_values else float(pass_.predicted),
        conjuncts=conjuncts,
        formula=combined,
        robustness=rho,
        vacuous=not conjuncts,
        mode=mode,
        selected=selected,
        residual=residual,
        sample_index=sample_index,
    )


def greedy_cover(
    universe_size: int,
    covers: list,
    costs: list,
    coverage_target: float = 1.0,
) -> tuple[list[int], np.ndarray]:
    """Greedy weighted set cover: repeatedly take the best cost per newly covered element.

    Ties go to the lower candidate index.  Stops once the covered fraction
    reaches coverage_target or no candidate covers anything new.  Returns
    the chosen indices in pick order and the covered mask.
    """
    if universe_size < 1:
        raise ValueError(f"universe must be non-empty, got size {universe_size}")
    if not 0 < coverage_target <= 1:
        raise ValueError(f"coverage_target must lie in (0, 1], got {coverage_target}")
    masks = [np.asarray(c, dtype=bool) for c in covers]
    for mask in masks:
        if mask.shape != (universe_size,):
            raise ValueError(f"cover mask has shape {mask.shape}, expected ({universe_size},)")
    uncovered = np.ones(universe_size, dtype=bool)
    chosen: list[int] = []
    while (universe_size - int(uncovered.sum())) / universe_size < coverage_target:
        best_index = None
        best_ratio = None
        for index, mask in enumerate(masks):
            gain = int((mask & uncovered).sum())
            if gain == 0:
                continue
            ratio = float(costs[index]) / gain
            if best_ratio is None or ratio < best_ratio:
                best_ratio = ratio
                best_index = index
        if best_index is None:
            break
        chosen.append(best_index)
        uncovered &= ~masks[best_index]
    return chosen, ~uncovered


@dataclass
class GlobalExplanation:
    """Disjunction of conjuncts characterising one class."""

    class_index: int
    class_label: float
    disjuncts: list
    coverage: float
    class_coverage: float
    leakage: float
    total_cost: int
    universe_size: int
    candidates_considered: int
    flags: list = field(default_factory=list)

    @property
    def formula(self) -> Formula | None:
        if not self.disjuncts:
            return None
        combined = self.disjuncts[0]
        for phi in self.disjuncts[1:]:
            combined = Or(combined, phi)
        return combined

    def to_dict(self) -> dict:
        return {
            "class_index": self.class_index,
            "class_label": self.class_label,
            "disjuncts": [format_formula(phi) for phi in self.disjuncts],
            "formula": format_formula(self.formula) if self.formula is not None else None,
            "coverage": self.coverage,
            "class_coverage": self.class_coverage,
            "leakage": self.leakage,
            "total_cost": self.total_cost,
            "universe_size": self.universe_size,
            "candidates_considered": self.candidates_considered,
            "flags": list(self.flags),
        }


def global_explanation(
    class_index: int,
    train: Dataset,
    model: ConceptModel,
    coverage_target: float = 0.95,
    leakage_max: float = 0.10,
    mode: str = "top_gamma",
    gamma: int = 3,
    theta: float = 0.9,
) -> GlobalExplanation:
    """Characterise a class by covering its correctly classified samples.

    Candidate formulae are the distinct conjuncts of the local explanations
    of those samples; any candidate satisfied by more than leakage_max of
    the other classes' samples is dropped before the cover runs.
    """
    if not 0 <= class_index < train.num_classes:
        raise ValueError(f"class {class_index} not present, dataset has {train.num_classes} classes")
    class_label = float(train.label_values[class_index])
    class_mask = train.labels == class_index
    if not class_mask.any():
        raise ValueError(f"class {class_index} has no samples")
    _, predictions = predict_batch(train.values, model)
    correct_mask = class_mask & (predictions == train.labels)
    universe = np.flatnonzero(correct_mask)
    if universe.size == 0:
        return GlobalExplanation(
            class_index=class_index,
            class_label=class_label,
            disjuncts=[],
            coverage=0.0,
            class_coverage=0.0,
            leakage=0.0,
            total_cost=0,
            universe_size=0,
            candidates_considered=0,
            flags=["no correctly classified samples"],
        )

    pool: dict[Formula, None] = {}
    for index in universe:
        exp = local_explanation(
            train.trajectory(int(index)), model, train, mode=mode, gamma=gamma, theta=theta, sample_index=int(index)
        )
        for _, phi, _ in exp.conjuncts:
            pool.setdefault(phi)

    candidates = []
    covers = []
    costs = []
    outside_mask = ~class_mask
    for phi in pool:
        truths = sat_trace_batch(phi, train.values)[:, 0]
        leak = float(truths[outside_mask].mean()) if outside_mask.any() else 0.0
        if leak > leakage_max:
            continue
        candidates.append(phi)
        covers.append(truths[correct_mask])
        costs.append(size(phi))

    flags = []
    if not candidates:
        flags.append("no discriminative concepts")
        return GlobalExplanation(
            class_index=class_index,
            class_label=class_label,
            disjuncts=[],
            coverage=0.0,
            class_coverage=0.0,
            leakage=0.0,
            total_cost=0,
            universe_size=int(universe.size),
            candidates_considered=len(pool),
            flags=flags,
        )

    chosen, covered = greedy_cover(int(universe.size), covers, costs, coverage_target)
    disjuncts = [candidates[i] for i in chosen]
    satisfied_any = np.zeros(train.count, dtype=bool)
    for phi in disjuncts:
        satisfied_any |= sat_trace_batch(phi, train.values)[:, 0]
    coverage = float(covered.mean())
    class_coverage = float(satisfied_any[class_mask].mean())
    leakage = float(satisfied_any[outside_mask].mean()) if outside_mask.any() else 0.0
    if coverage < coverage_target:
        flags.append("coverage target missed")
    return GlobalExplanation(
        class_index=class_index,
        class_label=class_label,
        disjuncts=disjuncts,
        coverage=coverage,
        class_coverage=class_coverage,
        leakage=leakage,
        total_cost=int(sum(size(phi) for phi in disjuncts)),
        universe_size=int(universe.size),
        candidates_considered=len(pool),
        flags=flags,
    )
