"""Random formula generation and diversity based concept selection.

Formulae are drawn from a probabilistic grammar with per-node-kind
probabilities, bounded depth, a cap on distinct variables per formula, and
intervals sized relative to a base trajectory length.  Each candidate gets a
signature, its squashed robustness profile over a fixed base sample, and is
kept only if no already retained concept has a near-parallel signature.  A
near-duplicate can still replace its single counterpart when it says the same
thing with a smaller syntax tree.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace

import numpy as np

from .errors import HorizonError
from .formula import (
    GE,
    LE,
    And,
    Eventually,
    Formula,
    Globally,
    Not,
    Or,
    Pred,
    Until,
    format_formula,
    horizon,
    size,
)
from .measure import MeasureConfig, measure_config_from_dict, measure_config_to_dict, sample_values
from .monitor import robustness_trace_batch
from .parser import parse_formula
from .trajectory import stack_trajectories

NODE_KINDS = ("pred", "not", "and", "or", "eventually", "globally", "until")
DEFAULT_NODE_PROBS = (0.30, 0.05, 0.15, 0.10, 0.15, 0.15, 0.10)


@dataclass(frozen=True)
class GrammarConfig:
    base_length: int
    num_vars: int = 1
    max_depth: int = 3
    max_vars_per_formula: int = 2
    node_probs: tuple = DEFAULT_NODE_PROBS
    seed: int = 1

    def __post_init__(self):
        if self.base_length < 2:
            raise ValueError(f"base_length must be at least 2, got {self.base_length}")
        if self.num_vars < 1:
            raise ValueError(f"num_vars must be positive, got {self.num_vars}")
        if self.max_depth < 1:
            raise ValueError(f"max_depth must be positive, got {self.max_depth}")
        if self.max_vars_per_formula < 1:
            raise ValueError(f"max_vars_per_formula must be positive, got {self.max_vars_per_formula}")
        probs = tuple(float(p) for p in self.node_probs)
        if len(probs) != len(NODE_KINDS):
            raise ValueError(f"need {len(NODE_KINDS)} node probabilities, got {len(probs)}")
        if any(p < 0 for p in probs):
            raise ValueError("node probabilities must be non-negative")
        total = sum(probs)
        if abs(total - 1.0) > 1e-9:
            raise ValueError(f"node probabilities must sum to 1, got {total}")
        if probs[0] <= 0:
            raise ValueError("the predicate probability must be positive")
        object.__setattr__(self, "node_probs", probs)
        if self.seed < 0:
            raise ValueError(f"seed must be non-negative, got {self.seed}")


def sample_formula(config: GrammarConfig, rng: np.random.Generator) -> Formula:
    """Draw one random formula; consumes the generator state it is handed."""
    probs = np.asarray(config.node_probs)
    probs = probs / probs.sum()
    used_vars: list[int] = []

    def pick_var() -> int:
        if len(used_vars) < config.max_vars_per_formula:
            var = int(rng.integers(config.num_vars))
            if var not in used_vars:
                used_vars.append(var)
            return var
        return used_vars[int(rng.integers(len(used_vars)))]

    def pick_interval() -> tuple[int, int]:
        half = config.base_length // 2
        lo = int(rng.integers(0, half + 1))
        hi = lo + int(rng.integers(1, max(half, 1) + 1))
        return lo, hi

    def pick_pred() -> Formula:
        var = pick_var()
        op = GE if rng.random() < 0.5 else LE
        return Pred(var, op, float(rng.normal()))

    def grow(depth_budget: int) -> Formula:
        if depth_budget <= 1:
            return pick_pred()
        kind = NODE_KINDS[int(rng.choice(len(NODE_KINDS), p=probs))]
        if kind == "pred":
            return pick_pred()
        if kind == "not":
            return Not(grow(depth_budget - 1))
        if kind == "and":
            return And(grow(depth_budget - 1), grow(depth_budget - 1))
        if kind == "or":
            return Or(grow(depth_budget - 1), grow(depth_budget - 1))
        if kind == "eventually":
            lo, hi = pick_interval()
            return Eventually(lo, hi, grow(depth_budget - 1))
        if kind == "globally":
            lo, hi = pick_interval()
            return Globally(lo, hi, grow(depth_budget - 1))
        lo, hi = pick_interval()
        return Until(lo, hi, grow(depth_budget - 1), grow(depth_budget - 1))

    return grow(config.max_depth)


def signature(phi: Formula, signature_set) -> np.ndarray:
    """Squashed robustness of phi at time 0 on every signature trajectory.

    Raises HorizonError when the formula reaches past the trajectories, so
    callers can discard such candidates instead of reading clipped values.
    """
    values = stack_trajectories(signature_set)
    h = horizon(phi)
    if h > values.shape[2]:
        raise HorizonError(f"formula horizon {h} exceeds signature trajectory length {values.shape[2]}")
    return np.tanh(robustness_trace_batch(phi, values)[:, 0])


@dataclass
class ConceptBank:
    """Retained concepts with their signatures and generation provenance."""

    concepts: list
    signatures: np.ndarray
    costs: np.ndarray
    base_length: int
    grammar: GrammarConfig
    measure: MeasureConfig
    sim_threshold: float
    n_target: int
    attempts_used: int
    partial: bool

    @property
    def n(self) -> int:
        return len(self.concepts)

    def max_pairwise_cosine(self) -> float:
        if self.n < 2:
            return 0.0
        units = _unit_rows(self.signatures)
        sims = np.abs(units @ units.T)
        np.fill_diagonal(sims, 0.0)
        return float(sims.max())


def _unit_rows(matrix: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(matrix, axis=1, keepdims=True)
    return matrix / np.where(norms == 0, 1.0, norms)


def select_concepts(
    grammar: GrammarConfig,
    n_target: int,
    sim_threshold: float = 0.9,
    measure: MeasureConfig | None = None,
    max_attempts: int | None = None,
) -> ConceptBank:
    """Sample formulae until n_target mutually diverse concepts are retained.

    Diversity means the absolute cosine between unit signatures stays below
    sim_threshold.  A candidate similar to exactly one retained concept takes
    its place when strictly smaller, which keeps the retained set pairwise
    diverse.  Candidates whose horizon overruns the signature trajectories or
    whose signature is identically zero are discarded.  If the attempt budget
    runs out first the bank is returned partially filled and flagged.
    """
    if n_target < 1:
        raise ValueError(f"n_target must be positive, got {n_target}")
    if not 0 < sim_threshold <= 1:
        raise ValueError(f"sim_threshold must lie in (0, 1], got {sim_threshold}")
    if measure is None:
        measure = MeasureConfig(length=grammar.base_length, dims=grammar.num_vars)
    if measure.length != grammar.base_length:
        raise ValueError(
            f"measure length {measure.length} does not match grammar base length {grammar.base_length}"
        )
    if measure.dims < grammar.num_vars:
        raise ValueError(
            f"measure has {measure.dims} variables but the grammar uses up to {grammar.num_vars}"
        )
    if max_attempts is None:
        max_attempts = 100 * n_target
    signature_values = sample_values(measure)
    rng = np.random.default_rng(grammar.seed)

    kept_formulae: list[Formula] = []
    kept_signatures: list[np.ndarray] = []
    kept_units: list[np.ndarray] = []
    kept_costs: list[int] = []
    attempts = 0
    while len(kept_formulae) < n_target and attempts < max_attempts:
        attempts += 1
        phi = sample_formula(grammar, rng)
        try:
            sig = signature(phi, signature_values)
        except HorizonError:
            continue
        norm = float(np.linalg.norm(sig))
        if norm == 0.0:
            continue
        unit = sig / norm
        if kept_units:
            sims = np.abs(np.stack(kept_units) @ unit)
            close = np.flatnonzero(sims >= sim_threshold)
        else:
            close = np.array([], dtype=np.int64)
        if close.size == 0:
            kept_formulae.append(phi)
            kept_signatures.append(sig)
            kept_units.append(unit)
            kept_costs.append(size(phi))
        elif close.size == 1 and size(phi) < kept_costs[close[0]]:
            index = int(close[0])
            kept_formulae[index] = phi
            kept_signatures[index] = sig
            kept_units[index] = unit
            kept_costs[index] = size(phi)

    return ConceptBank(
        concepts=kept_formulae,
        signatures=np.stack(kept_signatures) if kept_formulae else np.zeros((0, measure.num_trajectories)),
        costs=np.asarray(kept_costs, dtype=np.int64),
        base_length=grammar.base_length,
        grammar=grammar,
        measure=measure,
        sim_threshold=sim_threshold,
        n_target=n_target,
        attempts_used=attempts,
        partial=len(kept_formulae) < n_target,
    )


def _scale_intervals(phi: Formula, ratio: float) -> Formula:
    def scale_bound(bound: int) -> int:
        return int(round(bound * ratio))

    def scale_pair(lo: int, hi: int) -> tuple[int, int]:
        new_lo, new_hi = scale_bound(lo), scale_bound(hi)
        if new_hi < new_lo:
            new_hi = new_lo
        return new_lo, new_hi

    if isinstance(phi, Not):
        return Not(_scale_intervals(phi.child, ratio))
    if isinstance(phi, And):
        return And(_scale_intervals(phi.left, ratio), _scale_intervals(phi.right, ratio))
    if isinstance(phi, Or):
        return Or(_scale_intervals(phi.left, ratio), _scale_intervals(phi.right, ratio))
    if isinstance(phi, Eventually):
        lo, hi = scale_pair(phi.lo, phi.hi)
        return Eventually(lo, hi, _scale_intervals(phi.child, ratio))
    if isinstance(phi, Globally):
        lo, hi = scale_pair(phi.lo, phi.hi)
        return Globally(lo, hi, _scale_intervals(phi.child, ratio))
    if isinstance(phi, Until):
        lo, hi = scale_pair(phi.lo, phi.hi)
        return Until(lo, hi, _scale_intervals(phi.left, ratio), _scale_intervals(phi.right, ratio))
    return phi


def rescale_bank(bank: ConceptBank, new_length: int) -> ConceptBank:
    """Adapt a bank to trajectories of a different length.

    Interval bounds are scaled by (new_length - 1) / (base_length - 1) and
    rounded; signatures are recomputed on a fresh base sample of the new
    length drawn with the stored measure seed.  Scaled horizons can overrun
    the new length when upscaling nested windows, so the recomputation uses
    clipped evaluation rather than rejecting such concepts.
    """
    if new_length < 2:
        raise ValueError(f"new_length must be at least 2, got {new_length}")
    if new_length == bank.base_length:
        return bank
    ratio = (new_length - 1) / (bank.base_length - 1)
    concepts = [_scale_intervals(phi, ratio) for phi in bank.concepts]
    measure = replace(
        bank.measure,
        length=new_length,
        num_knots=min(bank.measure.num_knots, new_length),
    )
    values = sample_values(measure)
    if concepts:
        signatures = np.stack([np.tanh(robustness_trace_batch(phi, values)[:, 0]) for phi in concepts])
    else:
        signatures = np.zeros((0, measure.num_trajectories))
    return ConceptBank(
        concepts=concepts,
        signatures=signatures,
        costs=np.asarray([size(phi) for phi in concepts], dtype=np.int64),
        base_length=new_length,
        grammar=bank.grammar,
        measure=measure,
        sim_threshold=bank.sim_threshold,
        n_target=bank.n_target,
        attempts_used=bank.attempts_used,
        partial=bank.partial,
    )


def grammar_config_to_dict(config: GrammarConfig) -> dict:
    return {
        "base_length": config.base_length,
        "num_vars": config.num_vars,
        "max_depth": config.max_depth,
        "max_vars_per_formula": config.max_vars_per_formula,
        "node_probs": list(config.node_probs),
        "seed": config.seed,
    }


def grammar_config_from_dict(data: dict) -> GrammarConfig:
    return GrammarConfig(
        base_length=int(data["base_length"]),
        num_vars=int(data["num_vars"]),
        max_depth=int(data["max_depth"]),
        max_vars_per_formula=int(data["max_vars_per_formula"]),
        node_probs=tuple(float(p) for p in data["node_probs"]),
        seed=int(data["seed"]),
    )


def bank_to_dict(bank: ConceptBank) -> dict:
    """JSON friendly form; signatures are omitted and recomputed on load."""
    return {
        "version": 1,
        "concepts": [format_formula(phi) for phi in bank.concepts],
        "costs": [int(c) for c in bank.costs],
        "base_length": bank.base_length,
        "grammar": grammar_config_to_dict(bank.grammar),
        "measure": measure_config_to_dict(bank.measure),
        "sim_threshold": bank.sim_threshold,
        "n_target": bank.n_target,
        "attempts_used": bank.attempts_used,
        "partial": bank.partial,
    }


def bank_from_dict(data: dict) -> ConceptBank:
    if data.get("version") != 1:
        raise ValueError(f"unsupported bank version: {data.get('version')!r}")
    concepts = [parse_formula(text) for text in data["concepts"]]
    measure = measure_config_from_dict(data["measure"])
    values = sample_values(measure)
    if concepts:
        signatures = np.stack([np.tanh(robustness_trace_batch(phi, values)[:, 0]) for phi in concepts])
    else:
        signatures = np.zeros((0, measure.num_trajectories))
    return ConceptBank(
        concepts=concepts,
        signatures=signatures,
        costs=np.asarray(data["costs"], dtype=np.int64),
        base_length=int(data["base_length"]),
        grammar=grammar_config_from_dict(data["grammar"]),
        measure=measure,
        sim_threshold=float(data["sim_threshold"]),
        n_target=int(data["n_target"]),
        attempts_used=int(data["attempts_used"]),
        partial=bool(data["partial"]),
    )


def save_bank(bank: ConceptBank, path) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(bank_to_dict(bank), handle, indent=2, sort_keys=True)
        handle.write("\n")


def load_bank(path) -> ConceptBank:
    with open(path, "r", encoding="utf-8") as handle:
        return bank_from_dict(json.load(handle))
