"""Kernels between trajectories and formulae over a shared base sample.

A trajectory tau is represented by its affinity profile over the base
sample: affinity(tau, xi) = 2 exp(-||xi - tau||^2 / epsilon) - 1, which lives
in (-1, 1] and equals 1 exactly when xi == tau.  A formula phi is represented
by its squashed robustness profile tanh(rho(phi, xi, 0)).  Kernels are plain
averages of profile products over the base sample, evaluated in fixed index
order so repeated calls give identical floats.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import HorizonError
from .formula import Formula, horizon
from .measure import MeasureConfig, sample_values
from .monitor import robustness_trace_batch
from .trajectory import Trajectory, stack_trajectories


def median_squared_distance(values: np.ndarray) -> float:
    """Median pairwise squared euclidean distance between flattened trajectories.

    The usual bandwidth heuristic; distinct inputs make it strictly positive.
    """
    flat = np.asarray(values, dtype=np.float64).reshape(values.shape[0], -1)
    if flat.shape[0] < 2:
        raise ValueError("need at least two trajectories for the bandwidth heuristic")
    norms = np.einsum("ij,ij->i", flat, flat)
    squared = norms[:, np.newaxis] + norms[np.newaxis, :] - 2.0 * (flat @ flat.T)
    upper = squared[np.triu_indices(flat.shape[0], k=1)]
    value = float(np.median(np.maximum(upper, 0.0)))
    if value <= 0:
        raise ValueError("median pairwise distance is zero; base sample has duplicate trajectories")
    return value


@dataclass
class KernelContext:
    """Base sample plus bandwidth, fixed once and reused for all kernel calls."""

    base_values: np.ndarray
    epsilon: float
    squash: bool = True

    def __post_init__(self):
        self.base_values = np.asarray(self.base_values, dtype=np.float64)
        if self.base_values.ndim != 3:
            raise ValueError(f"base values must have shape (count, dims, length), got {self.base_values.shape}")
        if self.base_values.shape[0] < 2:
            raise ValueError("need at least two base trajectories")
        if not self.epsilon > 0:
            raise ValueError(f"epsilon must be positive, got {self.epsilon}")

    @property
    def length(self) -> int:
        return self.base_values.shape[2]

    @classmethod
    def from_trajectories(cls, trajectories, epsilon: float | None = None, squash: bool = True) -> "KernelContext":
        values = stack_trajectories(trajectories)
        if epsilon is None:
            epsilon = median_squared_distance(values)
        return cls(values, epsilon, squash)

    @classmethod
    def from_measure(cls, config: MeasureConfig, epsilon: float | None = None, squash: bool = True) -> "KernelContext":
        values = sample_values(config)
        if epsilon is None:
            epsilon = median_squared_distance(values)
        return cls(values, epsilon, squash)


def trajectory_affinity(tau: Trajectory, xi: Trajectory, epsilon: float) -> float:
    """Similarity of two same-shaped trajectories, in (-1, 1] with 1 iff identical."""
    if tau.values.shape != xi.values.shape:
        raise ValueError(f"trajectory shapes differ: {tau.values.shape} vs {xi.values.shape}")
    if not epsilon > 0:
        raise ValueError(f"epsilon must be positive, got {epsilon}")
    distance = float(np.sum((xi.values - tau.values) ** 2))
    return 2.0 * float(np.exp(-distance / epsilon)) - 1.0


def _affinity_profile(tau: Trajectory, ctx: KernelContext) -> np.ndarray:
    if tau.values.shape != ctx.base_values.shape[1:]:
        raise ValueError(
            f"trajectory shape {tau.values.shape} does not match base sample shape {ctx.base_values.shape[1:]}"
        )
    diffs = ctx.base_values - tau.values[np.newaxis]
    distances = np.einsum("mdt,mdt->m", diffs, diffs)
    return 2.0 * np.exp(-distances / ctx.epsilon) - 1.0


def _robustness_profile(phi: Formula, ctx: KernelContext) -> np.ndarray:
    h = horizon(phi)
    if h > ctx.length:
        raise HorizonError(f"formula horizon {h} exceeds base trajectory length {ctx.length}")
    profile = robustness_trace_batch(phi, ctx.base_values)[:, 0]
    return np.tanh(profile) if ctx.squash else profile


def cross_kernel(tau: Trajectory, phi: Formula, ctx: KernelContext) -> float:
    """Average product of tau's affinity profile and phi's robustness profile."""
    return float(np.mean(_affinity_profile(tau, ctx) * _robustness_profile(phi, ctx)))


def formula_kernel(phi: Formula, psi: Formula, ctx: KernelContext) -> float:
    """Average product of two formulae's robustness profiles; symmetric by construction."""
    return float(np.mean(_robustness_profile(phi, ctx) * _robustness_profile(psi, ctx)))
