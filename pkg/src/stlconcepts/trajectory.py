"""Uniformly sampled multivariate signals."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True, eq=False)
class Trajectory:
    """A finite signal with ``dims`` variables observed at ``length`` uniform time steps.

    ``values`` has shape (dims, length) and is stored as a read-only float64
    array; a 1-D input is treated as a single-variable signal.  All temporal
    reasoning counts samples, so ``sample_period`` (seconds per step) is
    carried as metadata only.
    """

    values: np.ndarray
    sample_period: float = 1.0

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64)
        if values.ndim == 1:
            values = values[np.newaxis, :]
        if values.ndim != 2:
            raise ValueError(f"trajectory values must form a dims x length matrix, got shape {values.shape}")
        if values.shape[0] < 1 or values.shape[1] < 1:
            raise ValueError(f"trajectory must have at least one variable and one sample, got shape {values.shape}")
        if not np.all(np.isfinite(values)):
            raise ValueError("trajectory values must be finite")
        if not self.sample_period > 0:
            raise ValueError(f"sample_period must be positive, got {self.sample_period}")
        values = values.copy()
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "sample_period", float(self.sample_period))

    @property
    def dims(self) -> int:
        return self.values.shape[0]

    @property
    def length(self) -> int:
        return self.values.shape[1]


def stack_trajectories(trajectories) -> np.ndarray:
    """Stack same-shaped trajectories into one (count, dims, length) array."""
    if isinstance(trajectories, np.ndarray):
        if trajectories.ndim != 3:
            raise ValueError(f"expected a (count, dims, length) array, got shape {trajectories.shape}")
        return np.asarray(trajectories, dtype=np.float64)
    items = list(trajectories)
    if not items:
        raise ValueError("need at least one trajectory")
    shape = items[0].values.shape
    for tau in items[1:]:
        if tau.values.shape != shape:
            raise ValueError(f"trajectory shapes differ: {tau.values.shape} vs {shape}")
    return np.stack([tau.values for tau in items])
