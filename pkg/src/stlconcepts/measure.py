"""Monte Carlo base measure over trajectories.

Samples piecewise linear paths: per variable, ``num_knots`` values are drawn
i.i.d. from Normal(0, value_std^2) at equally spaced sample indices and
linearly interpolated in between.  The same seed always yields the same
sample set, which anchors every kernel and signature computation downstream.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .trajectory import Trajectory


@dataclass(frozen=True)
class MeasureConfig:
    length: int
    dims: int = 1
    num_trajectories: int = 1000
    num_knots: int = 10
    value_std: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if self.length < 1:
            raise ValueError(f"length must be positive, got {self.length}")
        if self.dims < 1:
            raise ValueError(f"dims must be positive, got {self.dims}")
        if self.num_trajectories < 2:
            raise ValueError(f"need at least two trajectories, got {self.num_trajectories}")
        if not 1 <= self.num_knots <= self.length:
            raise ValueError(f"num_knots must lie in [1, length], got {self.num_knots}")
        if not self.value_std > 0:
            raise ValueError(f"value_std must be positive, got {self.value_std}")
        if self.seed < 0:
            raise ValueError(f"seed must be non-negative, got {self.seed}")


def knot_positions(length: int, num_knots: int) -> np.ndarray:
    """Equally spaced integer sample indices from 0 to length-1."""
    return np.round(np.linspace(0, length - 1, num_knots)).astype(np.int64)


def sample_values(config: MeasureConfig) -> np.ndarray:
    """Draw the sample set as one (num_trajectories, dims, length) array."""
    rng = np.random.default_rng(config.seed)
    knots = rng.normal(0.0, config.value_std, size=(config.num_trajectories, config.dims, config.num_knots))
    positions = knot_positions(config.length, config.num_knots)
    grid = np.arange(config.length)
    values = np.empty((config.num_trajectories, config.dims, config.length))
    for m in range(config.num_trajectories):
        for d in range(config.dims):
            values[m, d] = np.interp(grid, positions, knots[m, d])
    return values


def sample_measure(config: MeasureConfig) -> list[Trajectory]:
    """Draw the sample set as a list of trajectories."""
    return [Trajectory(row) for row in sample_values(config)]


def measure_config_to_dict(config: MeasureConfig) -> dict:
    return {
        "length": config.length,
        "dims": config.dims,
        "num_trajectories": config.num_trajectories,
        "num_knots": config.num_knots,
        "value_std": config.value_std,
        "seed": config.seed,
    }


def measure_config_from_dict(data: dict) -> MeasureConfig:
    return MeasureConfig(
        length=int(data["length"]),
        dims=int(data["dims"]),
        num_trajectories=int(data["num_trajectories"]),
        num_knots=int(data["num_knots"]),
        value_std=float(data["value_std"]),
        seed=int(data["seed"]),
    )
