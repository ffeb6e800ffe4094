"""Built-in synthetic classification task.

The spike task: both classes wander gently inside [-0.5, 0.5] as piecewise
linear paths; class 1 additionally carries one triangular spike that peaks
between 1.5 and 2.0, so class 1 trajectories eventually exceed 0.8 and class
0 trajectories never come near it.  An eventually-over-threshold concept
separates the classes perfectly, which makes the task a good end to end
check of the whole pipeline.
"""

from __future__ import annotations

import numpy as np

from .data import Dataset


def make_spike_dataset(
    samples_per_class: int = 200,
    length: int = 50,
    num_knots: int = 8,
    seed: int = 0,
) -> Dataset:
    if samples_per_class < 1:
        raise ValueError(f"samples_per_class must be positive, got {samples_per_class}")
    if length < 16:
        raise ValueError(f"length must be at least 16, got {length}")
    if not 2 <= num_knots <= length:
        raise ValueError(f"num_knots must lie in [2, length], got {num_knots}")
    rng = np.random.default_rng(seed)
    total = 2 * samples_per_class
    grid = np.arange(length)
    positions = np.round(np.linspace(0, length - 1, num_knots)).astype(np.int64)
    values = np.empty((total, 1, length))
    labels = np.zeros(total, dtype=np.int64)
    labels[samples_per_class:] = 1
    for i in range(total):
        knots = rng.uniform(-0.5, 0.5, size=num_knots)
        base = np.interp(grid, positions, knots)
        if labels[i] == 1:
            center = int(rng.integers(3, length - 3))
            half_width = int(rng.integers(3, 7))
            peak = float(rng.uniform(1.5, 2.0))
            bump = peak * np.clip(1.0 - np.abs(grid - center) / half_width, 0.0, None)
            base = base + bump
        values[i, 0] = base
    order = rng.permutation(total)
    return Dataset(values=values[order], labels=labels[order], label_values=[0.0, 1.0])
