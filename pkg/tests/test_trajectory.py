"""Trajectory container invariants."""

import numpy as np
import pytest

from stlconcepts.trajectory import Trajectory, stack_trajectories


def test_one_dimensional_input_becomes_single_variable():
    tau = Trajectory(np.array([1.0, 2.0, 3.0]))
    assert tau.values.shape == (1, 3)
    assert tau.dims == 1
    assert tau.length == 3


def test_values_are_copied_and_read_only():
    source = np.array([[1.0, 2.0]])
    tau = Trajectory(source)
    source[0, 0] = 99.0
    assert tau.values[0, 0] == 1.0
    with pytest.raises(ValueError):
        tau.values[0, 0] = 5.0


def test_validation():
    with pytest.raises(ValueError, match="finite"):
        Trajectory(np.array([[1.0, np.nan]]))
    with pytest.raises(ValueError, match="dims x length"):
        Trajectory(np.zeros((2, 2, 2)))
    with pytest.raises(ValueError, match="at least one"):
        Trajectory(np.zeros((0, 4)))
    with pytest.raises(ValueError, match="sample_period"):
        Trajectory(np.array([1.0, 2.0]), sample_period=0.0)


def test_sample_period_is_metadata_only():
    tau = Trajectory(np.array([1.0, 2.0]), sample_period=0.5)
    assert tau.sample_period == 0.5
    assert tau.length == 2


def test_stack_trajectories():
    taus = [Trajectory(np.full((2, 4), float(i))) for i in range(3)]
    stacked = stack_trajectories(taus)
    assert stacked.shape == (3, 2, 4)
    assert stacked[1, 0, 0] == 1.0
    passthrough = stack_trajectories(stacked)
    assert passthrough.shape == (3, 2, 4)


def test_stack_rejects_mismatched_shapes():
    taus = [Trajectory(np.zeros((1, 4))), Trajectory(np.zeros((1, 5)))]
    with pytest.raises(ValueError, match="shapes differ"):
        stack_trajectories(taus)
    with pytest.raises(ValueError, match="at least one"):
        stack_trajectories([])
    with pytest.raises(ValueError, match="count, dims, length"):
        stack_trajectories(np.zeros((2, 3)))
