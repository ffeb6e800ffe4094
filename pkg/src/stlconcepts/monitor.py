"""Quantitative and boolean evaluation of formulae on trajectories.

Robustness follows the usual min/max semantics: the margin of a predicate is
the signed distance to its threshold, negation flips sign, conjunction takes
the min, disjunction the max, G the min over its window, F the max, and
U[a,b] the best offset t' in the window at which the right operand holds and
the left operand has held at every sample from the evaluation instant through
t' inclusive.

Temporal windows are clipped to the end of the trajectory.  A window that
falls entirely past the end is vacuous: G yields +LARGE, F and U yield
-LARGE.  This makes evaluation total, so formulae whose horizon exceeds the
trajectory still get a well defined answer, and ``true`` carries robustness
+LARGE.  Verdict ties (robustness exactly 0) count as satisfied.

Two implementations are provided: a direct recursion over the definition
(``robustness``, the reference), and a vectorised sliding window path
(``robustness_trace_batch``) that returns bit-identical values because min
and max only ever select among the same floats.
"""

from __future__ import annotations

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .formula import And, Eventually, Formula, Globally, Not, Or, Pred, TrueNode, Until, GE
from .trajectory import Trajectory

LARGE = 1e9


def _check_time(tau: Trajectory, t: int):
    if not 0 <= t < tau.length:
        raise ValueError(f"evaluation time {t} outside trajectory of length {tau.length}")


def robustness(phi: Formula, tau: Trajectory, t: int = 0) -> float:
    """Quantitative satisfaction margin of phi on tau at sample t (reference recursion)."""
    _check_time(tau, t)
    return _rob(phi, tau.values, t)


def _window(t: int, lo: int, hi: int, length: int):
    start = t + lo
    stop = min(t + hi, length - 1)
    return start, stop


def _rob(phi: Formula, x: np.ndarray, t: int) -> float:
    length = x.shape[1]
    if isinstance(phi, TrueNode):
        return LARGE
    if isinstance(phi, Pred):
        if phi.var >= x.shape[0]:
            raise ValueError(f"formula reads variable x{phi.var} but trajectory has {x.shape[0]} variables")
        value = x[phi.var, t]
        return value - phi.threshold if phi.op == GE else phi.threshold - value
    if isinstance(phi, Not):
        return -_rob(phi.child, x, t)
    if isinstance(phi, And):
        return min(_rob(phi.left, x, t), _rob(phi.right, x, t))
    if isinstance(phi, Or):
        return max(_rob(phi.left, x, t), _rob(phi.right, x, t))
    if isinstance(phi, Eventually):
        start, stop = _window(t, phi.lo, phi.hi, length)
        if start > stop:
            return -LARGE
        return max(_rob(phi.child, x, s) for s in range(start, stop + 1))
    if isinstance(phi, Globally):
        start, stop = _window(t, phi.lo, phi.hi, length)
        if start > stop:
            return LARGE
        return min(_rob(phi.child, x, s) for s in range(start, stop + 1))
    if isinstance(phi, Until):
        start, stop = _window(t, phi.lo, phi.hi, length)
        if start > stop:
            return -LARGE
        best = None
        holding = min(_rob(phi.left, x, s) for s in range(t, start + 1))
        for s in range(start, stop + 1):
            if s > start:
                holding = min(holding, _rob(phi.left, x, s))
            paired = min(_rob(phi.right, x, s), holding)
            best = paired if best is None else max(best, paired)
        return best
    raise TypeError(f"not a formula node: {phi!r}")


def boolean_sat(phi: Formula, tau: Trajectory, t: int = 0) -> bool:
    """Classical boolean satisfaction, evaluated without computing robustness.

    Predicates are non-strict, vacuous G windows hold, vacuous F and U
    windows fail.  Serves as an independent check that robustness signs
    agree with the boolean semantics.
    """
    _check_time(tau, t)
    return _sat(phi, tau.values, t)


def _sat(phi: Formula, x: np.ndarray, t: int) -> bool:
    length = x.shape[1]
    if isinstance(phi, TrueNode):
        return True
    if isinstance(phi, Pred):
        if phi.var >= x.shape[0]:
            raise ValueError(f"formula reads variable x{phi.var} but trajectory has {x.shape[0]} variables")
        value = x[phi.var, t]
        return bool(value >= phi.threshold) if phi.op == GE else bool(value <= phi.threshold)
    if isinstance(phi, Not):
        return not _sat(phi.child, x, t)
    if isinstance(phi, And):
        return _sat(phi.left, x, t) and _sat(phi.right, x, t)
    if isinstance(phi, Or):
        return _sat(phi.left, x, t) or _sat(phi.right, x, t)
    if isinstance(phi, Eventually):
        start, stop = _window(t, phi.lo, phi.hi, length)
        return any(_sat(phi.child, x, s) for s in range(start, stop + 1))
    if isinstance(phi, Globally):
        start, stop = _window(t, phi.lo, phi.hi, length)
        return all(_sat(phi.child, x, s) for s in range(start, stop + 1))
    if isinstance(phi, Until):
        start, stop = _window(t, phi.lo, phi.hi, length)
        for s in range(start, stop + 1):
            if _sat(phi.right, x, s) and all(_sat(phi.left, x, u) for u in range(t, s + 1)):
                return True
        return False
    raise TypeError(f"not a formula node: {phi!r}")


def _check_batch(values: np.ndarray) -> np.ndarray:
    values = np.asarray(values, dtype=np.float64)
    if values.ndim != 3:
        raise ValueError(f"expected a (count, dims, length) array, got shape {values.shape}")
    return values


def _sliding_min(trace: np.ndarray, lo: int, hi: int, vacuous: float) -> np.ndarray:
    """Per-time min of trace over the clipped window [t+lo, t+hi].

    Padding with +inf keeps partially clipped windows exact; fully vacuous
    windows are overwritten with the given constant afterwards.
    """
    count, length = trace.shape
    width = hi - lo + 1
    padded = np.concatenate([trace, np.full((count, lo + width), np.inf)], axis=1)
    windows = sliding_window_view(padded, width, axis=1)
    out = windows[:, lo : lo + length, :].min(axis=2)
    first_vacuous = max(length - lo, 0)
    out[:, first_vacuous:] = vacuous
    return out


def _sliding_max(trace: np.ndarray, lo: int, hi: int, vacuous: float) -> np.ndarray:
    count, length = trace.shape
    width = hi - lo + 1
    padded = np.concatenate([trace, np.full((count, lo + width), -np.inf)], axis=1)
    windows = sliding_window_view(padded, width, axis=1)
    out = windows[:, lo : lo + length, :].max(axis=2)
    first_vacuous = max(length - lo, 0)
    out[:, first_vacuous:] = vacuous
    return out


def _rob_batch(phi: Formula, x: np.ndarray) -> np.ndarray:
    count, dims, length = x.shape
    if isinstance(phi, TrueNode):
        return np.full((count, length), LARGE)
    if isinstance(phi, Pred):
        if phi.var >= dims:
            raise ValueError(f"formula reads variable x{phi.var} but trajectories have {dims} variables")
        column = x[:, phi.var, :]
        return column - phi.threshold if phi.op == GE else phi.threshold - column
    if isinstance(phi, Not):
        return -_rob_batch(phi.child, x)
    if isinstance(phi, And):
        return np.minimum(_rob_batch(phi.left, x), _rob_batch(phi.right, x))
    if isinstance(phi, Or):
        return np.maximum(_rob_batch(phi.left, x), _rob_batch(phi.right, x))
    if isinstance(phi, Eventually):
        return _sliding_max(_rob_batch(phi.child, x), phi.lo, phi.hi, -LARGE)
    if isinstance(phi, Globally):
        return _sliding_min(_rob_batch(phi.child, x), phi.lo, phi.hi, LARGE)
    if isinstance(phi, Until):
        left = _rob_batch(phi.left, x)
        right = _rob_batch(phi.right, x)
        out = np.full((count, length), -LARGE)
        for t in range(length):
            start = t + phi.lo
            if start > length - 1:
                break
            stop = min(t + phi.hi, length - 1)
            holding = np.minimum.accumulate(left[:, t : stop + 1], axis=1)
            paired = np.minimum(right[:, start : stop + 1], holding[:, start - t :])
            out[:, t] = paired.max(axis=1)
        return out
    raise TypeError(f"not a formula node: {phi!r}")


def robustness_trace_batch(phi: Formula, values: np.ndarray) -> np.ndarray:
    """Robustness of phi at every sample of every trajectory.

    ``values`` has shape (count, dims, length); the result has shape
    (count, length) and matches the reference recursion bit for bit.
    """
    return _rob_batch(phi, _check_batch(values))


def robustness_trace(phi: Formula, tau: Trajectory) -> np.ndarray:
    """Robustness of phi on one trajectory at every sample, shape (length,)."""
    return robustness_trace_batch(phi, tau.values[np.newaxis])[0]


def _sat_batch(phi: Formula, x: np.ndarray) -> np.ndarray:
    count, dims, length = x.shape
    if isinstance(phi, TrueNode):
        return np.ones((count, length), dtype=bool)
    if isinstance(phi, Pred):
        if phi.var >= dims:
            raise ValueError(f"formula reads variable x{phi.var} but trajectories have {dims} variables")
        column = x[:, phi.var, :]
        return column >= phi.threshold if phi.op == GE else column <= phi.threshold
    if isinstance(phi, Not):
        return ~_sat_batch(phi.child, x)
    if isinstance(phi, And):
        return _sat_batch(phi.left, x) & _sat_batch(phi.right, x)
    if isinstance(phi, Or):
        return _sat_batch(phi.left, x) | _sat_batch(phi.right, x)
    if isinstance(phi, Eventually):
        return _sliding_any(_sat_batch(phi.child, x), phi.lo, phi.hi)
    if isinstance(phi, Globally):
        return _sliding_all(_sat_batch(phi.child, x), phi.lo, phi.hi)
    if isinstance(phi, Until):
        left = _sat_batch(phi.left, x)
        right = _sat_batch(phi.right, x)
        out = np.zeros((count, length), dtype=bool)
        for t in range(length):
            start = t + phi.lo
            if start > length - 1:
                break
            stop = min(t + phi.hi, length - 1)
            holding = np.logical_and.accumulate(left[:, t : stop + 1], axis=1)
            paired = right[:, start : stop + 1] & holding[:, start - t :]
            out[:, t] = paired.any(axis=1)
        return out
    raise TypeError(f"not a formula node: {phi!r}")


def _sliding_any(trace: np.ndarray, lo: int, hi: int) -> np.ndarray:
    count, length = trace.shape
    width = hi - lo + 1
    padded = np.concatenate([trace, np.zeros((count, lo + width), dtype=bool)], axis=1)
    windows = sliding_window_view(padded, width, axis=1)
    return windows[:, lo : lo + length, :].any(axis=2)


def _sliding_all(trace: np.ndarray, lo: int, hi: int) -> np.ndarray:
    count, length = trace.shape
    width = hi - lo + 1
    padded = np.concatenate([trace, np.ones((count, lo + width), dtype=bool)], axis=1)
    windows = sliding_window_view(padded, width, axis=1)
    return windows[:, lo : lo + length, :].all(axis=2)


def sat_trace_batch(phi: Formula, values: np.ndarray) -> np.ndarray:
    """Boolean satisfaction of phi at every sample of every trajectory, shape (count, length)."""
    return _sat_batch(phi, _check_batch(values))
