"""Dataset container and file formats.

Two on-disk layouts are supported: the tab separated univariate layout
``<label>\\t<v1>\\t...\\t<vT>`` (one sample per row, common for time series
classification benchmarks) and a JSON container for multivariate data::

    {"version": 1, "labels": [...], "samples": [[[...]]]}

where samples[s][d][t] indexes sample, variable, time.  Labels may be any
numeric values; they are mapped to dense class indices 0..K-1 in ascending
order of value and the original values are kept for round trips.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .formula import format_number
from .trajectory import Trajectory


@dataclass(frozen=True)
class NormalizationRecord:
    """Per-variable shift and scale fitted on a training split."""

    mean: tuple
    std: tuple

    def to_dict(self) -> dict:
        return {"mean": list(self.mean), "std": list(self.std)}

    @classmethod
    def from_dict(cls, data: dict) -> "NormalizationRecord":
        return cls(mean=tuple(float(v) for v in data["mean"]), std=tuple(float(v) for v in data["std"]))


@dataclass
class Dataset:
    """Fixed-length labeled trajectories stacked into one array."""

    values: np.ndarray
    labels: np.ndarray
    label_values: list
    normalization: NormalizationRecord | None = None

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        self.labels = np.asarray(self.labels, dtype=np.int64)
        if self.values.ndim != 3:
            raise ValueError(f"values must have shape (count, dims, length), got {self.values.shape}")
        if self.labels.shape != (self.values.shape[0],):
            raise ValueError(f"need one label per sample, got {self.labels.shape} for {self.values.shape[0]} samples")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("dataset contains non-finite values")
        k = len(self.label_values)
        if k < 1:
            raise ValueError("need at least one class")
        if self.labels.size and (self.labels.min() < 0 or self.labels.max() >= k):
            raise ValueError(f"labels must be dense indices below {k}")

    @property
    def count(self) -> int:
        return self.values.shape[0]

    @property
    def dims(self) -> int:
        return self.values.shape[1]

    @property
    def length(self) -> int:
        return self.values.shape[2]

    @property
    def num_classes(self) -> int:
        return len(self.label_values)

    def trajectory(self, index: int) -> Trajectory:
        return Trajectory(self.values[index])


def _densify_labels(raw: np.ndarray) -> tuple[np.ndarray, list]:
    label_values = sorted(set(float(v) for v in raw))
    mapping = {v: i for i, v in enumerate(label_values)}
    return np.asarray([mapping[float(v)] for v in raw], dtype=np.int64), label_values


def load_ucr_tsv(path) -> Dataset:
    """Read the tab separated univariate layout, one labeled series per row."""
    raw_labels = []
    rows = []
    expected = None
    with open(path, "r", encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            line = line.strip()
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) < 2:
                raise ValueError(f"{path}: row {lineno} has no values")
            try:
                numbers = [float(p) for p in parts]
            except ValueError as exc:
                raise ValueError(f"{path}: row {lineno} has a non-numeric field: {exc}") from None
            if expected is None:
                expected = len(numbers) - 1
            elif len(numbers) - 1 != expected:
                raise ValueError(f"{path}: row {lineno} has {len(numbers) - 1} values, expected {expected}")
            raw_labels.append(numbers[0])
            rows.append(numbers[1:])
    if not rows:
        raise ValueError(f"{path}: empty dataset file")
    values = np.asarray(rows, dtype=np.float64)[:, np.newaxis, :]
    if not np.all(np.isfinite(values)):
        raise ValueError(f"{path}: dataset contains non-finite values")
    labels, label_values = _densify_labels(np.asarray(raw_labels))
    return Dataset(values=values, labels=labels, label_values=label_values)


def save_ucr_tsv(dataset: Dataset, path) -> None:
    if dataset.dims != 1:
        raise ValueError(f"the tab separated layout is univariate, dataset has {dataset.dims} variables")
    with open(path, "w", encoding="utf-8") as handle:
        for i in range(dataset.count):
            label = dataset.label_values[dataset.labels[i]]
            fields = [format_number(float(label))]
            fields.extend(format_number(float(v)) for v in dataset.values[i, 0])
            handle.write("\t".join(fields) + "\n")


def load_multivariate_json(path) -> Dataset:
    with open(path, "r", encoding="utf-8") as handle:
        data = json.load(handle)
    if not isinstance(data, dict) or data.get("version") != 1:
        raise ValueError(f"{path}: expected a version 1 dataset container")
    raw_labels = data.get("labels")
    samples = data.get("samples")
    if not isinstance(raw_labels, list) or not isinstance(samples, list):
        raise ValueError(f"{path}: container needs 'labels' and 'samples' lists")
    if len(raw_labels) != len(samples):
        raise ValueError(f"{path}: {len(raw_labels)} labels for {len(samples)} samples")
    if not samples:
        raise ValueError(f"{path}: empty dataset file")
    try:
        values = np.asarray(samples, dtype=np.float64)
    except ValueError:
        raise ValueError(f"{path}: samples are ragged or non-numeric") from None
    if values.ndim != 3:
        raise ValueError(f"{path}: samples must index [sample][variable][time], got shape {values.shape}")
    if not np.all(np.isfinite(values)):
        raise ValueError(f"{path}: dataset contains non-finite values")
    labels, label_values = _densify_labels(np.asarray(raw_labels, dtype=np.float64))
    return Dataset(values=values, labels=labels, label_values=label_values)


def save_multivariate_json(dataset: Dataset, path) -> None:
    payload = {
        "version": 1,
        "labels": [float(dataset.label_values[k]) for k in dataset.labels],
        "samples": dataset.values.tolist(),
    }
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(payload, handle, sort_keys=True)
        handle.write("\n")


def load_dataset(path) -> Dataset:
    """Pick the reader from the file extension (.json or tab separated text)."""
    text = str(path)
    if text.endswith(".json"):
        return load_multivariate_json(path)
    return load_ucr_tsv(path)


def fit_normalization(dataset: Dataset) -> NormalizationRecord:
    """Per-variable mean and population standard deviation over all samples and times."""
    mean = dataset.values.mean(axis=(0, 2))
    std = dataset.values.std(axis=(0, 2))
    return NormalizationRecord(mean=tuple(float(v) for v in mean), std=tuple(float(v) for v in std))


def standardize(dataset: Dataset, record: NormalizationRecord | None = None) -> Dataset:
    """Shift and scale each variable; fits on this dataset when no record is given.

    Near-constant variables are left at their centred values rather than
    blown up: the divisor is max(std, 1e-8).
    """
    if record is None:
        record = fit_normalization(dataset)
    mean = np.asarray(record.mean, dtype=np.float64)
    std = np.asarray(record.std, dtype=np.float64)
    if mean.shape != (dataset.dims,):
        raise ValueError(f"record covers {mean.shape[0]} variables, dataset has {dataset.dims}")
    divisor = np.maximum(std, 1e-8)
    values = (dataset.values - mean[np.newaxis, :, np.newaxis]) / divisor[np.newaxis, :, np.newaxis]
    return Dataset(
        values=values,
        labels=dataset.labels.copy(),
        label_values=list(dataset.label_values),
        normalization=record,
    )
