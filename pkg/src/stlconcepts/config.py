"""Run configuration: TOML file plus command line overrides.

A config file holds up to six tables (measure, grammar, selection, model,
explain, io), each optional, each with the keys shown in DEFAULTS.  Unknown
tables or keys are rejected rather than ignored so typos surface early.
Overrides use the form ``--section.key=value`` and win over the file.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass, field

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

DEFAULTS = {
    "measure": {
        "length": 50,
        "dims": 1,
        "num_trajectories": 1000,
        "num_knots": 10,
        "value_std": 1.0,
        "seed": 0,
    },
    "grammar": {
        "max_depth": 3,
        "max_vars_per_formula": 2,
        "node_probs": [0.30, 0.05, 0.15, 0.10, 0.15, 0.15, 0.10],
        "seed": 1,
    },
    "selection": {
        "n_target": 100,
        "sim_threshold": 0.9,
        "max_attempts": 0,
    },
    "model": {
        "epochs": 500,
        "learning_rate": 0.1,
        "l2": 1e-4,
        "t_attention": 1.0,
        "epsilon_g": 1e-6,
        "seed": 0,
    },
    "explain": {
        "mode": "top_gamma",
        "gamma": 3,
        "theta": 0.9,
        "coverage_target": 0.95,
        "leakage_max": 0.10,
    },
    "io": {
        "out_dir": ".",
    },
}


@dataclass
class RunConfig:
    """Plain nested dict of settings with every key present.

    selection.max_attempts of 0 means the default budget (100 per requested
    concept).
    """

    sections: dict = field(default_factory=dict)

    def __getitem__(self, section: str) -> dict:
        return self.sections[section]

    def get(self, section: str, key: str):
        return self.sections[section][key]


def _coerce(section: str, key: str, value, default):
    where = f"{section}.{key}"
    if isinstance(default, bool):
        if not isinstance(value, bool):
            raise ValueError(f"{where} must be a boolean, got {value!r}")
        return value
    if isinstance(default, int):
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ValueError(f"{where} must be a number, got {value!r}")
        if float(value) != int(value):
            raise ValueError(f"{where} must be an integer, got {value!r}")
        return int(value)
    if isinstance(default, float):
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ValueError(f"{where} must be a number, got {value!r}")
        return float(value)
    if isinstance(default, str):
        if not isinstance(value, str):
            raise ValueError(f"{where} must be a string, got {value!r}")
        return value
    if isinstance(default, list):
        if not isinstance(value, (list, tuple)):
            raise ValueError(f"{where} must be a list, got {value!r}")
        return [float(v) for v in value]
    raise TypeError(f"unhandled default type for {where}")


def build_config(file_data: dict | None = None, overrides: dict | None = None) -> RunConfig:
    """Merge defaults, file contents, and override pairs, validating keys and types."""
    sections = {name: dict(table) for name, table in DEFAULTS.items()}
    for source in (file_data or {}, overrides or {}):
        for section, table in source.items():
            if section not in sections:
                raise ValueError(f"unknown config section {section!r}")
            if not isinstance(table, dict):
                raise ValueError(f"config section {section!r} must be a table")
            for key, value in table.items():
                if key not in DEFAULTS[section]:
                    raise ValueError(f"unknown config key {section}.{key}")
                sections[section][key] = _coerce(section, key, value, DEFAULTS[section][key])
    return RunConfig(sections=sections)


def load_config(path: str | None = None, overrides: dict | None = None) -> RunConfig:
    file_data = None
    if path is not None:
        with open(path, "rb") as handle:
            file_data = tomllib.load(handle)
    return build_config(file_data, overrides)


def parse_override(text: str) -> tuple[str, str, object]:
    """Parse one --section.key=value argument into its parts.

    The value reads as an integer, then a float, then true/false, then a
    comma separated list of numbers, then a plain string.
    """
    if "=" not in text:
        raise ValueError(f"override {text!r} must look like section.key=value")
    target, raw = text.split("=", 1)
    if target.count(".") != 1:
        raise ValueError(f"override {text!r} must name section.key")
    section, key = target.split(".")
    return section, key, _parse_value(raw)


def _parse_value(raw: str):
    text = raw.strip()
    if text.lower() == "true":
        return True
    if text.lower() == "false":
        return False
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        pass
    if "," in text:
        try:
            return [float(part) for part in text.split(",")]
        except ValueError:
            pass
    return text


def collect_overrides(pairs: list[str]) -> dict:
    overrides: dict[str, dict] = {}
    for pair in pairs:
        section, key, value = parse_override(pair)
        overrides.setdefault(section, {})[key] = value
    return overrides
