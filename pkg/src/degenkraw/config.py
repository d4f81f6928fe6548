"""Run configuration: JSON file plus command-line overrides.

The file carries the model parameters as exact fraction strings, e.g.

    {"lambda": "-1/2", "beta": "2", "p": "3/5", "r": "3",
     "n_max": 10, "series_order": 16, "precision_digits": 60,
     "seed": 42, "output_format": "json"}

q is derived as 1 - p.  Flags override file values field by field.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from fractions import Fraction

from .measure import Params
from .series import as_fraction


class ConfigError(ValueError):
    """Invalid configuration file or flag combination."""


_DEFAULTS = {
    "lambda": "-1/2",
    "beta": "2",
    "p": "3/5",
    "r": "3",
    "n_max": 10,
    "series_order": 16,
    "precision_digits": 60,
    "seed": 42,
    "output_format": "json",
}

_KNOWN_KEYS = set(_DEFAULTS)


@dataclass(frozen=True)
class Config:
    params: Params
    n_max: int = 10
    series_order: int = 16
    precision_digits: int = 60
    seed: int = 42
    output_format: str = "json"

    def __post_init__(self):
        if self.series_order < self.n_max + 2:
            raise ConfigError("series_order must be at least n_max + 2")
        if self.precision_digits < 40:
            raise ConfigError("precision_digits must be at least 40")
        if self.output_format not in ("csv", "json"):
            raise ConfigError("output_format must be 'csv' or 'json'")
        if self.n_max < 0 or self.seed < 0:
            raise ConfigError("n_max and seed must be nonnegative")

    def as_dict(self) -> dict:
        return {
            "lambda": str(self.params.lam),
            "beta": str(self.params.beta),
            "p": str(self.params.p),
            "r": str(self.params.r),
            "n_max": self.n_max,
            "series_order": self.series_order,
            "precision_digits": self.precision_digits,
            "seed": self.seed,
            "output_format": self.output_format,
        }


def _parse_fraction(raw, key: str) -> Fraction:
    try:
        return as_fraction(raw)
    except (ValueError, TypeError, ZeroDivisionError) as exc:
        raise ConfigError(f"field {key!r}: cannot parse {raw!r} as a rational") from exc


def config_from_dict(data: dict) -> Config:
    unknown = set(data) - _KNOWN_KEYS
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    merged = {**_DEFAULTS, **data}
    try:
        params = Params.make(
            _parse_fraction(merged["lambda"], "lambda"),
            _parse_fraction(merged["beta"], "beta"),
            _parse_fraction(merged["p"], "p"),
            _parse_fraction(merged["r"], "r"),
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    try:
        return Config(
            params=params,
            n_max=int(merged["n_max"]),
            series_order=int(merged["series_order"]),
            precision_digits=int(merged["precision_digits"]),
            seed=int(merged["seed"]),
            output_format=str(merged["output_format"]),
        )
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(str(exc)) from exc


def load_config(path: str | None = None, overrides: dict | None = None) -> Config:
    """Read the JSON config (optional) and apply flag overrides (optional)."""
    data: dict = {}
    if path is not None:
        try:
            with open(path, "r", encoding="utf-8") as fh:
                data = json.load(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read config file {path}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config file {path} is not valid JSON: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError("config file must hold a JSON object")
    cfg = config_from_dict(data)
    if overrides:
        model_keys = {"lambda", "beta", "p", "r"}
        if model_keys & set(overrides):
            merged = cfg.as_dict()
            merged.update({k: v for k, v in overrides.items() if k in model_keys})
            cfg = config_from_dict(merged)
        simple = {k: v for k, v in overrides.items() if k not in model_keys}
        if simple:
            try:
                cfg = replace(cfg, **simple)
            except TypeError as exc:
                raise ConfigError(str(exc)) from exc
    return cfg
