"""Flat ``key = value`` experiment configs and named random streams.

Example::

    # dispersive sweep
    suite = kernel-sweep
    seed = 7
    N_list = 16, 32, 64
    tol.dispersive = 10

Lists are comma separated, optionally wrapped in brackets. Keys starting
with ``tol.`` override suite tolerances. Blank lines and ``#`` comments are
ignored.
"""

from __future__ import annotations

import json
import zlib
from dataclasses import dataclass, field

import numpy as np

SUITES = ("kernel-sweep", "minima", "pall-verify", "omega", "strichartz", "refocus")
LIST_KEYS = ("N_list", "T_list", "p_list")
SCALAR_KEYS = ("suite", "seed", "out", "t_max", "n_seeds")


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    suite: str
    seed: int = 0
    N_list: list[int] | None = None
    T_list: list[float] | None = None
    p_list: list[float] | None = None
    t_max: float | None = None
    n_seeds: int | None = None
    tolerances: dict[str, float] = field(default_factory=dict)
    out: str = "."

    def validate(self):
        if self.suite not in SUITES:
            raise ConfigError(f"unknown suite {self.suite!r}; expected one of {', '.join(SUITES)}")
        for name in LIST_KEYS:
            values = getattr(self, name)
            if values is not None and not values:
                raise ConfigError(f"{name} must not be empty")
        if self.N_list is not None and min(self.N_list) < 2:
            raise ConfigError("N values must be >= 2")
        if self.n_seeds is not None and self.n_seeds < 1:
            raise ConfigError("n_seeds must be >= 1")
        return self

    def to_dict(self) -> dict:
        return {
            "suite": self.suite,
            "seed": self.seed,
            "N_list": self.N_list,
            "T_list": self.T_list,
            "p_list": self.p_list,
            "t_max": self.t_max,
            "n_seeds": self.n_seeds,
            "tolerances": dict(sorted(self.tolerances.items())),
            "out": self.out,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        return cls(
            suite=d["suite"],
            seed=int(d.get("seed", 0)),
            N_list=d.get("N_list"),
            T_list=d.get("T_list"),
            p_list=d.get("p_list"),
            t_max=d.get("t_max"),
            n_seeds=d.get("n_seeds"),
            tolerances={k: float(v) for k, v in (d.get("tolerances") or {}).items()},
            out=d.get("out", "."),
        ).validate()


def _number(text: str, lineno: int, kind):
    try:
        return kind(text)
    except ValueError:
        raise ConfigError(f"line {lineno}: cannot read {text!r} as {kind.__name__}") from None


def _parse_list(raw: str, lineno: int, kind) -> list:
    raw = raw.strip()
    if raw.startswith("["):
        if not raw.endswith("]"):
            raise ConfigError(f"line {lineno}: unterminated list")
        raw = raw[1:-1]
    items = [s.strip() for s in raw.split(",")]
    if items == [""]:
        return []
    if any(s == "" for s in items):
        raise ConfigError(f"line {lineno}: empty list entry")
    return [_number(s, lineno, kind) for s in items]


def parse_config(text: str) -> ExperimentConfig:
    """Parse flat config text, or the JSON report of an earlier run."""
    if text.lstrip().startswith("{"):
        try:
            return ExperimentConfig.from_dict(json.loads(text)["config"])
        except (KeyError, json.JSONDecodeError) as exc:
            raise ConfigError(f"not a report document: {exc}") from None
    values: dict = {}
    tolerances: dict[str, float] = {}
    seen: dict[str, int] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value'")
        key, raw = (s.strip() for s in line.split("=", 1))
        if key in seen:
            raise ConfigError(f"line {lineno}: duplicate key {key!r} (first on line {seen[key]})")
        seen[key] = lineno
        if key.startswith("tol."):
            tolerances[key[4:]] = _number(raw, lineno, float)
        elif key == "N_list":
            values[key] = _parse_list(raw, lineno, int)
        elif key in ("T_list", "p_list"):
            values[key] = _parse_list(raw, lineno, float)
        elif key in ("seed", "n_seeds"):
            values[key] = _number(raw, lineno, int)
        elif key == "t_max":
            values[key] = _number(raw, lineno, float)
        elif key in ("suite", "out"):
            values[key] = raw
        else:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
    if "suite" not in values:
        raise ConfigError("missing required key 'suite'")
    try:
        return ExperimentConfig(tolerances=tolerances, **values).validate()
    except ConfigError as exc:
        key = next((k for k in seen if k in str(exc)), None)
        if key is not None:
            raise ConfigError(f"line {seen[key]}: {exc}") from None
        raise


def stream(seed: int, name: str) -> np.random.Generator:
    """Independent generator for a named component; adding names never shifts others."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(zlib.crc32(name.encode()),)))


def stream_seeds(seed: int, name: str, count: int) -> list[int]:
    """``count`` integer seeds drawn from the named stream."""
    return [int(s) for s in stream(seed, name).integers(0, 2**31 - 1, size=count)]
