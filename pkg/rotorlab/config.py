"""Run configuration: TOML files, ``--set`` overrides and parameter schemas.

A config file looks like::

    experiment = "qkr-localization"
    seed = 0
    out = "runs/qkr"

    [params]
    k = 20.0
    T = 0.25
"""

import json
import logging
import os

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from rotorlab.errors import ConfigError

logger = logging.getLogger(__name__)

THREADS_ENV = "ROTORLAB_THREADS"
TYPES = {
    "int": int,
    "float": float,
    "bool": bool,
    "str": str,
    "floats": list,
}


@dataclass(frozen=True)
class Param:
    name: str
    type: str
    default: Any
    help: str = ""

    def coerce(self, value):
        """Check ``value`` against the declared type; ints are accepted where floats are expected."""
        if self.type == "float" and isinstance(value, int) and not isinstance(value, bool):
            return float(value)
        if self.type == "floats":
            if isinstance(value, (int, float)) and not isinstance(value, bool):
                value = [value]
            if not isinstance(value, list) or not all(
                    isinstance(v, (int, float)) and not isinstance(v, bool) for v in value):
                raise ConfigError(f"{self.name} must be a list of numbers, got {value!r}", key=self.name)
            return [float(v) for v in value]
        expected = TYPES[self.type]
        if isinstance(value, bool) and expected is not bool:
            raise ConfigError(f"{self.name} must be {self.type}, got {value!r}", key=self.name)
        if not isinstance(value, expected):
            raise ConfigError(f"{self.name} must be {self.type}, got {value!r}", key=self.name)
        return value


@dataclass
class RunConfig:
    experiment: str
    params: dict = field(default_factory=dict)
    seed: int = 0
    out: str = "runs"

    def to_dict(self):
        return {"experiment": self.experiment, "params": dict(self.params), "seed": self.seed, "out": self.out}

    @classmethod
    def from_dict(cls, data):
        unknown = set(data) - {"experiment", "params", "seed", "out"}
        if unknown:
            raise ConfigError(f"unknown top-level keys {sorted(unknown)}", keys=sorted(unknown))
        if "experiment" not in data:
            raise ConfigError("config has no experiment id", key="experiment")
        seed = data.get("seed", 0)
        if not isinstance(seed, int) or isinstance(seed, bool):
            raise ConfigError(f"seed must be an integer, got {seed!r}", key="seed")
        params = data.get("params", {})
        if not isinstance(params, dict):
            raise ConfigError("[params] must be a table", key="params")
        return cls(str(data["experiment"]), dict(params), seed, str(data.get("out", "runs")))

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))

    def with_param(self, key, value, out=None):
        params = dict(self.params)
        params[key] = value
        return RunConfig(self.experiment, params, self.seed, self.out if out is None else out)


def parse_value(text):
    """A TOML scalar or array; anything that does not parse stays a string."""
    try:
        return tomllib.loads(f"value = {text}")["value"]
    except tomllib.TOMLDecodeError:
        return text


def parse_override(item):
    key, sep, value = item.partition("=")
    if not sep or not key.strip():
        raise ConfigError(f"override {item!r} is not key=value", override=item)
    return key.strip(), parse_value(value.strip())


def load_config(path, overrides=(), seed=None, out=None):
    """Read a TOML run config and apply ``key=value`` overrides to its params."""
    path = Path(path)
    try:
        with path.open("rb") as handle:
            data = tomllib.load(handle)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}", path=str(path))
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}", path=str(path))

    config = RunConfig.from_dict(data)
    for item in overrides:
        key, value = parse_override(item)
        config.params[key] = value
    if seed is not None:
        config.seed = int(seed)
    if out is not None:
        config.out = str(out)
    logger.debug("loaded %s with %d params", path, len(config.params))
    return config


def validate_params(schema, params):
    """Fill defaults and type-check ``params`` against ``schema``; unknown keys are rejected."""
    declared = {p.name: p for p in schema}
    unknown = sorted(set(params) - set(declared))
    if unknown:
        raise ConfigError(f"unknown parameters {unknown}; expected some of {sorted(declared)}", keys=unknown)
    resolved = {}
    for name, param in declared.items():
        resolved[name] = param.coerce(params[name]) if name in params else param.default
    return resolved


def thread_limit():
    """Worker cap from ``ROTORLAB_THREADS``, or None when unset."""
    raw = os.environ.get(THREADS_ENV)
    if raw is None or raw.strip() == "":
        return None
    try:
        value = int(raw)
    except ValueError:
        raise ConfigError(f"{THREADS_ENV} must be a positive integer, got {raw!r}", env=THREADS_ENV)
    if value < 1:
        raise ConfigError(f"{THREADS_ENV} must be a positive integer, got {raw!r}", env=THREADS_ENV)
    return value
