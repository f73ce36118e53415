"""Pipeline configuration: one nested file, dotted-path overrides, a stable hash."""

from __future__ import annotations

import copy
import hashlib
import json
from pathlib import Path
from typing import Any, Mapping

import yaml

DEFAULTS: dict[str, Any] = {
    "seed": 0,
    "workers": 1,
    "corpus": {"paths": [], "window": 3},
    "selection": {"n1": 20, "n2": 20, "delta": 0},
    "labels": {"T": 0.15, "T_c": 0.9},
    "generation": {"n": 20, "max_length": 50},
    "metrics": {"local_window": 2, "eps": 1e-6},
    "homographic": {"wsd_margin": 0.05, "k": 10},
    "backends": {
        "lm": "mock",
        "prompt_copy": True,
        "embeddings": "hashed",
        "predictor": "mock",
        "wsd": "embedding",
        "reverse_dictionary": "wordnet",
    },
}

COUNTS = ("workers", "corpus.window", "selection.n1", "selection.n2", "generation.n", "generation.max_length",
          "metrics.local_window", "homographic.k")
UNIT_INTERVAL = ("labels.T", "labels.T_c", "homographic.wsd_margin")
CHOICES = {
    "backends.lm": ("mock", "ngram"),
    "backends.embeddings": ("hashed", "wordnet"),
    "backends.wsd": ("mock", "embedding"),
}


class ConfigError(ValueError):
    def __init__(self, problems: list[str]):
        self.problems = problems
        super().__init__("invalid configuration:\n  " + "\n  ".join(problems))


def flatten(d: Mapping[str, Any], prefix: str = "") -> dict[str, Any]:
    out = {}
    for k, v in d.items():
        key = f"{prefix}{k}"
        if isinstance(v, Mapping):
            out.update(flatten(v, key + "."))
        else:
            out[key] = v
    return out


def _coerce(value: Any, default: Any, key: str) -> Any:
    if not isinstance(value, str) or isinstance(default, str):
        return value
    if isinstance(default, bool):
        low = value.lower()
        if low in ("1", "true", "yes", "on"):
            return True
        if low in ("0", "false", "no", "off"):
            return False
        raise ConfigError([f"{key}: expected a boolean, got {value!r}"])
    if isinstance(default, int):
        try:
            return int(value)
        except ValueError:
            raise ConfigError([f"{key}: expected an integer, got {value!r}"]) from None
    if isinstance(default, float):
        try:
            return float(value)
        except ValueError:
            raise ConfigError([f"{key}: expected a number, got {value!r}"]) from None
    if isinstance(default, list):
        return [p for p in value.split(",") if p]
    return value


class PipelineConfig:
    def __init__(self, data: Mapping[str, Any] | None = None):
        self.data = copy.deepcopy(DEFAULTS)
        if data:
            self.update(flatten(data))

    def update(self, flat: Mapping[str, Any]) -> "PipelineConfig":
        known = flatten(DEFAULTS)
        problems = [f"{k}: unknown setting" for k in flat if k not in known]
        if problems:
            raise ConfigError(problems)
        for key, value in flat.items():
            node = self.data
            parts = key.split(".")
            for p in parts[:-1]:
                node = node[p]
            node[parts[-1]] = _coerce(value, known[key], key)
        return self

    def get(self, key: str) -> Any:
        node: Any = self.data
        for p in key.split("."):
            node = node[p]
        return node

    def __getitem__(self, key: str) -> Any:
        return self.get(key)

    def problems(self) -> list[str]:
        out = []
        flat = flatten(self.data)
        for key in COUNTS:
            v = flat[key]
            if isinstance(v, bool) or not isinstance(v, int) or v < 1:
                out.append(f"{key}: must be an integer >= 1, got {v!r}")
        for key in UNIT_INTERVAL:
            v = flat[key]
            if isinstance(v, bool) or not isinstance(v, (int, float)) or not 0.0 <= v <= 1.0:
                out.append(f"{key}: must be in [0, 1], got {v!r}")
        v = flat["selection.delta"]
        if isinstance(v, bool) or not isinstance(v, int) or v < 0:
            out.append(f"selection.delta: must be an integer >= 0, got {v!r}")
        v = flat["seed"]
        if isinstance(v, bool) or not isinstance(v, int) or v < 0:
            out.append(f"seed: must be an integer >= 0, got {v!r}")
        v = flat["metrics.eps"]
        if not isinstance(v, (int, float)) or v <= 0:
            out.append(f"metrics.eps: must be > 0, got {v!r}")
        for key, allowed in CHOICES.items():
            if flat[key] not in allowed:
                out.append(f"{key}: must be one of {', '.join(allowed)}, got {flat[key]!r}")
        if not isinstance(flat["corpus.paths"], list):
            out.append("corpus.paths: must be a list of paths")
        return out

    def validate(self) -> "PipelineConfig":
        problems = self.problems()
        if problems:
            raise ConfigError(problems)
        return self

    def to_dict(self) -> dict:
        return copy.deepcopy(self.data)

    def hash(self) -> str:
        blob = json.dumps(self.data, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()[:16]

    @classmethod
    def load(cls, path: str | Path | None) -> "PipelineConfig":
        if path is None:
            return cls()
        path = Path(path)
        text = path.read_text(encoding="utf-8")
        try:
            data = json.loads(text) if path.suffix == ".json" else yaml.safe_load(text)
        except (json.JSONDecodeError, yaml.YAMLError) as e:
            raise ConfigError([f"{path}: cannot parse ({e})"]) from None
        if data is None:
            data = {}
        if not isinstance(data, Mapping):
            raise ConfigError([f"{path}: top level must be a mapping"])
        return cls(data)
