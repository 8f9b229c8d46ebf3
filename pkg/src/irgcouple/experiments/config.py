"""Experiment configuration: YAML or JSON files plus ``key=value`` overrides."""
from dataclasses import asdict, dataclass, field, fields
import hashlib
import json
import os

import yaml

from ..serialize import canonical_json


class ConfigError(ValueError):
    pass


KINDS = (
    "coupling_validation",
    "chromatic_window",
    "quasi_clique_window",
    "concentration",
    "assumption_suite",
    "counterexample",
)


@dataclass
class ExperimentConfig:
    kind: str
    seed: int
    n: list
    trials: int = 1
    kernel: dict = None
    scaling: object = field(default_factory=lambda: {"rule": "constant", "C": 1.0})
    rate: object = field(default_factory=lambda: {"form": "inverse_log"})
    gamma: float = None
    epsilon: float = 0.35
    refined_epsilon: float = None
    coverage_window: str = "refined"
    coverage_threshold: float = None
    m: float = None
    t_values: list = field(default_factory=list)
    node_limit: int = 10**8
    time_limit: float = None
    solve_coupled: bool = True
    additions: object = "all"
    suite_gammas: list = field(default_factory=lambda: [0.5, 0.75, 1.0])
    ratio_n: list = field(default_factory=lambda: [10**3, 10**4, 10**6, 10**9])
    workers: int = 1
    output: str = None

    def validate(self):
        if self.kind not in KINDS:
            raise ConfigError(f"unknown experiment kind {self.kind!r}; expected one of {KINDS}")
        if self.seed is None or isinstance(self.seed, bool) or not isinstance(self.seed, int):
            raise ConfigError("an integer seed is required (no wall-clock default)")
        if not isinstance(self.n, list) or not self.n or not all(isinstance(x, int) and x > 0 for x in self.n):
            raise ConfigError("n must be a non-empty list of positive integers")
        if any(b <= a for a, b in zip(self.n, self.n[1:])):
            raise ConfigError("n values must be strictly ascending")
        if not isinstance(self.trials, int) or self.trials < 1:
            raise ConfigError("trials must be >= 1")
        if self.kind in ("coupling_validation", "chromatic_window", "quasi_clique_window") and not self.kernel:
            raise ConfigError(f"{self.kind} needs a kernel")
        if self.kind == "quasi_clique_window" and self.gamma is None:
            raise ConfigError("quasi_clique_window needs gamma")
        if self.coverage_window not in ("coarse", "refined"):
            raise ConfigError("coverage_window must be 'coarse' or 'refined'")
        if self.coverage_threshold is not None and not 0.0 <= self.coverage_threshold <= 1.0:
            raise ConfigError("coverage_threshold must lie in [0, 1]")
        if not isinstance(self.workers, int) or self.workers < 1:
            raise ConfigError("workers must be >= 1")
        if self.additions != "all" and not (isinstance(self.additions, int) and self.additions >= 1):
            raise ConfigError("additions must be 'all' or a positive integer")
        if self.node_limit is None or self.node_limit < 1:
            raise ConfigError("node_limit must be positive")
        return self

    def to_dict(self):
        """Everything that determines the results (``workers`` and ``output`` do not)."""
        d = asdict(self)
        d.pop("workers")
        d.pop("output")
        return d

    def config_hash(self):
        return hashlib.sha256(canonical_json(self.to_dict()).encode()).hexdigest()


def _coerce_value(text):
    try:
        return yaml.safe_load(text)
    except yaml.YAMLError:
        return text


def apply_overrides(raw, overrides):
    """``key=value`` pairs, dotted keys reach into nested mappings."""
    for item in overrides or ():
        if "=" not in item:
            raise ConfigError(f"override {item!r} is not key=value")
        key, val = item.split("=", 1)
        parts = key.strip().split(".")
        node = raw
        for p in parts[:-1]:
            node = node.setdefault(p, {})
            if not isinstance(node, dict):
                raise ConfigError(f"cannot descend into {p!r}")
        node[parts[-1]] = _coerce_value(val)
    return raw


def config_from_dict(raw):
    names = {f.name for f in fields(ExperimentConfig)}
    unknown = set(raw) - names
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    missing = {"kind", "seed", "n"} - set(raw)
    if missing:
        raise ConfigError(f"missing config keys: {sorted(missing)}")
    raw = dict(raw)
    if isinstance(raw.get("n"), int):
        raw["n"] = [raw["n"]]
    if isinstance(raw.get("ratio_n"), list):
        raw["ratio_n"] = [int(float(x)) for x in raw["ratio_n"]]
    try:
        cfg = ExperimentConfig(**raw)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc
    return cfg.validate()


def load_config(path, overrides=()):
    if not os.path.exists(path):
        raise ConfigError(f"config file {path} not found")
    with open(path) as fh:
        text = fh.read()
    try:
        raw = json.loads(text) if path.endswith(".json") else yaml.safe_load(text)
    except (json.JSONDecodeError, yaml.YAMLError) as exc:
        raise ConfigError(f"cannot parse {path}: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError("config must be a mapping")
    return config_from_dict(apply_overrides(raw, overrides))
