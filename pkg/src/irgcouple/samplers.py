"""Seeded samplers for ER graphs, IRGs and the coupled triple (G', G, G'').

All three graphs of a triple are thresholds of the *same* uniforms:

    middle  U_ij <= k(W_i, W_j) / lambda_n
    upper   U_ij <= p_max
    lower   W_i, W_j in R_n  and  U_ij <= p_inf

so ``lower ≼ middle ≼ upper`` holds for every sample, not just typically.
"""
from dataclasses import dataclass, field
from functools import lru_cache
import json
import math
import os

import numpy as np

from .graph import Graph, induced_subgraph, read_edge_list, write_edge_list
from .kernels import (ProbabilityExceedsOne, Region, p_inf_over_region, p_max)
from .rng import UniformStream
from .serialize import canonical_json


class CouplingError(RuntimeError):
    """A threshold ordering needed for the sandwich does not hold."""


# -- rate functions --------------------------------------------------------------

@dataclass(frozen=True)
class RateFunction:
    """Half-width r(n) of the heavy-weight window R_n around the kernel maximizer."""

    form: str = "inverse_log"
    alpha: float = 1.0
    table: tuple = field(default=())

    def __post_init__(self):
        if self.form not in ("inverse_log", "inverse_log_power", "table"):
            raise ValueError(f"unknown rate form {self.form!r}")

    @classmethod
    def from_table(cls, mapping):
        return cls("table", table=tuple(sorted((int(k), float(v)) for k, v in mapping.items())))

    def __call__(self, n):
        if self.form == "table":
            lookup = dict(self.table)
            if n not in lookup:
                raise KeyError(f"rate table has no entry for n={n}")
            r = lookup[n]
        else:
            if n < 2:
                raise ValueError("r(n) = 1/log(n)^a needs n >= 2")
            r = 1.0 / math.log(n) ** (self.alpha if self.form == "inverse_log_power" else 1.0)
        if not r > 0:
            raise ValueError(f"r({n}) = {r} must be positive")
        return r

    def describe(self):
        if self.form == "table":
            return {"form": "table", "table": {str(k): v for k, v in self.table}}
        if self.form == "inverse_log_power":
            return {"form": self.form, "alpha": self.alpha}
        return {"form": self.form}


def rate_from_config(spec):
    if spec is None or spec == "inverse_log":
        return RateFunction()
    if isinstance(spec, (int, float)):
        raise ValueError("a bare number is ambiguous for r(n); use a table")
    form = spec.get("form", "inverse_log")
    if form == "table":
        return RateFunction.from_table(spec["table"])
    return RateFunction(form, float(spec.get("alpha", 1.0)))


def rate_diagnostics(r, ns):
    """Checks that r(n) decreases and n r(n) increases over the simulated n."""
    ns = sorted(ns)
    rs = [r(n) for n in ns]
    nrs = [n * x for n, x in zip(ns, rs)]
    return {
        "n": ns,
        "r": rs,
        "n_r": nrs,
        "r_decreasing": all(b <= a for a, b in zip(rs, rs[1:])),
        "n_r_increasing": all(b >= a for a, b in zip(nrs, nrs[1:])),
    }


# -- samplers --------------------------------------------------------------------

@lru_cache(maxsize=16)
def _pairs(n):
    iu, ju = np.triu_indices(n, 1)
    iu = iu.astype(np.int64)
    ju = ju.astype(np.int64)
    iu.flags.writeable = False
    ju.flags.writeable = False
    return iu, ju


def _graph_from_mask(n, mask):
    iu, ju = _pairs(n)
    return Graph(n, iu[mask], ju[mask])


def sample_er(n, p, stream, backend=None):
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p={p} outside [0, 1]")
    u = stream.pair_uniforms(n, backend)
    return _graph_from_mask(n, u <= p)


def _pair_probabilities(n, k, lam, weights):
    iu, ju = _pairs(n)
    probs = k(weights[iu], weights[ju]) / lam(n)
    if probs.size and probs.max() > 1.0:
        raise ProbabilityExceedsOne(f"k/lambda_n reaches {probs.max()} at n={n}")
    return probs


def sample_irg(n, k, lam, stream, backend=None):
    """Returns (graph, weights)."""
    p_max(k, lam, n)  # range check through the declared maximum
    w = stream.weights(n, backend)
    u = stream.pair_uniforms(n, backend)
    probs = _pair_probabilities(n, k, lam, w)
    return _graph_from_mask(n, u <= probs), w


@dataclass(frozen=True, eq=False)
class CoupledTriple:
    lower: Graph
    middle: Graph
    upper: Graph
    weights: np.ndarray
    heavy_set: tuple
    region: Region
    p_inf: float
    p_max: float
    seed: int
    trial: int = 0
    r: float = math.nan
    kernel: dict = field(default_factory=dict)
    scaling: dict = field(default_factory=dict)

    @property
    def n(self):
        return self.middle.n

    def metadata(self):
        return {
            "seed": int(self.seed),
            "trial": int(self.trial),
            "n": self.n,
            "kernel": self.kernel,
            "scaling": self.scaling,
            "r": self.r,
            "region": [self.region.lo, self.region.hi],
            "region_clipped": self.region.clipped,
            "p_inf": self.p_inf,
            "p_max": self.p_max,
            "heavy_set": list(self.heavy_set),
        }


def sample_coupled_triple(n, k, lam, r, stream, backend=None):
    rn = r(n) if callable(r) else float(r)
    if not rn > 0:
        raise ValueError("r(n) must be positive")
    pmax = p_max(k, lam, n)
    region = Region.around(k.m, rn)
    pinf = p_inf_over_region(k, region, lam, n)

    w = stream.weights(n, backend)
    u = stream.pair_uniforms(n, backend)
    probs = _pair_probabilities(n, k, lam, w)
    iu, ju = _pairs(n)
    heavy = region.contains(w)
    in_s = heavy[iu] & heavy[ju]

    # both orderings are guaranteed analytically; a failure means the kernel's
    # declared maximum or the infimum estimate is wrong, so fail loudly
    if probs.size and probs.max() > pmax:
        raise CouplingError(f"k/lambda exceeds p_max={pmax}: declared maximum is wrong")
    if np.any(probs[in_s] < pinf):
        raise CouplingError(f"p_inf={pinf} is above k/lambda on R_n^2: infimum estimate too high")

    middle = _graph_from_mask(n, u <= probs)
    upper = _graph_from_mask(n, u <= pmax)
    lower = _graph_from_mask(n, in_s & (u <= pinf))
    heavy_set = tuple((np.flatnonzero(heavy) + 1).tolist())
    return CoupledTriple(lower, middle, upper, w, heavy_set, region, pinf, pmax,
                         int(stream.seed), int(stream.trial), rn,
                         k.describe(), lam.describe() if hasattr(lam, "describe") else {})


def lower_bound_core(t):
    """The lower graph restricted to V' (conditionally ER(|V'|, p_inf))."""
    return induced_subgraph(t.lower, t.heavy_set)


def expected_heavy_count(n, r, m):
    """E|V'| = n * length(R_n); equals 2 n r(n) for an unclipped window."""
    rn = r(n) if callable(r) else float(r)
    return n * Region.around(m, rn).length


# -- serialization -----------------------------------------------------------------

def format_weights(weights):
    return "".join(format(float(x), ".17g") + "\n" for x in weights)


def save_triple(t, path):
    os.makedirs(path, exist_ok=True)
    write_edge_list(t.lower, os.path.join(path, "lower.el"))
    write_edge_list(t.middle, os.path.join(path, "middle.el"))
    write_edge_list(t.upper, os.path.join(path, "upper.el"))
    with open(os.path.join(path, "weights.txt"), "w", newline="\n") as fh:
        fh.write(format_weights(t.weights))
    with open(os.path.join(path, "metadata.json"), "w", newline="\n") as fh:
        fh.write(canonical_json(t.metadata()))


def load_triple(path):
    with open(os.path.join(path, "metadata.json")) as fh:
        meta = json.load(fh)
    with open(os.path.join(path, "weights.txt")) as fh:
        weights = np.array([float(x) for x in fh.read().split()], dtype=np.float64)
    lo, hi = meta["region"]
    return CoupledTriple(
        lower=read_edge_list(os.path.join(path, "lower.el")),
        middle=read_edge_list(os.path.join(path, "middle.el")),
        upper=read_edge_list(os.path.join(path, "upper.el")),
        weights=weights,
        heavy_set=tuple(meta["heavy_set"]),
        region=Region(lo, hi, meta.get("region_clipped", False)),
        p_inf=meta["p_inf"],
        p_max=meta["p_max"],
        seed=meta["seed"],
        trial=meta.get("trial", 0),
        r=meta["r"],
        kernel=meta["kernel"],
        scaling=meta.get("scaling", {}),
    )


__all__ = [
    "CoupledTriple", "CouplingError", "RateFunction", "UniformStream",
    "expected_heavy_count", "load_triple", "lower_bound_core", "rate_diagnostics",
    "rate_from_config", "sample_coupled_triple", "sample_er", "sample_irg", "save_triple",
]
