"""Search budgets and solver result records."""
from dataclasses import dataclass, field
import math


@dataclass(frozen=True)
class SolveBudget:
    node_limit: int = 10**9
    time_limit: float = math.inf

    def __post_init__(self):
        if not self.node_limit > 0 or not self.time_limit > 0:
            raise ValueError("budget limits must be positive")


@dataclass
class SolveResult:
    """Outcome of one exact solve.

    ``lower == upper == value`` when ``outcome == "exact"``; otherwise the
    certified bracket.  The certificate is a colouring (list of colours
    indexed by vertex) or a witness vertex set (1-based).
    """

    property: str
    lower: int
    upper: int
    outcome: str
    nodes: int
    wall_time: float
    certificate: list = field(default_factory=list)

    @property
    def exact(self):
        return self.outcome == "exact"

    @property
    def value(self):
        return self.lower if self.exact else None

    def record(self, with_time=False):
        rec = {
            "property": self.property,
            "outcome": self.outcome,
            "nodes": self.nodes,
            "certificate": list(self.certificate),
        }
        if self.exact:
            rec["value"] = self.lower
        else:
            rec["bracket"] = [self.lower, self.upper]
        if with_time:
            rec["wall_time"] = self.wall_time
        return rec
