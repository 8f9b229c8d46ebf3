"""gamma-quasi-clique number: the largest Q with e(G[Q]) >= gamma * C(|Q|, 2).

Feasibility is hereditary in the size: dropping a vertex of minimum internal
degree from a feasible set of size s leaves a feasible set of size s - 1.
So the exact solver scans s upward from a greedy lower bound and stops at
the first size with no feasible set.
"""
import time

from .budget import SolveBudget, SolveResult
from .clique import maximum_clique


class _BudgetExhausted(Exception):
    pass


def threshold(gamma, s):
    """Real-valued edge requirement gamma * s (s - 1) / 2 (no rounding)."""
    return gamma * s * (s - 1) / 2.0


def induced_edge_count(g, members):
    adj = g.adjacency
    idx = [v - 1 for v in members]
    sset = set(idx)
    return sum(len(adj[v] & sset) for v in idx) // 2


def is_quasi_clique(g, members, gamma):
    members = list(members)
    return induced_edge_count(g, members) >= threshold(gamma, len(members))


def greedy_quasi_clique(g, gamma):
    """Min-degree peeling; returns the largest feasible prefix it meets (1-based)."""
    adj = g.adjacency
    alive = set(range(g.n))
    deg = {v: len(adj[v]) for v in alive}
    edges = g.m
    while alive:
        s = len(alive)
        if edges >= threshold(gamma, s):
            return sorted(v + 1 for v in alive)
        v = min(alive, key=lambda x: (deg[x], x))
        alive.discard(v)
        edges -= deg[v]
        for u in adj[v]:
            if u in alive:
                deg[u] -= 1
    return []


def _size_upper_bound(degs, gamma, s):
    """Necessary condition: the s largest min(deg, s-1) must sum to >= gamma s (s-1)."""
    top = sorted((min(d, s - 1) for d in degs), reverse=True)[:s]
    return len(top) == s and sum(top) >= gamma * s * (s - 1)


class _Feasible:
    """Branch and bound for 'is there a gamma-quasi-clique of size exactly s'."""

    def __init__(self, g, gamma, budget):
        self.n = g.n
        self.gamma = gamma
        self.budget = budget
        self.nodes = 0
        self.t0 = time.perf_counter()
        deg = [len(a) for a in g.adjacency]
        # branch on high-degree vertices first
        self.order = sorted(range(g.n), key=lambda v: (-deg[v], v))
        pos = {v: i for i, v in enumerate(self.order)}
        self.nbr = [0] * g.n
        for v in range(g.n):
            bits = 0
            for u in g.adjacency[v]:
                bits |= 1 << pos[u]
            self.nbr[pos[v]] = bits

    def tick(self):
        self.nodes += 1
        if self.nodes > self.budget.node_limit:
            raise _BudgetExhausted
        if self.nodes % 1024 == 0 and time.perf_counter() - self.t0 > self.budget.time_limit:
            raise _BudgetExhausted

    def find(self, s):
        need = threshold(self.gamma, s)
        full = (1 << self.n) - 1
        found = self._dfs(0, 0, 0, full, s, need)
        if found is None:
            return None
        return sorted(self.order[p] + 1 for p in _members(found))

    def _dfs(self, P, size, edges, C, s, need):
        self.tick()
        t = s - size
        if t == 0:
            return P if edges >= need else None
        if C.bit_count() < t:
            return None
        # optimistic gain of each candidate: its edges into P, plus half of
        # at most t-1 edges inside the chosen remainder
        gains = []
        rest = C
        while rest:
            low = rest & -rest
            v = low.bit_length() - 1
            rest ^= low
            nb = self.nbr[v]
            gains.append(((nb & P).bit_count() + min(t - 1, (nb & C).bit_count()) / 2.0, v))
        gains.sort(key=lambda x: -x[0])
        if edges + sum(x[0] for x in gains[:t]) < need:
            return None
        # candidates in fixed order; each branch excludes the ones before it
        rest = C
        while rest:
            if rest.bit_count() < t:
                return None
            low = rest & -rest
            v = low.bit_length() - 1
            rest ^= low
            nb = self.nbr[v]
            hit = self._dfs(P | low, size + 1, edges + (nb & P).bit_count(), rest, s, need)
            if hit is not None:
                return hit
        return None


def _members(bits):
    out = []
    while bits:
        low = bits & -bits
        out.append(low.bit_length() - 1)
        bits ^= low
    return out


def quasi_clique_number_exact(g, gamma, budget=None):
    """Exact omega^gamma within budget; gamma == 1 delegates to maximum clique."""
    if not 0.0 < gamma <= 1.0:
        raise ValueError("gamma must lie in (0, 1]")
    if g.n < 1:
        raise ValueError("graph must have at least one vertex")
    budget = budget or SolveBudget()
    if gamma == 1.0:
        res = maximum_clique(g, budget)
        res.property = "quasi_clique_number"
        return res
    t0 = time.perf_counter()
    witness = greedy_quasi_clique(g, gamma)
    best = len(witness)
    degs = [len(a) for a in g.adjacency]
    search = _Feasible(g, gamma, budget)
    s = best + 1
    try:
        while s <= g.n and _size_upper_bound(degs, gamma, s):
            hit = search.find(s)
            if hit is None:
                break
            witness, best = hit, s
            s += 1
    except _BudgetExhausted:
        upper = s
        while upper + 1 <= g.n and _size_upper_bound(degs, gamma, upper + 1):
            upper += 1
        return SolveResult("quasi_clique_number", best, upper, "lower_upper_only",
                           search.nodes, time.perf_counter() - t0, witness)
    return SolveResult("quasi_clique_number", best, best, "exact", search.nodes,
                       time.perf_counter() - t0, witness)
