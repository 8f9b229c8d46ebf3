"""Chromatic number: DSATUR upper bound, clique lower bound, exact search.

The exact solver tests k-colourability for k = lower, lower+1, ... .  Each
test first peels vertices of degree < k (they can always be coloured last),
then runs a DSATUR-ordered backtracking search on every component of what
is left, with a clique pre-coloured and new colours opened one at a time.
"""
import heapq
import sys
import time

from .budget import SolveBudget, SolveResult
from .clique import greedy_clique, maximum_clique


class _BudgetExhausted(Exception):
    pass


def dsatur_coloring(g):
    """Greedy DSATUR colouring (0-based colour per vertex, list indexed by vertex-1).

    Ties: saturation desc, then degree desc, then lower vertex index.
    """
    adj = g.adjacency
    n = g.n
    deg = [len(a) for a in adj]
    color = [-1] * n
    seen = [set() for _ in range(n)]
    heap = [(0, -deg[v], v) for v in range(n)]
    heapq.heapify(heap)
    while heap:
        negsat, _, v = heapq.heappop(heap)
        if color[v] >= 0 or -negsat != len(seen[v]):
            continue
        c = 0
        while c in seen[v]:
            c += 1
        color[v] = c
        for u in adj[v]:
            if color[u] < 0 and c not in seen[u]:
                seen[u].add(c)
                heapq.heappush(heap, (-len(seen[u]), -deg[u], u))
    return color


def chromatic_upper_greedy(g):
    if g.n == 0:
        return 0
    return max(dsatur_coloring(g)) + 1


def chromatic_lower_clique(g, budget=None):
    """Size of a clique found by bounded branch and bound (always <= chi)."""
    if g.n == 0:
        return 0
    res = maximum_clique(g, budget or SolveBudget(node_limit=10**6))
    return max(len(res.certificate), 1)


def is_proper_coloring(g, coloring):
    if len(coloring) != g.n:
        return False
    return all(coloring[a - 1] != coloring[b - 1] for a, b in g.edges)


class _Search:
    def __init__(self, budget):
        self.budget = budget
        self.nodes = 0
        self.t0 = time.perf_counter()

    def tick(self):
        self.nodes += 1
        if self.nodes > self.budget.node_limit:
            raise _BudgetExhausted
        if self.nodes % 1024 == 0 and time.perf_counter() - self.t0 > self.budget.time_limit:
            raise _BudgetExhausted


def _peel(adj, n, k):
    """Repeatedly drop vertices of degree < k. Returns (kernel set, removal order)."""
    alive = [True] * n
    deg = [len(a) for a in adj]
    stack = [v for v in range(n) if deg[v] < k]
    removed = []
    for v in stack:
        alive[v] = False
    while stack:
        v = stack.pop()
        removed.append(v)
        for u in adj[v]:
            if alive[u]:
                deg[u] -= 1
                if deg[u] < k:
                    alive[u] = False
                    stack.append(u)
    return {v for v in range(n) if alive[v]}, removed


def _components(adj, vertices):
    left = set(vertices)
    comps = []
    for s in sorted(vertices):
        if s not in left:
            continue
        left.discard(s)
        comp = [s]
        stack = [s]
        while stack:
            x = stack.pop()
            for y in adj[x]:
                if y in left:
                    left.discard(y)
                    comp.append(y)
                    stack.append(y)
        comps.append(sorted(comp))
    return comps


def _color_component(adj, comp, k, search, color):
    """Backtracking k-colouring of one kernel component; fills ``color`` or returns False."""
    cset = set(comp)
    local = {v: adj[v] & cset for v in comp}
    deg = {v: len(local[v]) for v in comp}
    # colour a greedy clique first: fixes the colour symmetry on it
    adjsub = local
    cand = set(comp)
    clique = []
    while cand:
        v = min(cand, key=lambda x: (-len(adjsub[x] & cand), x))
        clique.append(v)
        cand &= adjsub[v]
    if len(clique) > k:
        return False
    # nbcount[v][c]: coloured neighbours of v with colour c
    nbcount = {v: [0] * k for v in comp}
    sat = {v: 0 for v in comp}
    uncolored = set(comp)

    def assign(v, c):
        color[v] = c
        uncolored.discard(v)
        for u in local[v]:
            cnt = nbcount[u]
            if cnt[c] == 0:
                sat[u] += 1
            cnt[c] += 1

    def unassign(v, c):
        color[v] = -1
        uncolored.add(v)
        for u in local[v]:
            cnt = nbcount[u]
            cnt[c] -= 1
            if cnt[c] == 0:
                sat[u] -= 1

    for i, v in enumerate(clique):
        assign(v, i)
    top = len(clique)  # colours 0..top-1 are open

    def solve(top):
        if not uncolored:
            return True
        search.tick()
        v = min(uncolored, key=lambda x: (-sat[x], -deg[x], x))
        cnt = nbcount[v]
        for c in range(min(top + 1, k)):
            if cnt[c]:
                continue
            assign(v, c)
            if solve(max(top, c + 1)):
                return True
            unassign(v, c)
        return False

    return solve(top)


def k_colorable(g, k, budget=None, _search=None):
    """Decide k-colourability; returns a full colouring or None."""
    search = _search or _Search(budget or SolveBudget())
    n = g.n
    if n == 0:
        return []
    if k <= 0:
        return None
    adj = g.adjacency
    kernel, removed = _peel(adj, n, k)
    color = [-1] * n
    limit = sys.getrecursionlimit()
    sys.setrecursionlimit(max(limit, 4 * n + 1000))
    try:
        for comp in _components(adj, kernel):
            if not _color_component(adj, comp, k, search, color):
                return None
    finally:
        sys.setrecursionlimit(limit)
    # peeled vertices had < k neighbours left when removed: colour them in reverse
    for v in reversed(removed):
        used = {color[u] for u in adj[v] if color[u] >= 0}
        c = 0
        while c in used:
            c += 1
        color[v] = c
    return color


def chromatic_number_exact(g, budget=None):
    """Exact chromatic number within budget, else a certified bracket."""
    budget = budget or SolveBudget()
    t0 = time.perf_counter()
    if g.n == 0:
        return SolveResult("chromatic_number", 0, 0, "exact", 0, 0.0, [])
    search = _Search(budget)
    clique_res = maximum_clique(g, SolveBudget(node_limit=min(budget.node_limit, 10**6),
                                               time_limit=budget.time_limit))
    lower = max(len(clique_res.certificate), 1)
    coloring = dsatur_coloring(g)
    upper = max(coloring) + 1
    k = lower
    try:
        while k < upper:
            found = k_colorable(g, k, _search=search)
            if found is not None:
                coloring = found
                upper = k
                break
            k += 1
            lower = k
    except _BudgetExhausted:
        return SolveResult("chromatic_number", lower, upper, "lower_upper_only",
                           search.nodes + clique_res.nodes, time.perf_counter() - t0, coloring)
    return SolveResult("chromatic_number", upper, upper, "exact",
                       search.nodes + clique_res.nodes, time.perf_counter() - t0, coloring)


__all__ = [
    "chromatic_lower_clique", "chromatic_number_exact", "chromatic_upper_greedy",
    "dsatur_coloring", "greedy_clique", "is_proper_coloring", "k_colorable",
]
