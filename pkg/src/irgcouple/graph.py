"""Undirected simple graphs on the vertex set [n] = {1, ..., n}.

Vertex labels are 1-based everywhere in the public API and in files.
Internally edges are kept as two parallel 0-based arrays ``u < v`` sorted
lexicographically, plus a lazily built CSR neighbour structure.
"""
from collections import deque
from functools import cached_property
import io
import os

import numpy as np


class GraphError(ValueError):
    pass


class OutOfRangeVertex(GraphError):
    pass


class SelfLoop(GraphError):
    pass


class EmptyAverage(GraphError):
    """No pair of distinct vertices shares a connected component."""


class Graph:
    """Immutable undirected simple graph.

    Build through :func:`new_graph` (validating) or :meth:`Graph.from_pairs`
    (0-based, trusted input from the samplers).
    """

    def __init__(self, n, u, v):
        self.n = int(n)
        u = np.ascontiguousarray(u, dtype=np.int64)
        v = np.ascontiguousarray(v, dtype=np.int64)
        u.flags.writeable = False
        v.flags.writeable = False
        self._u = u
        self._v = v

    @classmethod
    def from_pairs(cls, n, u, v, normalized=False):
        """0-based endpoints; ``normalized`` skips ordering/dedup when the caller
        already guarantees ``u < v`` in lexicographic order without repeats."""
        u = np.asarray(u, dtype=np.int64)
        v = np.asarray(v, dtype=np.int64)
        if not normalized:
            lo = np.minimum(u, v)
            hi = np.maximum(u, v)
            keys = np.unique(lo * max(n, 1) + hi)
            u = keys // max(n, 1)
            v = keys % max(n, 1)
        return cls(n, u, v)

    # -- basic views ------------------------------------------------------

    @property
    def m(self):
        return int(self._u.size)

    @property
    def edge_array(self):
        """(m, 2) array of 1-based edges, ``i < j``, lexicographic."""
        return np.stack([self._u + 1, self._v + 1], axis=1)

    @property
    def edges(self):
        return [(int(a) + 1, int(b) + 1) for a, b in zip(self._u, self._v)]

    def edge_set(self):
        return set(self.edges)

    @cached_property
    def keys(self):
        """Sorted int64 codes ``u * n + v`` (0-based), for fast subset tests."""
        k = self._u * self.n + self._v
        k.flags.writeable = False
        return k

    @cached_property
    def csr(self):
        """(indptr, indices) with 0-based, ascending neighbour lists."""
        n = self.n
        src = np.concatenate([self._u, self._v])
        dst = np.concatenate([self._v, self._u])
        order = np.lexsort((dst, src))
        indices = dst[order]
        counts = np.bincount(src, minlength=n) if n else np.zeros(0, np.int64)
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(counts, out=indptr[1:])
        return indptr, indices

    @cached_property
    def adjacency(self):
        """List of Python sets of 0-based neighbours (for the search codes)."""
        indptr, indices = self.csr
        return [set(indices[indptr[i]:indptr[i + 1]].tolist()) for i in range(self.n)]

    def neighbors(self, i):
        """1-based neighbours of 1-based vertex ``i``."""
        _check_vertex(i, self.n)
        indptr, indices = self.csr
        return [int(x) + 1 for x in indices[indptr[i - 1]:indptr[i]]]

    def has_edge(self, i, j):
        if i == j:
            return False
        a, b = min(i, j) - 1, max(i, j) - 1
        key = a * self.n + b
        pos = np.searchsorted(self.keys, key)
        return bool(pos < self.keys.size and self.keys[pos] == key)

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return self.n == other.n and np.array_equal(self.keys, other.keys)

    def __hash__(self):
        return hash((self.n, self.keys.tobytes()))

    def __repr__(self):
        return f"Graph(n={self.n}, m={self.m})"


def _check_vertex(i, n):
    if not 1 <= i <= n:
        raise OutOfRangeVertex(f"vertex {i} outside [1, {n}]")


def new_graph(n, edges=()):
    """Validated construction from 1-based pairs; duplicates and order are normalized."""
    if n < 0:
        raise GraphError("vertex count must be non-negative")
    us, vs = [], []
    for i, j in edges:
        i, j = int(i), int(j)
        _check_vertex(i, n)
        _check_vertex(j, n)
        if i == j:
            raise SelfLoop(f"self-loop at vertex {i}")
        us.append(i - 1)
        vs.append(j - 1)
    return Graph.from_pairs(n, us, vs)


def empty_graph(n):
    return Graph(n, np.zeros(0, np.int64), np.zeros(0, np.int64))


def complete_graph(n):
    u, v = np.triu_indices(n, 1)
    return Graph(n, u, v)


def path_graph(n):
    return new_graph(n, [(i, i + 1) for i in range(1, n)])


def cycle_graph(n):
    return new_graph(n, [(i, i % n + 1) for i in range(1, n + 1)])


def petersen_graph():
    outer = [(i, i % 5 + 1) for i in range(1, 6)]
    spokes = [(i, i + 5) for i in range(1, 6)]
    inner = [(6 + i, 6 + (i + 2) % 5) for i in range(5)]
    return new_graph(10, outer + spokes + inner)


# -- the partial order and surgery -----------------------------------------

def is_edge_subgraph(g1, g2):
    """``g1 ≼ g2``: same vertex set and every edge of g1 is an edge of g2."""
    if g1.n != g2.n:
        return False
    if g1.m > g2.m:
        return False
    if g1.m == 0:
        return True
    pos = np.searchsorted(g2.keys, g1.keys)
    pos = np.minimum(pos, g2.keys.size - 1) if g2.keys.size else pos
    return bool(g2.keys.size and np.all(g2.keys[pos] == g1.keys))


def add_isolated_vertices(g, k):
    if k < 0:
        raise GraphError("k must be non-negative")
    return Graph(g.n + k, g._u, g._v)


def add_edge(g, i, j):
    _check_vertex(i, g.n)
    _check_vertex(j, g.n)
    if i == j:
        raise SelfLoop(f"self-loop at vertex {i}")
    return Graph.from_pairs(g.n, np.append(g._u, i - 1), np.append(g._v, j - 1))


def vertex_subset(members, n):
    """Sorted tuple of distinct 1-based vertices, range-checked against n."""
    out = tuple(sorted({int(x) for x in members}))
    for x in out:
        _check_vertex(x, n)
    return out


def induced_subgraph(g, s):
    """Subgraph induced by the 1-based vertex set ``s``, relabeled 1..|s| in order."""
    s = vertex_subset(s, g.n)
    relabel = np.full(g.n, -1, dtype=np.int64)
    if s:
        relabel[np.asarray(s, dtype=np.int64) - 1] = np.arange(len(s))
    ru = relabel[g._u]
    rv = relabel[g._v]
    keep = (ru >= 0) & (rv >= 0)
    # order-preserving relabel keeps u < v and lexicographic order
    return Graph(len(s), ru[keep], rv[keep])


# -- statistics --------------------------------------------------------------

def degree_sequence(g):
    return np.bincount(np.concatenate([g._u, g._v]), minlength=g.n).astype(np.int64)


def connected_components(g):
    """Components as sorted 1-based tuples, ordered by smallest member."""
    indptr, indices = g.csr
    label = np.full(g.n, -1, dtype=np.int64)
    comps = []
    for s in range(g.n):
        if label[s] >= 0:
            continue
        label[s] = len(comps)
        members = [s]
        queue = deque([s])
        while queue:
            x = queue.popleft()
            for y in indices[indptr[x]:indptr[x + 1]]:
                if label[y] < 0:
                    label[y] = len(comps)
                    members.append(int(y))
                    queue.append(int(y))
        comps.append(tuple(sorted(m + 1 for m in members)))
    return comps


def _bfs_distances(indptr, indices, source, n):
    dist = np.full(n, -1, dtype=np.int64)
    dist[source] = 0
    queue = deque([source])
    while queue:
        x = queue.popleft()
        dx = dist[x] + 1
        for y in indices[indptr[x]:indptr[x + 1]]:
            if dist[y] < 0:
                dist[y] = dx
                queue.append(y)
    return dist


def average_distance(g):
    """Mean BFS distance over unordered pairs lying in a common component.

    Raises :class:`EmptyAverage` when there is no such pair.
    """
    indptr, indices = g.csr
    total = 0
    pairs = 0
    for s in range(g.n):
        dist = _bfs_distances(indptr, indices, s, g.n)
        later = dist[s + 1:]
        reach = later[later > 0]
        total += int(reach.sum())
        pairs += int(reach.size)
    if pairs == 0:
        raise EmptyAverage("no two distinct vertices share a component")
    return total / pairs


# -- edge-list text format -----------------------------------------------------

def format_edge_list(g):
    buf = io.StringIO()
    buf.write(f"{g.n} {g.m}\n")
    for a, b in zip(g._u.tolist(), g._v.tolist()):
        buf.write(f"{a + 1} {b + 1}\n")
    return buf.getvalue()


def parse_edge_list(text):
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise GraphError("empty edge list")
    head = lines[0].split()
    if len(head) != 2:
        raise GraphError("header must be 'n m'")
    n, m = int(head[0]), int(head[1])
    if len(lines) - 1 != m:
        raise GraphError(f"header announces {m} edges, found {len(lines) - 1}")
    pairs = []
    for ln in lines[1:]:
        parts = ln.split()
        if len(parts) != 2:
            raise GraphError(f"bad edge line {ln!r}")
        pairs.append((int(parts[0]), int(parts[1])))
    return new_graph(n, pairs)


def write_edge_list(g, path):
    with open(os.fspath(path), "w", newline="\n") as fh:
        fh.write(format_edge_list(g))


def read_edge_list(path):
    with open(os.fspath(path)) as fh:
        return parse_edge_list(fh.read())
