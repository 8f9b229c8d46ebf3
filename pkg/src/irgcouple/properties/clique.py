"""Maximum clique by branch and bound with a greedy-colouring bound.

Vertices are relabelled by non-increasing degree (ties: lower index first)
and the candidate set is a bitset over that order.  At each node the
candidates are greedily coloured; a vertex of colour c can extend the
current clique by at most c vertices, which is the pruning bound.

Two interchangeable kernels run the identical search: a numba kernel over
uint64 word arrays, and a pure Python one over arbitrary-precision ints.
"""
import time

import numpy as np

from .._accel import njit, numba, use_numba
from .budget import SolveBudget, SolveResult

_ONE = np.uint64(1)
_ZERO = np.uint64(0)
_S58 = np.uint64(58)
_DEBRUIJN = np.uint64(0x03F79D71B4CB0A89)
_DEBRUIJN_TABLE = np.array([
    0, 1, 48, 2, 57, 49, 28, 3, 61, 58, 50, 42, 38, 29, 17, 4,
    62, 55, 59, 36, 53, 51, 43, 22, 45, 39, 33, 30, 24, 18, 12, 5,
    63, 47, 56, 27, 60, 41, 37, 16, 54, 35, 52, 21, 44, 32, 23, 11,
    46, 26, 40, 15, 34, 20, 31, 10, 25, 14, 19, 9, 13, 8, 7, 6,
], dtype=np.int64)

_TIME_CHECK_EVERY = 4096


def degree_order(g):
    """Vertices (0-based) by non-increasing degree, ties to the lower index."""
    indptr, _ = g.csr
    deg = np.diff(indptr)
    return np.lexsort((np.arange(g.n), -deg)).astype(np.int64)


def adjacency_bitsets(g, order):
    """(n, words) uint64 matrix; bit p of row q means order[q] ~ order[p]."""
    n = g.n
    words = max(1, (n + 63) // 64)
    pos = np.empty(n, dtype=np.int64)
    pos[order] = np.arange(n)
    bits = np.zeros((n, words), dtype=np.uint64)
    if g.m:
        a = pos[g._u]
        b = pos[g._v]
        for x, y in ((a, b), (b, a)):
            np.bitwise_or.at(bits, (x, y >> 6), np.left_shift(np.uint64(1), (y & 63).astype(np.uint64)))
    return bits


# ---------------------------------------------------------------------------
# numba kernel
# ---------------------------------------------------------------------------

@njit(cache=True, inline="always")
def _lowbit_index(w, table):
    low = w & (~w + _ONE)
    return table[np.int64((low * _DEBRUIJN) >> _S58)]


@njit(cache=True)
def _color_sort(adj, P, Q, R, out_v, out_c, kmin, words):
    for w in range(words):
        Q[w] = P[w]
    k = 0
    cnt = 0
    rootcolors = 0
    while True:
        empty = True
        for w in range(words):
            if Q[w] != _ZERO:
                empty = False
                break
        if empty:
            break
        k += 1
        for w in range(words):
            R[w] = Q[w]
        w = 0
        while w < words:
            if R[w] == _ZERO:
                w += 1
                continue
            b = _lowbit_index(R[w], _DEBRUIJN_TABLE)
            v = w * 64 + b
            mask = ~(_ONE << np.uint64(b))
            R[w] &= mask
            Q[w] &= mask
            for x in range(words):
                R[x] &= ~adj[v, x]
            if k >= kmin:
                out_v[cnt] = v
                out_c[cnt] = k
                cnt += 1
        rootcolors = k
    return cnt, rootcolors


@njit(cache=True)
def _max_clique_nb(adj, n, lower, node_limit, time_limit):
    words = adj.shape[1]
    Pst = np.zeros((n + 2, words), dtype=np.uint64)
    ordv = np.zeros((n + 2, n), dtype=np.int64)
    ordc = np.zeros((n + 2, n), dtype=np.int64)
    pos = np.full(n + 2, -1, dtype=np.int64)
    Q = np.zeros(words, dtype=np.uint64)
    R = np.zeros(words, dtype=np.uint64)
    clique = np.zeros(n + 1, dtype=np.int64)
    best_clique = np.zeros(n + 1, dtype=np.int64)
    best = lower
    best_found = 0
    for v in range(n):
        Pst[0, v >> 6] |= _ONE << np.uint64(v & 63)
    with numba.objmode(t0="float64"):
        t0 = time.perf_counter()
    cnt, root_bound = _color_sort(adj, Pst[0], Q, R, ordv[0], ordc[0], best + 1, words)
    pos[0] = cnt - 1
    nodes = 1
    aborted = False
    d = 0
    size = 0
    while True:
        if pos[d] < 0:
            if d == 0:
                break
            d -= 1
            size -= 1
            continue
        i = pos[d]
        v = ordv[d, i]
        c = ordc[d, i]
        pos[d] = i - 1
        if size + c <= best:
            pos[d] = -1
            continue
        nonempty = False
        for w in range(words):
            x = Pst[d, w] & adj[v, w]
            Pst[d + 1, w] = x
            if x != _ZERO:
                nonempty = True
        Pst[d, v >> 6] &= ~(_ONE << np.uint64(v & 63))
        clique[size] = v
        size += 1
        if not nonempty:
            if size > best:
                best = size
                best_found = size
                for j in range(size):
                    best_clique[j] = clique[j]
            size -= 1
            continue
        nodes += 1
        if nodes > node_limit:
            aborted = True
            break
        if time_limit > 0 and nodes % _TIME_CHECK_EVERY == 0:
            with numba.objmode(now="float64"):
                now = time.perf_counter()
            if now - t0 > time_limit:
                aborted = True
                break
        d += 1
        cnt, _ = _color_sort(adj, Pst[d], Q, R, ordv[d], ordc[d], best - size + 1, words)
        pos[d] = cnt - 1
    return best, best_clique[:best_found].copy(), nodes, aborted, root_bound


# ---------------------------------------------------------------------------
# pure Python kernel (same search, Python ints as bitsets)
# ---------------------------------------------------------------------------

def _color_sort_py(adj, P, kmin):
    out = []
    Q = P
    k = 0
    while Q:
        k += 1
        R = Q
        while R:
            low = R & -R
            v = low.bit_length() - 1
            R &= ~low
            Q &= ~low
            R &= ~adj[v]
            if k >= kmin:
                out.append((v, k))
    return out, k


def _max_clique_py(adj, n, lower, node_limit, time_limit):
    t0 = time.perf_counter()
    P0 = (1 << n) - 1
    best = lower
    best_clique = []
    stack_P = [P0]
    lists = []
    lst, root_bound = _color_sort_py(adj, P0, best + 1)
    lists.append(lst)
    pos = [len(lst) - 1]
    nodes = 1
    aborted = False
    clique = []
    while True:
        d = len(pos) - 1
        if pos[d] < 0:
            if d == 0:
                break
            pos.pop()
            lists.pop()
            stack_P.pop()
            clique.pop()
            continue
        v, c = lists[d][pos[d]]
        pos[d] -= 1
        if len(clique) + c <= best:
            pos[d] = -1
            continue
        newP = stack_P[d] & adj[v]
        stack_P[d] &= ~(1 << v)
        clique.append(v)
        if not newP:
            if len(clique) > best:
                best = len(clique)
                best_clique = list(clique)
            clique.pop()
            continue
        nodes += 1
        if nodes > node_limit:
            aborted = True
            break
        if time_limit > 0 and nodes % _TIME_CHECK_EVERY == 0 and time.perf_counter() - t0 > time_limit:
            aborted = True
            break
        lst, _ = _color_sort_py(adj, newP, best - len(clique) + 1)
        stack_P.append(newP)
        lists.append(lst)
        pos.append(len(lst) - 1)
    return best, np.array(best_clique, dtype=np.int64), nodes, aborted, root_bound


def _bits_to_ints(bits):
    out = []
    for row in bits:
        val = 0
        for w, word in enumerate(row.tolist()):
            val |= int(word) << (64 * w)
        out.append(val)
    return out


# ---------------------------------------------------------------------------
# public API
# ---------------------------------------------------------------------------

def maximum_clique(g, budget=None, lower=0, backend=None):
    """Exact clique number within budget.

    Returns a :class:`SolveResult` whose certificate is a clique (1-based);
    when the budget runs out the bracket is [best clique found, colouring
    bound at the root].
    """
    budget = budget or SolveBudget()
    t0 = time.perf_counter()
    if g.n == 0:
        return SolveResult("clique_number", 0, 0, "exact", 0, 0.0, [])
    order = degree_order(g)
    bits = adjacency_bitsets(g, order)
    backend = backend or ("numba" if use_numba() else "numpy")
    node_limit = int(min(budget.node_limit, 2**62))
    tlim = float(budget.time_limit) if budget.time_limit else 0.0
    if backend == "numba":
        best, cl, nodes, aborted, root = _max_clique_nb(bits, g.n, int(lower), node_limit, tlim)
    else:
        best, cl, nodes, aborted, root = _max_clique_py(_bits_to_ints(bits), g.n, int(lower),
                                                        node_limit, tlim)
    witness = sorted(int(order[p]) + 1 for p in cl)
    wall = time.perf_counter() - t0
    if aborted:
        lo = max(len(witness), 1)
        return SolveResult("clique_number", lo, max(int(root), lo), "lower_upper_only",
                           int(nodes), wall, witness)
    return SolveResult("clique_number", int(best), int(best), "exact", int(nodes), wall, witness)


def greedy_clique(g, vertices=None):
    """Deterministic greedy clique: repeatedly take the candidate of highest degree."""
    adj = g.adjacency
    if vertices is None:
        cand = set(range(g.n))
    else:
        cand = {v - 1 for v in vertices}
    deg = {v: len(adj[v] & cand) for v in cand}
    clique = []
    while cand:
        v = min(cand, key=lambda x: (-deg[x], x))
        clique.append(v)
        cand &= adj[v]
    return sorted(v + 1 for v in clique)


def is_clique(g, members):
    members = list(members)
    return all(g.has_edge(a, b) for i, a in enumerate(members) for b in members[i + 1:])
