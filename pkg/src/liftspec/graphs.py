"""Colored multigraph view of a permutation family.

Each color i contributes directed edges x -> sigma_i(x); the pair
(x, i, y) and (y, star(i), x) describe the same undirected edge class
and are stored once under the lexicographically smaller triple.  Cycle
counts and tangle checks run on these classes, so parallel edges and
self-loops are first-class citizens.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

import numpy as np

from .errors import DepthTooLarge, IndexOutOfRange
from .lift import _check_compatible
from .model import PermutationFamily, WeightSystem, canonical_star


def canonical_edge(x: int, color: int, y: int,
                   star: tuple[int, ...]) -> tuple[int, int, int]:
    a = (x, color, y)
    b = (y, star[color], x)
    return a if a <= b else b


@dataclass(frozen=True)
class ColoredGraph:
    """Undirected colored multigraph on vertices 0..n-1."""

    n: int
    d: int
    star: tuple[int, ...]
    edges: tuple[tuple[int, int, int], ...]

    def __post_init__(self):
        for i, k in enumerate(self.star):
            if not 0 <= k < self.d or self.star[k] != i:
                raise IndexOutOfRange("star map must be an involution on colors")
        prev = None
        for e in self.edges:
            x, c, y = e
            if not (0 <= x < self.n and 0 <= y < self.n and 0 <= c < self.d):
                raise IndexOutOfRange(f"edge {e} out of range")
            if e != canonical_edge(x, c, y, self.star):
                raise IndexOutOfRange(f"edge {e} is not in canonical form")
            if prev is not None and e <= prev:
                raise IndexOutOfRange("edges must be sorted and unique")
            prev = e

    @property
    def num_edges(self) -> int:
        return len(self.edges)


def build_colored_graph(pf: PermutationFamily) -> ColoredGraph:
    """Quotient multigraph of a permutation family on its ground set."""
    star = canonical_star(pf.q, pf.d)
    seen = set()
    for i in range(pf.d):
        tgt = pf.perms[i]
        for x in range(pf.n):
            seen.add(canonical_edge(x, i, int(tgt[x]), star))
    return ColoredGraph(n=pf.n, d=pf.d, star=star, edges=tuple(sorted(seen)))


def _adjacency(g: ColoredGraph) -> list[list[tuple[int, int]]]:
    adj: list[list[tuple[int, int]]] = [[] for _ in range(g.n)]
    for eid, (u, _, v) in enumerate(g.edges):
        adj[u].append((v, eid))
        if v != u:
            adj[v].append((u, eid))
    return adj


def _ball_eids(g: ColoredGraph, adj, x: int, radius: int) -> set[int]:
    dist = {x: 0}
    frontier = [x]
    for depth in range(1, radius + 1):
        nxt = []
        for u in frontier:
            for v, _ in adj[u]:
                if v not in dist:
                    dist[v] = depth
                    nxt.append(v)
        frontier = nxt
    eids: set[int] = set()
    inner = radius - 1
    for u, du in dist.items():
        if du <= inner:
            for _, eid in adj[u]:
                eids.add(eid)
    return eids


def ball(g: ColoredGraph, x: int, radius: int) -> ColoredGraph:
    """Subgraph of edge classes with an endpoint within radius-1 of x."""
    if not 0 <= x < g.n:
        raise IndexOutOfRange(f"vertex {x} out of range")
    if radius < 1:
        return ColoredGraph(n=g.n, d=g.d, star=g.star, edges=())
    eids = _ball_eids(g, _adjacency(g), x, radius)
    return ColoredGraph(n=g.n, d=g.d, star=g.star,
                        edges=tuple(sorted(g.edges[e] for e in eids)))


def _excess(g: ColoredGraph, adj, x: int, radius: int) -> int:
    eids = _ball_eids(g, adj, x, radius)
    verts = {x}
    for e in eids:
        u, _, v = g.edges[e]
        verts.add(u)
        verts.add(v)
    return len(eids) - len(verts) + 1


def ball_excess(g: ColoredGraph, x: int, radius: int) -> int:
    """Cyclomatic excess (edges - vertices + 1) of the ball around x.

    Zero for a tree, one for exactly one cycle.
    """
    if not 0 <= x < g.n:
        raise IndexOutOfRange(f"vertex {x} out of range")
    if radius < 1:
        return 0
    return _excess(g, _adjacency(g), x, radius)


def is_tangle_free(g: ColoredGraph, radius: int) -> bool:
    """True when every radius ball carries at most one cycle."""
    if radius < 1:
        return True
    adj = _adjacency(g)
    for x in range(g.n):
        if _excess(g, adj, x, radius) > 1:
            return False
    return True


def count_cycles(g: ColoredGraph, max_len: int = 12) -> dict[int, int]:
    """Number of simple cycles per length, counting edge classes.

    Length 1 counts self-loops, length 2 counts unordered pairs of
    parallel classes, lengths three and up are genuine vertex-disjoint
    circuits found by anchored depth-first search.
    """
    if max_len < 1:
        raise ValueError("max_len must be positive")
    if max_len > 12:
        raise DepthTooLarge("cycle enumeration capped at length 12")
    counts = {length: 0 for length in range(1, max_len + 1)}
    counts[1] = sum(1 for u, _, v in g.edges if u == v)
    if max_len >= 2:
        mult = Counter((min(u, v), max(u, v))
                       for u, _, v in g.edges if u != v)
        counts[2] = sum(m * (m - 1) // 2 for m in mult.values())
    if max_len < 3:
        return counts
    adj: list[list[tuple[int, int]]] = [[] for _ in range(g.n)]
    for eid, (u, _, v) in enumerate(g.edges):
        if u == v:
            continue
        adj[u].append((v, eid))
        adj[v].append((u, eid))
    found: set[frozenset[int]] = set()

    def explore(start, u, depth, used, eids):
        for v, eid in adj[u]:
            if v == start:
                if depth + 1 >= 3:
                    found.add(frozenset(eids + [eid]))
            elif v > start and v not in used and depth + 1 <= max_len - 1:
                used.add(v)
                eids.append(eid)
                explore(start, v, depth + 1, used, eids)
                eids.pop()
                used.remove(v)

    for s in range(g.n):
        explore(s, s, 0, {s}, [])
    for cyc in found:
        counts[len(cyc)] += 1
    return counts


def local_moment(ws: WeightSystem, pf: PermutationFamily, x: int, k: int) -> float:
    """k-th normalized trace moment of the lift operator at one site.

    Equals the free moment of the same order whenever the ball of
    radius ceil(k/2) around x is acyclic.
    """
    _check_compatible(ws, pf)
    if not 0 <= x < pf.n:
        raise IndexOutOfRange(f"vertex {x} out of range")
    if k < 0:
        raise ValueError("moment order must be nonnegative")
    if k == 0:
        return 1.0
    r = ws.r
    state = {int(x): np.eye(r, dtype=np.complex128)}
    use_a0 = bool(ws.a0.any())
    back = [pf.perms[ws.star[i]] for i in range(ws.d)]
    for _ in range(k):
        new: dict[int, np.ndarray] = {}
        for y, mat in state.items():
            if use_a0:
                cur = new.get(y)
                contrib = ws.a0 @ mat
                new[y] = contrib if cur is None else cur + contrib
            for i in range(ws.d):
                y2 = int(back[i][y])
                contrib = ws.weights[i] @ mat
                cur = new.get(y2)
                new[y2] = contrib if cur is None else cur + contrib
        state = new
    mat = state.get(int(x))
    if mat is None:
        return 0.0
    return float(np.trace(mat).real) / r
