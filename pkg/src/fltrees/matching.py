"""Bipartite matching: Hopcroft-Karp, and maximum weight matching reduced to it.

Vertices on either side may be any hashable labels; the two sides are kept
apart, so the same label may appear on both.
"""

from __future__ import annotations

from collections import defaultdict, deque
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy.optimize import linear_sum_assignment


class GraphError(ValueError):
    pass


@dataclass(frozen=True)
class BipartiteGraph:
    left: tuple
    right: tuple
    edges: tuple  # (l, r) pairs

    def __post_init__(self):
        object.__setattr__(self, "left", tuple(self.left))
        object.__setattr__(self, "right", tuple(self.right))
        object.__setattr__(self, "edges", tuple((l, r) for l, r in self.edges))
        ls, rs = set(self.left), set(self.right)
        if len(ls) != len(self.left) or len(rs) != len(self.right):
            raise GraphError("duplicate vertex")
        seen = set()
        for l, r in self.edges:
            if l not in ls or r not in rs:
                raise GraphError(f"edge ({l}, {r}) uses an undeclared vertex")
            if (l, r) in seen:
                raise GraphError(f"parallel edge ({l}, {r})")
            seen.add((l, r))

    def adjacency(self) -> dict:
        adj = {l: [] for l in self.left}
        for l, r in self.edges:
            adj[l].append(r)
        return adj

    def degrees(self) -> tuple[dict, dict]:
        dl = {l: 0 for l in self.left}
        dr = {r: 0 for r in self.right}
        for l, r in self.edges:
            dl[l] += 1
            dr[r] += 1
        return dl, dr


@dataclass(frozen=True)
class WeightedBipartiteGraph:
    left: tuple
    right: tuple
    edges: tuple  # (l, r, w) triples

    def __post_init__(self):
        BipartiteGraph(self.left, self.right, [(l, r) for l, r, _ in self.edges])
        object.__setattr__(self, "left", tuple(self.left))
        object.__setattr__(self, "right", tuple(self.right))
        object.__setattr__(self, "edges", tuple((l, r, int(w)) for l, r, w in self.edges))
        for l, r, w in self.edges:
            if w < 1:
                raise GraphError(f"edge ({l}, {r}) has non-positive weight {w}")

    @property
    def total_weight(self) -> int:
        return sum(w for _, _, w in self.edges)


@dataclass
class Matching:
    pairs: list  # (l, r) pairs
    weight: int = 0
    # total edge count over the unweighted instances a weighted solve used
    instance_edges: int = 0

    @property
    def cardinality(self) -> int:
        return len(self.pairs)

    def is_valid(self, graph=None) -> bool:
        """Pairwise disjoint, and made of edges of ``graph`` when one is given."""
        ls = [l for l, _ in self.pairs]
        rs = [r for _, r in self.pairs]
        if len(set(ls)) != len(ls) or len(set(rs)) != len(rs):
            return False
        if graph is None:
            return True
        present = {(e[0], e[1]) for e in graph.edges}
        return all(p in present for p in self.pairs)


# --- Hopcroft-Karp ----------------------------------------------------------


def hopcroft_karp(adj: dict, match_l: Optional[dict] = None, match_r: Optional[dict] = None):
    """Grow ``match_l``/``match_r`` into a maximum matching of ``adj`` (left -> rights).

    Left vertices are scanned in the iteration order of ``adj`` and right
    neighbours in list order, so results are reproducible.
    """
    match_l = {} if match_l is None else match_l
    match_r = {} if match_r is None else match_r
    left = list(adj)
    inf = float("inf")
    while True:
        dist = {}
        queue = deque()
        for l in left:
            if l not in match_l:
                dist[l] = 0
                queue.append(l)
        found = inf
        while queue:
            l = queue.popleft()
            d = dist[l]
            if d >= found:
                continue
            for r in adj[l]:
                m = match_r.get(r)
                if m is None:
                    found = d + 1 if found == inf else found
                elif m not in dist:
                    dist[m] = d + 1
                    queue.append(m)
        if found == inf:
            return match_l, match_r
        # layered DFS along dist, iterative
        ptr = {l: 0 for l in dist}
        for s in left:
            if s in match_l or dist.get(s) != 0:
                continue
            stack = [s]
            while stack:
                l = stack[-1]
                nbrs = adj[l]
                advanced = False
                while ptr[l] < len(nbrs):
                    r = nbrs[ptr[l]]
                    ptr[l] += 1
                    m = match_r.get(r)
                    if m is None:
                        if dist[l] + 1 == found:
                            # augment along the stack
                            for k in range(len(stack) - 1, -1, -1):
                                x = stack[k]
                                nxt = match_l.get(x)
                                match_l[x] = r
                                match_r[r] = x
                                r = nxt
                            stack = []
                            advanced = True
                            break
                    elif dist.get(m) == dist[l] + 1:
                        stack.append(m)
                        advanced = True
                        break
                if not advanced:
                    dist[l] = inf
                    stack.pop()


def max_matching(graph: BipartiteGraph) -> Matching:
    match_l, _ = hopcroft_karp(graph.adjacency())
    pairs = [(l, match_l[l]) for l in graph.left if l in match_l]
    return Matching(pairs, weight=len(pairs))


def min_vertex_cover(adj: dict, match_l: dict, match_r: dict) -> tuple[set, set]:
    """Konig cover from a maximum matching: (left not reached) + (right reached)."""
    reached_l = set()
    reached_r = set()
    queue = deque(l for l in adj if l not in match_l)
    reached_l.update(queue)
    while queue:
        l = queue.popleft()
        for r in adj[l]:
            if r not in reached_r:
                reached_r.add(r)
                m = match_r.get(r)
                if m is not None and m not in reached_l:
                    reached_l.add(m)
                    queue.append(m)
    return {l for l in adj if l not in reached_l}, reached_r


# --- maximum weight matching -------------------------------------------------


def _decompose(edges: Sequence[tuple]):
    """Weight of a maximum weight matching by repeated unweighted matchings.

    Each round takes the edges of current maximum weight ``W`` as an
    unweighted graph, finds a maximum matching and a minimum vertex cover of
    it, adds the matching size to the answer and lowers every edge by the
    number of its endpoints in the cover, dropping edges that reach zero.
    Every edge of a round loses at least one unit, so the rounds see at most
    ``sum(w)`` edges in total.  Runs of identical rounds are applied in one
    step; ``instance_edges`` still counts every round.

    Returns ``(weight, cover_l, cover_r, instance_edges)`` where the covers
    are the accumulated dual values (an optimal weighted vertex cover).
    """
    cur = [w for _, _, w in edges]
    inc_l: dict = defaultdict(list)
    inc_r: dict = defaultdict(list)
    buckets: dict = defaultdict(list)
    for e, (l, r, w) in enumerate(edges):
        inc_l[l].append(e)
        inc_r[r].append(e)
        buckets[w].append(e)
    cover_l: dict = defaultdict(int)
    cover_r: dict = defaultdict(int)
    total = 0
    instance_edges = 0
    top = max(cur, default=0)
    while top > 0:
        heavy = [e for e in buckets.pop(top, ()) if cur[e] == top]
        if not heavy:
            top -= 1
            continue
        adj: dict = {}
        for e in heavy:
            l, r, _ = edges[e]
            adj.setdefault(l, []).append(r)
        match_l, match_r = hopcroft_karp(adj)
        cl, cr = min_vertex_cover(adj, match_l, match_r)
        # while every heavy edge has one covered endpoint and nothing else
        # reaches the top, the following rounds repeat this one exactly
        reps = 1
        if all((edges[e][0] in cl) != (edges[e][1] in cr) for e in heavy):
            nxt = top - 1
            while nxt > 0:
                live = [e for e in buckets.get(nxt, ()) if cur[e] == nxt]
                if live:
                    buckets[nxt] = live
                    break
                buckets.pop(nxt, None)
                nxt -= 1
            reps = top - nxt
        instance_edges += reps * len(heavy)
        total += reps * len(match_l)
        touched: dict = {}
        for x, inc, cov in ((cl, inc_l, cover_l), (cr, inc_r, cover_r)):
            for v in x:
                cov[v] += reps
                alive = []
                for e in inc[v]:
                    if cur[e] > 0:
                        cur[e] -= reps
                        touched[e] = None
                        if cur[e] > 0:
                            alive.append(e)
                inc[v] = alive
        for e in touched:
            w = cur[e]
            if w > 0:
                buckets[w].append(e)
    return total, cover_l, cover_r, instance_edges


def _tight_matching(edges, cover_l, cover_r) -> list:
    """Matching on tight edges that saturates every vertex of positive cover value."""
    adj: dict = {}
    radj: dict = defaultdict(list)
    for l, r, w in edges:
        if cover_l.get(l, 0) + cover_r.get(r, 0) == w:
            adj.setdefault(l, []).append(r)
            radj[r].append(l)
    match_l, match_r = hopcroft_karp(adj)
    need_l = [l for l, c in cover_l.items() if c > 0 and l not in match_l]
    need_r = [r for r, c in cover_r.items() if c > 0 and r not in match_r]
    # side 0 = left, 1 = right; walk alternating paths from an uncovered
    # positive vertex until a free vertex or a matched zero-valued vertex
    for side, starts in ((0, need_l), (1, need_r)):
        for s in starts:
            _repair(s, side, adj, radj, match_l, match_r, cover_l, cover_r)
    return sorted(match_l.items(), key=lambda lr: (repr(lr[0]), repr(lr[1])))


def _repair(s, side, adj, radj, match_l, match_r, cover_l, cover_r) -> None:
    mine, other = (match_l, match_r) if side == 0 else (match_r, match_l)
    nbrs = adj if side == 0 else radj
    my_cover = cover_l if side == 0 else cover_r
    if s in mine:
        return
    back = {s: None}  # vertex on s's side -> (previous such vertex, connecting vertex)
    queue = deque([s])
    while queue:
        a = queue.popleft()
        for b in nbrs.get(a, ()):
            if mine.get(a) == b:
                continue
            p = other.get(b)
            if p is not None and p in back:
                continue
            if p is None or my_cover.get(p, 0) == 0:
                if p is not None:
                    # p has dual value 0 and may end up unmatched
                    del mine[p]
                    del other[b]
                while True:
                    mine[a] = b
                    other[b] = a
                    if back[a] is None:
                        return
                    a, b = back[a]
            back[p] = (a, b)
            queue.append(p)
    raise AssertionError(f"no saturating matching through {s!r}; cover is not optimal")


def max_weight_matching(graph: WeightedBipartiteGraph) -> tuple[int, Matching]:
    weight, cl, cr, inst = _decompose(graph.edges)
    if inst > graph.total_weight:
        raise AssertionError(f"decomposition used {inst} edges, more than the total weight {graph.total_weight}")
    pairs = _tight_matching(graph.edges, cl, cr)
    wmap = {(l, r): w for l, r, w in graph.edges}
    got = sum(wmap[p] for p in pairs)
    if got != weight:
        raise AssertionError(f"matching weight {got} != decomposition weight {weight}")
    return weight, Matching(pairs, weight=weight, instance_edges=inst)


def mwm_weight(edges: Sequence[tuple]) -> int:
    """Maximum weight of a matching over ``(l, r, w)`` triples, weight only."""
    if not edges:
        return 0
    if len(edges) == 1:
        return edges[0][2]
    return _decompose(edges)[0]


def mwm_pairs(edges: Sequence[tuple]) -> tuple[int, list]:
    if not edges:
        return 0, []
    weight, cl, cr, _ = _decompose(edges)
    return weight, _tight_matching(edges, cl, cr)


def max_weight_matching_oracle(graph: WeightedBipartiteGraph) -> tuple[int, Matching]:
    """Same contract as :func:`max_weight_matching`, solved as an assignment problem."""
    weight, pairs = assignment_mwm(graph.edges)
    return weight, Matching(pairs, weight=weight)


def assignment_mwm(edges: Sequence[tuple]) -> tuple[int, list]:
    if not edges:
        return 0, []
    ls = sorted({l for l, _, _ in edges}, key=repr)
    rs = sorted({r for _, r, _ in edges}, key=repr)
    li = {l: k for k, l in enumerate(ls)}
    ri = {r: k for k, r in enumerate(rs)}
    mat = np.zeros((len(ls), len(rs)), dtype=np.int64)
    for l, r, w in edges:
        mat[li[l], ri[r]] = w
    rows, cols = linear_sum_assignment(mat, maximize=True)
    pairs = [(ls[i], rs[j]) for i, j in zip(rows, cols) if mat[i, j] > 0]
    return int(sum(mat[i, j] for i, j in zip(rows, cols))), pairs


# --- graph file format ------------------------------------------------------


def parse_graph(text: str) -> WeightedBipartiteGraph:
    """``nL nR m`` then ``m`` lines ``i j [w]`` with 1-based vertex indices."""
    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    if not lines:
        raise GraphError("empty graph file")
    try:
        nl, nr, m = (int(t) for t in lines[0].split())
        edges = []
        for ln in lines[1:]:
            toks = [int(t) for t in ln.split()]
            if len(toks) not in (2, 3):
                raise GraphError(f"bad edge line {ln!r}")
            i, j = toks[0], toks[1]
            w = toks[2] if len(toks) == 3 else 1
            if not (1 <= i <= nl and 1 <= j <= nr):
                raise GraphError(f"edge {i} {j} out of range")
            edges.append((i, j, w))
    except ValueError as exc:
        if isinstance(exc, GraphError):
            raise
        raise GraphError(f"malformed graph file: {exc}") from None
    if len(edges) != m:
        raise GraphError(f"expected {m} edges, got {len(edges)}")
    return WeightedBipartiteGraph(range(1, nl + 1), range(1, nr + 1), edges)


def format_graph(graph) -> str:
    li = {l: k for k, l in enumerate(graph.left, 1)}
    ri = {r: k for k, r in enumerate(graph.right, 1)}
    out = [f"{len(graph.left)} {len(graph.right)} {len(graph.edges)}"]
    for e in graph.edges:
        if len(e) == 3 and e[2] != 1:
            out.append(f"{li[e[0]]} {ri[e[1]]} {e[2]}")
        else:
            out.append(f"{li[e[0]]} {ri[e[1]]}")
    return "\n".join(out) + "\n"


def unweighted(graph: WeightedBipartiteGraph) -> BipartiteGraph:
    return BipartiteGraph(graph.left, graph.right, [(l, r) for l, r, _ in graph.edges])
