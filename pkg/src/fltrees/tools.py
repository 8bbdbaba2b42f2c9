"""Random instances, brute-force oracles and the matching-to-trees reduction."""

from __future__ import annotations

import heapq
import itertools
import random
from dataclasses import dataclass, field

from .forest import (
    ForestError,
    LabeledForest,
    Permutation,
    is_descendant,
    permute,
)
from .isomorphism import NotIsomorphic, canonical_ids
from .matching import BipartiteGraph, hopcroft_karp

# size caps for the exhaustive oracles
PERM_ORACLE_MAX_N = 9
REARRANGE_ORACLE_MAX_N = 7
TREE_ORACLE_MAX_N = 4


# --- generators -------------------------------------------------------------


def random_tree(n: int, seed=None) -> LabeledForest:
    """Random recursive tree: node k picks a uniform parent among 1..k-1, then labels are shuffled."""
    if n < 1:
        raise ValueError("n must be at least 1")
    rng = seed if isinstance(seed, random.Random) else random.Random(seed)
    shape = [0] + [rng.randrange(1, k) for k in range(2, n + 1)]
    labels = list(range(1, n + 1))
    rng.shuffle(labels)
    par = [0] * n
    for k, p in enumerate(shape, 1):
        par[labels[k - 1] - 1] = labels[p - 1] if p else 0
    return LabeledForest(tuple(par))


def random_forest(n: int, roots: int, seed=None) -> LabeledForest:
    """Random forest with exactly ``roots`` trees."""
    if not 1 <= roots <= n:
        raise ValueError("need 1 <= roots <= n")
    rng = seed if isinstance(seed, random.Random) else random.Random(seed)
    shape = [0] * roots + [rng.randrange(1, k) for k in range(roots + 1, n + 1)]
    labels = list(range(1, n + 1))
    rng.shuffle(labels)
    par = [0] * n
    for k, p in enumerate(shape, 1):
        par[labels[k - 1] - 1] = labels[p - 1] if p else 0
    return LabeledForest(tuple(par))


def random_permutation(n: int, k: int, seed=None) -> Permutation:
    """Uniform shuffle of a random ``k``-element subset of the labels (it may fix some)."""
    if not 0 <= k <= n:
        raise ValueError("need 0 <= k <= n")
    rng = seed if isinstance(seed, random.Random) else random.Random(seed)
    img = list(range(1, n + 1))
    chosen = rng.sample(range(1, n + 1), k)
    shuffled = chosen[:]
    rng.shuffle(shuffled)
    for x, y in zip(chosen, shuffled):
        img[x - 1] = y
    return Permutation(tuple(img))


def random_relabel(tree: LabeledForest, k: int, seed=None) -> LabeledForest:
    return permute(tree, random_permutation(tree.n, k, seed))


# --- oracles ----------------------------------------------------------------


def _max_conserved(t1: LabeledForest, t2: LabeledForest) -> int:
    """Best number of fixed labels over all isomorphisms, by enumeration."""
    ids = canonical_ids(t1, t2)
    ch1, ch2 = t1.children(), t2.children()
    id1, id2 = ids.ids1, ids.ids2

    def mappings(u, v):
        # every isomorphism of T1|u onto T2|v, as a list of (x, mu(x)) pairs
        kids1, kids2 = ch1[u], ch2[v]
        out = []
        for perm in itertools.permutations(kids2):
            if all(id1[a] == id2[b] for a, b in zip(kids1, perm)):
                partial = [[(u, v)]]
                for a, b in zip(kids1, perm):
                    partial = [p + q for p in partial for q in mappings(a, b)]
                out.extend(partial)
        return out

    r1, r2 = t1.root, t2.root
    if id1[r1] != id2[r2]:
        raise NotIsomorphic("trees are not isomorphic")
    return max(sum(1 for x, y in mu if x == y) for mu in mappings(r1, r2))


def oracle_perm_distance(t1: LabeledForest, t2: LabeledForest) -> int:
    if t1.n != t2.n:
        raise NotIsomorphic("different sizes")
    if t1.n > PERM_ORACLE_MAX_N:
        raise ValueError(f"oracle limited to n <= {PERM_ORACLE_MAX_N}")
    return t1.n - _max_conserved(t1, t2)


def rearrangement_cost(f1: LabeledForest, f2: LabeledForest, pi: Permutation) -> int:
    """|pi| plus the number of nodes with conflicting defined parents in pi(F1) and F2."""
    moved = permute(f1, pi)
    clash = sum(1 for a, b in zip(moved.parent, f2.parent) if a and b and a != b)
    return pi.size + clash


def oracle_rearrangement(f1: LabeledForest, f2: LabeledForest) -> int:
    """Exact cut/permutation distance by trying every permutation."""
    if f1.n != f2.n:
        raise ForestError("size mismatch")
    n = f1.n
    if n > REARRANGE_ORACLE_MAX_N:
        raise ValueError(f"oracle limited to n <= {REARRANGE_ORACLE_MAX_N}")
    best = None
    for img in itertools.permutations(range(1, n + 1)):
        c = rearrangement_cost(f1, f2, Permutation(img))
        if best is None or c < best:
            best = c
    return best


def oracle_tree_rearrangement(t1: LabeledForest, t2: LabeledForest) -> int:
    """Exact link-and-cut/permutation distance between trees with a shared, fixed root.

    Dijkstra over all trees on the label set: link-and-cut moves cost 1,
    root-fixing permutations cost the number of moved labels.
    """
    if t1.n != t2.n:
        raise ForestError("size mismatch")
    if t1.root != t2.root:
        raise ForestError("roots differ")
    n = t1.n
    if n > TREE_ORACLE_MAX_N:
        raise ValueError(f"oracle limited to n <= {TREE_ORACLE_MAX_N}")
    root = t1.root
    perms = []
    for img in itertools.permutations(range(1, n + 1)):
        if img[root - 1] == root:
            pi = Permutation(img)
            if pi.size:
                perms.append(pi)
    start, goal = t1.parent, t2.parent
    dist = {start: 0}
    heap = [(0, start)]
    while heap:
        d, state = heapq.heappop(heap)
        if state == goal:
            return d
        if d > dist[state]:
            continue
        forest = LabeledForest(state)
        moves = []
        for v in range(1, n + 1):
            u = state[v - 1]
            if not u:
                continue
            for w in range(1, n + 1):
                if w != u and not is_descendant(forest, w, v):
                    nxt = list(state)
                    nxt[v - 1] = w
                    moves.append((1, tuple(nxt)))
        for pi in perms:
            moves.append((pi.size, permute(forest, pi).parent))
        for c, nxt in moves:
            nd = d + c
            if nd < dist.get(nxt, nd + 1):
                dist[nxt] = nd
                heapq.heappush(heap, (nd, nxt))
    raise AssertionError("goal unreachable")


def oracle_general_matching(edges) -> int:
    """Maximum matching size of a small general graph by branching on its first vertex."""
    adj: dict = {}
    for x, y in edges:
        if x != y:
            adj.setdefault(x, set()).add(y)
            adj.setdefault(y, set()).add(x)

    def best(free: frozenset) -> int:
        live = [v for v in free if adj.get(v, set()) & free]
        if not live:
            return 0
        v = min(live)
        rest = free - {v}
        out = best(rest)
        for w in adj[v] & rest:
            out = max(out, 1 + best(rest - {w}))
        return out

    return best(frozenset(adj))


def all_trees(n: int, root: int | None = None):
    """Every labelled rooted tree on 1..n (optionally with a fixed root)."""
    for par in itertools.product(range(n + 1), repeat=n):
        if sum(1 for p in par if p == 0) != 1:
            continue
        if root is not None and par[root - 1] != 0:
            continue
        try:
            yield LabeledForest(par)
        except ForestError:
            continue


# --- reduction from bipartite matching ---------------------------------------


def degree_reduce(graph: BipartiteGraph) -> tuple[BipartiteGraph, int]:
    """Split vertices of degree >= 4 until every degree is at most 3.

    A vertex ``u`` with neighbours ``x1..xk`` becomes ``u'`` (neighbours
    ``x1..x(k-2)``) and ``u''`` (neighbours ``x(k-1), xk``), both joined to a new
    vertex on the opposite side.  Each split raises the maximum matching size
    by exactly one.  New vertices are named ``("split", i, "a"|"b"|"c")``.
    """
    adj_l = {l: [] for l in graph.left}
    adj_r = {r: [] for r in graph.right}
    for l, r in graph.edges:
        adj_l[l].append(r)
        adj_r[r].append(l)
    # side 0 = left, 1 = right
    sides = (adj_l, adj_r)
    splits = 0
    work = [(0, l) for l in graph.left if len(adj_l[l]) >= 4]
    work += [(1, r) for r in graph.right if len(adj_r[r]) >= 4]
    while work:
        side, u = work.pop()
        mine, other = sides[side], sides[1 - side]
        nbrs = mine.pop(u)
        a, b, c = ("split", splits, "a"), ("split", splits, "b"), ("split", splits, "c")
        splits += 1
        head, tail = nbrs[:-2], nbrs[-2:]
        mine[a] = head + [c]
        mine[b] = tail + [c]
        other[c] = [a, b]
        for x in head:
            other[x] = [a if y == u else y for y in other[x]]
        for x in tail:
            other[x] = [b if y == u else y for y in other[x]]
        if len(mine[a]) >= 4:
            work.append((side, a))
    edges = [(l, r) for l, rs in adj_l.items() for r in rs]
    return BipartiteGraph(list(adj_l), list(adj_r), edges), splits


@dataclass
class ReductionOutput:
    t1: LabeledForest
    t2: LabeledForest
    m: int
    split_count: int = 0
    # construction role of every label, e.g. ("u", i), ("edge", (l, r)), ("pad1", u_i, k)
    ledger: dict = field(default_factory=dict)
    left: list = field(default_factory=list)
    right: list = field(default_factory=list)

    @property
    def n(self) -> int:
        return self.t1.n


def matching_to_trees(graph: BipartiteGraph) -> ReductionOutput:
    """Two isomorphic trees whose permutation distance is ``7m + 2 - mm(graph)``.

    ``m`` is the number of edges; isolated vertices are dropped and each side
    is padded with fresh isolated vertices to exactly ``m`` vertices.  Each
    tree has a root, ``m`` internal children with three leaves each (one per
    incident edge plus padding) and ``3m + 1`` extra leaves at the root.
    """
    dl, dr = graph.degrees()
    if max([*dl.values(), *dr.values()], default=0) > 3:
        raise ValueError("matching_to_trees needs maximum degree 3; run degree_reduce first")
    m = len(graph.edges)
    left = [l for l in graph.left if dl[l]] + [("pad", "L", k) for k in range(m)]
    right = [r for r in graph.right if dr[r]] + [("pad", "R", k) for k in range(m)]
    left, right = left[:m], right[:m]

    roles: list = []
    index: dict = {}

    def label(role) -> int:
        roles.append(role)
        index[role] = len(roles)
        return len(roles)

    r1, r2 = label(("root", 1)), label(("root", 2))
    us = [label(("u", x)) for x in left]
    vs = [label(("v", y)) for y in right]
    edge_labels = {e: label(("edge", e)) for e in graph.edges}
    n = 7 * m + 2

    def build(root, mids, side_vertices, own_edges, pad_tag, extra_labels):
        par = {}
        pads = []
        for x, lab in zip(side_vertices, mids):
            par[lab] = root
            kids = [edge_labels[e] for e in own_edges.get(x, [])]
            for k in range(3 - len(kids)):
                p = label((pad_tag, x, k))
                pads.append(p)
                kids.append(p)
            for kid in kids:
                par[kid] = lab
        return par, pads

    inc_l: dict = {}
    inc_r: dict = {}
    for e in graph.edges:
        inc_l.setdefault(e[0], []).append(e)
        inc_r.setdefault(e[1], []).append(e)
    par1, pads1 = build(r1, us, left, inc_l, "pad1", None)
    par2, pads2 = build(r2, vs, right, inc_r, "pad2", None)
    # T1's extra leaves carry the labels that T2 uses for internal nodes,
    # padding leaves and its root, and symmetrically
    extras1 = pads2 + [r2] + vs
    extras2 = pads1 + [r1] + us
    assert len(extras1) == len(extras2) == 3 * m + 1
    for lab in extras1:
        par1[lab] = r1
    for lab in extras2:
        par2[lab] = r2
    assert len(roles) == n
    t1 = LabeledForest(tuple(par1.get(i, 0) for i in range(1, n + 1)))
    t2 = LabeledForest(tuple(par2.get(i, 0) for i in range(1, n + 1)))
    ledger = {lab: role for lab, role in enumerate(roles, 1)}
    return ReductionOutput(t1, t2, m, 0, ledger, left, right)


def reduce_matching(graph: BipartiteGraph) -> ReductionOutput:
    """Degree reduction followed by the tree construction."""
    reduced, k = degree_reduce(graph)
    out = matching_to_trees(reduced)
    out.split_count = k
    return out


def matching_size(graph: BipartiteGraph) -> int:
    return len(hopcroft_karp(graph.adjacency())[0])
