"""Permutation distance between isomorphic fully-labelled trees.

``gamma(u, v)`` is the largest number of labels an isomorphism of ``T1|u``
onto ``T2|v`` can keep in place; the permutation distance of two trees is
``n - gamma(root1, root2)``.

Two solvers are provided.  :func:`gamma_baseline` evaluates the recursion
on every distance graph with an exact assignment solver.  :func:`gamma_fast`
only materialises the graphs that contain a non-special edge or sit on the
diagonal, recovers the remaining values along heavy paths, and splits off
the special edge so that every weighted matching it solves has small total
weight and can go through the unweighted decomposition.
"""

from __future__ import annotations

import bisect
import gc
import math
from collections import defaultdict
from contextlib import contextmanager
from dataclasses import dataclass, field
from typing import Optional

from .forest import LabeledForest, Permutation
from .heavypath import HeavyPathDecomposition, ancestor_pairs, decompose_consistent
from .isomorphism import CanonicalIds, NotIsomorphic, canonical_ids
from .matching import _decompose, _tight_matching, assignment_mwm


@dataclass
class DistanceGraph:
    """``G(u, v)`` on the children of ``u`` in T1 and of ``v`` in T2.

    ``edges`` maps a non-special child pair to its weight (``None`` until
    resolved); the special edge joins the heavy children and is kept apart.
    """

    u: int
    v: int
    level: int
    bonus: int
    special: Optional[tuple[int, int]] = None
    edges: dict = field(default_factory=dict)
    special_weight: int = 0
    gamma: Optional[int] = None
    # weights of G' (special edge removed) and G'' (heavy children removed)
    without_special: int = 0
    without_heavy: int = 0

    @property
    def key(self) -> tuple[int, int]:
        return self.u, self.v


@dataclass
class GammaIndex:
    """Gamma of every materialised pair, plus per heavy-path-pair level lists.

    ``lists[(h1, h2)]`` holds ``(negated levels, gammas)`` in the order the
    pairs were solved, which is by decreasing level, so the negated levels
    are ascending and can be bisected.
    """

    values: dict = field(default_factory=dict)
    lists: dict = field(default_factory=lambda: defaultdict(lambda: ([], [])))

    def record(self, h1: HeavyPathDecomposition, h2: HeavyPathDecomposition, u: int, v: int, gamma: int):
        self.values[(u, v)] = gamma
        neg, vals = self.lists[(h1.head[u], h2.head[v])]
        neg.append(-h1.level[u])
        vals.append(gamma)


def _prepare(t1: LabeledForest, t2: LabeledForest):
    if t1.n != t2.n:
        raise NotIsomorphic(f"different sizes {t1.n} and {t2.n}")
    ids = canonical_ids(t1, t2)
    if ids.ids1[t1.root] != ids.ids2[t2.root]:
        raise NotIsomorphic("trees are not isomorphic")
    return ids


def _candidates(ids: CanonicalIds, h1: HeavyPathDecomposition, h2: HeavyPathDecomposition) -> list[int]:
    """Labels at the same level with isomorphic subtrees in both trees."""
    id1, id2, l1, l2 = ids.ids1, ids.ids2, h1.level, h2.level
    return [x for x in range(1, h1.n + 1) if l1[x] == l2[x] and id1[x] == id2[x]]


# --- baseline -----------------------------------------------------------------


@dataclass
class BaselineResult:
    table: dict  # (u, v) -> gamma, for every pair that can have gamma > 0
    root_pair: tuple[int, int]
    ids: CanonicalIds
    level1: list
    level2: list

    @property
    def root_gamma(self) -> int:
        return self.table.get(self.root_pair, 0)

    def gamma(self, u: int, v: int) -> int:
        if self.level1[u] != self.level2[v] or self.ids.ids1[u] != self.ids.ids2[v]:
            raise ValueError(f"({u}, {v}) is not a same-level isomorphic pair")
        return self.table.get((u, v), 0)


def gamma_baseline(t1: LabeledForest, t2: LabeledForest) -> BaselineResult:
    """Gamma of every same-level isomorphic pair, bottom-up over all distance graphs.

    A pair can only have positive gamma if some label below both nodes is a
    candidate for being kept, so the graphs are built from the ancestor
    pairs of such labels; all other pairs have gamma 0.
    """
    ids = _prepare(t1, t2)
    id1, id2 = ids.ids1, ids.ids2
    par1, par2 = t1.padded(), t2.padded()
    h1, h2 = HeavyPathDecomposition(t1), HeavyPathDecomposition(t2)
    lev1, lev2 = h1.level, h2.level

    pairs = set()
    for x in _candidates(ids, h1, h2):
        z = w = x
        while z:
            if id1[z] == id2[w]:
                pairs.add((z, w))
            z, w = par1[z], par2[w]
    graphs: dict = defaultdict(list)
    for z, w in pairs:
        pz, pw = par1[z], par2[w]
        if pz and (pz, pw) in pairs:
            graphs[(pz, pw)].append((z, w))

    table: dict = {}
    for u, v in sorted(pairs, key=lambda p: (-lev1[p[0]], p)):
        edges = [(z, w, table[(z, w)]) for z, w in graphs.get((u, v), ()) if table.get((z, w), 0) > 0]
        weight, _ = assignment_mwm(edges)
        g = weight + (1 if u == v else 0)
        if g:
            table[(u, v)] = g
    return BaselineResult(table, (t1.root, t2.root), ids, lev1, lev2)


# --- fast algorithm -------------------------------------------------------------


def classify_graphs(ids: CanonicalIds, h1: HeavyPathDecomposition, h2: HeavyPathDecomposition):
    """Keys of the graphs with a non-special edge (type 1) and the remaining diagonal ones (type 2)."""
    id1, id2 = ids.ids1, ids.ids2
    par1, par2 = h1.parent, h2.parent
    cands = _candidates(ids, h1, h2)
    type1: dict = {}
    for x in cands:
        for z, w in ancestor_pairs(h1, h2, x, x):
            if id1[z] != id2[w]:
                continue
            pz, pw = par1[z], par2[w]
            if pz and id1[pz] == id2[pw]:
                type1[(pz, pw)] = None
    type2 = {(x, x): None for x in cands if (x, x) not in type1}
    return type1, type2


def populate_edges(ids: CanonicalIds, h1: HeavyPathDecomposition, h2: HeavyPathDecomposition, type1: dict, type2: dict) -> dict:
    """Build the type 1 and 2 graphs with their special and non-special edges (weights unresolved)."""
    id1, id2 = ids.ids1, ids.ids2
    par1, par2 = h1.parent, h2.parent
    lev1 = h1.level
    graphs: dict = {}
    for keys in (type1, type2):
        for u, v in keys:
            g = DistanceGraph(u, v, lev1[u], 1 if u == v else 0)
            hu, hv = h1.heavy[u], h2.heavy[v]
            if hu and hv:
                g.special = (hu, hv)
            graphs[(u, v)] = g
    for x in _candidates(ids, h1, h2):
        for z, w in ancestor_pairs(h1, h2, x, x):
            if id1[z] != id2[w]:
                continue
            pz, pw = par1[z], par2[w]
            if pz and id1[pz] == id2[pw]:
                graphs[(pz, pw)].edges[(z, w)] = None
    return graphs


def gamma_lookup(index: GammaIndex, h1: HeavyPathDecomposition, h2: HeavyPathDecomposition, u: int, v: int) -> int:
    """Gamma of a same-level isomorphic pair whose deeper levels are all solved.

    Pairs without a materialised graph inherit the value of their heavy
    children, so the answer is the first solved pair further down the same
    two heavy paths, or 0 if the paths reach their leaves first.
    """
    got = index.values.get((u, v))
    if got is not None:
        return got
    entry = index.lists.get((h1.head[u], h2.head[v]))
    if entry is None:
        return 0
    neg, vals = entry
    k = bisect.bisect_right(neg, -h1.level[u]) - 1
    return vals[k] if k >= 0 else 0


@dataclass
class FastResult:
    gamma: int
    index: GammaIndex
    ids: CanonicalIds
    h1: HeavyPathDecomposition
    h2: HeavyPathDecomposition
    type1: int
    type2: int
    nonspecial_edges: int = 0
    nonspecial_weight: int = 0
    # edges handed to unweighted matchings, summed over all graphs
    instance_edges: int = 0
    graphs: Optional[list] = None
    witness: Optional[dict] = None

    @property
    def n(self) -> int:
        return self.h1.n

    def weight_bound(self) -> int:
        """Upper bound on the total non-special edge weight: 2 n ceil(log2 n)."""
        return 2 * self.n * math.ceil(math.log2(self.n)) if self.n > 1 else 0


def _solve(edges: list, witness: bool):
    if not edges:
        return 0, [], 0
    if len({l for l, _, _ in edges}) == len(edges) == len({r for _, r, _ in edges}):
        # already a matching
        return sum(w for _, _, w in edges), [(l, r) for l, r, _ in edges], len(edges)
    weight, cl, cr, inst = _decompose(edges)
    pairs = _tight_matching(edges, cl, cr) if witness else None
    return weight, pairs, inst


@contextmanager
def _gc_paused():
    # the solver allocates millions of small tuples and no cycles
    enabled = gc.isenabled()
    gc.disable()
    try:
        yield
    finally:
        if enabled:
            gc.enable()


def gamma_fast(t1: LabeledForest, t2: LabeledForest, keep_graphs: bool = False, witness: bool = False) -> FastResult:
    with _gc_paused():
        return _gamma_fast(t1, t2, keep_graphs, witness)


def _gamma_fast(t1, t2, keep_graphs, witness) -> FastResult:
    ids = _prepare(t1, t2)
    h1, h2 = decompose_consistent(t1, t2, ids)
    type1, type2 = classify_graphs(ids, h1, h2)
    graphs = populate_edges(ids, h1, h2, type1, type2)
    order = sorted(graphs.values(), key=lambda g: (-g.level, g.u, g.v))

    index = GammaIndex()
    res = FastResult(0, index, ids, h1, h2, len(type1), len(type2))
    chosen: dict = {} if witness else None
    for g in order:
        live = []
        for (z, w) in g.edges:
            wt = gamma_lookup(index, h1, h2, z, w)
            g.edges[(z, w)] = wt
            res.nonspecial_edges += 1
            res.nonspecial_weight += wt
            if wt > 0:
                live.append((z, w, wt))
        w1, m1, inst = _solve(live, witness)
        res.instance_edges += inst
        g.without_special = w1
        best, pick = w1, m1
        if g.special is not None:
            su, sv = g.special
            g.special_weight = gamma_lookup(index, h1, h2, su, sv)
            rest = [e for e in live if e[0] != su and e[1] != sv]
            w2, m2, inst = _solve(rest, witness)
            res.instance_edges += inst
            g.without_heavy = w2
            if w2 + g.special_weight > best:
                best = w2 + g.special_weight
                pick = m2 + [g.special] if witness else None
        g.gamma = best + g.bonus
        index.record(h1, h2, g.u, g.v, g.gamma)
        if witness:
            chosen[g.key] = pick
    res.gamma = gamma_lookup(index, h1, h2, t1.root, t2.root)
    if keep_graphs:
        res.graphs = order
    res.witness = chosen
    return res


def permutation_distance(t1: LabeledForest, t2: LabeledForest) -> int:
    return t1.n - gamma_fast(t1, t2).gamma


def recover_permutation(t1: LabeledForest, t2: LabeledForest) -> Permutation:
    """A smallest permutation turning ``t1`` into ``t2``.

    Descends from the roots: materialised pairs follow the matching chosen
    for them, other pairs follow their heavy children, and children left
    over are paired arbitrarily by subtree shape.
    """
    res = gamma_fast(t1, t2, witness=True)
    h1, h2 = res.h1, res.h2
    id1, id2 = res.ids.ids1, res.ids.ids2
    mu = [0] * (t1.n + 1)
    stack = [(t1.root, t2.root)]
    while stack:
        u, v = stack.pop()
        mu[u] = v
        picked = res.witness.get((u, v))
        if picked is None:
            picked = [(h1.heavy[u], h2.heavy[v])] if h1.heavy[u] else []
        used1 = {a for a, _ in picked}
        used2 = {b for _, b in picked}
        stack.extend(picked)
        spare: dict = defaultdict(list)
        for b in h2.children[v]:
            if b not in used2:
                spare[id2[b]].append(b)
        for a in h1.children[u]:
            if a not in used1:
                stack.append((a, spare[id1[a]].pop()))
    pi = Permutation(tuple(mu[1:]))
    if t1.n - pi.size != res.gamma:
        raise AssertionError(f"recovered permutation keeps {t1.n - pi.size} labels, expected {res.gamma}")
    return pi
