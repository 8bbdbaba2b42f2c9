"""Heavy path decomposition with tie-breaking that is consistent across two trees."""

from __future__ import annotations

from typing import Iterator, Optional

from .forest import ForestError, LabeledForest, bfs_order
from .isomorphism import CanonicalIds


class HeavyPathDecomposition:
    """Heavy paths of one tree.

    All per-node arrays are indexed by label with slot 0 standing for "no
    node".  ``paths[h]`` lists the nodes of the path headed by ``h`` from the
    head down to its leaf, so ``paths[head[u]][pos[u]] == u``.

    Parameters
    ----------
    tree : LabeledForest
        A single tree.
    ids : list of int, optional
        Canonical subtree ids of ``tree``.  When given, the heavy child of a
        node is picked as a function of its id multiset, which makes the
        choice agree between any two nodes with isomorphic subtrees.
    """

    def __init__(self, tree: LabeledForest, ids: Optional[list[int]] = None):
        if not tree.is_tree():
            raise ForestError("heavy path decomposition needs a single tree")
        n = tree.n
        self.n = n
        self.root = tree.root
        self.parent = tree.padded()
        self.children = tree.children()
        order = bfs_order(tree, self.children)
        self.order = order

        level = [0] * (n + 1)
        for u in order:
            p = self.parent[u]
            if p:
                level[u] = level[p] + 1
        size = [1] * (n + 1)
        size[0] = 0
        for u in reversed(order):
            p = self.parent[u]
            if p:
                size[p] += size[u]
        self.level = level
        self.size = size

        heavy = [0] * (n + 1)
        for u in range(1, n + 1):
            ch = self.children[u]
            if not ch:
                continue
            # ch is ascending, so min() settles remaining ties on the smallest label
            if ids is None:
                heavy[u] = min(ch, key=lambda c: -size[c])
            else:
                heavy[u] = min(ch, key=lambda c: (-size[c], ids[c]))
        self.heavy = heavy

        head = [0] * (n + 1)
        pos = [0] * (n + 1)
        paths: dict[int, list[int]] = {}
        for u in order:
            p = self.parent[u]
            if p and heavy[p] == u:
                h = head[p]
                head[u] = h
                pos[u] = len(paths[h])
                paths[h].append(u)
            else:
                head[u] = u
                paths[u] = [u]
        self.head = head
        self.pos = pos
        self.paths = paths

    def is_head(self, u: int) -> bool:
        return self.head[u] == u

    def access(self, u: int, lev: int) -> Optional[int]:
        """Node on the heavy path of ``u`` at level ``lev``, or None below the path's leaf."""
        h = self.head[u]
        k = lev - self.level[h]
        if k < 0:
            raise ForestError(f"level {lev} is above the head of the path of {u}")
        path = self.paths[h]
        return path[k] if k < len(path) else None

    def heads_above(self, u: int) -> int:
        """Number of distinct heavy paths met on the way from ``u`` to the root."""
        count = 0
        while u:
            count += 1
            u = self.parent[self.head[u]]
        return count


def decompose_consistent(t1: LabeledForest, t2: LabeledForest, ids: CanonicalIds):
    """Decompose both trees so that nodes with equal ids get heavy children with equal ids."""
    return HeavyPathDecomposition(t1, ids.ids1), HeavyPathDecomposition(t2, ids.ids2)


def ancestor_pairs(
    h1: HeavyPathDecomposition, h2: HeavyPathDecomposition, u: int, v: int
) -> Iterator[tuple[int, int]]:
    """Same-level ancestor pairs ``(z, w)`` of ``u`` and ``v`` where ``z`` or ``w`` heads a path.

    Walks both trees one heavy path at a time, so it yields O(log n) pairs.
    """
    if h1.level[u] != h2.level[v]:
        raise ForestError(f"level mismatch: {h1.level[u]} vs {h2.level[v]}")
    head1, head2 = h1.head, h2.head
    lev1, lev2 = h1.level, h2.level
    par1, par2 = h1.parent, h2.parent
    while u and v:
        a, b = head1[u], head2[v]
        la, lb = lev1[a], lev2[b]
        if la < lb:
            yield h1.access(u, lb), b
            v = par2[b]
        elif la > lb:
            yield a, h2.access(v, la)
            u = par1[a]
        else:
            yield a, b
            u = par1[a]
            v = par2[b]
