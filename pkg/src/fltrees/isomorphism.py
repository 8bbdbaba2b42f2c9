"""Shared AHU canonical numbering of the subtrees of two rooted trees."""

from __future__ import annotations

from dataclasses import dataclass

from .forest import ForestError, LabeledForest, bfs_order


class NotIsomorphic(ValueError):
    """Raised when a distance needs isomorphic trees and gets others."""


@dataclass(frozen=True)
class CanonicalIds:
    """Per-node subtree ids for two trees, drawn from one id space.

    ``ids1[u]`` / ``ids2[v]`` are indexed by label (slot 0 unused).  Two
    subtrees, in the same tree or across trees, are isomorphic exactly when
    their ids are equal.  Leaves get id 1.
    """

    ids1: list[int]
    ids2: list[int]
    sizes: dict[int, int]

    def id_count(self) -> int:
        return len(self.sizes)


def _number(tree: LabeledForest, table: dict, sizes: dict) -> list[int]:
    children = tree.children()
    ids = [0] * (tree.n + 1)
    for u in reversed(bfs_order(tree, children)):
        key = tuple(sorted(ids[c] for c in children[u]))
        cid = table.get(key)
        if cid is None:
            cid = table[key] = len(table) + 1
            sizes[cid] = 1 + sum(sizes[k] for k in key)
        ids[u] = cid
    return ids


def canonical_ids(t1: LabeledForest, t2: LabeledForest) -> CanonicalIds:
    if not (t1.is_tree() and t2.is_tree()):
        raise ForestError("canonical_ids needs two trees")
    # the signature of a node (sorted child ids) fixes its height, so one
    # table shared by both trees gives the same id to equal shapes
    table: dict[tuple[int, ...], int] = {}
    sizes: dict[int, int] = {}
    ids1 = _number(t1, table, sizes)
    ids2 = _number(t2, table, sizes)
    return CanonicalIds(ids1, ids2, sizes)


def isomorphic(t1: LabeledForest, t2: LabeledForest) -> bool:
    if t1.n != t2.n:
        return False
    ids = canonical_ids(t1, t2)
    return ids.ids1[t1.root] == ids.ids2[t2.root]
