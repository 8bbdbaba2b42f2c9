"""Constant-factor approximation of the cut/permutation rearrangement distance.

Four passes over the parent vectors ``a`` (first forest, updated as it is
edited) and ``b`` (second forest, fixed):

1. cut both parents of every node whose two parents disagree;
2. under every node keep only the children whose ``b``-parent is the most
   common one among its children;
3. the same with the roles of the forests swapped;
4. one permutation sending each remaining ``a[u]`` to ``b[u]``.

The resulting script is within a factor 224 of the optimum: the passes cost
at most 4, 2*5, 2*15 and 4*45 times the distance of the original pair.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Optional

from .forest import (
    Cut,
    EditScript,
    ForestError,
    LabeledForest,
    LinkAndCut,
    Permutation,
    Permute,
    anchor,
    apply_op,
    apply_script,
    levels,
    permute,
    similar,
)

APPROX_FACTOR = 224


def _same_size(f1: LabeledForest, f2: LabeledForest) -> None:
    if f1.n != f2.n:
        raise ForestError(f"size mismatch: {f1.n} vs {f2.n}")


def family_partition(f1: LabeledForest, f2: LabeledForest) -> set[tuple[int, int]]:
    _same_size(f1, f2)
    return {(a, b) for a, b in zip(f1.parent, f2.parent) if a and b and a != b}


def migrations_graph(f1: LabeledForest, f2: LabeledForest) -> set[tuple[int, int]]:
    """Pairs ``(i, j)``, ``i < j``, of siblings in ``f1`` whose parents in ``f2`` differ."""
    _same_size(f1, f2)
    a, b = f1.padded(), f2.padded()
    groups: dict = {}
    for i in range(1, f1.n + 1):
        if a[i] and b[i]:
            groups.setdefault(a[i], []).append(i)
    edges = set()
    for members in groups.values():
        for x in range(len(members)):
            for y in range(x + 1, len(members)):
                i, j = members[x], members[y]
                if b[i] != b[j]:
                    edges.add((i, j))
    return edges


def mode(values) -> tuple[int, int]:
    """Most frequent value and its count; ties go to the smallest value."""
    counts = Counter(values)
    if not counts:
        raise ValueError("mode of an empty multiset")
    value = min(counts, key=lambda x: (-counts[x], x))
    return value, counts[value]


def pair_partition(items, key=None) -> tuple[list[tuple], list]:
    """Pair up elements of a multiset so that no pair holds two equal values.

    Produces ``f = min(|S| - freq(mode), |S| // 2)`` pairs, the most
    possible.  The elements are laid out mode block first, then the rest
    grouped by value; either the i-th element is paired with the i-th from
    the end, or with the one ``f`` places later, whichever bound is the
    smaller.  With ``key`` the elements are compared through ``key(x)``.
    """
    items = list(items)
    size = len(items)
    if not size:
        return [], []
    k = key if key is not None else (lambda x: x)
    top, freq = mode(k(x) for x in items)
    rest = sorted((x for x in items if k(x) != top), key=lambda x: k(x))
    seq = [x for x in items if k(x) == top] + rest
    f = min(size - freq, size // 2)
    if f == size - freq:
        pairs = [(seq[i], seq[size - 1 - i]) for i in range(f)]
        leftover = seq[f : size - f]
    else:
        # every value occupies a contiguous run of at most f places
        pairs = [(seq[i], seq[f + i]) for i in range(f)]
        leftover = seq[2 * f :]
    return pairs, leftover


def migrations_matching(f1: LabeledForest, f2: LabeledForest) -> list[tuple[int, int]]:
    """Maximum matching of the migrations graph.

    Each group of siblings induces a complete multipartite graph (parts by
    parent in ``f2``), where pairing the group is optimal.
    """
    _same_size(f1, f2)
    a, b = f1.padded(), f2.padded()
    groups: dict = {}
    for i in range(1, f1.n + 1):
        if a[i] and b[i]:
            groups.setdefault(a[i], []).append(i)
    out = []
    for members in groups.values():
        pairs, _ = pair_partition(members, key=lambda i: b[i])
        out.extend((min(p), max(p)) for p in pairs)
    return sorted(out)


@dataclass
class StepTrace:
    forests: list = field(default_factory=list)  # F1^0 .. F1^4
    cuts: list = field(default_factory=list)  # cut lists of steps 1-3
    perm: Optional[Permutation] = None
    rep: dict = field(default_factory=dict)
    rep2: dict = field(default_factory=dict)

    @property
    def alg(self) -> list[int]:
        """Operation cost of each of the four steps."""
        return [len(c) for c in self.cuts] + [self.perm.size if self.perm else 0]

    def report(self) -> str:
        lines = []
        for k, cuts in enumerate(self.cuts, 1):
            ops = " ".join(f"({c.v},{c.u})" for c in cuts)
            lines.append(f"step {k}: {len(cuts)} cuts {ops}".rstrip())
        perm = self.perm
        cyc = " ".join("(" + " ".join(map(str, c)) + ")" for c in perm.cycles()) if perm else ""
        lines.append(f"step 4: permutation of size {perm.size if perm else 0} {cyc}".rstrip())
        lines.append(f"total: {sum(self.alg)}")
        return "\n".join(lines) + "\n"


def _apply_cuts(forest: LabeledForest, cuts: list) -> LabeledForest:
    par = list(forest.parent)
    for c in cuts:
        if par[c.v - 1] != c.u:
            raise ForestError(f"cut {c.v} {c.u} does not match the forest")
        par[c.v - 1] = 0
    return LabeledForest(tuple(par))


def step1(f1: LabeledForest, f2: LabeledForest) -> tuple[LabeledForest, list]:
    """Make both parents of every disagreeing node roots."""
    _same_size(f1, f2)
    a, b = f1.padded(), f2.padded()
    targets: dict = {}
    for i in range(1, f1.n + 1):
        if a[i] and b[i] and a[i] != b[i]:
            targets[a[i]] = None
            targets[b[i]] = None
    cuts = [Cut(x, a[x]) for x in targets if a[x]]
    return _apply_cuts(f1, cuts), cuts


def step2(f1: LabeledForest, f2: LabeledForest) -> tuple[LabeledForest, list, dict]:
    """Under each node keep only children whose parent in ``f2`` is the majority one."""
    _same_size(f1, f2)
    b = f2.padded()
    children = f1.children()
    cuts, rep = [], {}
    for u in range(1, f1.n + 1):
        bs = [b[v] for v in children[u] if b[v]]
        if not bs:
            rep[u] = u
            continue
        rep[u], _ = mode(bs)
        cuts.extend(Cut(v, u) for v in children[u] if b[v] and b[v] != rep[u])
    return _apply_cuts(f1, cuts), cuts, rep


def step3(f1: LabeledForest, f2: LabeledForest) -> tuple[LabeledForest, list, dict]:
    """Step 2 with the forests' roles swapped: group the children of each node of ``f2``."""
    _same_size(f1, f2)
    a = f1.padded()
    children2 = f2.children()
    cuts, rep2 = [], {}
    for u in range(1, f1.n + 1):
        as_ = [a[v] for v in children2[u] if a[v]]
        if not as_:
            rep2[u] = u
            continue
        rep2[u], _ = mode(as_)
        cuts.extend(Cut(v, a[v]) for v in children2[u] if a[v] and a[v] != rep2[u])
    return _apply_cuts(f1, cuts), cuts, rep2


def check_step3_properties(f1: LabeledForest, f2: LabeledForest, rep: dict, rep2: dict) -> None:
    a, b = f1.padded(), f2.padded()
    children1, children2 = f1.children(), f2.children()
    for u in range(1, f1.n + 1):
        if a[u] and b[u] and a[u] != b[u] and (a[a[u]] or a[b[u]]):
            raise AssertionError(f"parents of {u} are not both roots")
        if any(b[v] and b[v] != rep.get(u, u) for v in children1[u]):
            raise AssertionError(f"children of {u} disagree on their parent in the second forest")
        if any(a[v] and a[v] != rep2.get(u, u) for v in children2[u]):
            raise AssertionError(f"children of {u} in the second forest disagree on their parent")


def step4(f1: LabeledForest, f2: LabeledForest) -> tuple[LabeledForest, Permutation]:
    """Permutation with ``pi(a[u]) = b[u]`` wherever the two parents still disagree.

    The requirements form disjoint paths and cycles; every path is closed
    into a cycle by mapping its last node back to its first.
    """
    _same_size(f1, f2)
    a, b = f1.padded(), f2.padded()
    req: dict = {}
    inv: dict = {}
    for u in range(1, f1.n + 1):
        x, y = a[u], b[u]
        if x and y and x != y:
            if req.get(x, y) != y:
                raise AssertionError(f"{x} is required to go to both {req[x]} and {y}")
            if inv.get(y, x) != x:
                raise AssertionError(f"{y} is required from both {inv[y]} and {x}")
            req[x] = y
            inv[y] = x
    mapping = dict(req)
    for start in sorted(req):
        if start in inv:
            continue
        end = start
        while end in req:
            end = req[end]
        mapping[end] = start
    pi = Permutation.from_mapping(f1.n, mapping)
    out = permute(f1, pi)
    if not similar(out, f2):
        raise AssertionError("step 4 did not reach a similar forest")
    return out, pi


def approximate_rearrangement(f1: LabeledForest, f2: LabeledForest) -> tuple[EditScript, StepTrace]:
    """Cut/permutation script taking ``f1`` to a forest similar to ``f2``."""
    _same_size(f1, f2)
    trace = StepTrace(forests=[f1])
    g1, c1 = step1(f1, f2)
    g2, c2, trace.rep = step2(g1, f2)
    g3, c3, trace.rep2 = step3(g2, f2)
    check_step3_properties(g3, f2, trace.rep, trace.rep2)
    g4, pi = step4(g3, f2)
    trace.forests += [g1, g2, g3, g4]
    trace.cuts = [c1, c2, c3]
    trace.perm = pi
    ops = [*c1, *c2, *c3]
    if pi.size:
        ops.append(Permute(pi))
    script = EditScript(ops)
    final = apply_script(f1, script)
    if final != g4 or not similar(final, f2):
        raise AssertionError("script does not reproduce the traced forests")
    return script, trace


@dataclass
class TreeApproximation:
    """Approximate link-and-cut distance of two trees, computed on their anchored versions."""

    size: int
    script: EditScript  # cuts then one permutation, on the anchored trees
    trace: StepTrace
    link_script: Optional[EditScript] = None  # permutation then link-and-cuts, when available
    anchored: tuple = ()


def approximate_tree_distance(t1: LabeledForest, t2: LabeledForest) -> TreeApproximation:
    if not (t1.is_tree() and t2.is_tree()):
        raise ForestError("approximate_tree_distance needs two trees")
    _same_size(t1, t2)
    if t1.root != t2.root:
        raise ForestError(f"roots differ: {t1.root} vs {t2.root}")
    a1, a2 = anchor(t1), anchor(t2)
    script, trace = approximate_rearrangement(a1, a2)
    out = TreeApproximation(script.size, script, trace, anchored=(a1, a2))
    if trace.perm(a1.root) == a1.root:
        out.link_script = to_link_script(a1, a2, script)
    return out


def to_link_script(t1: LabeledForest, t2: LabeledForest, script: EditScript) -> Optional[EditScript]:
    """Turn "cuts then permutation" into "permutation then link-and-cuts" reaching ``t2`` exactly.

    Each cut ``(v, u)`` becomes, after the permutation, a cut of
    ``(pi(v), pi(u))``; it is replaced by relinking ``pi(v)`` to its parent in
    ``t2``, deepest nodes of ``t2`` first.  Returns None if the result does
    not check out (this conversion is only guaranteed for optimal scripts).
    """
    pi = Permutation.identity(t1.n)
    cuts = []
    for op in script:
        if isinstance(op, Cut):
            cuts.append(op)
        elif isinstance(op, Permute):
            pi = op.pi
        else:
            raise ValueError("expected cuts followed by one permutation")
    lev2 = levels(t2)
    links = []
    for c in cuts:
        v, u = pi(c.v), pi(c.u)
        w = t2.parent_of(v)
        if not w:
            return None
        if w != u:  # the cut node ends up back under the same parent
            links.append(LinkAndCut(v, u, w))
    links.sort(key=lambda op: (-lev2[op.v - 1], op.v))
    ops = ([Permute(pi)] if pi.size else []) + links
    forest = t1
    try:
        for op in ops:
            forest = apply_op(forest, op)
    except ForestError:
        return None
    if forest != t2:
        return None
    return EditScript(ops)
