"""Fully-labelled forests stored as parent vectors, and the edit operations on them.

A forest on ``n`` nodes uses the labels ``1..n``.  ``parent[i - 1]`` is the
parent of node ``i``, or ``0`` when ``i`` is a root.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence, Union


class ForestError(ValueError):
    """Raised for malformed input or an operation whose precondition fails."""


class ScriptError(ForestError):
    """Raised by :func:`apply_script`; ``index`` is the position of the failing op."""

    def __init__(self, index: int, cause: ForestError):
        super().__init__(f"op {index}: {cause}")
        self.index = index
        self.cause = cause


@dataclass(frozen=True)
class LabeledForest:
    parent: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "parent", tuple(int(x) for x in self.parent))
        _validate(self.parent)

    @classmethod
    def from_parents(cls, parents: Iterable[int]) -> "LabeledForest":
        return cls(tuple(parents))

    @property
    def n(self) -> int:
        return len(self.parent)

    def parent_of(self, u: int) -> int:
        return self.parent[u - 1]

    def padded(self) -> list[int]:
        """Parent list indexed by label, with a dummy slot 0."""
        return [0, *self.parent]

    def roots(self) -> list[int]:
        return [i for i, p in enumerate(self.parent, 1) if p == 0]

    def is_tree(self) -> bool:
        return self.n >= 1 and sum(1 for p in self.parent if p == 0) == 1

    @property
    def root(self) -> int:
        roots = self.roots()
        if len(roots) != 1:
            raise ForestError(f"expected a single tree, found {len(roots)} roots")
        return roots[0]

    def children(self) -> list[list[int]]:
        """Children lists indexed by label (slot 0 holds the roots), ascending."""
        ch: list[list[int]] = [[] for _ in range(self.n + 1)]
        for i, p in enumerate(self.parent, 1):
            ch[p].append(i)
        return ch

    def levels(self) -> list[int]:
        return levels(self)

    def __str__(self) -> str:
        return format_forest(self)


def _validate(parent: Sequence[int]) -> None:
    n = len(parent)
    for i, p in enumerate(parent, 1):
        if p < 0 or p > n:
            raise ForestError(f"parent of {i} is {p}, outside 0..{n}")
        if p == i:
            raise ForestError(f"node {i} is its own parent")
    # 0 = unvisited, 1 = on current walk, 2 = reaches a root
    state = [0] * (n + 1)
    for start in range(1, n + 1):
        walk = []
        u = start
        while u != 0 and state[u] == 0:
            state[u] = 1
            walk.append(u)
            u = parent[u - 1]
        if u != 0 and state[u] == 1:
            raise ForestError(f"cycle through node {u}")
        for w in walk:
            state[w] = 2


def levels(forest: LabeledForest) -> list[int]:
    """Depth of every node, roots at level 0.  Returned as ``level[i - 1]``."""
    par = forest.padded()
    lev = [-1] * (forest.n + 1)
    lev[0] = -1
    for start in range(1, forest.n + 1):
        stack = []
        u = start
        while u != 0 and lev[u] < 0:
            stack.append(u)
            u = par[u]
        base = lev[u] if u != 0 else -1
        while stack:
            base += 1
            lev[stack.pop()] = base
    return lev[1:]


def is_descendant(forest: LabeledForest, x: int, v: int) -> bool:
    """True when ``x`` lies in the subtree rooted at ``v`` (``x == v`` counts)."""
    while x != 0:
        if x == v:
            return True
        x = forest.parent[x - 1]
    return False


# --- permutations ---------------------------------------------------------


@dataclass(frozen=True)
class Permutation:
    """A bijection on ``1..n`` stored as its image vector: ``image[x - 1] = pi(x)``."""

    image: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "image", tuple(int(x) for x in self.image))
        n = len(self.image)
        if sorted(self.image) != list(range(1, n + 1)):
            raise ForestError("permutation image is not a bijection on 1..n")

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        return cls(tuple(range(1, n + 1)))

    @classmethod
    def from_mapping(cls, n: int, mapping: dict[int, int]) -> "Permutation":
        img = list(range(1, n + 1))
        for x, y in mapping.items():
            if not (1 <= x <= n and 1 <= y <= n):
                raise ForestError(f"pair {x}:{y} outside 1..{n}")
            img[x - 1] = y
        return cls(tuple(img))

    @classmethod
    def from_cycles(cls, n: int, cycles: Iterable[Sequence[int]]) -> "Permutation":
        mapping = {}
        for cyc in cycles:
            for k, x in enumerate(cyc):
                mapping[x] = cyc[(k + 1) % len(cyc)]
        return cls.from_mapping(n, mapping)

    @property
    def n(self) -> int:
        return len(self.image)

    def __call__(self, x: int) -> int:
        return self.image[x - 1]

    @property
    def size(self) -> int:
        return sum(1 for x, y in enumerate(self.image, 1) if x != y)

    def moved(self) -> dict[int, int]:
        return {x: y for x, y in enumerate(self.image, 1) if x != y}

    def inverse(self) -> "Permutation":
        inv = [0] * self.n
        for x, y in enumerate(self.image, 1):
            inv[y - 1] = x
        return Permutation(tuple(inv))

    def cycles(self) -> list[tuple[int, ...]]:
        seen = set()
        out = []
        for x in range(1, self.n + 1):
            if x in seen or self.image[x - 1] == x:
                continue
            cyc = []
            y = x
            while y not in seen:
                seen.add(y)
                cyc.append(y)
                y = self.image[y - 1]
            out.append(tuple(cyc))
        return out


# --- edit operations --------------------------------------------------------


@dataclass(frozen=True)
class Cut:
    v: int
    u: int

    @property
    def size(self) -> int:
        return 1


@dataclass(frozen=True)
class LinkAndCut:
    v: int
    u: int
    w: int

    @property
    def size(self) -> int:
        return 1


@dataclass(frozen=True)
class Permute:
    pi: Permutation

    @property
    def size(self) -> int:
        return self.pi.size


EditOp = Union[Cut, LinkAndCut, Permute]


@dataclass
class EditScript:
    ops: list = field(default_factory=list)

    @property
    def size(self) -> int:
        return sum(op.size for op in self.ops)

    def __len__(self) -> int:
        return len(self.ops)

    def __iter__(self):
        return iter(self.ops)


def _check_node(forest: LabeledForest, *nodes: int) -> None:
    for x in nodes:
        if not 1 <= x <= forest.n:
            raise ForestError(f"node {x} outside 1..{forest.n}")


def apply_op(forest: LabeledForest, op: EditOp) -> LabeledForest:
    if isinstance(op, Cut):
        _check_node(forest, op.v, op.u)
        if forest.parent_of(op.v) != op.u:
            raise ForestError(f"cut {op.v} {op.u}: {op.u} is not the parent of {op.v}")
        par = list(forest.parent)
        par[op.v - 1] = 0
        return LabeledForest(tuple(par))
    if isinstance(op, LinkAndCut):
        _check_node(forest, op.v, op.u, op.w)
        if forest.parent_of(op.v) != op.u:
            raise ForestError(f"link {op.v} {op.u} {op.w}: {op.u} is not the parent of {op.v}")
        if is_descendant(forest, op.w, op.v):
            raise ForestError(f"link {op.v} {op.u} {op.w}: {op.w} is a descendant of {op.v}")
        par = list(forest.parent)
        par[op.v - 1] = op.w
        return LabeledForest(tuple(par))
    if isinstance(op, Permute):
        return permute(forest, op.pi)
    raise TypeError(f"not an edit operation: {op!r}")


def permute(forest: LabeledForest, pi: Permutation) -> LabeledForest:
    """Relabel every node ``u`` as ``pi(u)``; edges follow their endpoints."""
    if pi.n != forest.n:
        raise ForestError(f"permutation on {pi.n} labels applied to forest on {forest.n}")
    img = pi.image
    par = [0] * forest.n
    for u, p in enumerate(forest.parent, 1):
        par[img[u - 1] - 1] = img[p - 1] if p else 0
    return LabeledForest(tuple(par))


def apply_script(forest: LabeledForest, script: EditScript | Iterable[EditOp]) -> LabeledForest:
    for k, op in enumerate(script):
        try:
            forest = apply_op(forest, op)
        except ForestError as exc:
            raise ScriptError(k, exc) from exc
    return forest


def similar(f1: LabeledForest, f2: LabeledForest) -> bool:
    """Every node has equal parents in both forests or is a root in at least one."""
    if f1.n != f2.n:
        raise ForestError(f"size mismatch: {f1.n} vs {f2.n}")
    return all(a == b or a == 0 or b == 0 for a, b in zip(f1.parent, f2.parent))


def anchor(tree: LabeledForest) -> LabeledForest:
    """Attach ``n`` new leaves ``n+1..2n`` to the root of a tree on ``n`` nodes."""
    if not tree.is_tree():
        raise ForestError("anchor needs a single tree")
    return LabeledForest(tree.parent + (tree.root,) * tree.n)


# --- text formats -----------------------------------------------------------


def _content_lines(text: str) -> list[str]:
    return [ln for ln in (raw.strip() for raw in text.splitlines()) if ln and not ln.startswith("#")]


def parse_forest(text: str) -> LabeledForest:
    lines = _content_lines(text)
    if not lines:
        raise ForestError("empty forest file")
    try:
        n = int(lines[0])
        values = [int(tok) for ln in lines[1:] for tok in ln.split()]
    except ValueError as exc:
        raise ForestError(f"malformed integer: {exc}") from None
    if n < 0:
        raise ForestError(f"negative node count {n}")
    if len(values) != n:
        raise ForestError(f"expected {n} parent entries, got {len(values)}")
    return LabeledForest(tuple(values))


def format_forest(forest: LabeledForest) -> str:
    return f"{forest.n}\n{' '.join(map(str, forest.parent))}\n"


def read_forest(path) -> LabeledForest:
    with open(path, encoding="utf-8") as fh:
        return parse_forest(fh.read())


def write_forest(path, forest: LabeledForest) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_forest(forest))


def parse_script(text: str, n: int) -> EditScript:
    """Parse ``cut v u`` / ``link v u w`` / ``perm x:y ...`` lines for a forest on ``n`` nodes."""
    ops: list = []
    for ln in _content_lines(text):
        kind, *args = ln.split()
        try:
            if kind == "cut" and len(args) == 2:
                ops.append(Cut(int(args[0]), int(args[1])))
            elif kind == "link" and len(args) == 3:
                ops.append(LinkAndCut(int(args[0]), int(args[1]), int(args[2])))
            elif kind == "perm":
                pairs = [tuple(int(t) for t in a.split(":")) for a in args]
                if any(len(p) != 2 for p in pairs):
                    raise ForestError(f"bad perm pair in {ln!r}")
                dom = [x for x, _ in pairs]
                rng = [y for _, y in pairs]
                if len(set(dom)) != len(dom) or set(dom) != set(rng):
                    raise ForestError(f"perm pairs are not a bijection on their domain: {ln!r}")
                ops.append(Permute(Permutation.from_mapping(n, dict(pairs))))
            else:
                raise ForestError(f"unrecognised script line {ln!r}")
        except ValueError as exc:
            if isinstance(exc, ForestError):
                raise
            raise ForestError(f"malformed integer in {ln!r}") from None
    return EditScript(ops)


def format_op(op: EditOp) -> str:
    if isinstance(op, Cut):
        return f"cut {op.v} {op.u}"
    if isinstance(op, LinkAndCut):
        return f"link {op.v} {op.u} {op.w}"
    moved = op.pi.moved()
    return "perm " + " ".join(f"{x}:{y}" for x, y in sorted(moved.items())) if moved else "perm"


def format_script(script: EditScript) -> str:
    return "".join(format_op(op) + "\n" for op in script)


def bfs_order(forest: LabeledForest, children: list[list[int]] | None = None) -> list[int]:
    """Nodes in breadth-first order from the roots (parents before children)."""
    ch = children if children is not None else forest.children()
    order = list(ch[0])
    k = 0
    while k < len(order):
        order.extend(ch[order[k]])
        k += 1
    return order
