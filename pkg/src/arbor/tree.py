"""Finite rooted trees and finite strict posets.

Nodes are the integers ``0..n-1``. Subsets are handed around as frozensets at
the API boundary; hot loops use int bitmasks (bit ``i`` set iff node ``i`` is
in the set), which every structure precomputes.

The cone of the root is the whole tree, root included. That convention is
what makes ``F`` a subfamily of its diagonal closure.
"""

from __future__ import annotations

import itertools
import json
import random
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator, Sequence

from .errors import (
    CycleDetected,
    DanglingParent,
    InvalidNode,
    MultipleRoots,
    NotAPartialOrder,
    ParamOutOfRange,
    StructureError,
    TooManyChains,
    guard,
)

__all__ = [
    "FiniteTree",
    "FinitePoset",
    "NodeQuery",
    "SubsetClass",
    "SigmaPrime",
    "tree_from_parent",
    "node_queries",
    "classify_subset",
    "gen_tree",
    "sigma_prime",
    "all_trees",
    "all_posets",
    "mask_of",
    "members",
]

FORMAT_VERSION = 1


def _check_version(data: dict) -> None:
    # files without a version are read as the current one
    version = data.get("format_version", FORMAT_VERSION)
    if version != FORMAT_VERSION:
        raise StructureError(f"unsupported format_version {version!r}")


def mask_of(nodes: Iterable[int]) -> int:
    m = 0
    for v in nodes:
        m |= 1 << v
    return m


def members(mask: int) -> frozenset[int]:
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return frozenset(out)


def _bits(mask: int) -> Iterator[int]:
    i = 0
    while mask:
        if mask & 1:
            yield i
        mask >>= 1
        i += 1


class _Ambient:
    """Shared comparability helpers for trees and posets."""

    n: int
    up: tuple[int, ...]  # strict upper set mask per node
    down: tuple[int, ...]  # strict lower set mask per node

    def _check(self, v: int) -> int:
        if not isinstance(v, int) or isinstance(v, bool) or not 0 <= v < self.n:
            raise InvalidNode(f"node {v!r} not in 0..{self.n - 1}")
        return v

    def _mask(self, nodes: Iterable[int]) -> int:
        return mask_of(self._check(v) for v in nodes)

    @property
    def nodes(self) -> range:
        return range(self.n)

    @property
    def full_mask(self) -> int:
        return (1 << self.n) - 1

    def less(self, u: int, v: int) -> bool:
        return bool(self.up[u] >> v & 1)

    def comparable(self, u: int, v: int) -> bool:
        return u != v and bool((self.up[u] | self.down[u]) >> v & 1)

    @cached_property
    def comparable_pairs(self) -> tuple[tuple[int, int], ...]:
        """All ``(u, v)`` with ``u < v`` in the order, sorted."""
        return tuple(sorted((u, v) for u in range(self.n) for v in _bits(self.up[u])))

    @cached_property
    def comparability(self) -> tuple[int, ...]:
        return tuple(self.up[v] | self.down[v] for v in range(self.n))

    def is_chain_mask(self, mask: int) -> bool:
        for v in _bits(mask):
            if (mask & ~(1 << v)) & ~self.comparability[v]:
                return False
        return True

    def is_antichain_mask(self, mask: int) -> bool:
        return all(not (mask & self.comparability[v]) for v in _bits(mask))

    def is_chain(self, nodes: Iterable[int]) -> bool:
        return self.is_chain_mask(self._mask(nodes))

    def is_antichain(self, nodes: Iterable[int]) -> bool:
        return self.is_antichain_mask(self._mask(nodes))

    def sort_chain(self, nodes: Iterable[int]) -> list[int]:
        """Order a chain from bottom to top."""
        return sorted(nodes, key=lambda v: bin(self.down[v]).count("1"))

    def longest_chain_in(self, mask: int) -> int:
        """Number of nodes in a longest chain inside ``mask`` (Mirsky height)."""
        best: dict[int, int] = {}
        for v in sorted(_bits(mask), key=lambda v: bin(self.down[v]).count("1")):
            below = self.down[v] & mask
            best[v] = 1 + max((best[u] for u in _bits(below)), default=0)
        return max(best.values(), default=0)


@dataclass(frozen=True, eq=False)
class FiniteTree(_Ambient):
    """A rooted tree given by its parent array (``None`` marks the root)."""

    parent: tuple[int | None, ...]
    root: int = field(init=False)
    children: tuple[tuple[int, ...], ...] = field(init=False, repr=False)
    depth: tuple[int, ...] = field(init=False, repr=False)
    up: tuple[int, ...] = field(init=False, repr=False)
    down: tuple[int, ...] = field(init=False, repr=False)

    def __post_init__(self) -> None:
        parent = tuple(self.parent)
        n = len(parent)
        if n == 0:
            raise StructureError("a tree needs at least one node")
        roots = [i for i, p in enumerate(parent) if p is None]
        if len(roots) != 1:
            if not roots:
                # every node has a parent: there must be a cycle
                raise CycleDetected("no root: parent links form a cycle")
            raise MultipleRoots(f"roots at {roots}")
        for i, p in enumerate(parent):
            if p is not None and (not isinstance(p, int) or isinstance(p, bool) or not 0 <= p < n):
                raise DanglingParent(f"node {i} has parent {p!r}")
            if p == i:
                raise CycleDetected(f"node {i} is its own parent")
        depth: list[int | None] = [None] * n
        root = roots[0]
        depth[root] = 0
        for start in range(n):
            path = []
            v = start
            seen = set()
            while depth[v] is None:
                if v in seen:
                    raise CycleDetected(f"cycle through node {v}")
                seen.add(v)
                path.append(v)
                v = parent[v]
            d = depth[v]
            for u in reversed(path):
                d += 1
                depth[u] = d
        children: list[list[int]] = [[] for _ in range(n)]
        for i, p in enumerate(parent):
            if p is not None:
                children[p].append(i)
        down = [0] * n
        for v in sorted(range(n), key=lambda v: depth[v]):
            p = parent[v]
            if p is not None:
                down[v] = down[p] | (1 << p)
        up = [0] * n
        for v in range(n):
            for u in _bits(down[v]):
                up[u] |= 1 << v
        object.__setattr__(self, "parent", parent)
        object.__setattr__(self, "root", root)
        object.__setattr__(self, "children", tuple(tuple(c) for c in children))
        object.__setattr__(self, "depth", tuple(depth))
        object.__setattr__(self, "up", tuple(up))
        object.__setattr__(self, "down", tuple(down))

    @property
    def n(self) -> int:
        return len(self.parent)

    def __len__(self) -> int:
        return self.n

    def __eq__(self, other: object) -> bool:
        return isinstance(other, FiniteTree) and self.parent == other.parent

    def __hash__(self) -> int:
        return hash(self.parent)

    @property
    def height(self) -> int:
        """Number of levels."""
        return max(self.depth) + 1

    def pred_mask(self, t: int) -> int:
        return self.down[self._check(t)]

    def cone_mask(self, t: int) -> int:
        """Strict descendants, except the whole tree for the root."""
        self._check(t)
        return self.full_mask if t == self.root else self.up[t]

    def pred(self, t: int) -> frozenset[int]:
        return members(self.pred_mask(t))

    def cone(self, t: int) -> frozenset[int]:
        return members(self.cone_mask(t))

    def leq(self, s: int, t: int) -> bool:
        return s == t or self.less(s, t)

    def path_to(self, t: int) -> list[int]:
        """Root-to-``t`` path, inclusive."""
        path = [self._check(t)]
        while self.parent[path[-1]] is not None:
            path.append(self.parent[path[-1]])
        return path[::-1]

    def leaves(self) -> list[int]:
        return [v for v in range(self.n) if not self.children[v]]

    @cached_property
    def cone_masks(self) -> tuple[int, ...]:
        return tuple(self.cone_mask(t) for t in range(self.n))

    # -- interchange ---------------------------------------------------------

    def to_dict(self) -> dict:
        return {"format_version": FORMAT_VERSION, "parent": list(self.parent)}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True) + "\n"

    @classmethod
    def from_dict(cls, data: dict) -> "FiniteTree":
        if not isinstance(data, dict) or "parent" not in data or not isinstance(data["parent"], list):
            raise StructureError('tree JSON must be an object with a "parent" list')
        _check_version(data)
        return tree_from_parent(data["parent"])

    @classmethod
    def from_json(cls, text: str) -> "FiniteTree":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise StructureError(f"invalid JSON: {exc}") from None
        return cls.from_dict(data)

    def to_dot(self, labels: Sequence[str] | None = None) -> str:
        lines = ["digraph tree {"]
        for v in range(self.n):
            label = labels[v] if labels else str(v)
            lines.append(f'  {v} [label="{label}"];')
        for v, p in enumerate(self.parent):
            if p is not None:
                lines.append(f"  {p} -> {v};")
        lines.append("}")
        return "\n".join(lines) + "\n"


@dataclass(frozen=True, eq=False)
class FinitePoset(_Ambient):
    """A strict partial order on ``0..n-1``; ``less`` holds the pairs ``(i, j)`` with ``i < j``.

    The relation is validated as given (irreflexive, transitive,
    antisymmetric); use :meth:`from_relation` to take a transitive closure
    first.
    """

    n: int
    less_pairs: frozenset[tuple[int, int]]
    up: tuple[int, ...] = field(init=False, repr=False)
    down: tuple[int, ...] = field(init=False, repr=False)

    def __post_init__(self) -> None:
        n = self.n
        if not isinstance(n, int) or n < 0:
            raise StructureError("poset size must be a non-negative int")
        pairs = frozenset((int(a), int(b)) for a, b in self.less_pairs)
        up = [0] * n
        down = [0] * n
        for a, b in pairs:
            if not (0 <= a < n and 0 <= b < n):
                raise InvalidNode(f"pair {(a, b)} outside 0..{n - 1}")
            if a == b:
                raise NotAPartialOrder(f"not irreflexive at {a}")
            up[a] |= 1 << b
            down[b] |= 1 << a
        for a, b in pairs:
            if (b, a) in pairs:
                raise NotAPartialOrder(f"not antisymmetric on {a},{b}")
            if up[b] & ~up[a]:
                raise NotAPartialOrder(f"not transitive through {a} < {b}")
        object.__setattr__(self, "less_pairs", pairs)
        object.__setattr__(self, "up", tuple(up))
        object.__setattr__(self, "down", tuple(down))

    @classmethod
    def from_relation(cls, n: int, pairs: Iterable[tuple[int, int]]) -> "FinitePoset":
        """Transitively close ``pairs`` and build the poset."""
        up = [0] * n
        for a, b in pairs:
            up[a] |= 1 << b
        changed = True
        while changed:
            changed = False
            for a in range(n):
                closed = up[a]
                for b in _bits(up[a]):
                    closed |= up[b]
                if closed != up[a]:
                    up[a] = closed
                    changed = True
        return cls(n, frozenset((a, b) for a in range(n) for b in _bits(up[a])))

    def __len__(self) -> int:
        return self.n

    def __eq__(self, other: object) -> bool:
        return isinstance(other, FinitePoset) and (self.n, self.less_pairs) == (other.n, other.less_pairs)

    def __hash__(self) -> int:
        return hash((self.n, self.less_pairs))

    def to_dict(self) -> dict:
        return {"format_version": FORMAT_VERSION, "n": self.n, "less": [list(p) for p in sorted(self.less_pairs)]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True) + "\n"

    @classmethod
    def from_dict(cls, data: dict) -> "FinitePoset":
        if not isinstance(data, dict) or "n" not in data or "less" not in data:
            raise StructureError('poset JSON must have "n" and "less"')
        _check_version(data)
        try:
            pairs = [(int(a), int(b)) for a, b in data["less"]]
        except (TypeError, ValueError):
            raise StructureError('"less" must be a list of [i, j] pairs') from None
        if not isinstance(data["n"], int) or isinstance(data["n"], bool):
            raise StructureError('"n" must be an integer')
        return cls(data["n"], frozenset(pairs))

    @classmethod
    def from_json(cls, text: str) -> "FinitePoset":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise StructureError(f"invalid JSON: {exc}") from None
        return cls.from_dict(data)

    def to_dot(self) -> str:
        # Hasse diagram only
        lines = ["digraph poset {"]
        lines += [f"  {v};" for v in range(self.n)]
        for a, b in sorted(self.less_pairs):
            between = self.up[a] & self.down[b]
            if not between:
                lines.append(f"  {a} -> {b};")
        lines.append("}")
        return "\n".join(lines) + "\n"


def tree_from_parent(parents: Sequence[int | None]) -> FiniteTree:
    if len(parents) == 0:
        raise StructureError("parent array must be nonempty")
    return FiniteTree(tuple(parents))


@dataclass(frozen=True)
class NodeQuery:
    pred: frozenset[int]
    cone: frozenset[int]
    height: int


def node_queries(T: FiniteTree, t: int) -> NodeQuery:
    return NodeQuery(T.pred(t), T.cone(t), T.depth[T._check(t)])


@dataclass(frozen=True)
class SubsetClass:
    is_chain: bool
    is_antichain: bool
    isolated_points: frozenset[int]


def classify_subset(T: FiniteTree, X: Iterable[int]) -> SubsetClass:
    """Chain/antichain status of ``X``.

    A finite tree has no limit-height nodes, so every point of ``X`` is
    isolated.
    """
    mask = T._mask(X)
    return SubsetClass(T.is_chain_mask(mask), T.is_antichain_mask(mask), members(mask))


# -- generators ----------------------------------------------------------------


def gen_tree(kind: str, seed: int = 0, **params: int) -> FiniteTree:
    """Deterministic tree generators.

    ``path(n)``, ``complete(branching, levels)``, ``wq(m, d)`` (strictly
    increasing sequences over ``0..m-1`` of length ``<= d`` under
    end-extension) and ``random(n)`` (each node picks a uniform parent among
    earlier nodes; the only kind that uses ``seed``).
    """

    def need(name: str, lo: int = 1) -> int:
        if name not in params:
            raise ParamOutOfRange(f"{kind} needs parameter {name!r}")
        value = params[name]
        if not isinstance(value, int) or value < lo:
            raise ParamOutOfRange(f"{name} must be an int >= {lo}, got {value!r}")
        return value

    if kind == "path":
        n = need("n")
        return FiniteTree((None,) + tuple(range(n - 1)))
    if kind == "complete":
        b, levels = need("branching"), need("levels")
        if (b ** levels - 1) // max(b - 1, 1) > guard(10**6) or (b == 1 and levels > guard(10**6)):
            raise ParamOutOfRange("complete tree too large")
        parent: list[int | None] = [None]
        frontier = [0]
        for _ in range(levels - 1):
            nxt = []
            for p in frontier:
                for _ in range(b):
                    parent.append(p)
                    nxt.append(len(parent) - 1)
            frontier = nxt
        return FiniteTree(tuple(parent))
    if kind == "wq":
        m, d = need("m"), need("d", 0)
        index: dict[tuple[int, ...], int] = {(): 0}
        parent = [None]
        for length in range(1, min(d, m) + 1):
            for seq in itertools.combinations(range(m), length):
                index[seq] = len(parent)
                parent.append(index[seq[:-1]])
        return FiniteTree(tuple(parent))
    if kind == "random":
        n = need("n")
        rng = random.Random(seed)
        return FiniteTree((None,) + tuple(rng.randrange(i) for i in range(1, n)))
    raise ParamOutOfRange(f"unknown tree kind {kind!r}")


def all_trees(n: int) -> Iterator[FiniteTree]:
    """Every rooted tree on ``n`` nodes up to isomorphism.

    Nodes are numbered in preorder with children in canonical order, so node
    0 is the root and every parent index is smaller than its child's.
    """
    for shape in _shapes(n):
        parent: list[int | None] = []

        def emit(s, p):
            me = len(parent)
            parent.append(p)
            for child in s:
                emit(child, me)

        emit(shape, None)
        yield FiniteTree(tuple(parent))


def _shapes(n: int) -> list[tuple]:
    """Canonical nested-tuple shapes (sorted child tuples) of rooted trees."""
    if n == 1:
        return [()]
    out = set()
    for forest in _forests(n - 1):
        out.add(tuple(sorted(forest)))
    return sorted(out)


def _forests(n: int) -> list[tuple]:
    if n == 0:
        return [()]
    out = set()
    for first in range(1, n + 1):
        for s in _shapes(first):
            for rest in _forests(n - first):
                out.add(tuple(sorted((s,) + rest)))
    return sorted(out)


def all_posets(n: int) -> Iterator[FinitePoset]:
    """Every strict partial order on ``n`` elements up to isomorphism."""
    seen: set[frozenset] = set()
    pairs_all = [(a, b) for a in range(n) for b in range(n) if a < b]
    perms = list(itertools.permutations(range(n)))
    # every finite poset has a linear extension, so orient pairs along 0 < 1 < ... < n-1
    for bits in range(1 << len(pairs_all)):
        rel = frozenset(p for i, p in enumerate(pairs_all) if bits >> i & 1)
        if any((a, c) not in rel for a, b in rel for b2, c in rel if b == b2):
            continue
        canon = min(tuple(sorted((pi[a], pi[b]) for a, b in rel)) for pi in perms)
        key = frozenset(canon)
        if key in seen:
            continue
        seen.add(key)
        yield FinitePoset(n, frozenset(canon))


# -- sigma'P -------------------------------------------------------------------


@dataclass(frozen=True)
class SigmaPrime:
    """The tree of nonempty chains of a poset under end-extension.

    Node 0 is a synthetic root (the empty chain); ``chains[v]`` lists the
    chain of node ``v`` from bottom to top and ``max_map[v]`` is its top
    element (``None`` for the root).
    """

    tree: FiniteTree
    chains: tuple[tuple[int, ...], ...]
    max_map: tuple[int | None, ...]

    def push_forward(self, nodes: Iterable[int]) -> frozenset[int]:
        out = []
        for v in nodes:
            if v == self.tree.root:
                raise InvalidNode("the synthetic root has no image in P")
            out.append(self.max_map[v])
        return frozenset(out)


def sigma_prime(P: FinitePoset, max_chains: int | None = None) -> SigmaPrime:
    limit = guard(10**6) if max_chains is None else max_chains
    topo = sorted(range(P.n), key=lambda v: (bin(P.down[v]).count("1"), v))
    chains: list[tuple[int, ...]] = [()]
    parent: list[int | None] = [None]
    index: dict[tuple[int, ...], int] = {(): 0}
    frontier: list[tuple[int, ...]] = [()]
    while frontier:
        nxt = []
        for chain in frontier:
            above = P.up[chain[-1]] if chain else P.full_mask
            for v in topo:
                if above >> v & 1:
                    ext = chain + (v,)
                    if len(chains) >= limit + 1:
                        raise TooManyChains(f"more than {int(limit)} chains")
                    index[ext] = len(chains)
                    chains.append(ext)
                    parent.append(index[chain])
                    nxt.append(ext)
        frontier = nxt
    tree = FiniteTree(tuple(parent))
    max_map = tuple(c[-1] if c else None for c in chains)
    return SigmaPrime(tree, tuple(chains), max_map)
