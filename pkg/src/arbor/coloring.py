"""Colorings of comparable pairs and the two negative-relation constructions."""

from __future__ import annotations

import csv
import io
import random
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping, Sequence, Union

from .errors import (
    InvalidColor,
    NotAPermutation,
    NotComparable,
    NotSpecializing,
    ParamOutOfRange,
    StructureError,
)
from .tree import FinitePoset, FiniteTree, gen_tree, members

__all__ = [
    "PairColoring",
    "SpecializingMap",
    "c_chi",
    "galvin_coloring",
    "sierpinski_coloring",
    "specializing_map",
    "random_coloring",
    "constant_coloring",
    "label_pullback",
]

Ambient = Union[FiniteTree, FinitePoset]


@dataclass(frozen=True, eq=False)
class PairColoring:
    """A total map from the comparable pairs of ``ambient`` to ``0..k-1``.

    ``values`` is keyed by ``(u, v)`` with ``u`` below ``v``. Looking up an
    incomparable pair raises :class:`NotComparable`.
    """

    ambient: Ambient
    k: int
    values: Mapping[tuple[int, int], int] = field(repr=False)

    def __post_init__(self) -> None:
        if not isinstance(self.k, int) or self.k < 1:
            raise InvalidColor("k must be >= 1")
        pairs = set(self.ambient.comparable_pairs)
        vals = dict(self.values)
        if set(vals) != pairs:
            extra = sorted(set(vals) - pairs)
            missing = sorted(pairs - set(vals))
            raise StructureError(f"coloring domain mismatch: extra {extra[:3]}, missing {missing[:3]}")
        for p, col in vals.items():
            if not isinstance(col, int) or not 0 <= col < self.k:
                raise InvalidColor(f"pair {p} has color {col!r}, outside 0..{self.k - 1}")
        object.__setattr__(self, "values", vals)

    def __call__(self, s: int, t: int) -> int:
        key = (s, t) if (s, t) in self.values else (t, s)
        try:
            return self.values[key]
        except KeyError:
            raise NotComparable(f"{s} and {t} are not comparable") from None

    def __eq__(self, other: object) -> bool:
        return isinstance(other, PairColoring) and (self.k, self.values) == (other.k, other.values)

    def __hash__(self) -> int:
        return hash((self.k, tuple(sorted(self.values.items()))))

    @cached_property
    def adjacency(self) -> tuple[tuple[int, ...], ...]:
        """``adjacency[color][v]``: mask of nodes joined to ``v`` in that color."""
        n = self.ambient.n
        adj = [[0] * n for _ in range(self.k)]
        for (u, v), col in self.values.items():
            adj[col][u] |= 1 << v
            adj[col][v] |= 1 << u
        return tuple(tuple(a) for a in adj)

    def is_homogeneous(self, nodes: Iterable[int], color: int) -> bool:
        """Pairwise comparable and every pair colored ``color``."""
        nodes = sorted(set(nodes))
        for i, u in enumerate(nodes):
            for v in nodes[i + 1 :]:
                if not self.ambient.comparable(u, v) or self(u, v) != color:
                    return False
        return True

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        for (u, v), col in sorted(self.values.items()):
            w.writerow([u, v, col])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str, ambient: Ambient, k: int | None = None) -> "PairColoring":
        """Load ``u,v,color`` rows; ``k`` defaults to the largest color plus one."""
        values = {}
        for lineno, row in enumerate(csv.reader(io.StringIO(text)), 1):
            if not row or all(not cell.strip() for cell in row):
                continue
            if len(row) != 3:
                raise StructureError(f"line {lineno}: expected u,v,color")
            try:
                u, v, col = (int(cell) for cell in row)
            except ValueError:
                raise StructureError(f"line {lineno}: non-integer field") from None
            if not (0 <= u < ambient.n and 0 <= v < ambient.n) or not ambient.less(u, v):
                raise StructureError(f"line {lineno}: {u} is not below {v}")
            if (u, v) in values:
                raise StructureError(f"line {lineno}: duplicate pair {u},{v}")
            values[(u, v)] = col
        if k is None:
            k = max(values.values(), default=0) + 1
        return cls(ambient, k, values)


def constant_coloring(ambient: Ambient, color: int = 0, k: int | None = None) -> PairColoring:
    k = color + 1 if k is None else k
    return PairColoring(ambient, k, {p: color for p in ambient.comparable_pairs})


def c_chi(c: PairColoring, t: int, chi: int) -> frozenset[int]:
    """Predecessors of ``t`` joined to ``t`` in color ``chi``."""
    if not isinstance(chi, int) or not 0 <= chi < c.k:
        raise InvalidColor(f"color {chi!r} outside 0..{c.k - 1}")
    amb = c.ambient
    amb._check(t)
    return members(amb.down[t] & c.adjacency[chi][t])


@dataclass(frozen=True)
class SpecializingMap:
    """Integer labels with distinct values on every comparable pair."""

    ambient: Ambient
    labels: tuple[int, ...]

    def __post_init__(self) -> None:
        labels = tuple(self.labels)
        if len(labels) != self.ambient.n:
            raise NotSpecializing(f"need {self.ambient.n} labels, got {len(labels)}")
        for u, v in self.ambient.comparable_pairs:
            if labels[u] == labels[v]:
                raise NotSpecializing(f"comparable nodes {u} < {v} share label {labels[u]}")
        object.__setattr__(self, "labels", labels)

    def __call__(self, v: int) -> int:
        return self.labels[v]

    @property
    def label_count(self) -> int:
        return len(set(self.labels))


def specializing_map(T: FiniteTree) -> SpecializingMap:
    """Label each node by its depth; uses exactly ``T.height`` labels."""
    return SpecializingMap(T, T.depth)


def galvin_coloring(T: Ambient, f: SpecializingMap | Sequence[int]) -> PairColoring:
    """Color ``x < y`` by 0 when ``f(x) < f(y)`` and by 1 when ``f(x) > f(y)``.

    Along a 0-homogeneous chain ``f`` increases, along a 1-homogeneous chain it
    decreases, so neither can be longer than the number of labels.
    """
    if not isinstance(f, SpecializingMap):
        f = SpecializingMap(T, tuple(f))
    lab = f.labels
    return PairColoring(T, 2, {(u, v): 0 if lab[u] < lab[v] else 1 for u, v in T.comparable_pairs})


def sierpinski_coloring(n: int, second_order: Sequence[int]) -> PairColoring:
    """Compare the natural order of ``0..n-1`` with a second linear order.

    ``{i, j}`` with ``i < j`` gets 0 when the orders agree, 1 otherwise, on
    ``path(n)``. Homogeneous chains are the monotone subsequences of
    ``second_order``.
    """
    perm = tuple(second_order)
    if len(perm) != n or sorted(perm) != list(range(n)):
        raise NotAPermutation(f"{perm} is not a permutation of 0..{n - 1}")
    P = gen_tree("path", n=n)
    return PairColoring(P, 2, {(i, j): 0 if perm[i] < perm[j] else 1 for i, j in P.comparable_pairs})


def label_pullback(T: Ambient, f: SpecializingMap, base: PairColoring) -> PairColoring:
    """Color ``{x, y}`` by ``base(f(x), f(y))``, with ``base`` a coloring of a path on the labels."""
    if f.ambient is not T and f.ambient != T:
        raise StructureError("specializing map belongs to another structure")
    n = base.ambient.n
    for lab in f.labels:
        if not 0 <= lab < n:
            raise ParamOutOfRange(f"label {lab} outside the base path 0..{n - 1}")
    return PairColoring(T, base.k, {(u, v): base(f(u), f(v)) for u, v in T.comparable_pairs})


def random_coloring(ambient: Ambient, k: int, seed: int) -> PairColoring:
    """Independent uniform color per comparable pair, reproducible from ``seed``."""
    if not isinstance(k, int) or k < 1:
        raise InvalidColor("k must be >= 1")
    rng = random.Random(seed)
    return PairColoring(ambient, k, {p: rng.randrange(k) for p in ambient.comparable_pairs})
