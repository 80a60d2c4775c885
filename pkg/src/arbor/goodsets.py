"""(rho, sigma)-good chains: certification, search, extraction and refinement.

A good chain for the empty color sequence is a single node. A good chain for
``sigma + (i,)`` is a union of ``rho`` blocks, each good for ``sigma``,
stacked one above the other, where every pair taken across two different
blocks has color ``i``. So the *outermost* level of a decomposition carries
the *last* entry of ``sigma``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Iterator, Mapping, Sequence, Union

from .coloring import PairColoring
from .errors import (
    ArityMismatch,
    ColorNotInRange,
    NotAChain,
    ParamOutOfRange,
    PigeonholeHypothesisFails,
    SearchBudgetExceeded,
    StructureError,
    guard,
)
from .ordinal import verify_pigeonhole_finite
from .tree import FinitePoset, FiniteTree

__all__ = [
    "GoodDecomposition",
    "Refinement",
    "is_good",
    "build_good",
    "extract_homog",
    "refine_good",
]

Ambient = Union[FiniteTree, FinitePoset]
MAX_CHAIN = 30
SEARCH_GUARD = 5_000_000


@dataclass(frozen=True)
class GoodDecomposition:
    """Either a leaf holding ``node`` or a level of ``blocks`` joined in ``color``."""

    node: int | None = None
    blocks: tuple["GoodDecomposition", ...] = ()
    color: int | None = None

    def __post_init__(self) -> None:
        if self.node is None:
            if not self.blocks or self.color is None:
                raise StructureError("an inner level needs blocks and a color")
        elif self.blocks or self.color is not None:
            raise StructureError("a leaf carries only a node")

    @classmethod
    def leaf(cls, node: int) -> "GoodDecomposition":
        return cls(node=node)

    @classmethod
    def level(cls, blocks: Iterable["GoodDecomposition"], color: int) -> "GoodDecomposition":
        return cls(blocks=tuple(blocks), color=color)

    @property
    def is_leaf(self) -> bool:
        return self.node is not None

    def leaves(self) -> list[int]:
        if self.is_leaf:
            return [self.node]
        return [v for b in self.blocks for v in b.leaves()]

    def colors(self) -> tuple[int, ...]:
        """The color sequence read along the first block, innermost first."""
        out = []
        d = self
        while not d.is_leaf:
            out.append(d.color)
            d = d.blocks[0]
        return tuple(reversed(out))

    def to_obj(self):
        if self.is_leaf:
            return self.node
        return {"color": self.color, "blocks": [b.to_obj() for b in self.blocks]}

    @classmethod
    def from_obj(cls, obj) -> "GoodDecomposition":
        if isinstance(obj, int) and not isinstance(obj, bool):
            return cls.leaf(obj)
        if isinstance(obj, dict) and set(obj) == {"color", "blocks"} and isinstance(obj["blocks"], list):
            color = obj["color"]
            if not isinstance(color, int) or isinstance(color, bool):
                raise StructureError("level color must be an int")
            return cls.level((cls.from_obj(b) for b in obj["blocks"]), color)
        raise StructureError(f"not a decomposition: {obj!r}")


def _depths(D: GoodDecomposition) -> set[int]:
    if D.is_leaf:
        return {0}
    return {d + 1 for b in D.blocks for d in _depths(b)}


def is_good(T: Ambient, c: PairColoring, D: GoodDecomposition, rho: int, sigma: Sequence[int]) -> bool:
    """Does ``D`` certify its leaves as a ``(rho, sigma)``-good chain?

    Raises :class:`ArityMismatch` when the nesting depth of ``D`` is not
    ``len(sigma)``; every other defect just makes the answer False.
    """
    if not isinstance(rho, int) or rho < 1:
        raise ParamOutOfRange("rho must be >= 1")
    sigma = tuple(sigma)
    if _depths(D) != {len(sigma)}:
        raise ArityMismatch(f"decomposition depth {sorted(_depths(D))} does not match |sigma| = {len(sigma)}")
    leaves = D.leaves()
    if len(set(leaves)) != len(leaves) or any(not 0 <= v < T.n for v in leaves):
        return False
    return _check(T, c, D, rho, sigma)


def _check(T, c, D, rho, sigma) -> bool:
    if D.is_leaf:
        return True
    if len(D.blocks) != rho or D.color != sigma[-1]:
        return False
    inner = sigma[:-1]
    if not all(_check(T, c, b, rho, inner) for b in D.blocks):
        return False
    parts = [b.leaves() for b in D.blocks]
    for a in range(len(parts)):
        for b in range(a + 1, len(parts)):
            for s in parts[a]:
                for t in parts[b]:
                    if not T.less(s, t) or c(s, t) != D.color:
                        return False
    return True


def build_good(
    T: Ambient,
    c: PairColoring,
    X: Iterable[int],
    rho: int,
    sigma: Sequence[int],
    budget: int | None = None,
) -> GoodDecomposition | None:
    """Find a ``(rho, sigma)``-good subset of the chain ``X``, or None if there is none.

    Exhaustive backtracking: blocks are filled left to right, each block
    drawn from the nodes above everything chosen so far and joined to it in
    the level color. The first witness found is returned.
    """
    if not isinstance(rho, int) or rho < 1:
        raise ParamOutOfRange("rho must be >= 1")
    sigma = tuple(sigma)
    for col in sigma:
        if not 0 <= col < c.k:
            raise ParamOutOfRange(f"color {col} outside 0..{c.k - 1}")
    mask = T._mask(X)
    if not T.is_chain_mask(mask):
        raise NotAChain("X is not a chain")
    xs = T.sort_chain(v for v in range(T.n) if mask >> v & 1)
    if len(xs) > guard(MAX_CHAIN):
        raise SearchBudgetExceeded(f"chain of {len(xs)} nodes exceeds the limit {MAX_CHAIN}")
    limit = guard(SEARCH_GUARD) if budget is None else budget
    steps = 0

    def tick():
        nonlocal steps
        steps += 1
        if steps > limit:
            raise SearchBudgetExceeded(f"good-set search exceeded {int(limit)} steps")

    def gen(cands: list[int], level: int) -> Iterator[GoodDecomposition]:
        if level == 0:
            for u in cands:
                tick()
                yield GoodDecomposition.leaf(u)
            return
        color = sigma[level - 1]
        size = rho ** (level - 1)

        def fill(chosen: list[GoodDecomposition], pool: list[int]):
            if len(chosen) == rho:
                yield GoodDecomposition.level(chosen, color)
                return
            if len(pool) < (rho - len(chosen)) * size:
                return
            for block in gen(pool, level - 1):
                tick()
                leaves = block.leaves()
                top = leaves[-1]
                rest = [u for u in pool if T.less(top, u) and all(c(s, u) == color for s in leaves)]
                yield from fill(chosen + [block], rest)

        yield from fill([], cands)

    return next(gen(xs, len(sigma)), None)


def extract_homog(D: GoodDecomposition, c: PairColoring, j: int) -> frozenset[int]:
    """A ``j``-homogeneous chain of ``rho`` leaves of ``D``.

    If ``j`` occurs in the inner color sequence, recurse into the first
    block; otherwise ``j`` is the level color and one leaf per block will do.
    """
    colors = D.colors()
    if j not in colors:
        raise ColorNotInRange(f"color {j} not in {colors}")
    d = D
    while j in d.blocks[0].colors():
        d = d.blocks[0]
    chain = frozenset(b.leaves()[0] for b in d.blocks)
    if not c.is_homogeneous(chain, j):
        raise AssertionError("extracted chain is not homogeneous")
    return chain


@dataclass(frozen=True)
class Refinement:
    refined: GoodDecomposition
    g_color: int


def refine_good(
    D: GoodDecomposition,
    c: PairColoring,
    g: Mapping[int, int] | Sequence[int] | Callable[[int], int],
    xi: int,
    m: int,
) -> Refinement:
    """Shrink ``D`` to a ``(xi, sigma)``-good decomposition on which ``g`` is constant.

    Needs ``rho -> (xi)^1_m`` for the block count ``rho`` of ``D``. Each
    block is refined first; then the blocks are sorted by the ``g``-color
    they ended up with and ``xi`` blocks sharing a color are kept.
    """
    if xi < 1 or m < 1:
        raise ParamOutOfRange("xi and m must be positive")
    if not D.is_leaf:
        rho = len(D.blocks)
        if not verify_pigeonhole_finite(rho, xi, m):
            raise PigeonholeHypothesisFails(f"{rho} -> ({xi})^1_{m} fails")
    if callable(g):
        gf = g
    else:
        gf = g.__getitem__

    def value(v: int) -> int:
        col = gf(v)
        if not isinstance(col, int) or not 0 <= col < m:
            raise ParamOutOfRange(f"g({v}) = {col!r} outside 0..{m - 1}")
        return col

    def rec(d: GoodDecomposition) -> tuple[GoodDecomposition, int]:
        if d.is_leaf:
            return d, value(d.node)
        parts = [rec(b) for b in d.blocks]
        by_color: dict[int, list[GoodDecomposition]] = {}
        for sub, col in parts:
            by_color.setdefault(col, []).append(sub)
        for col in sorted(by_color):
            if len(by_color[col]) >= xi:
                return GoodDecomposition.level(by_color[col][:xi], d.color), col
        raise PigeonholeHypothesisFails(f"no g-color covers {xi} of {len(parts)} blocks")

    refined, col = rec(D)
    return Refinement(refined, col)
