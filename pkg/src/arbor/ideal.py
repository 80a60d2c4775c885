"""Diagonal unions, regressive maps and downward-closed families.

A :class:`Family` is the finite stand-in for an ideal on a tree: it is
downward closed and contains the empty set, but it is *not* required to be
closed under unions (a finite union-closed family is just the power set of
its largest member). Completeness is modelled instead by explicit budgets:
``m_special(m)`` holds the sets whose longest chain has at most ``m`` nodes.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .errors import (
    AmbientTooLarge,
    BudgetViolated,
    NotAnAntichain,
    NotDownwardClosed,
    NotInCone,
    ParamOutOfRange,
    SearchBudgetExceeded,
    StructureError,
    guard,
)
from .tree import FiniteTree, _bits, members

__all__ = [
    "Family",
    "RegressiveMap",
    "Membership",
    "SpecialCover",
    "diag_union",
    "diag_union_mask",
    "in_diag_ideal",
    "special_cover",
    "merge_special_above_antichain",
    "ns_member",
    "isolated_regressive",
    "diag_iterate",
    "collapse_double_union",
    "double_diag_union",
    "parse_family",
]

SEARCH_GUARD = 2_000_000
ITERATE_MAX_NODES = 12


@dataclass(frozen=True, eq=False)
class Family:
    """Downward-closed family of node subsets of ``ambient``.

    Build one with :meth:`generated`, :meth:`m_special`, :meth:`principal`,
    :meth:`power_set` or :meth:`from_members`.
    """

    ambient: FiniteTree
    kind: str
    generators: tuple[int, ...] = ()
    m: int = 0
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    @classmethod
    def generated(cls, T: FiniteTree, gens: Iterable[Iterable[int]]) -> "Family":
        """Downward closure of the listed generator sets."""
        masks = {T._mask(g) for g in gens}
        return cls(T, "gens", _maximal(masks))

    @classmethod
    def principal(cls, T: FiniteTree, U: Iterable[int]) -> "Family":
        return cls(T, "principal", (T._mask(U),))

    @classmethod
    def power_set(cls, T: FiniteTree) -> "Family":
        return cls(T, "principal", (T.full_mask,))

    @classmethod
    def m_special(cls, T: FiniteTree, m: int) -> "Family":
        if not isinstance(m, int) or m < 0:
            raise ParamOutOfRange("m must be a non-negative int")
        return cls(T, "mspecial", (), m)

    @classmethod
    def from_members(cls, T: FiniteTree, sets: Iterable[int], check: bool = True) -> "Family":
        """Family with exactly the given member masks (must be downward closed)."""
        masks = set(sets)
        masks.add(0)
        if check:
            for x in masks:
                for v in _bits(x):
                    if x & ~(1 << v) not in masks:
                        raise NotDownwardClosed(f"{sorted(members(x))} is a member but its subset is not")
        return cls(T, "gens", _maximal(masks))

    def contains_mask(self, x: int) -> bool:
        cache = self._cache
        hit = cache.get(x)
        if hit is not None:
            return hit
        if self.kind == "mspecial":
            ok = self.ambient.longest_chain_in(x) <= self.m
        else:
            ok = any(x & ~g == 0 for g in self.generators)
        cache[x] = ok
        return ok

    def __contains__(self, nodes: Iterable[int]) -> bool:
        return self.contains_mask(self.ambient._mask(nodes))

    def member_masks(self, universe: int | None = None) -> list[int]:
        """All members inside ``universe`` (default: the whole tree), ascending."""
        u = self.ambient.full_mask if universe is None else universe
        return [x for x in _submasks(u) if self.contains_mask(x)]

    def is_subfamily(self, other: "Family", universe: int | None = None) -> bool:
        return all(other.contains_mask(x) for x in self.member_masks(universe))

    def spec(self) -> str:
        if self.kind == "mspecial":
            return f"mspecial:{self.m}"
        sets = [",".join(map(str, sorted(members(g)))) for g in self.generators]
        if self.kind == "principal":
            return f"principal:{sets[0]}"
        return "gens:" + ";".join(sets)


def _maximal(masks: set[int]) -> tuple[int, ...]:
    masks = set(masks) or {0}
    out = [x for x in masks if not any(x != y and x & ~y == 0 for y in masks)]
    return tuple(sorted(out))


def _submasks(u: int) -> list[int]:
    out = []
    x = u
    while True:
        out.append(x)
        if x == 0:
            break
        x = (x - 1) & u
    out.reverse()
    return out


def parse_family(T: FiniteTree, spec: str) -> Family:
    """``mspecial:<m>``, ``principal:<set>`` or ``gens:<set>;<set>;...``."""
    kind, _, rest = spec.partition(":")
    if kind == "mspecial":
        try:
            return Family.m_special(T, int(rest))
        except ValueError:
            raise ParamOutOfRange(f"bad m in {spec!r}") from None
    if kind == "principal":
        return Family.principal(T, _parse_set(rest))
    if kind == "gens":
        return Family.generated(T, [_parse_set(s) for s in rest.split(";")] if rest else [])
    raise ParamOutOfRange(f"unknown family spec {spec!r}")


def _parse_set(text: str) -> list[int]:
    text = text.strip()
    if not text:
        return []
    try:
        return [int(v) for v in text.split(",")]
    except ValueError:
        raise ParamOutOfRange(f"bad node set {text!r}") from None


# -- diagonal unions ---------------------------------------------------------


def diag_union_mask(T: FiniteTree, family: Mapping[int, int] | list[int]) -> int:
    cones = T.cone_masks
    out = 0
    items = enumerate(family) if isinstance(family, (list, tuple)) else family.items()
    for t, a in items:
        out |= a & cones[t]
    return out


def diag_union(T: FiniteTree, family: Mapping[int, Iterable[int]]) -> frozenset[int]:
    """Union over ``t`` of ``A_t`` intersected with ``cone(t)``; missing keys are empty."""
    masks = {T._check(t): T._mask(a) for t, a in family.items()}
    return members(diag_union_mask(T, masks))


@dataclass(frozen=True)
class RegressiveMap:
    """A map ``f`` on a node set with ``f(t) < t`` off the root and ``f(root) = root``."""

    ambient: FiniteTree
    assignment: Mapping[int, int]

    def __post_init__(self) -> None:
        T = self.ambient
        for x, y in self.assignment.items():
            if x == T.root:
                if y != T.root:
                    raise StructureError("the root must map to itself")
            elif not T.less(y, x):
                raise StructureError(f"f({x}) = {y} is not below {x}")

    @property
    def domain(self) -> frozenset[int]:
        return frozenset(self.assignment)

    def __call__(self, x: int) -> int:
        return self.assignment[x]

    def fibers(self) -> dict[int, frozenset[int]]:
        out: dict[int, set[int]] = {}
        for x, y in self.assignment.items():
            out.setdefault(y, set()).add(x)
        return {y: frozenset(xs) for y, xs in sorted(out.items())}

    def to_dict(self) -> dict:
        return {str(x): y for x, y in sorted(self.assignment.items())}


@dataclass(frozen=True)
class Membership:
    member: bool
    witness: RegressiveMap | None = None


def in_diag_ideal(T: FiniteTree, X: Iterable[int], F: Family, budget: int | None = None) -> Membership:
    """Is ``X`` the diagonal union of members of ``F``?

    Equivalently: is there a regressive map on ``X`` all of whose fibers lie
    in ``F``? Backtracks over images, deepest nodes first, nearest ancestor
    first, pruning as soon as a fiber leaves ``F``.
    """
    xmask = T._mask(X)
    assignment = _regressive_search(T, xmask, F, budget)
    if assignment is None:
        return Membership(False)
    return Membership(True, RegressiveMap(T, assignment))


def _regressive_search(T: FiniteTree, xmask: int, F: Family, budget: int | None) -> dict[int, int] | None:
    limit = guard(SEARCH_GUARD) if budget is None else budget
    root = T.root
    fiber = [0] * T.n
    assignment: dict[int, int] = {}
    if xmask >> root & 1:
        if not F.contains_mask(1 << root):
            return None
        fiber[root] = 1 << root
        assignment[root] = root
    order = sorted((v for v in _bits(xmask) if v != root), key=lambda v: (-T.depth[v], v))
    # candidate images: ancestors, parent first
    cands = [T.path_to(v)[-2::-1] for v in order]
    contains = F.contains_mask
    steps = 0

    def place(i: int) -> bool:
        nonlocal steps
        if i == len(order):
            return True
        x = order[i]
        bit = 1 << x
        for t in cands[i]:
            steps += 1
            if steps > limit:
                raise SearchBudgetExceeded(f"regressive search exceeded {int(limit)} steps")
            grown = fiber[t] | bit
            if not contains(grown):
                continue
            old = fiber[t]
            fiber[t] = grown
            assignment[x] = t
            if place(i + 1):
                return True
            fiber[t] = old
            del assignment[x]
        return False

    return assignment if place(0) else None


def ns_member(T: FiniteTree, X: Iterable[int], m: int, budget: int | None = None) -> Membership:
    """Membership in the diagonal closure of the ``m``-special family."""
    if not isinstance(m, int) or m < 1:
        raise ParamOutOfRange("m must be >= 1")
    return in_diag_ideal(T, X, _mspecial_cached(T, m), budget)


_MSPECIAL: dict[tuple[FiniteTree, int], Family] = {}


def _mspecial_cached(T: FiniteTree, m: int) -> Family:
    key = (T, m)
    fam = _MSPECIAL.get(key)
    if fam is None:
        if len(_MSPECIAL) > 4096:
            _MSPECIAL.clear()
        fam = _MSPECIAL[key] = Family.m_special(T, m)
    return fam


# -- special subtrees ----------------------------------------------------------


@dataclass(frozen=True)
class SpecialCover:
    cover: list[frozenset[int]]
    min_count: int


def _levels_within(T: FiniteTree, mask: int) -> dict[int, int]:
    """1-based length of the longest chain inside ``mask`` ending at each node."""
    level: dict[int, int] = {}
    for v in sorted(_bits(mask), key=lambda v: T.depth[v]):
        level[v] = 1 + max((level[u] for u in _bits(T.down[v] & mask)), default=0)
    return level


def special_cover(T: FiniteTree, X: Iterable[int]) -> SpecialCover:
    """Partition ``X`` into the fewest antichains (one per chain-depth level)."""
    level = _levels_within(T, T._mask(X))
    count = max(level.values(), default=0)
    cover: list[set[int]] = [set() for _ in range(count)]
    for v, lv in level.items():
        cover[lv - 1].add(v)
    return SpecialCover([frozenset(a) for a in cover], count)


def merge_special_above_antichain(
    T: FiniteTree, A: Iterable[int], X: Mapping[int, Iterable[int]], m: int
) -> list[frozenset[int]]:
    """Cover the union of ``m``-special sets sitting above an antichain with ``<= m`` antichains.

    Cones over incomparable nodes are disjoint, so the ``i``-th antichain of
    every piece can share one index.
    """
    amask = T._mask(A)
    if not T.is_antichain_mask(amask):
        raise NotAnAntichain(f"{sorted(members(amask))} is not an antichain")
    merged: list[set[int]] = [set() for _ in range(m)]
    for t in _bits(amask):
        xmask = T._mask(X.get(t, ()))
        if xmask & ~T.cone_mask(t):
            raise NotInCone(f"X_{t} leaves the cone of {t}")
        cover = special_cover(T, members(xmask))
        if cover.min_count > m:
            raise BudgetViolated(f"X_{t} needs {cover.min_count} > {m} antichains")
        for i, piece in enumerate(cover.cover):
            merged[i] |= piece
    while merged and not merged[-1]:
        merged.pop()
    return [frozenset(a) for a in merged]


def isolated_regressive(T: FiniteTree, S: Iterable[int]) -> RegressiveMap:
    """``f(t)`` = the highest point of ``S`` strictly below ``t`` (the root if none).

    Every fiber is an antichain, so ``S`` is a diagonal union of antichains.
    """
    smask = T._mask(S)
    assignment = {}
    for t in _bits(smask):
        below = smask & T.down[t]
        if t == T.root or not below:
            assignment[t] = T.root
        else:
            assignment[t] = max(_bits(below), key=lambda v: T.depth[v])
    return RegressiveMap(T, assignment)


def diag_iterate(T: FiniteTree, F: Family, rounds: int) -> Family:
    """Apply the diagonal closure ``rounds`` times, materializing each round."""
    if T.n > ITERATE_MAX_NODES:
        raise AmbientTooLarge(f"diag_iterate needs at most {ITERATE_MAX_NODES} nodes, got {T.n}")
    if rounds < 1:
        raise ParamOutOfRange("rounds must be >= 1")
    current = F
    for _ in range(rounds):
        current = _diag_closure(T, current)
    return current


def _diag_closure(T: FiniteTree, F: Family) -> Family:
    # the closure is downward closed, so a set is only tested once all of
    # its one-smaller subsets passed
    good: set[int] = set()
    by_size = sorted(_submasks(T.full_mask), key=lambda x: (bin(x).count("1"), x))
    for x in by_size:
        if any(x & ~(1 << v) not in good for v in _bits(x)):
            continue
        if _regressive_search(T, x, F, None) is not None:
            good.add(x)
    return Family.from_members(T, good, check=False)


def collapse_double_union(T: FiniteTree, B: Mapping[tuple[int, int], Iterable[int]]) -> dict[int, frozenset[int]]:
    """Rewrite a double diagonal union as a single one.

    ``B[t, s]`` is the ``s``-th piece of the ``t``-th outer set. Returns
    ``D[r]``: the union of ``B[t, r]`` over ``t <= r`` and of ``B[r, s]``
    over ``s <= r``, so that the diagonal union of ``D`` equals the
    double diagonal union of ``B``. Each ``D[r]`` draws on at most
    ``2 * (depth(r) + 1)`` pieces.
    """
    D: dict[int, int] = {r: 0 for r in T.nodes}
    for (t, s), piece in B.items():
        pm = T._mask(piece)
        if T.leq(t, s):
            D[s] |= pm
        if T.leq(s, t):
            D[t] |= pm
    return {r: members(m) for r, m in D.items()}


def double_diag_union(T: FiniteTree, B: Mapping[tuple[int, int], Iterable[int]]) -> frozenset[int]:
    inner: dict[int, int] = {t: 0 for t in T.nodes}
    cones = T.cone_masks
    for (t, s), piece in B.items():
        inner[t] |= T._mask(piece) & cones[s]
    return members(diag_union_mask(T, inner))
