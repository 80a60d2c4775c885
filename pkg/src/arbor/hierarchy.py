"""The I(t, sigma) / J(t, sigma) recursion over explicit base ideals.

Each node ``t`` carries a base family ``I_t`` of subsets of ``pred(t)``.
From it:

* ``J(t, ()) = I_t``;
* ``X in I(t, sigma + (i,))``  iff  ``X & c_i(t) in J(t, sigma)``;
* for nonempty ``sigma``, ``X in J(t, sigma)``  iff the set of
  ``s in S_{|sigma|-1}`` below ``t`` with ``X & pred(s)`` *positive* for
  ``I(s, sigma)`` lies in ``I_t``.

"Positive" means not a member (complement within the subsets of
``pred(s)``). ``S_0`` is given; ``S_{n+1}`` keeps the ``t in S_n`` for
which ``S_n & pred(t)`` is ``I_t``-positive.

Base families default to principal ones. Principality is what makes
``J(t, sigma)`` equal the intersection of the ``I(t, sigma + (i,))``; for
other downward-closed bases only the inclusion of ``J`` in that
intersection is guaranteed.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping, Sequence

from .coloring import PairColoring
from .errors import InvalidColor, NodeNotInLevel, ParamOutOfRange
from .ideal import Family, parse_family
from .tree import FiniteTree, _bits, members

__all__ = [
    "HierarchyConfig",
    "Hierarchy",
    "in_I",
    "in_J",
    "s_sequence",
    "sigma_set",
    "sigma0",
]


@dataclass(frozen=True, eq=False)
class HierarchyConfig:
    tree: FiniteTree
    coloring: PairColoring
    base: Mapping[int, Family] = field(default_factory=dict)
    S0: frozenset[int] | None = None

    def __post_init__(self) -> None:
        T = self.tree
        if self.coloring.ambient != T:
            raise ParamOutOfRange("coloring belongs to another tree")
        base = {}
        for t in T.nodes:
            fam = self.base.get(t)
            if fam is None:
                fam = Family.principal(T, ())
            elif fam.kind != "mspecial" and any(g & ~T.down[t] for g in fam.generators):
                raise ParamOutOfRange(f"base family at {t} reaches outside pred({t})")
            base[t] = fam
        object.__setattr__(self, "base", base)
        s0 = frozenset(T.nodes) if self.S0 is None else frozenset(self.S0)
        T._mask(s0)
        object.__setattr__(self, "S0", s0)

    @classmethod
    def from_specs(
        cls,
        tree: FiniteTree,
        coloring: PairColoring,
        specs: Mapping[int, str],
        S0: Iterable[int] | None = None,
    ) -> "HierarchyConfig":
        """Build from per-node family specs such as ``{2: "principal:0"}``."""
        return cls(tree, coloring, {t: parse_family(tree, s) for t, s in specs.items()}, None if S0 is None else frozenset(S0))

    @property
    def is_principal(self) -> bool:
        return all(f.kind == "principal" for f in self.base.values())

    @cached_property
    def engine(self) -> "Hierarchy":
        return Hierarchy(self)


class Hierarchy:
    """Memoized evaluator for one config. Not safe to share across threads."""

    def __init__(self, cfg: HierarchyConfig):
        self.cfg = cfg
        T = cfg.tree
        self.T = T
        self.k = cfg.coloring.k
        self._base = [cfg.base[t].contains_mask for t in T.nodes]
        self._chi = [
            [T.down[t] & cfg.coloring.adjacency[i][t] for t in T.nodes] for i in range(self.k)
        ]
        self._levels = [T._mask(cfg.S0)]
        self._memo: dict[tuple[int, tuple[int, ...], int], bool] = {}

    # -- levels --------------------------------------------------------------

    def level(self, n: int) -> int:
        while len(self._levels) <= n:
            prev = self._levels[-1]
            nxt = 0
            for t in _bits(prev):
                if not self._base[t](prev & self.T.down[t]):
                    nxt |= 1 << t
            self._levels.append(nxt)
        return self._levels[n]

    def s_sequence(self, depth: int) -> list[frozenset[int]]:
        if depth < 0:
            raise ParamOutOfRange("depth must be >= 0")
        self.level(depth)
        return [members(m) for m in self._levels[: depth + 1]]

    # -- membership ------------------------------------------------------------

    def _prep(self, t: int, sigma: Sequence[int], X: Iterable[int] | int, need_level: int) -> tuple[tuple[int, ...], int]:
        self.T._check(t)
        sigma = tuple(sigma)
        for i in sigma:
            if not isinstance(i, int) or not 0 <= i < self.k:
                raise InvalidColor(f"color {i!r} outside 0..{self.k - 1}")
        if not self.level(need_level) >> t & 1:
            raise NodeNotInLevel(f"node {t} is not in S_{need_level}")
        xmask = X if isinstance(X, int) else self.T._mask(X)
        if xmask & ~self.T.down[t]:
            raise ParamOutOfRange(f"X must be a subset of pred({t})")
        return sigma, xmask

    def in_J(self, t: int, sigma: Sequence[int], X: Iterable[int] | int) -> bool:
        sigma, xmask = self._prep(t, sigma, X, len(tuple(sigma)))
        return self._J(t, sigma, xmask)

    def in_I(self, t: int, sigma: Sequence[int], X: Iterable[int] | int) -> bool:
        sigma = tuple(sigma)
        if not sigma:
            raise ParamOutOfRange("I(t, sigma) needs a nonempty sigma")
        sigma, xmask = self._prep(t, sigma, X, len(sigma) - 1)
        return self._I(t, sigma, xmask)

    def _I(self, t: int, sigma: tuple[int, ...], xmask: int) -> bool:
        return self._J(t, sigma[:-1], xmask & self._chi[sigma[-1]][t])

    def _J(self, t: int, sigma: tuple[int, ...], xmask: int) -> bool:
        if not sigma:
            return self._base[t](xmask)
        key = (t, sigma, xmask)
        hit = self._memo.get(key)
        if hit is not None:
            return hit
        down = self.T.down
        below = self.level(len(sigma) - 1) & down[t]
        witnesses = 0
        for s in _bits(below):
            if not self._I(s, sigma, xmask & down[s]):
                witnesses |= 1 << s
        ok = self._base[t](witnesses)
        self._memo[key] = ok
        return ok

    def sigma_set(self, t: int, S: Iterable[int]) -> list[tuple[int, ...]]:
        """The nonempty injective ``sigma`` with ``S & pred(t)`` positive for ``I(t, sigma)``.

        Sequences whose level ``S_{|sigma|-1}`` does not contain ``t`` are
        skipped.
        """
        self.T._check(t)
        smask = self.T._mask(S) & self.T.down[t]
        out = []
        for sigma in sigma0(self.k):
            if not self.level(len(sigma) - 1) >> t & 1:
                continue
            if not self._I(t, sigma, smask):
                out.append(sigma)
        return out


def sigma0(k: int) -> list[tuple[int, ...]]:
    """Nonempty sequences of distinct colors below ``k``, shortest first."""
    return [p for r in range(1, k + 1) for p in itertools.permutations(range(k), r)]


def in_J(cfg: HierarchyConfig, t: int, sigma: Sequence[int], X: Iterable[int]) -> bool:
    return cfg.engine.in_J(t, sigma, X)


def in_I(cfg: HierarchyConfig, t: int, sigma: Sequence[int], X: Iterable[int]) -> bool:
    return cfg.engine.in_I(t, sigma, X)


def s_sequence(cfg: HierarchyConfig, depth: int) -> list[frozenset[int]]:
    return cfg.engine.s_sequence(depth)


def sigma_set(cfg: HierarchyConfig, t: int, S: Iterable[int]) -> list[tuple[int, ...]]:
    return cfg.engine.sigma_set(t, S)
