"""Homogeneous chains, the arrow relation and the transfer from posets to trees.

Only comparable pairs carry a color, so a set of nodes whose pairs all have
color ``chi`` is automatically a chain: homogeneous chains are exactly the
cliques of the color-``chi`` graph. Everything below is clique search on
bitmasks.
"""

from __future__ import annotations

import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterator, Sequence, Union

from .coloring import PairColoring
from .errors import InvalidColor, NoHomogeneousChain, ParamOutOfRange, SearchSpaceTooLarge, guard
from .tree import FinitePoset, FiniteTree, SigmaPrime, members, sigma_prime

__all__ = [
    "ArrowGoal",
    "ArrowVerdict",
    "HomogChain",
    "Transfer",
    "max_homog_chain",
    "arrows_decide",
    "pullback_coloring",
    "pullback_transfer",
    "gray_code",
]

Ambient = Union[FiniteTree, FinitePoset]

SEARCH_SPACE_GUARD = 2**26


@dataclass(frozen=True)
class ArrowGoal:
    """Required homogeneous-chain length per color; ``len(goals)`` is the number of colors."""

    goals: tuple[int, ...]

    def __post_init__(self) -> None:
        goals = tuple(self.goals)
        if not goals:
            raise ParamOutOfRange("need at least one color")
        if any(not isinstance(g, int) or g < 1 for g in goals):
            raise ParamOutOfRange("goal lengths must be positive ints")
        object.__setattr__(self, "goals", goals)

    @property
    def k(self) -> int:
        return len(self.goals)

    @classmethod
    def parse(cls, text: str) -> "ArrowGoal":
        try:
            return cls(tuple(int(g) for g in text.split(",")))
        except ValueError:
            raise ParamOutOfRange(f"bad goal list {text!r}") from None


@dataclass(frozen=True)
class HomogChain:
    length: int
    chain: frozenset[int]
    color: int


@dataclass(frozen=True)
class ArrowVerdict:
    holds: bool
    witness_coloring: PairColoring | None = None
    witness_chain: tuple[frozenset[int], int] | None = None
    colorings_examined: int = 0
    elapsed_ms: float = field(default=0.0, compare=False)


def _popcount(x: int) -> int:
    return bin(x).count("1")


def _max_clique(adj: Sequence[int], cand: int, need_more_than: int = 0) -> int:
    """Lexicographically least maximum clique inside ``cand`` (as a mask).

    Include-before-exclude over ascending vertices visits sets in lex order,
    so only strict improvements replace the incumbent.
    """
    best_size = need_more_than
    best = 0

    def expand(cur: int, size: int, cand: int) -> None:
        nonlocal best_size, best
        if not cand:
            if size > best_size:
                best_size, best = size, cur
            return
        if size + _popcount(cand) <= best_size:
            return
        low = cand & -cand
        v = low.bit_length() - 1
        expand(cur | low, size + 1, cand & adj[v])
        expand(cur, size, cand & ~low)

    expand(0, 0, cand)
    return best


def _find_clique(adj: Sequence[int], cand: int, size: int) -> int | None:
    """Any clique of exactly ``size`` vertices inside ``cand``, or None."""
    if size <= 0:
        return 0
    if _popcount(cand) < size:
        return None
    while cand:
        low = cand & -cand
        v = low.bit_length() - 1
        cand &= ~low
        rest = _find_clique(adj, cand & adj[v], size - 1)
        if rest is not None:
            return rest | low
        if _popcount(cand) < size:
            return None
    return None


def max_homog_chain(ambient: Ambient, c: PairColoring, chi: int, nodes: int | None = None) -> HomogChain:
    """A longest ``chi``-homogeneous chain, lexicographically least among ties.

    ``nodes`` optionally restricts the search to a node mask.
    """
    if not isinstance(chi, int) or not 0 <= chi < c.k:
        raise InvalidColor(f"color {chi!r} outside 0..{c.k - 1}")
    cand = ambient.full_mask if nodes is None else nodes & ambient.full_mask
    best = _max_clique(c.adjacency[chi], cand)
    chain = members(best)
    if not (ambient.is_chain_mask(best) and c.is_homogeneous(chain, chi)):
        raise AssertionError("clique search returned a non-homogeneous set")
    return HomogChain(len(chain), chain, chi)


# -- arrow relation ------------------------------------------------------------


def _pair_order(ambient: Ambient) -> list[tuple[int, int]]:
    # pairs whose upper end sits low come first so chains close early
    rank = {v: (_popcount(ambient.down[v]), v) for v in range(ambient.n)}
    return sorted(ambient.comparable_pairs, key=lambda p: (rank[p[1]], rank[p[0]]))


def _search(ambient: Ambient, goals: tuple[int, ...], prefix: tuple[int, ...]):
    """Depth-first search for a coloring without a goal-length chain.

    Returns ``(counterexample_colors or None, examined, last_chain)``; the
    colors list follows :func:`_pair_order`.
    """
    pairs = _pair_order(ambient)
    k = len(goals)
    n = ambient.n
    adj = [[0] * n for _ in range(k)]
    colors = [0] * len(pairs)
    examined = 0
    last_chain: tuple[int, int] | None = None

    def closes(u: int, v: int, chi: int) -> int | None:
        a = adj[chi]
        rest = _find_clique(a, a[u] & a[v], goals[chi] - 2)
        return None if rest is None else rest | (1 << u) | (1 << v)

    def dfs(i: int) -> bool:
        nonlocal examined, last_chain
        if i == len(pairs):
            examined += 1
            return True
        u, v = pairs[i]
        choices = (prefix[i],) if i < len(prefix) else range(k)
        for chi in choices:
            a = adj[chi]
            a[u] |= 1 << v
            a[v] |= 1 << u
            hit = closes(u, v, chi)
            if hit is None:
                colors[i] = chi
                if dfs(i + 1):
                    return True
            else:
                examined += 1
                last_chain = (hit, chi)
            a[u] &= ~(1 << v)
            a[v] &= ~(1 << u)
        return False

    found = dfs(0)
    return (list(colors) if found else None), examined, last_chain


def _search_job(args):
    return _search(*args)


def arrows_decide(
    ambient: Ambient,
    goal: ArrowGoal | Sequence[int],
    *,
    method: str = "prune",
    workers: int = 1,
    max_space: float | None = None,
) -> ArrowVerdict:
    """Decide ``ambient -> (goal_0, ..., goal_{k-1})^2`` by exhausting colorings.

    ``method="prune"`` runs a depth-first search that abandons a partial
    coloring as soon as some color meets its goal; ``"gray"`` walks every
    total coloring in reflected Gray-code order, updating one pair per step.
    When every goal is equal, colorings that differ by a color permutation
    are equivalent and the first pair's color is fixed.
    """
    start = time.perf_counter()
    if not isinstance(goal, ArrowGoal):
        goal = ArrowGoal(tuple(goal))
    goals, k = goal.goals, goal.k
    npairs = len(ambient.comparable_pairs)
    limit = guard(SEARCH_SPACE_GUARD) if max_space is None else max_space
    if k**npairs > limit:
        raise SearchSpaceTooLarge(f"{k}^{npairs} colorings exceed the guard {int(limit)}")

    def done(holds, colors=None, chain=None, examined=0):
        wc = None
        if colors is not None:
            wc = PairColoring(ambient, k, dict(zip(_pair_order(ambient), colors)))
            for chi in range(k):
                if max_homog_chain(ambient, wc, chi).length >= goals[chi]:
                    raise AssertionError("counterexample failed re-verification")
        wchain = None if chain is None else (members(chain[0]), chain[1])
        return ArrowVerdict(holds, wc, wchain, examined, (time.perf_counter() - start) * 1000)

    if ambient.n > 0 and min(goals) <= 1:
        chi = goals.index(min(goals))
        return done(True, chain=(1, chi), examined=0)
    if ambient.n == 0:
        return done(False, colors=[], examined=1)

    symmetric = k > 1 and len(set(goals)) == 1 and npairs > 0
    if method == "gray":
        colors, examined, chain = _gray_search(ambient, goals, symmetric)
        return done(colors is None, colors, chain, examined)
    if method != "prune":
        raise ParamOutOfRange(f"unknown method {method!r}")

    base = (0,) if symmetric else ()
    depth = 0
    if workers > 1:
        while k ** (depth + 1) <= 4 * workers and len(base) + depth + 1 <= npairs:
            depth += 1
    prefixes = [base + p for p in _product(range(k), depth)] if depth else [base]
    jobs = [(ambient, goals, p) for p in prefixes]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_search_job, jobs))
    else:
        results = []
        for job in jobs:
            results.append(_search(*job))
            if results[-1][0] is not None:
                break
    examined = sum(r[1] for r in results)
    chain = None
    for colors, _, last in results:
        chain = last or chain
        if colors is not None:
            return done(False, colors, None, examined)
    return done(True, None, chain, examined)


def _product(alphabet, n) -> Iterator[tuple[int, ...]]:
    if n == 0:
        yield ()
        return
    for head in alphabet:
        for tail in _product(alphabet, n - 1):
            yield (head,) + tail


def gray_code(npos: int, k: int) -> Iterator[tuple[int, int]]:
    """Reflected ``k``-ary Gray code as ``(position, new_digit)`` steps from all zeros.

    Yields ``k**npos - 1`` steps; consecutive words differ in one position.
    """
    digits = [0] * npos
    dirs = [1] * npos
    while True:
        j = 0
        while j < npos:
            nd = digits[j] + dirs[j]
            if 0 <= nd < k:
                break
            dirs[j] = -dirs[j]
            j += 1
        if j == npos:
            return
        digits[j] = nd
        yield j, nd


def _gray_search(ambient: Ambient, goals: tuple[int, ...], symmetric: bool):
    pairs = _pair_order(ambient)
    k = len(goals)
    n = ambient.n
    adj = [[0] * n for _ in range(k)]
    for u, v in pairs:
        adj[0][u] |= 1 << v
        adj[0][v] |= 1 << u
    colors = [0] * len(pairs)
    full = ambient.full_mask
    # with equal goals, pair 0 stays at color 0: walk only the other positions
    free = len(pairs) - 1 if symmetric else len(pairs)
    offset = len(pairs) - free
    examined = 0
    last = None

    def check():
        nonlocal last
        for chi in range(k):
            hit = _find_clique(adj[chi], full, goals[chi])
            if hit is not None:
                last = (hit, chi)
                return False
        return True

    examined += 1
    if check():
        return colors, examined, None
    for pos, digit in gray_code(free, k):
        i = pos + offset
        u, v = pairs[i]
        old = colors[i]
        adj[old][u] &= ~(1 << v)
        adj[old][v] &= ~(1 << u)
        adj[digit][u] |= 1 << v
        adj[digit][v] |= 1 << u
        colors[i] = digit
        examined += 1
        if check():
            return colors, examined, None
    return None, examined, last


# -- poset transfer ------------------------------------------------------------


@dataclass(frozen=True)
class Transfer:
    tree_chain: tuple[int, ...]
    poset_chain: tuple[int, ...]
    color: int
    sigma: SigmaPrime = field(repr=False, compare=False)


def pullback_coloring(sp: SigmaPrime, c: PairColoring) -> PairColoring:
    """Color ``a < b`` in the chain tree by ``c(max a, max b)``.

    Pairs through the synthetic root get color 0 and are never searched.
    """
    values = {}
    root = sp.tree.root
    for a, b in sp.tree.comparable_pairs:
        values[(a, b)] = 0 if a == root else c(sp.max_map[a], sp.max_map[b])
    return PairColoring(sp.tree, c.k, values)


def pullback_transfer(P: FinitePoset, c: PairColoring, goal: ArrowGoal | Sequence[int]) -> Transfer:
    """Find a homogeneous chain in the chain tree of ``P`` and push it down to ``P``.

    ``max`` is strictly increasing along end-extensions, so the image of a
    homogeneous tree chain is a homogeneous chain of ``P`` of the same length
    and color.
    """
    if not isinstance(goal, ArrowGoal):
        goal = ArrowGoal(tuple(goal))
    if goal.k != c.k:
        raise ParamOutOfRange(f"goal has {goal.k} colors, coloring has {c.k}")
    sp = sigma_prime(P)
    pulled = pullback_coloring(sp, c)
    nonroot = sp.tree.full_mask & ~(1 << sp.tree.root)
    for chi, need in enumerate(goal.goals):
        h = max_homog_chain(sp.tree, pulled, chi, nodes=nonroot)
        if h.length >= need:
            tree_chain = tuple(sp.tree.sort_chain(h.chain)[:need])
            poset_chain = tuple(sp.max_map[a] for a in tree_chain)
            if len(set(poset_chain)) != need or not c.is_homogeneous(poset_chain, chi):
                raise AssertionError("pushed-forward chain is not homogeneous")
            return Transfer(tree_chain, poset_chain, chi, sp)
    raise NoHomogeneousChain(f"no color reaches its goal {goal.goals} in the chain tree")
