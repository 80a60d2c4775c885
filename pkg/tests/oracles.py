"""Independent brute-force oracles. Nothing here calls the search code under test."""

from __future__ import annotations

import itertools
from bisect import bisect_left


def bits(mask):
    return [i for i in range(mask.bit_length()) if mask >> i & 1]


def mask(nodes):
    out = 0
    for v in nodes:
        out |= 1 << v
    return out


# -- trees from parent arrays, recomputed from scratch --------------------------


def ancestors(parent, t):
    out = set()
    p = parent[t]
    while p is not None:
        out.add(p)
        p = parent[p]
    return out


def cone(parent, t):
    n = len(parent)
    if parent[t] is None:
        return set(range(n))
    return {s for s in range(n) if t in ancestors(parent, s)}


def is_chain(less, nodes):
    nodes = list(nodes)
    return all(less(a, b) or less(b, a) for a, b in itertools.combinations(nodes, 2))


def is_antichain(less, nodes):
    return all(not less(a, b) and not less(b, a) for a, b in itertools.combinations(list(nodes), 2))


def longest_chain(less, nodes):
    nodes = list(nodes)
    best = 0
    for r in range(len(nodes), 0, -1):
        if any(is_chain(less, c) for c in itertools.combinations(nodes, r)):
            return r
    return best


def min_antichain_cover(less, nodes):
    """Smallest number of antichains partitioning ``nodes``, by trying every labelling."""
    nodes = list(nodes)
    if not nodes:
        return 0
    for k in range(1, len(nodes) + 1):
        for labels in itertools.product(range(k), repeat=len(nodes)):
            parts = [[v for v, l in zip(nodes, labels) if l == j] for j in range(k)]
            if all(is_antichain(less, p) for p in parts):
                return k
    raise AssertionError


# -- diagonal unions -----------------------------------------------------------


def diag_family(parent, members):
    """Every diagonal union of an assignment t -> A_t with A_t drawn from ``members`` (masks)."""
    n = len(parent)
    cones = [mask(cone(parent, t)) for t in range(n)]
    reach = {0}
    for t in range(n):
        reach = {r | (a & cones[t]) for r in reach for a in members}
    return reach


def regressive_member(parent, X, contains):
    """Is there f on X with f(t) < t (root -> root) whose fibers satisfy ``contains``?"""
    xs = sorted(X)
    choices = []
    for t in xs:
        choices.append([t] if parent[t] is None else sorted(ancestors(parent, t)))
    for pick in itertools.product(*choices):
        fibers = {}
        for t, f in zip(xs, pick):
            fibers.setdefault(f, set()).add(t)
        if all(contains(mask(fib)) for fib in fibers.values()):
            return True
    return False


def downward_closure(gens):
    out = set()
    for g in gens:
        sub = g
        while True:
            out.add(sub)
            if sub == 0:
                break
            sub = (sub - 1) & g
    return out


# -- chains and colorings ------------------------------------------------------


def max_homog(less, n, color_of, chi):
    best = 1 if n else 0
    for r in range(2, n + 1):
        hit = False
        for sub in itertools.combinations(range(n), r):
            if is_chain(less, sub) and all(color_of(a, b) == chi for a, b in itertools.combinations(sub, 2)):
                hit = True
                break
        if not hit:
            break
        best = r
    return best


def lis(seq):
    tails = []
    for x in seq:
        i = bisect_left(tails, x)
        if i == len(tails):
            tails.append(x)
        else:
            tails[i] = x
    return len(tails)


def lis_quadratic(seq):
    best = [1] * len(seq)
    for j in range(len(seq)):
        for i in range(j):
            if seq[i] < seq[j]:
                best[j] = max(best[j], best[i] + 1)
    return max(best, default=0)


def lds_quadratic(seq):
    return lis_quadratic([-x for x in seq])


def arrow_holds(less, n, goals):
    """Plain enumeration of every coloring of the comparable pairs."""
    pairs = [(a, b) for a in range(n) for b in range(n) if less(a, b)]
    k = len(goals)
    for colors in itertools.product(range(k), repeat=len(pairs)):
        table = dict(zip(pairs, colors))

        def col(a, b):
            return table.get((a, b), table.get((b, a)))

        if all(max_homog(less, n, col, chi) < goals[chi] for chi in range(k)):
            return False
    return True


# -- ordinals as nested exponent lists ------------------------------------------
# An ordinal is a list of exponents (each itself such a list), non-increasing,
# one entry per omega-power summand: w^2*2 + 1 is [[[], []], [[], []], []].


def unroll(o):
    """Ordinal -> list of exponents with multiplicity, each exponent unrolled recursively."""
    out = []
    for exp, coef in o.terms:
        out.extend([unroll(exp)] * coef)
    return out


def cmp_unrolled(a, b):
    for x, y in zip(a, b):
        c = cmp_unrolled(x, y)
        if c:
            return c
    return (len(a) > len(b)) - (len(a) < len(b))


def add_unrolled(a, b):
    """Concatenate, then absorb any summand followed by a strictly larger one."""
    seq = list(a) + list(b)
    changed = True
    while changed:
        changed = False
        for i in range(len(seq) - 1):
            if cmp_unrolled(seq[i], seq[i + 1]) < 0:
                del seq[i]
                changed = True
                break
    return seq


def hereditary_value(o, base):
    """Evaluate the Cantor normal form with omega replaced by ``base``."""
    return sum(coef * base ** hereditary_value(exp, base) for exp, coef in o.terms)


def pigeonhole_exhaustive(rho, xi, m):
    """Enumerate fiber-size profiles (maps up to relabelling the domain)."""
    for sizes in itertools.product(range(rho + 1), repeat=m):
        if sum(sizes) == rho and max(sizes) < xi:
            return False
    return True


def diagu_forms(parent, A, X, dunion):
    """The eight equivalent forms of a diagonal union, evaluated with ``dunion``.

    ``A`` and ``X`` are lists of masks indexed by node; every ``X[t]`` must
    avoid the cone of ``t``. Returns the list of resulting masks, form (*)
    computed directly from ancestor sets.
    """
    n = len(parent)
    full = (1 << n) - 1
    anc = [mask(ancestors(parent, t)) for t in range(n)]
    cones = [mask(cone(parent, t)) for t in range(n)]
    root = parent.index(None)
    star = 0
    for s in range(n):
        pool = A[root]
        for t in range(n):
            if anc[s] >> t & 1:
                pool |= A[t]
        if pool >> s & 1:
            star |= 1 << s
    cumulative = [0] * n
    strict = [0] * n
    for t in range(n):
        for s in range(n):
            if anc[t] >> s & 1:
                strict[t] |= A[s]
        cumulative[t] = strict[t] | A[t]
    return [
        star,
        dunion([A[t] & cones[t] for t in range(n)]),
        dunion([A[t] | anc[t] | (0 if t == root else 1 << t) for t in range(n)]),
        dunion([A[t] | (full & ~cones[t]) for t in range(n)]),
        dunion([A[t] | X[t] for t in range(n)]),
        dunion([A[t] & ~X[t] for t in range(n)]),
        dunion(cumulative),
        dunion([A[t] & ~strict[t] for t in range(n)]),
    ]


# -- good decompositions ------------------------------------------------------


def good_oracle(less, c, leaves_by_level, rho, sigma):
    """Check goodness straight from the recursive definition on nested lists."""
    if not sigma:
        return isinstance(leaves_by_level, int)
    if len(leaves_by_level) != rho:
        return False
    flat = [list(_flatten(b)) for b in leaves_by_level]
    for a, b in itertools.combinations(range(rho), 2):
        for s in flat[a]:
            for t in flat[b]:
                if not less(s, t) or c(s, t) != sigma[-1]:
                    return False
    return all(good_oracle(less, c, b, rho, sigma[:-1]) for b in leaves_by_level)


def _flatten(x):
    if isinstance(x, int):
        yield x
    else:
        for y in x:
            yield from _flatten(y)


# -- the I/J recursion, restated over frozensets ---------------------------------


class HierarchyOracle:
    """Plain recursive evaluation of I(t, sigma) and J(t, sigma), no memo."""

    def __init__(self, parent, color_of, k, base, S0):
        self.parent = list(parent)
        self.n = len(parent)
        self.pred = [frozenset(ancestors(parent, t)) for t in range(self.n)]
        self.color_of = color_of
        self.k = k
        self.base = base  # t -> predicate on frozensets
        levels = [frozenset(S0)]
        for _ in range(self.n + 1):
            prev = levels[-1]
            levels.append(frozenset(t for t in prev if not base[t](prev & self.pred[t])))
        self.levels = levels

    def chi(self, t, i):
        return frozenset(s for s in self.pred[t] if self.color_of(s, t) == i)

    def J(self, t, sigma, X):
        if not sigma:
            return self.base[t](X)
        below = self.levels[len(sigma) - 1] & self.pred[t]
        positive = frozenset(s for s in below if not self.I(s, sigma, X & self.pred[s]))
        return self.base[t](positive)

    def I(self, t, sigma, X):
        return self.J(t, sigma[:-1], X & self.chi(t, sigma[-1]))
