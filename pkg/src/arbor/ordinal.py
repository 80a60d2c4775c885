"""Cantor normal form ordinals below epsilon_0.

Only what partition-goal bookkeeping needs: comparison, addition, powers of
omega, indecomposability and the one-dimensional pigeonhole goal.

Text form: ``w^2 + w*4``, ``5``, ``w^w``, ``w^(w+1)*3``.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from functools import total_ordering
from typing import Union

from .errors import OrdinalError, OrdinalParseError

__all__ = [
    "Ordinal",
    "ZERO",
    "ONE",
    "OMEGA",
    "ord_compare",
    "ord_add",
    "omega_power",
    "is_indecomposable",
    "pigeonhole_goal",
    "verify_pigeonhole_finite",
    "verify_pigeonhole_exhaustive",
    "parse_ordinal",
]

IntoOrdinal = Union["Ordinal", int, str]


@total_ordering
@dataclass(frozen=True)
class Ordinal:
    """An ordinal as a tuple of ``(exponent, coefficient)`` CNF terms.

    Exponents are strictly decreasing and coefficients positive; the empty
    tuple is 0.
    """

    terms: tuple[tuple["Ordinal", int], ...] = ()

    def __post_init__(self) -> None:
        prev = None
        for exp, coef in self.terms:
            if not isinstance(exp, Ordinal):
                raise OrdinalError(f"exponent must be an Ordinal, got {exp!r}")
            if not isinstance(coef, int) or coef < 1:
                raise OrdinalError(f"coefficient must be a positive int, got {coef!r}")
            if prev is not None and _cmp(exp, prev) >= 0:
                raise OrdinalError("exponents must be strictly decreasing")
            prev = exp

    @classmethod
    def of(cls, value: IntoOrdinal) -> "Ordinal":
        if isinstance(value, Ordinal):
            return value
        if isinstance(value, bool):
            raise TypeError("bool is not an ordinal")
        if isinstance(value, int):
            if value < 0:
                raise OrdinalError("negative integers are not ordinals")
            return cls(((ZERO, value),)) if value else ZERO
        if isinstance(value, str):
            return parse_ordinal(value)
        raise TypeError(f"cannot convert {type(value).__name__} to Ordinal")

    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def is_finite(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and self.terms[0][0].is_zero)

    def __int__(self) -> int:
        if not self.is_finite:
            raise OrdinalError(f"{self} is infinite")
        return self.terms[0][1] if self.terms else 0

    def leading_exponent(self) -> "Ordinal":
        if not self.terms:
            raise OrdinalError("0 has no leading exponent")
        return self.terms[0][0]

    def __eq__(self, other: object) -> bool:
        if isinstance(other, int) and not isinstance(other, bool):
            if other < 0:
                return False
            other = Ordinal.of(other)
        if not isinstance(other, Ordinal):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self) -> int:
        return hash(self.terms)

    def __lt__(self, other: IntoOrdinal) -> bool:
        return _cmp(self, Ordinal.of(other)) < 0

    def __add__(self, other: IntoOrdinal) -> "Ordinal":
        return ord_add(self, Ordinal.of(other))

    def __radd__(self, other: int) -> "Ordinal":
        return ord_add(Ordinal.of(other), self)

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        return " + ".join(_term_str(e, c) for e, c in self.terms)

    def __repr__(self) -> str:
        return f"Ordinal({str(self)!r})"


def _term_str(exp: Ordinal, coef: int) -> str:
    if exp.is_zero:
        return str(coef)
    if exp == ONE:
        base = "w"
    elif exp.is_finite or exp == OMEGA:
        base = f"w^{exp}"
    else:
        base = f"w^({exp})"
    return base if coef == 1 else f"{base}*{coef}"


ZERO = Ordinal(())
ONE = Ordinal(((ZERO, 1),))
OMEGA = Ordinal(((ONE, 1),))


def _cmp(a: Ordinal, b: Ordinal) -> int:
    for (ea, ca), (eb, cb) in zip(a.terms, b.terms):
        c = _cmp(ea, eb)
        if c:
            return c
        if ca != cb:
            return -1 if ca < cb else 1
    return (len(a.terms) > len(b.terms)) - (len(a.terms) < len(b.terms))


def ord_compare(a: IntoOrdinal, b: IntoOrdinal) -> str:
    """Return ``"less"``, ``"equal"`` or ``"greater"``."""
    c = _cmp(Ordinal.of(a), Ordinal.of(b))
    return ("less", "equal", "greater")[c + 1]


def ord_add(a: IntoOrdinal, b: IntoOrdinal) -> Ordinal:
    a, b = Ordinal.of(a), Ordinal.of(b)
    if b.is_zero:
        return a
    lead, lead_coef = b.terms[0]
    kept: list[tuple[Ordinal, int]] = []
    for exp, coef in a.terms:
        c = _cmp(exp, lead)
        if c > 0:
            kept.append((exp, coef))
        elif c == 0:
            lead_coef += coef
            break
        else:
            break
    return Ordinal(tuple(kept) + ((lead, lead_coef),) + b.terms[1:])


def omega_power(exponent: IntoOrdinal) -> Ordinal:
    return Ordinal(((Ordinal.of(exponent), 1),))


def is_indecomposable(a: IntoOrdinal) -> bool:
    """True iff ``a`` is a power of omega (no ``b + c = a`` with ``b, c < a``)."""
    a = Ordinal.of(a)
    if a.is_zero:
        raise OrdinalError("0 is excluded from indecomposability")
    return len(a.terms) == 1 and a.terms[0][1] == 1


def pigeonhole_goal(xi: IntoOrdinal, m: int) -> Ordinal:
    """Smallest-form ``rho >= xi`` with ``rho -> (xi)^1_m``.

    Finite ``xi = n`` gives ``(n - 1) * m + 1``; infinite ``xi`` gives
    ``w^xi``.
    """
    xi = Ordinal.of(xi)
    if m < 1:
        raise OrdinalError("m must be >= 1")
    if xi.is_zero:
        raise OrdinalError("goal xi = 0 is degenerate")
    if xi.is_finite:
        return Ordinal.of((int(xi) - 1) * m + 1)
    return omega_power(xi)


def verify_pigeonhole_finite(rho: int, xi: int, m: int) -> bool:
    """Does every map ``rho -> m`` have a fiber of size ``>= xi``?

    Counting criterion ``rho > (xi - 1) * m``.
    """
    if rho < 1 or xi < 1 or m < 1:
        raise OrdinalError("rho, xi and m must be positive")
    return rho > (xi - 1) * m


def verify_pigeonhole_exhaustive(rho: int, xi: int, m: int) -> bool:
    """Same question as :func:`verify_pigeonhole_finite`, by enumeration.

    Only fiber sizes matter, so every map is represented by its size
    vector: a composition of ``rho`` into ``m`` parts (stars and bars).
    """
    if rho < 1 or xi < 1 or m < 1:
        raise OrdinalError("rho, xi and m must be positive")
    for bars in itertools.combinations(range(rho + m - 1), m - 1):
        edges = (-1,) + bars + (rho + m - 1,)
        if max(b - a - 1 for a, b in zip(edges, edges[1:])) < xi:
            return False
    return True


# -- parsing -----------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(\d+)|(w|ω)|(\^)|(\*)|(\+)|(\()|(\)))")


def parse_ordinal(text: str) -> Ordinal:
    tokens = _tokenize(text)
    pos, value = _parse_sum(tokens, 0)
    if pos != len(tokens):
        raise OrdinalParseError(f"unexpected {tokens[pos][1]!r} in {text!r}")
    return value


def _tokenize(text: str) -> list[tuple[str, str]]:
    out = []
    pos = 0
    text = text.rstrip()
    kinds = ("int", "w", "^", "*", "+", "(", ")")
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise OrdinalParseError(f"bad character at {pos} in {text!r}")
        for kind, group in zip(kinds, m.groups()):
            if group is not None:
                out.append((kind, group))
        pos = m.end()
    if not out:
        raise OrdinalParseError("empty ordinal")
    return out


def _parse_sum(tokens, pos):
    pos, acc = _parse_term(tokens, pos)
    while pos < len(tokens) and tokens[pos][0] == "+":
        pos, term = _parse_term(tokens, pos + 1)
        acc = ord_add(acc, term)
    return pos, acc


def _parse_term(tokens, pos):
    if pos >= len(tokens):
        raise OrdinalParseError("unexpected end of input")
    kind, text = tokens[pos]
    if kind == "int":
        return pos + 1, Ordinal.of(int(text))
    if kind == "(":
        pos, inner = _parse_sum(tokens, pos + 1)
        if pos >= len(tokens) or tokens[pos][0] != ")":
            raise OrdinalParseError("unbalanced parenthesis")
        return pos + 1, inner
    if kind != "w":
        raise OrdinalParseError(f"unexpected {text!r}")
    pos += 1
    exp = ONE
    if pos < len(tokens) and tokens[pos][0] == "^":
        pos, exp = _parse_atom(tokens, pos + 1)
    coef = 1
    if pos < len(tokens) and tokens[pos][0] == "*":
        if pos + 1 >= len(tokens) or tokens[pos + 1][0] != "int":
            raise OrdinalParseError("coefficient must be a positive integer")
        coef = int(tokens[pos + 1][1])
        pos += 2
        if coef == 0:
            return pos, ZERO
    return pos, Ordinal(((exp, coef),))


def _parse_atom(tokens, pos):
    if pos >= len(tokens):
        raise OrdinalParseError("missing exponent")
    kind, text = tokens[pos]
    if kind == "int":
        return pos + 1, Ordinal.of(int(text))
    if kind == "w":
        # a bare w in exponent position binds tightly: w^w^2 is w^(w^2)
        if pos + 1 < len(tokens) and tokens[pos + 1][0] == "^":
            npos, exp = _parse_atom(tokens, pos + 2)
            return npos, omega_power(exp)
        return pos + 1, OMEGA
    if kind == "(":
        npos, inner = _parse_sum(tokens, pos + 1)
        if npos >= len(tokens) or tokens[npos][0] != ")":
            raise OrdinalParseError("unbalanced parenthesis")
        return npos + 1, inner
    raise OrdinalParseError(f"bad exponent {text!r}")
