"""Finite partition calculus on trees and posets.

Modules map one concern each: ``ordinal`` (Cantor normal form below
epsilon_0), ``tree`` (rooted trees, posets, the chain tree), ``ideal``
(diagonal unions and diagonal ideals), ``coloring`` (pair colorings),
``ramsey`` (arrow relations), ``goodsets`` (nested good chains),
``hierarchy`` (the I/J recursion) and ``cli``.
"""

from .coloring import PairColoring, c_chi, galvin_coloring, random_coloring, sierpinski_coloring
from .errors import ArborError
from .ideal import Family, diag_union, in_diag_ideal, ns_member, special_cover
from .ordinal import Ordinal, ord_add, ord_compare, parse_ordinal, pigeonhole_goal
from .ramsey import arrows_decide, max_homog_chain, pullback_transfer
from .tree import FinitePoset, FiniteTree, gen_tree, sigma_prime

__version__ = "0.1.0"

__all__ = [
    "ArborError",
    "Family",
    "FinitePoset",
    "FiniteTree",
    "Ordinal",
    "PairColoring",
    "arrows_decide",
    "c_chi",
    "diag_union",
    "galvin_coloring",
    "gen_tree",
    "in_diag_ideal",
    "max_homog_chain",
    "ns_member",
    "ord_add",
    "ord_compare",
    "parse_ordinal",
    "pigeonhole_goal",
    "pullback_transfer",
    "random_coloring",
    "sierpinski_coloring",
    "sigma_prime",
    "special_cover",
]
