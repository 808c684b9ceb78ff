"""Slow reference implementations used to cross-check the fast engine."""
from __future__ import annotations

import itertools
from fractions import Fraction

from .family import SetFamily, shortlex


def brute_minimal_covers(F: SetFamily, cap: int) -> list[frozenset[int]]:
    """Every subset of the ground set of size <= cap that is a minimal cover."""
    sets = F.sets
    out = []
    for size in range(min(cap, F.ground) + 1):
        for combo in itertools.combinations(range(F.ground), size):
            C = frozenset(combo)
            if not all(C & s for s in sets):
                continue
            if all(not all((C - {x}) & s for s in sets) for x in C):
                out.append(C)
    return sorted(out, key=shortlex)


def brute_tau(F: SetFamily) -> int:
    for size in range(F.ground + 1):
        for combo in itertools.combinations(range(F.ground), size):
            if all(s.intersection(combo) for s in F.sets):
                return size
    raise ValueError("family has no cover")


def brute_c_weight(F: SetFamily, lam: Fraction, cap: int) -> Fraction:
    return sum((Fraction(1) / lam ** len(C) for C in brute_minimal_covers(F, cap)), Fraction(0))


def brute_expected_intersection(F: SetFamily, l: int) -> Fraction:
    """Mean of ``|F_1 & ... & F_l|`` over all ordered l-tuples of members."""
    total = 0
    for tup in itertools.product(F.sets, repeat=l):
        total += len(frozenset.intersection(*tup))
    return Fraction(total, len(F) ** l)
