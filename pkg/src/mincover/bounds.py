"""Exact weight inequalities for minimal-cover families.

All cover families here use the size cap ``n``, the largest member size
(or the declared uniformity). For a sub-condition family ``F(C-bar)`` that
is empty, the only minimal cover is the empty set, so its weight is 1.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Iterable

from .family import Rational, SetFamily, restrict_avoiding, to_fraction
from .kernels import HypothesisError
from .report import VerdictReport
from .transversal import DEFAULT_NODE_BUDGET, c_weight, enumerate_minimal_covers, tau


def _family_witness(F: SetFamily, **extra) -> dict:
    return {"family": [sorted(s) for s in F.sets], "ground": F.ground} | extra


def verify_cover_weight_bound(F: SetFamily, *, budget: int = DEFAULT_NODE_BUDGET, threads: int = 1) -> VerdictReport:
    """``c_n(F) <= 1`` for an n-uniform family."""
    n = F.n
    c = c_weight(F, n, n, budget=budget, threads=threads)
    ok = c <= 1
    return VerdictReport(
        lemma="st",
        instance_hash=F.fingerprint(),
        lhs=c,
        rhs=1,
        verdict="holds" if ok else "fails",
        witness={} if ok else _family_witness(F),
        details={"n": n},
    )


def verify_monotonicity(
    F: SetFamily, lam: Rational, mu: Rational, *, budget: int = DEFAULT_NODE_BUDGET, threads: int = 1
) -> VerdictReport:
    """``c_mu(F) <= (lam/mu) ** tau(F) * c_lam(F)`` whenever ``lam <= mu``."""
    lam, mu = to_fraction(lam), to_fraction(mu)
    if not 0 < lam <= mu:
        raise HypothesisError(f"need 0 < lam <= mu (lam={lam}, mu={mu})")
    n = F.n
    t = tau(F, budget=budget)
    lhs = c_weight(F, mu, n, budget=budget, threads=threads)
    rhs = (lam / mu) ** t * c_weight(F, lam, n, budget=budget, threads=threads)
    ok = lhs <= rhs
    return VerdictReport(
        lemma="mon",
        instance_hash=F.fingerprint(),
        lhs=lhs,
        rhs=rhs,
        verdict="holds" if ok else "fails",
        witness={} if ok else _family_witness(F, lam=lam, mu=mu),
        details={"tau": t, "lam": lam, "mu": mu},
    )


def split_sum(
    F: SetFamily, sub: Iterable[int], lam: Fraction, *, budget: int = DEFAULT_NODE_BUDGET, threads: int = 1
) -> tuple[Fraction, list[tuple[frozenset[int], Fraction]]]:
    """``sum over C in C(F') of lam^-|C| c_lam(F(C-bar))`` with its per-cover terms."""
    n = F.n
    Fp = F.subfamily(sub)
    terms = []
    total = Fraction(0)
    for C in enumerate_minimal_covers(Fp, n, budget=budget, threads=threads):
        rest = restrict_avoiding(F, C)
        inner = c_weight(rest, lam, n, budget=budget, threads=threads)
        terms.append((C, inner))
        total += lam ** -len(C) * inner
    return total, terms


def verify_subfamily_split(
    F: SetFamily, sub: Iterable[int], lam: Rational, *, budget: int = DEFAULT_NODE_BUDGET, threads: int = 1
) -> VerdictReport:
    """``c_lam(F) <= sum_{C in C(F')} lam^-|C| c_lam(F(C-bar))`` for ``lam > 1``.

    Also checks the product form ``c_lam(F) <= c_lam(F') * max c_lam(F(C-bar))``.
    """
    lam = to_fraction(lam)
    if lam <= 1:
        raise HypothesisError(f"need lam > 1, got {lam}")
    sub = sorted(set(sub))
    n = F.n
    lhs = c_weight(F, lam, n, budget=budget, threads=threads)
    rhs, terms = split_sum(F, sub, lam, budget=budget, threads=threads)
    c_sub = sum((lam ** -len(C) for C, _ in terms), Fraction(0))
    worst = max((v for _, v in terms), default=Fraction(0))
    product_ok = lhs <= c_sub * worst
    ok = lhs <= rhs and product_ok
    return VerdictReport(
        lemma="lm",
        instance_hash=F.fingerprint(),
        lhs=lhs,
        rhs=rhs,
        verdict="holds" if ok else "fails",
        witness={} if ok else _family_witness(F, subfamily=sub, lam=lam),
        details={"subfamily": sub, "lam": lam, "product_bound": c_sub * worst, "product_ok": product_ok},
    )


def verify_split_chain(
    F: SetFamily, sub: Iterable[int], *, budget: int = DEFAULT_NODE_BUDGET, threads: int = 1
) -> VerdictReport:
    """The split inequality at ``lam = n`` plus the covering-number drop.

    For each minimal cover C of the subfamily, ``tau(F(C-bar)) >= tau(F) - |C|``
    is checked as well, since that is what turns the split sum into a bound
    in terms of ``c_{lam n}(F')``.
    """
    sub = sorted(set(sub))
    n = F.n
    lam = Fraction(n)
    lhs = c_weight(F, lam, n, budget=budget, threads=threads)
    rhs, terms = split_sum(F, sub, lam, budget=budget, threads=threads)
    t = tau(F, budget=budget)
    drop_bad = [sorted(C) for C, _ in terms if tau(restrict_avoiding(F, C), budget=budget) < t - len(C)]
    ok = lhs <= rhs and not drop_bad
    return VerdictReport(
        lemma="crlm-chain",
        instance_hash=F.fingerprint(),
        lhs=lhs,
        rhs=rhs,
        verdict="holds" if ok else "fails",
        witness={} if ok else _family_witness(F, subfamily=sub, tau_drop_violations=drop_bad),
        details={"subfamily": sub, "tau": t},
    )
