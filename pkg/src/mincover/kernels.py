"""Kernel decompositions, the antichain weight bound and degree moments."""
from __future__ import annotations

import itertools
import math
import time
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from typing import Iterable, Mapping, Sequence

from .family import Rational, SetFamily, mask_of, to_fraction
from .report import VerdictReport, VerificationError
from .transversal import (
    DEFAULT_NODE_BUDGET,
    c_weight,
    find_cover_mask,
    tau_masks,
)
from .family import elements_of


class HypothesisError(ValueError):
    """An input does not satisfy the precondition of the checked statement."""


class TransitivityError(VerificationError):
    def __init__(self, triple: tuple[int, int, int]):
        super().__init__(f"closeness relation not transitive on members {triple}")
        self.triple = triple


@dataclass(frozen=True)
class GapViolation:
    """Two members whose intersection size falls inside ``[k, n - k]``."""

    i: int
    j: int
    size: int


@dataclass(frozen=True)
class KernelDecomposition:
    classes: tuple[tuple[int, ...], ...]
    k: Fraction
    cores: tuple[frozenset[int], ...]


@dataclass(frozen=True)
class DegreeProfile:
    degrees: tuple[int, ...]
    moments: dict[int, int] = field(hash=False)


def _uniform_n(F: SetFamily) -> int:
    sizes = {len(s) for s in F.sets}
    if F.uniformity is not None:
        return F.uniformity
    if len(sizes) > 1:
        raise HypothesisError("family is not uniform")
    return sizes.pop() if sizes else 0


def kernel_decompose(F: SetFamily, k: Rational) -> KernelDecomposition | GapViolation:
    """Split a gap-free uniform family into classes of pairwise-close members.

    Members are related when they share at least n/2 elements. Without a
    pair in ``[k, n - k]`` the relation should be an equivalence; this is
    checked on every triple and a :class:`TransitivityError` names a
    counterexample otherwise.
    """
    k = to_fraction(k)
    n = _uniform_n(F)
    if not 2 * k < n:
        raise HypothesisError(f"need k < n/2, got k={k}, n={n}")
    masks = F.masks
    r = len(masks)
    inter = [[bin(masks[i] & masks[j]).count("1") for j in range(r)] for i in range(r)]
    for i in range(r):
        for j in range(i + 1, r):
            if k <= inter[i][j] <= n - k:
                return GapViolation(i, j, inter[i][j])

    parent = list(range(r))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for i in range(r):
        for j in range(i + 1, r):
            if 2 * inter[i][j] >= n:
                parent[find(i)] = find(j)
    groups: dict[int, list[int]] = {}
    for i in range(r):
        groups.setdefault(find(i), []).append(i)
    classes = sorted((tuple(g) for g in groups.values()), key=lambda g: g[0])
    for g in classes:
        for a, b, c in itertools.permutations(g, 3):
            if 2 * inter[a][b] >= n and 2 * inter[b][c] >= n and 2 * inter[a][c] < n:
                raise TransitivityError((a, b, c))
    cores = tuple(frozenset.intersection(*(F.sets[i] for i in g)) for g in classes)
    return KernelDecomposition(tuple(classes), k, cores)


def verify_kernel_core(Kf: SetFamily, k: Rational) -> VerdictReport:
    """Report the common intersection size of one class against n - 2k."""
    k = to_fraction(k)
    n = _uniform_n(Kf)
    core = frozenset.intersection(*Kf.sets) if len(Kf) else frozenset()
    ok = len(core) >= n - 2 * k
    return VerdictReport(
        lemma="pr2-core",
        instance_hash=Kf.fingerprint(),
        lhs=len(core),
        rhs=n - 2 * k,
        verdict="holds" if ok else "fails",
        witness={} if ok else {"family": [sorted(s) for s in Kf.sets], "core": sorted(core)},
        details={"core": sorted(core)},
    )


def verify_kernel_dichotomy(
    Kf: SetFamily, K: Iterable[int], k: Rational, *, budget: int = DEFAULT_NODE_BUDGET
) -> VerdictReport:
    """Either the (n-k)-weight of the minimal covers is at most 1 or the core has n-2k elements."""
    start = time.perf_counter()
    k = to_fraction(k)
    K = frozenset(K)
    n = _uniform_n(Kf)
    if not len(Kf):
        raise HypothesisError("family must be non-empty")
    if not 10 * k <= n:
        raise HypothesisError(f"k <= n/10 violated (k={k}, n={n})")
    if len(K) != n - k:
        raise HypothesisError(f"|K| = n - k violated (|K|={len(K)}, n-k={n - k})")
    for F in Kf.sets:
        if len(F & K) < n - 2 * k:
            raise HypothesisError(f"|F & K| >= n - 2k violated by member {sorted(F)}")
    c = c_weight(Kf, n - k, n, budget=budget)
    core = frozenset.intersection(*Kf.sets)
    first = c <= 1
    second = len(core) >= n - 2 * k
    ok = first or second
    return VerdictReport(
        lemma="ker",
        instance_hash=Kf.fingerprint(),
        lhs=c,
        rhs=1,
        verdict="holds" if ok else "fails",
        witness={} if ok else {"family": [sorted(s) for s in Kf.sets], "K": sorted(K), "k": k},
        details={
            "c_n_minus_k": c,
            "weight_at_most_one": first,
            "core_size": len(core),
            "core_bound": n - 2 * k,
            "core_large": second,
        },
        elapsed=time.perf_counter() - start,
    )


def pair_family(n: int, x: int) -> SetFamily:
    """Two n-sets sharing exactly ``x`` elements."""
    if not 0 <= x < n:
        raise ValueError("need 0 <= x < n for two distinct n-sets")
    A1 = frozenset(range(n))
    A2 = frozenset(range(x)) | frozenset(range(n, 2 * n - x))
    return SetFamily((A1, A2), 2 * n - x, n)


def pair_cover_weight(n: int, x: int, lam: Rational) -> Fraction:
    """Closed form: x shared singletons plus (n-x)^2 cross pairs."""
    lam = to_fraction(lam)
    return Fraction(x) / lam + Fraction((n - x) ** 2) / lam**2


def verify_pair_gap(n: int, x: int, k: Rational) -> VerdictReport:
    """Two-set cover weight at n - k/2: closed form versus enumeration, and at most 1 in the gap."""
    k = to_fraction(k)
    lam = n - k / 2
    F = pair_family(n, x)
    exact = c_weight(F, lam, n)
    closed = pair_cover_weight(n, x, lam)
    in_range = k <= x <= n - k and k <= Fraction(2, 5) * n
    ok = exact == closed and (not in_range or closed <= 1)
    return VerdictReport(
        lemma="pgap",
        instance_hash=F.fingerprint(),
        lhs=exact,
        rhs=closed if not in_range else Fraction(1),
        verdict="holds" if ok else "fails",
        witness={} if ok else {"n": n, "x": x, "k": k},
        details={"n": n, "x": x, "k": k, "closed_form": closed, "in_gap": in_range},
    )


def verify_class_cores(F: SetFamily, k: Rational, *, budget: int = DEFAULT_NODE_BUDGET) -> VerdictReport:
    """Every class has core at least n - 2k, or else its (n-k)-cover weight is at most 1.

    The second alternative is what the kernel dichotomy delivers for a class
    whose core is small, taking K inside any one member.
    """
    start = time.perf_counter()
    k = to_fraction(k)
    n = _uniform_n(F)
    dec = kernel_decompose(F, k)
    if isinstance(dec, GapViolation):
        return VerdictReport(
            lemma="pr2", instance_hash=F.fingerprint(), lhs=None, rhs=None, verdict="vacuous",
            details={"gap_violation": [dec.i, dec.j, dec.size]},
        )
    rows = []
    ok = True
    vacuous = False
    for cls, core in zip(dec.classes, dec.cores):
        row = {"class": list(cls), "core": len(core)}
        if len(core) < n - 2 * k:
            if 10 * k > n:
                vacuous = True
            else:
                c = c_weight(F.subfamily(cls), n - k, n, budget=budget)
                row["c_n_minus_k"] = c
                ok = ok and c <= 1
        rows.append(row)
    verdict = "holds" if ok else "fails"
    if ok and vacuous:
        verdict = "vacuous"
    return VerdictReport(
        lemma="pr2",
        instance_hash=F.fingerprint(),
        lhs=min(len(c) for c in dec.cores) if dec.cores else None,
        rhs=n - 2 * k,
        verdict=verdict,
        witness={} if ok else {"family": [sorted(s) for s in F.sets], "k": k},
        details={"classes": rows},
        elapsed=time.perf_counter() - start,
    )


def verify_lym_weight(C: Iterable[Iterable[int]], R: Iterable[int], t: int, lam: Rational) -> VerdictReport:
    """``sum(lam ** -|C|) <= lam ** -t * binom(|R|, t)`` for an antichain inside R."""
    covers = [frozenset(c) for c in C]
    R = frozenset(R)
    lam = to_fraction(lam)
    if lam < len(R) or lam <= 0:
        raise HypothesisError(f"need lam >= |R| and lam > 0 (lam={lam}, |R|={len(R)})")
    for c in covers:
        if not c <= R:
            raise HypothesisError(f"set {sorted(c)} is not inside R")
        if len(c) < t:
            raise HypothesisError(f"set {sorted(c)} is smaller than t={t}")
    masks = [mask_of(c) for c in covers]
    for a, b in itertools.permutations(range(len(masks)), 2):
        if masks[a] != masks[b] and masks[a] & masks[b] == masks[a]:
            raise HypothesisError(f"not an antichain: {sorted(covers[a])} inside {sorted(covers[b])}")
    lhs = sum((lam ** -len(c) for c in set(covers)), Fraction(0))
    rhs = lam**-t * comb(len(R), t)
    ok = lhs <= rhs
    return VerdictReport(
        lemma="sp",
        instance_hash=_sets_hash(covers),
        lhs=lhs,
        rhs=rhs,
        verdict="holds" if ok else "fails",
        witness={} if ok else {"antichain": [sorted(c) for c in covers], "R": sorted(R), "t": t, "lam": lam},
        details={"size": len(covers), "R": len(R), "t": t},
    )


def _sets_hash(sets) -> str:
    import hashlib

    text = ";".join(",".join(map(str, sorted(s))) for s in sorted(sets, key=lambda s: (len(s), sorted(s))))
    return hashlib.sha256(text.encode()).hexdigest()[:16]


def verify_bollobas_class(
    A: SetFamily, class_indices: Sequence[int], k: int, *, budget: int = DEFAULT_NODE_BUDGET
) -> VerdictReport:
    """Size bound ``binom(tau + k, k)`` for a class with a large common core.

    For each class member a witness cover of the rest of ``A`` avoiding that
    member is found and validated, and the resulting set-pair system is
    checked for the cross-intersection property.
    """
    start = time.perf_counter()
    n = _uniform_n(A)
    masks = A.masks
    t = tau_masks(masks, budget)[0]
    for i in range(len(masks)):
        if tau_masks(masks[:i] + masks[i + 1:], budget)[0] >= t:
            raise HypothesisError(f"family is not tau-critical: member {i} can be dropped")
    cls = list(class_indices)
    if not cls:
        raise HypothesisError("class must be non-empty")
    core = frozenset.intersection(*(A.sets[i] for i in cls))
    if len(core) < n - k:
        raise HypothesisError(f"class core has {len(core)} < n - k = {n - k} elements")
    core_mask = mask_of(core)
    witnesses = {}
    for i in cls:
        rest = masks[:i] + masks[i + 1:]
        c = find_cover_mask(rest, t, forbidden=masks[i], budget=budget)
        if c is None or c & masks[i] or not all(m & c for m in rest) or bin(c).count("1") > t:
            raise VerificationError(f"no valid witness cover for critical member {i}")
        witnesses[i] = c
    for i in cls:
        for j in cls:
            hit = (masks[j] & ~core_mask) & witnesses[i]
            if (i == j) == bool(hit):
                raise VerificationError(f"set-pair condition fails for members {i}, {j}")
    bound = comb(t + k, k)
    ok = len(cls) <= bound
    return VerdictReport(
        lemma="kerup",
        instance_hash=A.fingerprint(),
        lhs=len(cls),
        rhs=bound,
        verdict="holds" if ok else "fails",
        witness={} if ok else {"family": [sorted(s) for s in A.sets], "class": cls, "k": k},
        details={
            "tau": t,
            "core": sorted(core),
            "witness_covers": {str(i): sorted(elements_of(c)) for i, c in witnesses.items()},
        },
        elapsed=time.perf_counter() - start,
    )


def degrees(F: SetFamily) -> list[int]:
    d = [0] * F.ground
    for s in F.sets:
        for x in s:
            d[x] += 1
    return d


def degree_profile(F: SetFamily, L: int) -> DegreeProfile:
    if L < 1:
        raise ValueError("L must be at least 1")
    d = degrees(F)
    return DegreeProfile(tuple(d), {l: sum(v**l for v in d) for l in range(1, L + 1)})


def moment(d: Sequence[int], l: int) -> int:
    if l == 0:
        return sum(1 for v in d if v)
    return sum(v**l for v in d)


def expected_l_intersection(F: SetFamily, l: int, brute_limit: int = 10**6) -> Fraction:
    """Mean size of an l-fold intersection of independently drawn members.

    Computed from degree moments; when ``|F| ** l`` is at most
    ``brute_limit`` the value is re-derived over all tuples and any
    disagreement raises.
    """
    if not len(F):
        raise ValueError("family must be non-empty")
    r = len(F)
    value = Fraction(moment(degrees(F), l), r**l)
    if r**l <= brute_limit:
        masks = F.masks
        full = (1 << F.ground) - 1
        total = 0
        for combo in itertools.product(masks, repeat=l):
            acc = full
            for m in combo:
                acc &= m
            total += bin(acc).count("1")
        if Fraction(total, r**l) != value:
            raise VerificationError(f"moment identity fails for l={l}: {value} vs {Fraction(total, r ** l)}")
    return value


def verify_moment_identity(F: SetFamily, l: int) -> VerdictReport:
    r = len(F)
    masks = F.masks
    full = (1 << F.ground) - 1
    total = 0
    for combo in itertools.product(masks, repeat=l):
        acc = full
        for m in combo:
            acc &= m
        total += bin(acc).count("1")
    lhs = Fraction(moment(degrees(F), l), r**l)
    rhs = Fraction(total, r**l)
    ok = lhs == rhs
    return VerdictReport(
        lemma="moment-identity",
        instance_hash=F.fingerprint(),
        lhs=lhs,
        rhs=rhs,
        verdict="holds" if ok else "fails",
        witness={} if ok else {"family": [sorted(s) for s in F.sets], "l": l},
        details={"l": l, "members": r},
    )


def _weights(F: SetFamily, f: Mapping[int, Rational] | Sequence[Rational]) -> list[Fraction]:
    if isinstance(f, Mapping):
        w = [to_fraction(f.get(x, 0)) for x in range(F.ground)]
    else:
        if len(f) != F.ground:
            raise ValueError("weight vector must cover the whole ground set")
        w = [to_fraction(v) for v in f]
    if any(v < 0 for v in w):
        raise HypothesisError("weights must be non-negative")
    if not any(w):
        raise HypothesisError("weight function is identically zero")
    return w


def _set_weight(w: Sequence[Fraction], s: Iterable[int]) -> Fraction:
    return sum((w[x] for x in s), Fraction(0))


def verify_weighted_uncovered(
    F: SetFamily, f: Mapping[int, Rational] | Sequence[Rational], *, budget: int = DEFAULT_NODE_BUDGET
) -> VerdictReport:
    """Check ``sum((1 - f(A)/f(X)) ** (tau - 1)) >= 1`` and exhibit a light member."""
    w = _weights(F, f)
    t = tau_masks(F.masks, budget)[0]
    total = sum(w, Fraction(0))
    ident = F.fingerprint()
    if t < 2:
        return VerdictReport(
            lemma="sa", instance_hash=ident, lhs=len(F), rhs=1, verdict="vacuous",
            details={"tau": t},
        )
    slack = [1 - _set_weight(w, s) / total for s in F.sets]
    lhs = sum((p ** (t - 1) for p in slack), Fraction(0))
    best = max(range(len(F)), key=lambda i: (slack[i], -i))
    # f(A) <= f(X)(1 - |F|^(-1/(tau-1)))  <=>  |F| * p^(tau-1) >= 1 with p = 1 - f(A)/f(X)
    witness_ok = len(F) * slack[best] ** (t - 1) >= 1
    ok = lhs >= 1 and witness_ok
    return VerdictReport(
        lemma="sa",
        instance_hash=ident,
        lhs=lhs,
        rhs=1,
        verdict="holds" if ok else "fails",
        witness={} if ok else {"family": [sorted(s) for s in F.sets], "f": w},
        details={"tau": t, "light_member": best, "light_member_ok": witness_ok},
    )


def select_balanced_member(
    F: SetFamily, fs: Sequence[Mapping[int, Rational] | Sequence[Rational]], *, budget: int = DEFAULT_NODE_BUDGET
) -> tuple[int, VerdictReport]:
    """Member minimising ``sum_i f_i(A)/f_i(X)``, checked against the l-fold bound."""
    ws = [_weights(F, f) for f in fs]
    l = len(ws)
    if l == 0:
        raise HypothesisError("need at least one weight function")
    t = tau_masks(F.masks, budget)[0]
    if t < 2:
        raise HypothesisError(f"need tau >= 2, got {t}")
    totals = [sum(w, Fraction(0)) for w in ws]
    ratios = [[_set_weight(w, s) / tot for w, tot in zip(ws, totals)] for s in F.sets]
    scores = [sum(r, Fraction(0)) for r in ratios]
    best = min(range(len(F)), key=lambda i: (scores[i], i))
    r = len(F)
    checks = []
    for q in ratios[best]:
        # q <= l (1 - r^(-1/(t-1)))  <=>  (1 - q/l)^(t-1) >= 1/r  when 1 - q/l >= 0
        room = 1 - q / l
        checks.append(room >= 0 and r * room ** (t - 1) >= 1)
    vacuous = r * (1 - Fraction(1, l)) ** (t - 1) >= 1
    ok = all(checks)
    report = VerdictReport(
        lemma="mu",
        instance_hash=F.fingerprint(),
        lhs=max(ratios[best]),
        rhs=None,
        verdict=("vacuous" if vacuous else "holds") if ok else "fails",
        witness={} if ok else {"family": [sorted(s) for s in F.sets], "functions": ws},
        details={"member": best, "tau": t, "l": l, "bound_vacuous": vacuous},
    )
    return best, report


def step_functions(d: Sequence[int], l: int) -> list[list[int]]:
    """``f_i(x) = sum_{j=1}^{i-1} binom(i, j) d(x)^j`` for i = 1..l."""
    return [[sum(comb(i, j) * v**j for j in range(1, i)) for v in d] for i in range(1, l + 1)]


def build_low_moment_subfamily(
    A: SetFamily, t: int, l: int, m: Rational | float, *, budget: int = DEFAULT_NODE_BUDGET
) -> tuple[SetFamily, VerdictReport]:
    """Grow a subfamily greedily while keeping its degree moments small.

    Starting from the first member, each step adds the member of the
    remainder selected by :func:`select_balanced_member` on the step
    functions, for as long as the remainder has covering number at least
    ``t/2 + 1``. Every step re-checks the per-step moment increment bound
    and raises :class:`VerificationError` if it fails.
    """
    start = time.perf_counter()
    n = _uniform_n(A)
    r = len(A)
    if r == 0:
        raise HypothesisError("family must be non-empty")
    if tau_masks(A.masks, budget)[0] < t:
        raise HypothesisError(f"tau(A) >= t={t} violated")
    if math.log(r) > float(m) + 1e-12:
        raise HypothesisError(f"|A| <= e^m violated (|A|={r}, m={m})")
    coef = l * math.log(r) / (t / 2)
    chosen = [0]
    rest = list(range(1, r))
    steps = []
    while rest:
        rest_masks = [A.masks[i] for i in rest]
        t_rest = tau_masks(rest_masks, budget)[0]
        if 2 * t_rest < t + 2:
            break
        d = degrees(A.subfamily(chosen))
        fs = [f for f in step_functions(d, l) if any(f)]
        if fs:
            pos, _ = select_balanced_member(A.subfamily(rest), fs, budget=budget)
        else:
            pos = 0
        pick = rest.pop(pos)
        d_new = degrees(A.subfamily(chosen + [pick]))
        for i in range(1, l + 1):
            lhs = moment(d_new, i)
            rhs = moment(d, i) + coef * 2**i * moment(d, i - 1) + n
            if lhs > rhs * (1 + 1e-12) + 1e-9:
                raise VerificationError(
                    f"moment step bound fails at i={i}: {lhs} > {rhs} after adding member {pick}"
                )
        chosen.append(pick)
        steps.append(pick)
    sub = A.subfamily(sorted(chosen))
    t_rest = tau_masks([A.masks[i] for i in rest], budget)[0] if rest else 0
    mq = Fraction(m)
    gamma = 2 * l * mq / t
    d = degrees(sub)
    size = len(sub)
    eq_max = {}
    ratios = {}
    for i in range(1, l + 1):
        bound = 2 ** (i * i) * gamma ** (i - 1) * n * size**i + 2 ** (i * i) * n * size
        eq_max[i] = {"moment": moment(d, i), "bound": bound, "holds": moment(d, i) <= bound}
        scale = (mq / t) ** (i - 1) * n
        ratios[i] = float(Fraction(moment(d, i), size**i) / scale)
    terminated = 2 * t_rest < t + 2
    report = VerdictReport(
        lemma="dec",
        instance_hash=A.fingerprint(),
        lhs=t_rest,
        rhs=Fraction(t, 2),
        verdict="holds" if terminated else "fails",
        witness={} if terminated else {"family": [sorted(s) for s in A.sets], "t": t, "l": l},
        details={
            "selected": sorted(chosen),
            "order": [0] + steps,
            "tau_rest": t_rest,
            "tau_rest_at_most_half_t": 2 * t_rest <= t,
            "max_bounds": eq_max,
            "mean_intersection_ratio": ratios,
        },
        elapsed=time.perf_counter() - start,
    )
    return sub, report
