"""Covering number and minimal-cover enumeration on bitmask families.

The enumerator branches depth-first on the uncovered member with the
fewest still-allowed elements. Branch ``i`` adds the ``i``-th candidate and
forbids the earlier ones, so every subset is visited at most once. A
partial cover is abandoned as soon as one of its elements loses its last
private member (a member met by the partial cover only at that element),
since adding elements can never restore one.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .family import (
    FamilyError,
    Rational,
    SetFamily,
    elements_of,
    iter_bits,
    mask_of,
    shortlex,
    to_fraction,
    weight_of_sizes,
)

DEFAULT_NODE_BUDGET = 10**8


class BudgetExceeded(RuntimeError):
    """Search visited more branch nodes than allowed."""

    def __init__(self, budget: int, nodes: int, found: int):
        super().__init__(
            f"node budget {budget} exceeded after {nodes} nodes ({found} covers found so far)"
        )
        self.budget = budget
        self.nodes = nodes
        self.found = found


@dataclass(frozen=True)
class CoverFamily:
    """Minimal covers of a source family, in shortlex order."""

    covers: tuple[frozenset[int], ...]
    size_cap: int
    source_family_hash: str
    ground: int

    def __len__(self) -> int:
        return len(self.covers)

    def __iter__(self):
        return iter(self.covers)

    def as_family(self) -> SetFamily:
        return SetFamily(self.covers, self.ground, degenerate=any(not c for c in self.covers))

    def weight(self, lam: Rational) -> Fraction:
        lam = to_fraction(lam)
        if lam <= 0:
            raise ValueError(f"weight parameter must be positive, got {lam}")
        return weight_of_sizes((len(c) for c in self.covers), lam)


def _popcount(x: int) -> int:
    return bin(x).count("1")


def _keeps_private(masks: Sequence[int], partial: int) -> bool:
    """Every element of ``partial`` is the sole hit of some member."""
    private = 0
    for m in masks:
        hit = m & partial
        if hit and not hit & (hit - 1):
            private |= hit
    return private == partial


def _is_minimal(masks: Sequence[int], cover: int) -> bool:
    return all(m & cover for m in masks) and _keeps_private(masks, cover)


class _Search:
    """One depth-first run with its own node counter."""

    def __init__(self, masks: Sequence[int], cap: int, budget: int, minimal: bool):
        self.masks = masks
        self.cap = cap
        self.budget = budget
        self.minimal = minimal
        self.nodes = 0
        self.found: list[int] = []

    def _branch(self, partial: int, excluded: int):
        """Return (member to branch on, allowed candidates) or None if covered."""
        best = None
        best_count = None
        for m in self.masks:
            if m & partial:
                continue
            avail = m & ~excluded
            c = _popcount(avail)
            if best_count is None or c < best_count:
                best, best_count = avail, c
                if c == 0:
                    break
        return best

    def run(self, partial: int, size: int, excluded: int, stop_at_first: bool = False) -> bool:
        self.nodes += 1
        if self.nodes > self.budget:
            raise BudgetExceeded(self.budget, self.nodes, len(self.found))
        avail = self._branch(partial, excluded)
        if avail is None:
            if not self.minimal or _is_minimal(self.masks, partial):
                self.found.append(partial)
                return stop_at_first
            return False
        if size >= self.cap or not avail:
            return False
        for x in iter_bits(avail):
            bit = 1 << x
            nxt = partial | bit
            if not self.minimal or _keeps_private(self.masks, nxt):
                if self.run(nxt, size + 1, excluded, stop_at_first):
                    return True
            excluded |= bit
        return False


def _check(F: SetFamily) -> None:
    F.require_coverable()


def _resolve_cap(F: SetFamily, size_cap: int | None) -> int:
    if size_cap is not None:
        if size_cap < 0:
            raise ValueError("size cap must be non-negative")
        return size_cap
    if F.uniformity is not None:
        return F.uniformity
    raise FamilyError("size_cap is required for families without declared uniformity")


def minimal_cover_masks(
    masks: Sequence[int],
    cap: int,
    budget: int = DEFAULT_NODE_BUDGET,
    threads: int = 1,
) -> list[int]:
    """Minimal covers (as bitmasks) of size at most ``cap``, unordered.

    With ``threads > 1`` the top-level branches are searched concurrently.
    Each branch is deterministic on its own, so the union does not depend
    on the thread count; the budget applies to the summed node count.
    """
    masks = list(masks)
    top = _Search(masks, cap, budget, minimal=True)
    top.nodes = 1
    avail = top._branch(0, 0)
    if avail is None:
        return [0]
    if cap == 0 or not avail:
        return []
    branches = []
    excluded = 0
    for x in iter_bits(avail):
        branches.append((1 << x, excluded))
        excluded |= 1 << x

    def explore(job):
        bit, excl = job
        s = _Search(masks, cap, budget, minimal=True)
        s.run(bit, 1, excl)
        return s

    if threads > 1 and len(branches) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(explore, branches))
    else:
        results = []
        used = 1
        for job in branches:
            s = _Search(masks, cap, budget - used, minimal=True)
            try:
                s.run(job[0], 1, job[1])
            except BudgetExceeded as exc:
                found = sum(len(r.found) for r in results) + exc.found
                raise BudgetExceeded(budget, used + exc.nodes, found) from None
            used += s.nodes
            results.append(s)
    nodes = 1 + sum(r.nodes for r in results)
    found = [c for r in results for c in r.found]
    if nodes > budget:
        raise BudgetExceeded(budget, nodes, len(found))
    return found


def enumerate_minimal_covers(
    F: SetFamily,
    size_cap: int | None = None,
    *,
    budget: int = DEFAULT_NODE_BUDGET,
    threads: int = 1,
) -> CoverFamily:
    """All minimal covers of ``F`` with at most ``size_cap`` elements."""
    _check(F)
    cap = _resolve_cap(F, size_cap)
    found = minimal_cover_masks(F.masks, cap, budget, threads)
    covers = sorted({elements_of(c) for c in found}, key=shortlex)
    return CoverFamily(tuple(covers), cap, F.fingerprint(), F.ground)


def c_weight(
    F: SetFamily,
    lam: Rational,
    size_cap: int | None = None,
    *,
    budget: int = DEFAULT_NODE_BUDGET,
    threads: int = 1,
) -> Fraction:
    """Weight of the minimal-cover family: ``sum(lam ** -|C|)`` over C(F)."""
    lam = to_fraction(lam)
    if lam <= 0:
        raise ValueError(f"weight parameter must be positive, got {lam}")
    _check(F)
    cap = _resolve_cap(F, size_cap)
    found = minimal_cover_masks(F.masks, cap, budget, threads)
    return weight_of_sizes((_popcount(c) for c in found), lam)


def cover_weight_masks(masks: Sequence[int], lam: Fraction, cap: int, budget: int = DEFAULT_NODE_BUDGET) -> Fraction:
    if any(m == 0 for m in masks):
        raise FamilyError("empty member: no cover exists")
    return weight_of_sizes((_popcount(c) for c in minimal_cover_masks(masks, cap, budget)), lam)


def is_cover(C: Iterable[int], F: SetFamily) -> bool:
    c = mask_of(C)
    return all(m & c for m in F.masks)


def is_minimal_cover(C: Iterable[int], F: SetFamily) -> bool:
    return _is_minimal(F.masks, mask_of(C))


def find_cover_mask(
    masks: Sequence[int],
    size: int,
    forbidden: int = 0,
    budget: int = DEFAULT_NODE_BUDGET,
) -> int | None:
    """Some cover with at most ``size`` elements avoiding ``forbidden``, or None."""
    s = _Search(list(masks), size, budget, minimal=False)
    if s.run(0, 0, forbidden, stop_at_first=True):
        return s.found[-1]
    return None


def _greedy_cover(masks: Sequence[int]) -> int:
    cover = 0
    remaining = [m for m in masks]
    while remaining:
        degree: dict[int, int] = {}
        for m in remaining:
            for x in iter_bits(m):
                degree[x] = degree.get(x, 0) + 1
        x = min(degree, key=lambda e: (-degree[e], e))
        cover |= 1 << x
        remaining = [m for m in remaining if not m >> x & 1]
    return cover


def _packing_bound(masks: Sequence[int]) -> int:
    used = 0
    count = 0
    for m in sorted(masks, key=_popcount):
        if not m & used:
            used |= m
            count += 1
    return count


def minimize_cover(masks: Sequence[int], cover: int) -> int:
    """Drop elements (highest first) while the set still covers."""
    for x in sorted(iter_bits(cover), reverse=True):
        trial = cover & ~(1 << x)
        if all(m & trial for m in masks):
            cover = trial
    return cover


def tau_with_witness(F: SetFamily, *, budget: int = DEFAULT_NODE_BUDGET) -> tuple[int, frozenset[int]]:
    """Covering number of ``F`` together with one optimal minimal cover."""
    _check(F)
    t, c = tau_masks(F.masks, budget)
    return t, elements_of(c)


def tau_masks(masks: Sequence[int], budget: int = DEFAULT_NODE_BUDGET) -> tuple[int, int]:
    if not masks:
        return 0, 0
    if any(m == 0 for m in masks):
        raise FamilyError("empty member: no cover exists")
    best = minimize_cover(masks, _greedy_cover(masks))
    upper = _popcount(best)
    for k in range(_packing_bound(masks), upper):
        c = find_cover_mask(masks, k, budget=budget)
        if c is not None:
            return k, minimize_cover(masks, c)
    return upper, best


def tau(F: SetFamily, *, budget: int = DEFAULT_NODE_BUDGET) -> int:
    return tau_with_witness(F, budget=budget)[0]


def is_tau_critical(F: SetFamily, *, budget: int = DEFAULT_NODE_BUDGET) -> bool:
    """Every single-member deletion lowers the covering number."""
    _check(F)
    masks = F.masks
    t = tau_masks(masks, budget)[0]
    return all(
        tau_masks(masks[:i] + masks[i + 1:], budget)[0] < t for i in range(len(masks))
    )


def tau_criticalize(F: SetFamily, *, budget: int = DEFAULT_NODE_BUDGET) -> SetFamily:
    """Drop members in index order whenever that keeps the covering number.

    A member that cannot be dropped stays undroppable after later removals,
    so one pass yields the same result as restarting after each drop.
    """
    _check(F)
    masks = list(F.masks)
    t = tau_masks(masks, budget)[0]
    keep = list(range(len(masks)))
    for i in range(len(masks)):
        trial = [j for j in keep if j != i]
        if tau_masks([masks[j] for j in trial], budget)[0] == t:
            keep = trial
    return F.subfamily(keep)


def is_maximal_intersecting(F: SetFamily, *, budget: int = DEFAULT_NODE_BUDGET) -> bool:
    """Whether no further n-set can join the n-uniform intersecting family ``F``.

    An outside n-set using a fresh element meets the members through at most
    n-1 support elements, which would be a cover smaller than n. So once the
    covering number is n, only support n-sets matter, and those meeting every
    member are exactly the n-element covers, all of them minimal.
    """
    from .family import is_intersecting

    n = F.uniformity if F.uniformity is not None else F.n
    if any(len(s) != n for s in F.sets):
        raise FamilyError("maximality is defined for uniform families")
    if not is_intersecting(F):
        raise FamilyError("family is not intersecting")
    if tau_masks(F.masks, budget)[0] != n:
        return False
    members = set(F.masks)
    return all(c in members for c in minimal_cover_masks(F.masks, n, budget))
