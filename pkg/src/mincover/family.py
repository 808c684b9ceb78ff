"""Set families over a dense integer ground set, and their weights.

Members are stored as ``frozenset[int]`` and mirrored as integer bitmasks,
which is what the transversal engine works on.
"""
from __future__ import annotations

import hashlib
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Hashable, Iterable, Sequence

log = logging.getLogger(__name__)

GROUND_CAP = 128

ElementSet = frozenset
ExactWeight = Fraction
Rational = int | Fraction | str


class FamilyError(ValueError):
    """A family violates one of its structural invariants."""


class UncoverableError(ValueError):
    """The family contains the empty set, so no cover exists."""


def to_fraction(value: Rational) -> Fraction:
    if isinstance(value, float):
        raise TypeError(f"exact rational expected, got float {value!r}")
    return Fraction(value)


def mask_of(elements: Iterable[int]) -> int:
    m = 0
    for x in elements:
        m |= 1 << x
    return m


def elements_of(mask: int) -> frozenset[int]:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return frozenset(out)


def iter_bits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def shortlex(s: frozenset[int]) -> tuple[int, tuple[int, ...]]:
    """Sort key: size first, then the sorted element tuple."""
    return len(s), tuple(sorted(s))


@dataclass(frozen=True)
class SetFamily:
    """An ordered family of distinct finite sets over ``range(ground)``.

    Duplicate members are dropped (first occurrence wins) with a logged
    warning. An empty member is only allowed when ``degenerate`` is set;
    covering operations reject such families.
    """

    sets: tuple[frozenset[int], ...]
    ground: int
    uniformity: int | None = None
    labels: tuple[Hashable, ...] | None = field(default=None, compare=False)
    degenerate: bool = False

    def __post_init__(self):
        seen: set[frozenset[int]] = set()
        kept = []
        for s in self.sets:
            s = frozenset(s)
            if s in seen:
                continue
            seen.add(s)
            kept.append(s)
        if len(kept) != len(self.sets):
            log.warning("dropped %d duplicate member(s)", len(self.sets) - len(kept))
        object.__setattr__(self, "sets", tuple(kept))

        if not 0 <= self.ground <= GROUND_CAP:
            raise FamilyError(f"ground size {self.ground} outside [0, {GROUND_CAP}]")
        for s in kept:
            bad = [x for x in s if not (isinstance(x, int) and 0 <= x < self.ground)]
            if bad:
                raise FamilyError(f"elements {sorted(bad)} outside ground set of size {self.ground}")
            if not s and not self.degenerate:
                raise FamilyError("empty member in a family not flagged degenerate")
        if self.uniformity is not None:
            off = [sorted(s) for s in kept if len(s) != self.uniformity]
            if off:
                raise FamilyError(f"member {off[0]} has size != declared uniformity {self.uniformity}")
        if self.labels is not None and len(self.labels) != self.ground:
            raise FamilyError("label map must name every ground element")

    @classmethod
    def of(
        cls,
        sets: Iterable[Iterable[int]],
        ground: int | None = None,
        uniformity: int | None = None,
        degenerate: bool = False,
    ) -> SetFamily:
        members = tuple(frozenset(s) for s in sets)
        if ground is None:
            ground = max((max(s) + 1 for s in members if s), default=0)
        if not degenerate and any(not s for s in members):
            degenerate = True
        return cls(members, ground, uniformity, degenerate=degenerate)

    @classmethod
    def from_labeled(cls, sets: Iterable[Iterable[Hashable]], uniformity: int | None = None) -> SetFamily:
        """Rename arbitrary hashable elements to dense ids in first-seen order."""
        ids: dict[Hashable, int] = {}
        members = []
        for s in sets:
            row = []
            for x in s:
                if x not in ids:
                    ids[x] = len(ids)
                row.append(ids[x])
            members.append(frozenset(row))
        return cls(
            tuple(members),
            len(ids),
            uniformity,
            labels=tuple(ids),
            degenerate=any(not s for s in members),
        )

    def __len__(self) -> int:
        return len(self.sets)

    def __iter__(self):
        return iter(self.sets)

    def __getitem__(self, i: int) -> frozenset[int]:
        return self.sets[i]

    @cached_property
    def masks(self) -> tuple[int, ...]:
        return tuple(mask_of(s) for s in self.sets)

    @cached_property
    def support(self) -> frozenset[int]:
        return frozenset().union(*self.sets)

    @property
    def n(self) -> int:
        """Declared uniformity, or the largest member size."""
        if self.uniformity is not None:
            return self.uniformity
        return max((len(s) for s in self.sets), default=0)

    def label(self, x: int) -> Hashable:
        return x if self.labels is None else self.labels[x]

    def replace_sets(self, sets: Iterable[frozenset[int]]) -> SetFamily:
        """Same ground set and uniformity, different members."""
        sets = tuple(sets)
        return SetFamily(
            sets,
            self.ground,
            self.uniformity,
            labels=self.labels,
            degenerate=any(not s for s in sets),
        )

    def subfamily(self, indices: Iterable[int]) -> SetFamily:
        return self.replace_sets(self.sets[i] for i in indices)

    def without(self, index: int) -> SetFamily:
        return self.replace_sets(s for i, s in enumerate(self.sets) if i != index)

    def require_coverable(self) -> None:
        if any(not s for s in self.sets):
            raise UncoverableError("family contains the empty set; it has no cover")

    def fingerprint(self) -> str:
        from .io import format_family

        return hashlib.sha256(format_family(self).encode()).hexdigest()[:16]


def as_family(G: SetFamily | Iterable[Iterable[int]]) -> SetFamily:
    if isinstance(G, SetFamily):
        return G
    return SetFamily.of(G)


def is_intersecting(F: SetFamily) -> bool:
    masks = as_family(F).masks
    return all(a & b for i, a in enumerate(masks) for b in masks[i + 1:])


def is_uniform(F: SetFamily, n: int) -> bool:
    return all(len(s) == n for s in as_family(F))


def weight(G: SetFamily | Iterable[Iterable[int]], lam: Rational) -> Fraction:
    """Exact ``sum(lam ** -|A|)`` over the distinct members of ``G``."""
    lam = to_fraction(lam)
    if lam <= 0:
        raise ValueError(f"weight parameter must be positive, got {lam}")
    members = G.sets if isinstance(G, SetFamily) else {frozenset(s) for s in G}
    return weight_of_sizes((len(s) for s in members), lam)


def weight_of_sizes(sizes: Iterable[int], lam: Fraction) -> Fraction:
    counts: dict[int, int] = {}
    for k in sizes:
        counts[k] = counts.get(k, 0) + 1
    return sum((Fraction(c) / lam**k for k, c in counts.items()), Fraction(0))


@dataclass(frozen=True)
class ApproxWeight:
    """Floating weight for irrational parameters, compared with slack."""

    value: float
    error_bound: float = 1e-12

    def __post_init__(self):
        if self.value < -self.error_bound:
            raise ValueError("approximate weight below its own error bound")

    def at_most(self, other: float | Fraction) -> bool:
        return self.value <= float(other) + self.error_bound

    def at_least(self, other: float | Fraction) -> bool:
        return self.value >= float(other) - self.error_bound


def approx_weight(G: SetFamily | Iterable[Iterable[int]], lam: float, error_bound: float = 1e-12) -> ApproxWeight:
    if lam <= 0:
        raise ValueError(f"weight parameter must be positive, got {lam}")
    members = G.sets if isinstance(G, SetFamily) else {frozenset(s) for s in G}
    return ApproxWeight(math.fsum(lam ** -len(s) for s in members), error_bound)


def restrict_avoiding(F: SetFamily, S: Iterable[int]) -> SetFamily:
    """The members of ``F`` disjoint from ``S``, in their original order."""
    S = frozenset(S)
    return F.replace_sets(A for A in F.sets if A.isdisjoint(S))


def pairwise_intersection_profile(F: SetFamily) -> list[int]:
    sets: Sequence[frozenset[int]] = F.sets
    return [len(sets[i] & sets[j]) for i in range(len(sets)) for j in range(i + 1, len(sets))]
