"""Tournament-based intersecting families and the block-deficiency search.

A tournament on ``m`` vertices with out-degrees ``d_i`` and a uniformity
``n > max d_i`` gives disjoint blocks ``K_i`` of size ``n - d_i``. Class
``i`` holds every set made of ``K_i`` plus one element from each block
``K_j`` with an arc ``i -> j``. The union of the classes is n-uniform and
intersecting.
"""
from __future__ import annotations

import hashlib
import itertools
import json
import random
import time
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from math import comb, prod
from typing import Callable, Iterator, Sequence

from .family import SetFamily, is_intersecting, shortlex
from .report import VerdictReport
from .transversal import (
    DEFAULT_NODE_BUDGET,
    BudgetExceeded,
    CoverFamily,
    enumerate_minimal_covers,
    is_minimal_cover,
    minimal_cover_masks,
    tau_masks,
)

GENERATORS = ("tournaments", "random-perturbation")


@dataclass(frozen=True)
class DigraphConstruction:
    """A tournament on vertices ``0..m-1`` plus the uniformity ``n``."""

    m: int
    arcs: frozenset[tuple[int, int]]
    n: int

    def __post_init__(self):
        object.__setattr__(self, "arcs", frozenset(self.arcs))
        if self.m < 1:
            raise ValueError("a construction needs at least one vertex")
        for i, j in self.arcs:
            if not (0 <= i < self.m and 0 <= j < self.m) or i == j:
                raise ValueError(f"bad arc ({i}, {j}) for {self.m} vertices")
            if (j, i) in self.arcs:
                raise ValueError(f"pair ({i}, {j}) oriented both ways")
        if len(self.arcs) != comb(self.m, 2):
            raise ValueError("arcs do not form a tournament: some pair has no arc")
        if self.n <= max(self.outdegrees):
            raise ValueError(f"n={self.n} must exceed the largest out-degree {max(self.outdegrees)}")

    @property
    def outdegrees(self) -> tuple[int, ...]:
        d = [0] * self.m
        for i, _ in self.arcs:
            d[i] += 1
        return tuple(d)

    @property
    def block_sizes(self) -> tuple[int, ...]:
        return tuple(self.n - d for d in self.outdegrees)

    @property
    def blocks(self) -> tuple[frozenset[int], ...]:
        out = []
        start = 0
        for size in self.block_sizes:
            out.append(frozenset(range(start, start + size)))
            start += size
        return tuple(out)

    @property
    def ground(self) -> int:
        return sum(self.block_sizes)

    def out_neighbours(self, i: int) -> list[int]:
        return sorted(j for a, j in self.arcs if a == i)

    def in_neighbours(self, j: int) -> list[int]:
        return sorted(i for i, b in self.arcs if b == j)


def tournament_from_bits(m: int, bits: int, n: int | None = None) -> DigraphConstruction:
    """Orient pair number ``p`` (lexicographic) forwards iff bit ``p`` is set."""
    arcs = []
    for p, (i, j) in enumerate(itertools.combinations(range(m), 2)):
        arcs.append((i, j) if bits >> p & 1 else (j, i))
    D_arcs = frozenset(arcs)
    if n is None:
        n = m
    return DigraphConstruction(m, D_arcs, n)


def all_tournaments(m: int, n: int | None = None) -> Iterator[DigraphConstruction]:
    for bits in range(1 << comb(m, 2)):
        yield tournament_from_bits(m, bits, n)


def example1_linear(n: int) -> DigraphConstruction:
    """Transitive tournament ``i -> j`` for ``i < j``."""
    if n < 2:
        raise ValueError("example 1 needs n >= 2")
    return DigraphConstruction(n, frozenset((i, j) for i in range(n) for j in range(i + 1, n)), n)


def example2_cyclic(t: int) -> DigraphConstruction:
    """Cyclic tournament on Z_{2t-1} plus one vertex beating all of it; n = 2t."""
    if t < 2:
        raise ValueError("example 2 needs t >= 2")
    q = 2 * t - 1
    arcs = {(i, (i + s) % q) for i in range(q) for s in range(1, t)}
    arcs |= {(q, i) for i in range(q)}
    return DigraphConstruction(q + 1, frozenset(arcs), 2 * t)


def digraph_classes(D: DigraphConstruction) -> list[list[frozenset[int]]]:
    blocks = D.blocks
    classes = []
    for i in range(D.m):
        outs = D.out_neighbours(i)
        choices = [sorted(blocks[j]) for j in outs]
        classes.append([blocks[i] | frozenset(pick) for pick in itertools.product(*choices)])
    return classes


def build_digraph_family(D: DigraphConstruction) -> SetFamily:
    members = [F for cls in digraph_classes(D) for F in cls]
    F = SetFamily(tuple(members), D.ground, D.n)
    assert len(F) == len(members), "digraph classes overlap"
    assert is_intersecting(F), "digraph family is not intersecting"
    return F


def class_sizes(D: DigraphConstruction) -> list[int]:
    return [prod(D.block_sizes[j] for j in D.out_neighbours(i)) for i in range(D.m)]


def cover_shapes(D: DigraphConstruction) -> Iterator[tuple[frozenset[int], frozenset[int]]]:
    """Pairs (A, B) with A, B disjoint and A + B + N_in(B) = all vertices.

    Vertices with a single-element block never go into A: containing that
    element is recorded as the whole block, i.e. as membership of B.
    """
    sizes = D.block_sizes
    roles_per_vertex = [(0, 2) if sizes[i] == 1 else (0, 1, 2) for i in range(D.m)]
    everything = frozenset(range(D.m))
    for roles in itertools.product(*roles_per_vertex):
        A = frozenset(i for i, r in enumerate(roles) if r == 1)
        B = frozenset(i for i, r in enumerate(roles) if r == 2)
        n_in = frozenset(i for i, j in D.arcs if j in B)
        if A | B | n_in == everything:
            yield A, B


def covers_by_shape(D: DigraphConstruction, size_cap: int | None = None) -> CoverFamily:
    """Minimal covers of the digraph family, generated from cover shapes."""
    F = build_digraph_family(D)
    cap = D.n if size_cap is None else size_cap
    blocks = D.blocks
    found = set()
    for A, B in cover_shapes(D):
        base = frozenset().union(*(blocks[j] for j in B))
        if len(base) + len(A) > cap:
            continue
        for pick in itertools.product(*(sorted(blocks[i]) for i in sorted(A))):
            C = base | frozenset(pick)
            if is_minimal_cover(C, F):
                found.add(C)
    return CoverFamily(tuple(sorted(found, key=shortlex)), cap, F.fingerprint(), F.ground)


def block_traces_ok(D: DigraphConstruction, covers) -> list[frozenset[int]]:
    """Covers whose trace on some block is not 0, 1 or the whole block."""
    bad = []
    for C in covers:
        for K in D.blocks:
            if len(C & K) not in (0, 1, len(K)):
                bad.append(C)
                break
    return bad


def verify_shape_equivalence(D: DigraphConstruction, *, budget: int = DEFAULT_NODE_BUDGET, threads: int = 1) -> VerdictReport:
    F = build_digraph_family(D)
    start = time.perf_counter()
    by_shape = covers_by_shape(D)
    engine = enumerate_minimal_covers(F, D.n, budget=budget, threads=threads)
    full = enumerate_minimal_covers(F, F.ground, budget=budget, threads=threads)
    bad_trace = block_traces_ok(D, full.covers)
    mismatch = set(by_shape.covers) ^ set(engine.covers)
    ok = not mismatch and not bad_trace
    witness = {}
    if mismatch:
        witness["mismatch"] = [sorted(c) for c in sorted(mismatch, key=shortlex)]
    if bad_trace:
        witness["bad_trace"] = [sorted(c) for c in bad_trace]
    if not ok:
        witness["digraph"] = digraph_payload(D)
    return VerdictReport(
        lemma="shape-equivalence",
        instance_hash=digraph_hash(D),
        lhs=len(by_shape),
        rhs=len(engine),
        verdict="holds" if ok else "fails",
        witness=witness,
        details={"m": D.m, "n": D.n, "block_sizes": list(D.block_sizes), "minimal_covers_any_size": len(full)},
        elapsed=time.perf_counter() - start,
    )


def digraph_payload(D: DigraphConstruction) -> dict:
    return {"m": D.m, "n": D.n, "arcs": [[i + 1, j + 1] for i, j in sorted(D.arcs)]}


def digraph_hash(D: DigraphConstruction) -> str:
    return hashlib.sha256(json.dumps(digraph_payload(D), sort_keys=True).encode()).hexdigest()[:16]


@dataclass(frozen=True)
class ConjectureInstance:
    """Disjoint blocks ``K_i`` of size ``n - a_i`` and n-set classes around them."""

    n: int
    blocks: tuple[frozenset[int], ...]
    classes: tuple[tuple[frozenset[int], ...], ...]

    def __post_init__(self):
        if len(self.blocks) != len(self.classes):
            raise ValueError("one class per block required")
        seen: set[int] = set()
        for K in self.blocks:
            if K & seen:
                raise ValueError("blocks are not disjoint")
            seen |= K
            if len(K) > self.n or not K:
                raise ValueError(f"block size {len(K)} outside [1, n={self.n}]")
        for K, cls in zip(self.blocks, self.classes):
            for F in cls:
                if len(F) != self.n:
                    raise ValueError(f"member {sorted(F)} is not an n-set")
                if not K <= F:
                    raise ValueError(f"member {sorted(F)} misses its block {sorted(K)}")

    @property
    def a(self) -> tuple[int, ...]:
        return tuple(self.n - len(K) for K in self.blocks)

    @property
    def ground(self) -> int:
        used = frozenset().union(*self.blocks, *(F for cls in self.classes for F in cls))
        return max(used) + 1 if used else 0

    def family(self) -> SetFamily:
        members = [F for cls in self.classes for F in cls]
        return SetFamily(tuple(members), self.ground, self.n)

    def payload(self) -> dict:
        return {
            "n": self.n,
            "blocks": [sorted(K) for K in self.blocks],
            "classes": [sorted(sorted(F) for F in cls) for cls in self.classes],
        }

    def instance_hash(self) -> str:
        return hashlib.sha256(json.dumps(self.payload(), sort_keys=True).encode()).hexdigest()[:16]

    @classmethod
    def from_digraph(cls, D: DigraphConstruction) -> ConjectureInstance:
        return cls(D.n, D.blocks, tuple(tuple(c) for c in digraph_classes(D)))


def lower_bound_weight(D: DigraphConstruction | ConjectureInstance) -> Fraction:
    """Weight at ``n`` of the block transversals: prod((n - a_i) / n)."""
    blocks = D.blocks
    return prod((Fraction(len(K), D.n) for K in blocks), start=Fraction(1))


def verify_lower_bound(D: DigraphConstruction | ConjectureInstance, *, budget: int = DEFAULT_NODE_BUDGET) -> VerdictReport:
    """Compare the transversal weight against the exact cover weight.

    The bound is guaranteed when there are n blocks and the covering number
    is n (then every transversal is a minimal cover); otherwise the verdict
    is ``inconclusive`` but both values are still reported.
    """
    start = time.perf_counter()
    if isinstance(D, DigraphConstruction):
        F = build_digraph_family(D)
        ident = digraph_hash(D)
    else:
        F = D.family()
        ident = D.instance_hash()
    bound = lower_bound_weight(D)
    t = tau_masks(F.masks, budget)[0]
    exact = sum((Fraction(1, D.n ** bin(c).count("1")) for c in minimal_cover_masks(F.masks, D.n, budget)), Fraction(0))
    if len(D.blocks) == D.n and t == D.n:
        verdict = "holds" if bound <= exact else "fails"
    else:
        verdict = "inconclusive"
    return VerdictReport(
        lemma="lower-bound",
        instance_hash=ident,
        lhs=bound,
        rhs=exact,
        verdict=verdict,
        details={"tau": t, "blocks": len(D.blocks), "n": D.n},
        elapsed=time.perf_counter() - start,
    )


@dataclass(frozen=True)
class SearchRecord:
    n: int
    a: tuple[int, ...]
    sum_a: int
    tau: int | None
    intersecting: bool
    generator: str
    seed: int
    timestamp: float
    instance_hash: str
    status: str = "applicable"
    binom_n2: int = field(default=0)

    def __post_init__(self):
        if self.sum_a != sum(self.a):
            raise ValueError("sum_a must equal the sum of the a-vector")
        object.__setattr__(self, "binom_n2", comb(self.n, 2))

    @property
    def applicable(self) -> bool:
        return self.status == "applicable"

    @property
    def counterexample(self) -> bool:
        return self.applicable and self.sum_a < self.binom_n2

    def to_json(self) -> str:
        d = asdict(self)
        d["a"] = list(self.a)
        return json.dumps(d, sort_keys=True, ensure_ascii=False)

    @classmethod
    def from_dict(cls, d: dict) -> SearchRecord:
        d = dict(d)
        d["a"] = tuple(d["a"])
        d.pop("binom_n2", None)
        return cls(**d)

    def stream_key(self) -> tuple:
        """Everything except the wall-clock timestamp."""
        d = asdict(self)
        d.pop("timestamp")
        return tuple(sorted((k, tuple(v) if isinstance(v, list) else v) for k, v in d.items()))


def evaluate_conjecture_instance(
    I: ConjectureInstance,
    generator: str = "manual",
    seed: int = 0,
    *,
    budget: int = DEFAULT_NODE_BUDGET,
    clock: Callable[[], float] = time.time,
) -> SearchRecord:
    F = I.family()
    inter = is_intersecting(F)
    try:
        t = tau_masks(F.masks, budget)[0]
    except BudgetExceeded:
        t = None
    if t is None:
        status = "inconclusive"
    elif inter and t == I.n:
        status = "applicable"
    else:
        status = "inapplicable"
    return SearchRecord(
        n=I.n,
        a=I.a,
        sum_a=sum(I.a),
        tau=t,
        intersecting=inter,
        generator=generator,
        seed=seed,
        timestamp=clock(),
        instance_hash=I.instance_hash(),
        status=status,
    )


def perturb_instance(I: ConjectureInstance, rng: random.Random, steps: int = 3) -> ConjectureInstance:
    """Randomly swap elements of members or add members, keeping a fixed.

    Only elements outside a member's own block are touched, so every member
    keeps containing its block and the a-vector never changes.
    """
    ground = range(I.ground)
    classes = [list(cls) for cls in I.classes]
    for _ in range(steps):
        i = rng.randrange(len(classes))
        K = I.blocks[i]
        outside = [x for x in ground if x not in K]
        free = I.n - len(K)
        if free == 0:
            continue
        if rng.random() < 0.5 and classes[i]:
            j = rng.randrange(len(classes[i]))
            F = classes[i][j]
            old = rng.choice(sorted(F - K))
            candidates = [x for x in outside if x not in F]
            if not candidates:
                continue
            new = (F - {old}) | {rng.choice(candidates)}
            if new not in classes[i]:
                classes[i][j] = new
        else:
            new = K | frozenset(rng.sample(outside, free))
            if new not in classes[i]:
                classes[i].append(new)
    return ConjectureInstance(I.n, I.blocks, tuple(tuple(c) for c in classes))


def _instance_seed(seed: int, index: int) -> int:
    digest = hashlib.sha256(f"{seed}:{index}".encode()).digest()
    return int.from_bytes(digest[:8], "big")


def search_conjecture(
    n: int,
    generator: str = "tournaments",
    budget: int = 1000,
    seed: int = 0,
    *,
    ledger=None,
    node_budget: int = DEFAULT_NODE_BUDGET,
    clock: Callable[[], float] = time.time,
) -> Iterator[SearchRecord]:
    """Stream records for up to ``budget`` instances, appending each to ``ledger``.

    ``tournaments`` walks every tournament on n vertices in bit order when the
    budget allows, otherwise a seeded sample of distinct ones.
    """
    if generator not in GENERATORS:
        raise ValueError(f"unknown generator {generator!r}; expected one of {GENERATORS}")
    if n < 1:
        raise ValueError("n must be positive")
    total = 1 << comb(n, 2)
    rng = random.Random(seed)
    if generator == "tournaments":
        if budget >= total:
            codes: Sequence[int] = range(total)
        else:
            codes = sorted(rng.sample(range(total), budget))
        for k, bits in enumerate(codes):
            I = ConjectureInstance.from_digraph(tournament_from_bits(n, bits))
            rec = evaluate_conjecture_instance(I, generator, seed, budget=node_budget, clock=clock)
            if ledger is not None:
                ledger.append(rec)
            yield rec
    else:
        for k in range(budget):
            sub = random.Random(_instance_seed(seed, k))
            base = ConjectureInstance.from_digraph(tournament_from_bits(n, sub.randrange(total)))
            I = perturb_instance(base, sub, steps=sub.randint(1, 4))
            rec = evaluate_conjecture_instance(I, generator, seed, budget=node_budget, clock=clock)
            if ledger is not None:
                ledger.append(rec)
            yield rec


def summarize_search(records: Sequence[SearchRecord]) -> dict:
    applicable = [r for r in records if r.applicable]
    min_sum = min((r.sum_a for r in applicable), default=None)
    n = records[0].n if records else None
    return {
        "n": n,
        "instances": len(records),
        "applicable": len(applicable),
        "inconclusive": sum(r.status == "inconclusive" for r in records),
        "min_sum_a": min_sum,
        "binom_n2": comb(n, 2) if n is not None else None,
        "counterexamples": [r.instance_hash for r in applicable if r.counterexample],
    }
