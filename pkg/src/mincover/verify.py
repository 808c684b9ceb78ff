"""Batch verification: named checks, seeded instance generators and a runner.

Every check has the form ``check(instance, rng, params) -> VerdictReport``.
The rng is private to one instance and derived from the run seed, the
check name and the instance index, so reports never depend on the
number of worker threads.
"""
from __future__ import annotations

import hashlib
import math
import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Callable, Iterator

from .bounds import verify_cover_weight_bound, verify_monotonicity, verify_split_chain, verify_subfamily_split
from .constructions import (
    DigraphConstruction,
    all_tournaments,
    build_digraph_family,
    example1_linear,
    example2_cyclic,
    tournament_from_bits,
    verify_shape_equivalence,
)
from .encoding import pair_design, verify_bounded_degree_bound, verify_cap_scaling, verify_encoding
from .family import SetFamily
from .io import read_digraph, read_family
from .kernels import (
    GapViolation,
    degrees,
    kernel_decompose,
    select_balanced_member,
    verify_bollobas_class,
    verify_class_cores,
    verify_kernel_dichotomy,
    verify_lym_weight,
    verify_moment_identity,
    verify_pair_gap,
    verify_weighted_uncovered,
    build_low_moment_subfamily,
)
from .report import VerdictReport, VerificationError
from .spread import monte_carlo_capture, verify_capture_moments, verify_spread
from .transversal import DEFAULT_NODE_BUDGET, enumerate_minimal_covers, tau, tau_criticalize

Params = dict[str, Any]


# ---------------------------------------------------------------- generators

def _family(sets, ground: int, uniformity: int | None = None) -> SetFamily:
    unique = list(dict.fromkeys(frozenset(s) for s in sets))
    return SetFamily(tuple(unique), ground, uniformity)


def random_family(rng: random.Random, max_ground: int = 12, max_sets: int = 6, max_size: int = 4) -> SetFamily:
    """Non-empty members of mixed sizes over a small ground set."""
    ground = rng.randint(1, max_ground)
    r = rng.randint(1, max_sets)
    sets = [rng.sample(range(ground), rng.randint(1, min(max_size, ground))) for _ in range(r)]
    return _family(sets, ground)


def random_uniform_family(
    rng: random.Random, n: int | None = None, max_sets: int = 6, max_ground: int = 12
) -> SetFamily:
    n = rng.randint(2, 5) if n is None else n
    ground = rng.randint(n, max(n, max_ground))
    r = rng.randint(1, max_sets)
    return _family((rng.sample(range(ground), n) for _ in range(r)), ground, n)


def random_intersecting_family(rng: random.Random, max_n: int = 5, max_sets: int = 5) -> SetFamily:
    """Grow an n-uniform intersecting family by rejection sampling."""
    n = rng.randint(1, max_n)
    ground = rng.randint(n, 2 * n + 2)
    target = rng.randint(1, max_sets)
    sets: list[frozenset[int]] = []
    for _ in range(50 * target):
        if len(sets) == target:
            break
        s = frozenset(rng.sample(range(ground), n))
        if s not in sets and all(s & t for t in sets):
            sets.append(s)
    return SetFamily(tuple(sets), ground, n)


def random_tournament(rng: random.Random, max_m: int = 3, max_block: int = 3) -> DigraphConstruction:
    m = rng.randint(1, max_m)
    bits = rng.randrange(1 << (m * (m - 1) // 2))
    D = tournament_from_bits(m, bits)
    d = D.outdegrees
    n = rng.randint(max(d) + 1, min(d) + max_block)
    return tournament_from_bits(m, bits, n)


def small_digraphs(max_m: int = 3, max_block: int = 3) -> Iterator[DigraphConstruction]:
    """Every tournament with at most ``max_m`` vertices and every n keeping blocks in [1, max_block]."""
    for m in range(1, max_m + 1):
        for D in all_tournaments(m):
            d = D.outdegrees
            for n in range(max(d) + 1, min(d) + max_block + 1):
                yield DigraphConstruction(D.m, D.arcs, n)


def random_kernel_instance(rng: random.Random, n: int = 10, k: int = 1) -> tuple[SetFamily, frozenset[int]]:
    """Members of size n each meeting a fixed (n-k)-set K in at least n-2k elements."""
    K = list(range(n - k))
    pool = list(range(n - k, n - k + 3 * k + 3))
    r = rng.randint(1, 6)
    sets = []
    for _ in range(r):
        drop = rng.randint(0, k)
        inside = rng.sample(K, n - k - drop)
        outside = rng.sample(pool, n - len(inside))
        sets.append(frozenset(inside) | frozenset(outside))
    return _family(sets, n - k + len(pool), n), frozenset(K)


def random_clustered_family(rng: random.Random, n: int = 10) -> SetFamily:
    """Classes of sets sharing n-1 elements with a common base, bases far apart."""
    clusters = rng.randint(1, 3)
    width = n + 4
    sets = []
    for c in range(clusters):
        base = list(range(c * width, c * width + n))
        spare = list(range(c * width + n, (c + 1) * width))
        size = rng.randint(1, 3)
        if rng.random() < 0.5:
            drop = rng.choice(base)
            for y in rng.sample(spare, min(size, len(spare))):
                sets.append((set(base) - {drop}) | {y})
        else:
            add = rng.choice(spare)
            for x in rng.sample(base, size):
                sets.append((set(base) - {x}) | {add})
    return _family(sets, clusters * width, n)


def random_rational(rng: random.Random, lo: int, hi: int, den: int = 4) -> Fraction:
    return Fraction(rng.randint(lo * den, hi * den), den)


def relabel(F: SetFamily, rng: random.Random) -> SetFamily:
    perm = list(range(F.ground))
    rng.shuffle(perm)
    sets = [frozenset(perm[x] for x in s) for s in F.sets]
    rng.shuffle(sets)
    return SetFamily(tuple(sets), F.ground, F.uniformity)


# ---------------------------------------------------------------- checks

def _subfamily_indices(F: SetFamily, rng: random.Random) -> list[int]:
    r = len(F)
    return sorted(rng.sample(range(r), rng.randint(1, r)))


def _check_st(F, rng, p):
    return verify_cover_weight_bound(F, budget=p["budget"], threads=p["threads"])


def _check_mon(F, rng, p):
    lam = random_rational(rng, 1, 6)
    mu = lam + random_rational(rng, 0, 4)
    return verify_monotonicity(F, lam, mu, budget=p["budget"], threads=p["threads"])


def _check_lm(F, rng, p):
    lam = 1 + random_rational(rng, 0, 6) + Fraction(1, 8)
    return verify_subfamily_split(F, _subfamily_indices(F, rng), lam, budget=p["budget"], threads=p["threads"])


def _check_crlm(F, rng, p):
    return verify_split_chain(F, _subfamily_indices(F, rng), budget=p["budget"], threads=p["threads"])


def lym_instance(F: SetFamily, cap: int | None = None, budget: int = DEFAULT_NODE_BUDGET):
    """The antichain C(F) with R its union, t its smallest size and lam = |R|."""
    covers = list(enumerate_minimal_covers(F, F.n if cap is None else cap, budget=budget))
    R = frozenset().union(*covers)
    t = min((len(c) for c in covers), default=0)
    return covers, R, t, len(R)


def _check_sp(F, rng, p):
    covers, R, t, lam = lym_instance(F, p.get("cap"), p["budget"])
    if not R:
        return VerdictReport("sp", F.fingerprint(), None, None, "vacuous", details={"covers": len(covers)})
    return verify_lym_weight(covers, R, t, lam)


def _check_ker(inst, rng, p):
    Kf, K = inst
    return verify_kernel_dichotomy(Kf, K, p["k"], budget=p["budget"])


def _check_kerup(F, rng, p):
    A = tau_criticalize(F, budget=p["budget"])
    k = rng.randint(0, 1)
    cls = [0]
    if 2 * k < A.n:
        dec = kernel_decompose(A, k)
        if not isinstance(dec, GapViolation):
            pick = list(rng.choice(dec.classes))
            if len(frozenset.intersection(*(A.sets[i] for i in pick))) >= A.n - k:
                cls = pick
    if len(cls) == 1:
        k = 0
    return verify_bollobas_class(A, cls, k, budget=p["budget"])


def _random_weights(F: SetFamily, rng: random.Random) -> list[Fraction]:
    w = [Fraction(rng.randint(0, 6), rng.randint(1, 4)) for _ in range(F.ground)]
    if not any(w):
        w[rng.randrange(F.ground)] = Fraction(1)
    return w


def _check_sa(F, rng, p):
    return verify_weighted_uncovered(F, _random_weights(F, rng), budget=p["budget"])


def _check_mu(F, rng, p):
    if tau(F, budget=p["budget"]) < 2:
        return VerdictReport("mu", F.fingerprint(), None, None, "vacuous", details={"tau": 1})
    l = rng.randint(1, 3)
    return select_balanced_member(F, [_random_weights(F, rng) for _ in range(l)], budget=p["budget"])[1]


def _check_dec(F, rng, p):
    t = tau(F, budget=p["budget"])
    l = p.get("l") or rng.randint(1, 3)
    m = max(1, math.ceil(math.log(len(F))))
    return build_low_moment_subfamily(F, t, l, m, budget=p["budget"])[1]


def _check_moment(F, rng, p):
    l = rng.randint(1, 3)
    while len(F) ** l > 10**6:
        l -= 1
    return verify_moment_identity(F, l)


def _check_encoding(F, rng, p):
    return verify_encoding(F, budget=p["budget"])


def _check_lbodeg(F, rng, p):
    l = p.get("l") or max(degrees(F)) + 1
    return verify_bounded_degree_bound(F, l, budget=p["budget"])


def _check_corbd(F, rng, p):
    lam = Fraction(rng.randint(1, 4), 4)
    k = rng.randint(0, 1)
    l = max(degrees(F)) + 1
    return verify_cap_scaling(F, k, lam, l, budget=p["budget"])


def _no_covers(F: SetFamily, name: str, p: Params) -> VerdictReport | None:
    t = tau(F, budget=p["budget"])
    if t <= F.n:
        return None
    return VerdictReport(name, F.fingerprint(), None, None, "vacuous", details={"tau": t, "cap": F.n})


def _check_spread(F, rng, p):
    R = p.get("R") or rng.choice([F.n, 2 * F.n])
    if (empty := _no_covers(F, "spread", p)) is not None:
        return empty
    return verify_spread(F, R, p.get("s_max", 2), budget=p["budget"])


def _check_cors(F, rng, p):
    delta = Fraction(rng.randint(1, 3), 4)
    m = rng.randint(1, 3)
    R = p.get("R") or rng.choice([F.n, 2 * F.n, 64 * F.n])
    if (empty := _no_covers(F, "cors", p)) is not None:
        return empty
    return monte_carlo_capture(
        F, delta, m, R, trials=p.get("trials", 10_000), seed=rng.getrandbits(63),
        s_max=p.get("s_max", 2), budget=p["budget"],
    )


def _check_capture(F, rng, p):
    delta = Fraction(rng.randint(1, 3), 4)
    m = rng.randint(1, 2)
    return verify_capture_moments(F, delta, m, trials=p.get("trials", 100_000), seed=rng.getrandbits(63))


def _check_pgap(inst, rng, p):
    if isinstance(inst, SetFamily):
        if len(inst) != 2:
            raise ValueError("pair gap check needs a two-member family")
        n, x = inst.n, len(inst.sets[0] & inst.sets[1])
        k = p.get("k") or rng.randint(1, max(1, n // 2))
    else:
        n, x, k = inst
    return verify_pair_gap(n, x, k)


def _check_pr2(F, rng, p):
    if 2 * Fraction(p["k"]) >= F.n:
        return VerdictReport("pr2", F.fingerprint(), None, None, "vacuous", details={"reason": "k >= n/2"})
    return verify_class_cores(F, p["k"], budget=p["budget"])


def _check_shape(D, rng, p):
    return verify_shape_equivalence(D, budget=p["budget"], threads=p["threads"])


# ---------------------------------------------------------------- registry

def _gen_uniform(rng, p):
    return random_uniform_family(rng, p.get("n"))


def _gen_uniform_tau2(rng, p):
    for _ in range(100):
        F = random_uniform_family(rng, p.get("n"))
        if tau(F) >= 2:
            return F
    return F


def _gen_mixed(rng, p):
    return random_family(rng)


def _gen_ker(rng, p):
    return random_kernel_instance(rng, p.get("n") or 10, p["k"])


def _gen_pair(rng, p):
    n = p.get("n") or rng.randint(4, 12)
    return n, rng.randint(0, n - 1), Fraction(rng.randint(1, max(1, n // 2)))


def _gen_design(rng, p):
    return relabel(pair_design(rng.choice([6, 7])), rng)


def _gen_intersecting(rng, p):
    return random_intersecting_family(rng)


def _gen_clustered(rng, p):
    return random_clustered_family(rng, p.get("n") or 10)


def _gen_digraph(rng, p):
    return random_tournament(rng, p.get("max_m", 3), p.get("max_block", 3))


@dataclass(frozen=True)
class Check:
    name: str
    run: Callable[[Any, random.Random, Params], VerdictReport]
    generate: Callable[[random.Random, Params], Any]
    kind: str = "family"
    defaults: Params = field(default_factory=dict)


CHECKS: dict[str, Check] = {
    c.name: c
    for c in [
        Check("mon", _check_mon, _gen_mixed),
        Check("lm", _check_lm, _gen_mixed),
        Check("crlm-chain", _check_crlm, _gen_uniform),
        Check("st", _check_st, _gen_uniform),
        Check("sp", _check_sp, _gen_mixed),
        Check("ker", _check_ker, _gen_ker, kind="kernel", defaults={"k": 1, "n": 10}),
        Check("kerup", _check_kerup, _gen_uniform),
        Check("sa", _check_sa, _gen_uniform),
        Check("mu", _check_mu, _gen_uniform_tau2),
        Check("dec", _check_dec, _gen_uniform),
        Check("moment-identity", _check_moment, _gen_uniform),
        Check("encoding", _check_encoding, _gen_intersecting),
        Check("lbodeg", _check_lbodeg, _gen_design),
        Check("corbd", _check_corbd, _gen_uniform),
        Check("spread", _check_spread, _gen_mixed),
        Check("cors", _check_cors, _gen_mixed),
        Check("capture-moments", _check_capture, _gen_mixed),
        Check("pgap", _check_pgap, _gen_pair, kind="pair"),
        Check("pr2", _check_pr2, _gen_clustered, defaults={"k": 1}),
        Check("shape-equivalence", _check_shape, _gen_digraph, kind="digraph"),
    ]
}

CONSTRUCTIONS = ("example1", "example2", "digraph", "k6-design")


def instance_seed(seed: int, name: str, index: int) -> int:
    digest = hashlib.sha256(f"{seed}:{name}:{index}".encode()).digest()
    return int.from_bytes(digest[:8], "big")


def _construction_instances(check: Check, kind: str, p: Params) -> list:
    if kind == "example1":
        digraphs = [example1_linear(p.get("n") or 4)]
    elif kind == "example2":
        digraphs = [example2_cyclic(p.get("t") or 2)]
    elif kind == "digraph":
        digraphs = list(small_digraphs(p.get("max_m", 3), p.get("max_block", 3)))
    elif kind == "k6-design":
        if check.kind == "digraph":
            raise ValueError("k6-design is a set family, not a digraph")
        return [pair_design(6)]
    else:
        raise ValueError(f"unknown construction {kind!r}; expected one of {CONSTRUCTIONS}")
    if check.kind == "digraph":
        return digraphs
    return [build_digraph_family(D) for D in digraphs]


def _file_instance(check: Check, path: str):
    if check.kind == "digraph":
        return read_digraph(Path(path))
    F = read_family(Path(path))
    if check.kind == "kernel":
        return F, frozenset(F.sets[0]) if len(F) else frozenset()
    return F


def resolve_instances(check: Check, source: str, count: int, seed: int, p: Params) -> list:
    scheme, _, arg = source.partition(":")
    if scheme == "random":
        base = int(arg) if arg else seed
        return [check.generate(random.Random(instance_seed(base, check.name + "/gen", i)), p) for i in range(count)]
    if scheme == "construction":
        return _construction_instances(check, arg, p)
    if scheme == "file":
        return [_file_instance(check, arg)]
    raise ValueError(f"unknown instance source {source!r}; use file:<path>, random:<seed> or construction:<kind>")


def _describe(instance) -> dict:
    if isinstance(instance, SetFamily):
        return {"family": [sorted(s) for s in instance.sets], "ground": instance.ground}
    if isinstance(instance, tuple) and instance and isinstance(instance[0], SetFamily):
        return {"family": [sorted(s) for s in instance[0].sets], "K": sorted(instance[1])}
    if isinstance(instance, DigraphConstruction):
        return {"m": instance.m, "n": instance.n, "arcs": sorted(instance.arcs)}
    return {"instance": list(instance)}


def run_check(check: Check, instance, index: int, seed: int, p: Params) -> VerdictReport:
    rng = random.Random(instance_seed(seed, check.name, index))
    try:
        rep = check.run(instance, rng, p)
    except VerificationError as exc:
        return VerdictReport(
            lemma=check.name, instance_hash=f"instance-{index}", lhs=None, rhs=None, verdict="fails",
            witness=_describe(instance) | {"error": str(exc)},
        )
    if rep.verdict == "fails" and not rep.witness:
        rep.witness = _describe(instance)
    return rep


def run_verification(
    name: str,
    source: str,
    count: int = 1,
    seed: int = 0,
    threads: int = 1,
    budget: int = DEFAULT_NODE_BUDGET,
    **params,
) -> list[VerdictReport]:
    """One report per instance, in instance order, whatever ``threads`` is."""
    if name not in CHECKS:
        raise KeyError(f"unknown check {name!r}; known: {', '.join(CHECKS)}")
    check = CHECKS[name]
    p = dict(check.defaults)
    p.update({k: v for k, v in params.items() if v is not None})
    p["budget"] = budget
    p["threads"] = 1
    instances = resolve_instances(check, source, count, seed, p)
    jobs = list(enumerate(instances))
    if threads > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(lambda job: run_check(check, job[1], job[0], seed, p), jobs))
    return [run_check(check, inst, i, seed, p) for i, inst in jobs]
