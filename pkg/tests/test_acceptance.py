"""End-to-end acceptance checks.

Each test covers one numbered criterion; a summary line per criterion is
printed at the end of the run. Workloads are cached per thread count so the
determinism check can compare single- and multi-threaded runs without
repeating the single-threaded work.
"""
import functools
import math
import random
import time
from fractions import Fraction

import pytest

from mincover.constructions import (
    block_traces_ok,
    build_digraph_family,
    covers_by_shape,
    example1_linear,
    example2_cyclic,
    search_conjecture,
    summarize_search,
)
from mincover.encoding import pair_design, run_encoding, simple_chain_product, verify_bounded_degree_bound
from mincover.family import is_intersecting, is_uniform, restrict_avoiding
from mincover.kernels import expected_l_intersection, verify_lym_weight
from mincover.ledger import SearchLedger
from mincover.oracle import brute_c_weight, brute_expected_intersection, brute_minimal_covers, brute_tau
from mincover.spread import spread_witness, verify_capture_moments
from mincover.transversal import enumerate_minimal_covers
from mincover.verify import instance_seed, random_family, random_uniform_family, run_verification, small_digraphs

SEED = 20240601

pytestmark = pytest.mark.slow


def _rng(name: str, index: int) -> random.Random:
    return random.Random(instance_seed(SEED, name, index))


@functools.cache
def oracle_instances():
    out = []
    for i in range(500):
        rng = _rng("oracle", i)
        F = random_family(rng, max_ground=12, max_sets=6, max_size=4)
        out.append((F, rng.randint(1, min(F.ground, 6))))
    return tuple(out)


@functools.cache
def c1(threads):
    start = time.perf_counter()
    results = [enumerate_minimal_covers(F, cap, threads=threads).covers for F, cap in oracle_instances()]
    return tuple(results), time.perf_counter() - start


@functools.cache
def c1_brute():
    return tuple(tuple(brute_minimal_covers(F, cap)) for F, cap in oracle_instances())


def _verdicts(reports):
    """(verdict, full report key) per report."""
    return tuple((r.verdict, r.key()) for r in reports)


@functools.cache
def c2(threads):
    return _verdicts(run_verification("st", f"random:{SEED}", count=1000, seed=SEED, threads=threads))


@functools.cache
def c3(threads):
    return {
        name: _verdicts(run_verification(name, f"random:{SEED}", count=200, seed=SEED, threads=threads))
        for name in ("lm", "crlm-chain", "mon")
    }


@functools.cache
def c5(threads):
    out = []
    for D in small_digraphs(3, 3):
        F = build_digraph_family(D)
        engine = enumerate_minimal_covers(F, F.ground, threads=threads).covers
        out.append((D, covers_by_shape(D).covers, engine, tuple(block_traces_ok(D, engine))))
    return tuple(out)


@functools.cache
def c6(threads):
    reports = []
    for covers in c1(threads)[0]:
        R = frozenset().union(*covers)
        if R:
            reports.append(verify_lym_weight(covers, R, min(map(len, covers)), len(R)))
    return _verdicts(reports)


@functools.cache
def c7(threads):
    start = time.perf_counter()
    reports = run_verification("ker", f"random:{SEED}", count=100, seed=SEED, threads=threads, n=10, k=1)
    return _verdicts(reports), time.perf_counter() - start


@functools.cache
def c8(threads):
    return _verdicts(run_verification("encoding", f"random:{SEED}", count=100, seed=SEED, threads=threads))


@functools.cache
def c9_spread(threads):
    """(instance index, R, witness, avoiding weight, scaled full weight) for every witness found."""
    out = []
    for i, (F, _) in enumerate(oracle_instances()):
        n = F.n
        if brute_tau(F) > n:
            continue
        for R in (n, 2 * n):
            rep = spread_witness(F, R, n)
            if rep.witness is not None:
                S = rep.witness
                rest = brute_c_weight(restrict_avoiding(F, S), n, n)
                scaled = brute_c_weight(F, n, n) * (Fraction(n) / R) ** len(S)
                out.append((i, R, S, rest, scaled))
    return tuple(out)


@functools.cache
def c9_moments(threads):
    reports = []
    for i in range(20):
        rng = _rng("capture", i)
        F = random_family(rng, max_ground=12, max_sets=6, max_size=4)
        delta = Fraction(rng.randint(1, 3), 4)
        m = rng.randint(1, 2)
        reports.append(verify_capture_moments(F, delta, m, trials=100_000, seed=rng.getrandbits(63), threads=threads))
    return tuple(reports)


@functools.cache
def c10(threads):
    moments = []
    for i in range(200):
        rng = _rng("moment", i)
        F = random_uniform_family(rng)
        l = rng.randint(1, 3)
        while len(F) ** l > 10**6:
            l -= 1
        moments.append((expected_l_intersection(F, l), brute_expected_intersection(F, l)))
    sa = run_verification("sa", f"random:{SEED}", count=200, seed=SEED, threads=threads)
    return tuple(moments), _verdicts(sa)


@functools.cache
def c11(threads, ledger_dir):
    path = ledger_dir / f"ledger-{threads}.jsonl"
    ledger = SearchLedger(path)
    records = list(search_conjecture(3, "tournaments", budget=1000, seed=SEED, ledger=ledger))
    first = [r.stream_key() for r in search_conjecture(4, "random-perturbation", budget=20, seed=SEED)]
    second = [r.stream_key() for r in search_conjecture(4, "random-perturbation", budget=20, seed=SEED)]
    return path, tuple(records), first, second


@pytest.fixture(scope="module")
def ledger_dir(tmp_path_factory):
    return tmp_path_factory.mktemp("ledgers")


@pytest.mark.criterion(1, "enumeration equals brute force on 500 random families in under 60 s")
def test_oracle_equivalence():
    covers, elapsed = c1(1)
    mismatches = [i for i, (a, b) in enumerate(zip(covers, c1_brute())) if a != b]
    assert not mismatches, f"mismatched instances {mismatches[:10]}"
    assert elapsed < 60, f"enumeration took {elapsed:.1f}s"


@pytest.mark.criterion(2, "c_n <= 1 on 1000 random n-uniform families, n in 2..5")
def test_cover_weight_at_most_one():
    verdicts = c2(1)
    assert len(verdicts) == 1000
    assert all(v[0] == "holds" for v in verdicts)


@pytest.mark.criterion(3, "split, split-chain and monotonicity inequalities on 200 instances each")
def test_weight_inequalities():
    for name, verdicts in c3(1).items():
        assert len(verdicts) == 200
        assert all(v[0] == "holds" for v in verdicts), name


@pytest.mark.criterion(4, "example constructions: sizes, uniformity, intersecting, covering number 4")
def test_construction_fidelity():
    start = time.perf_counter()
    F = build_digraph_family(example1_linear(4))
    assert len(F) == 41 == math.floor((math.e - 1) * math.factorial(4))
    assert is_uniform(F, 4) and is_intersecting(F)
    assert brute_tau(F) == 4
    assert time.perf_counter() - start < 10

    start = time.perf_counter()
    G = build_digraph_family(example2_cyclic(2))
    assert is_uniform(G, 4) and is_intersecting(G)
    assert len(G.support) == 10
    assert brute_tau(G) == 4
    assert time.perf_counter() - start < 10


@pytest.mark.criterion(5, "shape-generated covers equal brute force with 0/1/whole block traces")
def test_shape_characterization():
    rows = c5(1)
    assert len(rows) == 19
    for D, by_shape, engine, bad in rows:
        F = build_digraph_family(D)
        assert list(by_shape) == brute_minimal_covers(F, D.n), D
        assert list(engine) == brute_minimal_covers(F, F.ground), D
        assert not bad, D


@pytest.mark.criterion(6, "LYM weight bound on every antichain from criterion 1")
def test_lym_on_oracle_antichains():
    verdicts = c6(1)
    assert len(verdicts) > 400
    assert all(v[0] == "holds" for v in verdicts)


@pytest.mark.criterion(7, "kernel dichotomy on 100 instances at n=10, k=1 in under 5 min")
def test_kernel_dichotomy():
    verdicts, elapsed = c7(1)
    assert len(verdicts) == 100
    assert all(v[0] == "holds" for v in verdicts)
    assert elapsed < 300


@pytest.mark.criterion(8, "encoding weights on 100 intersecting families and the K6 pair design")
def test_encoding():
    verdicts = c8(1)
    assert len(verdicts) == 100 and all(v[0] == "holds" for v in verdicts)

    B = pair_design(6)
    assert (len(B), B.n) == (6, 5)
    run = run_encoding(B)
    assert run.weight_all <= 1
    assert run.c_n <= (run.weight_simple + 1) / 2
    assert float(run.c_n) <= math.exp(-36 / 1350) + 1e-12
    assert simple_chain_product(6, 3, 5) == 1
    assert run.weight_simple <= 1
    assert verify_bounded_degree_bound(B, 3).verdict == "holds"


@pytest.mark.criterion(9, "spread witnesses satisfy the avoiding-weight bound; capture moments within 3 sigma")
def test_spread_and_capture():
    rows = c9_spread(1)
    assert rows, "no spread witness found on any instance"
    for i, R, S, rest, scaled in rows:
        assert rest >= scaled, (i, R, sorted(S))
    reports = c9_moments(1)
    assert len(reports) == 20
    bad = [r.details for r in reports if r.verdict != "holds"]
    assert not bad, bad


@pytest.mark.criterion(10, "moment identity on 200 instances and weighted-uncovered bound on 200")
def test_degree_machinery():
    moments, sa = c10(1)
    assert len(moments) == 200 and all(a == b for a, b in moments)
    assert len(sa) == 200 and all(v[0] in ("holds", "vacuous") for v in sa)
    assert sum(v[0] == "holds" for v in sa) > 100


@pytest.mark.criterion(11, "n=3 tournament search, ledger round trip and dedupe, seeded stream")
def test_conjecture_harness(ledger_dir):
    path, records, first, second = c11(1, ledger_dir)
    summary = summarize_search(records)
    assert summary["instances"] == 8
    assert summary["min_sum_a"] == 3 == math.comb(3, 2)
    assert not summary["counterexamples"]

    reopened = SearchLedger(path)
    stored = list(reopened.records())
    assert [r.to_json() for r in stored] == [r.to_json() for r in records if r.instance_hash in reopened][: len(stored)]
    assert len(stored) == len({r.instance_hash for r in records})
    again = list(search_conjecture(3, "tournaments", budget=1000, seed=SEED, ledger=reopened))
    assert len(again) == len(records)
    assert len(list(SearchLedger(path).records())) == len(stored)
    assert first == second and len(first) == 20


@pytest.mark.criterion(12, "criteria 1-11 give identical verdicts with 1 and 8 threads")
def test_thread_determinism(ledger_dir):
    assert c1(1)[0] == c1(8)[0]
    assert c2(1) == c2(8)
    assert c3(1) == c3(8)
    assert [row[1:] for row in c5(1)] == [row[1:] for row in c5(8)]
    assert c6(1) == c6(8)
    assert c7(1)[0] == c7(8)[0]
    assert c8(1) == c8(8)
    assert c9_spread(1) == c9_spread(8)
    assert [r.key() for r in c9_moments(1)] == [r.key() for r in c9_moments(8)]
    assert [r.details["sample_mean"] for r in c9_moments(1)] == [r.details["sample_mean"] for r in c9_moments(8)]
    assert c10(1) == c10(8)
    a, b = c11(1, ledger_dir), c11(8, ledger_dir)
    assert [r.stream_key() for r in a[1]] == [r.stream_key() for r in b[1]]
    assert a[2] == b[2]
