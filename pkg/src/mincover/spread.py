"""The random minimal cover, spread witnesses and capture probabilities.

The random cover puts mass proportional to ``n ** -|C|`` on each minimal
cover. Exact quantities use :class:`fractions.Fraction`; sampling uses
numpy generators split from one seed into a fixed number of streams, so
results do not depend on how many threads consume them.
"""
from __future__ import annotations

import itertools
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .family import Rational, SetFamily, mask_of, restrict_avoiding, to_fraction
from .report import VerdictReport, VerificationError
from .transversal import DEFAULT_NODE_BUDGET, CoverFamily, c_weight, enumerate_minimal_covers

SAMPLE_CHUNKS = 16


@dataclass(frozen=True)
class CoverDistribution:
    covers: CoverFamily
    lam: Fraction
    masses: tuple[Fraction, ...]

    def probability_contains(self, S: frozenset[int]) -> Fraction:
        return sum((p for C, p in zip(self.covers, self.masses) if S <= C), Fraction(0))

    def expected_size(self) -> Fraction:
        return sum((p * len(C) for C, p in zip(self.covers, self.masses)), Fraction(0))


@dataclass(frozen=True)
class SpreadReport:
    R: Fraction
    s_max: int
    witness: frozenset[int] | None
    probability: Fraction | None = None
    threshold: Fraction | None = None
    consequence: dict = field(default_factory=dict)


def cover_distribution(
    F: SetFamily,
    lam: Rational | None = None,
    size_cap: int | None = None,
    *,
    budget: int = DEFAULT_NODE_BUDGET,
) -> CoverDistribution:
    n = F.n
    lam = to_fraction(n if lam is None else lam)
    covers = enumerate_minimal_covers(F, n if size_cap is None else size_cap, budget=budget)
    if not len(covers):
        raise ValueError("family has no minimal cover within the size cap")
    raw = [lam ** -len(C) for C in covers]
    total = sum(raw, Fraction(0))
    return CoverDistribution(covers, lam, tuple(w / total for w in raw))


def spread_witness(
    F: SetFamily,
    R: Rational,
    s_max: int,
    *,
    budget: int = DEFAULT_NODE_BUDGET,
) -> SpreadReport:
    """First S (by size, then lexicographic) with ``P(S <= C) > R ** -|S|``.

    Only elements that occur in some cover are tried. When a witness is
    found, the cover weight of the members avoiding S is compared against
    the containment sum and against ``c_n(F) * (n/R) ** |S|``; either
    comparison failing raises :class:`VerificationError`.
    """
    R = to_fraction(R)
    if s_max < 1:
        raise ValueError("s_max must be at least 1")
    n = F.n
    dist = cover_distribution(F, n, n, budget=budget)
    elements = sorted(frozenset().union(*dist.covers.covers))
    for s in range(1, s_max + 1):
        threshold = R**-s
        for S in itertools.combinations(elements, s):
            S = frozenset(S)
            p = dist.probability_contains(S)
            if p > threshold:
                return SpreadReport(R, s_max, S, p, threshold, _consequence(F, dist, S, R, budget))
    return SpreadReport(R, s_max, None)


def _consequence(F: SetFamily, dist: CoverDistribution, S: frozenset[int], R: Fraction, budget: int) -> dict:
    n = F.n
    c_full = c_weight(F, n, n, budget=budget)
    containing = sum((Fraction(1, n ** len(C)) for C in dist.covers if S <= C), Fraction(0))
    c_rest = c_weight(restrict_avoiding(F, S), n, n, budget=budget)
    upper = Fraction(1, n ** len(S)) * c_rest
    lower = c_full * (Fraction(n) / R) ** len(S)
    if not containing <= upper:
        raise VerificationError(f"containment sum {containing} exceeds n^-|S| c_n(F(S-bar)) = {upper}")
    if not c_rest >= lower:
        raise VerificationError(f"c_n(F(S-bar)) = {c_rest} below c_n(F) (n/R)^|S| = {lower}")
    return {"containing_weight": containing, "avoiding_weight": c_rest, "scaled_full_weight": lower}


def verify_spread(F: SetFamily, R: Rational, s_max: int, *, budget: int = DEFAULT_NODE_BUDGET) -> VerdictReport:
    start = time.perf_counter()
    rep = spread_witness(F, R, s_max, budget=budget)
    details = {"R": rep.R, "s_max": s_max}
    if rep.witness is None:
        return VerdictReport(
            lemma="spread", instance_hash=F.fingerprint(), lhs=None, rhs=None, verdict="vacuous",
            details=details | {"witness": None}, elapsed=time.perf_counter() - start,
        )
    details |= {"witness": sorted(rep.witness), "probability": rep.probability, "threshold": rep.threshold}
    return VerdictReport(
        lemma="spread",
        instance_hash=F.fingerprint(),
        lhs=rep.consequence["avoiding_weight"],
        rhs=rep.consequence["scaled_full_weight"],
        verdict="holds",
        details=details,
        elapsed=time.perf_counter() - start,
    )


def capture_moments(B: SetFamily, delta: Rational, m: int) -> tuple[Fraction, Fraction]:
    """Exact mean and variance of the number of members inside a random set.

    Each ground element is kept independently with probability
    ``(1 - delta) ** m``. Members of different sizes are allowed; for an
    n-uniform family this is ``|B| rho`` and the usual pair-correlation sum.
    """
    delta = to_fraction(delta)
    if not 0 < delta < 1:
        raise ValueError("delta must lie strictly between 0 and 1")
    if m < 1:
        raise ValueError("m must be at least 1")
    keep = (1 - delta) ** m
    sets = B.sets
    rho = [keep ** len(A) for A in sets]
    mean = sum(rho, Fraction(0))
    var = sum((p * (1 - p) for p in rho), Fraction(0))
    for i, j in itertools.permutations(range(len(sets)), 2):
        var += keep ** len(sets[i] | sets[j]) - rho[i] * rho[j]
    return mean, var


def _chunk_sizes(trials: int) -> list[int]:
    base, extra = divmod(trials, SAMPLE_CHUNKS)
    return [base + (1 if i < extra else 0) for i in range(SAMPLE_CHUNKS)]


def _sample_chunks(seed: int, trials: int, threads: int, work):
    streams = np.random.SeedSequence(seed).spawn(SAMPLE_CHUNKS)
    jobs = [(np.random.default_rng(s), size) for s, size in zip(streams, _chunk_sizes(trials))]
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(lambda job: work(*job), jobs))
    else:
        parts = [work(*job) for job in jobs]
    return np.concatenate(parts)


def sample_capture_counts(
    B: SetFamily, density: float, trials: int, seed: int, threads: int = 1
) -> np.ndarray:
    """Per-trial number of members contained in a random set of the given density."""
    columns = [np.array(sorted(A), dtype=np.intp) for A in B.sets]

    def work(rng, size):
        U = rng.random((size, B.ground)) < density
        xi = np.zeros(size, dtype=np.int64)
        for cols in columns:
            xi += U[:, cols].all(axis=1)
        return xi

    return _sample_chunks(seed, trials, threads, work)


def verify_capture_moments(
    B: SetFamily, delta: Rational, m: int, trials: int = 100_000, seed: int = 0, threads: int = 1
) -> VerdictReport:
    """Exact moments against a Monte-Carlo estimate, each within three standard errors."""
    start = time.perf_counter()
    mean, var = capture_moments(B, delta, m)
    density = float((1 - to_fraction(delta)) ** m)
    xi = sample_capture_counts(B, density, trials, seed, threads).astype(float)
    mean_hat = xi.mean()
    var_hat = xi.var(ddof=1)
    se_mean = math.sqrt(float(var) / trials)
    mu4 = float(((xi - mean_hat) ** 4).mean())
    se_var = math.sqrt(max(mu4 - var_hat**2, 0.0) / trials)
    mean_ok = abs(mean_hat - float(mean)) <= 3 * se_mean + 1e-12
    var_ok = abs(var_hat - float(var)) <= 3 * se_var + 1e-12
    ok = mean_ok and var_ok
    return VerdictReport(
        lemma="capture-moments",
        instance_hash=B.fingerprint(),
        lhs=float(mean_hat),
        rhs=float(mean),
        verdict="holds" if ok else "fails",
        witness={} if ok else {"family": [sorted(s) for s in B.sets], "delta": delta, "m": m, "seed": seed},
        details={
            "exact_mean": mean,
            "exact_variance": var,
            "sample_mean": float(mean_hat),
            "sample_variance": float(var_hat),
            "se_mean": se_mean,
            "se_variance": se_var,
            "trials": trials,
        },
        seed=seed,
        elapsed=time.perf_counter() - start,
        approx=True,
    )


def exact_capture_probability(covers: Sequence[frozenset[int]], density: Rational) -> Fraction:
    """P(some cover lies inside a random set of the given density), by enumeration."""
    density = to_fraction(density)
    union = sorted(frozenset().union(*covers)) if covers else []
    if len(union) > 20:
        raise ValueError("too many elements for exact enumeration")
    pos = {x: i for i, x in enumerate(union)}
    masks = [mask_of(pos[x] for x in C) for C in covers]
    total = Fraction(0)
    k = len(union)
    for W in range(1 << k):
        if any(W & c == c for c in masks):
            size = bin(W).count("1")
            total += density**size * (1 - density) ** (k - size)
    return total


def monte_carlo_capture(
    F: SetFamily,
    delta: Rational,
    m: int,
    R: Rational,
    trials: int = 100_000,
    seed: int = 0,
    s_max: int = 2,
    *,
    threads: int = 1,
    budget: int = DEFAULT_NODE_BUDGET,
) -> VerdictReport:
    """Estimate the chance that a random set swallows a minimal cover.

    The comparison bound only applies to spread distributions, which is
    tested here up to ``s_max``; when a witness exists the verdict is
    ``inconclusive``, and with no witness it is advisory only, because
    larger sets were not examined.
    """
    start = time.perf_counter()
    delta = to_fraction(delta)
    R = to_fraction(R)
    dist = cover_distribution(F, budget=budget)
    spread = spread_witness(F, R, s_max, budget=budget)
    density = 1 - (1 - delta) ** m
    covers = list(dist.covers)
    columns = [np.array(sorted(C), dtype=np.intp) for C in covers]

    def work(rng, size):
        W = rng.random((size, F.ground)) < float(density)
        hit = np.zeros(size, dtype=bool)
        for cols in columns:
            hit |= W[:, cols].all(axis=1)
        return hit

    hits = _sample_chunks(seed, trials, threads, work)
    p_hat = float(hits.mean())
    sigma = math.sqrt(max(p_hat * (1 - p_hat), 1.0 / trials) / trials)
    rd = R * delta
    expected = dist.expected_size()
    vacuous = rd <= 2
    bound = None
    if not vacuous:
        bound = 1 - (5 / math.log2(rd)) ** m * float(expected)
        vacuous = bound <= 0
    exact = None
    union = frozenset().union(*covers)
    if len(union) <= 16:
        exact = exact_capture_probability(covers, density)
    details = {
        "density": density,
        "expected_cover_size": expected,
        "estimate": p_hat,
        "sigma": sigma,
        "exact": exact,
        "bound": bound,
        "spread_witness": sorted(spread.witness) if spread.witness is not None else None,
        "s_max": s_max,
        "advisory": True,
    }
    if spread.witness is not None:
        verdict = "inconclusive"
    elif vacuous:
        verdict = "vacuous"
    else:
        ok = p_hat + 3 * sigma >= bound and (exact is None or float(exact) >= bound - 1e-12)
        verdict = "holds" if ok else "fails"
    return VerdictReport(
        lemma="cors",
        instance_hash=F.fingerprint(),
        lhs=p_hat,
        rhs=bound,
        verdict=verdict,
        witness={"family": [sorted(s) for s in F.sets], "seed": seed} if verdict == "fails" else {},
        details=details,
        seed=seed,
        elapsed=time.perf_counter() - start,
        approx=True,
    )
