import math
from fractions import Fraction

import pytest
from hypothesis import given

from conftest import families
from mincover.constructions import build_digraph_family, example1_linear
from mincover.encoding import (
    cover_chains,
    pair_design,
    run_encoding,
    simple_chain_product,
    verify_bounded_degree_bound,
    verify_cap_scaling,
    verify_encoding,
)
from mincover.family import SetFamily, is_intersecting
from mincover.kernels import HypothesisError, degrees
from mincover.oracle import brute_c_weight


def fam(*sets, n=None):
    return SetFamily.of(sets, uniformity=n)


class TestChains:
    def test_two_edges(self):
        run = run_encoding(fam({0, 1}, {1, 2}, n=2))
        assert run.covers == (frozenset({1}), frozenset({0, 2}))
        assert set(run.simple) == set(run.covers) and not run.ambiguous
        assert run.weight_all == run.c_n == Fraction(3, 4)
        assert run.chain_sets(frozenset({0, 2})) == [(frozenset(), frozenset({0}), frozenset({0, 2}))]

    def test_triangle_has_ambiguous_covers(self):
        run = run_encoding(fam({0, 1}, {1, 2}, {0, 2}, n=2))
        assert len(run.covers) == 3
        # {0,1}: first member {0,1} gives 0 or 1, then the next unmet member supplies the other
        assert len(cover_chains(run.B.sets, frozenset({0, 1}))) == 2
        assert run.c_n <= (run.weight_simple + 1) / 2

    def test_chains_end_at_their_cover(self):
        F = build_digraph_family(example1_linear(3))
        run = run_encoding(F)
        for C in run.covers:
            for seq in run.chain_sets(C):
                assert seq[-1] == C and len(seq) == len(C) + 1

    def test_empty_family_rejected(self):
        with pytest.raises(HypothesisError):
            run_encoding(SetFamily((), 3))

    @given(families(max_ground=8, uniform=True))
    def test_weight_bounds(self, F):
        if len(F):
            run = run_encoding(F)
            assert run.c_n == brute_c_weight(F, F.n, F.n)
            assert verify_encoding(F).verdict == "holds"


class TestDesign:
    def test_k6_structure(self):
        B = pair_design(6)
        assert len(B) == 6 and B.ground == 15 and B.uniformity == 5
        assert is_intersecting(B) and set(degrees(B)) == {2}

    def test_k6_cover_weight(self):
        run = run_encoding(pair_design(6))
        assert run.c_n == Fraction(1131, 3125)
        assert run.weight_simple == Fraction(161, 625)
        assert run.weight_simple <= 1

    def test_k6_bound(self):
        rep = verify_bounded_degree_bound(pair_design(6), 3)
        assert rep.verdict == "holds" and rep.approx
        assert rep.rhs == pytest.approx(math.exp(-36 / 1350), abs=1e-15)
        assert float(rep.lhs) <= rep.rhs + 1e-12
        assert rep.details["product_ok"] and rep.details["fresh_element_ok"]

    def test_product(self):
        assert simple_chain_product(6, 3, 5) == 1
        assert simple_chain_product(9, 3, 5) == 1 - Fraction(1, 15)

    @pytest.mark.parametrize(
        "B, l",
        [
            (pair_design(6), 2),
            (pair_design(6), 1),
            (fam({0, 1}, {2, 3}, n=2), 3),
        ],
    )
    def test_hypotheses_enforced(self, B, l):
        with pytest.raises(HypothesisError):
            verify_bounded_degree_bound(B, l)


class TestCapScaling:
    def test_single_set(self):
        rep = verify_cap_scaling(fam({0, 1, 2, 3}, n=4))
        assert rep.lhs == 2 and rep.rhs == 2 and rep.verdict == "holds"

    def test_design_with_small_k(self):
        rep = verify_cap_scaling(pair_design(6), k=0, l=3)
        assert rep.details["small_k_applies"] and rep.details["c_n_minus_k"] <= 1

    def test_parameter_range(self):
        with pytest.raises(HypothesisError):
            verify_cap_scaling(fam({0}), lam=2)

    @given(families(max_ground=8, uniform=True))
    def test_random(self, F):
        if len(F):
            assert verify_cap_scaling(F, lam=Fraction(1, 2)).verdict == "holds"
