from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import families
from mincover.bounds import (
    split_sum,
    verify_cover_weight_bound,
    verify_monotonicity,
    verify_split_chain,
    verify_subfamily_split,
)
from mincover.constructions import build_digraph_family, example1_linear, example2_cyclic
from mincover.family import SetFamily
from mincover.kernels import HypothesisError
from mincover.oracle import brute_c_weight


def fam(*sets, n=None):
    return SetFamily.of(sets, uniformity=n)


class TestCoverWeightBound:
    def test_single_set_is_tight(self):
        rep = verify_cover_weight_bound(fam({0, 1, 2}, n=3))
        assert rep.lhs == 1 and rep.verdict == "holds"

    def test_two_disjoint_sets_tight(self):
        assert verify_cover_weight_bound(fam({0, 1}, {2, 3}, n=2)).lhs == 1

    @pytest.mark.parametrize("F", [build_digraph_family(example1_linear(3)), build_digraph_family(example2_cyclic(2))])
    def test_constructions(self, F):
        rep = verify_cover_weight_bound(F)
        assert rep.verdict == "holds" and rep.lhs == brute_c_weight(F, F.n, F.n)

    @given(families(max_ground=8, uniform=True))
    def test_random_uniform(self, F):
        assert verify_cover_weight_bound(F).verdict == "holds"


class TestMonotonicity:
    def test_equal_parameters(self):
        rep = verify_monotonicity(fam({0, 1}, {2, 3}, n=2), 2, 2)
        assert rep.lhs == rep.rhs

    def test_order_enforced(self):
        with pytest.raises(HypothesisError):
            verify_monotonicity(fam({0, 1}, n=2), 3, 2)

    def test_single_set_tight(self):
        # one n-set: c_mu = n/mu, and (lam/mu)^1 c_lam = (lam/mu)(n/lam)
        rep = verify_monotonicity(fam({0, 1, 2}, n=3), 1, 4)
        assert rep.lhs == rep.rhs == Fraction(3, 4)

    @given(
        families(max_ground=8),
        st.fractions(min_value=Fraction(1, 2), max_value=5, max_denominator=6),
        st.fractions(min_value=0, max_value=5, max_denominator=6),
    )
    def test_random(self, F, lam, extra):
        assert verify_monotonicity(F, lam, lam + extra).verdict == "holds"


class TestSplit:
    def test_whole_family_as_subfamily(self):
        F = fam({0, 1}, {2, 3}, n=2)
        total, terms = split_sum(F, [0, 1], Fraction(2))
        assert total == 1 and all(v == 1 for _, v in terms)

    def test_empty_subfamily_equals_full_weight(self):
        F = fam({0, 1}, {1, 2}, n=2)
        total, terms = split_sum(F, [], Fraction(3))
        assert [C for C, _ in terms] == [frozenset()]
        assert total == brute_c_weight(F, 3, 2)

    def test_parameter_above_one(self):
        with pytest.raises(HypothesisError):
            verify_subfamily_split(fam({0, 1}, n=2), [0], 1)

    @given(families(max_ground=8), st.data())
    def test_random_split(self, F, data):
        sub = data.draw(st.sets(st.integers(0, len(F) - 1))) if len(F) else set()
        lam = data.draw(st.fractions(min_value=Fraction(11, 10), max_value=6, max_denominator=10))
        rep = verify_subfamily_split(F, sub, lam)
        assert rep.verdict == "holds" and rep.details["product_ok"]

    @given(families(max_ground=8, uniform=True), st.data())
    def test_random_chain(self, F, data):
        sub = data.draw(st.sets(st.integers(0, len(F) - 1))) if len(F) else set()
        assert verify_split_chain(F, sub).verdict == "holds"

    def test_chain_on_linear_family(self):
        F = build_digraph_family(example1_linear(3))
        rep = verify_split_chain(F, range(6))
        assert rep.verdict == "holds" and rep.details["tau"] == 3
