import itertools
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import families
from mincover.constructions import build_digraph_family, example1_linear, example2_cyclic
from mincover.family import FamilyError, SetFamily, UncoverableError
from mincover.oracle import brute_c_weight, brute_minimal_covers, brute_tau
from mincover.transversal import (
    BudgetExceeded,
    c_weight,
    enumerate_minimal_covers,
    is_cover,
    is_maximal_intersecting,
    is_minimal_cover,
    is_tau_critical,
    tau,
    tau_criticalize,
    tau_with_witness,
)


def fam(*sets, **kw):
    return SetFamily.of(sets, **kw)


P = fam({0, 1}, {1, 2})


class TestCoverPredicates:
    def test_examples(self):
        assert is_cover({1}, P)
        assert not is_cover(set(), fam({0}))
        assert is_cover(set(), SetFamily((), 0))
        assert is_minimal_cover({1}, P)
        assert not is_minimal_cover({0, 1}, P)
        assert is_minimal_cover({0, 2}, P)

    def test_single_element_against_brute_force_on_linear_family(self):
        F = build_digraph_family(example1_linear(3))
        for x in range(F.ground):
            assert is_cover({x}, F) == all(x in s for s in F.sets)


class TestEnumeration:
    def test_single_set(self):
        assert enumerate_minimal_covers(fam({0, 1, 2}), 3).covers == tuple(frozenset({x}) for x in range(3))

    def test_canonical_order_is_size_then_lexicographic(self):
        assert enumerate_minimal_covers(P, 2).covers == (frozenset({1}), frozenset({0, 2}))

    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_two_disjoint_sets_give_all_cross_pairs(self, n):
        F = fam(set(range(n)), set(range(n, 2 * n)))
        covers = enumerate_minimal_covers(F, n).covers
        assert set(covers) == {frozenset({a, b}) for a in range(n) for b in range(n, 2 * n)}

    def test_empty_family_has_only_the_empty_cover(self):
        assert enumerate_minimal_covers(SetFamily((), 3), 2).covers == (frozenset(),)

    def test_cap_zero(self):
        assert enumerate_minimal_covers(P, 0).covers == ()

    def test_empty_member_is_uncoverable(self):
        with pytest.raises(UncoverableError):
            enumerate_minimal_covers(fam(set(), {0}), 2)

    def test_non_uniform_needs_explicit_cap(self):
        with pytest.raises(FamilyError):
            enumerate_minimal_covers(fam({0}, {1, 2}))

    def test_budget_error_reports_progress(self):
        F = build_digraph_family(example1_linear(4))
        with pytest.raises(BudgetExceeded) as info:
            enumerate_minimal_covers(F, 4, budget=10)
        assert info.value.nodes > 10 and info.value.budget == 10

    @given(families(max_ground=9), st.integers(0, 9))
    def test_matches_brute_force(self, F, cap):
        assert list(enumerate_minimal_covers(F, cap).covers) == brute_minimal_covers(F, cap)

    @given(families(max_ground=9), st.integers(1, 5))
    def test_antichain_and_minimality(self, F, cap):
        covers = enumerate_minimal_covers(F, cap).covers
        for a, b in itertools.permutations(covers, 2):
            assert not a < b
        for C in covers:
            assert len(C) <= cap and is_minimal_cover(C, F)

    @given(families(max_ground=9), st.integers(1, 5), st.integers(2, 8))
    def test_thread_count_does_not_change_output(self, F, cap, threads):
        assert enumerate_minimal_covers(F, cap, threads=threads) == enumerate_minimal_covers(F, cap, threads=1)


class TestWeights:
    def test_single_n_set_at_n(self):
        assert c_weight(fam({0, 1, 2, 3}, uniformity=4), 4) == 1

    @pytest.mark.parametrize("n, x", [(3, 1), (4, 0), (5, 2), (6, 3)])
    def test_two_sets_closed_form(self, n, x):
        A1 = set(range(n))
        A2 = set(range(x)) | set(range(n, 2 * n - x))
        lam = Fraction(2 * n - 1, 2)
        assert c_weight(fam(A1, A2), lam, n) == Fraction(x) / lam + Fraction((n - x) ** 2) / lam**2

    def test_two_overlapping_pairs(self):
        assert c_weight(P, 2, 2) == Fraction(3, 4)

    def test_nonpositive_parameter(self):
        with pytest.raises(ValueError):
            c_weight(P, 0, 2)

    @given(families(max_ground=8), st.fractions(min_value=Fraction(1, 3), max_value=6), st.integers(1, 4))
    def test_against_brute_force(self, F, lam, cap):
        assert c_weight(F, lam, cap) == brute_c_weight(F, lam, cap)


class TestTau:
    def test_examples(self):
        assert tau(fam({0, 1}, {2, 3})) == 2
        assert tau(fam({0, 1, 2})) == 1
        assert tau(SetFamily((), 0)) == 0

    def test_cyclic_example(self):
        F = build_digraph_family(example2_cyclic(2))
        assert tau(F) == 4 == brute_tau(F)

    def test_uncoverable(self):
        with pytest.raises(UncoverableError):
            tau(fam(set(), {0}))

    @given(families(max_ground=9))
    def test_against_brute_force_with_witness(self, F):
        t, C = tau_with_witness(F)
        assert t == brute_tau(F) == len(C)
        assert is_cover(C, F)


class TestCriticality:
    def test_disjoint_pair_is_critical(self):
        assert is_tau_critical(fam({0, 1}, {2, 3}))
        assert is_tau_critical(fam({0, 1}))

    def test_redundant_member_is_dropped_first_by_index(self):
        F = fam({0, 1, 2}, {0, 1}, {2, 3}, {0, 3})
        G = tau_criticalize(F)
        assert G.sets == (frozenset({0, 1}), frozenset({2, 3}))

    def test_superset_member_is_not_critical(self):
        assert not is_tau_critical(fam({0, 1}, {0, 1, 2}, {3}))

    def test_triangle(self):
        F = fam({0, 1}, {1, 2}, {0, 2})
        G = tau_criticalize(F)
        assert tau(G) == tau(F) == 2 and is_tau_critical(G)
        # dropping any edge leaves two edges sharing a vertex
        assert G == F

    def test_fixed_point(self):
        F = fam({0, 1}, {2, 3})
        assert tau_criticalize(F) == F

    @given(families(max_ground=7, max_sets=5))
    def test_result_is_critical_against_exhaustive_subfamilies(self, F):
        G = tau_criticalize(F)
        assert set(G.sets) <= set(F.sets)
        t = brute_tau(F)
        assert brute_tau(G) == t
        for r in range(len(G)):
            for sub in itertools.combinations(G.sets, r):
                assert brute_tau(SetFamily(sub, G.ground)) < t


class TestMaximality:
    def test_all_pairs_of_three(self):
        assert is_maximal_intersecting(fam({0, 1}, {1, 2}, {0, 2}, uniformity=2))

    def test_single_set_is_not_maximal(self):
        assert not is_maximal_intersecting(fam({0, 1, 2}, uniformity=3))

    @pytest.mark.parametrize("n", [2, 3])
    def test_linear_family_against_candidate_enumeration(self, n):
        F = build_digraph_family(example1_linear(n))
        members = set(F.sets)
        support = sorted(F.support)
        candidates = [frozenset(c) for c in itertools.combinations(support, n) if all(set(c) & s for s in F.sets)]
        expected = brute_tau(F) == n and all(c in members for c in candidates)
        assert is_maximal_intersecting(F) == expected

    def test_non_intersecting_rejected(self):
        with pytest.raises(FamilyError):
            is_maximal_intersecting(fam({0, 1}, {2, 3}, uniformity=2))
