import itertools
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from nilhom.complex_core import (
    EntryOutOfRange,
    Generator,
    GradedComplex,
    Monomial,
    NotAChainMap,
    WeightSumMismatch,
    apply_boundary,
    boundary,
    boundary_mask,
    bracket,
    build_summand,
    check_chain_map,
    complex_from_masks,
    cone,
    cone_of_scalar,
    direct_sum,
    generators,
    mask_from_pairs,
    pairs_from_mask,
    scalar_map,
    shift,
    summand_masks,
    summand_size,
    summand_size_count,
    wedge,
)
from nilhom.homology import HomologyProfile, euler_characteristic, homology_profile
from nilhom.weights import enumerate_weights, weight_of

from conftest import weights


def mono(*pairs, n=4):
    return Monomial.from_pairs(pairs, n)


def single_class(degree, n=2):
    """Z in the given reported degree: one basis element, no boundary."""
    return GradedComplex({0: [mono(n=n)]}, {0: [{}]}, degree)


class TestBracket:
    def test_composable(self):
        assert bracket(Generator(1, 2), Generator(2, 3)) == (1, Generator(1, 3))

    def test_disjoint(self):
        assert bracket(Generator(1, 2), Generator(3, 4)) is None

    def test_reversed(self):
        assert bracket(Generator(2, 3), Generator(1, 2)) == (-1, Generator(1, 3))

    def test_invalid_generator(self):
        with pytest.raises(ValueError):
            Generator(2, 2)


class TestMonomial:
    def test_mask_roundtrip(self):
        for n in (2, 3, 4, 5):
            for mask in range(0, 1 << len(generators(n)), 7):
                assert mask_from_pairs(pairs_from_mask(mask, n), n) == mask

    def test_degree_and_order(self):
        m = mono((2, 3), (1, 2))
        assert m.pairs() == [(1, 2), (2, 3)]
        assert m.degree() == 2

    def test_wedge_sign_and_repeat(self):
        assert wedge([(2, 3), (1, 2)], 3) == (-1, Monomial.from_pairs([(1, 2), (2, 3)], 3))
        sign, m = wedge([(1, 2), (1, 2)], 3)
        assert sign == 0 and m is None


class TestBoundary:
    def test_degree_one_is_closed(self):
        assert boundary(mono((1, 3), n=3)) == {}

    def test_single_pair(self):
        assert boundary(mono((1, 2), (2, 3), n=3)) == {mono((1, 3), n=3): -1}

    def test_repeated_output_cancels(self):
        assert boundary(mono((1, 2), (1, 3), (2, 3), n=3)) == {}

    @pytest.mark.parametrize("n", [2, 3, 4, 5])
    def test_square_zero_all_monomials(self, n):
        for mask in range(1 << len(generators(n))):
            assert apply_boundary(boundary_mask(mask, n), n) == {}

    @given(st.integers(6, 7), st.randoms(use_true_random=False))
    def test_square_zero_random_monomials(self, n, rnd):
        mask = rnd.getrandbits(len(generators(n)))
        assert apply_boundary(boundary_mask(mask, n), n) == {}

    @given(weights((3, 4, 5)))
    def test_weight_preserved(self, w):
        n = len(w)
        for mask in summand_masks(w):
            for m2 in boundary_mask(mask, n):
                assert weight_of(Monomial(n, m2), n) == w


class TestSummands:
    def test_identity_weight(self):
        c = build_summand((1, 2, 3))
        assert c.degrees() == [0] and c.bases[0] == [Monomial(3, 0)]
        assert c.boundary_matrix(0) == [{}]

    def test_2323_basis(self):
        c = build_summand((2, 3, 2, 3))
        assert set(c.bases[2]) == {mono((1, 4), (2, 3)), mono((1, 3), (2, 4))}
        assert set(c.bases[3]) == {mono((1, 2), (2, 3), (2, 4)), mono((1, 3), (2, 3), (3, 4))}

    def test_222_basis(self):
        c = build_summand((2, 2, 2))
        assert c.bases[1] == [mono((1, 3), n=3)] and c.bases[2] == [mono((1, 2), (2, 3), n=3)]

    def test_bad_weight(self):
        with pytest.raises(WeightSumMismatch):
            build_summand((1, 1, 1))
        with pytest.raises(EntryOutOfRange):
            build_summand((0, 3, 3))

    def test_degenerate_vector_gives_zero_complex(self):
        assert build_summand((1, 1, 4, 4)).total_dim() == 0

    @pytest.mark.parametrize("n", [2, 3, 4, 5, 6])
    def test_partition_of_exterior_algebra(self, n):
        assert sum(summand_size(w) for w in enumerate_weights(n)) == 2 ** (n * (n - 1) // 2)

    @given(weights((3, 4, 5, 6)))
    def test_counting_matches_enumeration(self, w):
        assert summand_size_count(w) == summand_size(w)

    @pytest.mark.parametrize("n", [3, 4, 5])
    def test_enumeration_matches_brute_force(self, n):
        by_weight = {}
        for mask in range(1 << len(generators(n))):
            by_weight.setdefault(weight_of(Monomial(n, mask), n), []).append(mask)
        for w, masks in by_weight.items():
            assert sorted(summand_masks(w)) == sorted(masks)

    def test_z8_witness_size(self):
        assert summand_size((2, 4, 7, 5, 4, 2, 5, 7)) == 192


class TestShiftAndSums:
    def test_shift_reports_higher(self):
        c = shift(build_summand((2, 3, 2, 3)), 1)
        assert c.reported(2) == 3
        assert homology_profile(c) == HomologyProfile.from_dict({3: (0, [2])})

    def test_shift_identity_and_composition(self):
        c = build_summand((2, 3, 2, 3))
        assert shift(c, 0) == c
        assert shift(shift(c, 2), -5) == shift(c, -3)

    def test_empty_sum(self):
        assert direct_sum([]).total_dim() == 0

    def test_sum_over_s3(self):
        assert direct_sum([build_summand(w) for w in enumerate_weights(3)]).total_dim() == 8

    @given(st.lists(weights((3, 4)), min_size=1, max_size=4), st.lists(st.integers(-2, 2), min_size=4, max_size=4))
    def test_sum_profile_is_concatenation(self, ws, shifts):
        parts = [shift(build_summand(w), s) for w, s in zip(ws, shifts)]
        total = HomologyProfile.zero()
        for p in parts:
            total = total + homology_profile(p)
        assert homology_profile(direct_sum(parts)) == total


class TestCone:
    def test_multiplication_by_three(self):
        c = single_class(2)
        assert homology_profile(cone_of_scalar(c, 3)) == HomologyProfile.from_dict({2: (0, [3])})

    @given(weights((3, 4)))
    def test_identity_cone_is_acyclic(self, w):
        c = build_summand(w)
        assert homology_profile(cone(c, c, scalar_map(c, 1))).is_zero()

    def test_two_on_213(self):
        c = shift(build_summand((2, 1, 3)), 1)
        assert homology_profile(cone_of_scalar(c, 2)) == HomologyProfile.from_dict({2: (0, [2])})

    def test_rejects_non_chain_map(self):
        c = build_summand((2, 2, 2))
        bad = {1: [{0: 1}], 2: [{0: 0}]}
        assert not check_chain_map(c, c, bad)
        with pytest.raises(NotAChainMap):
            cone(c, c, bad)

    @given(weights((3, 4, 5)), st.integers(-4, 4))
    def test_euler_characteristic_of_cone(self, w, q):
        c = build_summand(w)
        d = cone_of_scalar(c, q)
        assert d.is_complex()
        assert euler_characteristic(d) == 0  # chi(cone) = chi(C) - chi(B)
