import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from nilhom.complex_core import build_summand, cone, cone_of_scalar, shift
from nilhom.homology import HomologyProfile, homology_profile
from nilhom.morse import (
    DirectedCycle,
    Matching,
    NonInvertibleEdge,
    PatternMismatch,
    quotient_two_three_three,
    matching_lemma_3_5,
    matching_two_two,
    reduce_by_matching,
    validate_matching,
)
from nilhom.weights import enumerate_weights, rotate_alpha


def two_two_vectors(ns=(3, 4, 5, 6)):
    return [w for n in ns for w in enumerate_weights(n) if w[:2] == (2, 2)]


def second_two_vectors(ns=(4, 5, 6)):
    return [(w, k) for n in ns for w in enumerate_weights(n) if w[0] == 2
            for k in range(3, n + 1) if w[k - 1] == 2]


def test_empty_matching_is_identity():
    c = build_summand((2, 3, 2, 3))
    validate_matching(c, Matching())
    r = reduce_by_matching(c, Matching())
    assert r.complex.bases == c.bases
    assert [r.complex.boundary_matrix(k) for k in c.degrees()] == [c.boundary_matrix(k) for k in c.degrees()]


def test_two_two_examples():
    for w in [(2, 2, 3, 3), (2, 2, 2, 4)]:
        c = build_summand(w)
        m = matching_two_two(c)
        validate_matching(c, m)
        assert 2 * len(m) == c.total_dim()
        assert reduce_by_matching(c, m).complex.total_dim() == 0
    with pytest.raises(PatternMismatch):
        matching_two_two(build_summand((2, 3, 2, 3)))


@pytest.mark.parametrize("w", two_two_vectors())
def test_two_two_contracts_to_zero(w):
    c = build_summand(w)
    if c.total_dim() == 0:
        return
    r = reduce_by_matching(c, matching_two_two(c, w))
    assert r.complex.total_dim() == 0
    assert homology_profile(c).is_zero()


def test_non_invertible_edge():
    c = cone_of_scalar(build_summand((2, 1, 3)), 2)
    (k,) = [k for k in c.degrees() if any(c.boundary_matrix(k))]
    with pytest.raises(NonInvertibleEdge):
        validate_matching(c, Matching.of([(k, 0, 0)]))


def test_directed_cycle():
    # the two +-1 edges of a 2x2 block with all entries +-1 close a cycle
    for w in enumerate_weights(5):
        c = build_summand(w)
        for k in c.degrees():
            cols = c.boundary_matrix(k)
            for a in range(len(cols)):
                for b in range(a + 1, len(cols)):
                    shared = [r for r in cols[a] if r in cols[b] and abs(cols[a][r]) == 1 and abs(cols[b][r]) == 1]
                    if len(shared) >= 2:
                        m = Matching.of([(k, a, shared[0]), (k, b, shared[1])])
                        with pytest.raises(DirectedCycle):
                            validate_matching(c, m)
                        return
    pytest.fail("no cycle candidate found")


def random_matching(c, rnd):
    """Greedy random matching along +-1 edges, kept only if it is Morse."""
    used, pairs = set(), []
    edges = [(k, j, r) for k in c.degrees() for j, col in enumerate(c.boundary_matrix(k))
             for r, v in col.items() if abs(v) == 1]
    rnd.shuffle(edges)
    for k, j, r in edges:
        if (k, j) in used or (k - 1, r) in used:
            continue
        trial = Matching.of(pairs + [(k, j, r)])
        try:
            validate_matching(c, trial)
        except DirectedCycle:
            continue
        pairs.append((k, j, r))
        used |= {(k, j), (k - 1, r)}
    return Matching.of(pairs)


@given(st.sampled_from([w for n in (4, 5) for w in enumerate_weights(n)]), st.randoms(use_true_random=False))
def test_random_morse_matching_preserves_homology(w, rnd):
    c = build_summand(w)
    if c.total_dim() > 200:
        return
    r = reduce_by_matching(c, random_matching(c, rnd))
    assert r.complex.is_complex()
    assert homology_profile(r.complex) == homology_profile(c)


@pytest.mark.parametrize("w,k", second_two_vectors())
def test_second_two_structure(w, k):
    c = build_summand(w)
    res = matching_lemma_3_5(c, k, w)
    assert homology_profile(res.reduced.complex) == homology_profile(c)
    # restricted to B the reduced boundary is the original one
    for d in res.b_part:
        bset = set(res.b_part.get(d - 1, ()))
        crit_pos = {old: new for new, old in enumerate(res.reduced.critical.get(d - 1, ()))}
        for old in res.b_part[d]:
            new = res.reduced.critical[d].index(old)
            orig = {crit_pos[r]: v for r, v in c.boundary_matrix(d)[old].items()}
            assert {r: v for r, v in res.reduced.complex.boundary_matrix(d)[new].items()} == orig
            assert all(r in bset for r in c.boundary_matrix(d)[old])
    assert homology_profile(shift(res.cone(), c.shift)) == homology_profile(c)


@pytest.mark.parametrize("q", [2, 3, 4, 5])
def test_second_two_torsion_family(q):
    w = tuple(range(2, q + 2)) + (2, q + 1)
    res = matching_lemma_3_5(build_summand(w), q + 1)
    assert res.phi == {q: [{0: q}]} or res.phi == {q: [{0: -q}]}
    assert res.source is None
    assert homology_profile(res.cone()) == HomologyProfile.from_dict({q: (0, [q])})


def test_second_two_small_case():
    res = matching_lemma_3_5(build_summand((2, 3, 2, 3)), 3)
    assert homology_profile(res.b_complex) == HomologyProfile.free_class(2)
    assert homology_profile(res.reduced.complex) == HomologyProfile.from_dict({2: (0, [2])})


@pytest.mark.parametrize("w", [w for n in (4, 5, 6) for w in enumerate_weights(n)
                               if w[0] == 2 and w[n - 2] == 2 and w[n - 1] < n and min(w[1:n - 2], default=2) >= 2])
def test_second_two_last_position_is_scalar(w):
    n = len(w)
    res = matching_lemma_3_5(build_summand(w), n - 1, w)
    assert res.source is None
    mult = w[-1] - 1
    for cols in res.phi.values():
        for j, col in enumerate(cols):
            assert col in ({j: mult}, {j: -mult}) or (mult == 0 and col == {})


def test_second_two_pattern_mismatch():
    with pytest.raises(PatternMismatch):
        matching_lemma_3_5(build_summand((3, 2, 3, 2)), 3)


@pytest.mark.parametrize("w", [w for n in (4, 5, 6) for w in enumerate_weights(n) if w[:3] == (2, 3, 3)])
def test_quotient_two_three_three(w):
    n = len(w)
    c = build_summand(w)
    q, m, r = quotient_two_three_three(c, w)
    assert homology_profile(r.complex) == homology_profile(q) == homology_profile(c)
    red = r.complex

    def kind(mono):
        pairs = set(mono.pairs())
        if (1, 2) in pairs:
            return "C"
        assert {(1, 3), (2, 3)} <= pairs
        return "B"

    for k in red.degrees():
        for j, col in enumerate(red.boundary_matrix(k)):
            src = kind(red.bases[k][j])
            for row, v in col.items():
                dst = kind(red.bases[k - 1][row])
                assert (src, dst) != ("C", "B")
                if src != dst:
                    assert abs(v) == 2  # the two zig-zag paths add up
