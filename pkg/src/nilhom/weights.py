"""Weight vectors, their classification, and the symmetry group acting on them.

Symmetries (all up to a homological degree shift):

* rotation ``alpha``: [[w1, ..., wn]] = [[w2, ..., wn, w1]] shifted by 2*w1 - n - 1
* complement-reversal ``beta``: [[w]] = [[n+1-wn, ..., n+1-w1]], no shift
* reversal ``gamma`` (torsion summands only): torsion of [[reversed w]] in
  degree k equals torsion of [[w]] in degree N - k - 1, N = n(n-1)/2
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterator, List, Sequence, Tuple

from .complex_core import Monomial, check_weight, mask_from_pairs

WeightVector = Tuple[int, ...]


class NotTorsion(ValueError):
    pass


def weight_of(m: Monomial, n: int) -> WeightVector:
    """Modified weight (1..n) - (column count - row count) of a wedge."""
    w = list(range(1, n + 1))
    for i, j in m.pairs():
        w[i - 1] += 1
        w[j - 1] -= 1
    return tuple(w)


def _compositions(n: int, length: int, total: int) -> Iterator[Tuple[int, ...]]:
    if length == 0:
        if total == 0:
            yield ()
        return
    low = max(1, total - n * (length - 1))
    high = min(n, total - (length - 1))
    for x in range(low, high + 1):
        for rest in _compositions(n, length - 1, total - x):
            yield (x,) + rest


@lru_cache(maxsize=None)
def enumerate_weights(n: int) -> Tuple[WeightVector, ...]:
    """All of S_n, in lexicographic order."""
    return tuple(_compositions(n, n, n * (n + 1) // 2))


def is_permutation(w: Sequence[int]) -> bool:
    return len(set(w)) == len(w)


def classify(w: Sequence[int]) -> str:
    """'permutation' for w in F_n, 'torsion' otherwise."""
    return "permutation" if is_permutation(w) else "torsion"


def inversions(p: Sequence[int]) -> List[Tuple[int, int]]:
    """1-based inversion pairs (i, j), i < j, p_i > p_j."""
    n = len(p)
    return [(i + 1, j + 1) for i in range(n) for j in range(i + 1, n) if p[i] > p[j]]


def inversion_count(p: Sequence[int]) -> int:
    return len(inversions(p))


def inversion_monomial(p: Sequence[int]) -> Monomial:
    n = len(p)
    if sorted(p) != list(range(1, n + 1)):
        raise ValueError(f"{tuple(p)} is not a permutation")
    return Monomial(n, mask_from_pairs(inversions(p), n))


def rotate_alpha(w: Sequence[int]) -> Tuple[WeightVector, int]:
    n = len(w)
    return tuple(w[1:]) + (w[0],), 2 * w[0] - n - 1


def reverse_beta(w: Sequence[int]) -> WeightVector:
    n = len(w)
    return tuple(n + 1 - x for x in reversed(w))


def dual_gamma(w: Sequence[int]) -> WeightVector:
    if is_permutation(w):
        raise NotTorsion(f"{tuple(w)} is a permutation; duality only holds for torsion summands")
    return tuple(reversed(w))


def top_degree(n: int) -> int:
    return n * (n - 1) // 2


@dataclass(frozen=True)
class OrbitCertificate:
    """How a query vector relates to its canonical representative.

    Without duality: [[query]] = [[canonical]] shifted by ``degree_shift``.
    With ``dualized``: [[reversed query]] = [[canonical]] shifted by
    ``degree_shift``, and torsion is read through k -> N - 1 - k.
    ``transform_word`` lists the moves applied to the query, in order.
    """

    query: WeightVector
    canonical: WeightVector
    degree_shift: int
    dualized: bool = False
    transform_word: Tuple[str, ...] = field(default=())

    def replay(self) -> Tuple[WeightVector, int]:
        w = self.query
        s = 0
        for sym in self.transform_word:
            if sym == "alpha":
                w, d = rotate_alpha(w)
                s += d
            elif sym == "beta":
                w = reverse_beta(w)
            else:
                w = tuple(reversed(w))
        return w, s


def alpha_beta_orbit(w: Sequence[int]) -> List[Tuple[WeightVector, int, Tuple[str, ...]]]:
    """Every (vector, shift, word) reachable by beta^e alpha^i, e in {0,1}."""
    w = tuple(w)
    n = len(w)
    out = []
    for start, word0 in ((w, ()), (reverse_beta(w), ("beta",))):
        v, s, word = start, 0, word0
        for i in range(n):
            out.append((v, s, word))
            v, d = rotate_alpha(v)
            s += d
            word = word + ("alpha",)
    return out


def _best(w: WeightVector):
    # ties broken by the shortest word, then by shift, for determinism
    return min(alpha_beta_orbit(w), key=lambda t: (t[0], len(t[2]), t[1]))


def canonicalize(w: Sequence[int], use_duality: bool = True) -> OrbitCertificate:
    """Lexicographically minimal representative of the alpha/beta orbit.

    For torsion vectors, the orbit of the reversed vector is also searched
    when ``use_duality`` is set; it wins only if strictly smaller.
    """
    w = tuple(w)
    check_weight(w)
    v, s, word = _best(w)
    cert = OrbitCertificate(w, v, s, False, word)
    if use_duality and not is_permutation(w):
        g = tuple(reversed(w))
        v2, s2, word2 = _best(g)
        if v2 < v:
            cert = OrbitCertificate(w, v2, s2, True, ("gamma",) + word2)
    return cert


def orbit_listing(w: Sequence[int]) -> List[Tuple[WeightVector, int, bool]]:
    """Distinct members of the alpha/beta(/gamma) orbit with shift and dual flag."""
    seen = {}
    for v, s, _ in alpha_beta_orbit(w):
        seen.setdefault((v, False), s)
    if not is_permutation(w):
        for v, s, _ in alpha_beta_orbit(tuple(reversed(w))):
            if (v, False) not in seen:
                seen.setdefault((v, True), s)
    return sorted((v, s, d) for (v, d), s in seen.items())


# -- T~_n pruning filter ------------------------------------------------------

def has_triple(w: Sequence[int]) -> bool:
    n = len(w)
    return any(w.count(x) >= 3 for x in {2, n - 1} if n >= 3)


def has_adjacent_pair(w: Sequence[int]) -> bool:
    n = len(w)
    if n < 3:
        return False
    for i in range(n):
        a, b = w[i], w[(i + 1) % n]
        if a == b and a in (2, n - 1):
            return True
    return False


def in_reduced_torsion_set(w: Sequence[int]) -> bool:
    """Membership in T~_n: torsion, no 1 or n, no adjacent/triple 2s or (n-1)s."""
    n = len(w)
    return (not is_permutation(w) and 1 not in w and n not in w
            and not has_adjacent_pair(w) and not has_triple(w))
