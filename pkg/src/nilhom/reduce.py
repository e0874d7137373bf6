"""Lemma-driven evaluation of summand homology with memoization.

Every rule rewrites a weight vector into smaller or already-known problems.
Whatever no rule settles is built explicitly and handed to Smith normal form,
subject to a basis-size cap.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from itertools import combinations
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple

from .complex_core import build_summand, check_weight, cone_of_scalar, shift, summand_masks
from .homology import HomologyProfile, homology_profile, prime_powers
from .weights import (
    WeightVector,
    alpha_beta_orbit,
    canonicalize,
    has_adjacent_pair,
    has_triple,
    inversion_count,
    is_permutation,
    top_degree,
)

ALL_RULES = frozenset({
    "strip", "permutation", "triple", "adjacent", "cone_two_two", "cone_33",
    "filtration", "rotate_second", "duality",
})


class ResourceLimitExceeded(RuntimeError):
    def __init__(self, message: str, vectors: Sequence[WeightVector] = ()):
        super().__init__(message)
        self.vectors = list(vectors)


class NoExtreme(ValueError):
    pass


@dataclass(frozen=True)
class ReduceConfig:
    cap: int = 200_000
    max_rotation_depth: Optional[int] = None  # None: n
    rules: FrozenSet[str] = ALL_RULES


@dataclass
class ReductionTrace:
    steps: List[Tuple[str, WeightVector, str, int]] = field(default_factory=list)
    terminal: str = ""

    def total_shift(self) -> int:
        return sum(s for _, _, _, s in self.steps)

    def summary(self) -> str:
        rules = [r for r, _, _, _ in self.steps]
        return " > ".join(rules + [self.terminal])

    def lines(self) -> List[str]:
        out = []
        for rule, vec, desc, s in self.steps:
            out.append(f"{rule:14s} {','.join(map(str, vec)):24s} {desc}  (shift {s:+d})")
        out.append(f"terminal: {self.terminal}")
        return out


# -- individual rules ---------------------------------------------------------

def strip_extremes(w: Sequence[int], which: str = "auto") -> Tuple[WeightVector, int]:
    """Drop an entry n (shift n - k) or an entry 1 (shift k - 1, rest minus 1).

    ``which`` is "n", "1", or "auto" (an n if present, else a 1).  If w holds
    a second n (or 1) the result has an entry out of range: the summand is
    empty.
    """
    w = tuple(w)
    n = len(w)
    if which not in ("auto", "n", "1"):
        raise ValueError(f"unknown extreme {which!r}")
    if n in w and which in ("auto", "n"):
        k = w.index(n) + 1
        return w[:k - 1] + w[k:], n - k
    if 1 in w and which in ("auto", "1"):
        k = w.index(1) + 1
        return tuple(x - 1 for x in w[:k - 1] + w[k:]), k - 1
    raise NoExtreme(f"{w} has no entry {'1 or ' + str(n) if which == 'auto' else which}")


def rule_triple(w: Sequence[int]) -> bool:
    """True (acyclic) when three entries share a value in {2, n-1}."""
    return has_triple(tuple(w))


def rule_adjacent_pair(w: Sequence[int]) -> bool:
    """True (acyclic) when two cyclically adjacent entries are both 2 or both n-1."""
    return has_adjacent_pair(tuple(w))


@dataclass(frozen=True)
class Cone:
    """H[[w]] = H Cone(multiplication by ``multiplier`` on [[inner]] shifted by ``shift``)."""

    multiplier: int
    inner: WeightVector
    shift: int


def rule_cone_33(w: Sequence[int]) -> Optional[Cone]:
    """w = (2, w2..wk, 3, 3, ...) with every other entry at least 3."""
    w = tuple(w)
    n = len(w)
    if n < 4 or w[0] != 2:
        return None
    for k in range(1, n - 1):
        if w[k] == 3 and w[k + 1] == 3:
            rest = w[1:k] + w[k + 2:]
            if all(x >= 3 for x in rest):
                inner = tuple(x - 2 for x in w[1:k]) + (3,) + tuple(x - 2 for x in w[k + 2:])
                return Cone(2, inner, k)
    return None


def rule_cone_two_two(w: Sequence[int]) -> Optional[Cone]:
    """w = (2, w2..w_{n-2}, 2, wn): cone of (wn - 1) on [[w2-1, .., w_{n-2}-1, 1, wn]]_1."""
    w = tuple(w)
    n = len(w)
    if n < 4 or w[0] != 2 or w[n - 2] != 2 or w[n - 1] >= n:
        return None
    if any(x < 2 for x in w[1:n - 2]):
        return None
    inner = tuple(x - 1 for x in w[1:n - 2]) + (1, w[n - 1])
    return Cone(w[n - 1] - 1, inner, 1)


def rule_rotate_second(w: Sequence[int]) -> Optional[Tuple[WeightVector, WeightVector, int]]:
    """For w1 = 2: (hypothesis vector, rotated vector, shift).

    The rewrite [[w]] -> [[2, w3, .., wn, w2]] shifted by 2*w2 - n - 2 is valid
    only once the hypothesis summand is known to be acyclic.
    """
    w = tuple(w)
    n = len(w)
    if n < 3 or w[0] != 2:
        return None
    hyp = (w[1],) + tuple(x - 1 for x in w[2:])
    if not all(1 <= x <= n - 1 for x in hyp):
        return None
    return hyp, (2,) + w[2:] + (w[1],), 2 * w[1] - n - 2


def filtration_split(w: Sequence[int]) -> Dict[int, List[Tuple[WeightVector, int]]]:
    """Quotients of the filtration by total first-row column index.

    With t = w1 - 1, level k is the sum over index sets I of size t with
    sum(I) = k of [[w(I)]] shifted by t, where w(I)_j = w_j for j in I and
    w_j - 1 otherwise (j = 2..n).  Vectors with an entry outside 1..n-1
    span nothing and are left out.
    """
    w = tuple(w)
    n = len(w)
    t = w[0] - 1
    out: Dict[int, List[Tuple[WeightVector, int]]] = {}
    for idx in combinations(range(2, n + 1), t):
        chosen = set(idx)
        v = tuple(w[j - 1] if j in chosen else w[j - 1] - 1 for j in range(2, n + 1))
        if all(1 <= x <= n - 1 for x in v):
            out.setdefault(sum(idx), []).append((v, t))
    return out


def cone_profile(inner: HomologyProfile, q: int) -> Optional[HomologyProfile]:
    """Homology of the cone of multiplication by q, when the answer is forced.

    Only a zero profile or a single Z are handled; anything else may hide an
    extension problem and returns None.
    """
    if inner.is_zero() or q in (1, -1):
        return HomologyProfile.zero()
    d = inner.single_free_degree()
    if d is None:
        return None
    if q == 0:
        return HomologyProfile.from_dict({d: (1, ()), d + 1: (1, ())})
    return HomologyProfile.from_dict({d: (0, prime_powers(q))})


# -- the reducer --------------------------------------------------------------

def map_back(profile: HomologyProfile, shift_by: int, dualized: bool, n: int) -> HomologyProfile:
    out = profile.shifted(shift_by)
    if dualized:
        out = out.dual_flip(top_degree(n))
    return out


class Reducer:
    """Memoized summand homology; one cache entry per canonical vector."""

    def __init__(self, config: ReduceConfig | None = None, cache: dict | None = None):
        self.config = config or ReduceConfig()
        self.cache: Dict[WeightVector, Tuple[HomologyProfile, ReductionTrace]] = {} if cache is None else cache
        self._busy: set = set()
        self._lock = threading.RLock()
        self.fallback_sizes: Dict[WeightVector, int] = {}

    def enabled(self, rule: str) -> bool:
        return rule in self.config.rules

    # public
    def reduce(self, w: Sequence[int]) -> Tuple[HomologyProfile, ReductionTrace]:
        w = tuple(w)
        if len(w) <= 1:
            # the exterior algebra on no generators: Z in degree 0
            return HomologyProfile.free_class(0), ReductionTrace([], "Point")
        check_weight(w)
        cert = canonicalize(w, use_duality=self.enabled("duality"))
        prof, inner = self._solve(cert.canonical, 0, True)
        trace = ReductionTrace()
        if cert.canonical != w:
            desc = f"-> {','.join(map(str, cert.canonical))}" + (" (dual)" if cert.dualized else "")
            trace.steps.append(("canonicalize", w, desc, cert.degree_shift))
        trace.steps.extend(inner.steps)
        trace.terminal = inner.terminal
        return map_back(prof, cert.degree_shift, cert.dualized, len(w)), trace

    def profile(self, w: Sequence[int]) -> HomologyProfile:
        return self.reduce(w)[0]

    # internals
    def _solve(self, c: WeightVector, depth: int, allow_fallback: bool):
        with self._lock:
            hit = self.cache.get(c)
        if hit is not None:
            return hit
        self._busy.add(c)
        try:
            res = self._apply_rules(c, depth, allow_fallback)
        finally:
            self._busy.discard(c)
        if res is not None:
            with self._lock:
                self.cache.setdefault(c, res)
        return res

    def _candidates(self, c: WeightVector):
        """(vector, shift, dualized) with H[[c]] = map_back(H[[vector]], shift, dualized)."""
        out = [(v, s, False) for v, s, _ in alpha_beta_orbit(c)]
        if self.enabled("duality") and not is_permutation(c):
            out += [(v, s, True) for v, s, _ in alpha_beta_orbit(tuple(reversed(c)))]
        return out

    def _apply_rules(self, c: WeightVector, depth: int, allow_fallback: bool):
        n = len(c)
        trace = ReductionTrace()

        if is_permutation(c) and self.enabled("permutation"):
            trace.terminal = "Permutation"
            return HomologyProfile.free_class(inversion_count(c)), trace

        if self.enabled("strip") and (1 in c or n in c):
            v, s = strip_extremes(c)
            if not all(1 <= x <= n - 1 for x in v):
                # a second 1 or n: no wedge has this weight
                trace.steps.append(("strip", c, "empty", s))
                trace.terminal = "Acyclic(empty)"
                return HomologyProfile.zero(), trace
            prof, sub = self.reduce(v)
            trace.steps.append(("strip", c, f"-> {','.join(map(str, v))}", s))
            trace.steps.extend(sub.steps)
            trace.terminal = sub.terminal
            return prof.shifted(s), trace

        if self.enabled("triple") and rule_triple(c):
            trace.terminal = "Acyclic(triple)"
            return HomologyProfile.zero(), trace
        if self.enabled("adjacent") and rule_adjacent_pair(c):
            trace.terminal = "Acyclic(adjacent)"
            return HomologyProfile.zero(), trace

        cands = self._candidates(c)
        for rule, fn in (("cone_two_two", rule_cone_two_two), ("cone_33", rule_cone_33)):
            if not self.enabled(rule):
                continue
            for v, s, dual in cands:
                cone = fn(v)
                if cone is None:
                    continue
                prof = self._cone(cone)
                trace.steps.append((rule, v, f"cone x{cone.multiplier} on "
                                    f"{','.join(map(str, cone.inner))} shifted {cone.shift}"
                                    + (" (dual)" if dual else ""), s))
                trace.terminal = f"Cone({cone.multiplier}, {','.join(map(str, cone.inner))})"
                return map_back(prof, s, dual, n), trace

        if self.enabled("filtration"):
            v, s, dual = min(cands, key=lambda t: (t[0][0], t[0]))
            if all(self.profile(q).is_zero() for lst in filtration_split(v).values() for q, _ in lst):
                trace.steps.append(("filtration", v, "all quotients acyclic", s))
                trace.terminal = "Acyclic(filtration)"
                return HomologyProfile.zero(), trace

        limit = self.config.max_rotation_depth if self.config.max_rotation_depth is not None else n
        if self.enabled("rotate_second") and depth < limit:
            for v, s, dual in cands:
                got = rule_rotate_second(v)
                if got is None:
                    continue
                hyp, target, s2 = got
                cert = canonicalize(target, use_duality=self.enabled("duality"))
                if cert.canonical in self._busy:
                    continue
                if not self.profile(hyp).is_zero():
                    continue
                res = self._solve(cert.canonical, depth + 1, False)
                if res is None:
                    continue
                prof, sub = res
                prof = map_back(prof, cert.degree_shift, cert.dualized, n)
                trace.steps.append(("rotate_second", v, f"-> {','.join(map(str, target))}", s2))
                trace.steps.extend(sub.steps)
                trace.terminal = sub.terminal
                return map_back(prof.shifted(s2), s, dual, n), trace

        if not allow_fallback:
            return None
        size = len(summand_masks(c))
        if size > self.config.cap:
            raise ResourceLimitExceeded(
                f"summand {c} has {size} basis elements (cap {self.config.cap})", [c])
        self.fallback_sizes[c] = size
        trace.terminal = f"Direct-SNF({size})"
        return homology_profile(build_summand(c)), trace

    def _cone(self, cone: Cone) -> HomologyProfile:
        inner = self.profile(cone.inner)
        prof = cone_profile(inner, cone.multiplier)
        if prof is None:
            size = len(summand_masks(cone.inner))
            if 2 * size > self.config.cap:
                raise ResourceLimitExceeded(
                    f"cone over {cone.inner} needs {2 * size} basis elements", [cone.inner])
            prof = homology_profile(cone_of_scalar(build_summand(cone.inner), cone.multiplier))
        return prof.shifted(cone.shift)


def reduce_summand(w: Sequence[int], config: ReduceConfig | None = None,
                   reducer: Reducer | None = None) -> Tuple[HomologyProfile, ReductionTrace]:
    r = reducer if reducer is not None else Reducer(config)
    return r.reduce(w)
