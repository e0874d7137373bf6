"""Property suites run by ``nilhom verify`` and by the test-suite.

Each check yields a ``Check(name, ok, detail)``; ground truth for summand
homology is always direct Smith normal form of the explicit complex.
"""

from __future__ import annotations

import random
from collections import Counter
from dataclasses import dataclass
from functools import lru_cache
from math import factorial
from typing import Callable, Dict, Iterable, Iterator, List, Optional, Sequence, Tuple

from .assemble import NilTable, free_part, full_table, verify_against_paper
from .complex_core import build_summand, cone_of_scalar, summand_masks, summand_size, summand_size_count
from .homology import HomologyProfile, factor, homology_profile
from .reduce import (
    ReduceConfig,
    Reducer,
    cone_profile,
    filtration_split,
    rule_adjacent_pair,
    rule_cone_33,
    rule_cone_two_two,
    rule_rotate_second,
    rule_triple,
    strip_extremes,
)
from .weights import (
    enumerate_weights,
    is_permutation,
    reverse_beta,
    rotate_alpha,
    top_degree,
)


@dataclass(frozen=True)
class Check:
    name: str
    ok: bool
    detail: str = ""

    def line(self) -> str:
        return f"[{'PASS' if self.ok else 'FAIL'}] {self.name}" + (f": {self.detail}" if self.detail else "")


@lru_cache(maxsize=None)
def direct(w: Tuple[int, ...]) -> HomologyProfile:
    """Ground truth by Smith normal form; out-of-range vectors span nothing."""
    n = len(w)
    if not all(1 <= x <= n for x in w) or sum(w) != n * (n + 1) // 2:
        return HomologyProfile.zero()
    return homology_profile(build_summand(w))


# -- examples -------------------------------------------------------------------

def torsion_family(q: int) -> Tuple[Tuple[int, ...], HomologyProfile]:
    w = tuple(range(2, q + 2)) + (2, q + 1)
    return w, HomologyProfile.from_dict({q: (0, [q])})


Z8_WITNESS = (2, 4, 7, 5, 4, 2, 5, 7)


def examples_suite(reducer: Reducer | None = None) -> Iterator[Check]:
    r = reducer or Reducer()
    for q in (2, 3, 4, 5):
        w, want = torsion_family(q)
        got = direct(w)
        yield Check(f"Z_{q} family {w} direct", got == want, str(got))
        got = r.profile(w)
        yield Check(f"Z_{q} family {w} reducer", got == want, str(got))
    size = summand_size(Z8_WITNESS)
    yield Check("Z_8 witness basis size", size == 192, str(size))
    want = HomologyProfile.from_dict({10: (0, [8]), 11: (0, [8])})
    got = direct(Z8_WITNESS)
    yield Check("Z_8 witness direct", got == want, str(got))
    got = r.profile(Z8_WITNESS)
    yield Check("Z_8 witness reducer", got == want, str(got))
    w = (3, 3, 3, 3, 3)
    levels = filtration_split(w)
    top = levels[max(levels)]
    yield Check("(3,3,3,3,3) top filtration quotient", top == [((2, 2, 3, 3), 2)] and direct((2, 2, 3, 3)).is_zero(),
                str(top))
    yield Check("(3,3,3,3,3) acyclic", direct(w).is_zero() and r.profile(w).is_zero(), str(direct(w)))
    for w, want in [((2, 2, 2), HomologyProfile.zero()),
                    ((2, 3, 2, 3), HomologyProfile.from_dict({2: (0, [2])})),
                    ((3, 2, 3, 2), HomologyProfile.from_dict({3: (0, [2])}))]:
        got = direct(w)
        yield Check(f"summand {w}", got == want, str(got))


# -- lemma oracle -----------------------------------------------------------------

Predictor = Callable[[Tuple[int, ...]], Optional[Tuple[HomologyProfile, HomologyProfile]]]


def _lit_cone(inner: Tuple[int, ...], q: int, s: int) -> HomologyProfile:
    base = direct(inner)
    fast = cone_profile(base, q)
    lit = homology_profile(cone_of_scalar(build_summand(inner), q)) if summand_masks(inner) else HomologyProfile.zero()
    if fast is not None and fast != lit:
        raise AssertionError(f"cone transform disagrees with the literal cone on {inner}")
    return lit.shifted(s)


def _lemma_beta(w):
    return direct(reverse_beta(w)), direct(w)


def _lemma_alpha(w):
    v, s = rotate_alpha(w)
    return direct(v).shifted(s), direct(w)


def _lemma_strip(w):
    n = len(w)
    if 1 not in w and n not in w:
        return None
    v, s = strip_extremes(w)
    pred = direct(v).shifted(s) if all(1 <= x <= n - 1 for x in v) else HomologyProfile.zero()
    return pred, direct(w)


def _lemma_triple(w):
    return (HomologyProfile.zero(), direct(w)) if rule_triple(w) else None


def _lemma_adjacent(w):
    return (HomologyProfile.zero(), direct(w)) if rule_adjacent_pair(w) else None


def _lemma_rotate(w):
    got = rule_rotate_second(w)
    if got is None:
        return None
    hyp, target, s = got
    if not direct(hyp).is_zero():
        return None
    return direct(target).shifted(s), direct(w)


def _lemma_cone_33(w):
    c = rule_cone_33(w)
    return None if c is None else (_lit_cone(c.inner, c.multiplier, c.shift), direct(w))


def _lemma_cone_22(w):
    c = rule_cone_two_two(w)
    return None if c is None else (_lit_cone(c.inner, c.multiplier, c.shift), direct(w))


def _lemma_torsion_only(w):
    if is_permutation(w):
        return None
    got = direct(w)
    return HomologyProfile.from_dict({k: (0, t) for k, _, t in got.groups}), got


def _lemma_duality(w):
    if is_permutation(w):
        return None
    n = len(w)
    return direct(tuple(reversed(w))).dual_flip(top_degree(n)), direct(w)


def _lemma_filtration(w):
    """All filtration quotients acyclic forces an acyclic summand."""
    levels = filtration_split(w)
    if not all(direct(v).is_zero() for lst in levels.values() for v, _ in lst):
        return None
    return HomologyProfile.zero(), direct(w)


LEMMAS: Dict[str, Predictor] = {
    "complement-reverse": _lemma_beta,
    "rotation": _lemma_alpha,
    "strip": _lemma_strip,
    "triple": _lemma_triple,
    "adjacent pair": _lemma_adjacent,
    "conditional rotation": _lemma_rotate,
    "cone 3,3": _lemma_cone_33,
    "cone 2..2": _lemma_cone_22,
    "filtration": _lemma_filtration,
    "torsion only": _lemma_torsion_only,
    "duality": _lemma_duality,
}


def lemma_instances(name: str, ns: Sequence[int], samples: int, rng: random.Random,
                    spot: Sequence[int] = (), spot_samples: int = 20) -> Dict[int, List[Tuple[int, ...]]]:
    """Applicable vectors keyed by n.

    Up to ``samples`` come from S_n, n in ``ns``.  ``spot_samples`` extra
    checks come from the first n in ``spot``; any shortfall against
    ``samples`` is drawn from the ``spot`` sizes in order.
    """
    pred = LEMMAS[name]

    def draw(group, k):
        pool = [w for n in group for w in enumerate_weights(n)]
        rng.shuffle(pool)
        got = []
        for w in pool:
            if len(got) >= k:
                break
            if summand_size_count(w) <= 4000 and pred(w) is not None:
                got.append(w)
        return got

    main = draw(ns, samples)
    extra: List[Tuple[int, ...]] = []
    need = spot_samples + max(0, samples - len(main))
    for n in spot:
        if len(extra) >= need:
            break
        extra += draw([n], need - len(extra))
    out: Dict[int, List[Tuple[int, ...]]] = {}
    for w in main + extra:
        out.setdefault(len(w), []).append(w)
    return out


def lemma_suite(n_max: int = 5, samples: int = 200, seed: int = 0,
                spot_n: Sequence[int] = (6, 7), spot_samples: int = 20,
                names: Iterable[str] | None = None) -> Iterator[Check]:
    rng = random.Random(seed)
    ns = [n for n in range(4, n_max + 1)]
    for name in names or LEMMAS:
        inst = lemma_instances(name, ns, samples, rng, spot_n, spot_samples)
        bad = []
        for w in (w for ws in inst.values() for w in ws):
            pred, truth = LEMMAS[name](w)
            if pred != truth:
                bad.append(f"{w}: predicted {pred}, direct {truth}")
        total = sum(map(len, inst.values()))
        counts = ", ".join(f"n={n}: {len(v)}" for n, v in sorted(inst.items()))
        yield Check(f"lemma {name}", not bad and total >= samples,
                    f"{total} instances ({counts})" + (f"; {bad[0]}" if bad else ""))


# -- tables and structure -----------------------------------------------------------

def table_checks(table: NilTable) -> Iterator[Check]:
    n = table.n
    N = top_degree(n)
    free = {k: f for k, (f, _) in table.rows.items()}
    mahon = free_part(n)
    yield Check(f"n={n} free ranks are Mahonian", all(free.get(k, 0) == mahon[k] for k in range(N + 1)))
    yield Check(f"n={n} free ranks sum to n!", sum(free.values()) == factorial(n))
    tors = {k: Counter(t) for k, (_, t) in table.rows.items()}
    dual_ok = all(tors.get(k, Counter()) == tors.get(N - 1 - k, Counter()) for k in range(N))
    yield Check(f"n={n} torsion duality", dual_ok)
    primes = {p for c in tors.values() for q in c for p in factor(q)}
    yield Check(f"n={n} no p-torsion for p > n-2", all(p <= n - 2 for p in primes),
                f"primes {sorted(primes)}")


def tables_suite(n_max: int = 6, jobs: int = 1, config: ReduceConfig | None = None) -> Iterator[Check]:
    for n in range(2, n_max + 1):
        table = full_table(n, config=config, jobs=jobs)
        bad = verify_against_paper(table)
        yield Check(f"n={n} reference table", not bad, "; ".join(bad[:5]))
        yield from table_checks(table)


def structural_suite(n_max: int = 5) -> Iterator[Check]:
    """Square-zero boundaries, and torsion-only plus zero Euler characteristic off F_n."""
    from .complex_core import apply_boundary
    from .homology import euler_characteristic
    from .weights import weight_of
    from .complex_core import Monomial
    for n in range(2, n_max + 1):
        sq, weight, tor, euler = True, True, True, True
        for w in enumerate_weights(n):
            c = build_summand(w)
            sq &= c.is_complex()
            for k in c.degrees():
                for mono in c.bases[k]:
                    for m2 in apply_boundary({mono.mask: 1}, n):
                        weight &= weight_of(Monomial(n, m2), n) == w
            if not is_permutation(w):
                tor &= not direct(w).has_free()
                euler &= euler_characteristic(c) == 0
        yield Check(f"n={n} boundary squares to zero", sq)
        yield Check(f"n={n} boundary preserves weight", weight)
        yield Check(f"n={n} torsion-only off permutations", tor)
        yield Check(f"n={n} zero Euler characteristic off permutations", euler)
        built = _constructed_complexes(n)
        bad = [name for name, c in built if not c.is_complex()]
        yield Check(f"n={n} constructed complexes square to zero", not bad,
                    f"{len(built)} complexes" + (f"; first failure {bad[0]}" if bad else ""))


def _constructed_complexes(n: int) -> List[Tuple[str, "GradedComplex"]]:
    """Every cone, quotient and Morse reduction the engine builds at size n."""
    from .morse import PatternMismatch, matching_lemma_3_5, matching_two_two, quotient_two_three_three, reduce_by_matching
    out = []
    for w in enumerate_weights(n):
        if not summand_masks(w):
            continue
        c = build_summand(w)
        if w[:2] == (2, 2):
            out.append((f"matched {w}", reduce_by_matching(c, matching_two_two(c, w)).complex))
        if w[0] == 2 and 2 in w[1:]:
            k = w.index(2, 1) + 1
            try:
                res = matching_lemma_3_5(c, k, w)
            except PatternMismatch:
                pass
            else:
                out += [(f"second-two reduction {w}", res.reduced.complex), (f"second-two cone {w}", res.cone())]
        if w[:3] == (2, 3, 3) and n >= 4:
            q, _, red = quotient_two_three_three(c, w)
            out += [(f"quotient {w}", q), (f"reduced quotient {w}", red.complex)]
        for rule in (rule_cone_33, rule_cone_two_two):
            cn = rule(w)
            if cn is not None and summand_masks(cn.inner):
                out.append((f"{rule.__name__} {w}", cone_of_scalar(build_summand(cn.inner), cn.multiplier)))
    return out
