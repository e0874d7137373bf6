"""Homology of nil_n assembled from its weight summands."""

from __future__ import annotations

import json
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations
from importlib import resources
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple

from .complex_core import Monomial, mask_from_pairs, wedge
from .homology import HomologyProfile, factor, format_group
from .reduce import Reducer, ReduceConfig, ResourceLimitExceeded, map_back, rule_cone_33, rule_cone_two_two
from .weights import (
    OrbitCertificate,
    WeightVector,
    alpha_beta_orbit,
    canonicalize,
    enumerate_weights,
    in_reduced_torsion_set,
    inversions,
    is_permutation,
    top_degree,
    weight_of,
)


class UnknownN(ValueError):
    pass


# -- free part ----------------------------------------------------------------

@lru_cache(maxsize=None)
def mahonian(n: int, k: int) -> int:
    """Permutations of [n] with exactly k inversions."""
    if k < 0 or k > n * (n - 1) // 2:
        return 0
    if n <= 1:
        return 1 if k == 0 else 0
    return sum(mahonian(n - 1, k - j) for j in range(min(k, n - 1) + 1))


def free_part(n: int) -> Dict[int, int]:
    return {k: mahonian(n, k) for k in range(top_degree(n) + 1)}


# -- tables -------------------------------------------------------------------

@dataclass
class NilTable:
    n: int
    rows: Dict[int, Tuple[int, Tuple[int, ...]]]
    provenance: List[dict] = field(default_factory=list)
    meta: dict = field(default_factory=dict)

    def profile(self) -> HomologyProfile:
        return HomologyProfile.from_dict(self.rows)

    def torsion(self) -> Dict[int, Counter]:
        return {k: Counter(t) for k, (_, t) in self.rows.items() if t}

    def to_json(self) -> dict:
        rows = []
        for k in range(top_degree(self.n) + 1):
            free, tors = self.rows.get(k, (0, ()))
            counts = Counter(tors)
            rows.append({
                "degree": k,
                "free_rank": free,
                "torsion": [{"prime": min(factor(q)), "power": q, "count": counts[q]}
                            for q in sorted(counts, key=lambda q: (min(factor(q)), q))],
            })
        return {"n": self.n, "rows": rows, "meta": self.meta}

    @classmethod
    def from_json(cls, data: dict) -> "NilTable":
        rows = {}
        for r in data["rows"]:
            tors = []
            for t in r["torsion"]:
                tors += [t["power"]] * t["count"]
            rows[r["degree"]] = (r["free_rank"], tuple(tors))
        return cls(data["n"], rows, meta=data.get("meta", {}))

    def to_text(self) -> str:
        lines = [f"k \\ n   {self.n}"]
        for k in range(top_degree(self.n) + 1):
            free, tors = self.rows.get(k, (0, ()))
            lines.append(f"{k:>5}   {format_group(free, tors)}")
        return "\n".join(lines)


def torsion_classes(n: int) -> Dict[WeightVector, List[OrbitCertificate]]:
    """Group every torsion weight vector of S_n by canonical representative."""
    out: Dict[WeightVector, List[OrbitCertificate]] = {}
    for w in enumerate_weights(n):
        if is_permutation(w):
            continue
        cert = canonicalize(w)
        out.setdefault(cert.canonical, []).append(cert)
    return out


def reduced_classes(n: int) -> List[WeightVector]:
    """Canonical representatives of the classes that no syntactic rule removes."""
    return sorted(c for c in torsion_classes(n) if in_reduced_torsion_set(c))


def _syntactically_resolved(c: WeightVector) -> bool:
    for v, _, _ in alpha_beta_orbit(c) + alpha_beta_orbit(tuple(reversed(c))):
        if rule_cone_two_two(v) or rule_cone_33(v):
            return True
    return False


def central_vectors(n: int) -> List[WeightVector]:
    """Canonical T~ vectors with every entry in {floor((n+1)/2), ceil((n+1)/2)}.

    These carry the largest summands, so they are checked before a full scan.
    """
    lo, hi = n // 2 + (n % 2), (n + 2) // 2
    if lo == hi:
        cand = [(lo,) * n]
    else:
        cand = [tuple(hi if i in pos else lo for i in range(n))
                for pos in map(set, combinations(range(n), n * (n + 1) // 2 - lo * n))]
    out = set()
    for w in cand:
        c = canonicalize(w).canonical
        if in_reduced_torsion_set(c):
            out.add(c)
    return sorted(out)


def preflight(n: int, cap: int) -> List[Tuple[WeightVector, int]]:
    """Classes whose summand exceeds the cap with no syntactic rule to split it.

    Central vectors go first; if one of them is over the cap the scan stops
    there.  The answer is conservative: the filtration or rotation rules may
    still settle a listed class.
    """
    from .complex_core import summand_size_count
    over = []
    for c in central_vectors(n):
        if not _syntactically_resolved(c):
            size = summand_size_count(c)
            if size > cap:
                over.append((c, size))
    if over:
        return over
    for c in reduced_classes(n):
        if _syntactically_resolved(c):
            continue
        size = summand_size_count(c)
        if size > cap:
            over.append((c, size))
    return over


_worker: Optional[Reducer] = None


def _init_worker(config: ReduceConfig):
    global _worker
    _worker = Reducer(config)


def _work(c: WeightVector):
    try:
        prof, trace = _worker.reduce(c)
        return c, prof, trace.summary(), None
    except ResourceLimitExceeded as e:
        return c, None, None, str(e)


def full_table(n: int, config: ReduceConfig | None = None, jobs: int = 1,
               reducer: Reducer | None = None, store=None,
               progress: Callable[[int, int], None] | None = None,
               check_cap: bool = True) -> NilTable:
    """Free part from Mahonian numbers, torsion summed over canonical classes.

    ``store`` (optional) caches class profiles across runs; it needs
    ``get(c) -> (HomologyProfile, summary) | None`` and ``put(c, profile, summary)``.
    """
    config = config or ReduceConfig()
    if n < 2:
        raise ValueError("n must be at least 2")
    if check_cap:
        over = preflight(n, config.cap)
        if over:
            raise ResourceLimitExceeded(
                f"{len(over)} classes exceed the cap of {config.cap} basis elements",
                [c for c, _ in over])
    classes = torsion_classes(n)
    todo = sorted(classes)
    results: Dict[WeightVector, Tuple[HomologyProfile, str]] = {}
    pending = []
    for c in todo:
        got = store.get(c) if store is not None else None
        if got is not None:
            results[c] = got
        else:
            pending.append(c)
    failures: List[Tuple[WeightVector, str]] = []
    done = len(results)
    if jobs > 1 and len(pending) > 1:
        with ProcessPoolExecutor(jobs, initializer=_init_worker, initargs=(config,)) as ex:
            for c, prof, summary, err in ex.map(_work, pending, chunksize=8):
                done += 1
                if err:
                    failures.append((c, err))
                else:
                    results[c] = (prof, summary)
                    if store is not None:
                        store.put(c, prof, summary)
                if progress:
                    progress(done, len(todo))
    else:
        r = reducer or Reducer(config)
        for c in pending:
            try:
                prof, trace = r.reduce(c)
            except ResourceLimitExceeded as e:
                failures.append((c, str(e)))
            else:
                results[c] = (prof, trace.summary())
                if store is not None:
                    store.put(c, prof, trace.summary())
            done += 1
            if progress:
                progress(done, len(todo))
    if failures:
        raise ResourceLimitExceeded(
            f"{len(failures)} classes unfinished", [c for c, _ in failures])

    acc: Dict[int, Tuple[int, List[int]]] = {k: (r, []) for k, r in free_part(n).items()}
    provenance = []
    for c in todo:
        prof, summary = results[c]
        members = classes[c]
        total = HomologyProfile.zero()
        for cert in members:
            total = total + map_back(prof, cert.degree_shift, cert.dualized, n)
        for k, f, t in total.groups:
            free, tors = acc.setdefault(k, (0, []))
            acc[k] = (free + f, tors + list(t))
        if not prof.is_zero():
            provenance.append({"canonical": list(c), "orbit_size": len(members),
                               "profile": str(prof), "rule": summary})
    rows = {k: (f, tuple(sorted(t, key=lambda q: (min(factor(q)), q)))) for k, (f, t) in acc.items()}
    meta = {"classes": len(todo), "reduced_classes": sum(1 for c in todo if in_reduced_torsion_set(c))}
    return NilTable(n, rows, provenance, meta)


# -- reference tables -----------------------------------------------------

@lru_cache(maxsize=None)
def _reference_data() -> dict:
    with resources.files("nilhom").joinpath("data/reference_tables.json").open() as fh:
        return json.load(fh)


def reference_table(n: int) -> NilTable:
    data = _reference_data()["tables"]
    if str(n) not in data:
        raise UnknownN(f"no reference table for n={n}")
    rows = {}
    for r in data[str(n)]:
        tors = []
        for t in r["torsion"]:
            tors += [t["order"]] * t["count"]
        rows[r["degree"]] = (r["free_rank"], tuple(tors))
    return NilTable(n, rows)


def verify_against_paper(table: NilTable) -> List[str]:
    """Mismatch descriptions; an empty list means exact agreement."""
    ref = reference_table(table.n)
    out = []
    for k in range(top_degree(table.n) + 1):
        f1, t1 = table.rows.get(k, (0, ()))
        f2, t2 = ref.rows.get(k, (0, ()))
        if f1 != f2:
            out.append(f"H_{k}: free rank {f1}, expected {f2}")
        c1, c2 = Counter(t1), Counter(t2)
        for q in sorted(set(c1) | set(c2)):
            if c1[q] != c2[q]:
                out.append(f"H_{k}: Z_{q} multiplicity {c1[q]}, expected {c2[q]}")
    return out


# -- rational cup products ------------------------------------------------------

@dataclass(frozen=True)
class CupClass:
    """sign * x_perm, or the zero class (perm None)."""

    perm: Optional[Tuple[int, ...]]
    sign: int = 1

    @property
    def is_zero(self) -> bool:
        return self.perm is None

    def __repr__(self):
        if self.perm is None:
            return "0"
        return f"{'-' if self.sign < 0 else ''}x{self.perm}"


ZERO = CupClass(None, 0)


def _perm_of_mask(mask: int, n: int) -> Optional[Tuple[int, ...]]:
    w = weight_of(Monomial(n, mask), n)
    return w if is_permutation(w) else None


def cup_product(p: Sequence[int], q: Sequence[int]) -> CupClass:
    """x_p cup x_q in rational cohomology, via the wedge of inversion sets."""
    n = len(p)
    if len(q) != n:
        raise ValueError("permutations of different sizes")
    ip, iq = inversions(p), inversions(q)
    if set(ip) & set(iq):
        return ZERO
    sign, mono = wedge(ip + iq, n)
    sigma = _perm_of_mask(mono.mask, n)
    if sigma is None:
        return ZERO
    return CupClass(sigma, sign)


def cup_classes(a: CupClass, b: CupClass) -> CupClass:
    if a.is_zero or b.is_zero:
        return ZERO
    c = cup_product(a.perm, b.perm)
    if c.is_zero:
        return ZERO
    return CupClass(c.perm, c.sign * a.sign * b.sign)
