"""Exact integral homology of graded complexes via Smith normal form."""

from __future__ import annotations

import heapq
from collections import Counter
from dataclasses import dataclass
from functools import reduce
from math import gcd
from typing import Dict, Iterable, List, Mapping, Sequence, Tuple

from .complex_core import Column, GradedComplex, check_square_zero


class NotAComplex(ValueError):
    pass


# -- prime powers -------------------------------------------------------------

def factor(d: int) -> Dict[int, int]:
    d = abs(d)
    out: Dict[int, int] = {}
    p = 2
    while p * p <= d:
        while d % p == 0:
            out[p] = out.get(p, 0) + 1
            d //= p
        p += 1 if p == 2 else 2
    if d > 1:
        out[d] = out.get(d, 0) + 1
    return out


def prime_powers(d: int) -> List[int]:
    """Primary decomposition of Z_d: 12 -> [3, 4]."""
    return sorted(p ** m for p, m in factor(d).items())


def _pp_key(q: int) -> Tuple[int, int]:
    p = min(factor(q))
    return p, q


def invariant_factors(primary: Iterable[int]) -> List[int]:
    """Rebuild the divisibility chain d1 | d2 | ... from prime-power parts."""
    by_prime: Dict[int, List[int]] = {}
    for q in primary:
        if q > 1:
            by_prime.setdefault(min(factor(q)), []).append(q)
    if not by_prime:
        return []
    length = max(len(v) for v in by_prime.values())
    out = [1] * length
    for v in by_prime.values():
        v.sort()
        for i, q in enumerate(v):
            out[length - len(v) + i] *= q
    return out


# -- Smith normal form ----------------------------------------------------------

@dataclass(frozen=True)
class SnfResult:
    divisors: Tuple[int, ...]

    @property
    def rank(self) -> int:
        return len(self.divisors)

    def torsion(self) -> List[int]:
        return [d for d in self.divisors if d > 1]


def _diagonal_entries(cols: Sequence[Column], nrows: int) -> List[int]:
    """Absolute values of a diagonalization of the matrix (any order).

    Unit pivots are eliminated first with a Markowitz-style choice; the rest is
    handled by repeated division with remainder around a minimal pivot.
    """
    rows: Dict[int, Dict[int, int]] = {}
    colmap: Dict[int, Dict[int, int]] = {}
    for j, col in enumerate(cols):
        if col:
            colmap[j] = dict(col)
            for r, v in col.items():
                if r >= nrows:
                    raise ValueError("row index out of range")
                rows.setdefault(r, {})[j] = v
    diag: List[int] = []

    def set_entry(r, c, v):
        if v:
            rows.setdefault(r, {})[c] = v
            colmap.setdefault(c, {})[r] = v
        else:
            rr = rows.get(r)
            if rr is not None and c in rr:
                del rr[c]
                if not rr:
                    del rows[r]
            cc = colmap.get(c)
            if cc is not None and r in cc:
                del cc[r]
                if not cc:
                    del colmap[c]

    def drop_pivot(r, c):
        diag.append(abs(rows[r][c]))
        for c2 in list(rows[r]):
            set_entry(r, c2, 0)
        for r2 in list(colmap.get(c, ())):
            set_entry(r2, c, 0)

    def eliminate_unit(r, c):
        p = rows[r][c]
        prow = dict(rows[r])
        for r2 in list(colmap[c]):
            if r2 == r:
                continue
            f = colmap[c][r2] * p  # p = +-1 so 1/p = p
            r2row = rows[r2]
            for c2, v in prow.items():
                set_entry(r2, c2, r2row.get(c2, 0) - f * v)
        drop_pivot(r, c)

    # phase 1: unit pivots, cheapest columns first
    heap = [(len(v), c) for c, v in colmap.items()]
    heapq.heapify(heap)
    while heap:
        size, c = heapq.heappop(heap)
        col = colmap.get(c)
        if col is None or len(col) != size:
            if col is not None:
                heapq.heappush(heap, (len(col), c))
            continue
        best = None
        for r, v in col.items():
            if v == 1 or v == -1:
                cost = len(rows[r])
                if best is None or cost < best[0]:
                    best = (cost, r)
        if best is None:
            continue
        touched = set()
        for c2 in rows[best[1]]:
            touched.add(c2)
        eliminate_unit(best[1], c)
        for c2 in touched:
            if c2 in colmap:
                heapq.heappush(heap, (len(colmap[c2]), c2))

    # phase 2: general pivots
    while rows:
        r, c, p = min(((r, c, v) for r, rr in rows.items() for c, v in rr.items()),
                      key=lambda t: (abs(t[2]), len(rows[t[0]]) * len(colmap[t[1]])))
        while True:
            clean = True
            for r2 in list(colmap[c]):
                if r2 == r:
                    continue
                q = colmap[c][r2] // p
                if q:
                    prow = dict(rows[r])
                    r2row = rows[r2]
                    for c2, v in prow.items():
                        set_entry(r2, c2, r2row.get(c2, 0) - q * v)
                if r2 in colmap.get(c, {}):
                    clean = False
            for c2 in list(rows[r]):
                if c2 == c:
                    continue
                q = rows[r][c2] // p
                if q:
                    pcol = dict(colmap[c])
                    for r2, v in pcol.items():
                        set_entry(r2, c2, colmap.get(c2, {}).get(r2, 0) - q * v)
                if c2 in rows.get(r, {}):
                    clean = False
            if clean:
                break
            # a remainder survived: move the pivot to a smaller entry
            cand = [(r2, c, v) for r2, v in colmap[c].items() if r2 != r] + \
                   [(r, c2, v) for c2, v in rows[r].items() if c2 != c]
            r, c, p = min(cand, key=lambda t: abs(t[2]))
        drop_pivot(r, c)
    return diag


def smith_normal_form(cols: Sequence[Column], nrows: int | None = None) -> SnfResult:
    """Elementary divisors of a sparse matrix given as columns of {row: coeff}."""
    if nrows is None:
        nrows = 1 + max((r for col in cols for r in col), default=-1)
    diag = _diagonal_entries(cols, nrows)
    ones = sum(1 for d in diag if d == 1)
    primary = [q for d in diag if d > 1 for q in prime_powers(d)]
    chain = invariant_factors(primary)
    return SnfResult(tuple([1] * (len(diag) - len(chain)) + chain))


def dense_to_columns(m: Sequence[Sequence[int]]) -> List[Column]:
    if not m:
        return []
    return [{r: m[r][c] for r in range(len(m)) if m[r][c]} for c in range(len(m[0]))]


# -- homology profiles --------------------------------------------------------

@dataclass(frozen=True)
class HomologyProfile:
    """degree -> (free rank, sorted prime-power torsion orders); zero degrees omitted."""

    groups: Tuple[Tuple[int, int, Tuple[int, ...]], ...] = ()

    @classmethod
    def from_dict(cls, data: Mapping[int, Tuple[int, Iterable[int]]]) -> "HomologyProfile":
        items = []
        for k, (free, tors) in data.items():
            tors = tuple(sorted(tors, key=_pp_key))
            if free or tors:
                items.append((k, free, tors))
        return cls(tuple(sorted(items)))

    @classmethod
    def free_class(cls, degree: int) -> "HomologyProfile":
        return cls(((degree, 1, ()),))

    @classmethod
    def zero(cls) -> "HomologyProfile":
        return cls(())

    def as_dict(self) -> Dict[int, Tuple[int, Tuple[int, ...]]]:
        return {k: (f, t) for k, f, t in self.groups}

    def is_zero(self) -> bool:
        return not self.groups

    def has_free(self) -> bool:
        return any(f for _, f, _ in self.groups)

    def free_ranks(self) -> Dict[int, int]:
        return {k: f for k, f, _ in self.groups if f}

    def torsion(self) -> Dict[int, Tuple[int, ...]]:
        return {k: t for k, _, t in self.groups if t}

    def shifted(self, s: int) -> "HomologyProfile":
        return HomologyProfile(tuple((k + s, f, t) for k, f, t in self.groups))

    def dual_flip(self, top: int) -> "HomologyProfile":
        """Torsion at k moves to top - 1 - k (torsion-only profiles)."""
        if self.has_free():
            raise ValueError("degree flip is only defined for torsion profiles")
        return HomologyProfile.from_dict({top - 1 - k: (0, t) for k, _, t in self.groups})

    def __add__(self, other: "HomologyProfile") -> "HomologyProfile":
        acc: Dict[int, Tuple[int, list]] = {}
        for k, f, t in self.groups + other.groups:
            free, tors = acc.get(k, (0, []))
            acc[k] = (free + f, tors + list(t))
        return HomologyProfile.from_dict(acc)

    def scaled(self, count: int) -> "HomologyProfile":
        return HomologyProfile.from_dict({k: (f * count, list(t) * count) for k, f, t in self.groups})

    def single_free_degree(self) -> int | None:
        """Degree d when the profile is exactly one Z at d."""
        if len(self.groups) == 1 and self.groups[0][1] == 1 and not self.groups[0][2]:
            return self.groups[0][0]
        return None

    def grouped(self) -> Dict[int, Tuple[int, Dict[int, int]]]:
        """degree -> (free rank, {prime power: multiplicity})."""
        return {k: (f, dict(sorted(Counter(t).items(), key=lambda kv: _pp_key(kv[0]))))
                for k, f, t in self.groups}

    def format_degree(self, k: int) -> str:
        d = self.as_dict()
        if k not in d:
            return "0"
        return format_group(*d[k])

    def __str__(self):
        if not self.groups:
            return "0"
        return "; ".join(f"H_{k} = {format_group(f, t)}" for k, f, t in self.groups)


def format_group(free: int, torsion: Iterable[int]) -> str:
    parts = []
    if free:
        parts.append("Z" if free == 1 else f"Z^{free}")
    counts = Counter(torsion)
    for q in sorted(counts, key=_pp_key):
        c = counts[q]
        parts.append(f"Z_{q}" if c == 1 else f"Z_{q}^{c}")
    return " + ".join(parts) if parts else "0"


# -- complex reduction ----------------------------------------------------------

def _reduce_complex(c: GradedComplex) -> Tuple[Dict[int, int], Dict[int, List[Column]]]:
    """Cancel unit-weight pairs across the whole complex.

    Each cancellation (a in degree k-1, b in degree k, coefficient +-1) is a
    column-operation change of basis that leaves an acyclic pair; the
    neighbouring boundaries simply lose a row or a column.  Returns residual
    dimensions and residual boundary columns (rows relabelled densely).
    """
    degs = c.degrees()
    alive: Dict[int, set] = {k: set(range(c.dim(k))) for k in degs}
    mats: Dict[int, Dict[int, Dict[int, int]]] = {}
    for k in degs:
        mats[k] = {j: dict(col) for j, col in enumerate(c.boundary_matrix(k)) if col}

    for k in degs:
        cols = mats.get(k, {})
        if not cols:
            continue
        low = alive.get(k - 1, set())
        # rows already cancelled downward are gone
        for j in list(cols):
            col = cols[j]
            for r in [r for r in col if r not in low]:
                del col[r]
            if not col:
                del cols[j]
        rowidx: Dict[int, set] = {}
        for j, col in cols.items():
            for r in col:
                rowidx.setdefault(r, set()).add(j)
        heap = [(len(col), j) for j, col in cols.items()]
        heapq.heapify(heap)
        while heap:
            size, j = heapq.heappop(heap)
            col = cols.get(j)
            if col is None:
                continue
            if len(col) != size:
                heapq.heappush(heap, (len(col), j))
                continue
            best = None
            for r, v in col.items():
                if v == 1 or v == -1:
                    cost = len(rowidx[r])
                    if best is None or cost < best[0]:
                        best = (cost, r)
            if best is None:
                continue
            r = best[1]
            p = col[r]
            pivot = col
            for j2 in list(rowidx[r]):
                if j2 == j:
                    continue
                col2 = cols[j2]
                f = col2[r] * p
                for r2, v in pivot.items():
                    nv = col2.get(r2, 0) - f * v
                    if nv:
                        if r2 not in col2:
                            rowidx[r2].add(j2)
                        col2[r2] = nv
                    else:
                        if r2 in col2:
                            del col2[r2]
                            rowidx[r2].discard(j2)
                if not col2:
                    del cols[j2]
                else:
                    heapq.heappush(heap, (len(col2), j2))
            for r2 in pivot:
                rowidx[r2].discard(j)
            del cols[j]
            alive[k].discard(j)
            alive[k - 1].discard(r)
            rowidx.pop(r, None)

    dims = {k: len(alive[k]) for k in degs}
    residual: Dict[int, List[Column]] = {}
    relabel = {k: {old: new for new, old in enumerate(sorted(alive[k]))} for k in degs}
    for k in degs:
        lowmap = relabel.get(k - 1, {})
        out = []
        for j in sorted(alive[k]):
            col = mats.get(k, {}).get(j, {})
            out.append({lowmap[r]: v for r, v in col.items() if r in lowmap})
        residual[k] = out
    return dims, residual


def homology_profile(c: GradedComplex, check: bool = False) -> HomologyProfile:
    """Integral homology of c, in reported (shifted) degrees."""
    if check and not c.is_complex():
        raise NotAComplex("boundary does not square to zero")
    dims, residual = _reduce_complex(c)
    ranks: Dict[int, int] = {}
    tors: Dict[int, List[int]] = {}
    for k, cols in residual.items():
        if not any(cols):
            ranks[k] = 0
            continue
        snf = smith_normal_form(cols, dims.get(k - 1, 0))
        ranks[k] = snf.rank
        tors[k - 1] = [q for d in snf.torsion() for q in prime_powers(d)]
    data = {}
    for k in set(dims) | set(tors):
        free = dims.get(k, 0) - ranks.get(k, 0) - ranks.get(k + 1, 0)
        data[k + c.shift] = (free, tors.get(k, []))
    return HomologyProfile.from_dict(data)


def euler_characteristic(c: GradedComplex) -> int:
    return sum((-1) ** (k + c.shift) * c.dim(k) for k in c.degrees())


def rank_mod_p(cols: Sequence[Column], p: int = 2_147_483_629) -> int:
    """Rank over F_p; a lower bound for the rational rank."""
    pivots: Dict[int, Dict[int, int]] = {}
    rank = 0
    for col in cols:
        v = {r: x % p for r, x in col.items() if x % p}
        while v:
            r = max(v)
            if r not in pivots:
                inv = pow(v[r], -1, p)
                pivots[r] = {k: x * inv % p for k, x in v.items()}
                rank += 1
                break
            f = v[r]
            for k, x in pivots[r].items():
                nv = (v.get(k, 0) - f * x) % p
                if nv:
                    v[k] = nv
                else:
                    v.pop(k, None)
    return rank
