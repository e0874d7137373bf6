"""Chevalley-Eilenberg complex of the strictly upper-triangular Lie ring.

Monomials (wedges of generators e_ij) are stored as integer bitmasks over the
generators of nil_n, ordered lexicographically by (row, col).  A set bit at
index ``gen_index(i, j, n)`` means e_ij occurs in the wedge; iterating bits in
increasing order gives the canonical wedge order.

Sparse matrices are column-major: ``cols[c]`` is a dict ``{row: coeff}``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Tuple


class WeightSumMismatch(ValueError):
    pass


class EntryOutOfRange(ValueError):
    pass


class NotAChainMap(ValueError):
    pass


@dataclass(frozen=True, order=True)
class Generator:
    row: int
    col: int

    def __post_init__(self):
        if not (1 <= self.row < self.col):
            raise ValueError(f"invalid generator e{self.row}{self.col}")

    def __repr__(self):
        return f"e{self.row}{self.col}" if self.col < 10 else f"e{self.row},{self.col}"


def bracket(a: Generator, b: Generator) -> Optional[Tuple[int, Generator]]:
    """Lie bracket [a, b] of two matrix units, as (sign, generator) or None."""
    if a.col == b.row:
        return 1, Generator(a.row, b.col)
    if a.row == b.col:
        return -1, Generator(b.row, a.col)
    return None


# -- generator indexing -----------------------------------------------------

@lru_cache(maxsize=None)
def generators(n: int) -> Tuple[Tuple[int, int], ...]:
    """All (row, col) pairs of nil_n in canonical (lexicographic) order."""
    return tuple((i, j) for i in range(1, n) for j in range(i + 1, n + 1))


@lru_cache(maxsize=None)
def _index_table(n: int) -> Dict[Tuple[int, int], int]:
    return {g: k for k, g in enumerate(generators(n))}


def gen_index(i: int, j: int, n: int) -> int:
    return _index_table(n)[(i, j)]


@lru_cache(maxsize=None)
def _bracket_table(n: int):
    # for each generator index: list of (other index, result index) with
    # (a,b),(b,c) -> (a,c); only the "left" factor lists its partners
    idx = _index_table(n)
    table = []
    for (a, b) in generators(n):
        table.append(tuple((idx[(b, c)], idx[(a, c)]) for c in range(b + 1, n + 1)))
    return tuple(table)


def mask_from_pairs(pairs: Iterable[Tuple[int, int]], n: int) -> int:
    m = 0
    for i, j in pairs:
        m |= 1 << gen_index(i, j, n)
    return m


def pairs_from_mask(mask: int, n: int) -> List[Tuple[int, int]]:
    gens = generators(n)
    out = []
    k = 0
    while mask:
        if mask & 1:
            out.append(gens[k])
        mask >>= 1
        k += 1
    return out


def _bits(mask: int) -> Iterator[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


@dataclass(frozen=True)
class Monomial:
    """A wedge e_{a1 b1} ... e_{ak bk} in canonical order, for ambient n."""

    n: int
    mask: int

    @classmethod
    def from_pairs(cls, pairs: Iterable[Tuple[int, int]], n: int) -> "Monomial":
        pairs = list(pairs)
        if len(set(pairs)) != len(pairs):
            raise ValueError("repeated generator in wedge")
        return cls(n, mask_from_pairs(pairs, n))

    @property
    def gens(self) -> List[Generator]:
        return [Generator(i, j) for i, j in pairs_from_mask(self.mask, self.n)]

    def pairs(self) -> List[Tuple[int, int]]:
        return pairs_from_mask(self.mask, self.n)

    def degree(self) -> int:
        return self.mask.bit_count()

    def __repr__(self):
        if not self.mask:
            return "1"
        return "".join(repr(g) for g in self.gens)


def wedge(pairs: Sequence[Tuple[int, int]], n: int) -> Tuple[int, Optional[Monomial]]:
    """Wedge generators given in arbitrary order; returns (sign, monomial).

    A repeated generator gives (0, None).
    """
    idx = [gen_index(i, j, n) for i, j in pairs]
    if len(set(idx)) != len(idx):
        return 0, None
    inversions = sum(1 for p in range(len(idx)) for q in range(p + 1, len(idx)) if idx[p] > idx[q])
    mask = 0
    for k in idx:
        mask |= 1 << k
    return (-1) ** inversions, Monomial(n, mask)


def boundary_mask(mask: int, n: int) -> Dict[int, int]:
    """Boundary of a wedge (given as bitmask) as {mask: coefficient}.

    In canonical order a nonzero bracket [g_p, g_q] with p < q is always
    [e_ab, e_bc] = e_ac, so only those pairs are visited.
    """
    table = _bracket_table(n)
    out: Dict[int, int] = {}
    positions = {}
    pos = 0
    for k in _bits(mask):
        positions[k] = pos
        pos += 1
    for p_idx, p in positions.items():
        for q_idx, r_idx in table[p_idx]:
            q = positions.get(q_idx)
            if q is None or (mask >> r_idx) & 1:
                continue
            rest = mask & ~(1 << p_idx) & ~(1 << q_idx)
            # insert the bracket at its sorted position among the survivors
            before = (rest & ((1 << r_idx) - 1)).bit_count()
            sign = -1 if (p + q + before) & 1 else 1
            new = rest | (1 << r_idx)
            c = out.get(new, 0) + sign
            if c:
                out[new] = c
            else:
                del out[new]
    return out


def boundary(m: Monomial) -> Dict[Monomial, int]:
    """Chevalley-Eilenberg boundary of a monomial as a formal sum."""
    return {Monomial(m.n, k): v for k, v in boundary_mask(m.mask, m.n).items()}


def apply_boundary(terms: Dict[int, int], n: int) -> Dict[int, int]:
    """Extend the boundary linearly to a formal sum of masks."""
    out: Dict[int, int] = {}
    for mask, coeff in terms.items():
        for k, v in boundary_mask(mask, n).items():
            c = out.get(k, 0) + coeff * v
            if c:
                out[k] = c
            else:
                out.pop(k, None)
    return out


# -- summand enumeration ----------------------------------------------------

def check_weight(w: Sequence[int]) -> None:
    n = len(w)
    for x in w:
        if not 1 <= x <= n:
            raise EntryOutOfRange(f"entry {x} outside 1..{n} in {tuple(w)}")
    if sum(w) != n * (n + 1) // 2:
        raise WeightSumMismatch(f"{tuple(w)} sums to {sum(w)}, expected {n * (n + 1) // 2}")


def _combinations_masks(cols: List[int], size: int) -> Iterator[Tuple[int, ...]]:
    from itertools import combinations
    return combinations(cols, size)


def summand_masks(w: Sequence[int]) -> List[int]:
    """All wedges of modified weight w, as bitmasks (in enumeration order).

    Row i must contribute exactly w_i - i + (#times i is already a column)
    generators; column counts are pruned against their feasible range.
    """
    w = tuple(w)
    check_weight(w)
    n = len(w)
    idx = _index_table(n)
    # in_j must end in [lo_j, hi_j]
    lo = [0] * (n + 1)
    hi = [0] * (n + 1)
    for j in range(1, n + 1):
        lo[j] = max(0, j - w[j - 1])
        hi[j] = min(j - 1, n - w[j - 1])
        if lo[j] > hi[j]:
            return []
    incount = [0] * (n + 2)
    out: List[int] = []

    def rec(i: int, mask: int):
        if i == n:
            if n - incount[n] == w[n - 1]:
                out.append(mask)
            return
        size = w[i - 1] - i + incount[i]
        cand = list(range(i + 1, n + 1))
        if size < 0 or size > len(cand):
            return
        for chosen in _combinations_masks(cand, size):
            ok = True
            for c in chosen:
                incount[c] += 1
            # every column j > i must still be able to reach its range
            for j in range(i + 1, n + 1):
                cj = incount[j]
                if cj > hi[j] or cj + (j - 1 - i) < lo[j]:
                    ok = False
                    break
            if ok:
                m = mask
                for c in chosen:
                    m |= 1 << idx[(i, c)]
                rec(i + 1, m)
            for c in chosen:
                incount[c] -= 1

    rec(1, 0)
    return out


# -- graded complexes ---------------------------------------------------------

Column = Dict[int, int]


@dataclass
class GradedComplex:
    """Per-degree bases and sparse boundary matrices.

    ``boundaries[k]`` maps degree k to degree k-1, stored as a list of
    columns (one per basis element of degree k), each ``{row: coeff}``.
    Reported degree of internal degree k is ``k + shift``.
    """

    bases: Dict[int, list] = field(default_factory=dict)
    boundaries: Dict[int, List[Column]] = field(default_factory=dict)
    shift: int = 0

    def degrees(self) -> List[int]:
        return sorted(k for k, b in self.bases.items() if b)

    def dim(self, k: int) -> int:
        return len(self.bases.get(k, ()))

    def total_dim(self) -> int:
        return sum(len(b) for b in self.bases.values())

    def boundary_matrix(self, k: int) -> List[Column]:
        """Columns of the boundary out of internal degree k."""
        got = self.boundaries.get(k)
        if got is None:
            return [{} for _ in range(self.dim(k))]
        return got

    def reported(self, k: int) -> int:
        return k + self.shift

    def is_complex(self) -> bool:
        for k in self.degrees():
            if not check_square_zero(self.boundary_matrix(k - 1), self.boundary_matrix(k)):
                return False
        return True

    def dense(self, k: int) -> List[List[int]]:
        rows = self.dim(k - 1)
        cols = self.boundary_matrix(k)
        return [[col.get(r, 0) for col in cols] for r in range(rows)]


def check_square_zero(lower: List[Column], upper: List[Column]) -> bool:
    """True when lower . upper == 0 (lower: k-1 -> k-2, upper: k -> k-1)."""
    for col in upper:
        acc: Dict[int, int] = {}
        for r, v in col.items():
            if r >= len(lower):
                return False
            for r2, v2 in lower[r].items():
                acc[r2] = acc.get(r2, 0) + v * v2
        if any(acc.values()):
            return False
    return True


def complex_from_masks(masks: Iterable[int], n: int) -> GradedComplex:
    """Assemble a GradedComplex from a boundary-closed family of wedges."""
    by_deg: Dict[int, List[int]] = {}
    for m in masks:
        by_deg.setdefault(m.bit_count(), []).append(m)
    for lst in by_deg.values():
        lst.sort()
    position = {k: {m: p for p, m in enumerate(lst)} for k, lst in by_deg.items()}
    boundaries: Dict[int, List[Column]] = {}
    for k, lst in by_deg.items():
        if k == 0:
            continue
        below = position.get(k - 1, {})
        cols = []
        for m in lst:
            col = {}
            for t, v in boundary_mask(m, n).items():
                col[below[t]] = v
            cols.append(col)
        boundaries[k] = cols
    bases = {k: [Monomial(n, m) for m in lst] for k, lst in by_deg.items()}
    return GradedComplex(bases, boundaries, 0)


def build_summand(w: Sequence[int]) -> GradedComplex:
    """The direct summand [[w]] of the Chevalley-Eilenberg complex."""
    w = tuple(w)
    return complex_from_masks(summand_masks(w), len(w))


def summand_size(w: Sequence[int]) -> int:
    return len(summand_masks(w))


def summand_size_count(w: Sequence[int]) -> int:
    """Number of wedges of weight w, counted without enumerating them."""
    from itertools import combinations
    w = tuple(w)
    check_weight(w)
    n = len(w)
    lo = [max(0, j - w[j - 1]) for j in range(1, n + 1)]
    hi = [min(j - 1, n - w[j - 1]) for j in range(1, n + 1)]
    if any(a > b for a, b in zip(lo, hi)):
        return 0

    @lru_cache(maxsize=None)
    def count(i: int, incounts: Tuple[int, ...]) -> int:
        # incounts[m] is the column count of column i + m
        if i == n:
            return 1 if n - incounts[0] == w[n - 1] else 0
        size = w[i - 1] - i + incounts[0]
        later = incounts[1:]
        if size < 0 or size > len(later):
            return 0
        total = 0
        for chosen in combinations(range(len(later)), size):
            nxt = list(later)
            for c in chosen:
                nxt[c] += 1
            ok = True
            for m, cj in enumerate(nxt):
                j = i + 1 + m
                if cj > hi[j - 1] or cj + (j - 1 - i) < lo[j - 1]:
                    ok = False
                    break
            if ok:
                total += count(i + 1, tuple(nxt))
        return total

    return count(1, (0,) * n)


# -- complex plumbing -------------------------------------------------------

def shift(c: GradedComplex, k: int) -> GradedComplex:
    return GradedComplex(c.bases, c.boundaries, c.shift + k)


def _normalize(c: GradedComplex) -> GradedComplex:
    """Fold the shift into the internal degrees."""
    if c.shift == 0:
        return c
    s = c.shift
    return GradedComplex({k + s: b for k, b in c.bases.items()},
                         {k + s: b for k, b in c.boundaries.items()}, 0)


def direct_sum(cs: Sequence[GradedComplex]) -> GradedComplex:
    bases: Dict[int, list] = {}
    boundaries: Dict[int, List[Column]] = {}
    for c in map(_normalize, cs):
        for k in c.degrees():
            off_row = len(bases.get(k - 1, ()))
            cols = boundaries.setdefault(k, [])
            # pad columns for degrees k that had no boundary yet
            while len(cols) < len(bases.get(k, ())):
                cols.append({})
            for col in c.boundary_matrix(k):
                cols.append({r + off_row: v for r, v in col.items()})
        for k in c.degrees():
            bases.setdefault(k, []).extend(c.bases[k])
    return GradedComplex(bases, boundaries, 0)


ChainMap = Dict[int, List[Column]]


def scalar_map(c: GradedComplex, q: int) -> ChainMap:
    """Multiplication by q on c, as per-degree column lists (internal degrees)."""
    return {k: [{p: q} for p in range(c.dim(k))] for k in c.degrees()}


def check_chain_map(src: GradedComplex, dst: GradedComplex, f: ChainMap) -> bool:
    """f_{k-1} . d_src = d_dst . f_k, with both complexes in internal degrees."""
    degs = set(src.degrees()) | set(dst.degrees())
    for k in degs:
        fk = f.get(k, [{} for _ in range(src.dim(k))])
        fk1 = f.get(k - 1, [{} for _ in range(src.dim(k - 1))])
        for j, col in enumerate(src.boundary_matrix(k)):
            lhs: Dict[int, int] = {}
            for r, v in col.items():
                for r2, v2 in fk1[r].items():
                    lhs[r2] = lhs.get(r2, 0) + v * v2
            rhs: Dict[int, int] = {}
            dst_cols = dst.boundary_matrix(k)
            for r, v in fk[j].items():
                for r2, v2 in dst_cols[r].items():
                    rhs[r2] = rhs.get(r2, 0) + v * v2
            keys = set(lhs) | set(rhs)
            if any(lhs.get(x, 0) != rhs.get(x, 0) for x in keys):
                return False
    return True


def cone(src: GradedComplex, dst: GradedComplex, f: ChainMap,
         check: bool = True) -> GradedComplex:
    """Mapping cone D_m = B_{m-1} (+) C_m, d(b, c) = (d b, f(b) - d c).

    Both complexes must share the same shift; f is given in internal degrees.
    Basis labels are ("b", x) and ("c", y).
    """
    if src.shift != dst.shift:
        raise ValueError("cone needs equal shifts; apply shift() first")
    if check and not check_chain_map(src, dst, f):
        raise NotAChainMap("map does not commute with the boundaries")
    degs = sorted(set(k + 1 for k in src.degrees()) | set(dst.degrees()))
    bases: Dict[int, list] = {}
    boundaries: Dict[int, List[Column]] = {}
    for m in degs:
        bases[m] = [("b", x) for x in src.bases.get(m - 1, ())] + \
                   [("c", y) for y in dst.bases.get(m, ())]
    for m in degs:
        nb_low = src.dim(m - 2)  # b-part size in degree m-1
        cols: List[Column] = []
        fm = f.get(m - 1, [{} for _ in range(src.dim(m - 1))])
        for j, col in enumerate(src.boundary_matrix(m - 1)):
            new = {r: v for r, v in col.items()}
            for r, v in fm[j].items():
                new[nb_low + r] = new.get(nb_low + r, 0) + v
            cols.append({r: v for r, v in new.items() if v})
        for col in dst.boundary_matrix(m):
            cols.append({nb_low + r: -v for r, v in col.items()})
        boundaries[m] = cols
    return GradedComplex(bases, boundaries, src.shift)


def cone_of_scalar(c: GradedComplex, q: int) -> GradedComplex:
    return cone(c, c, scalar_map(c, q), check=False)


def subcomplex(c: GradedComplex, keep: Dict[int, Sequence[int]]) -> GradedComplex:
    """Restrict to the given basis positions (caller guarantees closure)."""
    bases = {}
    boundaries = {}
    new_pos = {k: {old: p for p, old in enumerate(sorted(keep.get(k, ())))} for k in c.degrees()}
    for k in c.degrees():
        idx = sorted(keep.get(k, ()))
        bases[k] = [c.bases[k][i] for i in idx]
        below = new_pos.get(k - 1, {})
        cols = []
        bm = c.boundary_matrix(k)
        for i in idx:
            col = {}
            for r, v in bm[i].items():
                if r not in below:
                    raise ValueError("kept elements are not closed under the boundary")
                col[below[r]] = v
            cols.append(col)
        boundaries[k] = cols
    return GradedComplex(bases, boundaries, c.shift)


def quotient(c: GradedComplex, drop: Dict[int, Sequence[int]]) -> GradedComplex:
    """Quotient by the subcomplex spanned by ``drop`` (rows are discarded)."""
    bases = {}
    boundaries = {}
    gone = {k: set(v) for k, v in drop.items()}
    keep = {k: [i for i in range(c.dim(k)) if i not in gone.get(k, ())] for k in c.degrees()}
    new_pos = {k: {old: p for p, old in enumerate(v)} for k, v in keep.items()}
    for k in c.degrees():
        bases[k] = [c.bases[k][i] for i in keep[k]]
        below = new_pos.get(k - 1, {})
        bm = c.boundary_matrix(k)
        boundaries[k] = [{below[r]: v for r, v in bm[i].items() if r in below} for i in keep[k]]
    return GradedComplex(bases, boundaries, c.shift)
