"""Algebraic Morse theory on graded complexes.

A matching pairs basis elements across adjacent degrees along boundary
entries of weight +-1.  Reversing matched edges must leave every
adjacent-degree layer acyclic; the complex then reduces to the unmatched
(critical) elements with a boundary summed over zig-zag paths.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Set, Tuple

from .complex_core import Column, GradedComplex, cone, gen_index, quotient, subcomplex
from .weights import weight_of


class MatchingError(ValueError):
    pass


class NonInvertibleEdge(MatchingError):
    pass


class DirectedCycle(MatchingError):
    pass


class PatternMismatch(ValueError):
    pass


@dataclass(frozen=True)
class Matching:
    """Pairs (k, upper, lower): upper is basis index in internal degree k,
    lower is basis index in degree k - 1."""

    pairs: FrozenSet[Tuple[int, int, int]] = frozenset()

    @classmethod
    def of(cls, pairs: Iterable[Tuple[int, int, int]]) -> "Matching":
        return cls(frozenset(pairs))

    def __len__(self):
        return len(self.pairs)


@dataclass
class ReducedComplex:
    complex: GradedComplex
    matching: Matching
    critical: Dict[int, List[int]]  # original basis indices kept, per degree


def _layer_edges(c: GradedComplex, k: int, up: Dict[int, int]):
    """Adjacency of the layer (k, k-1) with matched edges reversed.

    Vertices are ("u", j) for degree k and ("l", r) for degree k - 1.
    """
    adj: Dict[tuple, List[tuple]] = {}
    for j, col in enumerate(c.boundary_matrix(k)):
        for r in col:
            if up.get(j) == r:
                adj.setdefault(("l", r), []).append(("u", j))
            else:
                adj.setdefault(("u", j), []).append(("l", r))
    return adj


def validate_matching(c: GradedComplex, m: Matching) -> None:
    """Raise NonInvertibleEdge or DirectedCycle; return None when m is Morse."""
    seen: Set[Tuple[int, int]] = set()
    for k, u, l in sorted(m.pairs):
        for key in ((k, u), (k - 1, l)):
            if key in seen:
                raise MatchingError(f"basis element {key} matched twice")
            seen.add(key)
        bm = c.boundary_matrix(k)
        if u >= len(bm):
            raise MatchingError(f"no element {u} in degree {k}")
        v = bm[u].get(l, 0)
        if v not in (1, -1):
            raise NonInvertibleEdge(f"edge {u}->{l} in degree {k} has weight {v}")
    by_layer: Dict[int, Dict[int, int]] = {}
    for k, u, l in m.pairs:
        by_layer.setdefault(k, {})[u] = l
    for k, up in by_layer.items():
        adj = _layer_edges(c, k, up)
        indeg: Dict[tuple, int] = {}
        for src, dsts in adj.items():
            indeg.setdefault(src, 0)
            for d in dsts:
                indeg[d] = indeg.get(d, 0) + 1
        queue = deque(v for v, d in indeg.items() if d == 0)
        done = 0
        while queue:
            v = queue.popleft()
            done += 1
            for d in adj.get(v, ()):
                indeg[d] -= 1
                if indeg[d] == 0:
                    queue.append(d)
        if done != len(indeg):
            stuck = sorted(v for v, d in indeg.items() if d > 0)
            raise DirectedCycle(f"cycle in degrees ({k}, {k - 1}) through {stuck[:6]}")


def reduce_by_matching(c: GradedComplex, m: Matching, check: bool = True) -> ReducedComplex:
    """Complex on the critical elements with zig-zag path boundary."""
    if check:
        validate_matching(c, m)
    matched: Dict[int, Set[int]] = {}
    up_of_lower: Dict[int, Dict[int, int]] = {}   # degree k-1 lower -> its upper
    lower_of_upper: Dict[int, Dict[int, int]] = {}
    for k, u, l in m.pairs:
        matched.setdefault(k, set()).add(u)
        matched.setdefault(k - 1, set()).add(l)
        up_of_lower.setdefault(k - 1, {})[l] = u
        lower_of_upper.setdefault(k, {})[u] = l
    critical = {k: [i for i in range(c.dim(k)) if i not in matched.get(k, ())] for k in c.degrees()}
    pos = {k: {old: new for new, old in enumerate(v)} for k, v in critical.items()}

    boundaries: Dict[int, List[Column]] = {}
    for k in c.degrees():
        bm = c.boundary_matrix(k)
        ups = up_of_lower.get(k - 1, {})
        partner = lower_of_upper.get(k, {})
        low_crit = pos.get(k - 1, {})
        memo: Dict[int, Dict[int, int]] = {}

        def flow(j: int) -> Dict[int, int]:
            """Path sums from degree-k element j to critical elements of degree k-1."""
            if j in memo:
                return memo[j]
            # iterative post-order over the matched uppers reachable from j
            stack = [(j, False)]
            while stack:
                x, ready = stack.pop()
                if x in memo:
                    continue
                skip = partner.get(x)
                if not ready:
                    stack.append((x, True))
                    for r in bm[x]:
                        if r != skip and r in ups and ups[r] not in memo:
                            stack.append((ups[r], False))
                    continue
                acc: Dict[int, int] = {}
                for r, v in bm[x].items():
                    if r == skip:
                        continue
                    if r in low_crit:
                        acc[r] = acc.get(r, 0) + v
                    elif r in ups:
                        x2 = ups[r]
                        back = -v * bm[x2][r]  # -1/w = -w for w = +-1
                        for t, val in memo[x2].items():
                            acc[t] = acc.get(t, 0) + back * val
                memo[x] = {t: val for t, val in acc.items() if val}
            return memo[j]

        cols = []
        for j in critical.get(k, ()):
            cols.append({low_crit[t]: v for t, v in flow(j).items()})
        boundaries[k] = cols
    bases = {k: [c.bases[k][i] for i in v] for k, v in critical.items()}
    return ReducedComplex(GradedComplex(bases, boundaries, c.shift), m, critical)


# -- explicit matchings from the weight combinatorics ---------------------------

def _resolve_weight(c: GradedComplex, w: Sequence[int] | None) -> Tuple[int, ...]:
    if w is not None:
        return tuple(w)
    for k in c.degrees():
        mono = c.bases[k][0]
        return weight_of(mono, mono.n)
    raise PatternMismatch("empty complex; pass the weight vector explicitly")


def _index(c: GradedComplex) -> Dict[int, Dict[int, int]]:
    return {k: {mono.mask: i for i, mono in enumerate(c.bases[k])} for k in c.degrees()}


def matching_two_two(c: GradedComplex, w: Sequence[int] | None = None) -> Matching:
    """e12 e2i e_M -> e1i e_M on [[2, 2, w3, ..]]; every element is matched."""
    w = _resolve_weight(c, w)
    if len(w) < 3 or w[0] != 2 or w[1] != 2:
        raise PatternMismatch(f"{w} does not start with 2, 2")
    n = len(w)
    idx = _index(c)
    b12 = 1 << gen_index(1, 2, n)
    pairs = []
    for k in c.degrees():
        for u, mono in enumerate(c.bases[k]):
            if not mono.mask & b12:
                continue
            i = next(j for j in range(3, n + 1) if mono.mask >> gen_index(2, j, n) & 1)
            low = mono.mask & ~b12 & ~(1 << gen_index(2, i, n)) | (1 << gen_index(1, i, n))
            pairs.append((k, u, idx[k - 1][low]))
    return Matching.of(pairs)


@dataclass
class SecondTwoResult:
    matching: Matching
    a_part: Dict[int, List[int]]   # original indices of the A elements, per degree
    b_part: Dict[int, List[int]]
    reduced: ReducedComplex
    b_complex: GradedComplex       # <B>, a subcomplex of the reduced complex
    phi: Dict[int, List[Column]]   # chain map source -> <B>, internal degrees of b_complex
    source: Optional[GradedComplex] = None  # None: the source is <B> itself

    def cone(self) -> GradedComplex:
        """Cone of phi; its homology is that of the summand."""
        src = self.source if self.source is not None else self.b_complex
        return cone(src, self.b_complex, self.phi)


def _diagonal_signs(a: GradedComplex, b: GradedComplex) -> Optional[Dict[int, List[int]]]:
    """Signs s with s_r a[r, x] s_x = b[r, x] for all entries, or None."""
    sig: Dict[Tuple[int, int], int] = {}
    adj: Dict[Tuple[int, int], List[Tuple[Tuple[int, int], int]]] = {}
    for d in a.degrees():
        ca, cb = a.boundary_matrix(d), b.boundary_matrix(d)
        for x in range(a.dim(d)):
            if set(ca[x]) != set(cb[x]):
                return None
            for r, v in ca[x].items():
                if abs(v) != abs(cb[x][r]):
                    return None
                rel = 1 if v == cb[x][r] else -1
                adj.setdefault((d, x), []).append(((d - 1, r), rel))
                adj.setdefault((d - 1, r), []).append(((d, x), rel))
    for d in a.degrees():
        for x in range(a.dim(d)):
            if (d, x) in sig:
                continue
            sig[(d, x)] = 1
            stack = [(d, x)]
            while stack:
                u = stack.pop()
                for v, rel in adj.get(u, ()):
                    want = sig[u] * rel
                    if v not in sig:
                        sig[v] = want
                        stack.append(v)
                    elif sig[v] != want:
                        return None
    return {d: [sig[(d, x)] for x in range(a.dim(d))] for d in a.degrees()}


def matching_lemma_3_5(c: GradedComplex, k: int, w: Sequence[int] | None = None) -> SecondTwoResult:
    """Matching C -> D for w = (2, .., 2 at position k, ..), critical set A u B.

    C: e_1a e_{2..k-1, k} e_M with 1 < a < k, matched to D obtained by
    replacing e_1a e_ak with e_1k.  The part of the reduced boundary running
    from A to B, read through A ~ B (e_{1..k-1,k} e_ka e_M <-> e_1a e_{2..k-1,k} e_M),
    is the chain map phi.
    """
    w = _resolve_weight(c, w)
    n = len(w)
    if not (2 <= k <= n) or w[0] != 2 or w[k - 1] != 2:
        raise PatternMismatch(f"{w} has no 2 at positions 1 and {k}")
    idx = _index(c)
    g = lambda i, j: 1 << gen_index(i, j, n)
    column_k = 0
    for j in range(2, k):
        column_k |= g(j, k)
    pairs = []
    a_part: Dict[int, List[int]] = {}
    b_part: Dict[int, List[int]] = {}
    for d in c.degrees():
        for u, mono in enumerate(c.bases[d]):
            m = mono.mask
            if m & column_k != column_k:
                continue
            if m & g(1, k):
                a_part.setdefault(d, []).append(u)
                continue
            a = next(j for j in range(2, n + 1) if m & g(1, j))
            if a > k:
                b_part.setdefault(d, []).append(u)
            else:
                low = (m & ~g(1, a) & ~g(a, k)) | g(1, k)
                pairs.append((d, u, idx[d - 1][low]))
    matching = Matching.of(pairs)
    reduced = reduce_by_matching(c, matching)

    # position of original indices inside the reduced complex
    rpos = {d: {old: new for new, old in enumerate(v)} for d, v in reduced.critical.items()}
    b_sets = {d: set(v) for d, v in b_part.items()}
    a_sets = {d: set(v) for d, v in a_part.items()}
    for d, crit in reduced.critical.items():
        if set(crit) != a_sets.get(d, set()) | b_sets.get(d, set()):
            raise MatchingError("critical cells differ from A u B")
    b_complex = subcomplex(reduced.complex, {d: [rpos[d][i] for i in b_part.get(d, ())] for d in reduced.complex.degrees()})

    # A element of degree d+1 <-> B element of degree d
    bpos = {d: {old: new for new, old in enumerate(sorted(b_part.get(d, ())))} for d in c.degrees()}
    a_to_b: Dict[int, Dict[int, int]] = {}
    for d, olds in b_part.items():
        for old_b in olds:
            mono = c.bases[d][old_b].mask
            a = next(j for j in range(k + 1, n + 1) if mono & g(1, j))
            x = (mono & ~g(1, a)) | g(1, k) | g(k, a)
            a_to_b.setdefault(d + 1, {})[idx[d + 1][x]] = bpos[d][old_b]
    inv = {d: {new: old for old, new in rpos[d].items()} for d in rpos}

    # split the reduced boundary of A into its A part (read in B) and B part
    psi: Dict[int, List[Column]] = {}
    a_bd: Dict[int, List[Column]] = {}
    for d in sorted(b_part):
        b_to_a = {bp: a_old for a_old, bp in a_to_b.get(d + 1, {}).items()}
        psi_cols, a_cols = [], []
        for j in range(len(b_part[d])):
            col = reduced.complex.boundary_matrix(d + 1)[rpos[d + 1][b_to_a[j]]]
            pb, pa = {}, {}
            for r, v in col.items():
                old_r = inv[d][r]
                if old_r in b_sets.get(d, ()):
                    pb[bpos[d][old_r]] = v
                else:
                    pa[a_to_b[d][old_r]] = v
            psi_cols.append(pb)
            a_cols.append(pa)
        psi[d] = psi_cols
        a_bd[d] = [{r: -v for r, v in col.items()} for col in a_cols]
    # psi anticommutes with the boundaries, so A enters the cone with -D
    a_complex = GradedComplex({d: list(b_complex.bases.get(d, ())) for d in b_complex.degrees()},
                              a_bd, b_complex.shift)
    sigma = _diagonal_signs(a_complex, b_complex)
    if sigma is None:
        return SecondTwoResult(matching, a_part, b_part, reduced, b_complex, psi, a_complex)
    # rescale A element-wise so that it equals B; phi is psi read through the rescaling
    phi = {d: [{r: sigma[d][j] * v for r, v in col.items()} for j, col in enumerate(cols)]
           for d, cols in psi.items()}
    return SecondTwoResult(matching, a_part, b_part, reduced, b_complex, phi)


def quotient_two_three_three(c: GradedComplex, w: Sequence[int] | None = None):
    """For w = (2, 3, 3, ..): the quotient [[w]] / F_4 with the matching
    e12 e23 e2a e_M -> e13 e2a e_M, reduced to its critical elements.

    Returns (quotient complex, matching, reduced complex).
    """
    w = _resolve_weight(c, w)
    n = len(w)
    if n < 4 or w[:3] != (2, 3, 3):
        raise PatternMismatch(f"{w} does not start with 2, 3, 3")
    g = lambda i, j: 1 << gen_index(i, j, n)
    drop = {d: [u for u, mono in enumerate(c.bases[d]) if not mono.mask & (g(1, 2) | g(1, 3))]
            for d in c.degrees()}
    q = quotient(c, drop)
    idx = _index(q)
    pairs = []
    for d in q.degrees():
        for u, mono in enumerate(q.bases[d]):
            m = mono.mask
            if m & g(1, 2) and m & g(2, 3):
                low = (m & ~g(1, 2) & ~g(2, 3)) | g(1, 3)
                pairs.append((d, u, idx[d - 1][low]))
    matching = Matching.of(pairs)
    return q, matching, reduce_by_matching(q, matching)
