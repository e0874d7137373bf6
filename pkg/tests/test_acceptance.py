"""Acceptance criteria, one test and one PASS/FAIL line each.

Run with ``pytest tests/test_acceptance.py`` (lines appear in the terminal
summary) or ``python tests/test_acceptance.py``.
"""

import contextlib
import io
import itertools
import os
import time
from math import factorial

import pytest

from nilhom.assemble import CupClass, cup_classes, cup_product, free_part, full_table, verify_against_paper
from nilhom.cli import main as cli_main
from nilhom.complex_core import build_summand
from nilhom.homology import HomologyProfile, homology_profile
from nilhom.suites import Check, direct, lemma_suite, structural_suite, table_checks, torsion_family
from nilhom.weights import inversion_count, inversions

RESULTS = []

SMALL_TABLES_BUDGET = 30.0
N6_BUDGET = 30 * 60.0
Z8_BUDGET = 10.0


def record(name, ok, detail=""):
    RESULTS.append((name, ok, detail))
    return ok


@pytest.fixture(scope="module")
def n7_table():
    jobs = os.cpu_count() or 1
    t0 = time.perf_counter()
    table = full_table(7, jobs=jobs)
    return table, time.perf_counter() - t0, jobs


def test_tables_up_to_5():
    t0 = time.perf_counter()
    codes = []
    for n in (2, 3, 4, 5):
        with contextlib.redirect_stdout(io.StringIO()), contextlib.redirect_stderr(io.StringIO()):
            codes.append(cli_main(["table", "--n", str(n), "--verify"]))
    elapsed = time.perf_counter() - t0
    row = full_table(5).rows[4]
    ok = codes == [0] * 4 and elapsed < SMALL_TABLES_BUDGET and row == (20, (2,) * 10 + (3,) * 3)
    assert record("tables n<=5 exact, under 30 s", ok, f"exit codes {codes}, {elapsed:.2f} s")


def test_table_6():
    t0 = time.perf_counter()
    table = full_table(6)
    elapsed = time.perf_counter() - t0
    bad = verify_against_paper(table)
    ok = not bad and elapsed < N6_BUDGET and table.rows[6] == (90, (2,) * 118 + (4,) * 12 + (3,) * 35)
    assert record("table n=6 exact, under 30 min", ok, f"{len(bad)} mismatches, {elapsed:.2f} s")


@pytest.mark.slow
def test_table_7_stretch(n7_table):
    table, elapsed, jobs = n7_table
    bad = verify_against_paper(table)
    h10 = table.rows[10] == (573, (2,) * 2238 + (4,) * 210 + (3,) * 522 + (5,) * 64)
    ok = not bad and h10
    detail = f"{elapsed:.1f} s with {jobs} worker(s); H_10 {'matches' if h10 else 'differs'}"
    if bad:
        detail += "; " + "; ".join(bad)
    assert record("table n=7 exact (stretch)", ok, detail)


def test_z8_witness():
    w = (2, 4, 7, 5, 4, 2, 5, 7)
    t0 = time.perf_counter()
    c = build_summand(w)
    prof = homology_profile(c)
    elapsed = time.perf_counter() - t0
    want = HomologyProfile.from_dict({10: (0, [8]), 11: (0, [8])})
    ok = c.total_dim() == 192 and prof == want and elapsed < Z8_BUDGET
    assert record("Z_8 witness by direct SNF", ok, f"{c.total_dim()} monomials, {prof}, {elapsed:.2f} s")


def test_torsion_family():
    got = {}
    for q in (2, 3, 4, 5):
        w, want = torsion_family(q)
        got[q] = (direct(w) == want, str(direct(w)))
    ok = all(v for v, _ in got.values())
    assert record("Z_q family for q = 2..5", ok, "; ".join(f"q={q}: {s}" for q, (_, s) in got.items()))


@pytest.mark.slow
def test_lemma_oracle():
    checks = list(lemma_suite(n_max=5, samples=200, seed=0))
    failed = [c for c in checks if not c.ok]
    total = sum(int(c.detail.split()[0]) for c in checks)
    ok = not failed
    detail = f"{len(checks)} rules, {total} instances" + (f"; first failure {failed[0].line()}" if failed else "")
    assert record("lemma oracle suite", ok, detail)


@pytest.mark.slow
def test_structural(n7_table):
    checks = list(structural_suite(n_max=5))
    tables = [full_table(n) for n in range(2, 7)] + [n7_table[0]]
    for t in tables:
        checks += list(table_checks(t))
    for n in range(2, 9):
        fp = free_part(n)
        checks.append(Check(f"n={n} Mahonian total", sum(fp.values()) == factorial(n)))
    failed = [c for c in checks if not c.ok]
    ok = not failed
    assert record("structural property suite", ok,
                  f"{len(checks)} checks" + (f"; first failure {failed[0].line()}" if failed else ""))


def test_cup_products():
    ok = True
    for n in (2, 3, 4):
        perms = list(itertools.permutations(range(1, n + 1)))
        for p, q in itertools.product(perms, repeat=2):
            a, b = cup_product(p, q), cup_product(q, p)
            ok &= a.is_zero == b.is_zero
            if not a.is_zero:
                ok &= a.perm == b.perm and a.sign == (-1) ** (inversion_count(p) * inversion_count(q)) * b.sign
        for p, q, r in itertools.product(perms, repeat=3):
            sets = [set(inversions(x)) for x in (p, q, r)]
            if any(x & y for x, y in itertools.combinations(sets, 2)):
                continue
            x, y, z = CupClass(p), CupClass(q), CupClass(r)
            ok &= cup_classes(cup_classes(x, y), z) == cup_classes(x, cup_classes(y, z))
    c = cup_product((1, 3, 2), (3, 1, 2))
    ok &= c.perm == (3, 2, 1) and c.sign in (1, -1)
    assert record("cup product suite", ok, f"x(1,3,2) x(3,1,2) = {c}")


if __name__ == "__main__":
    import sys
    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
