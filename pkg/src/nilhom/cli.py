"""Command-line entry point: ``nilhom table|summand|verify|orbit``."""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import tempfile
import time
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

from . import ENGINE_VERSION
from .assemble import full_table, verify_against_paper, UnknownN
from .complex_core import EntryOutOfRange, WeightSumMismatch, build_summand, check_weight
from .homology import HomologyProfile, homology_profile
from .reduce import ReduceConfig, Reducer, ResourceLimitExceeded
from .weights import canonicalize, is_permutation, orbit_listing, reverse_beta

EXIT_OK, EXIT_MISMATCH, EXIT_LIMIT, EXIT_BAD_INPUT = 0, 2, 3, 4
CACHE_ENV = "NILHOM_CACHE_DIR"

log = logging.getLogger("nilhom")


class ProfileCache:
    """One JSON file per (n, canonical vector); stale engine versions are misses."""

    def __init__(self, root: os.PathLike | str):
        self.root = Path(root)

    def _path(self, c: Tuple[int, ...]) -> Path:
        return self.root / f"n{len(c)}" / ("w_" + "_".join(map(str, c)) + ".json")

    def get(self, c: Tuple[int, ...]):
        p = self._path(c)
        try:
            data = json.loads(p.read_text())
        except (OSError, ValueError):
            return None
        if data.get("engine") != ENGINE_VERSION or tuple(data.get("w", ())) != tuple(c):
            return None
        prof = HomologyProfile.from_dict({int(k): (f, tuple(t)) for k, f, t in data["groups"]})
        return prof, data.get("trace", "")

    def put(self, c: Tuple[int, ...], prof: HomologyProfile, summary: str) -> None:
        p = self._path(c)
        p.parent.mkdir(parents=True, exist_ok=True)
        doc = {"engine": ENGINE_VERSION, "w": list(c),
               "groups": [[k, f, list(t)] for k, f, t in prof.groups], "trace": summary}
        fd, tmp = tempfile.mkstemp(dir=p.parent, suffix=".tmp")
        try:
            with os.fdopen(fd, "w") as fh:
                json.dump(doc, fh, sort_keys=True)
            os.replace(tmp, p)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise


def parse_vector(text: str) -> Tuple[int, ...]:
    try:
        return tuple(int(x) for x in text.replace(" ", "").split(",") if x)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated integer vector: {text!r}")


def _cache_dir(arg: Optional[str]) -> Optional[str]:
    return arg or os.environ.get(CACHE_ENV) or None


def cmd_table(args) -> int:
    if args.n < 2:
        print("n must be at least 2", file=sys.stderr)
        return EXIT_BAD_INPUT
    config = ReduceConfig(cap=args.cap)
    cache_dir = _cache_dir(args.cache_dir)
    store = ProfileCache(cache_dir) if cache_dir else None
    t0 = time.perf_counter()
    try:
        table = full_table(args.n, config=config, jobs=args.jobs, store=store)
    except ResourceLimitExceeded as e:
        print(f"resource limit: {e}", file=sys.stderr)
        for c in e.vectors:
            print("unfinished " + ",".join(map(str, c)), file=sys.stderr)
        return EXIT_LIMIT
    log.info("n=%d done in %.2fs", args.n, time.perf_counter() - t0)
    if args.format == "json":
        print(json.dumps(table.to_json(), indent=2, sort_keys=True))
    else:
        print(table.to_text())
    if args.verify:
        try:
            bad = verify_against_paper(table)
        except UnknownN as e:
            print(str(e), file=sys.stderr)
            return EXIT_BAD_INPUT
        for line in bad:
            print("mismatch " + line, file=sys.stderr)
        if bad:
            return EXIT_MISMATCH
        print(f"verified against the reference table for n={args.n}", file=sys.stderr)
    return EXIT_OK


def cmd_summand(args) -> int:
    w = args.w
    try:
        check_weight(w)
    except (WeightSumMismatch, EntryOutOfRange) as e:
        print(str(e), file=sys.stderr)
        return EXIT_BAD_INPUT
    if args.show == "trace":
        try:
            prof, trace = Reducer(ReduceConfig(cap=args.cap)).reduce(w)
        except ResourceLimitExceeded as e:
            print(f"resource limit: {e}", file=sys.stderr)
            return EXIT_LIMIT
        print("\n".join(trace.lines()))
        print(f"profile: {prof}")
        return EXIT_OK
    c = build_summand(w)
    if args.show == "basis":
        print(f"{c.total_dim()} monomials")
        for k in c.degrees():
            for m in c.bases[k]:
                print(f"{k}\t{m!r}")
    elif args.show == "boundary":
        for k in c.degrees():
            for j, col in enumerate(c.boundary_matrix(k)):
                terms = " ".join(f"{v:+d}*{c.bases[k - 1][r]!r}" for r, v in sorted(col.items()))
                print(f"d {c.bases[k][j]!r} = {terms or '0'}")
    else:
        print(homology_profile(c))
    return EXIT_OK


def cmd_verify(args) -> int:
    from . import suites
    if args.suite == "examples":
        checks = suites.examples_suite()
    elif args.suite == "lemmas":
        checks = suites.lemma_suite(n_max=args.n_max, samples=args.samples, seed=args.seed)
    elif args.suite == "structure":
        checks = suites.structural_suite(n_max=args.n_max)
    else:
        checks = suites.tables_suite(n_max=args.n_max, jobs=args.jobs)
    failed = 0
    try:
        for chk in checks:
            print(chk.line(), flush=True)
            failed += not chk.ok
    except ResourceLimitExceeded as e:
        print(f"resource limit: {e}", file=sys.stderr)
        return EXIT_LIMIT
    return EXIT_MISMATCH if failed else EXIT_OK


def cmd_orbit(args) -> int:
    w = args.w
    try:
        cert = canonicalize(w)
    except (WeightSumMismatch, EntryOutOfRange) as e:
        print(str(e), file=sys.stderr)
        return EXIT_BAD_INPUT
    kind = "permutation" if is_permutation(w) else "torsion"
    print(f"query      {','.join(map(str, w))} ({kind})")
    print(f"canonical  {','.join(map(str, cert.canonical))}")
    print(f"shift      {cert.degree_shift:+d}")
    print(f"dualized   {'yes' if cert.dualized else 'no'}")
    print(f"word       {' '.join(cert.transform_word) or '(identity)'}")
    print(f"beta-fixed {'yes' if reverse_beta(w) == tuple(w) else 'no'}")
    print("orbit (query ~ member shifted by s; dual rows relate the reversed query):")
    for v, s, dual in orbit_listing(w):
        print(f"  {','.join(map(str, v)):24s} shift {s:+d}{'  (dual)' if dual else ''}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="nilhom", description=__doc__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    t = sub.add_parser("table", help="homology table of nil_n")
    t.add_argument("--n", type=int, required=True)
    t.add_argument("--format", choices=("text", "json"), default="text")
    t.add_argument("--jobs", type=int, default=1)
    t.add_argument("--cap", type=int, default=ReduceConfig.cap)
    t.add_argument("--verify", action="store_true", help="compare with the bundled reference table")
    t.add_argument("--cache-dir", default=None, help=f"profile cache (default ${CACHE_ENV})")
    t.set_defaults(func=cmd_table)

    s = sub.add_parser("summand", help="inspect one weight summand")
    s.add_argument("--w", type=parse_vector, required=True)
    s.add_argument("--show", choices=("basis", "boundary", "profile", "trace"), default="profile")
    s.add_argument("--cap", type=int, default=ReduceConfig.cap)
    s.set_defaults(func=cmd_summand)

    v = sub.add_parser("verify", help="run a property suite")
    v.add_argument("--suite", choices=("lemmas", "tables", "examples", "structure"), required=True)
    v.add_argument("--n-max", type=int, default=5)
    v.add_argument("--samples", type=int, default=200)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--jobs", type=int, default=1)
    v.set_defaults(func=cmd_verify)

    o = sub.add_parser("orbit", help="canonical representative and orbit")
    o.add_argument("--w", type=parse_vector, required=True)
    o.set_defaults(func=cmd_orbit)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code == 0 else EXIT_BAD_INPUT
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
