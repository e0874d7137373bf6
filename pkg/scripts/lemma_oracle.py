"""Check every reduction rule against direct homology on sampled weight vectors.

    python scripts/lemma_oracle.py --samples 200 --seed 0
"""

import argparse
import sys

from nilhom.suites import LEMMAS, lemma_suite


def main() -> int:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--n-max", type=int, default=5)
    p.add_argument("--samples", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--rule", action="append", choices=sorted(LEMMAS), help="restrict to these rules")
    a = p.parse_args()
    failed = 0
    for chk in lemma_suite(n_max=a.n_max, samples=a.samples, seed=a.seed, names=a.rule):
        print(chk.line(), flush=True)
        failed += not chk.ok
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
