"""Direct Smith normal form over every weight summand, no reduction rules.

Independent cross-check of the assembled table; n=7 takes about 11 minutes.

    python scripts/brute_force.py 6
"""

import sys
import time

from nilhom.complex_core import build_summand
from nilhom.homology import HomologyProfile, format_group, homology_profile
from nilhom.weights import enumerate_weights


def main(n: int) -> None:
    t0 = time.perf_counter()
    total = HomologyProfile.zero()
    vectors = enumerate_weights(n)
    for w in vectors:
        total = total + homology_profile(build_summand(w))
    print(f"# n={n}: {len(vectors)} summands, {time.perf_counter() - t0:.1f} s")
    for k, f, t in total.groups:
        print(k, format_group(f, t))


if __name__ == "__main__":
    main(int(sys.argv[1]) if len(sys.argv) > 1 else 5)
