"""The order-8 torsion summand at n=8: basis size, direct homology, reducer trace."""

import time

from nilhom.complex_core import build_summand
from nilhom.homology import homology_profile
from nilhom.reduce import Reducer
from nilhom.suites import Z8_WITNESS


def main() -> None:
    t0 = time.perf_counter()
    c = build_summand(Z8_WITNESS)
    prof = homology_profile(c)
    print(f"w = {Z8_WITNESS}: {c.total_dim()} monomials, degrees {min(c.degrees())}..{max(c.degrees())}")
    print(f"direct SNF: {prof}  ({time.perf_counter() - t0:.3f} s)")
    got, trace = Reducer().reduce(Z8_WITNESS)
    print("reducer:", got)
    print("\n".join("  " + line for line in trace.lines()))


if __name__ == "__main__":
    main()
