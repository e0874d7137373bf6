"""Assemble homology tables for a range of n, timing each and comparing with the reference.

    python scripts/run_tables.py --n-max 7 --jobs 4 --out tables.json
"""

import argparse
import json
import time
from dataclasses import asdict, dataclass

from nilhom.assemble import full_table, verify_against_paper
from nilhom.reduce import ReduceConfig


@dataclass
class RunConfig:
    n_min: int = 2
    n_max: int = 6
    jobs: int = 1
    cap: int = ReduceConfig.cap
    out: str | None = None


def run(cfg: RunConfig) -> dict:
    results = {"config": asdict(cfg), "tables": {}}
    for n in range(cfg.n_min, cfg.n_max + 1):
        t0 = time.perf_counter()
        table = full_table(n, config=ReduceConfig(cap=cfg.cap), jobs=cfg.jobs)
        elapsed = time.perf_counter() - t0
        bad = verify_against_paper(table)
        print(f"n={n}: {elapsed:8.2f} s, {len(bad)} mismatches" + "".join(f"\n    {b}" for b in bad))
        results["tables"][n] = {"seconds": elapsed, "mismatches": bad, "table": table.to_json()}
    if cfg.out:
        with open(cfg.out, "w") as fh:
            json.dump(results, fh, indent=1, sort_keys=True)
    return results


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    for f, d in asdict(RunConfig()).items():
        p.add_argument("--" + f.replace("_", "-"), type=type(d) if d is not None else str, default=d)
    run(RunConfig(**vars(p.parse_args())))


if __name__ == "__main__":
    main()
