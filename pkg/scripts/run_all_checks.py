"""Run every finite check with timings and a one-line summary per check.

    python3 scripts/run_all_checks.py [--mode exact|freivalds] [--seed N]
"""

import argparse
import sys
import time

from comon.cli import main


def run(argv):
    t0 = time.perf_counter()
    code = main(argv)
    return code, time.perf_counter() - t0


if __name__ == "__main__":
    p = argparse.ArgumentParser()
    p.add_argument("--mode", choices=("exact", "freivalds"), default="exact")
    p.add_argument("--seed", type=int, default=1)
    args = p.parse_args()

    worst = 0
    for target in ("partition", "basis", "clone-locus", "structural-zeros", "witness", "f-structure",
                   "rank4", "span-identity", "lower-bound"):
        code, dt = run(["--timing", "verify", target, "--seed", str(args.seed)])
        print(f"# {target}: exit {code} in {dt:.1f}s", flush=True)
        worst = max(worst, code)
    code, dt = run(["--timing", "verify", "decomposition", "--mode", args.mode, "--seed", str(args.seed)])
    print(f"# decomposition ({args.mode}): exit {code} in {dt:.1f}s")
    sys.exit(max(worst, code))
