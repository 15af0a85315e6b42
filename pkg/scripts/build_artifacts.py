"""Write the corrections, the 903-term decomposition and (optionally) the
800^3 tensor into a directory, then re-load the decomposition and verify it.

    python3 scripts/build_artifacts.py out/ [--with-tensor] [--trials 5]

The tensor file has 34.5 million lines (about 1.8 GB) and takes a minute.
"""

import argparse
import os
import sys

from comon.cli import main

if __name__ == "__main__":
    p = argparse.ArgumentParser()
    p.add_argument("outdir")
    p.add_argument("--with-tensor", action="store_true")
    p.add_argument("--trials", type=int, default=5)
    args = p.parse_args()
    os.makedirs(args.outdir, exist_ok=True)

    path = lambda name: os.path.join(args.outdir, name)  # noqa: E731
    steps = [
        ["build", "corrections", "-o", path("corrections.txt")],
        ["build", "decomposition", "-o", path("decomposition.txt")],
        ["verify", "decomposition", "--in", path("decomposition.txt"), "--mode", "freivalds",
         "--trials", str(args.trials)],
    ]
    if args.with_tensor:
        steps.append(["build", "tensor-s", "-o", path("tensor_s.txt")])
    for argv in steps:
        code = main(argv)
        if code:
            sys.exit(code)
