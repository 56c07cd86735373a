"""Canonical Koszul kernels at l = floor(g/2) and one step below.

The second column is informational: below the Green range the kernel is
expected to be nonzero.

    python3 scripts/green_table.py --genus 3 11
"""
from __future__ import annotations

import argparse
import time

from binkoszul.verify import green, green_lazarsfeld_info


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--genus", type=int, nargs=2, default=(3, 11), metavar=("LO", "HI"))
    ap.add_argument("--prime", type=int, default=131)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    print(f"{'g':>3} {'l':>2} {'cols':>6} {'kernel':>6} {'below':>6} {'time':>7}")
    for g in range(args.genus[0], args.genus[1] + 1):
        t0 = time.perf_counter()
        rep = green(g, args.prime, args.seed)
        below = green_lazarsfeld_info(g, args.prime, args.seed)["kernel_dim"] if g >= 4 else "-"
        print(f"{g:>3} {g // 2:>2} {rep.ncols:>6} {rep.kernel_dim:>6} {below:>6} "
              f"{time.perf_counter() - t0:>6.1f}s", flush=True)


if __name__ == "__main__":
    main()
