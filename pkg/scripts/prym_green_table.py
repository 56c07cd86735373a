"""Kernel dimension of the Prym map at the conjectured threshold, one row per genus.

    python3 scripts/prym_green_table.py --genus 6 12 --primes 131,65537
"""
from __future__ import annotations

import argparse
import time

from binkoszul.verify import NpQuery, np_survey, prym_threshold


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--genus", type=int, nargs=2, default=(6, 12), metavar=("LO", "HI"))
    ap.add_argument("--primes", default="131,65537")
    ap.add_argument("--seeds", default="0")
    ap.add_argument("--below", action="store_true", help="also test every p below the threshold")
    args = ap.parse_args()
    primes = [int(x) for x in args.primes.split(",")]
    seeds = [int(x) for x in args.seeds.split(",")]

    print(f"{'g':>3} {'p':>2} {'l':>2} {'rows':>8} {'cols':>7} {'kernel':>6} {'time':>7}")
    for g in range(args.genus[0], args.genus[1] + 1):
        top = prym_threshold(g)
        for p in (range(top + 1) if args.below else [top]):
            t0 = time.perf_counter()
            rep = np_survey(NpQuery("prym", g, p, retries=0), primes, seeds)
            print(f"{g:>3} {p:>2} {rep.query.l:>2} {rep.nrows:>8} {rep.ncols:>7} "
                  f"{rep.kernel_dim:>6} {time.perf_counter() - t0:>6.1f}s", flush=True)


if __name__ == "__main__":
    main()
