"""Tabulate gamma_n verdicts and zero-surgery slices over a few knots.

    python3 scripts/surgery_survey.py --knots unknot torus_knot:2:3 torus_knot:2:5 --grid 128
"""

import argparse
import time

from su2pillow.obstruction import AnalysisConfig, analyze
from su2pillow.presentation import catalog_from_key


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--knots", nargs="+", default=["unknot", "torus_knot:2:3", "torus_knot:2:5", "torus_knot:3:4"])
    ap.add_argument("--grid", type=int, default=128)
    ap.add_argument("--seeds", type=int, default=30)
    ap.add_argument("--n", type=int, default=5)
    args = ap.parse_args()

    cfg = AnalysisConfig(n_range=tuple(range(1, args.n + 1)), grid_size=args.grid, seeds_per_fiber=args.seeds)
    head = f"{'knot':18s} {'points':>7s} {'beta=pi':>9s} " + " ".join(f"{'g' + str(n):>5s}" for n in cfg.n_range)
    print(head)
    for key in args.knots:
        t = time.perf_counter()
        rep = analyze(catalog_from_key(key), cfg)
        marks = " ".join(f"{'D' if r.gamma.disjoint else 'x':>5s}" for r in rep.per_n)
        print(f"{key:18s} {len(rep.image):7d} {rep.zero_surgery:>9s} {marks}   ({time.perf_counter() - t:.1f}s)")
    print("D = gamma_n disjoint from the image, x = meets it")


if __name__ == "__main__":
    main()
