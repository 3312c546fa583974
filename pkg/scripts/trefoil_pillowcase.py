"""Pillowcase picture and obstruction report for the right-handed trefoil.

    python3 scripts/trefoil_pillowcase.py --outdir out/trefoil
"""

import argparse
import time
from pathlib import Path

from su2pillow.export import pillowcase_svg, points_csv
from su2pillow.obstruction import AnalysisConfig, analyze, format_report
from su2pillow.pillowcase import SurgeryLine, gamma_path
from su2pillow.presentation import torus_knot


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--outdir", default="out/trefoil")
    ap.add_argument("--grid", type=int, default=512)
    ap.add_argument("--seeds", type=int, default=50)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    out = Path(args.outdir)
    out.mkdir(parents=True, exist_ok=True)
    t0 = time.perf_counter()
    report = analyze(torus_knot(2, 3), AnalysisConfig(grid_size=args.grid, seeds_per_fiber=args.seeds,
                                                      random_seed=args.seed))
    elapsed = time.perf_counter() - t0
    (out / "report.txt").write_text(format_report(report))
    (out / "image.csv").write_text(points_csv(report.image))
    (out / "pillowcase.svg").write_text(pillowcase_svg(report.image, title="T(2,3)"))
    (out / "pillowcase_gamma2.svg").write_text(
        pillowcase_svg(report.image, [SurgeryLine(1, -2)], [gamma_path(2)], title="T(2,3) with γ_2"))
    print(f"{len(report.image)} image points in {elapsed:.1f}s -> {out}")
    for r in report.per_n:
        print(f"  n={r.n}: gamma {r.gamma.verdict:13s} other hits on {r.line_plus.line}: {len(r.line_plus.others)}")


if __name__ == "__main__":
    main()
