"""Isotypic signs of the circulant form under the Z/5 shift, plus the twisted pieces.

    python3 scripts/cyclic_cover_index.py --weights 0 2
"""

import argparse
import math

from su2pillow.equivariant import coinvariants_form, format_index_report, index_verdict, section5_fixture


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--weights", type=int, nargs="+", default=[0, 2])
    args = ap.parse_args()

    form = section5_fixture()
    verdict = index_verdict(form, args.weights)
    print(format_index_report(form, verdict, args.weights), end="")
    print("closed form -1 + 2 cos(2 pi m / 5):")
    for m, piece in enumerate(verdict.isotypic.pieces):
        exact = -1 + 2 * math.cos(2 * math.pi * m / 5)
        print(f"  m={m}: {exact:+.15f}  |diff|={abs(piece.eigenvalues[0] - exact):.1e}")
    print("all rotation weights:")
    for j in range(5):
        cf = coinvariants_form(form, j)
        print(f"  j={j}: dim={cf.dimension} signs={cf.counts.as_tuple()}")


if __name__ == "__main__":
    main()
