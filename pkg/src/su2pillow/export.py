"""CSV and SVG emission. Output is a pure function of the inputs (byte-stable)."""

from __future__ import annotations

import csv
import io
import math
from typing import Iterable, Sequence

import numpy as np

from .pillowcase import ORBIFOLD_POINTS, TWO_PI, GammaPath, PillowcasePoint, SurgeryLine, project
from .repvariety import RepVarietySample


def num(x: float | None) -> str:
    """17 significant digits; empty for missing values."""
    if x is None:
        return ""
    return format(float(x), ".17g")


def _write(rows: Iterable[Sequence]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    for r in rows:
        w.writerow(r)
    return buf.getvalue()


def sample_csv(sample: RepVarietySample) -> str:
    """One row per deduplicated representation.

    Columns: component, residual, generator traces, pairwise product traces,
    h0, z1, h1, local dimension, then alpha and beta when the presentation
    carries peripheral data.
    """
    pres = sample.presentation
    g = pres.generator_count
    head = ["component", "residual"] + [f"tr_x{i}" for i in range(g)]
    head += [f"tr_x{i}x{j}" for i in range(g) for j in range(i + 1, g)]
    head += ["h0", "z1", "h1", "dimension", "alpha", "beta"]
    comp = {i: c.id for c in sample.components for i in c.members}
    rows = [head]
    for idx, p in enumerate(sample.points):
        c = p.cohomology
        coh = [c.h0, c.z1, c.h1] if c else ["", "", ""]
        if pres.peripheral is not None:
            q = project(p, *pres.peripheral)
            ab = [num(q.alpha), num(q.beta)]
        else:
            ab = ["", ""]
        dim = "" if p.local_dimension is None else p.local_dimension
        rows.append([comp.get(idx, ""), num(p.residual)] + [num(v) for v in p.fingerprint] + coh + [dim] + ab)
    return _write(rows)


def points_csv(points: Sequence[PillowcasePoint]) -> str:
    return _write([["alpha", "beta"]] + [[num(p.alpha), num(p.beta)] for p in points])


def path_csv(path: GammaPath) -> str:
    rows = [["index", "alpha_lift", "beta_lift", "segment", "alpha", "beta"]]
    for i, ((a, b), s, v) in enumerate(zip(path.lift, path.segments, path.vertices)):
        rows.append([i, num(a), num(b), s, num(v.alpha), num(v.beta)])
    return _write(rows)


# -- SVG ------------------------------------------------------------------------------------

SIZE = 480
MARGIN = 48
LEGEND_W = 230
COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")


def _xy(a: float, b: float) -> tuple[float, float]:
    s = SIZE / TWO_PI
    return MARGIN + a * s, MARGIN + SIZE - b * s


def _clip_line(p: int, q: int, c: float) -> tuple[tuple[float, float], tuple[float, float]] | None:
    """Segment of {p a + q b = c} inside [0, 2pi]^2, or None."""
    pts = []
    for a in (0.0, TWO_PI):
        if q:
            b = (c - p * a) / q
            if -1e-12 <= b <= TWO_PI + 1e-12:
                pts.append((a, b))
    for b in (0.0, TWO_PI):
        if p:
            a = (c - q * b) / p
            if -1e-12 <= a <= TWO_PI + 1e-12:
                pts.append((a, b))
    pts = sorted({(round(a, 12), round(b, 12)) for a, b in pts})
    if len(pts) < 2:
        return None
    return pts[0], pts[-1]


def _line_segments(line: SurgeryLine):
    bound = abs(line.p) + abs(line.q) + 1
    out = []
    for k in range(-bound, bound + 1):
        seg = _clip_line(line.p, line.q, TWO_PI * k)
        if seg is not None and seg[0] != seg[1]:
            out.append(seg)
    return out


def _polyline(pts: np.ndarray) -> str:
    return " ".join("{:.3f},{:.3f}".format(*_xy(a, b)) for a, b in pts)


def pillowcase_svg(
    image: Sequence[PillowcasePoint] = (),
    lines: Sequence[SurgeryLine] = (),
    paths: Sequence[GammaPath] = (),
    title: str = "",
) -> str:
    """Square domain [0, 2pi]^2; alpha > pi is the mirror half under (a, b) -> (-a, -b)."""
    W, H = SIZE + 2 * MARGIN + LEGEND_W, SIZE + 2 * MARGIN
    x0, y0 = _xy(0, TWO_PI)
    xm, _ = _xy(math.pi, 0)
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">',
        f'<rect x="0" y="0" width="{W}" height="{H}" fill="white"/>',
        f'<rect x="{xm:.3f}" y="{y0:.3f}" width="{SIZE / 2:.3f}" height="{SIZE}" fill="#e6e6e6"/>',
        f'<rect x="{x0:.3f}" y="{y0:.3f}" width="{SIZE}" height="{SIZE}" fill="none" stroke="black"/>',
        f'<line x1="{xm:.3f}" y1="{y0:.3f}" x2="{xm:.3f}" y2="{y0 + SIZE:.3f}" stroke="black" stroke-dasharray="4,3"/>',
    ]
    for t, lab in ((0, "0"), (math.pi, "π"), (TWO_PI, "2π")):
        x, y = _xy(t, 0)
        out.append(f'<text x="{x:.3f}" y="{y + 18:.3f}" font-size="13" text-anchor="middle">{lab}</text>')
        x, y = _xy(0, t)
        out.append(f'<text x="{x - 8:.3f}" y="{y + 4:.3f}" font-size="13" text-anchor="end">{lab}</text>')
    x, y = _xy(TWO_PI / 2, 0)
    out.append(f'<text x="{x:.3f}" y="{y + 36:.3f}" font-size="14" text-anchor="middle">α</text>')
    x, y = _xy(0, math.pi)
    out.append(f'<text x="{x - 34:.3f}" y="{y:.3f}" font-size="14" text-anchor="middle">β</text>')
    if title:
        out.append(f'<text x="{MARGIN}" y="{MARGIN - 16}" font-size="15">{title}</text>')

    legend = []
    for i, line in enumerate(lines):
        color = COLORS[i % len(COLORS)]
        for (a1, b1), (a2, b2) in _line_segments(line):
            (X1, Y1), (X2, Y2) = _xy(a1, b1), _xy(a2, b2)
            out.append(f'<line x1="{X1:.3f}" y1="{Y1:.3f}" x2="{X2:.3f}" y2="{Y2:.3f}" stroke="{color}" '
                       'stroke-width="1" stroke-dasharray="6,3" opacity="0.8"/>')
        legend.append(("line", color, line.format("α", "β").replace("=", "≡")))
    for i, path in enumerate(paths):
        color = COLORS[(i + 3) % len(COLORS)]
        pts = np.mod(path.lift, TWO_PI + 1e-9)
        out.append(f'<polyline points="{_polyline(pts)}" fill="none" stroke="{color}" stroke-width="2.5"/>')
        for a, b in (pts[0], pts[-1]):
            X, Y = _xy(a, b)
            out.append(f'<circle cx="{X:.3f}" cy="{Y:.3f}" r="4" fill="{color}"/>')
        legend.append(("path", color, f"γ_{path.n}" if path.n else "path"))
    for p in image:
        X, Y = _xy(p.alpha, p.beta)
        out.append(f'<circle cx="{X:.3f}" cy="{Y:.3f}" r="1.6" fill="black"/>')
        Xm, Ym = _xy((TWO_PI - p.alpha) % TWO_PI, (TWO_PI - p.beta) % TWO_PI)
        out.append(f'<circle cx="{Xm:.3f}" cy="{Ym:.3f}" r="1.6" fill="#888888"/>')
    if image:
        legend.append(("dot", "black", f"image ({len(image)} points)"))
    for o in ORBIFOLD_POINTS:
        for a, b in sorted({(o.alpha, o.beta), (o.alpha, o.beta + TWO_PI * (o.beta == 0)), (o.alpha + TWO_PI * (o.alpha == 0), o.beta),
                     (o.alpha + TWO_PI * (o.alpha == 0), o.beta + TWO_PI * (o.beta == 0))}):
            X, Y = _xy(a, b)
            out.append(f'<rect x="{X - 4:.3f}" y="{Y - 4:.3f}" width="8" height="8" fill="white" stroke="black"/>')
    legend.append(("orb", "black", "orbifold points"))

    lx, ly = SIZE + 2 * MARGIN, MARGIN
    for i, (kind, color, text) in enumerate(legend):
        y = ly + 18 * i
        if kind == "dot":
            out.append(f'<circle cx="{lx + 9}" cy="{y}" r="3" fill="{color}"/>')
        elif kind == "orb":
            out.append(f'<rect x="{lx + 5}" y="{y - 4}" width="8" height="8" fill="white" stroke="black"/>')
        else:
            dash = ' stroke-dasharray="6,3"' if kind == "line" else ""
            out.append(f'<line x1="{lx}" y1="{y}" x2="{lx + 18}" y2="{y}" stroke="{color}" stroke-width="2"{dash}/>')
        out.append(f'<text x="{lx + 26}" y="{y + 4}" font-size="12">{text}</text>')
    y = ly + 18 * len(legend) + 10
    for text in ("grey half: α > π, identified with", "the white half by (α,β) → (-α,-β);",
                 "dashed seam at α = π; edges glued", "mod 2π (torus double cover)"):
        out.append(f'<text x="{lx}" y="{y}" font-size="11">{text}</text>')
        y += 14
    out.append("</svg>")
    return "\n".join(out) + "\n"
