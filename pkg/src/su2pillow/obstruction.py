"""Pillowcase obstruction pipeline for surgeries on a knot with peripheral data.

The knot-exterior image is sampled two ways: meridian-pinned fibres over a grid
of alpha, and line-constrained solves (rho(mu^p lambda^q) = 1, or rho(lambda) = -1)
seeded from nearby fibre points. The second kind lands exactly on the lines the
checks ask about, so intersections do not depend on grid spacing.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import __version__
from .pillowcase import (
    DISJOINT_TOL,
    SLICE_TOL,
    DisjointnessReport,
    LineIntersection,
    PillowcasePoint,
    SliceCheck,
    SurgeryLine,
    _circ,
    gamma_path,
    line_intersection,
    nullhomotopy_slice_check,
    path_disjointness,
    project,
)
from .presentation import Presentation, Word
from .repvariety import RepVarietySample, SolverError, SweepConfig, sweep_solve

log = logging.getLogger(__name__)

EMPTY = "EMPTY"
NONEMPTY = "NONEMPTY"


@dataclass(frozen=True)
class AnalysisConfig:
    n_range: tuple[int, ...] = (1, 2, 3, 4, 5)
    grid_size: int = 512
    seeds_per_fiber: int = 50
    line_seeds: int = 200
    random_seed: int = 0
    disjoint_tol: float = DISJOINT_TOL
    slice_tol: float = SLICE_TOL
    line_tol: float = DISJOINT_TOL
    continuation_radius: float = 0.25

    def __post_init__(self):
        for name in ("disjoint_tol", "slice_tol", "line_tol", "continuation_radius"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.seeds_per_fiber < 1 or self.line_seeds < 1 or self.grid_size < 2:
            raise ValueError("seeds and grid size must be positive")
        if any(n < 1 for n in self.n_range):
            raise ValueError("n_range entries must be >= 1")


@dataclass(frozen=True)
class PerN:
    n: int
    line_plus: LineIntersection  # alpha + n beta = 0 (1/n surgery)
    line_minus: LineIntersection  # alpha - n beta = 0 (carries the slope-n piece of gamma_n)
    gamma: DisjointnessReport


@dataclass(frozen=True)
class ObstructionReport:
    label: str
    config: AnalysisConfig
    image: tuple[PillowcasePoint, ...]
    slices: SliceCheck
    zero_surgery: str
    zero_surgery_points: tuple[PillowcasePoint, ...]
    per_n: tuple[PerN, ...]
    interpretations: tuple[str, ...] = field(default=())
    cross_checks: tuple[str, ...] = field(default=())
    sample_sizes: dict = field(default_factory=dict)


def zero_surgery_slice(image, tol: float = SLICE_TOL) -> tuple[str, tuple[PillowcasePoint, ...]]:
    hits = tuple(p for p in image if _circ(p.beta - math.pi) < tol)
    return (NONEMPTY if hits else EMPTY), hits


def interpret(slices: SliceCheck, zero_surgery: str, per_n, label: str = "") -> tuple[str, ...]:
    """Criterion statements; a pure function of the geometric verdicts."""
    out = []
    met = [r.n for r in per_n if r.gamma.certified and r.gamma.homotopy_ok and r.gamma.disjoint]
    if met:
        out.append(f"I(Y_0(K), mu_K) = 0 criterion met (gamma_n disjoint for n = {', '.join(map(str, met))})")
    else:
        out.append("I(Y_0(K), mu_K) = 0 criterion not met by any certified gamma_n")
    if zero_surgery == EMPTY:
        out.append("chi(Y_0(K), mu_K) empty on the sample (beta = pi slice)")
    else:
        out.append("chi(Y_0(K), mu_K) nonempty (image meets beta = pi)")
    out.append(
        f"nullhomotopy slices: alpha=0 {SliceCheck.word(slices.alpha_zero)}, alpha=pi {SliceCheck.word(slices.alpha_pi)}"
    )
    for r in per_n:
        if r.line_plus.only_origin:
            out.append(f"slope 1/{r.n}: dual knot nullhomotopic-consistent")
        else:
            out.append(f"slope 1/{r.n}: image meets alpha + {r.n} beta = 0 away from (0,0)")
    return tuple(out)


def cross_check(image, per_n, tol: float) -> tuple[str, ...]:
    """Slices plus {alpha - n beta = 0} meeting only (0,0) must force gamma_n disjoint.

    Both sides are evaluated at the path tolerance so the implication is exact.
    """
    sl = nullhomotopy_slice_check(image, tol)
    out = []
    for r in per_n:
        if r.n < 2:
            continue
        line = line_intersection(image, SurgeryLine(1, -r.n), tol)
        if sl.alpha_zero and sl.alpha_pi and line.only_origin:
            status = "consistent" if r.gamma.disjoint else "VIOLATED"
        else:
            status = "not applicable"
        out.append(f"n={r.n}: {status}")
    return tuple(out)


def _image(sample: RepVarietySample, presentation: Presentation) -> list[PillowcasePoint]:
    mu, lam = presentation.peripheral
    return [project(p, mu, lam) for p in sample.points]


def _constrained(presentation, word: Word, sign: int, seed_points, image, near, cfg: AnalysisConfig, salt: int):
    starts = [p.array() for p, q in zip(seed_points, image) if near(q) < cfg.continuation_radius]
    sweep = SweepConfig(seeds=cfg.line_seeds, random_seed=cfg.random_seed + salt, estimate_dimensions=False)
    sample = sweep_solve(
        presentation.with_relator(word, sign),
        config=sweep,
        extra_starts=np.stack(starts) if starts else None,
    )
    return sample


def analyze(presentation: Presentation, config: AnalysisConfig | None = None) -> ObstructionReport:
    if presentation.peripheral is None:
        raise SolverError("analyze needs a presentation with meridian and longitude")
    cfg = config or AnalysisConfig()
    mu, lam = presentation.peripheral
    grid = np.linspace(0.0, math.pi, cfg.grid_size)
    base = sweep_solve(
        presentation,
        meridian_grid=grid,
        config=SweepConfig(seeds=cfg.seeds_per_fiber, random_seed=cfg.random_seed, estimate_dimensions=False),
    )
    base_image = _image(base, presentation)
    image = list(base_image)
    sizes = {"fibres": len(base.points)}

    # line-constrained solves: (word, sign, distance-to-target, name)
    targets = [(lam, -1, lambda q: float(_circ(q.beta - math.pi)), "beta=pi")]
    for n in sorted(set(cfg.n_range)):
        for p, q in ((1, n), (1, -n)):
            line = SurgeryLine(p, q)
            targets.append((mu ** p * lam ** q, 1, line.distance, str(line)))
    for salt, (word, sign, near, name) in enumerate(targets, start=1):
        sample = _constrained(presentation, word, sign, base.points, base_image, near, cfg, salt)
        pts = _image(sample, presentation)
        sizes[name] = len(pts)
        image.extend(pts)
    image.sort()

    slices = nullhomotopy_slice_check(image, cfg.slice_tol)
    zs, zs_pts = zero_surgery_slice(image, cfg.slice_tol)
    per_n = []
    for n in cfg.n_range:
        per_n.append(
            PerN(
                n,
                line_intersection(image, SurgeryLine(1, n), cfg.line_tol),
                line_intersection(image, SurgeryLine(1, -n), cfg.line_tol),
                path_disjointness(image, gamma_path(n), cfg.disjoint_tol),
            )
        )
    per_n = tuple(per_n)
    return ObstructionReport(
        label=presentation.label,
        config=cfg,
        image=tuple(image),
        slices=slices,
        zero_surgery=zs,
        zero_surgery_points=zs_pts,
        per_n=per_n,
        interpretations=interpret(slices, zs, per_n, presentation.label),
        cross_checks=cross_check(image, per_n, cfg.disjoint_tol),
        sample_sizes=sizes,
    )


# -- serialization ---------------------------------------------------------------------------


def _f(x: float) -> str:
    if math.isinf(x):
        return "inf"
    return f"{x:.10f}"


def _pts(points) -> str:
    return "[" + ", ".join(f"({_f(p.alpha)}, {_f(p.beta)})" for p in points) + "]"


def format_report(report: ObstructionReport, extra_config: dict | None = None) -> str:
    """Structured text: ``key: value`` lines with indented per-n blocks."""
    cfg = report.config
    lines = [
        "report: pillowcase obstruction",
        f"tool_version: {__version__}",
        f"knot: {report.label}",
        "config:",
    ]
    for k, v in sorted({**cfg.__dict__, **(extra_config or {})}.items()):
        lines.append(f"  {k}: {v}")
    lines.append("sample:")
    for k, v in report.sample_sizes.items():
        lines.append(f"  {k}: {v}")
    lines.append(f"  image_points: {len(report.image)}")
    s = report.slices
    lines += [
        "nullhomotopy_slices:",
        f"  alpha_0: {SliceCheck.word(s.alpha_zero)}",
        f"  alpha_0_violations: {_pts(s.witnesses_zero)}",
        f"  alpha_pi: {SliceCheck.word(s.alpha_pi)}",
        f"  alpha_pi_violations: {_pts(s.witnesses_pi)}",
        "zero_surgery_slice:",
        f"  verdict: {report.zero_surgery}",
        f"  points: {len(report.zero_surgery_points)}",
    ]
    for r in report.per_n:
        g = r.gamma
        lines += [
            f"n = {r.n}:",
            f"  line_plus: {r.line_plus.line}",
            f"    origin_hit: {bool(r.line_plus.origin)}",
            f"    other_hits: {_pts(r.line_plus.others)}",
            f"  line_minus: {r.line_minus.line}",
            f"    origin_hit: {bool(r.line_minus.origin)}",
            f"    other_hits: {_pts(r.line_minus.others)}",
            "  gamma:",
            f"    verdict: {g.verdict}",
            f"    min_distance: {_f(g.min_distance)}",
            f"    hits: {_pts(g.hits)}",
            f"    certified: {g.certified}",
            f"    interior_avoids_orbifold_points: {g.avoids_orbifold}",
            f"    sampling_spacing: {_f(g.sampling_spacing)}",
        ]
    lines.append("interpretation:")
    lines += [f"  - {t}" for t in report.interpretations]
    lines.append("cross_check:")
    lines += [f"  - {t}" for t in report.cross_checks]
    return "\n".join(lines) + "\n"
