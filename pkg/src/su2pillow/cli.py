"""su2pillow command line.

Subcommands::

    solve       representation variety sweep (report + CSV)
    pillowcase  meridian-pinned sweep projected to the pillowcase (SVG/CSV)
    obstruct    full surgery obstruction report
    nondegen    per-component non-degeneracy verdicts
    gamma       the path gamma_n as CSV/SVG
    index       equivariant form analysis (--fixture section5 or --form FILE)
    filtered    filtered-map verification on a file, or a random property run

Exit codes: 0 success, 1 usage or input error, 2 solver failure.
"""

from __future__ import annotations

import argparse
import logging
import math
import sys
import time
from dataclasses import asdict, dataclass

import numpy as np

from . import __version__
from .equivariant import FormError, format_index_report, index_verdict, load_form, section5_fixture
from .export import path_csv, pillowcase_svg, points_csv, sample_csv
from .filtered import StructureError, is_isomorphism, load_filtered, property_run, tie_violation_instance, verify_structure
from .obstruction import AnalysisConfig, analyze, format_report
from .pillowcase import DISJOINT_TOL, SLICE_TOL, SurgeryLine, gamma_path, project
from .presentation import Presentation, PresentationError, catalog_from_key, load_presentation
from .repvariety import ACCEPT_TOL, DEDUPE_RADIUS, LINK_RADIUS, RANK_RTOL, SolverError, SweepConfig, nondegeneracy_check, sweep_solve

log = logging.getLogger("su2pillow")

EXIT_OK, EXIT_USAGE, EXIT_SOLVER = 0, 1, 2

TOLERANCES = {
    "accept_residual": ACCEPT_TOL,
    "rank_rtol": RANK_RTOL,
    "dedupe_radius": DEDUPE_RADIUS,
    "link_radius": LINK_RADIUS,
    "disjoint_tol": DISJOINT_TOL,
    "slice_tol": SLICE_TOL,
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


@dataclass(frozen=True)
class RunConfig:
    command: str
    source: str = ""
    seeds: int = 200
    grid: int = 512
    n_range: tuple[int, ...] = (1, 2, 3, 4, 5)
    random_seed: int = 0

    def __post_init__(self):
        if self.seeds < 1 or self.grid < 2:
            raise UsageError("--seeds must be >= 1 and --grid >= 2")

    def header(self, title: str) -> list[str]:
        lines = [f"report: {title}", f"tool_version: {__version__}", "run_config:"]
        lines += [f"  {k}: {v}" for k, v in asdict(self).items()]
        lines.append("tolerances:")
        lines += [f"  {k}: {v}" for k, v in TOLERANCES.items()]
        return lines


def parse_n_range(text: str) -> tuple[int, ...]:
    """``"1..5"``, ``"3"`` or ``"1,2,4"``."""
    try:
        if ".." in text:
            lo, hi = (int(v) for v in text.split(".."))
            vals = tuple(range(lo, hi + 1))
        else:
            vals = tuple(int(v) for v in text.split(","))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad n range {text!r}") from exc
    if not vals or min(vals) < 1:
        raise argparse.ArgumentTypeError("n values must be >= 1")
    return vals


def _presentation(args) -> tuple[Presentation, str]:
    if args.catalog and args.presentation:
        raise UsageError("give either --catalog or --presentation, not both")
    try:
        if args.catalog:
            return catalog_from_key(args.catalog), args.catalog
        if args.presentation:
            return load_presentation(args.presentation), args.presentation
    except OSError as exc:
        raise UsageError(f"cannot read presentation: {exc}") from exc
    except PresentationError as exc:
        raise UsageError(str(exc)) from exc
    raise UsageError("one of --catalog or --presentation is required")


def _emit(path: str | None, text: str):
    if path is None:
        sys.stdout.write(text)
    else:
        _save(path, text)


def _save(path: str | None, text: str):
    if path:
        with open(path, "w", newline="\n", encoding="utf-8") as fh:
            fh.write(text)


# -- subcommands ---------------------------------------------------------------------------


def cmd_solve(args) -> int:
    pres, src = _presentation(args)
    rc = RunConfig("solve", src, args.seeds, random_seed=args.seed)
    sample = sweep_solve(pres, config=SweepConfig(seeds=args.seeds, random_seed=args.seed))
    lines = rc.header("representation variety sweep")
    lines += [f"presentation: {pres.label}", f"starts: {sample.starts}", f"converged: {sample.converged}",
              f"points: {len(sample.points)}", f"components: {len(sample.components)}"]
    for c in sample.components:
        p = sample.points[c.members[0]]
        coh = p.cohomology
        tr = ", ".join(f"{v:.10f}" for v in p.fingerprint)
        lines.append(f"  component {c.id}: size={len(c.members)} dimension={c.dimension} "
                     f"h0={coh.h0} z1={coh.z1} h1={coh.h1} orbit={coh.orbit_type} traces=[{tr}]")
    lines.append(f"max_residual: {max((p.residual for p in sample.points), default=0.0):.3e}")
    _emit(args.out, "\n".join(lines) + "\n")
    _save(args.csv, sample_csv(sample))
    return EXIT_OK


def cmd_nondegen(args) -> int:
    pres, src = _presentation(args)
    rc = RunConfig("nondegen", src, args.seeds, random_seed=args.seed)
    sample = sweep_solve(pres, config=SweepConfig(seeds=args.seeds, random_seed=args.seed))
    rep = nondegeneracy_check(sample)
    lines = rc.header("non-degeneracy")
    lines += [f"presentation: {pres.label}", f"scope: {rep.label}", f"components: {len(rep.components)}"]
    for v in rep.components:
        lines.append(f"  component {v.component}: {v.verdict} dimension={v.dimension} h0={v.h0} z1={v.z1} "
                     f"h1={v.h1} orbit={v.orbit_type} size={v.size}" + (f" note={v.note}" if v.note else ""))
    lines.append(f"smooth_manifold: {rep.manifold}")
    _emit(args.out, "\n".join(lines) + "\n")
    return EXIT_OK


def cmd_pillowcase(args) -> int:
    pres, src = _presentation(args)
    if pres.peripheral is None:
        raise UsageError("pillowcase needs a presentation with meridian and longitude")
    rc = RunConfig("pillowcase", src, args.seeds, args.grid, args.n, args.seed)
    grid = np.linspace(0.0, math.pi, args.grid)
    sample = sweep_solve(pres, meridian_grid=grid,
                         config=SweepConfig(seeds=args.seeds, random_seed=args.seed, estimate_dimensions=False))
    image = sorted(project(p, *pres.peripheral) for p in sample.points)
    lines = rc.header("pillowcase image") + [f"presentation: {pres.label}", f"image_points: {len(image)}"]
    _emit(args.out, "\n".join(lines) + "\n")
    _save(args.csv, points_csv(image))
    lines_drawn = [SurgeryLine(1, n) for n in args.n] if args.lines else []
    _save(args.svg, pillowcase_svg(image, lines_drawn, title=pres.label))
    return EXIT_OK


def cmd_obstruct(args) -> int:
    pres, src = _presentation(args)
    if pres.peripheral is None:
        raise UsageError("obstruct needs a presentation with meridian and longitude")
    cfg = AnalysisConfig(n_range=args.n, grid_size=args.grid, seeds_per_fiber=args.seeds,
                         line_seeds=args.line_seeds, random_seed=args.seed)
    report = analyze(pres, cfg)
    extra = {"source": src, "tolerances": dict(TOLERANCES)}
    _emit(args.out, format_report(report, extra))
    _save(args.csv, points_csv(report.image))
    paths = [gamma_path(n) for n in args.n if n >= 2][:1]
    lines = [SurgeryLine(1, n) for n in args.n[:1]]
    _save(args.svg, pillowcase_svg(report.image, lines, paths, title=pres.label))
    return EXIT_OK


def cmd_gamma(args) -> int:
    if len(args.n) != 1:
        raise UsageError("gamma takes a single --n")
    n = args.n[0]
    path = gamma_path(n, args.samples)
    rc = RunConfig("gamma", f"gamma_{n}", n_range=(n,))
    lines = rc.header("gamma path")
    worst = max(path.segment_residual(i) for i in range(len(path.lift)))
    lines += [f"n: {n}", f"vertices: {len(path.lift)}", f"certified: {path.certified}",
              f"start: ({path.lift[0][0]:.17g}, {path.lift[0][1]:.17g})",
              f"end: ({path.lift[-1][0]:.17g}, {path.lift[-1][1]:.17g})",
              f"max_segment_residual: {worst:.3e}"]
    _emit(args.out, "\n".join(lines) + "\n")
    _save(args.csv, path_csv(path))
    _save(args.svg, pillowcase_svg((), [SurgeryLine(1, -n)], [path], title=f"γ_{n}"))
    return EXIT_OK


def cmd_index(args) -> int:
    if bool(args.fixture) == bool(args.form):
        raise UsageError("give exactly one of --fixture or --form")
    try:
        form = section5_fixture() if args.fixture else load_form(args.form)
    except OSError as exc:
        raise UsageError(f"cannot read form: {exc}") from exc
    except (FormError, ValueError) as exc:
        raise UsageError(str(exc)) from exc
    weights = [int(w) for w in args.weights.split(",")]
    verdict = index_verdict(form, weights)
    head = [f"report: equivariant index", f"tool_version: {__version__}",
            f"source: {args.fixture or args.form}", "tolerances:", "  sign_rtol: 1e-10"]
    _emit(args.out, "\n".join(head) + "\n" + format_index_report(form, verdict, weights))
    return EXIT_OK


def cmd_filtered(args) -> int:
    lines = [f"report: filtered map", f"tool_version: {__version__}"]
    if args.input:
        try:
            m = load_filtered(args.input)
        except OSError as exc:
            raise UsageError(f"cannot read input: {exc}") from exc
        except (StructureError, ValueError) as exc:
            raise UsageError(str(exc)) from exc
        check = verify_structure(m)
        lines += [f"input: {args.input}", f"n: {m.n}", f"structure: {check}"]
        if check.passed:
            res = is_isomorphism(m)
            lines.append(f"isomorphism: {res.invertible} (neumann terms {res.terms})")
            lines.append("inverse:")
            lines += ["  " + " ".join(str(v) for v in row) for row in res.inverse]
    else:
        t = time.perf_counter()
        run = property_run(args.random, args.seed, args.max_n)
        tie, witness = tie_violation_instance()
        check = verify_structure(tie)
        lines += [f"random_instances: {run.instances}", f"max_n: {run.max_n}", f"seed: {args.seed}",
                  f"invertible: {run.invertible}", f"inverse_exact: {run.inverse_exact}",
                  f"det_matches: {run.det_matches}", f"nilpotency_bound: {run.nilpotency_ok}",
                  f"tie_violation: {check} expected={witness}",
                  f"passed: {run.passed and not check.passed and check.witness == witness}"]
        log.info("property run took %.2fs", time.perf_counter() - t)
    _emit(args.out, "\n".join(lines) + "\n")
    return EXIT_OK


# -- parser --------------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="su2pillow", description="SU(2) character varieties and pillowcase surgery obstructions")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    def source(sp):
        sp.add_argument("--catalog", help="builtin key, e.g. torus_knot:2:3, cyclic:5, three_torus_twisted")
        sp.add_argument("--presentation", help="presentation file")
        sp.add_argument("--seed", type=int, default=0, help="random seed (default 0)")
        sp.add_argument("--out", help="report path (default stdout)")

    sp = sub.add_parser("solve", help="representation variety sweep")
    source(sp)
    sp.add_argument("--seeds", type=int, default=200)
    sp.add_argument("--csv")
    sp.set_defaults(func=cmd_solve)

    sp = sub.add_parser("nondegen", help="non-degeneracy verdicts")
    source(sp)
    sp.add_argument("--seeds", type=int, default=200)
    sp.set_defaults(func=cmd_nondegen)

    sp = sub.add_parser("pillowcase", help="pillowcase image of a knot exterior")
    source(sp)
    sp.add_argument("--seeds", type=int, default=50, help="starts per meridian angle")
    sp.add_argument("--grid", type=int, default=512)
    sp.add_argument("--n", type=parse_n_range, default=(1,))
    sp.add_argument("--lines", action="store_true", help="draw alpha + n beta = 0")
    sp.add_argument("--svg")
    sp.add_argument("--csv")
    sp.set_defaults(func=cmd_pillowcase)

    sp = sub.add_parser("obstruct", help="surgery obstruction report")
    source(sp)
    sp.add_argument("--seeds", type=int, default=50, help="starts per meridian angle")
    sp.add_argument("--line-seeds", type=int, default=200)
    sp.add_argument("--grid", type=int, default=512)
    sp.add_argument("--n", type=parse_n_range, default=(1, 2, 3, 4, 5))
    sp.add_argument("--svg")
    sp.add_argument("--csv")
    sp.set_defaults(func=cmd_obstruct)

    sp = sub.add_parser("gamma", help="emit gamma_n")
    sp.add_argument("--n", type=parse_n_range, required=True)
    sp.add_argument("--samples", type=int, default=64, help="vertices per segment")
    sp.add_argument("--out")
    sp.add_argument("--svg")
    sp.add_argument("--csv")
    sp.set_defaults(func=cmd_gamma)

    sp = sub.add_parser("index", help="equivariant intersection form analysis")
    sp.add_argument("--fixture", choices=["section5"])
    sp.add_argument("--form", help="matrix rows plus a 'perm:' line")
    sp.add_argument("--weights", default="0,2", help="adjoint rotation weights (default 0,2)")
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_index)

    sp = sub.add_parser("filtered", help="filtered-map verification")
    sp.add_argument("--input", help="filtered map file")
    sp.add_argument("--random", type=int, default=1000, help="random instances when no --input")
    sp.add_argument("--max-n", type=int, default=20)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_filtered)
    return p


def run(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise UsageError("a subcommand is required")
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                            format="%(levelname)s %(name)s: %(message)s")
        return args.func(args)
    except (UsageError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SolverError as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
