"""The pillowcase: (R/2piZ)^2 modulo (a, b) -> (-a, -b).

Canonical form: alpha in [0, pi]; beta in [0, pi] on the two edges alpha = 0, pi,
beta in [0, 2pi) otherwise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from scipy.spatial import cKDTree

from .presentation import Word
from .repvariety import RepresentationPoint
from .su2 import diagonalize_commuting_pair, evaluate_word

TWO_PI = 2 * math.pi
SNAP = 1e-12
DISJOINT_TOL = 1e-3
SLICE_TOL = 1e-4


def _circ(x):
    """Distance from x to the nearest multiple of 2pi."""
    r = np.mod(x, TWO_PI)
    return np.minimum(r, TWO_PI - r)


@dataclass(frozen=True, order=True)
class PillowcasePoint:
    alpha: float
    beta: float

    def __iter__(self):
        return iter((self.alpha, self.beta))


def canonicalize(alpha: float, beta: float) -> PillowcasePoint:
    a = math.fmod(alpha, TWO_PI) % TWO_PI
    b = math.fmod(beta, TWO_PI) % TWO_PI
    if a > math.pi + SNAP:
        a, b = TWO_PI - a, (TWO_PI - b) % TWO_PI
    if a < SNAP or a > TWO_PI - SNAP:
        a = 0.0
    elif abs(a - math.pi) <= SNAP:
        a = math.pi
    if b > TWO_PI - SNAP:
        b = 0.0
    if a in (0.0, math.pi) and b > math.pi:
        b = TWO_PI - b
    return PillowcasePoint(a, b)


ORBIFOLD_POINTS = tuple(PillowcasePoint(a, b) for a in (0.0, math.pi) for b in (0.0, math.pi))


def is_orbifold_point(p: PillowcasePoint, tol: float = SNAP) -> bool:
    return min(distance(p, o) for o in ORBIFOLD_POINTS) <= tol


def distance(p: PillowcasePoint, q: PillowcasePoint) -> float:
    """Quotient metric: min over the two lifts of q of the flat torus distance."""
    best = math.inf
    for sgn in (1.0, -1.0):
        da = float(_circ(p.alpha - sgn * q.alpha))
        db = float(_circ(p.beta - sgn * q.beta))
        best = min(best, math.hypot(da, db))
    return best


def project(point: RepresentationPoint, meridian: Word, longitude: Word, tol: float = 1e-8) -> PillowcasePoint:
    g = evaluate_word(point.assignment, meridian)
    h = evaluate_word(point.assignment, longitude)
    return canonicalize(*diagonalize_commuting_pair(g, h, tol))


# -- surgery lines ------------------------------------------------------------------------


@dataclass(frozen=True)
class SurgeryLine:
    """{(a, b) : p a + q b = 0 mod 2pi}."""

    p: int
    q: int

    def __post_init__(self):
        if (self.p, self.q) == (0, 0) or math.gcd(self.p, self.q) != 1:
            raise ValueError(f"surgery line needs coprime (p, q), got ({self.p}, {self.q})")

    def residual(self, pt: PillowcasePoint) -> float:
        return abs(math.sin((self.p * pt.alpha + self.q * pt.beta) / 2))

    def distance(self, pt: PillowcasePoint) -> float:
        return float(_circ(self.p * pt.alpha + self.q * pt.beta)) / math.hypot(self.p, self.q)

    def format(self, a: str = "alpha", b: str = "beta") -> str:
        def term(c: int, v: str) -> str:
            return v if abs(c) == 1 else f"{abs(c)} {v}"

        parts = []
        for c, v in ((self.p, a), (self.q, b)):
            if c:
                sign = "-" if c < 0 else "+"
                parts.append(f"{sign} {term(c, v)}" if parts else ("-" if c < 0 else "") + term(c, v))
        return " ".join(parts) + " = 0"

    def __str__(self) -> str:
        return self.format()


@dataclass(frozen=True)
class LineIntersection:
    line: SurgeryLine
    tol: float
    origin: tuple[PillowcasePoint, ...]
    others: tuple[PillowcasePoint, ...]

    @property
    def only_origin(self) -> bool:
        return not self.others

    @property
    def empty(self) -> bool:
        return not self.origin and not self.others


def _dedupe_points(points: Iterable[PillowcasePoint], tol: float) -> tuple[PillowcasePoint, ...]:
    out: list[PillowcasePoint] = []
    for p in sorted(points):
        if not any(distance(p, q) <= tol for q in out):
            out.append(p)
    return tuple(out)


def line_intersection(image: Sequence[PillowcasePoint], line: SurgeryLine, tol: float = DISJOINT_TOL) -> LineIntersection:
    if tol <= 0:
        raise ValueError("tol must be positive")
    origin = PillowcasePoint(0.0, 0.0)
    hits = [p for p in image if line.distance(p) < tol]
    at_origin = [p for p in hits if distance(p, origin) < tol]
    rest = [p for p in hits if distance(p, origin) >= tol]
    return LineIntersection(line, tol, _dedupe_points(at_origin, tol), _dedupe_points(rest, tol))


# -- paths ----------------------------------------------------------------------------------


@dataclass(frozen=True)
class GammaPath:
    """Polyline in lift coordinates plus its canonical vertices.

    ``lift`` holds the vertices as written by the closed-form segments (not reduced
    mod the involution) so consecutive vertices are joined by straight segments.
    ``segments[i]`` is 0 for the vertical piece and 1 for the slope-n piece.
    """

    n: int | None
    lift: np.ndarray
    segments: tuple[int, ...]
    certified: bool
    vertices: tuple[PillowcasePoint, ...] = field(default=())

    def segment_residual(self, i: int) -> float:
        """How far lift vertex i is from its closed-form segment equation."""
        a, b = self.lift[i]
        n = self.n
        if self.segments[i] == 0:
            return abs(a - (0.0 if n % 2 else math.pi))
        shift = math.pi * (n - 1) if n % 2 else math.pi * n
        return abs(a - (n * b - shift))


def gamma_path(n: int, samples_per_segment: int = 64) -> GammaPath:
    """The path from (0, pi) to (pi, pi) along {alpha=0 or pi} and {alpha = n beta mod 2pi}."""
    if n < 1:
        raise ValueError("gamma_path needs n >= 1")
    k = max(int(samples_per_segment), 2)
    pi = math.pi
    if n % 2:
        lo = pi * (n - 1) / n
        b_vert = np.linspace(pi, lo, k)
        vert = np.column_stack([np.zeros(k), b_vert])
        b_diag = np.linspace(lo, pi, k)[1:]
        diag = np.column_stack([n * b_diag - pi * (n - 1), b_diag])
        lift = np.vstack([vert, diag])
        segs = (0,) * k + (1,) * (k - 1)
    else:
        hi = pi * (n + 1) / n
        b_diag = np.linspace(pi, hi, k)
        diag = np.column_stack([n * b_diag - pi * n, b_diag])
        b_vert = np.linspace(hi, pi, k)[1:]
        vert = np.column_stack([np.full(k - 1, pi), b_vert])
        lift = np.vstack([diag, vert])
        segs = (1,) * k + (0,) * (k - 1)
    lift[0] = (0.0, pi)
    lift[-1] = (pi, pi)
    verts = tuple(canonicalize(a, b) for a, b in lift)
    return GammaPath(n, lift, segs, certified=n >= 2, vertices=verts)


def user_path(points: Sequence[tuple[float, float]]) -> GammaPath:
    """Arbitrary polyline in lift coordinates; never certified."""
    lift = np.asarray(points, dtype=float)
    return GammaPath(None, lift, (0,) * len(lift), certified=False,
                     vertices=tuple(canonicalize(a, b) for a, b in lift))


def _lifts(pts: np.ndarray) -> np.ndarray:
    """All lifts of canonical points near the window [-2pi, 4pi]^2; shape (N, L, 2)."""
    shifts = np.array([(i, j) for i in (-1, 0, 1, 2) for j in (-1, 0, 1, 2)], dtype=float) * TWO_PI
    both = np.stack([pts, -pts], axis=1)  # (N, 2, 2)
    return (both[:, :, None, :] + shifts[None, None]).reshape(len(pts), -1, 2)


def distances_to_polyline(points: Sequence[PillowcasePoint], lift: np.ndarray) -> np.ndarray:
    """Quotient distance from each point to the polyline with the given lift vertices."""
    if len(points) == 0:
        return np.zeros(0)
    P = _lifts(np.array([[p.alpha, p.beta] for p in points]))  # (N, L, 2)
    A, B = lift[:-1], lift[1:]
    if len(lift) == 1:
        A = B = lift
    d = B - A
    dd = np.einsum("si,si->s", d, d)
    rel = P[:, :, None, :] - A[None, None]  # (N, L, S, 2)
    t = np.where(dd > 0, np.einsum("nlsi,si->nls", rel, d) / np.where(dd > 0, dd, 1), 0.0)
    t = np.clip(t, 0.0, 1.0)
    closest = A[None, None] + t[..., None] * d[None, None]
    dist = np.linalg.norm(P[:, :, None, :] - closest, axis=-1)
    return dist.min(axis=(1, 2))


def _winding(poly: np.ndarray, c: np.ndarray) -> float:
    v = poly - c
    ang = np.arctan2(v[:, 1], v[:, 0])
    dang = np.diff(np.concatenate([ang, ang[:1]]))
    dang = (dang + math.pi) % TWO_PI - math.pi
    return float(dang.sum() / TWO_PI)


def homotopy_heuristic(path: GammaPath) -> bool:
    """Closed loop path + horizontal return must not wind around any orbifold lift."""
    if len(path.lift) < 2:
        return False
    start, end = path.lift[0], path.lift[-1]
    if not (np.allclose(start, (0, math.pi)) and np.allclose(end, (math.pi, math.pi))):
        return False
    back = np.column_stack([np.linspace(math.pi, 0, 32)[1:-1], np.full(30, math.pi)])
    loop = np.vstack([path.lift, back])
    for i in range(-2, 5):
        for j in range(-2, 5):
            c = np.array([i * math.pi, j * math.pi])
            if np.min(np.linalg.norm(loop - c, axis=1)) < 1e-9:
                continue
            if abs(_winding(loop, c)) > 0.5:
                return False
    return True


@dataclass(frozen=True)
class DisjointnessReport:
    disjoint: bool
    min_distance: float
    tol: float
    hits: tuple[PillowcasePoint, ...]
    image_size: int
    sampling_spacing: float
    certified: bool
    avoids_orbifold: bool
    homotopy_ok: bool

    @property
    def verdict(self) -> str:
        return "DISJOINT" if self.disjoint else "NOT-DISJOINT"


def _spacing(image: Sequence[PillowcasePoint]) -> float:
    if len(image) < 2:
        return math.inf
    pts = np.array([[p.alpha, p.beta] for p in image])
    d, _ = cKDTree(pts).query(pts, k=2)
    return float(np.median(d[:, 1]))


def interior_avoids_orbifold(path: GammaPath, tol: float = 1e-9) -> bool:
    return all(min(distance(v, o) for o in ORBIFOLD_POINTS) > tol for v in path.vertices[1:-1])


def path_disjointness(image: Sequence[PillowcasePoint], path: GammaPath, tol: float = DISJOINT_TOL) -> DisjointnessReport:
    image = list(image)
    d = distances_to_polyline(image, path.lift)
    min_d = float(d.min()) if len(d) else math.inf
    hits = _dedupe_points([p for p, di in zip(image, d) if di <= tol], tol)
    avoids = interior_avoids_orbifold(path)
    homotopy = path.certified or homotopy_heuristic(path)
    return DisjointnessReport(
        disjoint=min_d > tol,
        min_distance=min_d,
        tol=tol,
        hits=hits,
        image_size=len(image),
        sampling_spacing=_spacing(image),
        certified=path.certified,
        avoids_orbifold=avoids,
        homotopy_ok=homotopy,
    )


@dataclass(frozen=True)
class SliceCheck:
    alpha_zero: bool
    alpha_pi: bool
    witnesses_zero: tuple[PillowcasePoint, ...]
    witnesses_pi: tuple[PillowcasePoint, ...]
    tol: float

    @staticmethod
    def word(ok: bool) -> str:
        return "PASS" if ok else "FAIL"


def nullhomotopy_slice_check(image: Sequence[PillowcasePoint], tol: float = SLICE_TOL) -> SliceCheck:
    """Points with alpha = 0 (resp. pi) must have beta = 0."""
    bad0 = [p for p in image if p.alpha < tol and _circ(p.beta) >= tol]
    badpi = [p for p in image if abs(p.alpha - math.pi) < tol and _circ(p.beta) >= tol]
    return SliceCheck(not bad0, not badpi, _dedupe_points(bad0, tol), _dedupe_points(badpi, tol), tol)
