"""Numerical SU(2) representation varieties of finitely presented groups.

Unknowns are one unit quaternion per generator. A perturbation ``xi`` in
``R^{3g}`` acts by ``rho(x_i) -> exp(xi_i) rho(x_i)``; with this convention the
Jacobian of ``rho(r)`` is the Fox Jacobian of ``r`` under the adjoint action,
which is also the twisted coboundary ``d^1`` used for the cohomology ranks.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components
from scipy.spatial import cKDTree

from .presentation import Presentation, Word
from .su2 import SU2Element, adjoint, eval_word_array, qexp, qinv, qlog, qmul, qnormalize, random_su2

log = logging.getLogger(__name__)

ACCEPT_TOL = 1e-10
BASIN = 0.3
RANK_RTOL = 1e-8
DEDUPE_RADIUS = 1e-6
LINK_RADIUS = 1e-2
PCA_STEP = 1e-4
PCA_RTOL = 1e-2

_ORBIT_TYPES = {3: "point", 1: "2-sphere", 0: "RP^3"}


class SolverError(RuntimeError):
    pass


class BasinError(SolverError):
    pass


class RankAmbiguityError(SolverError):
    def __init__(self, message: str, singular_values):
        super().__init__(message)
        self.singular_values = singular_values


@dataclass(frozen=True)
class SweepConfig:
    seeds: int = 200
    random_seed: int = 0
    lm_iterations: int = 200
    newton_iterations: int = 100
    # descent hands over to Newton well inside the 0.3 basin; full steps from
    # 0.3 overshoot on roughly one start in ten
    approach_tol: float = 1e-4
    dedupe_radius: float = DEDUPE_RADIUS
    link_radius: float = LINK_RADIUS
    estimate_dimensions: bool = True
    pca_samples: int | None = None

    def __post_init__(self):
        if self.seeds < 1:
            raise ValueError("seeds must be >= 1")
        if self.dedupe_radius <= 0 or self.link_radius <= 0:
            raise ValueError("radii must be positive")


@dataclass(frozen=True)
class CohomologyDims:
    h0: int
    z1: int
    h1: int
    d0_singular_values: tuple[float, ...] = ()
    d1_singular_values: tuple[float, ...] = ()
    ambiguous: bool = False

    @property
    def expected_dimension(self) -> int:
        """h1 - h0 + 3, the dimension R would have if it were non-degenerate here."""
        return self.h1 - self.h0 + 3

    @property
    def orbit_type(self) -> str:
        return _ORBIT_TYPES.get(self.h0, f"unexpected(h0={self.h0})")


@dataclass(frozen=True)
class RepresentationPoint:
    assignment: tuple[SU2Element, ...]
    residual: float
    fingerprint: tuple[float, ...]
    iterations: int = 0
    pin_angle: float | None = None
    cohomology: CohomologyDims | None = None
    local_dimension: int | None = None

    def array(self) -> np.ndarray:
        return np.stack([x.array() for x in self.assignment])


@dataclass(frozen=True)
class Component:
    id: int
    members: tuple[int, ...]
    dimensions: tuple[int, ...]

    @property
    def dimension(self) -> int | None:
        return max(self.dimensions) if self.dimensions else None


@dataclass(frozen=True)
class RepVarietySample:
    presentation: Presentation
    points: tuple[RepresentationPoint, ...]
    components: tuple[Component, ...]
    config: SweepConfig = field(default_factory=SweepConfig)
    starts: int = 0
    converged: int = 0


# -- the nonlinear system ----------------------------------------------------------


def _constraints(presentation: Presentation) -> list[tuple[Word, np.ndarray]]:
    return [
        (r.word, np.array([float(r.target_sign), 0.0, 0.0, 0.0])) for r in presentation.relators
    ]


def _system(Q: np.ndarray, constraints, pins=None):
    """Error vector (log of rho(w) T^-1), Fox Jacobian and operator-norm residual."""
    S, g = Q.shape[0], Q.shape[1]
    cons = list(constraints) + ([pins] if pins is not None else [])
    m = len(cons)
    err = np.zeros((S, 3 * m))
    J = np.zeros((S, 3 * m, 3 * g))
    res = np.zeros(S)
    for j, (w, T) in enumerate(cons):
        P = np.zeros((S, 4))
        P[:, 0] = 1.0
        rows = slice(3 * j, 3 * j + 3)
        for h, s in w:
            cols = slice(3 * h, 3 * h + 3)
            if s == 1:
                J[:, rows, cols] += adjoint(P)
                P = qmul(P, Q[:, h])
            else:
                P = qmul(P, qinv(Q[:, h]))
                J[:, rows, cols] -= adjoint(P)
        T = np.broadcast_to(T, P.shape)
        err[:, rows] = qlog(qmul(P, qinv(T)))
        res = np.maximum(res, np.linalg.norm(P - T, axis=-1))
    return err, J, res


def _apply(Q: np.ndarray, step: np.ndarray) -> np.ndarray:
    S, g = Q.shape[:2]
    return qnormalize(qmul(qexp(step.reshape(S, g, 3)), Q))


def _slice_pins(pins, idx):
    if pins is None:
        return None
    w, T = pins
    return (w, T[idx] if T.ndim == 2 else T)


def _levenberg_marquardt(Q, constraints, pins, iterations, target=BASIN):
    """Globalised descent until each row's residual is below ``target``."""
    Q = Q.copy()
    S, g = Q.shape[:2]
    lam = np.full(S, 1e-2)
    err, J, res = _system(Q, constraints, pins)
    cost = np.einsum("si,si->s", err, err)
    eye = np.eye(3 * g)
    for _ in range(iterations):
        active = np.flatnonzero(res >= target)
        if active.size == 0:
            break
        Ja, ea = J[active], err[active]
        A = np.einsum("smi,smj->sij", Ja, Ja) + lam[active, None, None] * eye
        grad = np.einsum("smi,sm->si", Ja, ea)
        step = -np.linalg.solve(A, grad[..., None])[..., 0]
        trial = _apply(Q[active], step)
        e2, J2, r2 = _system(trial, constraints, _slice_pins(pins, active))
        c2 = np.einsum("si,si->s", e2, e2)
        better = c2 < cost[active]
        idx = active[better]
        Q[idx], err[idx], J[idx], res[idx], cost[idx] = (
            trial[better], e2[better], J2[better], r2[better], c2[better])
        lam[idx] *= 0.3
        lam[active[~better]] *= 5.0
        np.clip(lam, 1e-12, 1e8, out=lam)
    return Q, res


def _newton(Q, constraints, pins, iterations, tol=1e-14):
    """Minimum-norm Gauss-Newton; returns refined batch, residuals, iteration counts."""
    Q = Q.copy()
    S = Q.shape[0]
    its = np.zeros(S, dtype=int)
    err, J, res = _system(Q, constraints, pins)
    best = res.copy()
    stall = np.zeros(S, dtype=int)
    for _ in range(iterations):
        active = np.flatnonzero((res > tol) & (stall < 3))
        if active.size == 0:
            break
        step = -np.einsum("sij,sj->si", np.linalg.pinv(J[active], rcond=1e-10), err[active])
        Q[active] = _apply(Q[active], step)
        its[active] += 1
        e2, J2, r2 = _system(Q[active], constraints, _slice_pins(pins, active))
        err[active], J[active], res[active] = e2, J2, r2
        improved = r2 < 0.5 * best[active]
        stall[active] = np.where(improved, 0, stall[active] + 1)
        best[active] = np.minimum(best[active], r2)
    return Q, res, its


# -- gauge fixing and invariants -------------------------------------------------


def _rotation_taking(u: np.ndarray, target: np.ndarray) -> np.ndarray:
    """Quaternion r with Ad(r) u = target for unit vectors u, target."""
    c = float(u @ target)
    if c < -1 + 1e-12:
        perp = np.cross(u, [0.0, 1.0, 0.0])
        if np.linalg.norm(perp) < 1e-6:
            perp = np.cross(u, [0.0, 0.0, 1.0])
        perp /= np.linalg.norm(perp)
        return np.concatenate([[0.0], perp])
    r = np.concatenate([[1.0 + c], np.cross(u, target)])
    return r / np.linalg.norm(r)


def gauge_fix(Q: np.ndarray, anchors: Sequence[Word] = ()) -> np.ndarray:
    """Conjugate so the first non-central anchor lies on the x-axis and the next
    non-parallel one lies in the xy-plane with positive y-component.

    Anchors are the given words (e.g. a pinned meridian) followed by the generators.
    """
    g = Q.shape[0]
    words = list(anchors) + [Word.generator(i) for i in range(g)]

    def values(Qc):
        return [eval_word_array(Qc, w) for w in words]

    vals = values(Q)
    first = next((v for v in vals if np.linalg.norm(v[1:]) > 1e-9), None)
    if first is None:
        return Q.copy()
    r = _rotation_taking(first[1:] / np.linalg.norm(first[1:]), np.array([1.0, 0.0, 0.0]))
    Q = qmul(qmul(r, Q), qinv(r))
    for v in values(Q):
        yz = v[2:]
        if np.linalg.norm(yz) > 1e-9:
            phi = math.atan2(yz[1], yz[0])
            rot = np.array([math.cos(-phi / 2), math.sin(-phi / 2), 0.0, 0.0])
            Q = qmul(qmul(rot, Q), qinv(rot))
            break
    return Q


def fingerprints(Q: np.ndarray) -> np.ndarray:
    """Traces of generators and of products of generator pairs (i < j); batched."""
    g = Q.shape[-2]
    cols = [2 * Q[..., i, 0] for i in range(g)]
    for i in range(g):
        for j in range(i + 1, g):
            cols.append(2 * qmul(Q[..., i, :], Q[..., j, :])[..., 0])
    return np.stack(cols, axis=-1)


def residual(assignment, presentation: Presentation) -> float:
    Q = _as_array(assignment)[None]
    return float(_system(Q, _constraints(presentation))[2][0])


def _as_array(assignment) -> np.ndarray:
    if isinstance(assignment, np.ndarray):
        return assignment.astype(float)
    return np.stack([x.array() if isinstance(x, SU2Element) else np.asarray(x, float) for x in assignment])


def _make_point(Q, res, its, pin_angle=None) -> RepresentationPoint:
    return RepresentationPoint(
        assignment=tuple(SU2Element.from_array(q) for q in Q),
        residual=float(res),
        fingerprint=tuple(float(v) for v in fingerprints(Q)),
        iterations=int(its),
        pin_angle=pin_angle,
    )


def _pin(presentation: Presentation, angle: float | np.ndarray):
    if presentation.peripheral is None:
        raise SolverError("meridian pinning needs peripheral words")
    angle = np.asarray(angle, dtype=float)
    T = np.stack([np.cos(angle), np.sin(angle), 0 * angle, 0 * angle], axis=-1)
    return presentation.meridian, T


def newton_refine(
    start,
    presentation: Presentation,
    gauge: str = "axis",
    pin_angle: float | None = None,
    max_iterations: int = 100,
    basin: float = BASIN,
) -> RepresentationPoint:
    """Refine a near-solution to residual < 1e-10 and gauge-fix it.

    ``gauge`` is ``"axis"`` (axis pinning) or ``"none"``. With ``pin_angle`` the
    meridian is additionally constrained to ``cos a + i sin a``.
    """
    Q0 = qnormalize(_as_array(start))[None]
    cons = _constraints(presentation)
    pins = _pin(presentation, pin_angle) if pin_angle is not None else None
    r0 = _system(Q0, cons, pins)[2][0]
    if r0 >= basin:
        raise BasinError(f"start residual {r0:.3g} outside the Newton basin ({basin})")
    Q, res, its = _newton(Q0, cons, pins, max_iterations)
    if res[0] >= ACCEPT_TOL:
        raise SolverError(f"Newton did not converge (residual {res[0]:.3e} after {its[0]} steps)")
    Qf = Q[0]
    if gauge == "axis":
        Qf = gauge_fix(Qf, [presentation.meridian] if pins is not None else [])
    elif gauge != "none":
        raise ValueError(f"unknown gauge {gauge!r}")
    res_f = _system(Qf[None], cons, pins)[2][0]
    return _make_point(Qf, res_f, its[0], pin_angle)


def solve_batch(starts: np.ndarray, presentation: Presentation, pin_angles=None, config: SweepConfig = SweepConfig()):
    """Run descent + Newton on a batch of starts; returns (Q, residual, iterations)."""
    cons = _constraints(presentation)
    pins = _pin(presentation, np.asarray(pin_angles)) if pin_angles is not None else None
    Q, _ = _levenberg_marquardt(qnormalize(starts), cons, pins, config.lm_iterations, config.approach_tol)
    return _newton(Q, cons, pins, config.newton_iterations)


# -- cohomology ---------------------------------------------------------------------


def _rank(s: np.ndarray) -> tuple[int, bool]:
    if s.size == 0:
        return 0, False
    thr = RANK_RTOL * max(float(s.max()), 1.0)
    rank = int(np.sum(s > thr))
    ambiguous = bool(np.any((s > thr / 10) & (s < thr * 10)))
    return rank, ambiguous


def _cohomology_batch(Q: np.ndarray, presentation: Presentation) -> list[CohomologyDims]:
    S, g = Q.shape[:2]
    cons = _constraints(presentation)
    if cons:
        J = _system(Q, cons)[1]
        s1 = np.linalg.svd(J, compute_uv=False)
    else:
        s1 = np.zeros((S, 0))
    eye = np.eye(3)
    d0 = (eye - adjoint(Q)).reshape(S, 3 * g, 3)
    s0 = np.linalg.svd(d0, compute_uv=False)
    out = []
    for k in range(S):
        r0, a0 = _rank(s0[k])
        r1, a1 = _rank(s1[k])
        h0 = 3 - r0
        z1 = 3 * g - r1
        out.append(CohomologyDims(h0, z1, z1 - (3 - h0), tuple(map(float, s0[k])), tuple(map(float, s1[k])), a0 or a1))
    return out


def cohomology_dims(point: RepresentationPoint | np.ndarray, presentation: Presentation, strict: bool = True) -> CohomologyDims:
    """h0 = dim ker d0, z1 = dim ker d1 (Fox Jacobian under Ad), h1 = z1 - (3 - h0)."""
    Q = point.array() if isinstance(point, RepresentationPoint) else _as_array(point)
    res = residual(Q, presentation)
    if res >= ACCEPT_TOL:
        raise SolverError(f"cohomology needs an accepted point (residual {res:.3e})")
    dims = _cohomology_batch(Q[None], presentation)[0]
    if strict and dims.ambiguous:
        raise RankAmbiguityError(
            "singular value within a factor 10 of the rank threshold",
            (dims.d0_singular_values, dims.d1_singular_values),
        )
    return dims


# -- local dimension ------------------------------------------------------------------


def local_dimensions(
    Q: np.ndarray, presentation: Presentation, rng: np.random.Generator, samples: int | None = None
) -> np.ndarray:
    """Rank of the spread of nearby solutions, i.e. the local dimension of R.

    Each base point is pushed off by ``PCA_STEP`` in random Lie algebra directions
    and projected back with Newton; singular values of the displacements above
    ``PCA_RTOL * PCA_STEP`` count as tangent directions.
    """
    B, g = Q.shape[:2]
    K = samples or 2 * 3 * g + 4
    xi = rng.normal(size=(B, K, g, 3)) * PCA_STEP
    starts = qmul(qexp(xi), Q[:, None]).reshape(B * K, g, 4)
    cons = _constraints(presentation)
    refined, res, _ = _newton(starts, cons, None, 50)
    disp = qlog(qmul(refined.reshape(B, K, g, 4), qinv(Q[:, None]))).reshape(B, K, 3 * g)
    s = np.linalg.svd(disp, compute_uv=False)
    dims = np.sum(s > PCA_RTOL * PCA_STEP, axis=-1)
    bad = ~(res.reshape(B, K) < ACCEPT_TOL).all(axis=1)
    dims[bad] = -1
    return dims


# -- sweeps ------------------------------------------------------------------------------


def _dedupe(fp: np.ndarray, radius: float) -> list[int]:
    keep: list[int] = []
    if len(fp) == 0:
        return keep
    tree = cKDTree(fp)
    taken = np.zeros(len(fp), dtype=bool)
    for i in range(len(fp)):
        if taken[i]:
            continue
        keep.append(i)
        taken[tree.query_ball_point(fp[i], radius)] = True
    return keep


def _cluster(fp: np.ndarray, radius: float) -> np.ndarray:
    n = len(fp)
    if n == 0:
        return np.zeros(0, dtype=int)
    pairs = cKDTree(fp).query_pairs(radius, output_type="ndarray")
    graph = coo_matrix((np.ones(len(pairs)), (pairs[:, 0], pairs[:, 1])), shape=(n, n))
    _, labels = connected_components(graph, directed=False)
    # relabel by first appearance for deterministic ids
    order = {}
    return np.array([order.setdefault(l, len(order)) for l in labels])


def sweep_solve(
    presentation: Presentation,
    seeds: int | None = None,
    meridian_grid: Sequence[float] | None = None,
    config: SweepConfig | None = None,
    extra_starts: np.ndarray | None = None,
) -> RepVarietySample:
    """Random-start solve of rho(relators) = +-1, deduplicated up to conjugation.

    With ``meridian_grid`` every start is solved with rho(meridian) pinned to
    ``cos a + i sin a`` for each grid angle ``a`` (``seeds`` starts per angle).
    ``extra_starts`` (unpinned sweeps only) are appended to the random starts.
    """
    config = config or SweepConfig()
    if seeds is not None:
        config = replace(config, seeds=seeds)
    rng = np.random.default_rng(config.random_seed)
    g = presentation.generator_count

    if meridian_grid is not None:
        grid = np.asarray(list(meridian_grid), dtype=float)
        starts = random_su2(rng, (len(grid) * config.seeds, g))
        pin_angles = np.repeat(grid, config.seeds)
        group = np.repeat(np.arange(len(grid)), config.seeds)
        if extra_starts is not None:
            raise ValueError("extra_starts is only supported for unpinned sweeps")
    else:
        starts = random_su2(rng, (config.seeds, g))
        if extra_starts is not None and len(extra_starts):
            starts = np.concatenate([starts, np.asarray(extra_starts, float)])
        pin_angles = None
        group = np.zeros(len(starts), dtype=int)

    Q, res, its = solve_batch(starts, presentation, pin_angles, config)
    ok = np.flatnonzero(res < ACCEPT_TOL)
    log.info("%s: %d/%d starts converged", presentation.label, ok.size, len(starts))

    fp_all = fingerprints(Q[ok]) if ok.size else np.zeros((0, 1))
    kept: list[int] = []
    for gid in np.unique(group[ok]):
        sel = np.flatnonzero(group[ok] == gid)
        kept.extend(ok[sel[i]] for i in _dedupe(fp_all[sel], config.dedupe_radius))
    kept.sort()

    anchors = [presentation.meridian] if pin_angles is not None else []
    Qk = np.stack([gauge_fix(Q[i], anchors) for i in kept]) if kept else np.zeros((0, g, 4))
    points = []
    cons = _constraints(presentation)
    if kept:
        pins = _pin(presentation, pin_angles[kept]) if pin_angles is not None else None
        res_k = _system(Qk, cons, pins)[2]
        coh = _cohomology_batch(Qk, presentation)
        dims = (
            local_dimensions(Qk, presentation, rng, config.pca_samples)
            if config.estimate_dimensions
            else np.full(len(kept), -1)
        )
        for n, i in enumerate(kept):
            p = _make_point(Qk[n], res_k[n], its[i], None if pin_angles is None else float(pin_angles[i]))
            points.append(replace(p, cohomology=coh[n], local_dimension=None if dims[n] < 0 else int(dims[n])))

    fp = np.array([p.fingerprint for p in points]) if points else np.zeros((0, 1))
    labels = _cluster(fp, config.link_radius)
    components = []
    for c in range(int(labels.max()) + 1 if len(labels) else 0):
        members = tuple(int(i) for i in np.flatnonzero(labels == c))
        dims = tuple(points[i].local_dimension for i in members if points[i].local_dimension is not None)
        components.append(Component(c, members, dims))
    return RepVarietySample(presentation, tuple(points), tuple(components), config, len(starts), int(ok.size))


# -- non-degeneracy -------------------------------------------------------------------------

NON_DEGENERATE = "NON-DEGENERATE"
DEGENERATE = "DEGENERATE"
UNRESOLVED = "DEGENERATE-OR-UNRESOLVED"


@dataclass(frozen=True)
class ComponentVerdict:
    component: int
    verdict: str
    dimension: int | None
    h0: int | None
    z1: int | None
    h1: int | None
    orbit_type: str
    size: int
    note: str = ""


@dataclass(frozen=True)
class NondegeneracyReport:
    components: tuple[ComponentVerdict, ...]
    label: str = "sample-level"

    @property
    def manifold(self) -> bool:
        return all(c.verdict == NON_DEGENERATE for c in self.components)


def component_verdict(component: Component, points: Sequence[RepresentationPoint]) -> ComponentVerdict:
    pts = [points[i] for i in component.members]
    cohs = [p.cohomology for p in pts]
    dims = [p.local_dimension for p in pts]
    base = dict(component=component.id, size=len(pts))
    if any(c is None for c in cohs) or any(d is None for d in dims):
        return ComponentVerdict(verdict=UNRESOLVED, dimension=None, h0=None, z1=None, h1=None,
                                orbit_type="unknown", note="missing cohomology or dimension", **base)
    triples = {(c.h0, c.z1, c.h1) for c in cohs}
    h0, z1, h1 = sorted(triples)[0]
    orbit = _ORBIT_TYPES.get(h0, "unknown")
    dim = max(dims)
    if any(c.ambiguous for c in cohs):
        return ComponentVerdict(verdict=UNRESOLVED, dimension=dim, h0=h0, z1=z1, h1=h1,
                                orbit_type=orbit, note="ambiguous rank", **base)
    if len(triples) > 1:
        return ComponentVerdict(verdict=UNRESOLVED, dimension=dim, h0=h0, z1=z1, h1=h1,
                                orbit_type=orbit, note=f"inconsistent ranks {sorted(triples)}", **base)
    if any(d < c.z1 for d, c in zip(dims, cohs)):
        return ComponentVerdict(verdict=DEGENERATE, dimension=min(dims), h0=h0, z1=z1, h1=h1,
                                orbit_type=orbit, note="local dimension below z1", **base)
    if any(d != c.z1 for d, c in zip(dims, cohs)):
        return ComponentVerdict(verdict=UNRESOLVED, dimension=dim, h0=h0, z1=z1, h1=h1,
                                orbit_type=orbit, note="local dimension above z1", **base)
    return ComponentVerdict(verdict=NON_DEGENERATE, dimension=dim, h0=h0, z1=z1, h1=h1, orbit_type=orbit, **base)


def nondegeneracy_check(sample: RepVarietySample) -> NondegeneracyReport:
    return NondegeneracyReport(tuple(component_verdict(c, sample.points) for c in sample.components))
