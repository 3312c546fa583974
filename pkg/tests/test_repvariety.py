import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from su2pillow.presentation import cyclic, three_torus_twisted, torus_knot, trivial_group
from su2pillow.repvariety import (
    DEGENERATE,
    NON_DEGENERATE,
    UNRESOLVED,
    BasinError,
    CohomologyDims,
    Component,
    SolverError,
    SweepConfig,
    cohomology_dims,
    component_verdict,
    newton_refine,
    nondegeneracy_check,
    residual,
    sweep_solve,
)
from su2pillow.su2 import SU2Element, qexp, qmul

I = SU2Element(0, 1, 0, 0)
J = SU2Element(0, 0, 1, 0)
ONE = SU2Element.identity()


def test_residual_examples():
    assert residual([ONE], cyclic(5)) == 0
    assert residual([I, J, ONE], three_torus_twisted()) < 1e-15
    assert math.isclose(residual([I], cyclic(5)), math.sqrt(2))


def test_newton_exact_start():
    p = newton_refine([I, J, ONE], three_torus_twisted())
    assert p.iterations == 0 and p.residual < 1e-15


def test_newton_perturbed_start():
    rng = np.random.default_rng(0)
    base = newton_refine([I, J, ONE], three_torus_twisted())
    d = rng.normal(size=(3, 3))
    d *= 1e-2 / np.linalg.norm(d)
    start = qmul(qexp(d), np.array([q.array() for q in (I, J, ONE)]))
    p = newton_refine(start, three_torus_twisted())
    assert p.iterations <= 10
    assert p.residual < 1e-10
    assert np.linalg.norm(np.subtract(p.fingerprint, base.fingerprint)) < 1e-6


def test_newton_basin_error():
    # x -> angle theta with |x^5 - 1| = 0.5
    theta = 2 * math.asin(0.25) / 5
    start = [SU2Element.diagonal(theta)]
    assert math.isclose(residual(start, cyclic(5)), 0.5)
    with pytest.raises(BasinError):
        newton_refine(start, cyclic(5))


def test_newton_unknown_gauge():
    with pytest.raises(ValueError):
        newton_refine([ONE], cyclic(5), gauge="weird")


def _analytic_cyclic(n):
    """Angle classes 2 pi k / n, 0 <= k <= n // 2, as traces of x."""
    return sorted(2 * math.cos(2 * math.pi * k / n) for k in range(n // 2 + 1))


@pytest.mark.parametrize("n", [2, 3, 5, 7])
def test_cyclic_components_match_oracle(n):
    s = sweep_solve(cyclic(n), config=SweepConfig(seeds=200))
    traces = sorted(s.points[c.members[0]].fingerprint[0] for c in s.components)
    assert len(s.components) == n // 2 + 1
    assert np.allclose(traces, _analytic_cyclic(n), atol=1e-8)


def test_cyclic5_dimensions(cyclic5_sample):
    s = cyclic5_sample
    by_trace = {round(s.points[c.members[0]].fingerprint[0], 6): c for c in s.components}
    assert by_trace[2.0].dimension == 0
    for t in (round(2 * math.cos(2 * math.pi / 5), 6), round(2 * math.cos(4 * math.pi / 5), 6)):
        assert by_trace[t].dimension == 2


def test_cohomology_examples():
    g = SU2Element.from_axis_angle((1, 0, 0), 4 * math.pi / 5)
    c = cohomology_dims(np.array([g.array()]), cyclic(5))
    assert (c.h0, c.z1, c.h1) == (1, 2, 0)
    c = cohomology_dims(np.array([ONE.array()]), cyclic(5))
    assert (c.h0, c.z1, c.h1) == (3, 0, 0)
    with pytest.raises(SolverError):
        cohomology_dims(np.array([I.array()]), cyclic(5))


def test_twisted_three_torus(t3_sample):
    s = t3_sample
    assert len(s.components) == 2
    tr_c = sorted(round(s.points[c.members[0]].fingerprint[2]) for c in s.components)
    assert tr_c == [-2, 2]
    assert all(p.cohomology.h0 == 0 for p in s.points)
    assert all(p.residual < 1e-10 for p in s.points)


def test_euler_identity_everywhere(cyclic5_sample, t3_sample, trefoil_fibres):
    for s in (cyclic5_sample, t3_sample, trefoil_fibres):
        for p in s.points:
            c = p.cohomology
            assert c.z1 == c.h1 - c.h0 + 3


def test_trefoil_arc(trefoil_fibres):
    irr = [p for p in trefoil_fibres.points if p.cohomology.h0 == 0]
    assert irr, "expected irreducible points"
    for p in irr:
        assert (p.cohomology.z1, p.cohomology.h1) == (4, 1)
        assert p.local_dimension == 4
    red = [p for p in trefoil_fibres.points if p.cohomology.h0 == 1]
    assert red and all(p.local_dimension == 3 for p in red)


def test_nondegeneracy_cyclic(cyclic5_sample):
    rep = nondegeneracy_check(cyclic5_sample)
    assert rep.manifold
    assert sorted(v.dimension for v in rep.components) == [0, 2, 2]
    assert {v.orbit_type for v in rep.components} == {"point", "2-sphere"}


def test_nondegeneracy_trivial_group():
    s = sweep_solve(trivial_group(), config=SweepConfig(seeds=20))
    rep = nondegeneracy_check(s)
    assert len(rep.components) == 1
    assert rep.components[0].verdict == NON_DEGENERATE


def test_degenerate_flag(cyclic5_sample):
    s = cyclic5_sample
    comp = next(c for c in s.components if c.dimension == 2)
    p = s.points[comp.members[0]]
    fake = p.__class__(**{**p.__dict__, "local_dimension": 1})
    pts = list(s.points)
    pts[comp.members[0]] = fake
    v = component_verdict(Component(comp.id, comp.members, (1,)), pts)
    assert v.verdict == DEGENERATE


def test_unresolved_without_data(cyclic5_sample):
    s = cyclic5_sample
    comp = s.components[0]
    p = s.points[comp.members[0]]
    pts = list(s.points)
    pts[comp.members[0]] = p.__class__(**{**p.__dict__, "cohomology": None})
    assert component_verdict(comp, pts).verdict == UNRESOLVED


def test_cohomology_dims_expected():
    c = CohomologyDims(1, 2, 0, (), ())
    assert c.expected_dimension == 2 and c.orbit_type == "2-sphere"


def test_sweep_is_deterministic():
    a = sweep_solve(cyclic(5), config=SweepConfig(seeds=50, random_seed=3))
    b = sweep_solve(cyclic(5), config=SweepConfig(seeds=50, random_seed=3))
    assert [p.fingerprint for p in a.points] == [p.fingerprint for p in b.points]


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2 ** 31), st.sampled_from(["t3", "c5"]))
def test_conjugation_reproduces_fingerprint(seed, which):
    rng = np.random.default_rng(seed)
    pres = three_torus_twisted() if which == "t3" else cyclic(5)
    start = [I, J, ONE] if which == "t3" else [SU2Element.diagonal(2 * math.pi / 5)]
    p = newton_refine(start, pres)
    k = SU2Element.from_array(qexp(rng.normal(size=3)))
    conj = [k * g * k.inverse() for g in p.assignment]
    q = newton_refine(conj, pres)
    assert np.linalg.norm(np.subtract(p.fingerprint, q.fingerprint)) < 1e-6


def test_trefoil_pinned_residuals(trefoil_fibres):
    assert all(p.residual < 1e-10 for p in trefoil_fibres.points)
    assert all(p.pin_angle is not None for p in trefoil_fibres.points)


def test_pinning_needs_peripheral():
    with pytest.raises(SolverError):
        sweep_solve(cyclic(3), meridian_grid=[0.1])
    with pytest.raises(ValueError):
        sweep_solve(torus_knot(2, 3), meridian_grid=[0.1], extra_starts=np.zeros((1, 2, 4)))
