import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from su2pillow.equivariant import (
    EquivariantForm,
    FormError,
    circulant,
    coinvariants_form,
    cyclic_shift,
    index_verdict,
    isotypic_decomposition,
    parse_form,
    section5_fixture,
    signature,
)


def eye(n, s=1):
    return tuple(tuple(s if i == j else 0 for j in range(n)) for i in range(n))


def test_circulant_fixture_isotypic():
    rep = isotypic_decomposition(section5_fixture())
    assert rep.k == 5
    assert [p.dimension for p in rep.pieces] == [1] * 5
    assert rep.piece(0).counts.as_tuple() == (1, 0, 0)
    for m in (1, 2, 3, 4):
        assert rep.piece(m).counts.as_tuple() == (0, 1, 0)
    for m, p in enumerate(rep.pieces):
        assert abs(p.eigenvalues[0] - (-1 + 2 * math.cos(2 * math.pi * m / 5))) < 1e-12


def test_identity_trivial_action():
    rep = isotypic_decomposition(EquivariantForm(eye(3), (0, 1, 2)))
    assert rep.k == 1
    assert rep.piece(0).dimension == 3 and rep.piece(0).counts.as_tuple() == (3, 0, 0)


def test_swap_negative():
    rep = isotypic_decomposition(EquivariantForm(eye(2, -1), (1, 0)))
    assert rep.k == 2
    assert rep.piece(0).dimension == 1 and rep.piece(0).counts.as_tuple() == (0, 1, 0)
    assert rep.piece(1).dimension == 1 and rep.piece(1).counts.as_tuple() == (0, 1, 0)


def test_coinvariant_examples():
    f = section5_fixture()
    c0 = coinvariants_form(f, 0)
    assert c0.dimension == 2 and c0.counts.positive == 2
    c1 = coinvariants_form(f, 1)
    assert c1.dimension == 2 and c1.counts.as_tuple() == (0, 2, 0)
    with pytest.raises(FormError):
        coinvariants_form(f, 5)


def test_free_action_has_no_signed_invariants():
    # sigma swaps with a sign, so no nonzero vector is fixed
    f = EquivariantForm(eye(2), (1, 0), signs=(1, -1))
    assert f.order == 4
    assert coinvariants_form(f, 0).dimension == 0


def test_index_verdicts():
    v = index_verdict(section5_fixture(), [0, 2])
    assert v.verdict == "NONZERO"
    assert v.invariant_witness == (1, 1, 1, 1, 1) and v.witness_square == 5
    assert v.twisted[0].counts.positive == 0
    assert "no positive part" in v.discrepancy
    neg = EquivariantForm(eye(5, -1), cyclic_shift(5))
    assert index_verdict(neg, [0, 2]).verdict == "ZERO"
    pos = EquivariantForm(eye(5), cyclic_shift(5))
    assert index_verdict(pos, [0, 2]).verdict == "NONZERO"


def test_invariant_square_is_exact():
    f = section5_fixture()
    assert f.square((1, 1, 1, 1, 1)) == 5
    assert isinstance(f.square((1, 1, 1, 1, 1)), int)


def test_validation():
    with pytest.raises(FormError):
        EquivariantForm(((1, 2), (3, 1)), (0, 1))
    with pytest.raises(FormError):
        EquivariantForm(((1, 0), (0, 2)), (1, 0))
    with pytest.raises(FormError):
        EquivariantForm(eye(2), (0, 0))


def test_parse_form():
    text = "-1 1 0 0 1\n1 -1 1 0 0\n0 1 -1 1 0\n0 0 1 -1 1\n1 0 0 1 -1\nperm: 1 2 3 4 0\n"
    assert parse_form(text) == section5_fixture()
    with pytest.raises(FormError):
        parse_form("1 0\n0 1\n")


rows = st.lists(st.integers(-4, 4), min_size=1, max_size=9)


@settings(max_examples=200)
@given(rows)
def test_circulant_properties(first):
    k = len(first)
    # symmetrize so that c_j = c_{-j}
    sym = [first[j] + first[(-j) % k] for j in range(k)]
    f = EquivariantForm(circulant(sym), cyclic_shift(k))
    rep = isotypic_decomposition(f)
    assert rep.total_dimension == k
    for m in range(k):
        symbol = sum(sym[j] * math.cos(2 * math.pi * m * j / k) for j in range(k))
        assert abs(rep.piece(m).eigenvalues[0] - symbol) < 1e-9
        assert rep.piece(m).counts == rep.piece(k - m).counts
    total = np.sum([p.counts.as_tuple() for p in rep.pieces], axis=0)
    assert tuple(total) == signature(f).as_tuple()
    for j in range(1, k):
        assert coinvariants_form(f, j).dimension == 2 * rep.piece(j).dimension
