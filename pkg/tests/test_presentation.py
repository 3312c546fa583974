import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from su2pillow.presentation import (
    GroupRingElement,
    PresentationError,
    Word,
    builtin_presentation,
    catalog_from_key,
    exponent_sums,
    fox_derivative,
    parse_presentation,
    parse_word,
    torus_knot,
)

X, Y = Word.generator(0), Word.generator(1)

letters = st.lists(st.tuples(st.integers(0, 2), st.sampled_from([1, -1])), max_size=12)


def test_parse_word_examples():
    assert parse_word("x0 x1 x0^-1").letters == ((0, 1), (1, 1), (0, -1))
    assert parse_word("x0 x0^-1") == Word()
    assert parse_word("x0 x0 x1^-1 x1^-1 x1^-1") == X ** 2 * Y ** -3
    assert parse_word("x1^3") == Y ** 3
    assert parse_word("1") == Word()


@pytest.mark.parametrize("text", ["y0", "x", "x0^", "x-1"])
def test_parse_word_rejects_garbage(text):
    with pytest.raises(PresentationError):
        parse_word(text)


def test_parse_word_range_check():
    with pytest.raises(PresentationError):
        parse_word("x2", generator_count=2)


def test_word_str_round_trip():
    w = X * Y.inverse() * X ** 3
    assert parse_word(str(w)) == w
    assert str(Word()) == "1"


def test_fox_examples():
    w = X * Y * X.inverse()
    one = GroupRingElement.one()
    assert fox_derivative(w, 0) == one - GroupRingElement.from_terms([(1, w)])
    assert fox_derivative(w, 1) == GroupRingElement.from_terms([(1, X)])
    expect = GroupRingElement.from_terms([(1, X ** k) for k in range(5)])
    assert fox_derivative(X ** 5, 0) == expect


def test_builtin_catalog():
    t = builtin_presentation("torus_knot", 2, 3)
    assert t.relators[0].word == X ** 2 * Y ** -3
    mu, lam = t.peripheral
    assert mu == X * Y.inverse()
    assert lam == X ** 2 * mu ** -6
    c = catalog_from_key("cyclic:5")
    assert c.generator_count == 1 and c.relators[0].word == X ** 5
    t3 = catalog_from_key("three_torus_twisted")
    assert [r.target_sign for r in t3.relators] == [-1, 1, 1]
    assert t3.is_twisted


@pytest.mark.parametrize("key", ["nope", "torus_knot:2", "cyclic:a", "torus_knot:2:4"])
def test_catalog_errors(key):
    with pytest.raises(PresentationError):
        catalog_from_key(key)


def test_exponent_sums_examples():
    assert list(exponent_sums(X * Y * X.inverse())) == [0, 1]
    assert list(exponent_sums(torus_knot(2, 3).longitude)) == [-4, 6]
    assert list(exponent_sums(Word(), 3)) == [0, 0, 0]


@pytest.mark.parametrize("p,q", [(2, 3), (2, 5), (3, 4), (3, 5), (2, 7)])
def test_torus_knot_peripheral_homology(p, q):
    t = torus_knot(p, q)
    ab = np.array([q, p])
    assert exponent_sums(t.meridian, 2) @ ab == 1
    assert exponent_sums(t.longitude, 2) @ ab == 0
    assert t.longitude_nullhomologous()


def test_presentation_text_round_trip():
    t = torus_knot(2, 5)
    back = parse_presentation(t.to_text())
    assert back == t


def test_presentation_file_errors():
    with pytest.raises(PresentationError):
        parse_presentation("generators: 1\nrelator: x3\n")
    with pytest.raises(PresentationError):
        parse_presentation("generators: 1\nbogus: x0\n")


@given(letters)
def test_reduction_idempotent_and_shortening(ls):
    w = Word(tuple(ls))
    assert Word(w.letters) == w
    assert len(w) <= len(ls)
    assert all(a != (b[0], -b[1]) for a, b in zip(w.letters, w.letters[1:]))


@settings(max_examples=1000)
@given(letters, letters, st.integers(0, 2))
def test_fox_product_rule(u, v, g):
    u, v = Word(tuple(u)), Word(tuple(v))
    assert fox_derivative(u * v, g) == fox_derivative(u, g) + u * fox_derivative(v, g)


@given(letters)
def test_fundamental_fox_identity(ls):
    w = Word(tuple(ls))
    one = GroupRingElement.one()
    total = GroupRingElement()
    for g in range(3):
        total = total + fox_derivative(w, g) * (GroupRingElement.from_terms([(1, Word.generator(g))]) - one)
    assert total == GroupRingElement.from_terms([(1, w)]) - one
