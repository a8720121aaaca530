from fractions import Fraction

import pytest
from hypothesis import given, settings
import hypothesis.strategies as st

from tripleconst.padic_core import (
    INF,
    Mat2,
    PadicScalar,
    PrecisionError,
    decompose_corner,
    h_matrix,
    identity,
    in_K1,
    n_matrix,
    a_matrix,
    recompose,
    val,
    w_matrix,
)

PRIMES = st.sampled_from([2, 3, 5, 7])


def nonzero_rationals():
    num = st.integers(min_value=-10**6, max_value=10**6).filter(bool)
    den = st.integers(min_value=1, max_value=10**6)
    return st.builds(Fraction, num, den)


def test_valuation_examples():
    assert val(PadicScalar.from_rational(2, 12)) == 2
    assert val(PadicScalar.from_rational(5, 1)) == 0
    assert val(PadicScalar.from_rational(3, Fraction(1, 3))) == -1
    assert val(PadicScalar.zero(3)) == INF


def test_field_examples():
    p3 = PadicScalar.from_rational(3, Fraction(1, 3)) * PadicScalar.from_rational(3, 3)
    assert p3.to_fraction() == 1 and p3.v == 0
    two = PadicScalar.from_rational(2, 1) + PadicScalar.from_rational(2, 1)
    assert two.v == 1
    inv2 = PadicScalar.from_rational(5, 2).inverse()
    assert inv2.v == 0 and inv2.residue(1) == 3


@given(p=PRIMES, x=nonzero_rationals(), y=nonzero_rationals())
def test_arithmetic_matches_rationals(p, x, y):
    X, Y = PadicScalar.from_rational(p, x), PadicScalar.from_rational(p, y)
    assert (X * Y).to_fraction() == x * y
    assert (X / Y).to_fraction() == x / y
    assert (X - Y).to_fraction() == x - y
    assert (X * Y).v == X.v + Y.v
    if x + y != 0:
        assert (X + Y).v >= min(X.v, Y.v)


@given(p=PRIMES, x=nonzero_rationals())
def test_residue_is_unit_part(p, x):
    X = PadicScalar.from_rational(p, x)
    r = X.residue(4)
    unit = x / Fraction(p) ** X.v
    assert (unit.numerator - r * unit.denominator) % p**4 == 0


def test_cancellation_is_reported():
    x = PadicScalar.from_unit(3, 0, 1, 2)  # 1 + O(9)
    with pytest.raises(PrecisionError):
        x - PadicScalar.from_rational(3, 1)
    d = PadicScalar.from_unit(3, 0, 4, 2) - PadicScalar.from_rational(3, 1)
    assert d.v == 1 and d.N == 1 and d.absprec == 2


def test_precision_floor(monkeypatch):
    monkeypatch.setenv("PRECISION_FLOOR", "3")
    with pytest.raises(PrecisionError):
        PadicScalar.from_unit(3, 0, 4, 2) - PadicScalar.from_rational(3, 1)


def test_decompose_identity_and_unit_corner():
    p = 3
    dec = decompose_corner(identity(p), 2)
    assert dec.j == 2 and in_K1(dec.k, 2)
    g = Mat2.from_rationals(p, 1, 0, 1, 1)
    assert decompose_corner(g, 2).j == 0


def test_decompose_j0_cell_diagonal():
    # w n(x) a(y) (1 0; 1 1) with v(x + y) <= min(-m, v(y))
    p, m = 3, 2
    x, y = Fraction(1, 27), Fraction(1, 3)
    g = w_matrix(p) @ n_matrix(p, x) @ a_matrix(p, y) @ h_matrix(p, 0)
    dec = decompose_corner(g, m)
    assert dec.j == 0
    s = x + y
    assert (dec.a).to_fraction() == y / s
    assert (dec.d).to_fraction() == s


matrices = st.tuples(nonzero_rationals(), st.integers(-50, 50), nonzero_rationals(), nonzero_rationals())


@settings(max_examples=200)
@given(p=PRIMES, m=st.integers(0, 4), e=matrices)
def test_decompose_recomposes(p, m, e):
    a, b, c, d = e
    g = Mat2.from_rationals(p, a, b, c, d)
    if g.det().is_zero:
        return
    dec = decompose_corner(g, m)
    assert 0 <= dec.j <= m
    assert in_K1(dec.k, m)
    assert recompose(dec).equals(g)
