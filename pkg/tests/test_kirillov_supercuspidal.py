from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
import hypothesis.strategies as st

from tripleconst.characters import RationalAngle
from tripleconst.kirillov_supercuspidal import (
    EpsilonData,
    ExceptionalTwistError,
    KirillovVector,
    act_borel,
    act_w,
    key_level,
    level_components,
    random_epsilon_data,
    sc_integral,
    trivial_key,
    unit_keys,
    whittaker_sc,
)
from tripleconst.padic_core import PadicScalar


def pw(p, k):
    return PadicScalar.uniformizer(p, k)


def test_act_borel_identity_and_shift():
    for p in (2, 3, 5):
        new = KirillovVector.newform(p)
        assert act_borel(new, 1, 0, 1).equals(new)
        # phi(p x) lives on the shell -1
        assert act_borel(new, pw(p, 1), 0, 1).support == [-1]
        assert act_borel(new, 1, 0, pw(p, 1)).support == [1]


@pytest.mark.parametrize("p", [2, 3, 5, 7])
def test_trivial_coefficient_of_psi_twist(p):
    # multiplicative mean of psi over p^-1 O^x
    new = KirillovVector.newform(p)
    assert sc_integral(new, Fraction(1, p)) == pytest.approx(-1 / (p - 1), abs=1e-13)
    assert sc_integral(new, 1) == pytest.approx(1)
    assert sc_integral(new, Fraction(1, p**2)) == pytest.approx(0, abs=1e-13)


@pytest.mark.parametrize("p,c", [(2, 2), (2, 3), (3, 2), (3, 3), (5, 2)])
def test_act_w_newform(p, c):
    rng = np.random.default_rng(p * c)
    for sign in (1, -1):
        eps = random_epsilon_data(p, c, rng, level_bound=3, C1=sign)
        out = act_w(KirillovVector.newform(p), eps)
        assert out.support == [-c]
        assert out(pw(p, -c)) == pytest.approx(sign)


@settings(max_examples=40, deadline=None)
@given(
    pc=st.sampled_from([(2, 2), (2, 3), (3, 2), (3, 3), (5, 2)]),
    seed=st.integers(0, 2**32 - 1),
    r=st.integers(-4, 4),
    idx=st.integers(0, 10**6),
)
def test_w_squared_is_identity(pc, seed, r, idx):
    p, c = pc
    rng = np.random.default_rng(seed)
    eps = random_epsilon_data(p, c, rng, level_bound=3)
    keys = unit_keys(p, 3)
    v = KirillovVector.basis(p, r, keys[idx % len(keys)])
    assert act_w(act_w(v, eps), eps).equals(v, tol=1e-12)


def test_twist_shifts():
    rng = np.random.default_rng(1)
    eps = random_epsilon_data(2, 3, rng, level_bound=3)
    assert act_w(KirillovVector.basis(2, 0, trivial_key(2)), eps).support == [-3]
    eps3 = random_epsilon_data(3, 3, rng, level_bound=3)
    k1 = next(k for k in unit_keys(3, 1) if key_level(3, k) == 1)
    assert act_w(KirillovVector.basis(3, 0, k1), eps3).support == [-3]
    k2 = next(k for k in unit_keys(3, 2) if key_level(3, k) == 2)
    assert act_w(KirillovVector.basis(3, 0, k2), eps3).support == [-4]


def test_exceptional_twist_raises():
    eps = random_epsilon_data(2, 4, np.random.default_rng(2), level_bound=3)
    k2 = next(k for k in unit_keys(2, 2) if key_level(2, k) == 2)
    with pytest.raises(ExceptionalTwistError):
        act_w(KirillovVector.basis(2, 0, k2), eps)


def test_epsilon_data_validation():
    p = 3
    vals = {k: RationalAngle(Fraction(0)) for k in unit_keys(p, 1)}
    EpsilonData(p, 2, vals, 1)
    k1 = next(k for k in vals if key_level(p, k) == 1)
    bad = dict(vals)
    bad[k1] = RationalAngle(Fraction(1, 8))
    with pytest.raises(ValueError):
        EpsilonData(p, 2, bad, 1)
    with pytest.raises(ValueError):
        EpsilonData(p, 1, vals, 1)


@pytest.mark.parametrize("p,c", [(2, 2), (2, 3), (3, 2), (3, 3), (5, 2)])
def test_whittaker_sc_support(p, c):
    eps = random_epsilon_data(p, c, np.random.default_rng(3 * p + c), level_bound=4)
    for l in range(3):
        for j in range(c + l, c + l + 2):
            v = whittaker_sc(l, j, eps)
            assert v.equals(KirillovVector.basis(p, l, trivial_key(p)), tol=1e-12)
    for j in range(c):
        v = whittaker_sc(0, j, eps)
        assert v.support and min(v.support) == min(0, 2 * j - c)


@pytest.mark.parametrize("p,c", [(2, 2), (2, 3), (3, 2), (3, 3)])
def test_sc_integral_values(p, c):
    rng = np.random.default_rng(7)
    for sign in (1, -1):
        eps = random_epsilon_data(p, c, rng, level_bound=4, C1=sign)
        # j = 0: C_1 psi(y) on shell -c, integrated against psi(-y)
        v0 = whittaker_sc(0, 0, eps)
        assert v0.support == [-c]
        assert sc_integral(v0, -1) == pytest.approx(sign, abs=1e-12)
        assert sc_integral(v0, 0) == pytest.approx(0, abs=1e-12)
        for l in range(3):
            assert sc_integral(whittaker_sc(l, c + l, eps), pw(p, -l)) == pytest.approx(1, abs=1e-12)


def test_j0_integrals_see_only_C1():
    p, c = 3, 2
    a = random_epsilon_data(p, c, np.random.default_rng(1), level_bound=4, C1=-1)
    b = random_epsilon_data(p, c, np.random.default_rng(2), level_bound=4, C1=-1)
    for l in range(3):
        for beta in (-1, Fraction(1, p), pw(p, -l), 0):
            va, vb = whittaker_sc(l, 0, a), whittaker_sc(l, 0, b)
            assert sc_integral(va, beta) == pytest.approx(sc_integral(vb, beta), abs=1e-12)


def test_sc_integral_needs_genuine_data():
    # at j = c - 1 the value -1/(q - 1) only holds for data coming from an
    # actual representation; for p = 2 these constraints are known explicitly
    eps = random_epsilon_data(2, 2, np.random.default_rng(0), level_bound=4, C1=-1)
    assert sc_integral(whittaker_sc(0, 1, eps), 0) == pytest.approx(-1, abs=1e-12)
    eps = random_epsilon_data(2, 3, np.random.default_rng(0), level_bound=4)
    vals = dict(eps.values)
    chi_m1 = (Fraction(1, 2), Fraction(0))
    vals[chi_m1] = RationalAngle(Fraction(0))
    eps = EpsilonData(2, 3, vals, eps.level_bound)
    assert sc_integral(whittaker_sc(0, 2, eps), 0) == pytest.approx(-1, abs=1e-12)


def test_level_components():
    p = 3
    k2 = next(k for k in unit_keys(p, 2) if key_level(p, k) == 2)
    v = KirillovVector.basis(p, 0, k2)
    assert level_components(v, 0) == {2}
    # psi(x / p) twist on O^x: level stays 2 since k = 1 < 2
    assert level_components(act_borel(v, 1, Fraction(1, p), 1), 0) == {2}
    # k = 3 > 2: only level-3 characters remain
    assert level_components(act_borel(v, 1, Fraction(1, p**3), 1), 0) == {3}


@settings(max_examples=200, deadline=None)
@given(
    p=st.sampled_from([2, 3]),
    e=st.lists(st.integers(-2, 2), min_size=6, max_size=6),
    u=st.lists(st.sampled_from([1, 5, 7, 11]), min_size=6, max_size=6),
)
def test_act_borel_is_homomorphism(p, e, u):
    g = [PadicScalar.from_rational(p, Fraction(uu)) * pw(p, ee) for uu, ee in zip(u, e)]
    a1, b1, d1, a2, b2, d2 = g
    v = KirillovVector.newform(p)
    lhs = act_borel(act_borel(v, a2, b2, d2), a1, b1, d1)
    rhs = act_borel(v, a1 * a2, a1 * b2 + b1 * d2, d1 * d2)
    assert lhs.equals(rhs, tol=1e-10)


def test_levelshift_examples():
    from tripleconst.kirillov_supercuspidal import levelshift_levels

    p = 3
    new = KirillovVector.newform(p)
    assert level_components(new, 0) == {0}
    assert level_components(act_borel(new, 1, Fraction(1, p**2), 1), 0) <= {2}
    k1 = next(k for k in unit_keys(p, 1) if key_level(p, k) == 1)
    v = act_borel(KirillovVector.basis(p, 0, k1), 1, Fraction(1, p), 1)
    assert level_components(v, 0) <= {0, 1}
    assert levelshift_levels(p, 1, 0, -1) == {0, 1}
    assert levelshift_levels(p, 0, 0, -2) == {2}
