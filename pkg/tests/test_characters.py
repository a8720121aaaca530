import cmath
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
import hypothesis.strategies as st

from tripleconst._arith import kronecker
from tripleconst.characters import (
    AdditiveCharacter,
    CyclotomicSum,
    MultiplicativeCharacter,
    characters_of_level,
    epsilon_factor,
    eval_char,
    eval_psi,
    kronecker_component,
    mul_chars,
    quadratic_character,
    random_character,
)
from tripleconst.global_assembly import fundamental_range
from tripleconst.padic_core import PadicScalar


def test_psi_examples():
    psi2, psi3 = AdditiveCharacter(2), AdditiveCharacter(3)
    assert eval_psi(psi2, 5).t == 0
    assert eval_psi(psi2, Fraction(1, 2)).t == Fraction(1, 2)
    assert eval_psi(psi3, Fraction(1, 3)).t == Fraction(1, 3)
    assert eval_psi(psi3.conjugate(), Fraction(1, 3)).t == Fraction(2, 3)


@given(
    p=st.sampled_from([2, 3, 5]),
    a=st.integers(-10**4, 10**4),
    b=st.integers(-10**4, 10**4),
    e=st.integers(0, 5),
)
def test_psi_is_additive(p, a, b, e):
    psi = AdditiveCharacter(p)
    x, y = Fraction(a, p**e), Fraction(b, p**e)
    assert eval_psi(psi, x + y) == eval_psi(psi, x) * eval_psi(psi, y)


def test_char_examples():
    assert eval_char(MultiplicativeCharacter.unramified(5, 1.0), 7) == 1
    assert eval_char(quadratic_character(3), 2) == pytest.approx(-1)
    # 2 generates (Z/25)^x; order-4 character sending 2 to i
    om = MultiplicativeCharacter(5, (Fraction(1, 4),))
    assert om.c == 1
    assert eval_char(om, 2) == pytest.approx(1j)
    assert eval_char(om, 4) == pytest.approx(-1)


def test_mul_chars_conductors():
    rng = np.random.default_rng(0)
    om = random_character(3, 2, rng)
    assert mul_chars(om, om.inverse()).c == 0
    assert mul_chars(om, MultiplicativeCharacter.unramified(3, 1j)).c == 2
    # distinct conductor-9 characters agreeing on 1 + 3Z_3 differ by a level <= 1 character
    chars = characters_of_level(3, 2)
    pairs = 0
    for a in chars:
        for b in chars:
            if a.same_as(b):
                continue
            if abs(eval_char(a, 4) - eval_char(b, 4)) < 1e-12:
                assert mul_chars(a, b.inverse()).c <= 1
                pairs += 1
    assert pairs > 0


@settings(max_examples=60)
@given(p=st.sampled_from([2, 3, 5]), c=st.integers(2, 4), seed=st.integers(0, 2**32 - 1))
def test_random_character_exact_conductor_and_multiplicative(p, c, seed):
    rng = np.random.default_rng(seed)
    om = random_character(p, c, rng, z=cmath.exp(1j))
    assert om.c == c
    x = int(rng.integers(1, 10**6)) * p + 1
    y = int(rng.integers(1, 10**6)) * p + 1 if p != 2 else int(rng.integers(1, 10**6)) * 2 + 1
    assert eval_char(om, x * y) == pytest.approx(eval_char(om, x) * eval_char(om, y), abs=1e-12)
    assert abs(eval_char(om, y)) == pytest.approx(1)
    # nontrivial on 1 + p^(c-1), trivial on 1 + p^c
    assert eval_char(om, 1 + p**c) == pytest.approx(1)
    vals = [eval_char(om, 1 + k * p ** (c - 1)) for k in range(1, p)]
    assert any(abs(v - 1) > 1e-9 for v in vals)


def test_no_conductor_one_character_at_two():
    with pytest.raises(ValueError):
        random_character(2, 1, np.random.default_rng(0))


def test_epsilon_quadratic_mod_3():
    # explicit two-term Gauss sum: sum_u omega^-1(u) e(u/3) over u = 1, 2, divided by sqrt 3
    direct = (cmath.exp(2j * cmath.pi / 3) - cmath.exp(4j * cmath.pi / 3)) / 3**0.5
    got = epsilon_factor(0.5, quadratic_character(3))
    assert got == pytest.approx(1j, abs=1e-14)
    assert direct == pytest.approx(1j, abs=1e-14)


@pytest.mark.parametrize("p,c", [(2, 2), (2, 3), (3, 1), (3, 2), (5, 1), (5, 3), (7, 2)])
def test_epsilon_modulus(p, c):
    rng = np.random.default_rng(p * 10 + c)
    for _ in range(10):
        om = random_character(p, c, rng, z=cmath.exp(2j * rng.random()))
        assert abs(epsilon_factor(1.0, om)) == pytest.approx(p ** (-c / 2), abs=1e-12)
        e = epsilon_factor(0.5, om)
        assert e * e.conjugate() == pytest.approx(1, abs=1e-12)


def test_cyclotomic_exact_values():
    # sum of the primitive n-th roots of unity is the Moebius function
    for n, mu in [(1, 1), (2, -1), (4, 0), (3, -1), (9, 0), (6, 1), (25, 0), (5, -1)]:
        s = CyclotomicSum({Fraction(k, n): 1 for k in range(n) if np.gcd(k, n) == 1})
        assert s.rational_value() == mu
    g = CyclotomicSum({Fraction(1, 3): 1, Fraction(2, 3): -1})
    assert (g * g).equals(-3)
    assert g.rational_value() is None


def euler_legendre(a, p):
    r = pow(a % p, (p - 1) // 2, p)
    return 0 if r == 0 else (1 if r == 1 else -1)


def test_kronecker_component_examples():
    k3 = kronecker_component(-3, 3)
    assert k3.c == 1 and eval_char(k3, 2) == pytest.approx(-1)
    k4 = kronecker_component(-4, 2)
    assert k4.c == 2 and eval_char(k4, 3) == pytest.approx(-1)
    k8 = kronecker_component(-8, 2)
    assert k8.c == 3
    # independent oracle: Euler's criterion for (-8/n) at primes n = 3, 5, 7
    for n in (3, 5, 7):
        assert eval_char(k8, n) == pytest.approx(euler_legendre(-8, n))


def test_kronecker_components_multiply_to_chi_D():
    for D in fundamental_range(-120, -1):
        comps = {p: kronecker_component(D, p) for p in sorted(set(_primes(abs(D))))}
        for n in range(1, 200):
            if np.gcd(n, D) != 1:
                continue
            prod = 1
            for om in comps.values():
                prod *= eval_char(om, PadicScalar.from_rational(om.p, n))
            assert prod == pytest.approx(kronecker(D, n)), (D, n)


def _primes(n):
    out, d = [], 2
    while d * d <= n:
        while n % d == 0:
            out.append(d)
            n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out
