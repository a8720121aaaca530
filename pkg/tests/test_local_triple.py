import math
from fractions import Fraction

import numpy as np
import pytest

from tripleconst.characters import AdditiveCharacter, MultiplicativeCharacter, eval_psi, random_character, units
from tripleconst.haar_integration import zeta
from tripleconst.induced_models import InducedRepSpec, TailError, WhittakerEvaluator, whittaker_closed
from tripleconst.kirillov_supercuspidal import random_epsilon_data
from tripleconst.local_triple import (
    LocalTripleSpec,
    RangeError,
    SupercuspidalData,
    adjoint_L,
    closed_I_prime_exact,
    ell_RS,
    local_I,
    local_I_prime,
    matrix_coefficient_I,
    norms,
    phi1_closed,
    recurrence_tail,
    triple_L,
)
from tripleconst.padic_core import PadicScalar


def chars(p, m, seed=0):
    rng = np.random.default_rng(seed)
    om1 = random_character(p, m, rng, z=np.exp(1j * rng.uniform(0, 6)))
    om2 = MultiplicativeCharacter.unramified(p, np.exp(1j * rng.uniform(0, 6)))
    return om1, om2


def steinberg(p, m, z3=1.0, l1=0, l2=0, seed=0):
    om1, om2 = chars(p, m, seed)
    return LocalTripleSpec(p, m, om1, om2, "steinberg", omega3=MultiplicativeCharacter.unramified(p, z3), l1=l1, l2=l2)


def spherical(p, m, z3, l1=0, l2=0, seed=0):
    om1, om2 = chars(p, m, seed)
    return LocalTripleSpec(p, m, om1, om2, "spherical", omega3=MultiplicativeCharacter.unramified(p, z3), l1=l1, l2=l2)


def supercuspidal(p, m, c, flag, l1=0, l2=0, seed=0, C1=None):
    om1, om2 = chars(p, m, seed)
    eps = random_epsilon_data(p, c, np.random.default_rng(seed + 100), level_bound=4, C1=C1)
    return LocalTripleSpec(p, m, om1, om2, "supercuspidal", sc=SupercuspidalData(c, eps, flag), l1=l1, l2=l2)


def test_closed_form_examples():
    assert closed_I_prime_exact(3, 1, "steinberg") == Fraction(4, 9)
    assert closed_I_prime_exact(2, 3, "spherical") == Fraction(1, 8)
    assert closed_I_prime_exact(2, 3, "supercuspidal", True) == Fraction(1, 8)
    assert closed_I_prime_exact(2, 3, "supercuspidal", False) == Fraction(3, 16)


def test_bruteforce_examples():
    assert local_I_prime(steinberg(3, 1)) == pytest.approx(4 / 9, abs=1e-9)
    for z3 in (1.0, np.exp(0.8j), 2**0.3):
        assert local_I_prime(spherical(2, 3, z3)) == pytest.approx(1 / 8, abs=1e-9)
    assert local_I_prime(supercuspidal(2, 3, 2, True)) == pytest.approx(1 / 8, abs=1e-9)
    assert local_I_prime(supercuspidal(2, 3, 2, False)) == pytest.approx(3 / 16, abs=1e-9)


def test_L_factor_examples():
    sc = supercuspidal(2, 2, 2, True)
    assert adjoint_L(sc, 1) == pytest.approx(2 / 3)
    assert adjoint_L(supercuspidal(2, 2, 2, False), 1) == pytest.approx(1)
    st = steinberg(3, 1)
    assert adjoint_L(st, 1) == pytest.approx(zeta(3, 2))
    assert adjoint_L(st, 1, which=1) == pytest.approx(zeta(3, 1))
    assert triple_L(sc, 0.5) == 1
    # L(1/2 + 1/2, omega3)^2 with omega3 trivial
    assert triple_L(st, 0.5) == pytest.approx(zeta(3, 1) ** 2)


def test_norm_examples():
    n1, n2, n3 = norms(steinberg(2, 2))
    assert n1 == pytest.approx(2 / 3, abs=1e-12)
    assert n2 == pytest.approx(2 / 3, abs=1e-12)
    assert n3 == pytest.approx(1, abs=1e-12)
    assert norms(supercuspidal(2, 2, 2, False))[2] == pytest.approx(1)


@pytest.mark.parametrize("p,m,z3", [(2, 2, 1.0), (3, 2, -1.0), (5, 1, 1.0)])
def test_steinberg_functional(p, m, z3):
    sp = steinberg(p, m, z3)
    q = float(p)
    L1 = 1 / (1 - z3 / q)
    want = zeta(q, 2) / zeta(q, 1) ** 1.5 * q ** (-m / 2) * abs(L1)
    assert abs(ell_RS(sp)) == pytest.approx(want, abs=1e-12)
    I_want = q**-m * zeta(q, 2) ** 2 / zeta(q, 1) ** 3 * L1**2
    assert local_I(sp) == pytest.approx(I_want, abs=1e-12)


@pytest.mark.parametrize("p,m,c", [(2, 2, 2), (2, 3, 3), (3, 3, 2)])
def test_supercuspidal_functional(p, m, c):
    q = float(p)
    for l in range(m - c + 1):
        sp = supercuspidal(p, m, c, False, l, l)
        want = (zeta(q, 2) / zeta(q, 1)) ** 1.5 * q ** (-m / 2)
        assert abs(ell_RS(sp)) == pytest.approx(want, abs=1e-12)
        assert local_I(sp) == pytest.approx(q**-m * (zeta(q, 2) / zeta(q, 1)) ** 3, abs=1e-12)


def test_spherical_functional_tracks_L_ratio():
    # |l_RS| / |L(1/2, w3) L(1/2, w3^-1) / L(1, w3^2)| does not depend on w3
    p, m = 3, 1
    q = float(p)
    seen = []
    for z in (1.0, np.exp(0.5j), np.exp(2.1j), q**0.3, -(q**-0.2)):
        ratio = abs(1 / (1 - z * q**-0.5) / (1 - q**-0.5 / z) * (1 - z**2 / q))
        seen.append(abs(ell_RS(spherical(p, m, z))) / ratio)
    assert np.allclose(seen, seen[0], atol=1e-12)


def test_independence_of_choices():
    base = local_I_prime(steinberg(3, 2, seed=0))
    for seed in (1, 2, 3):
        assert local_I_prime(steinberg(3, 2, seed=seed)) == pytest.approx(base, abs=1e-12)
    for l1, l2 in [(0, 1), (1, 0), (1, 1)]:
        assert local_I_prime(steinberg(3, 2, l1=l1, l2=l2)) == pytest.approx(base, abs=1e-12)
    a = local_I_prime(supercuspidal(2, 3, 2, False, 1, 0, seed=4, C1=1))
    b = local_I_prime(supercuspidal(2, 3, 2, False, 1, 0, seed=5, C1=-1))
    assert a == pytest.approx(b, abs=1e-12)


def test_range_errors():
    om1, om2 = chars(3, 2)
    with pytest.raises(RangeError):
        steinberg(3, 2, l1=2)
    with pytest.raises(RangeError):
        steinberg(3, 2, z3=1j)
    with pytest.raises(RangeError):
        spherical(3, 1, 2.0)
    with pytest.raises(RangeError):
        LocalTripleSpec(3, 1, om1, om2, "steinberg", omega3=MultiplicativeCharacter.unramified(3, 1.0))
    with pytest.raises(RangeError):
        supercuspidal(2, 2, 3, False)
    # extended mode lets the translate run past the stated range
    LocalTripleSpec(3, 2, om1, om2, "steinberg", omega3=MultiplicativeCharacter.unramified(3, 1.0), l1=3, extended=True)


def test_matrix_coefficient_example():
    sp = supercuspidal(2, 2, 2, False)
    total, per_j = matrix_coefficient_I(sp, detail=True)
    assert total == pytest.approx(1 / 6, abs=1e-12)
    assert per_j[0] == pytest.approx(0, abs=1e-12)


@pytest.mark.parametrize("p,c,m,l", [(2, 2, 3, 1), (2, 3, 3, 0), (3, 2, 2, 0), (3, 2, 3, 1)])
def test_matrix_coefficient_matches_functional(p, c, m, l):
    sp = supercuspidal(p, m, c, True, l, l)
    n1, n2, n3 = norms(sp)
    want = float(p) ** -m * zeta(p, 2) / zeta(p, 1)
    assert matrix_coefficient_I(sp) == pytest.approx(want, abs=1e-12)
    assert local_I(sp) / (n1 * n2 * n3) == pytest.approx(want, abs=1e-9)

    if m > c:
        with pytest.raises(ValueError):
            matrix_coefficient_I(supercuspidal(p, m, c, True, 0, 1))


def test_matrix_coefficient_rejects_other_kinds():
    with pytest.raises(ValueError):
        matrix_coefficient_I(steinberg(3, 1))


def test_recurrence_tail():
    r = 0.5
    vals = [3.0, 1.0] + [r**n for n in range(10)]
    tail = recurrence_tail(vals, [r], 2)
    assert tail == pytest.approx(r**10 / (1 - r))
    # two roots: s_n = a^n + b^n
    a, b = 0.3, -0.6
    vals = [a**n + b**n for n in range(12)]
    assert recurrence_tail(vals, [a, b], 0) == pytest.approx(a**12 / (1 - a) + b**12 / (1 - b))
    with pytest.raises(TailError):
        recurrence_tail([1.0, 0.5, 0.3, 0.1, 0.05], [0.5], 0)


# Phi1 against its defining integral ----------------------------------------------------


def _phi1_tsum(sp, x, y, j, T):
    """int_{v(t) >= 0} psi(t x) W(a(t y) h_j) W~(a(t) h_m) d^x t, truncated at T shells."""
    ev, evt = WhittakerEvaluator(sp), WhittakerEvaluator(sp, True)
    p, m = sp.p, sp.conductor
    us = [int(u) for u in units(p, m + 2)]
    psi = AdditiveCharacter(p)
    total = 0j
    for s in range(T):
        acc = 0j
        for u in us:
            t = PadicScalar.from_rational(p, u) * PadicScalar.uniformizer(p, s)
            acc += eval_psi(psi, t * x).value * whittaker_closed(ev, t * y, j) * whittaker_closed(evt, t, m)
        total += acc / len(us)
    return total


@pytest.mark.parametrize("p,m", [(2, 3), (3, 2), (5, 1)])
def test_phi1_table_against_tsum(p, m):
    rng = np.random.default_rng(p + m)
    om1 = random_character(p, m, rng, z=np.exp(0.7j))
    sp = InducedRepSpec.principal(om1, MultiplicativeCharacter.unramified(p, np.exp(1.9j)))
    T = int(32 / math.log2(p)) + 2
    one = PadicScalar.from_rational(p, 1)
    N = _phi1_tsum(sp, PadicScalar.zero(p), one, m, T)
    pw = lambda k: PadicScalar.uniformizer(p, k)  # noqa: E731
    unit = lambda: PadicScalar.from_rational(p, 1 + p * int(rng.integers(0, 20)))  # noqa: E731
    for j in range(m + 1):
        for vy in range(-m - 1, 2):
            for vx in sorted({vy - 1, vy, vy + 1, 0}):
                x, y = unit() * pw(vx), unit() * pw(vy)
                got = _phi1_tsum(sp, x, y, j, T) / N
                assert got == pytest.approx(phi1_closed(sp, x, y, j), abs=1e-9), (j, vx, vy)
        # cancellation x + y small, the j = 0 branch
        y = unit() * pw(-m - 1)
        x = -y * PadicScalar.from_rational(p, 1 + p ** (m + 2))
        got = _phi1_tsum(sp, x, y, j, T) / N
        assert got == pytest.approx(phi1_closed(sp, x, y, j), abs=1e-9)


def test_phi1_normalization():
    om1, om2 = chars(3, 1)
    sp = InducedRepSpec.principal(om1, om2)
    one = PadicScalar.from_rational(3, 1)
    assert phi1_closed(sp, PadicScalar.zero(3), one, 1) == pytest.approx(1)
    assert math.isclose(abs(phi1_closed(sp, PadicScalar.zero(3), PadicScalar.uniformizer(3, 2), 1)), 3**-1)
