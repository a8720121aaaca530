"""Additive and multiplicative characters of Q_p and epsilon factors.

Phases are carried as :class:`RationalAngle` values so that products of
roots of unity stay exact; complex numbers only appear on output.

Unit characters are stored by the angles of fixed generators of Z_p^x:
a primitive root modulo p^2 for odd p, and the pair (-1, 5) for p = 2.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Optional, Sequence

import numpy as np
from sympy import cyclotomic_poly as _sympy_cyclotomic

from ._arith import is_fundamental, kronecker, ord_p, primitive_root_mod_p2
from .padic_core import PadicScalar, PrecisionError


# angles ----------------------------------------------------------------


@dataclass(frozen=True)
class RationalAngle:
    """The phase exp(2 pi i t) with t a rational taken mod 1."""

    t: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "t", Fraction(self.t) % 1)

    def __mul__(self, other: "RationalAngle") -> "RationalAngle":
        return RationalAngle(self.t + other.t)

    def __pow__(self, k: int) -> "RationalAngle":
        return RationalAngle(self.t * k)

    def inverse(self) -> "RationalAngle":
        return RationalAngle(-self.t)

    conjugate = inverse

    @property
    def is_trivial(self) -> bool:
        return self.t == 0

    @property
    def value(self) -> complex:
        t = self.t
        # exact values at the common quarter turns
        if t == 0:
            return 1 + 0j
        if t == Fraction(1, 2):
            return -1 + 0j
        if t == Fraction(1, 4):
            return 1j
        if t == Fraction(3, 4):
            return -1j
        return cmath.exp(2j * math.pi * float(t))

    def __complex__(self) -> complex:
        return self.value


# exact sums of roots of unity ---------------------------------------------


@lru_cache(maxsize=None)
def cyclotomic_poly(n: int) -> tuple[int, ...]:
    """Integer coefficients of Phi_n, lowest degree first."""
    return tuple(int(c) for c in reversed(_sympy_cyclotomic(n, polys=True).all_coeffs()))


class CyclotomicSum:
    """Exact element sum_t c_t exp(2 pi i t) with rational angles t and weights c_t."""

    def __init__(self, terms: dict | None = None):
        self.coeffs: dict[Fraction, Fraction] = {}
        for t, c in (terms or {}).items():
            self.add(t, c)

    def add(self, angle, weight=1) -> None:
        angle = Fraction(angle) % 1
        self.coeffs[angle] = self.coeffs.get(angle, Fraction(0)) + Fraction(weight)

    def __mul__(self, other: "CyclotomicSum") -> "CyclotomicSum":
        out = CyclotomicSum()
        for t1, c1 in self.coeffs.items():
            for t2, c2 in other.coeffs.items():
                out.add(t1 + t2, c1 * c2)
        return out

    def conjugate(self) -> "CyclotomicSum":
        return CyclotomicSum({-t: c for t, c in self.coeffs.items()})

    def scale(self, k) -> "CyclotomicSum":
        return CyclotomicSum({t: c * Fraction(k) for t, c in self.coeffs.items()})

    def __complex__(self) -> complex:
        tot = 0j
        for t, c in sorted(self.coeffs.items()):
            tot += float(c) * RationalAngle(t).value
        return complex(tot)

    def rational_value(self) -> Optional[Fraction]:
        """The exact value if it is rational, else None (reduction modulo Phi_n)."""
        coeffs = {t: c for t, c in self.coeffs.items() if c != 0}
        if not coeffs:
            return Fraction(0)
        n = 1
        for t in coeffs:
            n = n * t.denominator // math.gcd(n, t.denominator)
        if n == 1:
            return coeffs.get(Fraction(0), Fraction(0))
        poly = [Fraction(0)] * n
        for t, c in coeffs.items():
            poly[int(t * n)] += c
        phi = cyclotomic_poly(n)
        deg = len(phi) - 1
        terms = [(k, pk) for k, pk in enumerate(phi) if pk]
        # reduce modulo the monic integer polynomial Phi_n
        for i in range(n - 1, deg - 1, -1):
            coef = poly[i]
            if coef:
                for k, pk in terms:
                    poly[i - deg + k] -= coef * pk
        if any(poly[1:deg]):
            return None
        return poly[0]

    def equals(self, x) -> bool:
        val = self.rational_value()
        return val is not None and val == Fraction(x)


# unit groups -----------------------------------------------------------


def units(p: int, N: int) -> np.ndarray:
    """Residues in [0, p^N) prime to p, increasing."""
    r = np.arange(p**N, dtype=np.int64)
    return r[r % p != 0]


@lru_cache(maxsize=None)
def dlog_table(p: int, N: int) -> tuple[np.ndarray, ...]:
    """Discrete logarithms on (Z/p^N)^x with respect to the fixed generators.

    Odd p: one array e with u = g^e.  p = 2: arrays (s, e) with u = (-1)^s 5^e.
    Entries at non-units are -1.
    """
    mod = p**N
    if p != 2:
        g = primitive_root_mod_p2(p)
        order = (p - 1) * p ** (N - 1)
        e = np.full(mod, -1, dtype=np.int64)
        x = 1
        for k in range(order):
            e[x] = k
            x = x * g % mod
        return (e,)
    s = np.full(mod, -1, dtype=np.int64)
    e = np.full(mod, -1, dtype=np.int64)
    if N == 1:
        s[1] = 0
        e[1] = 0
        return (s, e)
    order5 = 2 ** max(N - 2, 0)
    x = 1
    for k in range(order5):
        s[x] = 0
        e[x] = k
        s[(-x) % mod] = 1
        e[(-x) % mod] = k
        x = x * 5 % mod
    return (s, e)


def group_shape(p: int, N: int) -> tuple[int, ...]:
    """Shape of (Z/p^N)^x as a product of cyclic factors in generator order."""
    if p != 2:
        return ((p - 1) * p ** (N - 1),)
    if N == 1:
        return (1, 1)
    return (2, 2 ** (N - 2))


def angle_level(p: int, gens: Sequence[Fraction]) -> int:
    """Conductor exponent of the unit character with the given generator angles."""
    if p != 2:
        (th,) = gens
        th = Fraction(th) % 1
        if th == 0:
            return 0
        den = th.denominator
        if (p - 1) % den == 0:
            return 1
        n = 1
        while ((p - 1) * p ** (n - 1)) % den:
            n += 1
            if n > 200:
                raise ValueError("angle is not a character of Z_p^x")
        return n
    t_m1, t_5 = (Fraction(x) % 1 for x in gens)
    if t_m1 not in (0, Fraction(1, 2)):
        raise ValueError("the image of -1 must be +-1")
    if t_5 == 0:
        return 0 if t_m1 == 0 else 2
    den = t_5.denominator
    t = ord_p(den, 2)
    if den != 2**t:
        raise ValueError("angle is not a character of Z_2^x")
    return t + 2


# additive character ------------------------------------------------------


@dataclass(frozen=True)
class AdditiveCharacter:
    """psi(x) = exp(2 pi i sign * {x}_p); trivial on Z_p, nontrivial on p^-1 Z_p."""

    p: int
    sign: int = 1
    convention: str = "standard-unramified"

    def conjugate(self) -> "AdditiveCharacter":
        return AdditiveCharacter(self.p, -self.sign, self.convention)


def principal_part(x: PadicScalar) -> Fraction:
    """{x}_p in [0, 1)."""
    if x.is_zero or x.v >= 0:
        return Fraction(0)
    if x.absprec < 0:
        raise PrecisionError("principal part not determined")
    k = -x.v
    return Fraction(x.residue(k), x.p**k)


def eval_psi(psi: AdditiveCharacter, x) -> RationalAngle:
    if not isinstance(x, PadicScalar):
        x = PadicScalar.from_rational(psi.p, x)
    return RationalAngle(psi.sign * principal_part(x))


# multiplicative characters -------------------------------------------------


@dataclass(frozen=True, eq=False)
class MultiplicativeCharacter:
    """Character of Q_p^x: unit part by generator angles, z = value at p."""

    p: int
    gens: tuple[Fraction, ...]
    z: complex = 1.0
    c: int = field(default=-1)

    def __post_init__(self):
        gens = tuple(Fraction(t) % 1 for t in self.gens)
        need = 1 if self.p != 2 else 2
        if len(gens) != need:
            raise ValueError(f"expected {need} generator angles for p = {self.p}")
        object.__setattr__(self, "gens", gens)
        object.__setattr__(self, "z", complex(self.z))
        level = angle_level(self.p, gens)
        if self.c not in (-1, level):
            raise ValueError(f"declared conductor {self.c} but angles give {level}")
        object.__setattr__(self, "c", level)
        object.__setattr__(self, "_cache", {})

    # construction
    @classmethod
    def trivial(cls, p: int, z: complex = 1.0) -> "MultiplicativeCharacter":
        return cls(p, (0,) if p != 2 else (0, 0), z)

    @classmethod
    def unramified(cls, p: int, z: complex) -> "MultiplicativeCharacter":
        return cls.trivial(p, z)

    @classmethod
    def from_values(cls, p: int, c: int, table: dict[int, complex], z: complex = 1.0):
        """Build from generator values given as roots of unity {generator: value}."""
        gens = []
        gen_list = generators(p)
        for g in gen_list:
            val = table[g]
            t = Fraction(cmath.phase(val) / (2 * math.pi)).limit_denominator(10**6)
            gens.append(t)
        return cls(p, tuple(gens), z, c)

    # properties
    @property
    def q(self) -> int:
        return self.p

    @property
    def is_unitary(self) -> bool:
        return abs(abs(self.z) - 1) < 1e-14

    @property
    def is_unramified(self) -> bool:
        return self.c == 0

    def key(self) -> tuple[Fraction, ...]:
        return self.gens

    def unit_angle(self, u: int) -> Fraction:
        """Angle of the character at the unit with residue u (mod p^max(c,1))."""
        if self.c == 0:
            return Fraction(0)
        N = self.c
        mod = self.p**N
        tabs = dlog_table(self.p, N)
        r = u % mod
        if self.p != 2:
            e = int(tabs[0][r])
            if e < 0:
                raise ValueError("not a unit")
            return (self.gens[0] * e) % 1
        s, e = int(tabs[0][r]), int(tabs[1][r])
        if s < 0:
            raise ValueError("not a unit")
        return (self.gens[0] * s + self.gens[1] * e) % 1

    def unit_values(self, N: int) -> np.ndarray:
        """Complex values on residues mod p^N (zero at non-units); N >= c."""
        N = max(N, self.c, 1)
        cache = self._cache
        if N in cache:
            return cache[N]
        tabs = dlog_table(self.p, N)
        if self.c == 0:
            out = np.where(tabs[0] >= 0, 1.0 + 0j, 0j)
        elif self.p != 2:
            th = self.gens[0]
            order = (self.p - 1) * self.p ** (N - 1)
            k = int(th * order)
            e = tabs[0]
            out = np.where(e >= 0, np.exp(2j * np.pi * ((k * e) % order) / order), 0j)
        else:
            order = 2 ** max(N - 2, 0)
            k1 = int(self.gens[0] * 2)
            k5 = int(self.gens[1] * order)
            s, e = tabs
            ang = ((k1 * s) % 2) / 2 + ((k5 * e) % order) / order
            out = np.where(s >= 0, np.exp(2j * np.pi * ang), 0j)
        out.setflags(write=False)
        cache[N] = out
        return out

    def __call__(self, x) -> complex:
        return eval_char(self, x)

    # arithmetic
    def __mul__(self, other: "MultiplicativeCharacter") -> "MultiplicativeCharacter":
        return mul_chars(self, other)

    def inverse(self) -> "MultiplicativeCharacter":
        return MultiplicativeCharacter(self.p, tuple(-t for t in self.gens), 1 / self.z)

    def conjugate(self) -> "MultiplicativeCharacter":
        return MultiplicativeCharacter(self.p, tuple(-t for t in self.gens), self.z.conjugate())

    def __pow__(self, k: int) -> "MultiplicativeCharacter":
        return MultiplicativeCharacter(self.p, tuple(t * k for t in self.gens), self.z**k)

    def with_z(self, z: complex) -> "MultiplicativeCharacter":
        return MultiplicativeCharacter(self.p, self.gens, z)

    def same_as(self, other: "MultiplicativeCharacter", tol: float = 1e-12) -> bool:
        return self.p == other.p and self.gens == other.gens and abs(self.z - other.z) < tol

    def __repr__(self) -> str:
        g = ", ".join(str(t) for t in self.gens)
        return f"MultiplicativeCharacter(p={self.p}, c={self.c}, gens=({g}), z={self.z:.6g})"


def generators(p: int) -> tuple[int, ...]:
    return (primitive_root_mod_p2(p),) if p != 2 else (-1, 5)


def eval_char(omega: MultiplicativeCharacter, x) -> complex:
    """omega(x) = z^v(x) times the unit part evaluated modulo p^c."""
    if not isinstance(x, PadicScalar):
        x = PadicScalar.from_rational(omega.p, x)
    if x.is_zero:
        raise ValueError("character evaluated at zero")
    if omega.c > x.N:
        raise PrecisionError(f"need {omega.c} unit digits, have {x.N}")
    ang = RationalAngle(omega.unit_angle(x.residue(max(omega.c, 1))))
    zv = omega.z**x.v if x.v else 1.0
    return zv * ang.value


def mul_chars(a: MultiplicativeCharacter, b: MultiplicativeCharacter) -> MultiplicativeCharacter:
    if a.p != b.p:
        raise ValueError("prime mismatch")
    return MultiplicativeCharacter(a.p, tuple(x + y for x, y in zip(a.gens, b.gens)), a.z * b.z)


def all_unit_characters(p: int, n: int) -> list[MultiplicativeCharacter]:
    """Every character of (Z/p^n)^x, with z = 1."""
    shape = group_shape(p, n)
    out = []
    if p != 2:
        order = shape[0]
        for k in range(order):
            out.append(MultiplicativeCharacter(p, (Fraction(k, order),)))
        return out
    for s in range(shape[0]):
        for k in range(shape[1]):
            out.append(MultiplicativeCharacter(p, (Fraction(s, 2), Fraction(k, shape[1]))))
    return out


def characters_of_level(p: int, c: int) -> list[MultiplicativeCharacter]:
    return [w for w in all_unit_characters(p, max(c, 1)) if w.c == c]


def random_character(p: int, c: int, rng: np.random.Generator, z: complex = 1.0):
    """Uniform random unit character of exact conductor c (z as given)."""
    pool = characters_of_level(p, c)
    if not pool:
        raise ValueError(f"no characters of level {c} for p = {p}")
    w = pool[int(rng.integers(len(pool)))]
    return w.with_z(z)


def quadratic_character(p: int) -> MultiplicativeCharacter:
    """The Legendre character mod p (odd p)."""
    if p == 2:
        raise ValueError("use kronecker_component for p = 2")
    return MultiplicativeCharacter(p, (Fraction(1, 2),))


# epsilon factors ------------------------------------------------------------


def epsilon_angles(omega: MultiplicativeCharacter, psi: AdditiveCharacter) -> dict[Fraction, int]:
    """Multiset of phases of omega^-1(u) psi(u p^-c) over u in (Z/p^c)^x."""
    p, c = omega.p, omega.c
    mod = p**c
    out: dict[Fraction, int] = {}
    for u in range(1, mod):
        if u % p == 0:
            continue
        t = (-omega.unit_angle(u) + psi.sign * Fraction(u, mod)) % 1
        out[t] = out.get(t, 0) + 1
    return out


def epsilon_factor(s: float, omega: MultiplicativeCharacter, psi: AdditiveCharacter | None = None) -> complex:
    """epsilon(s, omega, psi) as the integral of omega^-1(x) psi(x) |x|^-s over p^-c O^x."""
    if omega.c < 1:
        raise ValueError("epsilon factor requires a ramified character")
    if psi is None:
        psi = AdditiveCharacter(omega.p)
    p, c = omega.p, omega.c
    total = 0j
    for t, n in sorted(epsilon_angles(omega, psi).items()):
        total += n * RationalAngle(t).value
    # each class u + p^c Z_p inside p^-c O^x has additive volume 1
    return total * omega.z**c * float(p) ** (-c * s)


# Kronecker characters ---------------------------------------------------------


def kronecker_component(D: int, p: int) -> MultiplicativeCharacter:
    """Local component at p | D of the quadratic character n -> (D/n).

    The unit action is read off from (D/n) with n = u mod p^c and n = 1 mod |D|/p^c.
    The value at p is set to 1.
    """
    if not is_fundamental(D):
        raise ValueError(f"{D} is not a fundamental discriminant")
    if D % p:
        raise ValueError(f"{p} does not divide {D}")
    c = ord_p(D, p)
    pc = p**c
    rest = abs(D) // pc

    def value(u: int) -> int:
        # CRT: n = u mod p^c, n = 1 mod rest, n > 0
        n = u % pc
        while n % rest != 1 % rest:
            n += pc
        return kronecker(D, n)

    if p != 2:
        g = primitive_root_mod_p2(p)
        gens = (Fraction(0 if value(g) == 1 else 1, 2),)
    else:
        gens = (
            Fraction(0 if value(pc - 1) == 1 else 1, 2),
            Fraction(0 if value(5) == 1 else 1, 2),
        )
    return MultiplicativeCharacter(p, gens, 1.0, c)
