"""Truncated arithmetic in Q_p and the 2x2 matrix helpers used by the local computations.

A :class:`PadicScalar` stores ``x = u * p**v``.  Exact values (built from
integers or rationals) keep ``u`` as an exact rational unit and carry
``N = INF``; truncated values keep ``u`` as a residue modulo ``p**N``.
"""

from __future__ import annotations

import math
import os
from fractions import Fraction
from typing import NamedTuple, Union

INF = math.inf
DEFAULT_PRECISION = 40

Number = Union[int, Fraction]


class PrecisionError(ArithmeticError):
    """Raised when a result cannot be certified at the requested precision."""


def precision_floor() -> int:
    """Smallest relative precision an inexact result may have (env PRECISION_FLOOR)."""
    raw = os.environ.get("PRECISION_FLOOR")
    if not raw:
        return 1
    try:
        floor = int(raw)
    except ValueError:
        return 1
    return max(floor, 1)


def ival(n: int, p: int) -> float | int:
    """p-adic valuation of an integer (INF for 0)."""
    if n == 0:
        return INF
    n = abs(n)
    k = 0
    while n % p == 0:
        n //= p
        k += 1
    return k


def _split(x: Fraction, p: int) -> tuple[int, Fraction]:
    num, den = x.numerator, x.denominator
    v = 0
    while num % p == 0:
        num //= p
        v += 1
    while den % p == 0:
        den //= p
        v -= 1
    return v, Fraction(num, den)


def _residue(u: Fraction | int, p: int, n: int) -> int:
    mod = p**n
    if isinstance(u, int):
        return u % mod
    return (u.numerator * pow(u.denominator, -1, mod)) % mod


class PadicScalar:
    """Element of Q_p known modulo p**(v+N).

    Zero is exact and has ``v = INF``.
    """

    __slots__ = ("p", "v", "u", "N")

    def __init__(self, p: int, v, u, N=INF):
        self.p = p
        self.v = v
        self.u = u
        self.N = N

    # construction ---------------------------------------------------

    @classmethod
    def zero(cls, p: int) -> "PadicScalar":
        return cls(p, INF, 0, INF)

    @classmethod
    def from_rational(cls, p: int, x: Number) -> "PadicScalar":
        """Exact element from an int or Fraction."""
        x = Fraction(x)
        if x == 0:
            return cls.zero(p)
        v, u = _split(x, p)
        if u.denominator == 1:
            u = u.numerator
        return cls(p, v, u, INF)

    @classmethod
    def from_unit(cls, p: int, v: int, residue: int, N: int) -> "PadicScalar":
        """Truncated element p**v * residue known mod p**(v+N)."""
        if residue % p == 0:
            raise ValueError("residue must be a unit")
        return cls(p, v, residue % p**N, N)

    @classmethod
    def uniformizer(cls, p: int, k: int = 1) -> "PadicScalar":
        return cls(p, k, 1, INF)

    def coerce(self, other) -> "PadicScalar":
        if isinstance(other, PadicScalar):
            if other.p != self.p:
                raise ValueError(f"prime mismatch {self.p} vs {other.p}")
            return other
        return PadicScalar.from_rational(self.p, other)

    # predicates -----------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return self.v == INF

    @property
    def is_exact(self) -> bool:
        return self.N == INF

    @property
    def absprec(self):
        """Absolute precision v + N."""
        return self.v + self.N

    def residue(self, n: int) -> int:
        """The unit part modulo p**n."""
        if self.is_zero:
            raise ValueError("zero has no unit part")
        if n > self.N:
            raise PrecisionError(f"need {n} unit digits, have {self.N}")
        return _residue(self.u, self.p, n)

    def to_fraction(self) -> Fraction:
        """Exact value, or the canonical rational representative when truncated."""
        if self.is_zero:
            return Fraction(0)
        return Fraction(self.u) * Fraction(self.p) ** self.v

    def norm(self) -> float:
        """|x| = q**(-v)."""
        if self.is_zero:
            return 0.0
        return float(self.p) ** (-self.v)

    # arithmetic -----------------------------------------------------

    def __neg__(self) -> "PadicScalar":
        if self.is_zero:
            return self
        if self.is_exact:
            return PadicScalar(self.p, self.v, -self.u, INF)
        return PadicScalar(self.p, self.v, (-self.u) % self.p**self.N, self.N)

    def __mul__(self, other) -> "PadicScalar":
        other = self.coerce(other)
        if self.is_zero or other.is_zero:
            return PadicScalar.zero(self.p)
        v = self.v + other.v
        if self.is_exact and other.is_exact:
            u = self.u * other.u
            if isinstance(u, Fraction) and u.denominator == 1:
                u = u.numerator
            return PadicScalar(self.p, v, u, INF)
        N = min(self.N, other.N)
        u = (_residue(self.u, self.p, N) * _residue(other.u, self.p, N)) % self.p**N
        return PadicScalar(self.p, v, u, N)

    __rmul__ = __mul__

    def inverse(self) -> "PadicScalar":
        if self.is_zero:
            raise ZeroDivisionError("inverse of zero")
        if self.is_exact:
            u = 1 / Fraction(self.u)
            if u.denominator == 1:
                u = u.numerator
            return PadicScalar(self.p, -self.v, u, INF)
        return PadicScalar(self.p, -self.v, pow(self.u, -1, self.p**self.N), self.N)

    def __truediv__(self, other) -> "PadicScalar":
        return self * self.coerce(other).inverse()

    def __rtruediv__(self, other) -> "PadicScalar":
        return self.coerce(other) * self.inverse()

    def __add__(self, other) -> "PadicScalar":
        other = self.coerce(other)
        if other.is_zero:
            return self
        if self.is_zero:
            return other
        p = self.p
        if self.is_exact and other.is_exact:
            return PadicScalar.from_rational(p, self.to_fraction() + other.to_fraction())
        A = min(self.absprec, other.absprec)
        v0 = min(self.v, other.v)
        if A <= v0:
            raise PrecisionError("sum has no significant digits")
        n = A - v0
        mod = p**n
        s = (
            _residue(self.u, p, n) * p ** (self.v - v0)
            + _residue(other.u, p, n) * p ** (other.v - v0)
        ) % mod
        if s == 0:
            raise PrecisionError("cancellation: sum is zero to the known precision")
        k = ival(s, p)
        N = n - k
        if N < precision_floor():
            raise PrecisionError(f"relative precision {N} below floor")
        return PadicScalar(p, v0 + k, (s // p**k) % p**N, N)

    __radd__ = __add__

    def __sub__(self, other) -> "PadicScalar":
        return self + (-self.coerce(other))

    def __rsub__(self, other) -> "PadicScalar":
        return self.coerce(other) + (-self)

    def __pow__(self, k: int) -> "PadicScalar":
        if k < 0:
            return self.inverse() ** (-k)
        out = PadicScalar.from_rational(self.p, 1)
        for _ in range(k):
            out = out * self
        return out

    def truncate(self, N: int) -> "PadicScalar":
        """Drop to relative precision N (no-op for zero)."""
        if self.is_zero or N >= self.N:
            return self
        return PadicScalar(self.p, self.v, _residue(self.u, self.p, N), N)

    # comparison -----------------------------------------------------

    def __eq__(self, other) -> bool:
        if not isinstance(other, PadicScalar):
            try:
                other = self.coerce(other)
            except (TypeError, ValueError):
                return NotImplemented
        if self.p != other.p:
            return False
        if self.is_zero or other.is_zero:
            return self.is_zero and other.is_zero
        if self.v != other.v:
            return False
        n = min(self.N, other.N)
        if n == INF:
            return Fraction(self.u) == Fraction(other.u)
        return _residue(self.u, self.p, n) == _residue(other.u, other.p, n)

    def __hash__(self):
        return hash((self.p, self.v, str(self.u), self.N))

    def __repr__(self) -> str:
        if self.is_zero:
            return f"PadicScalar(p={self.p}, 0)"
        prec = "exact" if self.is_exact else f"N={self.N}"
        return f"PadicScalar(p={self.p}, v={self.v}, u={self.u}, {prec})"


def val(x) -> float | int:
    """Valuation of a PadicScalar (INF for zero)."""
    return x.v


def add(x: PadicScalar, y) -> PadicScalar:
    return x + y


def mul(x: PadicScalar, y) -> PadicScalar:
    return x * y


def neg(x: PadicScalar) -> PadicScalar:
    return -x


def inv(x: PadicScalar) -> PadicScalar:
    return x.inverse()


# matrices -------------------------------------------------------------


class Mat2(NamedTuple):
    """2x2 matrix (a b; c d) over Q_p."""

    a: PadicScalar
    b: PadicScalar
    c: PadicScalar
    d: PadicScalar

    @property
    def p(self) -> int:
        return self.a.p

    def __matmul__(self, o: "Mat2") -> "Mat2":
        return Mat2(
            self.a * o.a + self.b * o.c,
            self.a * o.b + self.b * o.d,
            self.c * o.a + self.d * o.c,
            self.c * o.b + self.d * o.d,
        )

    def det(self) -> PadicScalar:
        return self.a * self.d - self.b * self.c

    def inverse(self) -> "Mat2":
        dinv = self.det().inverse()
        return Mat2(self.d * dinv, -self.b * dinv, -self.c * dinv, self.a * dinv)

    def entries(self) -> tuple[PadicScalar, ...]:
        return (self.a, self.b, self.c, self.d)

    def equals(self, other: "Mat2") -> bool:
        """Entrywise equality modulo the tracked precision."""
        for x, y in zip(self.entries(), other.entries()):
            if x.is_zero and y.is_zero:
                continue
            if x.is_zero or y.is_zero:
                z = y if x.is_zero else x
                if z.is_exact:
                    return False
                continue
            try:
                diff = x - y
            except PrecisionError:
                continue
            if diff.is_exact and not diff.is_zero:
                return False
            if not diff.is_exact:
                return False
        return True

    @classmethod
    def from_rationals(cls, p: int, a, b, c, d) -> "Mat2":
        f = PadicScalar.from_rational
        return cls(f(p, a), f(p, b), f(p, c), f(p, d))


def identity(p: int) -> Mat2:
    return Mat2.from_rationals(p, 1, 0, 0, 1)


def w_matrix(p: int) -> Mat2:
    """w = (0 -1; 1 0)."""
    return Mat2.from_rationals(p, 0, -1, 1, 0)


def _sc(p: int, x) -> PadicScalar:
    return x if isinstance(x, PadicScalar) else PadicScalar.from_rational(p, x)


def n_matrix(p: int, x) -> Mat2:
    """n(x) = (1 x; 0 1)."""
    one, zero = _sc(p, 1), PadicScalar.zero(p)
    return Mat2(one, _sc(p, x), zero, one)


def a_matrix(p: int, y) -> Mat2:
    """a(y) = (y 0; 0 1)."""
    one, zero = _sc(p, 1), PadicScalar.zero(p)
    return Mat2(_sc(p, y), zero, zero, one)


def z_matrix(p: int, t) -> Mat2:
    t = _sc(p, t)
    zero = PadicScalar.zero(p)
    return Mat2(t, zero, zero, t)


def diag(p: int, a, d) -> Mat2:
    zero = PadicScalar.zero(p)
    return Mat2(_sc(p, a), zero, zero, _sc(p, d))


def h_matrix(p: int, j: int) -> Mat2:
    """(1 0; p**j 1)."""
    one, zero = _sc(p, 1), PadicScalar.zero(p)
    return Mat2(one, zero, PadicScalar.uniformizer(p, j), one)


def upper(p: int, a, b, d) -> Mat2:
    zero = PadicScalar.zero(p)
    return Mat2(_sc(p, a), _sc(p, b), zero, _sc(p, d))


def in_K1(k: Mat2, m: int) -> bool:
    """Membership of k in K1(p**m), certified from the tracked precision."""
    p = k.p
    for x in k.entries():
        if not x.is_zero and x.v < 0:
            return False
    det = k.det()
    if det.is_zero or det.v != 0:
        return False
    if m == 0:
        return True
    c = k.c
    if not c.is_zero:
        if c.v < m and c.absprec > c.v:
            return False
        if c.absprec < m:
            raise PrecisionError("lower-left entry not known to p**m")
    if k.d.is_zero:
        return False
    if k.d.v != 0:
        return False
    one = PadicScalar.from_rational(p, 1)
    if k.d == one:
        return True
    dm1 = k.d - one
    if dm1.absprec < m and dm1.v < m:
        raise PrecisionError("lower-right entry not known to p**m")
    return dm1.v >= m


class Decomposition(NamedTuple):
    """g = (a b; 0 d) * (1 0; p**j 1) * k with k in K1(p**m)."""

    a: PadicScalar
    b: PadicScalar
    d: PadicScalar
    j: int
    k: Mat2


def _sub_or_zero(x: PadicScalar, y: PadicScalar) -> PadicScalar:
    # a difference that vanishes to the known precision is stored as zero
    try:
        return x - y
    except PrecisionError:
        return PadicScalar.zero(x.p)


def decompose_corner(g: Mat2, m: int) -> Decomposition:
    """Write g as an upper-triangular element times (1 0; p**j 1) times k in K1(p**m).

    j is min(m, v(C) - min(v(C), v(D))) for g = (A B; C D).
    """
    if m < 0:
        raise ValueError("m must be nonnegative")
    p = g.p
    A, B, C, D = g
    one = PadicScalar.from_rational(p, 1)
    zero = PadicScalar.zero(p)
    delta = g.det()
    if delta.is_zero:
        raise ValueError("g is not invertible")
    if C.is_zero:
        # already upper triangular; k = (1 0; -p^m 1)
        k = Mat2(one, zero, -PadicScalar.uniformizer(p, m), one)
        return Decomposition(delta / D, B, D, m, k)
    if D.is_zero or C.v <= D.v:
        # j = 0 cell: k unipotent upper
        ratio = D / C if not D.is_zero else zero
        k = Mat2(one, _sub_or_zero(ratio, one), zero, one)
        a = delta / C
        return Decomposition(a, _sub_or_zero(A, a), C, 0, k)
    t = C.v - D.v
    if m == 0 or t >= m:
        ratio = C / D
        corner = ratio - PadicScalar.uniformizer(p, m)
        if corner.absprec < m:
            raise PrecisionError("cannot certify k in K1(p^m)")
        k = Mat2(one, zero, corner, one)
        return Decomposition(delta / D, B, D, m, k)
    # 0 < j < m: k diagonal with unit upper-left entry
    j = t
    u = C / (D * PadicScalar.uniformizer(p, j))
    k = Mat2(u, zero, zero, one)
    a = PadicScalar.uniformizer(p, j) * delta / C
    return Decomposition(a, B, D, j, k)


def recompose(dec: Decomposition) -> Mat2:
    p = dec.a.p
    return upper(p, dec.a, dec.b, dec.d) @ h_matrix(p, dec.j) @ dec.k


def working_precision(m: int, c: int = 0, l1: int = 0, l2: int = 0) -> int:
    """Default working precision N = m + max(c, 2) + l1 + l2 + 4."""
    return m + max(c, 2) + l1 + l2 + 4
