"""Discriminant bookkeeping and the global constant, two ways.

``global_constant`` evaluates the closed coefficient of the L-ratio;
``assemble_from_locals`` multiplies the local constants I'_p over p | q and
divides by 8 nu_q.  Everything here is exact rational arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from ._arith import factorize, is_fundamental, kronecker, ord_p
from .local_triple import closed_I_prime_exact

__all__ = [
    "GlobalInput",
    "InvalidInput",
    "is_fundamental",
    "kronecker_symbol",
    "nu",
    "local_kinds",
    "global_constant",
    "assemble_from_locals",
    "valid_q1",
    "fundamental_range",
]


class InvalidInput(ValueError):
    pass


def kronecker_symbol(D: int, n: int) -> int:
    """chi_D(n) = (D/n)."""
    return kronecker(D, n)


def nu(n: int) -> Fraction:
    """Index of Gamma_0(n) in SL2(Z): n prod_{p | n} (1 + 1/p)."""
    if n < 1:
        raise InvalidInput("nu needs a positive integer")
    out = Fraction(n)
    for p in factorize(n):
        out *= 1 + Fraction(1, p)
    return out


@dataclass(frozen=True)
class GlobalInput:
    """D a fundamental discriminant, q1 | |D|.

    ``unramified2`` only matters when 4 | q1.  Positive D is accepted when
    ``allow_positive`` is set; only |D| enters the constants.
    """

    D: int
    q1: int
    unramified2: bool = False
    allow_positive: bool = False

    def __post_init__(self):
        D = self.D
        if D > 0 and not self.allow_positive:
            raise InvalidInput("D must be negative")
        if not is_fundamental(D):
            raise InvalidInput(f"{D} is not a fundamental discriminant")
        if self.q1 < 1 or self.q % self.q1:
            raise InvalidInput(f"q1 = {self.q1} does not divide q = {self.q}")

    @property
    def q(self) -> int:
        return abs(self.D)

    @property
    def q2(self) -> int:
        out = 1
        for p in factorize(self.q):
            if self.q1 % p:
                out *= p
        return out

    @property
    def exceptional(self) -> bool:
        """4 | q1 without the unramified flag."""
        return self.q1 % 4 == 0 and not self.unramified2


def valid_q1(D: int) -> list[int]:
    q = abs(D)
    return [d for d in range(1, q + 1) if q % d == 0]


def global_constant(g: GlobalInput) -> Fraction:
    q, q1 = g.q, g.q1
    out = nu(q1) / (8 * q * q1 * nu(q))
    if g.exceptional:
        out *= Fraction(3, 2)
    return out


def local_kinds(g: GlobalInput) -> dict[int, tuple[str, int]]:
    """p -> (kind of pi3 at p, m_p) for p | q."""
    out = {}
    for p in factorize(g.q):
        e = ord_p(g.q1, p) if g.q1 % p == 0 else 0
        m = ord_p(g.D, p)
        if e == 0:
            kind = "spherical"
        elif e == 1:
            kind = "steinberg"
        else:
            kind = "supercuspidal"
        out[p] = (kind, m)
    return out


def assemble_from_locals(g: GlobalInput) -> Fraction:
    prod = Fraction(1)
    for p, (kind, m) in local_kinds(g).items():
        flag = g.unramified2 if p == 2 else False
        prod *= closed_I_prime_exact(p, m, kind, flag)
    return prod / (8 * nu(g.q))


def fundamental_range(lo: int, hi: int) -> list[int]:
    """Fundamental discriminants D with lo <= D <= hi, D < 0."""
    return [D for D in range(lo, min(hi, -1) + 1) if is_fundamental(D)]
