"""Kirillov model of a supercuspidal representation with trivial central character.

A vector is a finite sum of basis functions nu(p^-r x) 1_{p^r O^x}(x), stored
as shell r -> {key(nu): coefficient}.  Keys are the generator angles used by
:class:`~tripleconst.characters.MultiplicativeCharacter`.  Coefficients are
either complex numbers or exact phases (:class:`RationalAngle`); the w-action
keeps exact phases exact.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Union

import numpy as np

from .characters import (
    AdditiveCharacter,
    MultiplicativeCharacter,
    RationalAngle,
    angle_level,
    dlog_table,
    group_shape,
    units,
)
from .padic_core import PadicScalar

Coeff = Union[complex, RationalAngle]
Key = tuple[Fraction, ...]

ZERO_TOL = 1e-13
LEVEL_TOL = 1e-9


class ExceptionalTwistError(ValueError):
    """Residue characteristic 2 with c(pi) = 2 c(nu) >= 4: the twist formula is unavailable."""


def trivial_key(p: int) -> Key:
    return (Fraction(0),) if p != 2 else (Fraction(0), Fraction(0))


def key_level(p: int, key: Key) -> int:
    return angle_level(p, key)


def inverse_key(key: Key) -> Key:
    return tuple((-t) % 1 for t in key)


def _cval(a: Coeff) -> complex:
    return a.value if isinstance(a, RationalAngle) else complex(a)


def _cmul(a: Coeff, b: Coeff) -> Coeff:
    if isinstance(a, RationalAngle) and isinstance(b, RationalAngle):
        return a * b
    return _cval(a) * _cval(b)


# Fourier analysis on one shell -------------------------------------------------


def _grid_index(p: int, L: int) -> tuple[np.ndarray, tuple[np.ndarray, ...]]:
    us = units(p, L)
    tabs = dlog_table(p, L)
    return us, tuple(t[us] for t in tabs)


def _grid_keys(p: int, L: int) -> np.ndarray:
    """Key for each grid position of the coefficient array (object array)."""
    shape = group_shape(p, L)
    out = np.empty(shape, dtype=object)
    for idx in np.ndindex(*shape):
        out[idx] = tuple(Fraction(k, n) for k, n in zip(idx, shape))
    return out


def _key_to_index(p: int, L: int, key: Key) -> tuple[int, ...]:
    shape = group_shape(p, L)
    idx = []
    for t, n in zip(key, shape):
        k = t * n
        if k.denominator != 1:
            raise ValueError(f"character {key} has level above {L}")
        idx.append(int(k) % n)
    return tuple(idx)


def values_from_coeffs(p: int, L: int, comp: dict[Key, Coeff]) -> np.ndarray:
    """Values sum a_nu nu(u) on residues mod p^L (zero at non-units)."""
    L = max(L, 1)
    shape = group_shape(p, L)
    A = np.zeros(shape, dtype=complex)
    for key, a in comp.items():
        A[_key_to_index(p, L, key)] += _cval(a)
    G = np.fft.ifftn(A) * A.size
    us, pos = _grid_index(p, L)
    out = np.zeros(p**L, dtype=complex)
    out[us] = G[pos]
    return out


def coeffs_from_values(p: int, L: int, vals: np.ndarray, tol: float = ZERO_TOL) -> dict[Key, complex]:
    """a_nu = mean over units of vals(u) nu^-1(u), for all nu of level <= L."""
    L = max(L, 1)
    shape = group_shape(p, L)
    us, pos = _grid_index(p, L)
    G = np.zeros(shape, dtype=complex)
    G[pos] = vals[us]
    A = np.fft.fftn(G) / G.size
    keys = _grid_keys(p, L)
    out: dict[Key, complex] = {}
    for idx in zip(*np.nonzero(np.abs(A) > tol)):
        out[keys[idx]] = complex(A[idx])
    return out


# vectors ------------------------------------------------------------------------


@dataclass
class KirillovVector:
    p: int
    shells: dict[int, dict[Key, Coeff]] = field(default_factory=dict)

    @classmethod
    def newform(cls, p: int) -> "KirillovVector":
        """1_{O^x}."""
        return cls(p, {0: {trivial_key(p): RationalAngle(Fraction(0))}})

    @classmethod
    def basis(cls, p: int, r: int, key: Key, coeff: Coeff = None) -> "KirillovVector":
        if coeff is None:
            coeff = RationalAngle(Fraction(0))
        return cls(p, {r: {tuple(Fraction(t) % 1 for t in key): coeff}})

    def copy(self) -> "KirillovVector":
        return KirillovVector(self.p, {r: dict(c) for r, c in self.shells.items()})

    def add_term(self, r: int, key: Key, a: Coeff) -> None:
        comp = self.shells.setdefault(r, {})
        if key in comp:
            comp[key] = _cval(comp[key]) + _cval(a)
        else:
            comp[key] = a

    def pruned(self, tol: float = ZERO_TOL) -> "KirillovVector":
        out = KirillovVector(self.p)
        for r, comp in self.shells.items():
            kept = {k: a for k, a in comp.items() if abs(_cval(a)) > tol}
            if kept:
                out.shells[r] = kept
        return out

    @property
    def support(self) -> list[int]:
        return sorted(r for r, c in self.shells.items() if any(abs(_cval(a)) > LEVEL_TOL for a in c.values()))

    def depth(self, r: int) -> int:
        comp = self.shells.get(r, {})
        return max([key_level(self.p, k) for k in comp] + [0])

    def shell_values(self, r: int, L: Optional[int] = None) -> np.ndarray:
        """Values on p^r u indexed by u mod p^L (L defaults to the shell depth)."""
        L = max(self.depth(r), 1) if L is None else L
        if L < self.depth(r):
            raise ValueError("depth below the shell level")
        comp = self.shells.get(r, {})
        if not comp:
            return np.zeros(self.p ** max(L, 1), dtype=complex)
        return values_from_coeffs(self.p, L, comp)

    def __call__(self, y: PadicScalar) -> complex:
        comp = self.shells.get(y.v, {})
        total = 0j
        for key, a in comp.items():
            ch = MultiplicativeCharacter(self.p, key)
            n = max(ch.c, 1)
            total += _cval(a) * RationalAngle(ch.unit_angle(y.residue(n))).value
        return total

    def equals(self, other: "KirillovVector", tol: float = 0.0) -> bool:
        a, b = self.pruned(tol or ZERO_TOL), other.pruned(tol or ZERO_TOL)
        if set(a.shells) != set(b.shells):
            return False
        for r in a.shells:
            ca, cb = a.shells[r], b.shells[r]
            if set(ca) != set(cb):
                return False
            for k in ca:
                if tol == 0.0:
                    x, y = ca[k], cb[k]
                    if isinstance(x, RationalAngle) and isinstance(y, RationalAngle):
                        if x != y:
                            return False
                        continue
                if abs(_cval(ca[k]) - _cval(cb[k])) > (tol or ZERO_TOL):
                    return False
        return True


# epsilon data ---------------------------------------------------------------------


@dataclass
class EpsilonData:
    """C_nu for unit characters nu up to ``level_bound``; C_nu C_{nu^-1} = 1."""

    p: int
    c: int
    values: dict[Key, RationalAngle]
    level_bound: int

    def __post_init__(self):
        if self.c < 2:
            raise ValueError("supercuspidal conductor must be at least 2")
        for key, C in self.values.items():
            if not isinstance(C, RationalAngle):
                raise TypeError("C_nu must be given as exact phases")
            inv = inverse_key(key)
            if inv not in self.values:
                raise ValueError(f"C_nu given without its inverse for {key}")
            if C * self.values[inv] != RationalAngle(Fraction(0)):
                raise ValueError(f"C_nu C_nu^-1 != 1 at {key}")
        if trivial_key(self.p) not in self.values:
            raise ValueError("C_1 missing")
        self._check_involution()

    def _check_involution(self) -> None:
        for key in self.values:
            r = 0
            v = KirillovVector.basis(self.p, r, key)
            if self.p == 2 and self.c == 2 * key_level(self.p, key) and self.c >= 4:
                continue
            if not act_w(act_w(v, self), self).equals(v):
                raise ValueError("w-action is not an involution for this data")

    @property
    def C1(self) -> int:
        t = self.values[trivial_key(self.p)].t
        return 1 if t == 0 else -1

    def C(self, key: Key) -> RationalAngle:
        if key not in self.values:
            raise KeyError(f"no epsilon datum for {key} (level bound {self.level_bound})")
        return self.values[key]

    def with_C1(self, sign: int) -> "EpsilonData":
        vals = dict(self.values)
        vals[trivial_key(self.p)] = RationalAngle(Fraction(0 if sign > 0 else 1, 2))
        return EpsilonData(self.p, self.c, vals, self.level_bound)


def unit_keys(p: int, n: int) -> list[Key]:
    """Keys of all unit characters of level <= n."""
    if n == 0 or (p == 2 and n == 1):
        return [trivial_key(p)]
    L = n
    return [k for k in _grid_keys(p, L).flat]


def random_epsilon_data(
    p: int, c: int, rng: np.random.Generator, level_bound: int = 6, C1: Optional[int] = None, den: int = 2**16
) -> EpsilonData:
    """Random admissible data: random phases on inverse pairs, random signs on self-inverse nu."""
    vals: dict[Key, RationalAngle] = {}
    for key in unit_keys(p, level_bound):
        if key in vals:
            continue
        inv = inverse_key(key)
        if inv == key:
            vals[key] = RationalAngle(Fraction(int(rng.integers(2)), 2))
        else:
            t = Fraction(int(rng.integers(den)), den)
            vals[key] = RationalAngle(t)
            vals[inv] = RationalAngle(-t)
    if C1 is not None:
        vals[trivial_key(p)] = RationalAngle(Fraction(0 if C1 > 0 else 1, 2))
    return EpsilonData(p, c, vals, level_bound)


# actions --------------------------------------------------------------------------


def _as_scalar(p: int, x) -> PadicScalar:
    return x if isinstance(x, PadicScalar) else PadicScalar.from_rational(p, x)


def multiply_psi(v: KirillovVector, beta, psi: Optional[AdditiveCharacter] = None, tol: float = ZERO_TOL) -> KirillovVector:
    """x -> psi(beta x) v(x), re-expanded in the character basis."""
    p = v.p
    psi = psi or AdditiveCharacter(p)
    beta = _as_scalar(p, beta)
    if beta.is_zero:
        return v.copy()
    out = KirillovVector(p)
    for r, comp in v.shells.items():
        k = -(r + beta.v)
        if k <= 0:
            out.shells[r] = dict(comp)
            continue
        L = max(v.depth(r), k, 1)
        vals = values_from_coeffs(p, L, comp)
        us = units(p, L)
        # psi(beta p^r u) depends on u mod p^k
        b = beta * PadicScalar.uniformizer(p, r)
        bu = b.residue(k)
        ang = psi.sign * ((us * bu) % p**k) / p**k
        tw = np.zeros(p**L, dtype=complex)
        tw[us] = np.exp(2j * np.pi * ang)
        coeffs = coeffs_from_values(p, L, vals * tw, tol)
        if coeffs:
            out.shells[r] = coeffs
    return out


def act_borel(v: KirillovVector, a, b, d, psi: Optional[AdditiveCharacter] = None) -> KirillovVector:
    """(pi(a b; 0 d) phi)(x) = psi(b x / d) phi(a x / d)."""
    p = v.p
    a, b, d = (_as_scalar(p, x) for x in (a, b, d))
    if a.is_zero or d.is_zero:
        raise ValueError("a and d must be nonzero")
    e = a / d
    k = e.v
    out = KirillovVector(p)
    for r, comp in v.shells.items():
        new = {}
        for key, coef in comp.items():
            ch = MultiplicativeCharacter(p, key)
            n = max(ch.c, 1)
            ph = RationalAngle(ch.unit_angle(e.residue(n)))
            new[key] = _cmul(coef, ph)
        out.shells[r - k] = new
    return multiply_psi(out, b / d, psi)


def twist_shift(p: int, c: int, key: Key) -> int:
    n = key_level(p, key)
    if p == 2 and c == 2 * n and c >= 4:
        raise ExceptionalTwistError(f"c(pi) = 2 c(nu) = {c} in residue characteristic 2")
    return max(c, 2 * n)


def act_w(v: KirillovVector, eps: EpsilonData) -> KirillovVector:
    """nu(p^-r x) 1_{p^r O^x} -> C_nu nu^-1(p^-r' x) 1_{p^r' O^x}, r' = -r - max(c, 2c(nu))."""
    out = KirillovVector(v.p)
    for r, comp in v.shells.items():
        for key, coef in comp.items():
            rr = -r - twist_shift(v.p, eps.c, key)
            out.add_term(rr, inverse_key(key), _cmul(coef, eps.C(key)))
    return out


def level_components(v: KirillovVector, r: int, tol: float = LEVEL_TOL) -> set[int]:
    comp = v.shells.get(r, {})
    return {key_level(v.p, k) for k, a in comp.items() if abs(_cval(a)) > tol}


def levelshift_levels(p: int, n: int, r: int, vb: int) -> set[int]:
    """Levels present after multiplying a level-n function on shell r by psi(b x), v(b) = vb.

    With k = -r - vb, psi(b x) has level k on the shell and, for k >= 2, only
    level-k characters in its expansion (for k = 1 also the trivial one when
    p is odd).  Products with a level-n character then give:
    k < n: {n};  k > n: {k} (plus 0 when k = 1);  k = n: every level below n,
    together with n itself for odd p (for p = 2 the level-n characters form one
    coset of the level-(n-1) subgroup, so level n cancels).
    """
    k = -r - vb
    if k < n or k <= 0:
        return {n}
    if k > n:
        if k == 1:
            return {0, 1} if p != 2 else {0}
        return {k}
    if p != 2:
        return set(range(n + 1))
    return {0} | set(range(2, n))


# Whittaker vectors of the newform ---------------------------------------------------


def whittaker_sc(
    l: int, j: int, eps: EpsilonData, psi: Optional[AdditiveCharacter] = None
) -> KirillovVector:
    """y -> W(a(y)(1 0; p^j 1) a(p^-l)) for the newform W(a(y)) = 1_{O^x}(y)."""
    if l < 0 or j < 0:
        raise ValueError("l and j must be nonnegative")
    p, c = eps.p, eps.c
    psi = psi or AdditiveCharacter(p)
    pw = lambda k: PadicScalar.uniformizer(p, k)  # noqa: E731
    one = PadicScalar.from_rational(p, 1)
    zero = PadicScalar.zero(p)
    new = KirillovVector.newform(p)
    # (1 0; p^j 1) a(p^-l) = a(p^-l) (1 0; p^(j-l) 1)
    t = j - l
    if t >= c:
        inner = new
    elif t <= 0:
        # (1 0; p^t 1) = (p^-t, 1 - p^-t; 0, p^t) n(1) w n(1) n(p^-t - 1); the last
        # factor fixes the newform
        h0 = act_borel(act_w(new, eps), one, one, one, psi)
        inner = act_borel(h0, pw(-t), one - pw(-t), pw(t), psi)
    else:
        # (1 0; p^t 1) = (p^-t, 1; 0, p^t) w n(p^-t)
        x = act_borel(new, one, pw(-t), one, psi)
        inner = act_borel(act_w(x, eps), pw(-t), one, pw(t), psi)
    return act_borel(inner, pw(-l), zero, one, psi).pruned()


def sc_integral(v: KirillovVector, b, psi: Optional[AdditiveCharacter] = None) -> complex:
    """Integral of v(y) psi(b y) d^x y over F^x (vol O^x = 1)."""
    p = v.p
    psi = psi or AdditiveCharacter(p)
    w = multiply_psi(v, b, psi, tol=0.0)
    triv = trivial_key(p)
    return sum(_cval(comp.get(triv, 0j)) for comp in w.shells.values())
