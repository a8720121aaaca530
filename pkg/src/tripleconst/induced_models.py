"""Newforms in induced models and their Whittaker functions.

Two independent routes are provided for W(a(y)(1 0; p^j 1)) of a translate
pi(a(p^-l))W:

* :func:`whittaker_closed` evaluates the piecewise closed forms;
* :class:`BruteWhittaker` evaluates the defining integral
  W(g) = zeta(2)^(1/2)/zeta(1) * int_F phi(w n(x) g) psi^-1(x) dx
  from :func:`eval_newform_induced` alone.

For the brute force the substitution x = y t gives
W(a(y) h) = pref * chi_B(1, y) |y| * int F(t) psi(-y t) dt with
F(t) = phi(w n(t) h) independent of y.  F is cut into balls on which it is
certified constant (see ``_ball_radius``), so one ball list serves every y.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Optional

import numpy as np

from .characters import (
    AdditiveCharacter,
    MultiplicativeCharacter,
    epsilon_factor,
    eval_char,
    eval_psi,
)
from .haar_integration import zeta
from .padic_core import (
    INF,
    Mat2,
    PadicScalar,
    a_matrix,
    decompose_corner,
    h_matrix,
    n_matrix,
    w_matrix,
)


class RangeError(ValueError):
    """Requested (j, l) outside the range covered by a closed form."""


class TailError(RuntimeError):
    """The outer region of a defining integral did not stabilize."""


@dataclass(frozen=True)
class InducedRepSpec:
    """principal(omega, omega') with c(omega') = 0, or steinberg(omega3).

    ``spherical(omega3)`` is principal(omega3, omega3^-1).
    """

    kind: str
    chi1: MultiplicativeCharacter
    chi2: Optional[MultiplicativeCharacter] = None

    def __post_init__(self):
        if self.kind == "principal":
            if self.chi2 is None:
                raise ValueError("principal series needs two characters")
            if self.chi2.c != 0:
                raise ValueError("second inducing character must be unramified")
        elif self.kind == "steinberg":
            if self.chi1.c != 0:
                raise ValueError("steinberg twist must be unramified")
        else:
            raise ValueError(f"unknown kind {self.kind!r}")

    @classmethod
    def principal(cls, omega, omega_prime) -> "InducedRepSpec":
        return cls("principal", omega, omega_prime)

    @classmethod
    def steinberg(cls, omega3) -> "InducedRepSpec":
        return cls("steinberg", omega3)

    @classmethod
    def spherical(cls, omega3) -> "InducedRepSpec":
        if omega3.c != 0:
            raise ValueError("spherical twist must be unramified")
        return cls("principal", omega3, omega3.inverse())

    @property
    def p(self) -> int:
        return self.chi1.p

    @property
    def conductor(self) -> int:
        if self.kind == "steinberg":
            return 1
        return self.chi1.c + self.chi2.c

    @property
    def is_spherical(self) -> bool:
        return self.kind == "principal" and self.conductor == 0

    def inverted(self) -> "InducedRepSpec":
        """Same shape with every character inverted (z -> 1/z)."""
        if self.kind == "steinberg":
            return InducedRepSpec("steinberg", self.chi1.inverse())
        return InducedRepSpec("principal", self.chi1.inverse(), self.chi2.inverse())

    # modulus character of the Borel
    def chi_B(self, a: PadicScalar, d: PadicScalar) -> complex:
        q = self.p
        vr = a.v - d.v
        if self.kind == "steinberg":
            return eval_char(self.chi1, a * d) * float(q) ** (-vr)
        return eval_char(self.chi1, a) * eval_char(self.chi2, d) * float(q) ** (-vr / 2)

    def cell_value(self, j: int) -> float:
        """Value of the newform at (1 0; p^j 1), j clipped at the conductor."""
        M = self.conductor
        if M == 0 or j == 0:
            return 1.0
        if self.kind == "steinberg":
            return -float(self.p)
        return 0.0


def eval_newform_induced(spec: InducedRepSpec, g: Mat2, m: Optional[int] = None) -> complex:
    """phi(g) for the newform in the induced model, via decompose_corner at level m."""
    M = spec.conductor if m is None else m
    if M < spec.conductor:
        raise ValueError("level below the conductor")
    dec = decompose_corner(g, M)
    cell = spec.cell_value(min(dec.j, spec.conductor) if spec.conductor else 0)
    if cell == 0.0:
        return 0j
    return cell * spec.chi_B(dec.a, dec.d)


@dataclass(frozen=True)
class WhittakerEvaluator:
    """W for spec in W(pi, psi), or in W(pi, psi-bar) built from inverted characters.

    ``l`` selects the translate pi(a(p^-l))W.
    """

    spec: InducedRepSpec
    conjugated: bool = False
    l: int = 0

    @property
    def p(self) -> int:
        return self.spec.p

    @property
    def eff(self) -> InducedRepSpec:
        return self.spec.inverted() if self.conjugated else self.spec

    @property
    def sign(self) -> int:
        return -1 if self.conjugated else 1

    @property
    def psi(self) -> AdditiveCharacter:
        return AdditiveCharacter(self.p, self.sign)

    @property
    def level(self) -> int:
        return self.spec.conductor + self.l

    def prefactor(self) -> float:
        q = self.p
        return math.sqrt(zeta(q, 2)) / zeta(q, 1)


# closed forms ---------------------------------------------------------------------


def _psi_val(psi: AdditiveCharacter, x: PadicScalar) -> complex:
    return eval_psi(psi, x).value


def _unit_sum(ev: WhittakerEvaluator, y: PadicScalar, j: int) -> complex:
    """sum over b in U_j/U_m of (omega^-1 omega')(b) psi(-b y p^-j)."""
    spec = ev.eff
    p, m = ev.p, spec.conductor
    chi = spec.chi1.inverse() * spec.chi2
    a = y * PadicScalar.uniformizer(p, -j)
    psi = ev.psi
    total = 0j
    for t in range(p ** (m - j)):
        b = PadicScalar.from_rational(p, 1 + t * p**j)
        total += eval_char(chi, b) * _psi_val(psi, -(b * a))
    return total


def _divisor_sum(z: complex, n: int) -> complex:
    """sum over i + i' = n (i, i' >= 0) of z^i z^-i'."""
    if n < 0:
        return 0j
    return sum(z**i * z ** (-(n - i)) for i in range(n + 1))


def whittaker_closed(ev: WhittakerEvaluator, y: PadicScalar, j: int) -> complex:
    """Closed-form value of the translate at a(y)(1 0; p^j 1)."""
    if y.is_zero:
        raise ValueError("y must be nonzero")
    spec = ev.eff
    p, l = ev.p, ev.l
    q = float(p)
    vy = y.v
    psi = ev.psi
    pw = PadicScalar.uniformizer
    if j < 0:
        raise RangeError("j must be nonnegative")

    if spec.kind == "principal" and spec.conductor > 0:
        if l != 0:
            raise RangeError("closed forms for ramified principal series need l = 0")
        m = spec.conductor
        pref = ev.prefactor()
        om, omp = spec.chi1, spec.chi2
        if j >= m:
            return pref * eval_char(omp, y) * q ** (-vy / 2) if vy >= 0 else 0j
        if j == 0:
            if vy < -m:
                return 0j
            eps = epsilon_factor(1.0, om * omp.inverse(), psi.conjugate())
            return pref * eval_char(om, y) * q ** (-vy / 2) * _psi_val(psi, y) * eps
        if vy != j - m:
            return 0j
        return (
            pref
            * eval_char(omp, y)
            * q ** (vy / 2)
            * _psi_val(psi, y * pw(p, -j))
            * _unit_sum(ev, y, j)
        )

    if spec.kind == "steinberg":
        om3 = spec.chi1
        pref = zeta(q, 2) ** -0.5
        yl = y * pw(p, -l)
        if j <= l:
            if vy < 2 * j - l - 1:
                return 0j
            mod = q ** (-(vy + l - 2 * j + 1))
            return -pref * _psi_val(psi, y * pw(p, -j)) * eval_char(om3, yl) * mod
        if vy < l:
            return 0j
        return pref * eval_char(om3, yl) * q ** (-(vy - l))

    # spherical
    om, omp = spec.chi1, spec.chi2
    z = om.z
    Lval = 1.0 / (1.0 - (om * omp.inverse()).z / q)
    pref = ev.prefactor() / Lval
    if j <= l:
        if vy < 2 * j - l:
            return 0j
        n = vy + l - 2 * j
        return pref * _psi_val(psi, y * pw(p, -j)) * q ** (-n / 2) * _divisor_sum(z, n)
    if vy < l:
        return 0j
    n = vy - l
    return pref * q ** (-n / 2) * _divisor_sum(z, n)


# brute force ------------------------------------------------------------------------


def _frac_mul(us: np.ndarray, n: int, e: int, p: int) -> np.ndarray:
    """frac(u * n / p^e) for an int64 array u and a Python int n, to float accuracy."""
    if e <= 0:
        return np.zeros(len(us))
    P = p**e
    n %= P
    umax = int(us.max()) if len(us) else 1
    umax = max(umax, 1)
    if P * umax < 2**62:
        return ((us * n) % P) / P
    # split n = hi * B + lo so that both partial products stay exact
    b = 0
    while p ** (b + 1) * umax < 2**52 and b + 1 < e:
        b += 1
    B = p**b
    top = P // B
    if top * umax >= 2**62:
        # fall back to exact Python integers
        vals = [(int(u) * n) % P for u in us]
        return np.array([Fraction(v, P) for v in vals], dtype=float)
    hi, lo = divmod(n, B)
    part1 = ((us * hi) % top) / top
    part2 = (us * lo) / P
    return np.mod(part1 + part2, 1.0)


class BruteWhittaker:
    """Defining-integral evaluation of y -> W_l(a(y)(1 0; p^j 1)) for one (evaluator, j).

    ``vmax`` bounds v(y) for which the precomputed ball list is valid.
    """

    MAX_BALLS = 400000

    def __init__(self, ev: WhittakerEvaluator, j: int, vmax: Optional[int] = None):
        self.ev = ev
        self.j = j
        spec = ev.eff
        self.spec = spec
        self.p = p = ev.p
        self.M = spec.conductor
        pw = PadicScalar.uniformizer
        self.h = h_matrix(p, j) @ a_matrix(p, pw(p, -ev.l))
        if vmax is None:
            vmax = self.M + ev.l + 8
        self.vmax = vmax
        self.S = self._start()
        self._build()

    # outer region: F(t) = chi_B(1/t, t) phi((1 0; 1/t 1) h) once v(1/t) >= e'
    def _start(self) -> int:
        h = self.h
        M = max(self.M, 0)
        vdet = h.det().v
        vmin = min(x.v for x in (h.a, h.b) if not x.is_zero)
        e_prime = M + vdet - 2 * vmin
        spec = self.spec
        if spec.kind == "principal":
            chi = spec.chi1.inverse() * spec.chi2
            cchi = chi.c
        else:
            cchi = 0
        bound = -cchi - self.vmax if cchi > 0 else -1 - self.vmax
        return min(-e_prime, bound)

    def _value_and_radius(self, x0: Fraction) -> tuple[complex, int]:
        """F(x0) and an s such that F is constant on x0 + p^s.

        With w n(x0) h = b h_j' k, b = (al be; 0 ga), moving x0 by u multiplies
        on the left by (1 0; -u 1), and b^-1 (1 0; -u 1) b equals an upper
        unipotent times diag(d1, d2) times (1 0; l' 1) where
        d2 = 1 - u be/ga, d1 = (1 - 2(u be/ga)^2)/d2 and l' = -u (al/ga)/d2.
        F stays put once d1, d2 lie in the kernel of the inducing data and
        (1 0; l' 1) h_j' stays in the same coset class.
        """
        p = self.p
        g = w_matrix(p) @ n_matrix(p, x0) @ self.h
        M = self.M
        spec = self.spec
        dec = decompose_corner(g, M)
        jj = min(dec.j, M) if M else 0
        cell = spec.cell_value(jj)
        val = 0j if cell == 0.0 else cell * spec.chi_B(dec.a, dec.d)
        al, be, ga = dec.a, dec.b, dec.d
        if spec.kind == "steinberg":
            need_x, need_l = 1, 1
        elif M == 0:
            need_x, need_l = 1, None
        elif cell == 0.0:
            need_x, need_l = 1, 1
        else:
            need_x, need_l = max(spec.chi1.c, 1), M
        rad = -INF
        if need_l is not None:
            rad = need_l - (al.v - ga.v)
        if not be.is_zero:
            rad = max(rad, need_x - (be.v - ga.v))
        if rad == -INF:
            rad = self.S
        return val, rad

    def _build(self) -> None:
        p, S = self.p, self.S
        # each ball: (n, s) meaning x0 = n p^S with x0 + p^s Z_p, value
        balls_n: list[int] = []
        balls_s: list[int] = []
        balls_v: list[complex] = []
        stack = [(0, S)]
        while stack:
            n, s = stack.pop()
            x0 = Fraction(n) * Fraction(p) ** S
            val, rad = self._value_and_radius(x0)
            if rad <= s:
                if val != 0:
                    balls_n.append(n)
                    balls_s.append(s)
                    balls_v.append(val)
                continue
            step = p ** (s - S)
            for i in range(p):
                stack.append((n + i * step, s + 1))
            if len(stack) + len(balls_n) > self.MAX_BALLS:
                raise TailError("ball decomposition did not terminate")
        self.balls_n = balls_n
        self.balls_s = np.array(balls_s, dtype=np.int64)
        self.balls_v = np.array(balls_v, dtype=complex)

    @property
    def n_balls(self) -> int:
        return len(self.balls_n)

    def _chi_factor(self, r: int, us: np.ndarray) -> np.ndarray:
        """pref * chi_B(1, y) |y| on y = p^r u."""
        spec = self.spec
        q = float(self.p)
        pref = self.ev.prefactor()
        if spec.kind == "steinberg":
            # omega3(y) |y|^-1 |y|, omega3 unramified
            return np.full(len(us), pref * spec.chi1.z**r, dtype=complex)
        ch = spec.chi2  # unramified
        base = ch.z**r * q ** (r / 2) * q ** (-r)
        return np.full(len(us), pref * base, dtype=complex)

    def shell_values(self, r: int, us: np.ndarray) -> np.ndarray:
        """W at y = p^r u for the unit residues us."""
        if r > self.vmax:
            raise TailError(f"v(y) = {r} beyond the prepared range {self.vmax}")
        us = np.asarray(us, dtype=np.int64)
        sel = np.nonzero(self.balls_s >= -r)[0]
        out = np.zeros(len(us), dtype=complex)
        if len(sel):
            p, S = self.p, self.S
            e = -r - S  # frac(p^r u n p^S) = frac(u n / p^e)
            # group balls by n mod p^e, since psi only sees those digits
            coeff: dict[int, complex] = {}
            P = p ** max(e, 0)
            for i in sel:
                key = self.balls_n[i] % P if e > 0 else 0
                coeff[key] = coeff.get(key, 0j) + self.balls_v[i] * float(p) ** (-int(self.balls_s[i]))
            keys = list(coeff)
            wts = np.array([coeff[k] for k in keys])
            sign = -self.ev.sign
            chunk = max(1, 2_000_000 // max(len(us), 1))
            for c0 in range(0, len(keys), chunk):
                ks = keys[c0 : c0 + chunk]
                ang = np.stack([_frac_mul(us, k, e, p) for k in ks], axis=1)
                out += np.exp(2j * np.pi * sign * ang) @ wts[c0 : c0 + chunk]
        return out * self._chi_factor(r, us)

    def __call__(self, y: PadicScalar) -> complex:
        depth = max(self.ev.level - self.j, 1) + 2
        u = np.array([y.residue(min(depth, y.N) if y.N != INF else depth)], dtype=np.int64)
        return complex(self.shell_values(y.v, u)[0])


@lru_cache(maxsize=256)
def _brute_cached(ev: WhittakerEvaluator, j: int, vmax: int) -> BruteWhittaker:
    return BruteWhittaker(ev, j, vmax)


def brute_for(ev: WhittakerEvaluator, j: int, vmax: Optional[int] = None) -> BruteWhittaker:
    if vmax is None:
        vmax = ev.level + 8
    return _brute_cached(ev, j, vmax)


def whittaker_bruteforce(ev: WhittakerEvaluator, y: PadicScalar, j: int) -> complex:
    """Defining-integral value of the translate at a(y)(1 0; p^j 1)."""
    vmax = max(ev.level + 8, y.v + 2)
    return brute_for(ev, j, vmax)(y)


def unit_depth(ev: WhittakerEvaluator, j: int) -> int:
    """y -> W(a(y) h_j) is invariant under y -> y u for u in 1 + p^k."""
    return max(ev.level - j, 1)
