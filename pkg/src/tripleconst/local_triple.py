"""Local Rankin-Selberg functionals, local L-factors and the normalized constant I'.

pi1 = omega1 [+] omega2 with c(omega1) = m, c(omega2) = 0, pi2 its contragredient,
and pi3 one of steinberg(omega3), spherical(omega3), or a supercuspidal given
through its Kirillov-model epsilon data.

    ell = zeta(1)^(1/2) int_K int phi1 W2 W3 (a(y)k) d^x y / |y| dk
    I   = ell * ell~
    I'  = zeta(1)^2 L(1, pi3, Ad) / (zeta(2)^2 L(1/2, pi1 x pi2 x pi3)) * I / (N1 N2 N3)

where N_i are the newform norms int W_i(a(y)) W~_i(a(y)) d^x y.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np

from .characters import AdditiveCharacter, MultiplicativeCharacter, eval_char, units
from .haar_integration import hu_weights, zeta
from .induced_models import InducedRepSpec, TailError, WhittakerEvaluator, brute_for
from .kirillov_supercuspidal import (
    EpsilonData,
    KirillovVector,
    sc_integral,
    trivial_key,
    whittaker_sc,
)
from .padic_core import PadicScalar

KINDS = ("steinberg", "spherical", "supercuspidal")


class RangeError(ValueError):
    """Translate exponent or character outside the admissible range."""


@dataclass(frozen=True)
class SupercuspidalData:
    c: int
    eps: EpsilonData
    unramified_flag: bool = False


@dataclass(frozen=True)
class LocalTripleSpec:
    p: int
    m: int
    omega1: MultiplicativeCharacter
    omega2: MultiplicativeCharacter
    pi3_kind: str
    omega3: Optional[MultiplicativeCharacter] = None
    sc: Optional[SupercuspidalData] = None
    l1: int = 0
    l2: int = 0
    extended: bool = False

    def __post_init__(self):
        p, m = self.p, self.m
        if m < 1:
            raise RangeError("m must be at least 1")
        if self.omega1.c != m:
            raise RangeError(f"c(omega1) = {self.omega1.c}, expected m = {m}")
        if self.omega2.c != 0:
            raise RangeError("omega2 must be unramified")
        if not (self.omega1.is_unitary and self.omega2.is_unitary):
            raise RangeError("omega1 and omega2 must be unitary")
        if self.pi3_kind not in KINDS:
            raise RangeError(f"unknown kind {self.pi3_kind!r}")
        if self.l1 < 0 or self.l2 < 0:
            raise RangeError("translate exponents must be nonnegative")
        q = float(p)
        if self.pi3_kind == "steinberg":
            w3 = self.omega3
            if w3 is None or w3.c != 0 or abs(w3.z**2 - 1) > 1e-12:
                raise RangeError("steinberg needs omega3 unramified with omega3^2 = 1")
            lmax = m - 1
        elif self.pi3_kind == "spherical":
            w3 = self.omega3
            if w3 is None or w3.c != 0:
                raise RangeError("spherical needs an unramified omega3")
            if not q**-0.5 < abs(w3.z) < q**0.5:
                raise RangeError("need q^-1/2 < |omega3(p)| < q^1/2")
            if not w3.is_unitary and abs(w3.z.imag) > 1e-12:
                raise RangeError("a non-unitary omega3(p) must be real")
            lmax = m
        else:
            if self.sc is None:
                raise RangeError("supercuspidal data missing")
            c = self.sc.c
            if not 2 <= c <= m or self.sc.eps.c != c or self.sc.eps.p != p:
                raise RangeError("need 2 <= c <= m and matching epsilon data")
            lmax = m - c
        if not self.extended and max(self.l1, self.l2) > lmax:
            raise RangeError(f"translate exponents must lie in [0, {lmax}]")

    @property
    def c3(self) -> int:
        if self.pi3_kind == "supercuspidal":
            return self.sc.c
        return 1 if self.pi3_kind == "steinberg" else 0

    @property
    def pi1(self) -> InducedRepSpec:
        return InducedRepSpec.principal(self.omega1, self.omega2)

    @property
    def pi3(self) -> Optional[InducedRepSpec]:
        if self.pi3_kind == "steinberg":
            return InducedRepSpec.steinberg(self.omega3)
        if self.pi3_kind == "spherical":
            return InducedRepSpec.spherical(self.omega3)
        return None


# L-factors ------------------------------------------------------------------------


def L_unramified(q: int, z: complex, s: float) -> complex:
    return 1.0 / (1.0 - z * float(q) ** (-s))


def adjoint_L(spec: LocalTripleSpec, s: float, which: int = 3) -> complex:
    q = spec.p
    if which in (1, 2):
        return zeta(q, s)
    if spec.pi3_kind == "steinberg":
        return zeta(q, s + 1)
    if spec.pi3_kind == "spherical":
        z = spec.omega3.z
        return zeta(q, s) * L_unramified(q, z**2, s) * L_unramified(q, z**-2, s)
    return 1.0 / (1.0 + float(q) ** (-s)) if spec.sc.unramified_flag else 1.0


def triple_L(spec: LocalTripleSpec, s: float) -> complex:
    q = spec.p
    if spec.pi3_kind == "steinberg":
        return L_unramified(q, spec.omega3.z, s + 0.5) ** 2
    if spec.pi3_kind == "spherical":
        z = spec.omega3.z
        return L_unramified(q, z, s) ** 2 * L_unramified(q, 1 / z, s) ** 2
    return 1.0


@dataclass(frozen=True)
class LFactorTable:
    zeta1: float
    zeta2: float
    ad1: complex
    ad3: complex
    triple_half: complex

    @classmethod
    def of(cls, spec: LocalTripleSpec) -> "LFactorTable":
        q = spec.p
        return cls(zeta(q, 1), zeta(q, 2), adjoint_L(spec, 1, 1), adjoint_L(spec, 1, 3), triple_L(spec, 0.5))

    def normalization(self) -> complex:
        return self.ad1 * self.ad1 * self.ad3 / (self.zeta2**2 * self.triple_half)


# geometric tails ------------------------------------------------------------------


def recurrence_tail(vals: list[complex], roots: list[complex], first_locked: int, tol: float = 1e-9) -> complex:
    """Sum of s_n for n beyond the last computed index.

    ``vals[n]`` are shell sums; from index ``first_locked`` on they must satisfy
    the linear recurrence with characteristic roots ``roots`` (checked).
    """
    coeffs = np.poly(roots)  # x^k + a1 x^(k-1) + ... + ak
    k = len(roots)
    a = coeffs[1:]
    n_last = len(vals) - 1
    if n_last - first_locked < k + 1:
        raise TailError("not enough locked shells to check the tail")
    scale = max(abs(v) for v in vals[first_locked:]) or 1.0
    for n in range(first_locked + k, n_last + 1):
        pred = -sum(a[i - 1] * vals[n - i] for i in range(1, k + 1))
        if abs(pred - vals[n]) > tol * scale:
            raise TailError(f"shell sums do not follow the expected recurrence at shell index {n}")
    N = n_last - k + 1
    Q = 0j
    for n in range(k):
        Q += vals[N + n] + sum(a[i - 1] * vals[N + n - i] for i in range(1, n + 1))
    total_from_N = Q / (1 + a.sum())
    return complex(total_from_N - sum(vals[N:]))


# Rankin-Selberg functional ----------------------------------------------------------


def _sides(spec: LocalTripleSpec, which: str):
    """(phi1 character, W2 evaluator, W3 source, l) for the plain or tilde functional."""
    if which == "plain":
        phi_char = spec.omega1
        ev2 = WhittakerEvaluator(spec.pi1, conjugated=True)
        l, conj3 = spec.l1, False
    elif which == "tilde":
        phi_char = spec.omega1.inverse()
        ev2 = WhittakerEvaluator(spec.pi1, conjugated=False)
        l, conj3 = spec.l2, True
    else:
        raise ValueError("which must be 'plain' or 'tilde'")
    if spec.pi3_kind == "supercuspidal":
        psi = AdditiveCharacter(spec.p, -1 if conj3 else 1)
        src = whittaker_sc(l, 0, spec.sc.eps, psi)
    else:
        src = WhittakerEvaluator(spec.pi3, conjugated=conj3, l=l)
    return phi_char, ev2, src, l


def _tail_roots(spec: LocalTripleSpec) -> list[complex]:
    q = float(spec.p)
    if spec.pi3_kind == "steinberg":
        return [spec.omega3.z / q]
    z = spec.omega3.z
    return [z * q**-0.5, q**-0.5 / z]


def ell_RS(spec: LocalTripleSpec, which: str = "plain", detail: bool = False):
    """The local Rankin-Selberg functional; only the j = 0 coset survives."""
    p, m = spec.p, spec.m
    q = float(p)
    phi_char, ev2, src, l = _sides(spec, which)
    sc = isinstance(src, KirillovVector)
    D = max(m, spec.c3 + l, 1)
    us = units(p, D)
    phi_units = phi_char.unit_values(D)[us]
    r0 = -m - l - 2
    if sc:
        r_end = max(src.support + [r0]) + 1
        roots = None
    else:
        roots = _tail_roots(spec)
        r_lock = max(l, 0) + 1
        r_end = r_lock + len(roots) + 4
    vmax = r_end + 2
    b2 = brute_for(ev2, 0, vmax)
    b3 = None if sc else brute_for(src, 0, vmax)
    shells = {}
    for r in range(r0, r_end + 1):
        phi = phi_char.z**r * q ** (-r / 2) * phi_units
        w2 = b2.shell_values(r, us)
        if sc:
            if r not in src.shells:
                shells[r] = 0j
                continue
            w3 = src.shell_values(r, D)[us]
        else:
            w3 = b3.shell_values(r, us)
        # d^x y / |y| on the shell: mean over units times q^r
        shells[r] = complex(np.mean(phi * w2 * w3)) * q**r
    for r in (r0, r0 + 1):
        if abs(shells[r]) > 1e-12:
            raise TailError(f"shell {r} should vanish but gives {shells[r]}")
    total = sum(shells.values())
    if roots is not None:
        vals = [shells[r] for r in range(r0, r_end + 1)]
        total += recurrence_tail(vals, roots, r_lock - r0)
    A0 = float(hu_weights(p, m)[0])
    out = math.sqrt(zeta(q, 1)) * A0 * total
    if detail:
        return out, shells
    return out


def local_I(spec: LocalTripleSpec) -> complex:
    return ell_RS(spec, "plain") * ell_RS(spec, "tilde")


def _norm_induced(ev: WhittakerEvaluator, evt: WhittakerEvaluator, roots: list[complex]) -> complex:
    """int W(a(y)) W~(a(y)) d^x y via the j = M cell (W(a(y)) = W(a(y) h_M))."""
    p = ev.p
    M = ev.spec.conductor
    D = max(M, 1)
    us = units(p, D)
    r_lock = 1
    r_end = r_lock + len(roots) + 4
    b = brute_for(ev, M, r_end + 2)
    bt = brute_for(evt, M, r_end + 2)
    r0 = -3
    vals = [complex(np.mean(b.shell_values(r, us) * bt.shell_values(r, us))) for r in range(r0, r_end + 1)]
    if any(abs(v) > 1e-12 for v in vals[:3]):
        raise TailError("norm integrand does not vanish below v(y) = 0")
    return sum(vals) + recurrence_tail(vals, roots, r_lock - r0)


def norms(spec: LocalTripleSpec) -> tuple[complex, complex, complex]:
    """Newform norms of pi1, pi2 and pi3."""
    q = float(spec.p)
    ev1 = WhittakerEvaluator(spec.pi1)
    n1 = _norm_induced(ev1, WhittakerEvaluator(spec.pi1, conjugated=True), [1 / q])
    # pi2 = contragredient: the same integrand with the roles swapped
    n2 = _norm_induced(WhittakerEvaluator(spec.pi1, conjugated=True), ev1, [1 / q])
    if spec.pi3_kind == "supercuspidal":
        new = KirillovVector.newform(spec.p)
        n3 = complex(np.mean(new.shell_values(0, 1)[units(spec.p, 1)] ** 2))
    elif spec.pi3_kind == "steinberg":
        n3 = _norm_induced(WhittakerEvaluator(spec.pi3), WhittakerEvaluator(spec.pi3, True), [q**-2])
    else:
        z = spec.omega3.z
        n3 = _norm_induced(
            WhittakerEvaluator(spec.pi3), WhittakerEvaluator(spec.pi3, True), [z**2 / q, 1 / q, z**-2 / q]
        )
    return n1, n2, n3


# closed forms -----------------------------------------------------------------------


def closed_I_prime_exact(p: int, m: int, kind: str, unramified_flag: bool = False) -> Fraction:
    base = Fraction(1, p**m)
    if kind == "steinberg":
        return base * (1 + Fraction(1, p))
    if kind == "spherical":
        return base
    if kind == "supercuspidal":
        return base if unramified_flag else base * (1 + Fraction(1, p))
    raise ValueError(f"unknown kind {kind!r}")


def closed_I_prime(spec: LocalTripleSpec) -> complex:
    flag = spec.sc.unramified_flag if spec.sc else False
    return complex(float(closed_I_prime_exact(spec.p, spec.m, spec.pi3_kind, flag)))


def local_I_prime(spec: LocalTripleSpec, mode: str = "bruteforce"):
    if mode == "closed":
        return closed_I_prime(spec)
    L = LFactorTable.of(spec)
    n1, n2, n3 = norms(spec)
    brute = L.normalization() * local_I(spec) / (n1 * n2 * n3)
    if mode == "bruteforce":
        return brute
    if mode == "both":
        closed = closed_I_prime(spec)
        return brute, closed, abs(brute - closed)
    raise ValueError("mode must be bruteforce, closed or both")


def record(spec: LocalTripleSpec) -> dict:
    """Result record for one local constant (JSON-ready)."""
    t0 = time.perf_counter()
    brute, closed, err = local_I_prime(spec, "both")
    ms = (time.perf_counter() - t0) * 1000
    return {
        "p": spec.p,
        "m": spec.m,
        "kind": spec.pi3_kind,
        "l1": spec.l1,
        "l2": spec.l2,
        "I_prime_bruteforce": {"re": brute.real, "im": brute.imag},
        "I_prime_closed": {"re": closed.real, "im": closed.imag},
        "abs_err": err,
        "wall_time_ms": ms,
    }


# matrix-coefficient oracle ------------------------------------------------------------


def _addint_shell(q: int, k: int, vt: int) -> float:
    """int over v(x) = k of psi(t x) dx for v(t) = vt."""
    if vt + k >= 0:
        return float(q) ** (-k) * (1 - 1 / q)
    if vt + k == -1:
        return -float(q) ** (-k - 1)
    return 0.0


def _addint_ball(q: int, X: int, vt: int) -> float:
    """int over v(x) >= X of psi(t x) dx."""
    return float(q) ** (-X) if vt + X >= 0 else 0.0


def phi1_closed(pi1: InducedRepSpec, x: PadicScalar, y: PadicScalar, j: int) -> complex:
    """Normalized matrix coefficient of the pi1 newform at n(x) a(y) (1 0; p^j 1)."""
    p, m = pi1.p, pi1.conductor
    om1, om2 = pi1.chi1, pi1.chi2
    chi = om1.inverse() * om2
    q = float(p)
    vy = y.v
    vx = x.v if not x.is_zero else math.inf
    if j >= m:
        if vy >= 0 and vx >= 0:
            return eval_char(om2, y) * q ** (-vy / 2)
        if vy <= 0 and vx >= vy:
            return eval_char(om2, y) * q ** (vy / 2)
        return 0j
    if j == 0:
        s = x + y
        if not s.is_zero and s.v <= min(-m, vy):
            return eval_char(om1, y) * q ** (-vy / 2) * eval_char(chi, s) * q ** s.v
        return 0j
    if vy <= j - m and vx >= vy:
        return eval_char(om2, y) * q ** (vy / 2) * eval_char(chi, 1 + x * PadicScalar.uniformizer(p, j) / y)
    return 0j


def matrix_coefficient_I(spec: LocalTripleSpec, detail: bool = False):
    """I / <phi, phi~> as sum_j A_j int_{Z\\B} Phi1 Phi2 Phi3 (b (1 0; p^j 1)) db.

    Phi1 and Phi2 = conj(Phi1) come from :func:`phi1_closed`, so only |Phi1|^2
    enters; Phi3(n(x) a(y) h_j) = int_{v(t)=l} psi(t x) V_j(t y) d^x t with V_j
    the Kirillov vector of the translate at (1 0; p^j 1).
    """
    if spec.pi3_kind != "supercuspidal":
        raise ValueError("the matrix-coefficient route is implemented for supercuspidal pi3")
    c = spec.sc.c
    if c >= 4:
        raise ValueError("matrix-coefficient facts are only available for c < 4")
    if spec.l1 != spec.l2:
        raise ValueError("matrix coefficients need the same translate on both sides")
    p, m, l = spec.p, spec.m, spec.l1
    q = float(p)
    eps = spec.sc.eps
    A = [float(a) for a in hu_weights(p, m)]
    per_j = []
    for j in range(m + 1):
        V = whittaker_sc(l, j, eps)
        total = 0.0 + 0j
        for s in V.support:
            r = s - l  # v(y) with t y on shell s, v(t) = l
            if j == 0:
                # v(x + y) = k <= min(-m, r); Phi3 splits into psi(t x') and psi(-t y)
                comp = V.shells[s]
                Vs = KirillovVector(p, {s: comp})
                inner = sc_integral(Vs, -1)
                acc = 0.0
                for k in range(-l - 1, min(-m, r) + 1):
                    # |Phi1|^2 = |y| |x+y|^-2
                    acc += q ** (-r) * q ** (2 * k) * _addint_shell(p, k, l)
                # db = |y|^-1 d^x y dx
                total += acc * q**r * inner
                continue
            avg = KirillovVector(p, {s: V.shells[s]})
            mean = complex(_cval_trivial(avg, s))
            if j == m:
                # region v(x) >= 0 (v(y) >= 0, value |y|) or v(x) >= v(y) (v(y) <= 0, value |y|^-1)
                if r >= 0:
                    total += q ** (-r) * _addint_ball(p, 0, l) * q ** (r) * mean
                if r <= 0:
                    # the r = 0 shell is covered by both rows of the table; count it once
                    if r == 0:
                        continue
                    total += q ** (r) * _addint_ball(p, r, l) * q ** (r) * mean
            else:
                if r > j - m:
                    continue
                # |Phi1|^2 = |y|^-1 on v(y) <= j - m, v(x) >= v(y) (checked against
                # t-sums of Whittaker values in the tests)
                X = r
                total += q ** (r) * _addint_ball(p, X, l) * q ** (r) * mean
        per_j.append(total)
    out = sum(a * t for a, t in zip(A, per_j))
    if detail:
        return out, per_j
    return out


def _cval_trivial(v: KirillovVector, s: int) -> complex:
    a = v.shells.get(s, {}).get(trivial_key(v.p), 0j)
    return a.value if hasattr(a, "value") else complex(a)
