"""Acceptance suites shared by ``tripleconst verify`` and the test-suite.

Each suite returns a :class:`SuiteResult`.  Random draws come from
``numpy.random.default_rng([seed, criterion])`` so results depend only on the seed.
"""

from __future__ import annotations

import time
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Callable, Optional

import numpy as np

from .characters import (
    AdditiveCharacter,
    CyclotomicSum,
    MultiplicativeCharacter,
    epsilon_angles,
    epsilon_factor,
    quadratic_character,
    random_character,
    units,
)
from .global_assembly import (
    GlobalInput,
    assemble_from_locals,
    fundamental_range,
    global_constant,
    valid_q1,
)
from .haar_integration import addchar_closed, additive_psi_shell_exact, zeta
from .induced_models import InducedRepSpec, RangeError, WhittakerEvaluator, whittaker_bruteforce, whittaker_closed
from .kirillov_supercuspidal import (
    KirillovVector,
    act_w,
    key_level,
    level_components,
    levelshift_levels,
    multiply_psi,
    random_epsilon_data,
    unit_keys,
)
from .local_triple import (
    LocalTripleSpec,
    SupercuspidalData,
    local_I,
    local_I_prime,
    matrix_coefficient_I,
    norms,
)
from .padic_core import PadicScalar


@dataclass
class SuiteResult:
    criterion: int
    name: str
    passed: bool
    points: int
    worst_abs_err: Optional[float]
    failures: list[str] = field(default_factory=list)
    n_failures: int = 0
    seconds: float = 0.0
    limit_seconds: float = 0.0
    note: str = ""

    def as_dict(self, timing: bool = True) -> dict:
        d = asdict(self)
        if not timing:
            d.pop("seconds")
        return d

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        err = "exact" if self.worst_abs_err is None else f"worst {self.worst_abs_err:.2e}"
        msg = f"{status} [{self.criterion}] {self.name}: {self.points} points, {err}, {self.seconds:.1f}s"
        if self.n_failures:
            msg += f", {self.n_failures} failing"
        if self.note:
            msg += f" ({self.note})"
        return msg


class _Tally:
    def __init__(self, tol: float):
        self.tol = tol
        self.points = 0
        self.worst = 0.0
        self.failures: list[str] = []
        self.n_failures = 0

    def check(self, err: float, label: str, tol: Optional[float] = None) -> None:
        self.points += 1
        self.worst = max(self.worst, float(err))
        if not err <= (self.tol if tol is None else tol):
            self.fail(f"{label}: err {err:.3e}")

    def exact(self, ok: bool, label: str) -> None:
        self.points += 1
        if not ok:
            self.fail(label)

    def fail(self, label: str) -> None:
        self.n_failures += 1
        if len(self.failures) < 20:
            self.failures.append(label)


def _rng(seed: int, criterion: int) -> np.random.Generator:
    return np.random.default_rng([seed, criterion])


def _phase(rng: np.random.Generator) -> complex:
    return complex(np.exp(2j * np.pi * rng.random()))


def _pi1_chars(p: int, m: int, rng: np.random.Generator):
    om1 = random_character(p, m, rng, z=_phase(rng))
    om2 = MultiplicativeCharacter.unramified(p, _phase(rng))
    return om1, om2


# 1 ------------------------------------------------------------------------------------


def suite_measure(seed: int = 0, tol: Optional[float] = None) -> _Tally:
    t = _Tally(0.0)
    for p in (2, 3, 5, 7):
        for m in range(-4, 5):
            got = additive_psi_shell_exact(p, m).rational_value()
            want = addchar_closed(p, m)
            if m >= 0:
                ref = Fraction(1, p**m) / (1 / (1 - Fraction(1, p)))
            else:
                ref = Fraction(-1) if m == -1 else Fraction(0)
            t.exact(got == want == ref, f"p={p} m={m}: {got} vs {want}")
    return t


# 2 ------------------------------------------------------------------------------------


def quadratic_gauss_check() -> bool:
    """epsilon(1/2, quadratic mod 3, psi) = i, decided exactly.

    epsilon = G / sqrt(3) with G the Gauss sum, so it equals i iff G^2 = -3
    and Im G > 0.
    """
    omega = quadratic_character(3)
    G = CyclotomicSum(epsilon_angles(omega, AdditiveCharacter(3)))
    return (G * G).equals(-3) and complex(G).imag > 0


def suite_epsilon(seed: int = 0, tol: Optional[float] = None) -> _Tally:
    rng = _rng(seed, 2)
    t = _Tally(1e-12 if tol is None else tol)
    for p in (2, 3, 5):
        for c in (1, 2, 3):
            if p == 2 and c == 1:
                continue  # no characters of conductor 1 when p = 2
            for i in range(50):
                om = random_character(p, c, rng, z=_phase(rng))
                e = epsilon_factor(1.0, om)
                t.check(abs(abs(e) - p ** (-c / 2)), f"p={p} c={c} #{i}")
    t.exact(quadratic_gauss_check(), "epsilon(1/2, quadratic mod 3) != i")
    return t


# 3 ------------------------------------------------------------------------------------


def _whittaker_family(t: _Tally, ev: WhittakerEvaluator, m: int, label: str, rng, per_shell: int) -> None:
    p = ev.p
    for j in range(m + 1):
        depth = max(ev.level - j, 1) + 1
        pool = [int(u) for u in units(p, depth)]
        for r in range(-m - ev.l - 2, m + 3):
            picks = rng.choice(pool, size=min(per_shell, len(pool)), replace=False)
            for u in picks:
                y = PadicScalar.from_rational(p, int(u)) * PadicScalar.uniformizer(p, r)
                try:
                    a = whittaker_closed(ev, y, j)
                except RangeError:
                    continue
                b = whittaker_bruteforce(ev, y, j)
                t.check(abs(a - b), f"{label} j={j} v(y)={r} u={u}")


def suite_whittaker(seed: int = 0, tol: Optional[float] = None, per_shell: int = 4) -> _Tally:
    rng = _rng(seed, 3)
    t = _Tally(1e-10 if tol is None else tol)
    for p in (2, 3, 5):
        for m in (1, 2, 3):
            if not (p == 2 and m == 1):
                sp = InducedRepSpec.principal(*_pi1_chars(p, m, rng))
                for conj in (False, True):
                    _whittaker_family(t, WhittakerEvaluator(sp, conj), m, f"pi1 p={p} m={m} conj={conj}", rng, per_shell)
            for l in range(m + 1):
                st = InducedRepSpec.steinberg(MultiplicativeCharacter.unramified(p, float(rng.choice([1, -1]))))
                z = p**0.25 if l == 0 else _phase(rng)
                sph = InducedRepSpec.spherical(MultiplicativeCharacter.unramified(p, z))
                for conj in (False, True):
                    for name, spec in (("steinberg", st), ("spherical", sph)):
                        ev = WhittakerEvaluator(spec, conj, l)
                        _whittaker_family(t, ev, m, f"{name} p={p} m={m} l={l} conj={conj}", rng, per_shell)
    return t


# 4, 5 ----------------------------------------------------------------------------------


def _prop_grid(t: _Tally, kind: str, rng, trials: int) -> None:
    for p in (2, 3, 5):
        for m in (1, 2, 3):
            if p == 2 and m == 1:
                continue
            lmax = m - 1 if kind == "steinberg" else m
            for trial in range(trials):
                om1, om2 = _pi1_chars(p, m, rng)
                if kind == "steinberg":
                    z3 = float(rng.choice([1, -1]))
                else:
                    z3 = p**0.25 if trial == 0 else _phase(rng)
                om3 = MultiplicativeCharacter.unramified(p, z3)
                for l1 in range(lmax + 1):
                    for l2 in range(lmax + 1):
                        spec = LocalTripleSpec(p, m, om1, om2, kind, omega3=om3, l1=l1, l2=l2)
                        _, _, err = local_I_prime(spec, "both")
                        t.check(err, f"{kind} p={p} m={m} trial={trial} l=({l1},{l2})")


def suite_prop_special(seed: int = 0, tol: Optional[float] = None, trials: int = 5) -> _Tally:
    t = _Tally(1e-9 if tol is None else tol)
    _prop_grid(t, "steinberg", _rng(seed, 4), trials)
    return t


def suite_prop_unramified(seed: int = 0, tol: Optional[float] = None, trials: int = 5) -> _Tally:
    t = _Tally(1e-9 if tol is None else tol)
    _prop_grid(t, "spherical", _rng(seed, 5), trials)
    return t


# 6, 7 ----------------------------------------------------------------------------------


def sc_grid(primes=(2, 3)):
    """(p, c, m, l1, l2) on the supercuspidal grid."""
    for p in primes:
        for c in (2, 3):
            for m in range(c, 4):
                for l1 in range(m - c + 1):
                    for l2 in range(m - c + 1):
                        yield p, c, m, l1, l2


def _sc_spec(p, c, m, l1, l2, om1, om2, eps, flag) -> LocalTripleSpec:
    return LocalTripleSpec(p, m, om1, om2, "supercuspidal", sc=SupercuspidalData(c, eps, flag), l1=l1, l2=l2)


def suite_prop_supercuspidal(seed: int = 0, tol: Optional[float] = None, trials: int = 3) -> _Tally:
    rng = _rng(seed, 6)
    t = _Tally(1e-9 if tol is None else tol)
    ind_tol = 1e-12 if tol is None else tol
    chars = {}
    for p, c, m, l1, l2 in sc_grid():
        if (p, m) not in chars:
            chars[p, m] = _pi1_chars(p, m, rng)
        om1, om2 = chars[p, m]
        datas = [
            random_epsilon_data(p, c, rng, level_bound=max(m, 2) + 1, C1=sign)
            for sign in (1, -1)
            for _ in range(trials)
        ]
        for flag in (True, False):
            vals = []
            for k, eps in enumerate(datas):
                spec = _sc_spec(p, c, m, l1, l2, om1, om2, eps, flag)
                brute, _, err = local_I_prime(spec, "both")
                vals.append(brute)
                t.check(err, f"p={p} c={c} m={m} l=({l1},{l2}) flag={flag} data#{k} C1={eps.C1}")
            spread = max(abs(v - vals[0]) for v in vals)
            t.check(spread, f"C_nu dependence p={p} c={c} m={m} l=({l1},{l2}) flag={flag}", ind_tol)
    return t


def suite_matrix_coefficient(seed: int = 0, tol: Optional[float] = None, trials: int = 3) -> _Tally:
    rng = _rng(seed, 7)
    t = _Tally(1e-9 if tol is None else tol)
    for p, c, m, l1, l2 in sc_grid():
        if l1 != l2:
            continue  # the matrix coefficient pairs a vector with its own dual translate
        om1, om2 = _pi1_chars(p, m, rng)
        target = p**-m * zeta(p, 2) / zeta(p, 1)
        for sign in (1, -1):
            for k in range(trials):
                eps = random_epsilon_data(p, c, rng, level_bound=max(m, 2) + 1, C1=sign)
                spec = _sc_spec(p, c, m, l1, l2, om1, om2, eps, False)
                mc = matrix_coefficient_I(spec)
                n1, n2, n3 = norms(spec)
                whit = local_I(spec) / (n1 * n2 * n3)
                label = f"p={p} c={c} m={m} l={l1} C1={sign} data#{k}"
                t.check(abs(mc - target), "closed " + label)
                t.check(abs(mc - whit), "whittaker path " + label)
    return t


# 8 ------------------------------------------------------------------------------------


def suite_kirillov(seed: int = 0, tol: Optional[float] = None, cases: int = 200) -> _Tally:
    rng = _rng(seed, 8)
    t = _Tally(0.0)
    for p in (2, 3):
        for c in (2, 3):
            eps = random_epsilon_data(p, c, rng, level_bound=3)
            for key in unit_keys(p, 3):
                for r in range(-4, 5):
                    v = KirillovVector.basis(p, r, key)
                    t.exact(act_w(act_w(v, eps), eps).equals(v), f"w^2 p={p} c={c} r={r} key={key}")
    done = 0
    while done < cases:
        p = int(rng.choice([2, 3, 5]))
        n = int(rng.integers(0, 4))
        if p == 2 and n == 1:
            continue
        keys = [k for k in unit_keys(p, n) if key_level(p, k) == n]
        key = keys[int(rng.integers(len(keys)))]
        r = int(rng.integers(-3, 4))
        k = int(rng.integers(-1, 5))
        vb = -r - k
        u = int(rng.choice(units(p, 4)))
        b = PadicScalar.from_rational(p, u) * PadicScalar.uniformizer(p, vb)
        got = level_components(multiply_psi(KirillovVector.basis(p, r, key), b), r)
        want = levelshift_levels(p, n, r, vb)
        t.exact(got == want, f"levelshift p={p} n={n} r={r} v(b)={vb}: {sorted(got)} vs {sorted(want)}")
        done += 1
    return t


# 9 ------------------------------------------------------------------------------------

GLOBAL_SPOTS = [
    ((-3, 3, False), Fraction(1, 72)),
    ((-4, 4, True), Fraction(1, 128)),
    ((-4, 4, False), Fraction(3, 256)),
    ((-20, 4, True), Fraction(1, 3840)),
]


def global_cases(lo: int = -200):
    for D in fundamental_range(lo, -1):
        for q1 in valid_q1(D):
            for flag in (True, False) if q1 % 4 == 0 else (False,):
                yield GlobalInput(D, q1, flag)


def suite_global(seed: int = 0, tol: Optional[float] = None) -> _Tally:
    t = _Tally(0.0)
    for args, want in GLOBAL_SPOTS:
        got = global_constant(GlobalInput(*args))
        t.exact(got == want, f"spot {args}: {got} vs {want}")
    for g in global_cases():
        a, b = assemble_from_locals(g), global_constant(g)
        t.exact(a == b, f"D={g.D} q1={g.q1} flag={g.unramified2}: locals {a} vs closed {b} (ratio {b / a})")
    return t


# 10 -----------------------------------------------------------------------------------


def suite_norms(seed: int = 0, tol: Optional[float] = None, trials: int = 5) -> _Tally:
    rng = _rng(seed, 10)
    t = _Tally(1e-10 if tol is None else tol)
    for p in (2, 3, 5):
        target = zeta(p, 2) / zeta(p, 1)
        for m in (1, 2, 3):
            if p == 2 and m == 1:
                continue
            for trial in range(trials):
                om1, om2 = _pi1_chars(p, m, rng)
                z3 = float(rng.choice([1, -1]))
                spec = LocalTripleSpec(p, m, om1, om2, "steinberg", omega3=MultiplicativeCharacter.unramified(p, z3))
                n1, n2, n3 = norms(spec)
                label = f"p={p} m={m} trial={trial}"
                t.check(abs(n1 - target), "pi1 " + label)
                t.check(abs(n2 - target), "pi2 " + label)
                t.check(abs(n3 - 1), f"steinberg z={z3:+.0f} " + label)
            for c in (2, 3):
                if c > m:
                    continue
                om1, om2 = _pi1_chars(p, m, rng)
                eps = random_epsilon_data(p, c, rng, level_bound=max(m, 2) + 1)
                spec = _sc_spec(p, c, m, 0, 0, om1, om2, eps, False)
                t.check(abs(norms(spec)[2] - 1), f"supercuspidal p={p} c={c} m={m}")
    return t


SUITES: dict[str, tuple[int, str, Callable, float]] = {
    "measure": (1, "additive character integrals", suite_measure, 1.0),
    "epsilon": (2, "epsilon modulus and quadratic Gauss sum", suite_epsilon, 5.0),
    "whittaker": (3, "Whittaker brute force vs closed forms", suite_whittaker, 120.0),
    "special": (4, "I' for special pi3", suite_prop_special, 120.0),
    "unramified": (5, "I' for unramified pi3", suite_prop_unramified, 180.0),
    "supercuspidal": (6, "I' for supercuspidal pi3", suite_prop_supercuspidal, 120.0),
    "matrix-coefficient": (7, "matrix-coefficient route", suite_matrix_coefficient, 60.0),
    "kirillov": (8, "Kirillov involution and level shifts", suite_kirillov, 10.0),
    "global": (9, "global constant vs product of locals", suite_global, 5.0),
    "norms": (10, "newform norms", suite_norms, 30.0),
}

NOTES = {
    "global": "when 4 | q1 the closed coefficient is 3/2 times the product of local constants",
}


def run_suite(name: str, seed: int = 0, tol: Optional[float] = None) -> SuiteResult:
    crit, title, fn, limit = SUITES[name]
    t0 = time.perf_counter()
    tally = fn(seed=seed, tol=tol)
    secs = time.perf_counter() - t0
    ok = tally.n_failures == 0 and secs < limit
    exact = tally.tol == 0.0
    note = NOTES.get(name, "") if tally.n_failures else ""
    if secs >= limit:
        note = (note + "; " if note else "") + f"over the {limit:.0f}s budget"
    return SuiteResult(
        criterion=crit,
        name=name,
        passed=ok,
        points=tally.points,
        worst_abs_err=None if exact else tally.worst,
        failures=tally.failures,
        n_failures=tally.n_failures,
        seconds=secs,
        limit_seconds=limit,
        note=note,
    )
