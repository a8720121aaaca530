"""Normalized Haar measures and exact finite-sum integrators.

Normalizations: vol(Z_p; dx) = 1, vol(Z_p^x; d^x x) = 1 with
d^x x = zeta(1) |x|^-1 dx, and vol(K; dk) = 1.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional

import numpy as np

from .characters import CyclotomicSum, units
from .padic_core import Mat2, PadicScalar, h_matrix, in_K1


def zeta(q: float, s: float = 1.0) -> float:
    """zeta_F(s) = (1 - q^-s)^-1."""
    return 1.0 / (1.0 - float(q) ** (-s))


def zeta_exact(q: int, s: int) -> Fraction:
    return 1 / (1 - Fraction(1, q**s))


@dataclass
class ShellFunction:
    """A function on p^r Z_p^x that is constant on cosets of 1 + p^N Z_p.

    Either ``values`` (indexed by residues mod p^N, ignored at non-units) or
    ``func`` (called with the PadicScalar p^r u) must be given.
    """

    p: int
    r: int
    N: int
    values: Optional[np.ndarray] = None
    func: Optional[Callable[[PadicScalar], complex]] = None

    def table(self) -> np.ndarray:
        """Values at the unit residues in increasing order."""
        us = units(self.p, self.N)
        if self.values is not None:
            return np.asarray(self.values)[us]
        if self.func is None:
            raise ValueError("ShellFunction needs values or func")
        return np.array(
            [self.func(PadicScalar.from_unit(self.p, self.r, int(u), self.N)) for u in us],
            dtype=complex,
        )

    def refined(self) -> "ShellFunction":
        if self.func is None:
            raise ValueError("only callback shells can be refined")
        return ShellFunction(self.p, self.r, self.N + 1, func=self.func)


class DepthError(ValueError):
    """The shell function is not constant at the declared depth."""


def _check_refinement(f: ShellFunction, total, integrator, tol: float):
    if f.func is None:
        return
    fine = integrator(f.refined(), check=False)
    if abs(complex(fine) - complex(total)) > tol:
        raise DepthError(f"shell r={f.r} not locally constant at depth {f.N}")


def integrate_additive(f: ShellFunction, check: bool = False, tol: float = 1e-12) -> complex:
    """Integral of f over p^r Z_p^x against dx; each class has volume q^-(r+N)."""
    vals = f.table()
    total = complex(vals.sum()) * float(f.p) ** (-(f.r + f.N))
    if check:
        _check_refinement(f, total, integrate_additive, tol)
    return total


def integrate_mult(f: ShellFunction, check: bool = False, tol: float = 1e-12) -> complex:
    """Integral of f over p^r Z_p^x against d^x x (the shell has volume 1)."""
    vals = f.table()
    total = complex(vals.mean())
    if check:
        _check_refinement(f, total, integrate_mult, tol)
    return total


def additive_psi_shell_exact(p: int, r: int, sign: int = 1) -> CyclotomicSum:
    """Exact integral of psi(x) over p^r Z_p^x by enumerating classes mod p^max(0,-r)+1."""
    out = CyclotomicSum()
    depth = max(-r, 0) + 1
    vol = Fraction(1, p ** (r + depth)) if r + depth >= 0 else Fraction(p ** (-(r + depth)))
    for u in range(1, p**depth):
        if u % p == 0:
            continue
        ang = Fraction(sign * u, p ** (-r)) if r < 0 else Fraction(0)
        out.add(ang, vol)
    return out


def addchar_closed(p: int, m: int) -> Fraction:
    """Closed form of the integral of psi over p^m Z_p^x."""
    if m >= 0:
        return Fraction(1, p**m) * (1 - Fraction(1, p))
    if m == -1:
        return Fraction(-1)
    return Fraction(0)


# integration over K ------------------------------------------------------------


def hu_weights(q: int, m: int) -> list[Fraction]:
    """Weights A_0..A_m with sum_j A_j f(g (1 0; p^j 1)) = int_K f(gk) dk."""
    if m == 0:
        return [Fraction(1)]
    z1, z2 = zeta_exact(q, 1), zeta_exact(q, 2)
    base = z2 / z1
    out = [base]
    for j in range(1, m):
        out.append(base * Fraction(1, q**j) / z1)
    out.append(base * Fraction(1, q**m))
    return out


def random_K1(p: int, m: int, rng: np.random.Generator, N: int = 12) -> Mat2:
    """A random element of K1(p^m) with entries truncated at relative precision N."""
    mod = p**N
    while True:
        a = int(rng.integers(mod))
        b = int(rng.integers(mod))
        c = int(rng.integers(mod)) * p**m % mod if m > 0 else int(rng.integers(mod))
        d = (1 + int(rng.integers(mod)) * p**m) % mod if m > 0 else int(rng.integers(mod))
        det = (a * d - b * c) % mod
        if det % p == 0:
            continue
        k = Mat2.from_rationals(p, a, b, c, d)
        if in_K1(k, m):
            return k


def integrate_K(
    f: Callable[[Mat2], complex],
    m: int,
    p: int,
    g: Optional[Mat2] = None,
    check: bool = True,
    rng: Optional[np.random.Generator] = None,
    samples: int = 8,
    tol: float = 1e-12,
) -> complex:
    """int_K f(g k) dk for f right K1(p^m)-invariant, via the coset weights."""
    from .padic_core import identity

    if g is None:
        g = identity(p)
    ws = hu_weights(p, m)
    total = 0j
    for j, wj in enumerate(ws):
        total += float(wj) * complex(f(g @ h_matrix(p, j)))
    if check:
        rng = rng if rng is not None else np.random.default_rng(0)
        for _ in range(samples):
            j = int(rng.integers(m + 1))
            base = g @ h_matrix(p, j)
            k = random_K1(p, m, rng)
            if abs(complex(f(base @ k)) - complex(f(base))) > tol:
                raise ValueError("integrand is not right K1(p^m)-invariant")
    return total
