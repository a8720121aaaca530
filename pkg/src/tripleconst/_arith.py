"""Small integer helpers shared by the character and global modules (thin sympy wrappers)."""

from __future__ import annotations

from functools import lru_cache

from sympy import kronecker_symbol
from sympy.ntheory import factorint, isprime, multiplicity, primitive_root


@lru_cache(maxsize=4096)
def _factor(n: int) -> tuple[tuple[int, int], ...]:
    return tuple(sorted(factorint(n).items()))


def factorize(n: int) -> dict[int, int]:
    """Prime factorization of |n| ({} for 0 and 1)."""
    n = abs(n)
    if n < 2:
        return {}
    return dict(_factor(n))


def is_prime(n: int) -> bool:
    return bool(isprime(n))


def ord_p(n: int, p: int) -> int:
    if n == 0:
        raise ValueError("ord of zero")
    return int(multiplicity(p, n))


def squarefree(n: int) -> bool:
    return all(e == 1 for e in factorize(n).values())


def is_fundamental(D: int) -> bool:
    """D is 1 mod 4 and squarefree (D != 1), or D = 4m with m = 2, 3 mod 4 squarefree."""
    if D in (0, 1):
        return False
    if D % 4 == 1:
        return squarefree(D)
    if D % 4 == 0:
        m = D // 4
        return m % 4 in (2, 3) and squarefree(m)
    return False


def kronecker(a: int, n: int) -> int:
    """Kronecker symbol (a/n) with the usual conventions at 2 and -1."""
    return int(kronecker_symbol(a, n))


@lru_cache(maxsize=None)
def primitive_root_mod_p2(p: int) -> int:
    """Smallest integer generating (Z/p^k)^x for every k (p odd)."""
    if p == 2:
        raise ValueError("no cyclic generator for p = 2")
    return int(primitive_root(p * p))
