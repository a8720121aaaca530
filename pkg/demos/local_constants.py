"""Local constants I' computed two ways.

The brute-force route integrates Whittaker functions shell by shell; the
closed route is a one-line formula in q and m.  They should agree.
"""
import numpy as np

from tripleconst.characters import MultiplicativeCharacter, random_character
from tripleconst.kirillov_supercuspidal import random_epsilon_data
from tripleconst.local_triple import LocalTripleSpec, SupercuspidalData, local_I_prime

rng = np.random.default_rng(2024)


def pi1_chars(p, m):
    om1 = random_character(p, m, rng, z=np.exp(1j * rng.uniform(0, 2 * np.pi)))
    om2 = MultiplicativeCharacter.unramified(p, np.exp(1j * rng.uniform(0, 2 * np.pi)))
    return om1, om2


def show(label, spec):
    brute, closed, err = local_I_prime(spec, "both")
    print(f"{label:<40} brute {brute.real:.12f}  closed {closed.real:.12f}  err {err:.1e}")


# special pi3: q^-m (1 + 1/q)
for p, m in [(2, 2), (3, 1), (5, 2)]:
    om1, om2 = pi1_chars(p, m)
    spec = LocalTripleSpec(p, m, om1, om2, "steinberg", omega3=MultiplicativeCharacter.unramified(p, 1.0))
    show(f"steinberg p={p} m={m}", spec)

# unramified pi3, including a non-unitary omega3
for z3 in (1.0, np.exp(0.9j), 3**0.25):
    om1, om2 = pi1_chars(3, 2)
    spec = LocalTripleSpec(3, 2, om1, om2, "spherical", omega3=MultiplicativeCharacter.unramified(3, z3), l1=1, l2=2)
    show(f"spherical p=3 m=2 z3={complex(z3):.3f}", spec)

# supercuspidal pi3 at p = 2; the flag switches the adjoint L-factor
for c, m in [(2, 2), (2, 3), (3, 3)]:
    for flag in (False, True):
        om1, om2 = pi1_chars(2, m)
        eps = random_epsilon_data(2, c, rng, level_bound=4)
        spec = LocalTripleSpec(2, m, om1, om2, "supercuspidal", sc=SupercuspidalData(c, eps, flag))
        show(f"supercuspidal c={c} m={m} unramified={flag}", spec)
