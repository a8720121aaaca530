"""Working in the Kirillov model of a supercuspidal representation.

Vectors are finite sums of nu(p^-r x) 1_{p^r O^x}.  The Borel acts by
translation and additive twists, w acts through the epsilon data C_nu.
"""
from fractions import Fraction

import numpy as np

from tripleconst.kirillov_supercuspidal import (
    KirillovVector,
    act_borel,
    act_w,
    level_components,
    random_epsilon_data,
    sc_integral,
    whittaker_sc,
)
from tripleconst.padic_core import PadicScalar

p, c = 3, 2
eps = random_epsilon_data(p, c, np.random.default_rng(1), level_bound=4, C1=-1)
new = KirillovVector.newform(p)

print("newform support:", new.support)
wn = act_w(new, eps)
print("w . newform support:", wn.support, "value", wn(PadicScalar.uniformizer(p, -c)))
print("w^2 = 1:", act_w(wn, eps).equals(new))

# twisting by psi(b x) with v(b) = -2 raises the level on the unit shell
tw = act_borel(new, 1, Fraction(1, p**2), 1)
print("levels after psi(x/9) twist:", level_components(tw, 0))

# the newform translated by (1 0; p^j 1)
for j in range(c + 1):
    v = whittaker_sc(0, j, eps)
    print(f"j={j}: support {v.support}, integral against psi(-y) {sc_integral(v, -1):.6f}")
