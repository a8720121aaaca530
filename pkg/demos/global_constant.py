"""The global constant for fundamental discriminants, and where it differs
from the product of local constants.
"""
from collections import Counter

from tripleconst.global_assembly import GlobalInput, assemble_from_locals, fundamental_range, global_constant, valid_q1

for D, q1, flag in [(-3, 1, False), (-3, 3, False), (-4, 4, True), (-4, 4, False), (-20, 4, True), (-84, 12, False)]:
    g = GlobalInput(D, q1, flag)
    print(f"D={D:<4} q1={q1:<3} flag={flag!s:<5} closed {global_constant(g)!s:<10} locals {assemble_from_locals(g)}")

ratios = Counter()
for D in fundamental_range(-200, -1):
    for q1 in valid_q1(D):
        for flag in (False, True):
            g = GlobalInput(D, q1, flag)
            ratios[(q1 % 4 == 0, global_constant(g) / assemble_from_locals(g))] += 1
print("(4 | q1, closed/locals) -> count:", dict(ratios))
