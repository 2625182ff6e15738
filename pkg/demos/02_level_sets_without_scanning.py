#!/usr/bin/env python3
"""Threshold crossings of running means, solved in closed form.

The engine never scans indices to find where |A ∩ [1,n]| / n reaches a
threshold: between membership events the mean is c/n or (c + n - n0)/n, so
every crossing is an integer-division problem.  That is what makes horizons
around 10^8 cheap.

Run:  python demos/02_level_sets_without_scanning.py
"""

import time
from fractions import Fraction

from idealconv import Residue, factorial_runs_set, uniform_level_set

A = factorial_runs_set()

t0 = time.time()
level = uniform_level_set(A, Fraction(1, 2), horizon=10**8)
dt = time.time() - t0

print("{n : lambda_n(A) >= 1/2} up to 10^8, solved in %.4fs" % dt)
for p in level.pieces[:6]:
    print("  piece:", p.to_json())
print("tail:", level.tail)
print("certified facts:", level.facts)

# The crossing points are exact: the mean first reaches 1/2 inside the run
# [24, 120] at n = 36 (count 19 of 36... check one by hand):
n = 36
print("\nlambda_36(A) =", Fraction(A.count(36), 36), ">= 1/2:",
      Fraction(A.count(36), 36) >= Fraction(1, 2))
print("lambda_35(A) =", Fraction(A.count(35), 35))

# Periodic sets get exact residue tails instead: the level set of the evens
# at exactly 1/2 is the even numbers themselves, decided for every n.
level = uniform_level_set(Residue(2, 0), Fraction(1, 2), horizon=10**6)
print("\nevens at threshold 1/2:", [p.to_json() for p in level.pieces])
print("member(10^12) =", level.member(10**12),
      " member(10^12+1) =", level.member(10**12 + 1))
