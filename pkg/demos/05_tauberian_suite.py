#!/usr/bin/env python3
"""The quantitative suite: window sums, slope conditions, sharpness.

A sequence whose steps are bounded by d/n cannot drift by more than about
d log(1 + c) across a window [n, (1+c) n]; summed increment magnitudes stay
below an explicit envelope, windows stabilize, and a statistically null
sequence with such steps must converge outright.  The suite verifies all of
this with exact sums, and constructs the counterexample showing the slope
condition is tight once the allowance d_n is let grow.

Run:  python demos/05_tauberian_suite.py
"""

from fractions import Fraction as F

from idealconv import (
    FormulaSeq,
    Residue,
    UniformMeasures,
    claim1_bound_check,
    claim2_window_check,
    factorial_runs_set,
    fridy_check,
    sharpness_search,
)

U = UniformMeasures()
A = factorial_runs_set()

# Exact window sums: ten increment magnitudes past n = 10 for the evens sum
# to 1572848/4849845 ~ 0.3243, well under the envelope constant 1.
rep = claim1_bound_check(U, Residue(2, 0), F(1), F(1), F(1), [10])
n, w, lhs, rhs, ok = rep.rows[0]
print(f"window sum past n={n}: {lhs} (~{float(lhs):.4f}) <= {rhs}: {ok}")

# The same bound holds with fat windows at one million, where the sum
# telescopes along the run structure instead of iterating 4 million terms.
rep = claim1_bound_check(U, A, F(1), F(1), F(4), [10**6])
print("window of width 4*10^6 at n=10^6:", rep.rows[0][2], "<=", rep.rows[0][3])

# Window stability: pick (c, n0) by the recipe and verify |mean moves| <= 1/2
rep = claim2_window_check(U, Residue(2, 0), F(1, 2), F(1), F(1), [8, 64, 4096])
print(f"\nstability recipe: c = {rep.c}, n0 = {rep.n0}, verified: {rep.passed}")

# The slope condition in action: 1/ceil(sqrt(n)) moves by at most 1/n, is
# statistically null, and indeed stays consistent with plain convergence.
rep = fridy_check(FormulaSeq("inv-sqrt-ceil"), F(1), horizon=10**6)
print("\nslope condition on 1/ceil(sqrt(n)):",
      "slope ok" if rep.slope_holds else "slope violated",
      "/ statistical verdict:", rep.stat_verdict,
      "/ contradiction:", rep.contradiction)

# Sharpness: with allowance d_n ~ log2(n) the engine builds, and itself
# re-validates, a sequence that is statistically null yet peaks at 1/2 for
# ever.  A constant allowance refuses: the theorem forbids it.
rep = sharpness_search(("log2",), horizon=10**6)
print("\ngrowing allowance: feasible =", rep.feasible,
      "| peaks at", rep.peaks[:4], "...")
print("support densities at bump ends:",
      [f"{float(v):.4f}" for _, v in rep.envelope[:5]])
rep = sharpness_search(("constant", 8), horizon=10**7)
print("constant allowance: feasible =", rep.feasible)
print("  reason:", rep.reason)
