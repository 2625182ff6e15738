#!/usr/bin/env python3
"""Ideal membership with certificates, and the derived ideal of a pair.

Four concrete ideals ship with the engine: finite sets, density-zero sets,
convergent harmonic subseries, and sets with finite 2-adic fibers.  Verdicts
are three-valued; Certified answers carry a certificate that survives any
horizon increase, and the honest answer for an uncertified structure is
Undecided, never a guess.

Run:  python demos/03_ideals_and_verdicts.py
"""

from idealconv import (
    EMPTY_TIMES_FIN,
    FIN,
    SUMMABLE,
    UniformMeasures,
    ZETA,
    Residue,
    Union,
    factorial_runs_set,
    j_of,
    membership,
    named_family,
    proper_check,
)

A = factorial_runs_set()
corpus = [
    ("squares", named_family("squares")),
    ("powers of two", named_family("powers2")),
    ("evens", Residue(2, 0)),
    ("factorial runs", A),
    ("runs joined with evens", Union([A, Residue(2, 0)])),
]

for oracle in (FIN, ZETA, SUMMABLE, EMPTY_TIMES_FIN):
    print(f"--- {oracle.name} ---")
    for name, s in corpus:
        v = membership(oracle, s)
        print(f"  {name:22s} {v.status:10s} {v.certificate or ''}")

# The derived ideal of (base ideal, submeasure sequence): a set belongs when
# its mass profile vanishes along the base ideal.  With the finite ideal and
# the uniform sequence this recovers exactly the density-zero ideal.
U = UniformMeasures()
j = j_of(FIN, U)
print("\nderived ideal of (fin, uniform):")
for name, s in corpus:
    print(f"  {name:22s} {j.decide(s).status:10s} vs zeta "
          f"{membership(ZETA, s).status}")

# Properness: the whole of N must not belong.  The uniform pair is proper;
# rows whose totals vanish make everything converge and the ideal collapses.
from idealconv import MatrixRows
from idealconv.functionals import UniformScaledKernel

print("\nproper_check(fin, uniform):", proper_check(j_of(FIN, U))["result"])
vanishing = MatrixRows(UniformScaledKernel(2))  # row sums 1/n
print("proper_check(fin, vanishing rows):",
      proper_check(j_of(FIN, vanishing))["result"])
