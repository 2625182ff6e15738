#!/usr/bin/env python3
"""Symbolic sets and exact densities, end to end.

Walks through the basic vocabulary: build structured subsets of N, count
prefixes exactly at any magnitude, and ask for upper densities with
certificates instead of floating-point guesses.

Run:  python demos/01_sets_and_densities.py
"""

from fractions import Fraction

from idealconv import (
    Complement,
    Intersection,
    Residue,
    TwoAdicFiber,
    factorial_runs_set,
    named_family,
    uniform_eval,
    upper_density,
)

# Residue classes have closed-form counting: |evens ∩ [1, n]| = n // 2.
evens = Residue(2, 0)
print("evens.count(10) =", evens.count(10))
print("lambda_10(evens) =", uniform_eval(evens, 10))

# The factorial run set A = [2!,3!] u [4!,5!] u ... alternates between
# covering almost everything and almost nothing.  All endpoints are exact
# big integers; counting at 10^40 is as cheap as at 10^2.
A = factorial_runs_set()
print("\nA.count(30) =", A.count(30), "(5 from [2,6], 7 from [24,30])")
print("A.count(10^40) has", len(str(A.count(10**40))), "digits")

# Upper density comes with a certificate.  For eventually periodic sets the
# value is a closed form; for tagged interval families it is a limsup along
# witnessed points, each re-verified exactly.
for name, s in [
    ("evens", evens),
    ("factorial runs", A),
    ("complement of the runs", Complement(A)),
    ("squares", named_family("squares")),
    ("2-adic fiber k=2", TwoAdicFiber(2)),
    ("evens inside the runs", Intersection([evens, A])),
]:
    r = upper_density(s)
    mark = r.certificate if r.certified else f"estimate at horizon {r.horizon}"
    print(f"d*({name}) = {r.value}  [{mark}]")

# Both the runs and their complement have upper density one: the running
# mean oscillates for ever, which is exactly why the indicator sequence is
# not statistically convergent.
w = upper_density(A).witness
print("\nwitness values along run right endpoints:")
for n, v in w[:5]:
    print(f"  lambda_{n} = {v} (~{float(v):.4f})")
