#!/usr/bin/env python3
"""Three convergence modes on one oscillating sequence.

The indicator of the factorial run set has running means swinging between 0
and 1 for ever.  Plain ideal convergence, statistical convergence, and
submeasure convergence all see this differently depending on the ideal and
the mass sequence, and the constant upper-density sequence shows that the
pair notion genuinely depends on the chosen masses, not just on the ideal
they induce.

Run:  python demos/04_convergence_modes.py
"""

from fractions import Fraction as F

from idealconv import (
    ConstantUpperDensity,
    FIN,
    LacunaryBlocks,
    UniformMeasures,
    ZETA,
    IndicatorSequence,
    factorial_runs_set,
    ideal_limit,
    imu_limit,
    istat_limit,
    make_block_scheme,
    named_family,
)

A = factorial_runs_set()
x = IndicatorSequence(A)
squares = IndicatorSequence(named_family("squares"))

print("indicator of the factorial runs:")
print("  ideal_limit under fin, limit 0:  ",
      ideal_limit(x, FIN, F(0)).overall)
print("  istat under fin, limit 0:        ",
      istat_limit(x, FIN, F(0)).overall)
print("  istat under fin, limit 1:        ",
      istat_limit(x, FIN, F(1)).overall)
print("  istat under zeta, limit 1:       ",
      istat_limit(x, ZETA, F(1)).overall)

print("\nindicator of the squares (density zero):")
print("  ideal_limit under fin, limit 0:  ",
      ideal_limit(squares, FIN, F(0)).overall)
print("  istat under fin, limit 0:        ",
      istat_limit(squares, FIN, F(0)).overall)

# Same ideal, different masses: the uniform sequence and the constant
# upper-density sequence induce the same vanishing ideal, but pair
# convergence diverges under the constant one at the very first grid cell,
# whose level set is all of N.
nu = ConstantUpperDensity()
rep = imu_limit(x, ZETA, nu, F(1), eps_grid=[F(1, 2)], delta_grid=[F(1, 2)])
print("\npair convergence with constant upper-density masses, limit 1:",
      rep.overall)
print("  level set at (1/2, 1/2):", rep.cells[0]["level"]["pieces"],
      "(the whole of N)")

# Lacunary masses live on factorial windows; the run indicator alternates
# between full and empty windows, so the level sets are the even indices.
lac = LacunaryBlocks(make_block_scheme("factorial"))
rep = imu_limit(x, FIN, lac, F(1), eps_grid=[F(1, 2)], delta_grid=[F(1, 2)])
print("\nlacunary masses, limit 1:", rep.overall)
print("  level set pieces:", rep.cells[0]["level"]["pieces"][:3])
