"""Exact machinery for ideal and statistical convergence over N.

Symbolic subsets of the positive integers with exact prefix counting, density
and submeasure functionals, ideal-membership oracles with certificates,
convergence verdict engines, and a quantitative Tauberian verification suite.
"""

from .sets import (
    BlockScheme,
    Complement,
    EMPTY,
    FULL,
    FiniteSet,
    Intersection,
    IntervalFamily,
    Residue,
    SymbolicSet,
    TwoAdicFiber,
    Union,
    ValidationError,
    block_union,
    complement,
    explicit_family,
    factorial_runs_set,
    intersection,
    make_block_scheme,
    named_family,
    union,
)
from .analysis import SetFacts, set_facts
from .functionals import (
    ConstantUpperDensity,
    DensityResult,
    LacunaryBlocks,
    MatrixRows,
    PreconditionError,
    SubmeasureSeq,
    UniformMeasures,
    alpha_flat_check,
    exh_tail,
    flat_family_matrix,
    harmonic_partial,
    smoothness_check,
    submeasure_eval,
    summable_verdict,
    uniform_eval,
    upper_density,
)
from .levelsets import LevelSet, uniform_level_set
from .ideals import (
    EMPTY_TIMES_FIN,
    FIN,
    SUMMABLE,
    ZETA,
    DerivedIdeal,
    GeneratedIdeal,
    IdealOracle,
    VanishingIdeal,
    alpha_thick_check,
    inclusion_probe,
    j_of,
    membership,
    oracle_by_name,
    proper_check,
)
from .convergence import (
    BlockConstantSeq,
    ConvergenceReport,
    DecayBlockValues,
    FormulaSeq,
    IndicatorSequence,
    PeriodicBlockValues,
    RampSequence,
    SymbolicSequence,
    ideal_limit,
    imu_limit,
    implication_harness,
    istat_limit,
    sequence_from_json,
    stat_limit,
)
from .tauberian import (
    blockmean_check,
    character_harness,
    claim1_bound_check,
    claim2_window_check,
    figure_series,
    fridy_check,
    sharpness_search,
    single_peak_sequence,
)
from .verdicts import Verdict

__version__ = "0.1.0"
