"""Window-sum bounds, slope conditions, sharpness, block means, series."""

from fractions import Fraction as F

import pytest

from idealconv.convergence import (
    BlockConstantSeq,
    FormulaSeq,
    IndicatorSequence,
    RampSequence,
)
from idealconv.functionals import PreconditionError, UniformMeasures
from idealconv.sets import (
    Residue,
    FiniteSet,
    factorial_runs_set,
    make_block_scheme,
    named_family,
)
from idealconv.tauberian import (
    TripleBlockValues,
    blockmean_check,
    character_harness,
    claim1_bound_check,
    claim2_window_check,
    figure_series,
    fridy_check,
    kappa_constant,
    sharpness_search,
    single_peak_sequence,
    uniform_increment_sum,
    window_width,
)

U = UniformMeasures()
A = factorial_runs_set()


def brute_increments(s, n, width):
    total, prev = F(0), F(s.count(n + 1), n + 1)
    for i in range(1, width + 1):
        cur = F(s.count(n + i + 1), n + i + 1)
        total += abs(cur - prev)
        prev = cur
    return total


class TestIncrementSums:
    def test_telescoped_matches_brute(self, set_zoo):
        for name, s in set_zoo:
            for n, w in ((10, 10), (5, 25), (100, 50), (37, 113)):
                assert uniform_increment_sum(s, n, w) == brute_increments(s, n, w), \
                    (name, n, w)

    def test_empty_window(self):
        assert uniform_increment_sum(Residue(2, 0), 10, 0) == 0


class TestWindowBound:
    def test_envelope_constants(self):
        assert kappa_constant(F(1), F(1)) == 1
        assert kappa_constant(F(1, 2), F(1)) == 2
        assert kappa_constant(F(1, 2), F(3)) == 6

    def test_width_floor(self):
        assert window_width(10, F(1), F(1)) == 10
        assert window_width(100, F(2), F(1, 2)) == 20
        assert window_width(3, F(1, 1000), F(1)) == 0

    def test_evens_window_at_ten(self):
        rep = claim1_bound_check(U, Residue(2, 0), F(1), F(1), F(1), [10])
        assert rep.passed
        n, w, lhs, rhs, ok = rep.rows[0]
        # frozen exact value of the ten-term increment sum past n = 10
        assert (w, lhs, rhs) == (10, F(1572848, 4849845), F(1))

    def test_half_exponent(self):
        rep = claim1_bound_check(U, A, F(1, 2), F(1), F(2), [100])
        assert rep.passed and rep.kappa == 2 and rep.rows[0][3] == 4

    def test_zero_width_passes(self):
        rep = claim1_bound_check(U, Residue(2, 0), F(1), F(1), F(1, 1000), [3])
        assert rep.passed and rep.rows[0][1] == 0

    def test_flatness_precondition_aborts(self):
        from idealconv.functionals import ExplicitRowsKernel, MatrixRows

        jumpy = MatrixRows(ExplicitRowsKernel([[(1, F(n % 2))]
                                               for n in range(1, 9)]))
        rep = claim1_bound_check(jumpy, FiniteSet([1]), F(1), F(1), F(1), [2])
        assert rep.aborted and not rep.passed

    def test_large_sparse_windows(self):
        samples = [2**k for k in range(4, 20)] + [10**6]
        for s in (A, named_family("powers2"), named_family("squares")):
            rep = claim1_bound_check(U, s, F(1), F(1), F(4), samples)
            assert rep.passed


class TestSlidingWindows:
    def test_recipe_constants(self):
        rep = claim2_window_check(U, Residue(2, 0), F(1, 2), F(1), F(1),
                                  [8, 16, 100, 1000])
        assert (rep.c, rep.n0) == (F(1, 4), 8)
        assert rep.passed

    def test_windows_near_run_boundaries(self):
        rep = claim2_window_check(U, A, F(1, 4), F(1), F(1),
                                  [24, 120, 720, 5040])
        assert rep.passed

    def test_degenerate_threshold(self):
        rep = claim2_window_check(U, A, F(2), F(1), F(1), [10])
        assert rep.passed  # probability values always differ by at most 1

    def test_windows_verified_exactly(self):
        rep = claim2_window_check(U, Residue(3, 1), F(1, 3), F(1), F(1),
                                  [32, 64, 4096])
        for n, m, diff, ok in rep.rows:
            assert ok and diff <= F(1, 3)


class TestSlopeCondition:
    def test_decaying_formula_consistent(self):
        rep = fridy_check(FormulaSeq("inv-sqrt-ceil"), F(1), 10**6)
        assert rep.slope_holds and rep.applicable
        assert rep.stat_verdict == "converges"
        assert not rep.contradiction
        assert all(clear for _, _, clear in rep.tail_checks)

    def test_indicator_jumps_not_applicable(self):
        rep = fridy_check(IndicatorSequence(A), F(1), 10**5)
        assert rep.slope_holds is False and not rep.applicable

    def test_constant_zero_trivially_consistent(self):
        rep = fridy_check(FormulaSeq("constant", F(0)), F(1), 10**5)
        assert rep.applicable and not rep.contradiction

    def test_ramps_checked_per_piece(self):
        x = RampSequence([(1, F(0)), (64, F(0)), (80, F(1, 8)), (96, F(0))])
        rep = fridy_check(x, F(10), 10**5)
        assert rep.applicable and not rep.contradiction


class TestSharpness:
    def test_growing_allowance_builds_counterexample(self):
        rep = sharpness_search(("log2",), 10**6)
        assert rep.feasible
        assert rep.slope_ok and rep.stat_verdict == "converges"
        assert rep.limsup_witness >= F(1, 2)
        assert len(rep.peaks) >= 2

    def test_constant_allowance_infeasible(self):
        rep = sharpness_search(("constant", 8), 10**7)
        assert not rep.feasible
        assert "allowance" in rep.reason

    def test_tiny_horizon_fails_explicitly(self):
        rep = sharpness_search(("log2",), 30)
        assert not rep.feasible and "horizon" in rep.reason

    def test_support_density_envelope_decays(self):
        rep = sharpness_search(("log2",), 10**7)
        dens = [v for _, v in rep.envelope]
        assert dens[-1] < dens[0]


class TestAgreementHarness:
    def test_uniform_specialization(self):
        corpus = [("factorial", IndicatorSequence(A)),
                  ("squares", IndicatorSequence(named_family("squares"))),
                  ("evens", IndicatorSequence(Residue(2, 0))),
                  ("zero", FormulaSeq("constant", F(0)))]
        rep = character_harness(U, U, F(1), corpus, [F(0), F(1)])
        assert rep.ok and rep.compared >= 6

    def test_alpha_above_one_rejected(self):
        with pytest.raises(PreconditionError):
            character_harness(U, U, F(3, 2), [], [F(0)])


class TestBlockMeans:
    def test_factorial_single_peak(self):
        sch = make_block_scheme("factorial")
        rep = blockmean_check(sch, single_peak_sequence(sch, 2), 10**8)
        assert rep.passed and len(rep.rows) >= 10

    def test_tower_bound_values(self):
        sch = make_block_scheme("tower")
        x = BlockConstantSeq(sch, TripleBlockValues(lambda u: 1, desc="ones"))
        rep = blockmean_check(sch, x, 10**8)
        assert rep.passed
        bounds = {n: b for n, _, b, _ in rep.rows}
        assert bounds[5] == F(2 * 16, 65536) == F(1, 2048)

    def test_constant_zero_has_zero_deviation(self):
        sch = make_block_scheme("factorial")
        x = BlockConstantSeq(sch, TripleBlockValues(lambda u: 0, desc="zeros"))
        rep = blockmean_check(sch, x, 10**8)
        assert rep.passed and all(dv == 0 for _, dv, _, _ in rep.rows)

    def test_shape_precondition(self):
        from idealconv.convergence import PeriodicBlockValues

        sch = make_block_scheme("factorial")
        bad = BlockConstantSeq(sch, PeriodicBlockValues([F(1)]))
        with pytest.raises(PreconditionError):
            blockmean_check(sch, bad, 10**6)


class TestSeries:
    def test_crossing_matches_brute_scan(self):
        sch = make_block_scheme("factorial")
        rep = figure_series(sch, 2, F(1, 10), resolution=16)
        lo, hi = sch.a(3), sch.a(6)
        support_lo, support_hi = sch.a(3) + 1, sch.a(5)
        members, c = [], 0
        for n in range(1, hi + 1):
            if support_lo <= n <= support_hi:
                c += 1
            if lo + 1 <= n <= hi and F(c, n) >= F(1, 10):
                members.append(n)
        assert rep.crossing == (members[0], members[-1]) == (7, 720)

    def test_threshold_above_one_empty(self):
        sch = make_block_scheme("factorial")
        rep = figure_series(sch, 2, F(3, 2), resolution=8)
        assert rep.crossing is None

    def test_mean_peaks_near_the_block_edge(self):
        # the running mean at the end of the covered pair approaches 1
        sch = make_block_scheme("factorial")
        rep = figure_series(sch, 2, F(1, 10), resolution=8)
        at = dict(rep.samples)
        assert at[sch.a(5)] >= 1 - F(1, 15)
