"""Densities, harmonic sums, submeasure sequences, flatness, exhaustive tails."""

from fractions import Fraction as F

import pytest

from idealconv.functionals import (
    ConstantUpperDensity,
    ExplicitRowsKernel,
    LacunaryBlocks,
    MaskedUniformKernel,
    MatrixRows,
    PreconditionError,
    UniformMeasures,
    UniformScaledKernel,
    alpha_flat_check,
    exh_tail,
    flat_family_matrix,
    harmonic_partial,
    lacunary_level_set,
    smoothness_check,
    submeasure_eval,
    summable_verdict,
    uniform_eval,
    upper_density,
)
from idealconv.sets import (
    Complement,
    EMPTY,
    FiniteSet,
    Residue,
    Union,
    factorial_runs_set,
    make_block_scheme,
    named_family,
)
from idealconv.verdicts import IN, OUT, UNDECIDED

U = UniformMeasures()


class TestUniformEval:
    def test_examples(self):
        assert uniform_eval(Residue(2, 0), 10) == F(1, 2)
        assert uniform_eval(factorial_runs_set(), 6) == F(5, 6)
        assert uniform_eval(EMPTY, 7) == 0

    def test_times_n_is_count(self, set_zoo):
        for name, s in set_zoo:
            for n in (1, 9, 100, 731):
                assert uniform_eval(s, n) * n == s.count(n), name


class TestUpperDensity:
    def test_residue_closed_form(self):
        r = upper_density(Residue(2, 0))
        assert r.value == F(1, 2) and r.certificate == "closed-form"
        assert upper_density(Residue(7, 3)).value == F(1, 7)

    def test_factorial_run_set_reaches_one(self):
        r = upper_density(factorial_runs_set())
        assert r.value == 1 and r.certified
        # witnessed along the run right endpoints with exact values
        assert r.witness and r.witness[0][0] == 6

    def test_complement_also_reaches_one(self):
        r = upper_density(Complement(factorial_runs_set()))
        assert r.value == 1 and r.certified

    def test_finite_is_zero(self):
        assert upper_density(FiniteSet([5, 9])).value == 0

    def test_values_in_unit_interval(self, set_zoo):
        for name, s in set_zoo:
            r = upper_density(s, horizon=10**4)
            assert 0 <= r.value <= 1, name

    def test_ratio_family_exact_limsup(self):
        from idealconv.sets import IntervalFamily, RatioFamily

        # rho=2, gap=2: limsup (rho-1)*gap/(rho*gap-1) = 2/3
        s = IntervalFamily(RatioFamily(2, 2, 2))
        r = upper_density(s)
        assert r.value == F(2, 3) and r.certified

    def test_estimate_not_masquerading(self):
        # a union mixing an interval family into a residue has no closed form
        s = Union([named_family("factorial"), Residue(2, 0)])
        r = upper_density(s, horizon=10**4)
        if not r.certified:
            assert r.horizon == 10**4


class TestHarmonic:
    def test_exact_partial(self):
        assert harmonic_partial(FiniteSet([1, 2, 3]), 3) == F(11, 6)

    def test_matches_direct_sum(self, set_zoo):
        for name, s in set_zoo:
            direct = sum((F(1, k) for k in range(1, 200) if s.contains(k)), F(0))
            assert harmonic_partial(s, 199) == direct, name

    def test_summable_verdicts(self):
        assert summable_verdict(named_family("powers2")).status == IN
        assert summable_verdict(Residue(2, 0)).status == OUT
        assert summable_verdict(FiniteSet([1, 2, 3])).status == IN
        assert summable_verdict(factorial_runs_set()).status == OUT
        assert summable_verdict(named_family("squares")).status == IN

    def test_undecided_carries_trace(self):
        s = Union([named_family("squares"), FiniteSet([7])])
        v = summable_verdict(s)
        if v.status == UNDECIDED:
            assert v.witness and "partial_sums" in v.witness


class TestSubmeasureEval:
    def test_uniform(self):
        assert submeasure_eval(U, 10, Residue(2, 0), 10) == F(1, 2)

    def test_uniform_needs_covering_horizon(self):
        with pytest.raises(PreconditionError):
            submeasure_eval(U, 10, Residue(2, 0), 9)

    def test_lacunary_window(self):
        lac = LacunaryBlocks(make_block_scheme("factorial"))
        # index 2 window is [2, 6): members {2, 4} of 4 points
        assert submeasure_eval(lac, 2, Residue(2, 0), 24) == F(1, 2)

    def test_lacunary_support_precondition(self):
        lac = LacunaryBlocks(make_block_scheme("factorial"))
        with pytest.raises(PreconditionError):
            submeasure_eval(lac, 2, Residue(2, 0), 4)

    def test_matrix_row(self):
        rows = [[(k, F(1, 3)) for k in range(1, i + 1)] for i in (1, 2, 3)]
        m = MatrixRows(ExplicitRowsKernel(rows))
        assert submeasure_eval(m, 3, FiniteSet([2]), 3) == F(1, 3)

    def test_h_independence_once_covered(self):
        lac = LacunaryBlocks(make_block_scheme("factorial"))
        v1 = submeasure_eval(lac, 3, Residue(2, 0), 24)
        v2 = submeasure_eval(lac, 3, Residue(2, 0), 10**6)
        assert v1 == v2

    def test_subadditivity_on_disjoint_unions(self):
        a, b = Residue(4, 1), Residue(4, 3)
        ab = Union([a, b])
        lac = LacunaryBlocks(make_block_scheme("factorial"))
        for mu in (U, lac):
            for n in (2, 3, 5):
                h = 10**6
                assert submeasure_eval(mu, n, ab, h) <= \
                    submeasure_eval(mu, n, a, h) + submeasure_eval(mu, n, b, h)

    def test_monotone_in_the_set(self):
        small = Residue(4, 1)
        big = Union([Residue(4, 1), Residue(4, 3)])
        for n in (3, 7, 20):
            assert submeasure_eval(U, n, small, n) <= submeasure_eval(U, n, big, n)


class TestSmoothness:
    def test_uniform_certified(self):
        assert smoothness_check(U).verdict == "smooth"

    def test_constant_upper_density_certified(self):
        assert smoothness_check(ConstantUpperDensity()).verdict == "smooth"

    def test_vanishing_rows_refuted(self):
        assert smoothness_check(MatrixRows(UniformScaledKernel(2))).verdict == "refuted"

    def test_lacunary_certified(self):
        lac = LacunaryBlocks(make_block_scheme("factorial"))
        assert smoothness_check(lac).verdict == "smooth"


class TestFlatness:
    def test_uniform_is_one_flat(self):
        r = alpha_flat_check(U, Residue(2, 0), F(1), F(1), 2000)
        assert r.holds
        r = alpha_flat_check(U, factorial_runs_set(), F(1), F(1), 1000)
        assert r.holds

    def test_single_step_value(self):
        # |lambda_3(evens) - lambda_2(evens)| = |1/3 - 1/2| = 1/6 <= 1/2
        a, b = uniform_eval(Residue(2, 0), 2), uniform_eval(Residue(2, 0), 3)
        assert abs(a - b) == F(1, 6) <= F(1, 2)

    def test_two_flat_refuted_for_uniform(self):
        r = alpha_flat_check(U, Residue(2, 0), F(2), F(1), 100)
        assert not r.holds and r.violation is not None

    def test_indicator_jump_violates(self):
        # mu_n(A) alternating 0/1 jumps by 1 > 1/2 at n = 2
        rows = [[(1, F(n % 2))] for n in range(1, 6)]
        m = MatrixRows(ExplicitRowsKernel(rows))
        r = alpha_flat_check(m, FiniteSet([1]), F(1), F(1), 4)
        assert not r.holds and r.violation[0] == 2

    def test_weaker_exponents_inherit(self, set_zoo):
        # holds at alpha implies holds at beta <= alpha with the same constant
        for name, s in set_zoo[:6]:
            strong = alpha_flat_check(U, s, F(1), F(1), 400)
            weak = alpha_flat_check(U, s, F(1, 2), F(1), 400)
            assert strong.holds and weak.holds, name

    def test_flat_family_constructor(self):
        mu = flat_family_matrix(F(1), F(1), F(1, 8))
        alpha = mu.flat_validation["alpha"]
        assert alpha == F(7, 8)
        assert alpha_flat_check(mu, Residue(2, 0), alpha, F(4), 256).holds


class TestExhTail:
    def test_empty_tail(self):
        assert exh_tail(U, FiniteSet([5]), 5, 100) == 0

    def test_full_prefix(self):
        assert exh_tail(U, Residue(2, 0), 0, 100) == F(1, 2)

    def test_cut_at_fifty(self):
        assert exh_tail(U, Residue(2, 0), 50, 100) == F(1, 4)

    def test_matches_brute_max(self, set_zoo):
        def brute(s, n, h):
            best = F(0)
            tail = [k for k in range(n + 1, h + 1) if s.contains(k)]
            for k in range(1, h + 1):
                c = sum(1 for t in tail if t <= k)
                best = max(best, F(c, k))
            return best

        for name, s in set_zoo[:8]:
            for n in (0, 13, 60):
                assert exh_tail(U, s, n, 150) == brute(s, n, 150), name

    def test_nonincreasing_in_cut(self, set_zoo):
        for name, s in set_zoo[:8]:
            vals = [exh_tail(U, s, n, 200) for n in (0, 10, 50, 120)]
            assert vals == sorted(vals, reverse=True), name

    def test_non_lsc_rejected(self):
        with pytest.raises(PreconditionError):
            exh_tail(ConstantUpperDensity(), Residue(2, 0), 0, 10)


class TestLacunaryLevels:
    def test_matches_brute_blocks(self):
        import math

        sch = make_block_scheme("factorial")
        a = factorial_runs_set()
        for delta in (F(1, 4), F(1, 2), F(1)):
            level = lacunary_level_set(sch, a, delta, 64)
            got = [j for j in range(1, 8) if level.member(j)]
            want = []
            for j in range(1, 8):
                lo, hi = math.factorial(j), math.factorial(j + 1) - 1
                cnt = sum(1 for x in range(lo, hi + 1) if a.contains(x))
                if F(cnt, hi - lo + 1) >= delta:
                    want.append(j)
            assert got == want, delta

    def test_periodic_tail_decided(self):
        sch = make_block_scheme("factorial")
        level = lacunary_level_set(sch, Residue(2, 0), F(1, 4), 64)
        assert level.exact and level.member(40)
        level = lacunary_level_set(sch, Residue(2, 0), F(2, 3), 64)
        assert level.exact and level.is_empty()

    def test_density_equality_boundary(self):
        # window means hit 1/2 exactly on every window from index 3 on
        sch = make_block_scheme("factorial")
        level = lacunary_level_set(sch, Residue(2, 0), F(1, 2), 64)
        assert level.exact and level.member(50)

    def test_masked_rows_level(self):
        masked = MatrixRows(MaskedUniformKernel(2, [0]))
        level = masked.level_set(Residue(2, 0), F(1, 4), 10**4)
        assert level.exact
        # only even indices can reach the threshold
        assert level.member(10) and not level.member(11)
