"""Convergence verdict engines and their structural identities."""

import random
from fractions import Fraction as F

from hypothesis import given, settings, strategies as st

from idealconv.convergence import (
    CONVERGES,
    DIVERGES,
    BlockConstantSeq,
    DecayBlockValues,
    FormulaSeq,
    IndicatorSequence,
    PeriodicBlockValues,
    RampSequence,
    ideal_limit,
    imu_limit,
    implication_harness,
    istat_limit,
    sequence_from_json,
    stat_limit,
)
from idealconv.functionals import ConstantUpperDensity, LacunaryBlocks, UniformMeasures
from idealconv.ideals import EMPTY_TIMES_FIN, FIN, SUMMABLE, ZETA
from idealconv.sets import (
    Residue,
    factorial_runs_set,
    make_block_scheme,
    named_family,
)
from idealconv.verdicts import UNDECIDED

U = UniformMeasures()
A = factorial_runs_set()
SQUARES = named_family("squares")


def seqs_for_identity():
    sch = make_block_scheme("factorial")
    return [
        IndicatorSequence(A),
        IndicatorSequence(SQUARES),
        IndicatorSequence(Residue(2, 0)),
        FormulaSeq("inv-sqrt-ceil"),
        FormulaSeq("constant", F(1, 3)),
        BlockConstantSeq(sch, PeriodicBlockValues([F(1), F(0), F(0)])),
        BlockConstantSeq(sch, DecayBlockValues()),
        RampSequence([(1, F(0)), (10, F(1, 2)), (30, F(0))]),
    ]


class TestDeviationSets:
    def test_indicator_cases(self):
        x = IndicatorSequence(SQUARES)
        d = x.deviation_set(F(0), F(1, 2))
        assert d is SQUARES or d.to_json() == SQUARES.to_json()
        d = x.deviation_set(F(1, 2), F(1, 4))
        assert d.contains(3) and d.contains(4)  # both values deviate

    def test_match_pointwise(self):
        for x in seqs_for_identity():
            for ell in (F(0), F(1), F(1, 3)):
                for eps in (F(1, 2), F(1, 5)):
                    d = x.deviation_set(ell, eps)
                    for n in range(1, 260):
                        assert d.contains(n) == (abs(x.value(n) - ell) >= eps), (
                            x.to_json(), ell, eps, n)

    @settings(max_examples=25, deadline=None)
    @given(seed=st.integers(0, 2000))
    def test_ramp_deviations_random(self, seed):
        rng = random.Random(seed)
        anchors = [(1, F(0))]
        pos = 1
        for _ in range(rng.randrange(1, 5)):
            pos += rng.randrange(3, 30)
            anchors.append((pos, F(rng.randrange(-4, 5), rng.randrange(1, 7))))
        x = RampSequence(anchors)
        ell = F(rng.randrange(-1, 2), rng.randrange(1, 4))
        eps = F(1, rng.randrange(2, 9))
        d = x.deviation_set(ell, eps)
        for n in range(1, pos + 20):
            assert d.contains(n) == (abs(x.value(n) - ell) >= eps), (anchors, n)


class TestIdealLimit:
    def test_squares_indicator(self):
        x = IndicatorSequence(SQUARES)
        assert ideal_limit(x, FIN, F(0)).overall == DIVERGES
        assert ideal_limit(x, ZETA, F(0)).overall == CONVERGES

    def test_constant(self):
        x = FormulaSeq("constant", F(3))
        assert ideal_limit(x, FIN, F(3)).overall == CONVERGES

    def test_factorial_indicator(self):
        assert ideal_limit(IndicatorSequence(A), ZETA, F(0)).overall == DIVERGES

    def test_limit_uniqueness(self):
        for x in seqs_for_identity():
            for oracle in (FIN, ZETA):
                hits = [ell for ell in (F(0), F(1), F(1, 2), F(1, 3))
                        if ideal_limit(x, oracle, ell).overall == CONVERGES]
                assert len(hits) <= 1, (x.to_json(), oracle.name, hits)


class TestStatistical:
    def test_factorial_indicator_diverges_both_limits(self):
        x = IndicatorSequence(A)
        assert istat_limit(x, FIN, F(0)).overall == DIVERGES
        assert istat_limit(x, FIN, F(1)).overall == DIVERGES

    def test_squares_statistically_null(self):
        assert istat_limit(IndicatorSequence(SQUARES), FIN, F(0)).overall == \
            CONVERGES

    def test_outer_density_ideal_agrees(self):
        x = IndicatorSequence(A)
        assert istat_limit(x, ZETA, F(1)).overall == DIVERGES

    def test_stat_limit_is_the_trivial_ideal_case(self):
        for x in seqs_for_identity()[:4]:
            assert stat_limit(x, F(0)).overall == \
                istat_limit(x, FIN, F(0)).overall


class TestPairConvergence:
    def test_constant_upper_density_level_is_everything(self):
        x = IndicatorSequence(A)
        rep = imu_limit(x, ZETA, ConstantUpperDensity(), F(1),
                        eps_grid=[F(1, 2)], delta_grid=[F(1, 2)])
        assert rep.overall == DIVERGES
        assert rep.cells[0]["level"]["pieces"] == [{"lo": 1, "hi": None}]

    def test_identity_with_uniform(self):
        for x in seqs_for_identity():
            for oracle in (FIN, ZETA, SUMMABLE):
                for ell in (F(0), F(1)):
                    a = istat_limit(x, oracle, ell).overall
                    b = imu_limit(x, oracle, U, ell).overall
                    assert a == b, (x.to_json(), oracle.name, ell)

    def test_increasing_level_chain(self):
        # the uniform level sets of the factorial set grow as the threshold
        # falls: a nested family of index sets
        levels = [U.level_set(A, F(1, m), 10**6) for m in (2, 3, 5, 8)]
        for coarse, fine in zip(levels, levels[1:]):
            for n in range(1, 2000, 37):
                a, b = coarse.member(n), fine.member(n)
                if a is True:
                    assert b is True  # smaller threshold keeps every member

    def test_lacunary_pair(self):
        lac = LacunaryBlocks(make_block_scheme("factorial"))
        x = IndicatorSequence(A)
        assert imu_limit(x, FIN, lac, F(1)).overall == DIVERGES
        assert imu_limit(IndicatorSequence(SQUARES), FIN, lac, F(0)).overall \
            == CONVERGES


class TestHarnesses:
    def test_vanishing_implication(self):
        corpus = [("squares", IndicatorSequence(SQUARES)),
                  ("factorial", IndicatorSequence(A)),
                  ("zero", FormulaSeq("constant", F(0)))]
        rep = implication_harness(corpus, U, U, F(0))
        assert rep.ok and rep.checked >= 2

    def test_cross_pair_implication(self):
        lac = LacunaryBlocks(make_block_scheme("factorial"))
        corpus = [("squares", IndicatorSequence(SQUARES)),
                  ("zero", FormulaSeq("constant", F(0)))]
        rep = implication_harness(corpus, U, lac, F(0))
        assert rep.ok

    def test_known_inclusions_preserve_convergence(self):
        # convergence along a smaller ideal forces it along a larger one
        pairs = [(FIN, ZETA), (FIN, SUMMABLE), (SUMMABLE, ZETA),
                 (EMPTY_TIMES_FIN, ZETA)]
        for x in seqs_for_identity():
            for small, big in pairs:
                for ell in (F(0), F(1)):
                    a = istat_limit(x, small, ell).overall
                    b = istat_limit(x, big, ell).overall
                    if a == CONVERGES and b != UNDECIDED:
                        assert b == CONVERGES, (x.to_json(), small.name,
                                                big.name, ell)

    def test_pointwise_domination(self):
        # nu <= mu pointwise: pair convergence transfers from mu to nu
        from idealconv.functionals import MatrixRows, UniformScaledKernel

        nu = MatrixRows(UniformScaledKernel(2))  # values count/n^2 <= count/n
        for x in seqs_for_identity()[:5]:
            a = imu_limit(x, FIN, U, F(0)).overall
            b = imu_limit(x, FIN, nu, F(0)).overall
            if a == CONVERGES and b != UNDECIDED:
                assert b == CONVERGES, x.to_json()


class TestJsonSequences:
    def test_round_trip(self):
        docs = [
            {"kind": "indicator", "set": {"kind": "residue", "mod": 2, "res": 0}},
            {"kind": "formula", "name": "inv-index", "param": {"num": "1", "den": "1"}},
            {"kind": "block-constant", "scheme": "factorial", "values": "periodic",
             "cycle": [{"num": "1", "den": "1"}, {"num": "0", "den": "1"}]},
            {"kind": "ramp", "anchors": [[1, {"num": "0", "den": "1"}],
                                         [9, {"num": "1", "den": "2"}]]},
        ]
        for doc in docs:
            x = sequence_from_json(doc)
            assert sequence_from_json(x.to_json()).value(5) == x.value(5)
