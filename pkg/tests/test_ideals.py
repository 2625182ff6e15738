"""Membership oracles, derived ideals, thickness, and inclusion probes."""

from fractions import Fraction as F

import pytest

from idealconv.functionals import (
    LacunaryBlocks,
    MaskedUniformKernel,
    MatrixRows,
    UniformMeasures,
    UniformScaledKernel,
)
from idealconv.ideals import (
    EMPTY_TIMES_FIN,
    FIN,
    SUMMABLE,
    ZETA,
    GeneratedIdeal,
    VanishingIdeal,
    alpha_thick_check,
    inclusion_probe,
    j_of,
    membership,
    oracle_by_name,
    proper_check,
)
from idealconv.sets import (
    Complement,
    EMPTY,
    FULL,
    FiniteSet,
    Residue,
    Union,
    block_union,
    explicit_family,
    factorial_runs_set,
    make_block_scheme,
    named_family,
)
from idealconv.verdicts import IN, OUT, UNDECIDED

U = UniformMeasures()


class TestMembership:
    def test_density_zero_rejects_factorial_set(self):
        assert membership(ZETA, factorial_runs_set()).status == OUT

    def test_summable_rejects_evens(self):
        assert membership(SUMMABLE, Residue(2, 0)).status == OUT

    def test_fibers_accept_powers(self):
        assert membership(EMPTY_TIMES_FIN, named_family("powers2")).status == IN

    def test_fibers_reject_residues(self):
        assert membership(EMPTY_TIMES_FIN, Residue(2, 1)).status == OUT

    def test_empty_always_in(self):
        for oracle in (FIN, ZETA, SUMMABLE, EMPTY_TIMES_FIN):
            assert membership(oracle, EMPTY).status == IN

    def test_finite_always_in(self):
        f = FiniteSet([3, 31, 314])
        for oracle in (FIN, ZETA, SUMMABLE, EMPTY_TIMES_FIN,
                       VanishingIdeal(U), j_of(FIN, U)):
            assert membership(oracle, f).status == IN

    def test_full_always_out(self):
        for oracle in (FIN, ZETA, SUMMABLE, EMPTY_TIMES_FIN):
            assert membership(oracle, FULL).status == OUT

    def test_monotone_under_known_subsets(self, set_zoo):
        # a certified member's subset (via intersection) stays a member
        for name, s in set_zoo:
            v = membership(ZETA, s)
            if v.status != IN:
                continue
            from idealconv.sets import Intersection

            sub = Intersection([s, Residue(2, 0)])
            assert membership(ZETA, sub).status == IN, name

    def test_finite_union_closure(self, set_zoo):
        for oracle in (ZETA, SUMMABLE, EMPTY_TIMES_FIN):
            members = [s for _, s in set_zoo
                       if membership(oracle, s).status == IN]
            for a in members[:3]:
                for b in members[:3]:
                    assert membership(oracle, Union([a, b])).status == IN

    def test_verdict_stability(self, set_zoo):
        for name, s in set_zoo:
            for oracle in (FIN, ZETA, SUMMABLE, EMPTY_TIMES_FIN):
                v1 = membership(oracle, s, horizon=10**5)
                v2 = membership(oracle, s, horizon=2 * 10**5)
                if v1.decided:
                    assert v1.status == v2.status, (name, oracle.name)

    def test_undecided_is_honest(self):
        # no density closed form for this mix: Undecided, not a guess
        s = Union([named_family("factorial"), Residue(2, 0)])
        assert membership(ZETA, s).status in (UNDECIDED, OUT)


class TestVanishing:
    def test_uniform_matches_density_zero(self, set_zoo):
        zmu = VanishingIdeal(U)
        for name, s in set_zoo:
            a = membership(zmu, s).status
            b = membership(ZETA, s).status
            if a != UNDECIDED and b != UNDECIDED:
                assert a == b, name

    def test_lacunary_vanishing(self):
        lac = LacunaryBlocks(make_block_scheme("factorial"))
        zlac = VanishingIdeal(lac)
        assert membership(zlac, named_family("squares")).status == IN
        assert membership(zlac, Residue(2, 0)).status == OUT
        assert membership(zlac, factorial_runs_set()).status == OUT


class TestDerived:
    def test_matches_vanishing_for_trivial_base(self, set_zoo):
        j = j_of(FIN, U)
        direct = VanishingIdeal(U)
        for name, s in set_zoo:
            a = j.decide(s).status
            b = direct.decide(s).status
            if a != UNDECIDED and b != UNDECIDED:
                assert a == b, name

    def test_examples(self):
        assert j_of(FIN, U).decide(named_family("squares")).status == IN
        assert j_of(FIN, U).decide(factorial_runs_set()).status == OUT
        assert j_of(SUMMABLE, U).decide(factorial_runs_set()).status == OUT

    def test_agreement_with_density_membership(self, set_zoo):
        j = j_of(SUMMABLE, U)
        for name, s in set_zoo:
            a = j.decide(s).status
            b = membership(ZETA, s).status
            if a != UNDECIDED and b != UNDECIDED:
                assert a == b, name

    def test_grid_validation(self):
        with pytest.raises(Exception):
            j_of(FIN, U, eps_grid=[F(0)])


class TestProper:
    def test_uniform_pair_is_proper(self):
        assert proper_check(j_of(FIN, U))["result"] == "proper"

    def test_masked_rows_make_it_improper(self):
        gen = GeneratedIdeal(Residue(2, 0), "generated-evens")
        masked = MatrixRows(MaskedUniformKernel(2, [0]))
        assert proper_check(j_of(gen, masked))["result"] == "improper"

    def test_vanishing_rows_make_it_improper(self):
        rows = MatrixRows(UniformScaledKernel(2))
        assert proper_check(j_of(FIN, rows))["result"] == "improper"


class TestThickness:
    def test_double_runs_verified(self):
        dbl = named_family("factorial-double")
        rep = alpha_thick_check(ZETA, F(1), dbl, F(1), [24, 720, 40320])
        assert all(ok for _, _, ok in rep.checked)
        assert rep.ideal_verdict.status == OUT
        assert rep.consistent

    def test_structural_certificate_at_one(self):
        rep = alpha_thick_check(ZETA, F(1), named_family("factorial-double"),
                                F(1), [24])
        assert rep.structural is not None

    def test_tower_blocks_contain_doubling_windows(self):
        blocks = block_union(make_block_scheme("tower"), 2, [1])
        rep = alpha_thick_check(ZETA, F(1), blocks, F(1), [17, 32768])
        assert all(ok for _, _, ok in rep.checked)

    def test_fractional_exponent_windows(self):
        # [n, n + sqrt(n)] inside a long explicit run
        s = explicit_family([[100, 200]])
        rep = alpha_thick_check(ZETA, F(1, 2), s, F(1), [100, 144])
        assert all(ok for _, _, ok in rep.checked)

    def test_refutation_pair_never_occurs_on_zoo(self, set_zoo):
        for name, s in set_zoo:
            rep = alpha_thick_check(ZETA, F(1), s, F(1), [16, 256])
            assert rep.consistent, name


class TestInclusion:
    def test_summable_inside_density_zero(self, set_zoo):
        rep = inclusion_probe(SUMMABLE, ZETA, set_zoo)
        assert not rep.refuted

    def test_fibers_inside_density_zero(self, set_zoo):
        rep = inclusion_probe(EMPTY_TIMES_FIN, ZETA, set_zoo)
        assert not rep.refuted

    def test_fin_inside_everything(self, set_zoo):
        for oracle in (ZETA, SUMMABLE, EMPTY_TIMES_FIN):
            rep = inclusion_probe(FIN, oracle, set_zoo)
            assert not rep.refuted

    def test_reverse_direction_refuted(self):
        corpus = [("squares", named_family("squares"))]
        rep = inclusion_probe(ZETA, SUMMABLE, corpus)
        # squares: density zero but summable — no refutation of zeta in
        # summable from this corpus member (it is in both); evens refute
        # nothing either way; a genuine refutation needs density zero with
        # divergent harmonic mass
        short = named_family("factorial-short")
        rep = inclusion_probe(ZETA, SUMMABLE, [("short", short)])
        assert not rep.refuted  # factorial-short converges harmonically
        rep = inclusion_probe(SUMMABLE, ZETA, [("evens", Residue(2, 0))])
        assert not rep.refuted
        rep = inclusion_probe(ZETA, EMPTY_TIMES_FIN,
                              [("squares", named_family("squares"))])
        assert rep.refuted  # density zero but an infinite 2-adic fiber

    def test_undecided_reported_honestly(self):
        s = Union([named_family("factorial"), Residue(2, 0)])
        rep = inclusion_probe(SUMMABLE, ZETA, [("mix", s)])
        assert rep.undecided == ["mix"] or rep.agreements == 1


class TestNames:
    def test_oracle_lookup(self):
        assert oracle_by_name("fin") is FIN
        assert oracle_by_name("zeta") is ZETA
        assert oracle_by_name("summable") is SUMMABLE
        assert oracle_by_name("empty-times-fin") is EMPTY_TIMES_FIN
        assert oracle_by_name('zmu:{"kind":"uniform"}').name == "zmu:uniform"
        assert oracle_by_name('j-of:fin:{"kind":"uniform"}').name == \
            "j-of:fin:uniform"
