"""Running-mean level sets: exact crossings, tails, and certified facts."""

import random
from fractions import Fraction as F

from hypothesis import given, settings, strategies as st

from idealconv.levelsets import uniform_level_set
from idealconv.sets import (
    Complement,
    Residue,
    factorial_runs_set,
    named_family,
)

from conftest import brute_level, random_combo


def materialized(level, n_max):
    out = []
    for n in range(1, n_max + 1):
        m = level.member(n)
        if m is None:
            return None
        if m:
            out.append(n)
    return out


class TestCrossings:
    def test_zoo_matches_brute(self, set_zoo):
        for name, s in set_zoo:
            for delta in (F(1, 2), F(1, 3), F(2, 5), F(9, 10), F(1)):
                level = uniform_level_set(s, delta, horizon=2500)
                got = materialized(level, 900)
                if got is not None:
                    assert got == brute_level(s, delta, 900), (name, delta)

    @settings(max_examples=50, deadline=None)
    @given(seed=st.integers(0, 5000),
           num=st.integers(1, 6), den=st.sampled_from([2, 3, 5, 7, 10]))
    def test_random_combos(self, seed, num, den):
        if num > den:
            num = den
        delta = F(num, den)
        s = random_combo(random.Random(seed))
        level = uniform_level_set(s, delta, horizon=1500)
        got = materialized(level, 400)
        if got is not None:
            assert got == brute_level(s, delta, 400)

    def test_above_one_is_empty(self):
        level = uniform_level_set(Residue(2, 0), F(3, 2), 1000)
        assert level.is_empty()


class TestTails:
    def test_periodic_tail_exact(self):
        level = uniform_level_set(Residue(2, 0), F(1, 2), 1000)
        assert level.exact
        # membership far beyond any horizon stays decided
        assert level.member(10**12) is True
        assert level.member(10**12 + 1) is False

    def test_fat_family_certified(self):
        level = uniform_level_set(factorial_runs_set(), F(1, 2), 10**6)
        assert level.tail == "certified"
        f = level.facts
        assert f.finite is False and f.dstar_low > 0
        assert f.runs_unbounded and f.harmonic == "diverges"

    def test_complement_certified(self):
        level = uniform_level_set(Complement(factorial_runs_set()), F(1, 2), 10**6)
        assert level.tail == "certified" and level.facts.finite is False

    def test_vanishing_family_exact_empty_tail(self):
        level = uniform_level_set(named_family("squares"), F(1, 10), 10**6)
        assert level.exact and level.facts.finite

    def test_stability_under_horizon_doubling(self, set_zoo):
        for name, s in set_zoo:
            for delta in (F(1, 2), F(1, 5)):
                a = uniform_level_set(s, delta, horizon=10**5)
                b = uniform_level_set(s, delta, horizon=2 * 10**5)
                for field in ("finite", "dstar_zero", "runs_unbounded"):
                    va, vb = getattr(a.facts, field), getattr(b.facts, field)
                    if va is not None and vb is not None:
                        assert va == vb, (name, delta, field)

    def test_exact_levels_have_symbolic_forms(self, set_zoo):
        for name, s in set_zoo:
            level = uniform_level_set(s, F(1, 3), horizon=3000)
            if level.exact:
                sym = level.as_set()
                for n in (1, 7, 50, 800):
                    assert sym.contains(n) == level.member(n), name
