"""Symbolic sets: exact membership, counting, schemes, and wire format."""

import random

import pytest
from hypothesis import given, settings, strategies as st

from idealconv.codec import set_from_json, set_to_json
from idealconv.sets import (
    CallableGen,
    Complement,
    FiniteSet,
    GeneratorExhausted,
    Intersection,
    IntervalFamily,
    Residue,
    TwoAdicFiber,
    Union,
    ValidationError,
    block_union,
    explicit_family,
    factorial_runs_set,
    make_block_scheme,
    named_family,
)

from conftest import brute_count, random_combo


class TestContains:
    def test_residue_even(self):
        assert Residue(2, 0).contains(10)

    def test_factorial_misses_seven(self):
        # 7 sits in the gap between [2, 6] and [24, 120]
        a = factorial_runs_set()
        assert not a.contains(7)
        assert a.contains(6) and a.contains(24) and a.contains(120)

    def test_fiber(self):
        f = TwoAdicFiber(2)
        assert f.contains(12)  # 12 = 4 * 3
        assert not f.contains(8)
        assert not f.contains(6)

    def test_positive_domain(self):
        assert not Residue(2, 0).contains(0)
        assert not Complement(FiniteSet([])).contains(0)


class TestCount:
    def test_residue_closed_form(self):
        assert Residue(2, 0).count(10) == 5
        assert Residue(5, 3).count(3) == 1
        assert Residue(5, 3).count(2) == 0

    def test_factorial_prefixes(self):
        a = factorial_runs_set()
        assert a.count(6) == 5           # elements 2..6
        assert a.count(30) == 12         # 5 from [2,6], 7 from [24,30]

    def test_matches_brute_force_on_zoo(self, set_zoo):
        for name, s in set_zoo:
            c = 0
            for n in range(1, 700):
                c += s.contains(n)
                assert s.count(n) == c, (name, n)

    def test_complement_partition(self, set_zoo):
        for name, s in set_zoo:
            cs = Complement(s)
            for n in (1, 17, 256, 999):
                assert s.count(n) + cs.count(n) == n, name

    def test_inclusion_exclusion(self, set_zoo):
        for (n1, a), (n2, b) in zip(set_zoo[::2], set_zoo[1::2]):
            u = Union([a, b])
            i = Intersection([a, b])
            for n in (3, 64, 500):
                assert u.count(n) + i.count(n) == a.count(n) + b.count(n), (n1, n2)

    def test_double_complement_identity(self, set_zoo):
        for name, s in set_zoo:
            cc = Complement(Complement(s))
            for n in range(1, 300):
                assert cc.contains(n) == s.contains(n), name

    @settings(max_examples=40, deadline=None)
    @given(seed=st.integers(0, 10_000), n=st.integers(1, 400))
    def test_random_combos_match_brute_force(self, seed, n):
        s = random_combo(random.Random(seed))
        assert s.count(n) == brute_count(s, n)

    def test_big_endpoints_stay_exact(self):
        # factorial endpoints overflow 64 bits well before index 21
        a = factorial_runs_set()
        n = 10**40
        c = a.count(n)
        assert c > 10**39  # the run [30!, 31!] alone is astronomically long
        assert a.count(n) - a.count(n - 1) in (0, 1)

    def test_full_prefix_to_hundred_thousand(self):
        # the long-range agreement check on a few representatives
        for s in (factorial_runs_set(),
                  Intersection([Residue(2, 0), Complement(named_family("squares"))]),
                  block_union(make_block_scheme("factorial"), 2, [1])):
            c = 0
            for n in range(1, 10**5 + 1):
                c += s.contains(n)
                if n % 509 == 0 or n < 50:
                    assert s.count(n) == c, n
            assert s.count(10**5) == c


class TestValidation:
    def test_bad_residue(self):
        with pytest.raises(ValidationError):
            Residue(0, 0)
        with pytest.raises(ValidationError):
            Residue(4, 4)

    def test_explicit_intervals_must_increase(self):
        with pytest.raises(ValidationError):
            explicit_family([[5, 10], [10, 12]])
        with pytest.raises(ValidationError):
            explicit_family([[5, 4]])

    def test_generator_exhausted_surfaces(self):
        broken = IntervalFamily(CallableGen(
            lambda m: (m, m) if m <= 3 else None, finite=False))
        with pytest.raises(GeneratorExhausted):
            broken.count(100)

    def test_nonmonotone_generator_rejected(self):
        bad = IntervalFamily(CallableGen(lambda m: (10 - m, 10 - m)))
        with pytest.raises(ValidationError):
            bad.count(100)


class TestBlockSchemes:
    def test_factorial_cut_points(self):
        s = make_block_scheme("factorial")
        assert [s.a(n) for n in range(6)] == [0, 1, 2, 6, 24, 120]

    def test_tower_cut_points(self):
        s = make_block_scheme("tower")
        assert [s.a(n) for n in range(1, 6)] == [1, 2, 4, 16, 65536]

    def test_blocks_partition(self):
        s = make_block_scheme("factorial")
        covered = []
        for n in range(1, 5):
            lo, hi = s.block(n)
            covered.extend(range(lo, hi + 1))
        assert covered == list(range(1, s.a(4) + 1))

    def test_explicit_monotonicity_error(self):
        with pytest.raises(ValidationError):
            make_block_scheme([3, 2])

    def test_block_union_membership(self):
        s = make_block_scheme("factorial")
        bu = block_union(s, 2, [1])  # blocks 1, 3, 5, ...
        # block 3 is (2, 6]
        assert bu.contains(3) and bu.contains(6)
        assert not bu.contains(7)
        assert bu.count(6) == brute_count(bu, 6)


class TestJson:
    def test_round_trip_stability(self, set_zoo):
        for name, s in set_zoo:
            j = set_to_json(s)
            assert set_to_json(set_from_json(j)) == j, name

    def test_documented_encodings(self):
        for doc in (
            {"kind": "residue", "mod": 2, "res": 0},
            {"kind": "intervals", "gen": "factorial"},
            {"kind": "intervals", "endpoints": [[2, 6], [24, 120]]},
            {"kind": "fiber2", "k": 2},
            {"kind": "finite", "elems": [1, 2]},
            {"kind": "complement", "of": {"kind": "finite", "elems": []}},
            {"kind": "union", "of": [{"kind": "residue", "mod": 2, "res": 0},
                                     {"kind": "fiber2", "k": 0}]},
        ):
            assert set_to_json(set_from_json(doc)) == doc

    def test_unknown_kind_rejected(self):
        with pytest.raises(ValidationError):
            set_from_json({"kind": "primes"})


class TestConcurrency:
    def test_concurrent_reads_match_sequential(self):
        import threading

        a = named_family("squares")
        want = [brute_count(a, n) for n in range(1, 400)]
        results = {}

        def worker(tag):
            results[tag] = [a.count(n) for n in range(1, 400)]

        threads = [threading.Thread(target=worker, args=(i,)) for i in range(4)]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
        assert all(results[i] == want for i in results)
