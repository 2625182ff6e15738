import random
from fractions import Fraction

import pytest

from idealconv.sets import (
    Complement,
    FiniteSet,
    Intersection,
    IntervalFamily,
    RatioFamily,
    Residue,
    SparseSingletons,
    TwoAdicFiber,
    Union,
    explicit_family,
    factorial_runs_set,
    named_family,
)


def brute_count(s, n: int) -> int:
    """Independent oracle: membership scan, no closed forms."""
    return sum(1 for k in range(1, n + 1) if s.contains(k))


def brute_level(s, delta: Fraction, n_max: int) -> list:
    """Independent oracle for running-mean level sets."""
    out, c = [], 0
    for n in range(1, n_max + 1):
        c += s.contains(n)
        if Fraction(c, n) >= delta:
            out.append(n)
    return out


def standard_sets() -> list:
    a = factorial_runs_set()
    sq = named_family("squares")
    return [
        ("factorial-A", a),
        ("evens", Residue(2, 0)),
        ("threes", Residue(3, 1)),
        ("fiber2", TwoAdicFiber(2)),
        ("finite", FiniteSet([2, 5, 9, 14])),
        ("squares", sq),
        ("powers2", named_family("powers2")),
        ("complement-A", Complement(a)),
        ("union", Union([Residue(2, 0), sq])),
        ("intersection", Intersection([Residue(2, 0), a])),
        ("evens-no-squares", Intersection([Residue(2, 0), Complement(sq)])),
        ("ratio", IntervalFamily(RatioFamily(3, 2, 2))),
        ("sparse", IntervalFamily(SparseSingletons(5, 3))),
        ("explicit", explicit_family([[4, 9], [20, 20], [31, 44]])),
    ]


@pytest.fixture(scope="session")
def set_zoo():
    return standard_sets()


def random_combo(rng: random.Random, depth: int = 2):
    """Seeded random structured set for property tests."""
    if depth == 0:
        kind = rng.randrange(5)
        if kind == 0:
            q = rng.randrange(1, 7)
            return Residue(q, rng.randrange(q))
        if kind == 1:
            return FiniteSet(sorted(rng.sample(range(1, 120), rng.randrange(0, 6))))
        if kind == 2:
            return TwoAdicFiber(rng.randrange(0, 4))
        if kind == 3:
            lo, eps = 1, []
            for _ in range(rng.randrange(1, 5)):
                lo += rng.randrange(1, 25)
                hi = lo + rng.randrange(0, 12)
                eps.append([lo, hi])
                lo = hi + 1
            return explicit_family(eps)
        return named_family(rng.choice(["squares", "powers2", "factorial"]))
    op = rng.randrange(3)
    if op == 0:
        return Complement(random_combo(rng, depth - 1))
    kids = [random_combo(rng, depth - 1) for _ in range(rng.randrange(2, 4))]
    return Union(kids) if op == 1 else Intersection(kids)
