"""Symbolic subsets of the positive integers with exact membership and counting.

A :class:`SymbolicSet` is a finite description of a (possibly infinite) subset
of N = {1, 2, 3, ...}.  Every variant supports two exact queries:

* ``contains(n)``  -- membership of a single integer,
* ``count(n)``     -- the prefix count |A intersect [1, n]|,

with ``count`` computed in closed form (no element-by-element scan) for all
built-in variants.  All integers are arbitrary precision; interval endpoints
such as factorials overflow machine words almost immediately and are handled
exactly.

Values are immutable after construction.  Internal memo tables (interval
caches, block endpoints) are append-only and guarded by a lock, so concurrent
reads from multiple threads return the same results as sequential evaluation.
"""

from __future__ import annotations

import threading
from bisect import bisect_right
from dataclasses import dataclass, field
from math import gcd, isqrt
from typing import Callable, Optional, Sequence


class SetError(Exception):
    """Base class for errors raised by the symbolic set layer."""


class ValidationError(SetError):
    """Malformed construction input (non-monotone lists, bad moduli, ...)."""


class GeneratorExhausted(SetError):
    """An interval generator declared infinite stopped producing intervals."""


class CostLimit(SetError):
    """Raised when interval emission exceeds the active budget."""


_BUDGET = threading.local()


class emission_budget:
    """Context manager bounding how many intervals may be materialized.

    Analysis passes that probe sets at astronomical horizons use this to trade
    completeness for termination: a CostLimit downgrades the verdict to
    Undecided instead of hanging.
    """

    def __init__(self, limit: int):
        self.limit = limit

    def __enter__(self):
        self.old = getattr(_BUDGET, "left", None)
        _BUDGET.left = self.limit
        return self

    def __exit__(self, *exc):
        _BUDGET.left = self.old
        return False


def _charge_emission() -> None:
    left = getattr(_BUDGET, "left", None)
    if left is not None:
        if left <= 0:
            raise CostLimit("interval emission budget exhausted")
        _BUDGET.left = left - 1


# ---------------------------------------------------------------------------
# Periodic patterns
# ---------------------------------------------------------------------------

# Residue classes, 2-adic fibers and their Boolean combinations are eventually
# periodic; PeriodicPattern is the exact description of one period.

PROFILE_PERIOD_CAP = 1 << 22


@dataclass(frozen=True)
class PeriodicPattern:
    period: int
    bits: tuple[int, ...]  # bits[t] = membership of n with n % period == t

    def __post_init__(self) -> None:
        if self.period < 1 or len(self.bits) != self.period:
            raise ValidationError("pattern bits must cover one full period")

    @property
    def per_period(self) -> int:
        return sum(self.bits)

    def member(self, n: int) -> bool:
        return bool(self.bits[n % self.period])

    def count_upto(self, n: int) -> int:
        """|{1 <= m <= n : member(m)}| for the pure periodic set."""
        if n <= 0:
            return 0
        q = self.period
        full, rem = divmod(n, q)
        c = full * self.per_period
        for t in range(1, rem + 1):
            c += self.bits[t]
        return c

    def negate(self) -> "PeriodicPattern":
        return PeriodicPattern(self.period, tuple(1 - b for b in self.bits))

    def combine(self, other: "PeriodicPattern", op: str) -> "PeriodicPattern":
        q = self.period * other.period // gcd(self.period, other.period)
        if q > PROFILE_PERIOD_CAP:
            raise ValidationError("combined period exceeds the profile cap")
        fn = (lambda a, b: a | b) if op == "union" else (lambda a, b: a & b)
        bits = tuple(
            fn(self.bits[t % self.period], other.bits[t % other.period])
            for t in range(q)
        )
        return PeriodicPattern(q, bits)


@dataclass(frozen=True)
class PeriodicProfile:
    """Exact eventual description: membership equals ``pattern`` for n >= start."""

    start: int
    pattern: PeriodicPattern

    @property
    def density(self):
        from fractions import Fraction

        return Fraction(self.pattern.per_period, self.pattern.period)


# ---------------------------------------------------------------------------
# Interval generators
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SchemeAlignment:
    """Exact window decomposition against a named block scheme.

    For windows [a_j, a_{j+1}) with j >= start: the open interior
    (a_j, a_{j+1} - 1] is fully inside the set iff j % mod is in ``interior``
    (and disjoint from it otherwise), and the endpoint a_j belongs to the set
    iff j % mod is in ``endpoint``.  Gives the closed form
    |set ∩ window_j| = (len_j - 1) * [interior] + [endpoint].
    """

    scheme: str
    start: int
    mod: int
    interior: frozenset
    endpoint: frozenset

    def negate(self) -> "SchemeAlignment":
        allr = frozenset(range(self.mod))
        return SchemeAlignment(self.scheme, self.start, self.mod,
                               allr - self.interior, allr - self.endpoint)

    def combine(self, other: "SchemeAlignment", op: str) -> Optional["SchemeAlignment"]:
        if self.scheme != other.scheme:
            return None
        m = self.mod * other.mod // gcd(self.mod, other.mod)
        pick = (lambda a, b: a or b) if op == "union" else (lambda a, b: a and b)
        interior = frozenset(
            t for t in range(m)
            if pick(t % self.mod in self.interior, t % other.mod in other.interior)
        )
        endpoint = frozenset(
            t for t in range(m)
            if pick(t % self.mod in self.endpoint, t % other.mod in other.endpoint)
        )
        return SchemeAlignment(self.scheme, max(self.start, other.start), m,
                               interior, endpoint)

    def window_count(self, j: int, length: int) -> int:
        inside = j % self.mod in self.interior
        endpoint = j % self.mod in self.endpoint
        return (length - 1) * (1 if inside else 0) + (1 if endpoint else 0)


@dataclass
class GenTags:
    """Hand-derived structural facts about a named interval family.

    Every field is optional; ``None`` means "no certificate".  The analysis
    layer treats these as trusted closed forms (and the test suite re-verifies
    the checkable ones against exact evaluation).
    """

    # limsup_n |A cap [1,n]|/n, attained along right endpoints.
    limsup_value: Optional[object] = None
    # liminf along left endpoints (used for complements).
    liminf_value: Optional[object] = None
    # certified nonincreasing bound g with sup_{N >= n} count(N)/N <= g(n).
    lambda_sup: Optional[Callable[[int], object]] = None
    # 'converges' / 'diverges' for the harmonic series over the set.
    harmonic: Optional[str] = None
    # interval lengths r_m - l_m are unbounded.
    lengths_unbounded: Optional[bool] = None
    # every 2-adic fiber {n in A : v2(n) = k} is finite.
    fibers_all_finite: Optional[bool] = None
    # l_m / r_m -> 0 (intervals eventually dominate their own prefix).
    fat_intervals: Optional[bool] = None
    # r_m / l_{m+1} -> 0 (gaps eventually dominate).
    fat_gaps: Optional[bool] = None
    # exact window decomposition against a named block scheme.
    alignment: Optional[SchemeAlignment] = None


class IntervalGenerator:
    """Produces the m-th closed interval [l_m, r_m] (1-based), or None when the
    family is finite and exhausted."""

    name: Optional[str] = None
    finite = False
    tags = GenTags()

    def interval(self, m: int) -> Optional[tuple[int, int]]:
        raise NotImplementedError

    def left(self, m: int) -> Optional[int]:
        """Left endpoint of interval m, without forcing the right endpoint.

        Tower-style schemes can have right endpoints too large to construct
        while the left endpoint is still perfectly representable; callers use
        this to stop before materializing them.
        """
        iv = self.interval(m)
        return None if iv is None else iv[0]

    # Optional closed forms; override where available.
    def member_closed(self, n: int) -> Optional[bool]:
        return None

    def count_closed(self, n: int) -> Optional[int]:
        return None

    def to_json(self) -> dict:
        if self.name is None:
            raise ValidationError("anonymous generator has no JSON form")
        return {"kind": "intervals", "gen": self.name}


class ExplicitIntervals(IntervalGenerator):
    finite = True

    def __init__(self, endpoints: Sequence[Sequence[int]]):
        eps = [(int(l), int(r)) for l, r in endpoints]
        prev_r = 0
        for l, r in eps:
            if l < 1 or r < l:
                raise ValidationError(f"bad interval [{l}, {r}]")
            if l <= prev_r:
                raise ValidationError("intervals must be disjoint and increasing")
            prev_r = r
        self.endpoints = eps
        self.tags = GenTags(harmonic="converges", lengths_unbounded=False)

    def interval(self, m: int) -> Optional[tuple[int, int]]:
        return self.endpoints[m - 1] if m <= len(self.endpoints) else None

    def to_json(self) -> dict:
        return {"kind": "intervals", "endpoints": [[l, r] for l, r in self.endpoints]}


class CallableGen(IntervalGenerator):
    """Wraps a plain function; used for ad-hoc families and failure injection."""

    def __init__(self, fn: Callable[[int], Optional[tuple[int, int]]],
                 finite: bool = False, tags: Optional[GenTags] = None,
                 name: Optional[str] = None):
        self._fn = fn
        self.finite = finite
        self.tags = tags or GenTags()
        self.name = name

    def interval(self, m: int) -> Optional[tuple[int, int]]:
        return self._fn(m)


def _fact(n: int, _memo=[1]) -> int:
    while len(_memo) <= n:
        _memo.append(_memo[-1] * len(_memo))
    return _memo[n]


class FactorialRuns(IntervalGenerator):
    """[(2m)!, (2m+1)!] for m >= 1: runs whose gaps and lengths both dominate."""

    name = "factorial"

    def __init__(self):
        from fractions import Fraction

        self.tags = GenTags(
            limsup_value=Fraction(1),
            liminf_value=Fraction(0),
            harmonic="diverges",
            lengths_unbounded=True,
            fibers_all_finite=False,
            fat_intervals=True,
            fat_gaps=True,
            # window [j!, (j+1)!): interior covered iff j even; j! itself is
            # always a member from j = 2 on
            alignment=SchemeAlignment("factorial", 2, 2,
                                      frozenset({0}), frozenset({0, 1})),
        )

    def interval(self, m: int) -> tuple[int, int]:
        return (_fact(2 * m), _fact(2 * m + 1))


class SingletonPowers(IntervalGenerator):
    """{2^m : m >= 1} as a family of singletons."""

    name = "powers2"

    def __init__(self):
        from fractions import Fraction

        self.tags = GenTags(
            limsup_value=Fraction(0),
            liminf_value=Fraction(0),
            lambda_sup=lambda n: Fraction(max(n.bit_length() - 1, 1), n),
            harmonic="converges",
            lengths_unbounded=False,
            fibers_all_finite=True,
            fat_intervals=False,
            fat_gaps=False,
        )

    def interval(self, m: int) -> tuple[int, int]:
        p = 1 << m
        return (p, p)

    def member_closed(self, n: int) -> bool:
        return n >= 2 and n & (n - 1) == 0

    def count_closed(self, n: int) -> int:
        return max(n.bit_length() - 1, 0) if n >= 2 else 0


class SingletonSquares(IntervalGenerator):
    """{m^2 : m >= 1} as singletons; count is isqrt, density zero effectively."""

    name = "squares"

    def __init__(self):
        from fractions import Fraction

        self.tags = GenTags(
            limsup_value=Fraction(0),
            liminf_value=Fraction(0),
            lambda_sup=lambda n: Fraction(isqrt(n), n),
            harmonic="converges",
            lengths_unbounded=False,
            # odd squares form an infinite 2-adic fiber at level 0
            fibers_all_finite=False,
            fat_intervals=False,
            fat_gaps=False,
        )

    def interval(self, m: int) -> tuple[int, int]:
        return (m * m, m * m)

    def member_closed(self, n: int) -> bool:
        return isqrt(n) ** 2 == n

    def count_closed(self, n: int) -> int:
        return isqrt(n) if n >= 1 else 0


class FactorialDouble(IntervalGenerator):
    """[m!, 2 m!] for m >= 2: positive-density runs with divergent harmonic mass."""

    name = "factorial-double"

    def __init__(self):
        from fractions import Fraction

        self.tags = GenTags(
            limsup_value=Fraction(1, 2),
            liminf_value=Fraction(0),
            harmonic="diverges",
            lengths_unbounded=True,
            fibers_all_finite=False,
            fat_intervals=False,
            fat_gaps=True,
        )

    def interval(self, m: int) -> tuple[int, int]:
        f = _fact(m + 1)
        return (f, 2 * f)


class FactorialShort(IntervalGenerator):
    """[(m+1)!, (m+1)! + m + 1] for m >= 1: density zero, runs of unbounded length."""

    name = "factorial-short"

    def __init__(self):
        from fractions import Fraction

        def sup_bound(n: int) -> Fraction:
            # With M = max{j : (j+1)! <= n}, every position <= n lies at or
            # past the start of at most M intervals, of lengths 3, 4, ...,
            # M+2, so count(N) <= c(M) for N < (M+2)!.  The jump ratios
            # c(j)/(j+1)! are decreasing, hence the sup over N >= n is the
            # larger of the current ratio and the next jump's.
            M = 0
            while _fact(M + 2) <= n:
                M += 1
            c = M * (M + 1) // 2 + 2 * M
            here = Fraction(c, max(n, 1))
            nxt = Fraction(c + M + 3, _fact(M + 2))
            return max(here, nxt)

        self.tags = GenTags(
            limsup_value=Fraction(0),
            liminf_value=Fraction(0),
            lambda_sup=sup_bound,
            harmonic="converges",
            lengths_unbounded=True,
            fibers_all_finite=False,
            fat_intervals=False,
            fat_gaps=True,
        )

    def interval(self, m: int) -> tuple[int, int]:
        f = _fact(m + 1)
        return (f, f + m + 1)


class RatioFamily(IntervalGenerator):
    """l_{m+1} = gap * r_m with r_m = rho * l_m: self-similar fat runs.

    Closed forms: writing G = rho * gap, the prefix count at r_m is
    (rho - 1) * l_m * G / (G - 1) + m + O(1), so the running mean peaks at
    the right endpoints with exact limit (rho - 1) gap / (G - 1) and bottoms
    out at the left endpoints with limit (rho - 1) / (G - 1).
    """

    name = "ratio"

    def __init__(self, start: int = 2, rho: int = 2, gap: int = 2):
        if start < 1 or rho < 2 or gap < 2:
            raise ValidationError("need start >= 1, rho >= 2, gap >= 2")
        self.start, self.rho, self.gap = start, rho, gap
        from fractions import Fraction

        g = rho * gap
        self.tags = GenTags(
            limsup_value=Fraction((rho - 1) * gap, g - 1),
            liminf_value=Fraction(rho - 1, g - 1),
            harmonic="diverges",
            lengths_unbounded=True,
            fibers_all_finite=False,
            fat_intervals=False,
            fat_gaps=False,
        )

    def interval(self, m: int) -> tuple[int, int]:
        l = self.start * (self.rho * self.gap) ** (m - 1)
        return (l, self.rho * l)

    def to_json(self) -> dict:
        return {"kind": "intervals", "gen": "ratio", "start": self.start,
                "rho": self.rho, "gap": self.gap}


class SparseSingletons(IntervalGenerator):
    """Singletons start * gap^m: logarithmic counting, density zero."""

    name = "sparse"

    def __init__(self, start: int = 2, gap: int = 2):
        if start < 1 or gap < 2:
            raise ValidationError("need start >= 1 and gap >= 2")
        self.start, self.gap = start, gap
        from fractions import Fraction

        def count_upper(n: int, s=start, g=gap) -> int:
            c, v = 0, s
            while v <= n:
                c += 1
                v *= g
            return c

        self.tags = GenTags(
            limsup_value=Fraction(0),
            liminf_value=Fraction(0),
            lambda_sup=lambda n: Fraction(count_upper(n) + 1, n),
            harmonic="converges",
            lengths_unbounded=False,
            # even gaps push the 2-adic valuation up at every step, so all
            # fibers are singletons; odd gaps freeze it on one infinite fiber
            fibers_all_finite=(gap % 2 == 0),
            fat_intervals=False,
            fat_gaps=False,
        )

    def interval(self, m: int) -> tuple[int, int]:
        v = self.start * self.gap**m
        return (v, v)

    def to_json(self) -> dict:
        return {"kind": "intervals", "gen": "sparse", "start": self.start,
                "gap": self.gap}


_GENERATORS: dict[str, Callable[[], IntervalGenerator]] = {
    "factorial": FactorialRuns,
    "powers2": SingletonPowers,
    "squares": SingletonSquares,
    "factorial-double": FactorialDouble,
    "factorial-short": FactorialShort,
}


def make_generator(name: str, **params) -> IntervalGenerator:
    if name == "ratio":
        return RatioFamily(**params)
    if name == "sparse":
        return SparseSingletons(**params)
    try:
        return _GENERATORS[name]()
    except KeyError:
        raise ValidationError(f"unknown interval generator {name!r}") from None


# ---------------------------------------------------------------------------
# Symbolic sets
# ---------------------------------------------------------------------------


class SymbolicSet:
    """Immutable description of a subset of N with exact queries."""

    kind: str = "?"

    def contains(self, n: int) -> bool:
        raise NotImplementedError

    def count(self, n: int) -> int:
        raise NotImplementedError

    def periodic_profile(self) -> Optional[PeriodicProfile]:
        return None

    def to_json(self) -> dict:
        raise NotImplementedError

    def __contains__(self, n: int) -> bool:
        return self.contains(n)

    def __repr__(self) -> str:
        return f"<{type(self).__name__} {self.to_json()!r}>"


class FiniteSet(SymbolicSet):
    kind = "finite"

    def __init__(self, elems: Sequence[int] = ()):
        es = sorted(set(int(e) for e in elems))
        if es and es[0] < 1:
            raise ValidationError("elements must be positive integers")
        self.elems: tuple[int, ...] = tuple(es)

    def contains(self, n: int) -> bool:
        i = bisect_right(self.elems, n)
        return i > 0 and self.elems[i - 1] == n

    def count(self, n: int) -> int:
        return bisect_right(self.elems, n)

    def periodic_profile(self) -> PeriodicProfile:
        start = (self.elems[-1] + 1) if self.elems else 1
        return PeriodicProfile(start, PeriodicPattern(1, (0,)))

    def to_json(self) -> dict:
        return {"kind": "finite", "elems": list(self.elems)}


EMPTY = FiniteSet(())


class Residue(SymbolicSet):
    """{n >= 1 : n = r (mod q)} with q >= 1, 0 <= r < q."""

    kind = "residue"

    def __init__(self, modulus: int, residue: int):
        if modulus < 1 or not (0 <= residue < modulus):
            raise ValidationError("need modulus q >= 1 and residue in [0, q)")
        self.modulus = modulus
        self.residue = residue

    def contains(self, n: int) -> bool:
        return n >= 1 and n % self.modulus == self.residue

    def count(self, n: int) -> int:
        if n < 1:
            return 0
        q, r = self.modulus, self.residue
        if r == 0:
            return n // q
        return 0 if n < r else (n - r) // q + 1

    def periodic_profile(self) -> PeriodicProfile:
        bits = tuple(1 if t == self.residue else 0 for t in range(self.modulus))
        return PeriodicProfile(1, PeriodicPattern(self.modulus, bits))

    def to_json(self) -> dict:
        return {"kind": "residue", "mod": self.modulus, "res": self.residue}


class TwoAdicFiber(SymbolicSet):
    """{n : v2(n) = k}, i.e. n = 2^k * odd; equals the class 2^k mod 2^(k+1)."""

    kind = "fiber2"

    def __init__(self, k: int):
        if k < 0:
            raise ValidationError("fiber level must be >= 0")
        self.k = k

    def contains(self, n: int) -> bool:
        if n < 1:
            return False
        return n % (1 << self.k) == 0 and (n >> self.k) & 1 == 1

    def count(self, n: int) -> int:
        if n < 1:
            return 0
        return (n // (1 << self.k) + 1) // 2

    def periodic_profile(self) -> Optional[PeriodicProfile]:
        if self.k > 20:
            return None
        q = 1 << (self.k + 1)
        bits = tuple(1 if t == (1 << self.k) else 0 for t in range(q))
        return PeriodicProfile(1, PeriodicPattern(q, bits))

    def to_json(self) -> dict:
        return {"kind": "fiber2", "k": self.k}


class IntervalFamily(SymbolicSet):
    """Union of disjoint closed integer intervals [l_m, r_m], l_1 <= r_1 < l_2 <= ...

    The generator is consulted lazily and its output memoized; emitted
    intervals are validated for monotone disjointness on the way in.
    """

    kind = "intervals"

    def __init__(self, gen: IntervalGenerator):
        self.gen = gen
        self._memo: list[tuple[int, int]] = []
        self._lensum: list[int] = []  # prefix sums of interval lengths
        self._done = False
        self._lock = threading.Lock()

    # -- memo management ----------------------------------------------------

    def _emit(self) -> bool:
        _charge_emission()
        m = len(self._memo) + 1
        iv = self.gen.interval(m)
        if iv is None:
            if self.gen.finite:
                self._done = True
                return False
            raise GeneratorExhausted(
                f"generator {self.gen.name or self.gen!r} exhausted at index {m}"
            )
        l, r = iv
        if l < 1 or r < l:
            raise ValidationError(f"generator produced bad interval [{l}, {r}]")
        if self._memo and l <= self._memo[-1][1]:
            raise ValidationError("generator intervals must be increasing and disjoint")
        self._memo.append((l, r))
        self._lensum.append((self._lensum[-1] if self._lensum else 0) + (r - l + 1))
        return True

    def _peek_left(self) -> Optional[int]:
        """Left endpoint of the next unmaterialized interval, or None at the end."""
        m = len(self._memo) + 1
        l = self.gen.left(m)
        if l is None:
            if self.gen.finite:
                self._done = True
                return None
            raise GeneratorExhausted(
                f"generator {self.gen.name or self.gen!r} exhausted at index {m}"
            )
        return l

    def ensure_value(self, n: int) -> None:
        """Extend the memo until an interval starts beyond n (or the family ends)."""
        with self._lock:
            while not self._done and (not self._memo or self._memo[-1][0] <= n):
                l = self._peek_left()
                if l is None or l > n:
                    break
                if not self._emit():
                    break

    def ensure_index(self, m: int) -> None:
        with self._lock:
            while not self._done and len(self._memo) < m:
                if not self._emit():
                    break

    def left_at(self, m: int) -> Optional[int]:
        """Left endpoint of interval m without materializing its right end."""
        self.ensure_index(m - 1)
        if m <= len(self._memo):
            return self._memo[m - 1][0]
        if self._done:
            return None
        with self._lock:
            return self._peek_left()

    def intervals_upto(self, n: int) -> list[tuple[int, int]]:
        """All memoized intervals with l <= n (complete for values <= n)."""
        self.ensure_value(n)
        i = bisect_right(self._memo, (n, float("inf")))
        return self._memo[:i]

    def interval_at(self, m: int) -> Optional[tuple[int, int]]:
        self.ensure_index(m)
        return self._memo[m - 1] if m <= len(self._memo) else None

    # -- queries ------------------------------------------------------------

    def contains(self, n: int) -> bool:
        if n < 1:
            return False
        closed = self.gen.member_closed(n)
        if closed is not None:
            return closed
        self.ensure_value(n)
        i = bisect_right(self._memo, (n, float("inf")))
        return i > 0 and self._memo[i - 1][1] >= n

    def count(self, n: int) -> int:
        if n < 1:
            return 0
        closed = self.gen.count_closed(n)
        if closed is not None:
            return closed
        self.ensure_value(n)
        i = bisect_right(self._memo, (n, float("inf")))
        if i == 0:
            return 0
        c = self._lensum[i - 1]
        l, r = self._memo[i - 1]
        if r > n:
            c -= r - n
        return c

    def periodic_profile(self) -> Optional[PeriodicProfile]:
        if not self.gen.finite:
            return None
        self.ensure_index(1 << 30)  # finite families terminate
        start = (self._memo[-1][1] + 1) if self._memo else 1
        return PeriodicProfile(start, PeriodicPattern(1, (0,)))

    def to_json(self) -> dict:
        return self.gen.to_json()


class Complement(SymbolicSet):
    kind = "complement"

    def __init__(self, child: SymbolicSet):
        self.child = child

    def contains(self, n: int) -> bool:
        return n >= 1 and not self.child.contains(n)

    def count(self, n: int) -> int:
        return max(n, 0) - self.child.count(n)

    def periodic_profile(self) -> Optional[PeriodicProfile]:
        p = self.child.periodic_profile()
        if p is None:
            return None
        return PeriodicProfile(p.start, p.pattern.negate())

    def to_json(self) -> dict:
        return {"kind": "complement", "of": self.child.to_json()}


FULL = Complement(EMPTY)


class Union(SymbolicSet):
    kind = "union"

    def __init__(self, children: Sequence[SymbolicSet]):
        if not children:
            raise ValidationError("union needs at least one child")
        self.children = tuple(children)

    def contains(self, n: int) -> bool:
        return any(c.contains(n) for c in self.children)

    def count(self, n: int) -> int:
        # fold with inclusion-exclusion: |A u B| = |A| + |B| - |A n B|
        total = self.children[0].count(n)
        for i, c in enumerate(self.children[1:], start=1):
            prefix: SymbolicSet = (
                self.children[0] if i == 1 else Union(self.children[:i])
            )
            total += c.count(n) - _intersection_count([prefix, c], n)
        return total

    def periodic_profile(self) -> Optional[PeriodicProfile]:
        return _combine_profiles(self.children, "union")

    def to_json(self) -> dict:
        return {"kind": "union", "of": [c.to_json() for c in self.children]}


class Intersection(SymbolicSet):
    kind = "intersection"

    def __init__(self, children: Sequence[SymbolicSet]):
        if not children:
            raise ValidationError("intersection needs at least one child")
        self.children = tuple(children)

    def contains(self, n: int) -> bool:
        return n >= 1 and all(c.contains(n) for c in self.children)

    def count(self, n: int) -> int:
        return _intersection_count(list(self.children), n)

    def periodic_profile(self) -> Optional[PeriodicProfile]:
        return _combine_profiles(self.children, "intersection")

    def to_json(self) -> dict:
        return {"kind": "intersection", "of": [c.to_json() for c in self.children]}


def _combine_profiles(children: Sequence[SymbolicSet], op: str) -> Optional[PeriodicProfile]:
    profs = [c.periodic_profile() for c in children]
    if any(p is None for p in profs):
        return None
    pat = profs[0].pattern
    start = profs[0].start
    try:
        for p in profs[1:]:
            pat = pat.combine(p.pattern, op)
            start = max(start, p.start)
    except ValidationError:
        return None
    return PeriodicProfile(start, pat)


def union(*children: SymbolicSet) -> SymbolicSet:
    return Union(children) if len(children) != 1 else children[0]


def intersection(*children: SymbolicSet) -> SymbolicSet:
    return Intersection(children) if len(children) != 1 else children[0]


def complement(a: SymbolicSet) -> SymbolicSet:
    return Complement(a)


# ---------------------------------------------------------------------------
# Exact counting of intersections
# ---------------------------------------------------------------------------

# |A_1 n ... n A_k n [1, n]| by structure: finite members filter, residue-like
# members merge through the CRT, interval families split the range, and
# complements/unions are unfolded by inclusion-exclusion.  Terminates because
# every rewrite strictly reduces the number of union/complement nodes or the
# number of remaining sets.


def _crt_merge(pairs: list[tuple[int, int]]) -> Optional[tuple[int, int]]:
    """Combine residue classes (q, r); None when the intersection is empty."""
    q0, r0 = 1, 0
    for q1, r1 in pairs:
        g = gcd(q0, q1)
        if (r1 - r0) % g != 0:
            return None
        lcm = q0 // g * q1
        # shift r0 by multiples of q0 to satisfy the new congruence
        step = q0
        t = ((r1 - r0) // g * pow(q0 // g, -1, q1 // g)) % (q1 // g)
        r0 = (r0 + step * t) % lcm
        q0 = lcm
    return q0, r0


def _as_residue(a: SymbolicSet) -> Optional[tuple[int, int]]:
    if isinstance(a, Residue):
        return (a.modulus, a.residue)
    if isinstance(a, TwoAdicFiber):
        return (1 << (a.k + 1), 1 << a.k)
    return None


def _residue_upto(q: int, r: int, n: int) -> int:
    if n < 1:
        return 0
    if r == 0:
        return n // q
    return 0 if n < r else (n - r) // q + 1


def _residue_count(q: int, r: int, lo: int, hi: int) -> int:
    """|{n in [lo, hi] : n = r (mod q), n >= 1}|."""
    if hi < lo:
        return 0
    return _residue_upto(q, r, hi) - _residue_upto(q, r, max(lo, 1) - 1)


def _intersection_count(items: list[SymbolicSet], n: int) -> int:
    if n < 1:
        return 0
    flat: list[SymbolicSet] = []
    stack = list(items)
    while stack:
        x = stack.pop()
        if isinstance(x, Intersection):
            stack.extend(x.children)
        else:
            flat.append(x)

    finites = [x for x in flat if isinstance(x, FiniteSet)]
    if finites:
        small = min(finites, key=lambda f: len(f.elems))
        rest = [x for x in flat if x is not small]
        return sum(
            1 for e in small.elems if e <= n and all(r.contains(e) for r in rest)
        )

    for i, x in enumerate(flat):
        if isinstance(x, Complement):
            rest = flat[:i] + flat[i + 1 :]
            with_child = rest + [x.child]
            base = _intersection_count(rest, n) if rest else n
            return base - _intersection_count(with_child, n)

    for i, x in enumerate(flat):
        if isinstance(x, Union):
            rest = flat[:i] + flat[i + 1 :]
            kids = x.children
            total = 0
            for mask in range(1, 1 << len(kids)):
                chosen = [kids[j] for j in range(len(kids)) if mask >> j & 1]
                sign = -1 if bin(mask).count("1") % 2 == 0 else 1
                total += sign * _intersection_count(rest + chosen, n)
            return total

    residue_pairs = [_as_residue(x) for x in flat if _as_residue(x) is not None]
    families = [x for x in flat if isinstance(x, IntervalFamily)]
    if len(residue_pairs) + len(families) != len(flat):
        raise SetError("unsupported set variant in intersection")

    merged = _crt_merge(residue_pairs) if residue_pairs else (1, 0)
    if merged is None:
        return 0
    q, r = merged

    if not families:
        return _residue_count(q, r, 1, n)

    fam = families[0]
    rest = families[1:]
    total = 0
    for l, rr in fam.intervals_upto(n):
        hi = min(rr, n)
        if rest:
            sub = rest + [Residue(q, r)] if (q, r) != (1, 0) else list(rest)
            total += _intersection_count(sub, hi) - _intersection_count(sub, l - 1)
        else:
            total += _residue_count(q, r, l, hi)
    return total


# ---------------------------------------------------------------------------
# Block schemes
# ---------------------------------------------------------------------------


class BlockScheme:
    """Strictly increasing cut points a_1 < a_2 < ... with a_0 := 0.

    Block n is N intersect (a_{n-1}, a_n].  Named schemes ("factorial",
    "tower") are infinite and certified to satisfy a_n / a_{n+1} -> 0;
    explicit schemes are finite lists validated for monotonicity.
    """

    def __init__(self, name: Optional[str] = None,
                 explicit: Optional[Sequence[int]] = None):
        self._lock = threading.Lock()
        if name is not None:
            if name not in ("factorial", "tower"):
                raise ValidationError(f"unknown block scheme {name!r}")
            self.name = name
            self.explicit = None
            self._memo = [0, 1] if name == "tower" else [0, 1]
            self.ratio_to_zero = True
            self.finite = False
        else:
            vals = [int(v) for v in (explicit or [])]
            if not vals:
                raise ValidationError("explicit scheme needs at least one cut point")
            prev = 0
            for v in vals:
                if v <= prev:
                    raise ValidationError("cut points must be strictly increasing")
                prev = v
            self.name = None
            self.explicit = tuple(vals)
            self._memo = [0] + vals
            self.ratio_to_zero = None
            self.finite = True

    def a(self, n: int) -> int:
        if n < 0:
            raise ValidationError("block index must be >= 0")
        if self.finite:
            if n >= len(self._memo):
                raise ValidationError("explicit scheme exhausted")
            return self._memo[n]
        with self._lock:
            while len(self._memo) <= n:
                k = len(self._memo)
                if self.name == "factorial":
                    self._memo.append(self._memo[-1] * k if k > 1 else 1)
                else:  # tower
                    if self._memo[-1] > 1 << 24:
                        raise CostLimit(
                            "tower cut point too large to materialize"
                        )
                    self._memo.append(2 ** self._memo[-1])
        return self._memo[n]

    def block(self, n: int) -> tuple[int, int]:
        if n < 1:
            raise ValidationError("blocks are indexed from 1")
        return (self.a(n - 1) + 1, self.a(n))

    def next_bits(self, n: int) -> int:
        """Upper estimate for a(n+1).bit_length() without materializing it.

        Lets callers stop before tower-style schemes produce numbers too
        large to construct at all.
        """
        if self.finite:
            if n + 1 >= len(self._memo):
                return 0
            return self._memo[n + 1].bit_length()
        an = self.a(n)
        if self.name == "factorial":
            return an.bit_length() + (n + 1).bit_length() + 1
        # tower: a(n+1) = 2^a(n) has exactly a(n) + 1 bits
        if an.bit_length() > 62:
            return 1 << 62
        return an + 1

    def max_index(self) -> Optional[int]:
        return len(self._memo) - 1 if self.finite else None

    def index_of(self, x: int) -> int:
        """Block index containing x >= 1."""
        if x < 1:
            raise ValidationError("positions start at 1")
        n = 1
        while self.a(n) < x:
            n += 1
        return n

    def to_json(self) -> dict:
        if self.name:
            return {"scheme": self.name}
        return {"scheme": list(self.explicit)}


def make_block_scheme(spec) -> BlockScheme:
    """Named scheme ("factorial" / "tower") or an explicit increasing list."""
    if isinstance(spec, str):
        return BlockScheme(name=spec)
    return BlockScheme(explicit=list(spec))


class BlockUnionGen(IntervalGenerator):
    """Union of the scheme blocks whose index is = one of ``residues`` mod m,
    with runs of adjacent selected blocks merged into single intervals."""

    def __init__(self, scheme: BlockScheme, mod: int, residues: Sequence[int]):
        if mod < 1:
            raise ValidationError("selector modulus must be >= 1")
        rs = sorted(set(r % mod for r in residues))
        if not rs:
            raise ValidationError("selector needs at least one residue")
        if len(rs) == mod:
            raise ValidationError("selector covering every block is not lacunary")
        self.scheme = scheme
        self.mod = mod
        self.residues = tuple(rs)
        self.finite = scheme.finite
        from fractions import Fraction

        if scheme.ratio_to_zero:
            align = None
            if scheme.name is not None:
                # window interior (a_j, a_{j+1} - 1] sits in block j+1; the
                # endpoint a_j sits in block j
                align = SchemeAlignment(
                    scheme.name, 1, mod,
                    frozenset((r - 1) % mod for r in self.residues),
                    frozenset(self.residues),
                )
            self.tags = GenTags(
                limsup_value=Fraction(1),
                liminf_value=Fraction(0),
                harmonic="diverges",
                lengths_unbounded=True,
                fibers_all_finite=False,
                fat_intervals=True,
                fat_gaps=True,
                alignment=align,
            )

    def _selected(self, j: int) -> bool:
        return j % self.mod in self.residues

    def _run(self, m: int) -> Optional[tuple[int, int]]:
        """Block-index range (start, end) of the m-th selected run."""
        run = 0
        j = 1
        limit = self.scheme.max_index()
        while True:
            if limit is not None and j > limit:
                return None
            if self._selected(j):
                start = j
                while (limit is None or j + 1 <= limit) and self._selected(j + 1):
                    j += 1
                run += 1
                if run == m:
                    return (start, j)
            j += 1

    def interval(self, m: int) -> Optional[tuple[int, int]]:
        r = self._run(m)
        if r is None:
            return None
        start, end = r
        return (self.scheme.a(start - 1) + 1, self.scheme.a(end))

    def left(self, m: int) -> Optional[int]:
        r = self._run(m)
        if r is None:
            return None
        return self.scheme.a(r[0] - 1) + 1

    def to_json(self) -> dict:
        return {
            "kind": "block-union",
            **self.scheme.to_json(),
            "mod": self.mod,
            "residues": list(self.residues),
        }


def block_union(scheme: BlockScheme, mod: int, residues: Sequence[int]) -> IntervalFamily:
    return IntervalFamily(BlockUnionGen(scheme, mod, residues))


def factorial_runs_set() -> IntervalFamily:
    return IntervalFamily(FactorialRuns())


def named_family(name: str) -> IntervalFamily:
    return IntervalFamily(make_generator(name))


def explicit_family(endpoints: Sequence[Sequence[int]]) -> IntervalFamily:
    return IntervalFamily(ExplicitIntervals(endpoints))
