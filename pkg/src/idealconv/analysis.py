"""Certified asymptotic facts about symbolic sets.

The membership oracles and level-set machinery rarely need the raw elements of
a set; they need *certified statements*: "this set is finite", "its upper
density is exactly 1/2", "its harmonic series diverges", "it contains
arbitrarily long runs".  This module derives such statements structurally:

* eventually-periodic sets (residues, fibers, finite sets and their Boolean
  combinations) admit exact closed forms;
* interval families carry hand-derived generator tags, which the test suite
  re-validates against exact evaluation;
* Boolean combinations propagate facts by sound rules only.  Anything not
  derivable stays ``None`` and downstream verdicts degrade to Undecided.

A second export, :func:`stretch_stream`, decomposes any supported set into
maximal stretches on which membership is exactly periodic.  This is what makes
threshold crossings of running means solvable in closed form instead of by
scanning.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterator, Optional

from .sets import (
    EMPTY,
    FULL,
    Complement,
    Intersection,
    IntervalFamily,
    PeriodicPattern,
    SymbolicSet,
    Union,
)

ZERO = Fraction(0)
ONE = Fraction(1)


@dataclass
class SetFacts:
    """Certified structural facts; ``None`` always means "not certified"."""

    finite: Optional[bool] = None
    cofinite: Optional[bool] = None
    dstar_zero: Optional[bool] = None       # upper density certified to be 0
    dstar_low: Optional[Fraction] = None    # certified lower bound on the limsup
    dstar_exact: Optional[Fraction] = None  # exact upper density
    harmonic: Optional[str] = None          # 'converges' | 'diverges'
    runs_unbounded: Optional[bool] = None   # contains arbitrarily long runs
    fibers_all_finite: Optional[bool] = None


@dataclass(frozen=True)
class DensityWitness:
    """Subsequence along which the running mean is certified to stay high.

    ``point(t)`` yields a strictly increasing sequence n_t; the values
    lambda_{n_t}(A) are evaluated exactly by the consumer, and ``limit``
    asserts (from structural closed forms) that their liminf is >= limit.
    """

    point: Callable[[int], int]
    limit: Fraction
    note: str = ""


def set_facts(a: SymbolicSet) -> SetFacts:
    f = _facts_raw(a)
    # sound general implications
    if f.finite:
        f.dstar_zero = True
        f.dstar_exact = ZERO
        f.harmonic = "converges"
        f.runs_unbounded = False
        f.fibers_all_finite = True
        f.cofinite = False if f.cofinite is None else f.cofinite
    if f.cofinite:
        f.finite = False
        f.dstar_exact = ONE
        f.dstar_low = ONE
        f.dstar_zero = False
        f.harmonic = "diverges"
        f.runs_unbounded = True
        f.fibers_all_finite = False
    if f.dstar_zero:
        f.dstar_exact = ZERO if f.dstar_exact is None else f.dstar_exact
    if f.dstar_exact is not None and f.dstar_exact > 0 and f.dstar_low is None:
        f.dstar_low = f.dstar_exact
    if f.dstar_low is not None and f.dstar_low > 0:
        # a set with positive upper density is infinite, has divergent
        # harmonic series, and cannot have all 2-adic fibers finite
        f.finite = False
        f.dstar_zero = False
        f.harmonic = "diverges" if f.harmonic is None else f.harmonic
        if f.fibers_all_finite is None:
            f.fibers_all_finite = False
    if f.runs_unbounded:
        # arbitrarily long runs meet every 2-adic fiber infinitely often
        f.finite = False
        if f.fibers_all_finite is None:
            f.fibers_all_finite = False
    return f


def _facts_raw(a: SymbolicSet) -> SetFacts:
    prof = a.periodic_profile()
    if prof is not None:
        q = prof.pattern.period
        p = prof.pattern.per_period
        if p == 0:
            return SetFacts(finite=True)
        if p == q:
            return SetFacts(cofinite=True)
        return SetFacts(
            finite=False,
            cofinite=False,
            dstar_zero=False,
            dstar_exact=Fraction(p, q),
            dstar_low=Fraction(p, q),
            harmonic="diverges",
            runs_unbounded=False,
            fibers_all_finite=False,
        )

    if isinstance(a, IntervalFamily):
        t = a.gen.tags
        f = SetFacts(finite=False)  # infinite families only (finite ones have profiles)
        if t.limsup_value is not None:
            f.dstar_exact = Fraction(t.limsup_value)
            f.dstar_zero = t.limsup_value == 0
            if t.limsup_value > 0:
                f.dstar_low = Fraction(t.limsup_value)
        f.harmonic = t.harmonic
        f.runs_unbounded = t.lengths_unbounded
        f.fibers_all_finite = t.fibers_all_finite
        return f

    if isinstance(a, Complement):
        cf = set_facts(a.child)
        f = SetFacts(finite=cf.cofinite, cofinite=cf.finite)
        if cf.dstar_zero:
            # the complement of a density-zero set: density one, long runs
            f.dstar_exact = ONE
            f.dstar_low = ONE
            f.dstar_zero = False
            f.harmonic = "diverges"
            f.runs_unbounded = True
            f.fibers_all_finite = False
        if isinstance(a.child, IntervalFamily):
            lv = a.child.gen.tags.liminf_value
            if lv is not None:
                f.dstar_exact = ONE - Fraction(lv)
                if f.dstar_exact > 0:
                    f.dstar_low = f.dstar_exact
                    f.dstar_zero = False
                else:
                    f.dstar_zero = True
            if a.child.gen.tags.fat_gaps:
                f.runs_unbounded = True
        return f

    if isinstance(a, Union):
        fs = [set_facts(c) for c in a.children]
        f = SetFacts()
        if all(x.finite for x in fs):
            f.finite = True
        elif any(x.finite is False for x in fs):
            f.finite = False
        if any(x.cofinite for x in fs):
            f.cofinite = True
        if all(x.dstar_zero for x in fs):
            f.dstar_zero = True
        lows = [x.dstar_low for x in fs if x.dstar_low is not None]
        if lows:
            f.dstar_low = max(lows)
        exacts = [x.dstar_exact for x in fs]
        if all(e is not None for e in exacts):
            nonzero = [e for e in exacts if e > 0]
            if len(nonzero) <= 1:
                f.dstar_exact = nonzero[0] if nonzero else ZERO
        if any(x.harmonic == "diverges" for x in fs):
            f.harmonic = "diverges"
        elif all(x.harmonic == "converges" for x in fs):
            f.harmonic = "converges"
        if any(x.runs_unbounded for x in fs):
            f.runs_unbounded = True
        if all(x.fibers_all_finite for x in fs):
            f.fibers_all_finite = True
        elif any(x.fibers_all_finite is False for x in fs):
            f.fibers_all_finite = False
        return f

    if isinstance(a, Intersection):
        fs = [set_facts(c) for c in a.children]
        f = SetFacts()
        if any(x.finite for x in fs):
            f.finite = True
        if all(x.cofinite for x in fs):
            f.cofinite = True
        if any(x.dstar_zero for x in fs):
            f.dstar_zero = True
        if any(x.harmonic == "converges" for x in fs):
            f.harmonic = "converges"
        if any(x.fibers_all_finite for x in fs):
            f.fibers_all_finite = True
        w = dstar_witness(a)
        if w is not None and w.limit > 0:
            f.dstar_low = w.limit
        return f

    return SetFacts()


# ---------------------------------------------------------------------------
# Density witnesses
# ---------------------------------------------------------------------------


def dstar_witness(a: SymbolicSet) -> Optional[DensityWitness]:
    """A certified subsequence witnessing limsup lambda_n(a) >= limit."""
    prof = a.periodic_profile()
    if prof is not None:
        p, q = prof.pattern.per_period, prof.pattern.period
        if p == 0:
            return None
        start = prof.start

        def point(t: int, _s=start, _q=q) -> int:
            return (_s + t * _q) * (t + 1)  # any sequence tending to infinity

        return DensityWitness(point, Fraction(p, q), "eventually periodic")

    if isinstance(a, IntervalFamily):
        t = a.gen.tags
        if t.limsup_value is not None and t.limsup_value > 0:
            def point(m: int) -> int:
                iv = a.interval_at(m)
                if iv is None:
                    raise StopIteration
                return iv[1]

            return DensityWitness(point, Fraction(t.limsup_value), "right endpoints")
        return None

    if isinstance(a, Complement):
        child = a.child
        cf = set_facts(child)
        if cf.dstar_zero or cf.finite:
            def point(t: int) -> int:
                return 1 << (t + 3)

            return DensityWitness(point, ONE, "complement of density zero")
        if isinstance(child, IntervalFamily):
            lv = child.gen.tags.liminf_value
            if lv is not None and lv < 1:
                def point(m: int) -> int:
                    iv = child.interval_at(m)
                    if iv is None:
                        raise StopIteration
                    return iv[0]

                return DensityWitness(point, ONE - Fraction(lv), "left endpoints")
        return None

    if isinstance(a, Union):
        best = None
        for c in a.children:
            w = dstar_witness(c)
            if w is not None and (best is None or w.limit > best.limit):
                best = w
        if best is not None:
            return DensityWitness(best.point, best.limit, "via union member")
        return None

    if isinstance(a, Intersection):
        # a fat interval family meets a periodic set with the periodic density
        fams = [c for c in a.children if isinstance(c, IntervalFamily)]
        others = [c for c in a.children if not isinstance(c, IntervalFamily)]
        if len(fams) == 1 and others:
            fam = fams[0]
            t = fam.gen.tags
            profs = [o.periodic_profile() for o in others]
            if (
                t.fat_intervals
                and t.limsup_value == 1
                and all(p is not None for p in profs)
            ):
                pat = profs[0].pattern
                try:
                    for p in profs[1:]:
                        pat = pat.combine(p.pattern, "intersection")
                except Exception:
                    return None
                dens = Fraction(pat.per_period, pat.period)
                if dens == 0:
                    return None

                def point(m: int) -> int:
                    iv = fam.interval_at(m)
                    if iv is None:
                        raise StopIteration
                    return iv[1]

                return DensityWitness(point, dens, "fat intervals meet periodic part")
        return None

    return None


def lambda_sup_bound(a: SymbolicSet, n: int) -> Optional[Fraction]:
    """Certified bound on sup_{N >= n} |a cap [1, N]| / N, or None."""
    if n < 1:
        n = 1
    prof = a.periodic_profile()
    if prof is not None:
        q = prof.pattern.period
        p = prof.pattern.per_period
        start = prof.start
        if n < start:
            if start - n > 200_000:
                return None
            best = max(
                (Fraction(a.count(m), m) for m in range(n, start + 1)),
                default=ZERO,
            )
            tail = lambda_sup_bound(a, start)
            return max(best, tail) if tail is not None else None
        if p == 0:
            return Fraction(a.count(n - 1) + 0, n) if n > 1 else Fraction(a.count(1), 1)
        # count(N) <= count(start-1) + p*(N-start+1)/q + p for N >= start
        c0 = a.count(start - 1)
        k = c0 + p + Fraction(p * (1 - start), q)
        if k >= 0:
            return Fraction(p, q) + k / n
        return Fraction(p, q)

    if isinstance(a, IntervalFamily):
        hook = a.gen.tags.lambda_sup
        if hook is not None:
            return Fraction(hook(n))
        return None

    if isinstance(a, Union):
        parts = [lambda_sup_bound(c, n) for c in a.children]
        if any(p is None for p in parts):
            return None
        return sum(parts, ZERO)

    if isinstance(a, Intersection):
        parts = [lambda_sup_bound(c, n) for c in a.children]
        parts = [p for p in parts if p is not None]
        return min(parts) if parts else None

    return None


# ---------------------------------------------------------------------------
# Stretch decomposition
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Stretch:
    """[start, end] (end None = unbounded) on which membership is periodic.

    ``pattern is None`` marks an opaque stretch: membership must be evaluated
    pointwise there.
    """

    start: int
    end: Optional[int]
    pattern: Optional[PeriodicPattern]


def _family_leaves(a: SymbolicSet, out: list[IntervalFamily]) -> None:
    if isinstance(a, IntervalFamily):
        if all(l is not a for l in out):
            out.append(a)
    elif isinstance(a, Complement):
        _family_leaves(a.child, out)
    elif isinstance(a, (Union, Intersection)):
        for c in a.children:
            _family_leaves(c, out)


def _substitute(a: SymbolicSet, assign: dict[int, bool]) -> SymbolicSet:
    if isinstance(a, IntervalFamily):
        return FULL if assign[id(a)] else EMPTY
    if isinstance(a, Complement):
        return Complement(_substitute(a.child, assign))
    if isinstance(a, Union):
        return Union([_substitute(c, assign) for c in a.children])
    if isinstance(a, Intersection):
        return Intersection([_substitute(c, assign) for c in a.children])
    return a


class _LeafCursor:
    """Tracks one interval family's enter/exit events in increasing order.

    Only peeks at left endpoints until a run is actually entered, so right
    endpoints too large to construct are never touched for runs beyond the
    walked range.
    """

    def __init__(self, fam: IntervalFamily):
        self.fam = fam
        self.idx = 1
        self.inside = False
        self.nxt: Optional[int] = fam.left_at(1)
        self._cur: Optional[tuple[int, int]] = None

    def advance_to(self, pos: int) -> None:
        # pos is the event position just reached
        while self.nxt is not None and self.nxt == pos:
            if not self.inside:
                self._cur = self.fam.interval_at(self.idx)
                self.inside = True
                self.nxt = self._cur[1] + 1
            else:
                self.inside = False
                self.idx += 1
                self.nxt = self.fam.left_at(self.idx)


def stretch_stream(a: SymbolicSet, opaque_cap: int = 200_000) -> Optional[Iterator[Stretch]]:
    """Decompose ``a`` into maximal periodic stretches, or None if unsupported.

    Between consecutive boundary events of the interval-family leaves, every
    leaf is constantly full or empty, so the whole combination reduces to an
    eventually-periodic set; its pattern describes the stretch from the later
    of the event position and the reduced profile's own start.  Earlier
    positions are emitted as short opaque stretches.
    """
    leaves: list[IntervalFamily] = []
    _family_leaves(a, leaves)

    def gen() -> Iterator[Stretch]:
        cursors = [_LeafCursor(f) for f in leaves]
        profile_cache: dict[tuple, Optional[PeriodicProfile]] = {}
        pos = 1
        while True:
            events = [c.nxt for c in cursors if c.nxt is not None]
            nxt = min(events) if events else None
            end = None if nxt is None else nxt - 1
            if end is None or end >= pos:
                key = tuple(c.inside for c in cursors)
                if key in profile_cache:
                    prof = profile_cache[key]
                else:
                    assign = {id(c.fam): c.inside for c in cursors}
                    prof = _substitute(a, assign).periodic_profile()
                    profile_cache[key] = prof
                if prof is None:
                    yield Stretch(pos, end, None)
                elif prof.start <= pos:
                    yield Stretch(pos, end, prof.pattern)
                else:
                    split = prof.start - 1 if end is None else min(end, prof.start - 1)
                    if split - pos > opaque_cap:
                        yield Stretch(pos, end, None)
                    else:
                        yield Stretch(pos, split, None)
                        if end is None or split < end:
                            yield Stretch(split + 1, end, prof.pattern)
            if nxt is None:
                return
            for c in cursors:
                c.advance_to(nxt)
            pos = nxt

    return gen()
