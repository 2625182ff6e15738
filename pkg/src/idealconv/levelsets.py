"""Exact level sets of running means: {n : |A ∩ [1,n]| / n >= delta}.

Between consecutive membership events of A the running mean is either c/n
(falling) or (c + (n - n0))/n (rising toward 1), so threshold crossings are
integer-division problems, not scans.  More generally, on a stretch where
membership is periodic with period q, the integer comparison

    g(n) = s * count(n) - p * n        (delta = p/s)

moves by the constant s*P - p*q per period along each residue phase, so the
level set inside the stretch is a union of at most q phase-restricted windows
with exactly computable endpoints.  This is what lets the engine work at
horizons around 10^8 endpoints without enumerating anything.

A solve returns a :class:`LevelSet`: a list of disjoint :class:`Piece`s (solid
intervals or phase windows) plus a tail status.  ``exact`` tails describe the
entire level set symbolically.  For lazy interval families the tail may
instead be ``certified``: the facts carried by the level set are then derived
from a verified high-mean subsequence through the sliding-window argument
(means move by at most 1/n per step, so a mean >= delta' at n stays >= delta
on all of [n, (1 + delta' - delta) n]).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .analysis import (
    SetFacts,
    dstar_witness,
    lambda_sup_bound,
    set_facts,
    stretch_stream,
)
from .sets import (
    EMPTY,
    FULL,
    Complement,
    CostLimit,
    GeneratorExhausted,
    Intersection,
    Residue,
    SymbolicSet,
    Union,
    ValidationError,
    explicit_family,
)

OPAQUE_CAP = 60_000
MAX_STRETCHES = 250_000


def ray(from_n: int) -> SymbolicSet:
    """{n : n >= from_n} as a symbolic set."""
    if from_n <= 1:
        return FULL
    return Complement(explicit_family([[1, from_n - 1]]))


def window_set(lo: int, hi: Optional[int]) -> SymbolicSet:
    if hi is None:
        return ray(lo)
    return explicit_family([[lo, hi]]) if lo <= hi else EMPTY


@dataclass(frozen=True)
class Piece:
    """Members of a level set inside [lo, hi] (hi None = unbounded):
    either the whole window (q == 1) or the residue phases listed mod q."""

    lo: int
    hi: Optional[int]
    q: int = 1
    phases: tuple[int, ...] = (0,)

    def member(self, n: int) -> bool:
        if n < self.lo or (self.hi is not None and n > self.hi):
            return False
        return n % self.q in self.phases

    def as_set(self) -> SymbolicSet:
        win = window_set(self.lo, self.hi)
        if self.q == 1:
            return win
        rs = [Residue(self.q, t) for t in self.phases]
        sel = rs[0] if len(rs) == 1 else Union(rs)
        return Intersection([sel, win])

    def to_json(self) -> dict:
        d = {"lo": self.lo, "hi": self.hi}
        if self.q != 1:
            d["mod"] = self.q
            d["phases"] = list(self.phases)
        return d


class _PieceAcc:
    def __init__(self) -> None:
        self.pieces: list[Piece] = []

    def add_solid(self, lo: int, hi: Optional[int]) -> None:
        if hi is not None and hi < lo:
            return
        if (
            self.pieces
            and self.pieces[-1].q == 1
            and self.pieces[-1].hi is not None
            and lo <= self.pieces[-1].hi + 1
        ):
            last = self.pieces[-1]
            new_hi = None if hi is None else max(hi, last.hi)
            self.pieces[-1] = Piece(last.lo, new_hi)
        else:
            self.pieces.append(Piece(lo, hi))

    def add(self, piece: Piece) -> None:
        if piece.q == 1:
            self.add_solid(piece.lo, piece.hi)
        else:
            self.pieces.append(piece)


@dataclass
class LevelSet:
    threshold: Fraction
    horizon: int
    pieces: tuple[Piece, ...]
    tail: str                      # 'exact' | 'certified' | 'unknown'
    cut: int                       # pieces are complete on [1, cut]; cut == -1 means complete everywhere
    facts: SetFacts
    notes: tuple[str, ...] = ()
    override_set: Optional[SymbolicSet] = None  # exact symbolic form, when pieces are not used

    @property
    def exact(self) -> bool:
        return self.tail == "exact"

    def member(self, n: int) -> Optional[bool]:
        if self.override_set is not None:
            return self.override_set.contains(n)
        hit = any(p.member(n) for p in self.pieces)
        if hit:
            return True
        if self.exact or n <= self.cut:
            return False
        return None

    def as_set(self) -> SymbolicSet:
        if self.override_set is not None:
            return self.override_set
        if not self.exact:
            raise ValidationError("level set tail is not exact")
        parts = [p.as_set() for p in self.pieces]
        if not parts:
            return EMPTY
        return parts[0] if len(parts) == 1 else Union(parts)

    def is_empty(self) -> bool:
        return self.exact and not self.pieces

    def is_full(self) -> bool:
        return (
            self.exact
            and len(self.pieces) == 1
            and self.pieces[0] == Piece(1, None)
        )

    def summary(self) -> dict:
        return {
            "threshold": {"num": str(self.threshold.numerator),
                          "den": str(self.threshold.denominator)},
            "pieces": [p.to_json() for p in self.pieces[:64]],
            "piece_count": len(self.pieces),
            "tail": self.tail,
            "cut": self.cut,
            "notes": list(self.notes),
        }


def _finish(threshold, horizon, acc, tail, cut, notes, facts=None) -> LevelSet:
    ls = LevelSet(
        threshold=threshold,
        horizon=horizon,
        pieces=tuple(acc.pieces),
        tail=tail,
        cut=cut,
        facts=facts if facts is not None else SetFacts(),
        notes=tuple(notes),
    )
    if facts is None and ls.exact:
        ls.facts = set_facts(ls.as_set())
    return ls


# ---------------------------------------------------------------------------
# Uniform (running mean) level sets
# ---------------------------------------------------------------------------


def uniform_level_set(a: SymbolicSet, delta: Fraction, horizon: int = 10**6) -> LevelSet:
    """Solve {n : count(a, n) * s >= p * n} exactly for delta = p/s > 0."""
    if delta <= 0:
        raise ValidationError("threshold must be positive")
    notes: list[str] = []
    acc = _PieceAcc()

    if delta > 1:
        notes.append("threshold above 1: running means never reach it")
        return _finish(delta, horizon, acc, "exact", -1, notes)

    stream = stretch_stream(a)
    if stream is None:
        return _finish(delta, horizon, acc, "unknown", 0,
                       ["no stretch decomposition"])

    cut = 0
    walked = 0
    running = 0  # count(a, cut), tracked incrementally along the walk
    try:
        for st in stream:
            walked += 1
            if walked > MAX_STRETCHES:
                notes.append("stretch budget exhausted")
                return _tail_lazy(a, delta, horizon, acc, cut, notes)
            done, running = _process_stretch(a, delta, st.start, st.end,
                                             st.pattern, running, acc, notes)
            if st.end is None:
                if done:
                    return _finish(delta, horizon, acc, "exact", -1, notes)
                return _finish(delta, horizon, acc, "unknown", st.start - 1,
                               notes)
            cut = st.end
            if st.end >= horizon:
                return _tail_lazy(a, delta, horizon, acc, cut, notes)
    except CostLimit:
        notes.append("magnitude limit reached while walking stretches")
        return _tail_lazy(a, delta, horizon, acc, cut, notes)
    notes.append("stream terminated without an unbounded stretch")
    return _finish(delta, horizon, acc, "unknown", cut, notes)


def _process_stretch(a, delta, u, v, pattern, c0, acc, notes):
    """Add the level-set members inside [u, v] (v None = unbounded) to acc.

    ``c0`` is count(a, u - 1), threaded incrementally by the caller.  Returns
    (handled, count_at_v); handled is False only for an unbounded opaque
    stretch, and count_at_v is meaningless for unbounded stretches.
    """
    p, s = delta.numerator, delta.denominator
    if v is not None and v < u:
        return True, c0

    if pattern is None:
        if v is None:
            notes.append("unbounded opaque stretch")
            return False, c0
        if v - u > OPAQUE_CAP:
            raise ValidationError("opaque stretch too long to scan")
        cnt = c0
        run_start = None
        for n in range(u, v + 1):
            if a.contains(n):
                cnt += 1
            if s * cnt >= p * n:
                if run_start is None:
                    run_start = n
            elif run_start is not None:
                acc.add_solid(run_start, n - 1)
                run_start = None
        if run_start is not None:
            acc.add_solid(run_start, v)
        return True, cnt

    q = pattern.period
    P = pattern.per_period

    def count_at(x: int) -> int:
        # count(a, x) for x in [u - 1, v] from the stretch pattern
        return c0 + pattern.count_upto(x) - pattern.count_upto(u - 1)

    if q == 1 and P == 1:
        # solid run: count(n) = c0 + n - u + 1, mean rising toward 1
        end_count = c0 if v is None else c0 + (v - u + 1)
        if s == p:
            if c0 == u - 1:
                acc.add_solid(u, v)
            return True, end_count
        nstar = -(-(s * (u - 1 - c0)) // (s - p))  # ceil
        lo = max(u, nstar)
        if v is None or lo <= v:
            acc.add_solid(lo, v)
        return True, end_count
    if q == 1 and P == 0:
        # gap: count constant, mean falling
        if c0 > 0:
            nmax = (s * c0) // p
            if nmax >= u:
                acc.add_solid(u, nmax if v is None else min(v, nmax))
        return True, c0

    base = c0 - pattern.count_upto(u - 1)
    sigma = s * P - p * q

    def g(n: int) -> int:
        return s * (base + pattern.count_upto(n)) - p * n

    by_phase: dict[tuple[int, Optional[int]], list[int]] = {}
    for t in range(q):
        n0 = u + ((t - u) % q)
        if v is not None and n0 > v:
            continue
        kmax = None if v is None else (v - n0) // q
        g0 = g(n0)
        if sigma > 0:
            kstar = 0 if g0 >= 0 else -(-(-g0) // sigma)
            if kmax is not None and kstar > kmax:
                continue
            lo = n0 + kstar * q
            by_phase.setdefault((lo, v), []).append(n0 % q)
        elif sigma < 0:
            if g0 < 0:
                continue
            kstar = g0 // (-sigma)
            hi = n0 + (kstar if kmax is None else min(kstar, kmax)) * q
            by_phase.setdefault((n0, hi), []).append(n0 % q)
        else:
            if g0 >= 0:
                by_phase.setdefault((n0, v), []).append(n0 % q)

    for (lo, hi), phases in sorted(by_phase.items(), key=lambda kv: kv[0][0]):
        if len(phases) == q:
            acc.add_solid(lo, hi)
        else:
            acc.add(Piece(lo, hi, q, tuple(sorted(phases))))
    return True, (count_at(v) if v is not None else c0)


def _tail_lazy(a, delta, horizon, acc, cut, notes) -> LevelSet:
    """Certify the tail of a level set over a lazy interval family via tags."""
    sup = lambda_sup_bound(a, cut + 1)
    if sup is not None and sup < delta:
        notes.append("certified mean bound below threshold beyond cut")
        return _finish(delta, horizon, acc, "exact", -1, notes)
    w = dstar_witness(a)
    if w is not None and w.limit > delta:
        # verify the witness on a few sparse points past the cut, then apply
        # the sliding-window bound |mean(n+m) - mean(n)| <= m/n.
        dprime = (w.limit + delta) / 2
        t, checked, last_n = 1, 0, 0
        try:
            while checked < 4 and t < 4096:
                n = w.point(t)
                t += 1
                if n <= max(cut, 2 * last_n):
                    continue
                if Fraction(a.count(n), n) < dprime:
                    notes.append("witness value dipped below margin")
                    return _finish(delta, horizon, acc, "unknown", cut, notes)
                last_n = n
                checked += 1
        except (CostLimit, GeneratorExhausted):
            checked = 0
        if checked < 4:
            notes.append("witness exhausted")
            return _finish(delta, horizon, acc, "unknown", cut, notes)
        c = dprime - delta
        facts = SetFacts(
            finite=False,
            dstar_low=c / (1 + c),
            dstar_zero=False,
            harmonic="diverges",
            runs_unbounded=True,
            fibers_all_finite=False,
        )
        notes.append(
            "witnessed means stay above threshold; window bound certifies "
            "positive upper density"
        )
        return _finish(delta, horizon, acc, "certified", cut, notes, facts)
    notes.append("no certificate for the tail")
    return _finish(delta, horizon, acc, "unknown", cut, notes)
