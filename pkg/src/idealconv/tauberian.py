"""Tauberian verification suite.

The quantitative heart of the engine: exact window sums of submeasure
increments against their slope envelopes, the derived sliding-window
stability, the classical slope condition upgrading statistical convergence to
plain convergence, a sharpness construction for growing slope allowances, the
block-mean estimate for block-constant sequences, and the running-mean series
emitter with its exact threshold-crossing interval.

All comparisons are exact rational comparisons.  Window sums under the
uniform submeasure telescope along the membership stretches of the set, so a
window of 4 * 10^6 indices costs a handful of count() calls instead of
4 * 10^6 terms.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional, Sequence

from .analysis import stretch_stream
from .convergence import (
    CONVERGES,
    BlockConstantSeq,
    BlockValues,
    IndicatorSequence,
    RampSequence,
    SymbolicSequence,
    ideal_limit,
    imu_limit,
    stat_limit,
)
from .functionals import (
    PreconditionError,
    SubmeasureSeq,
    UniformMeasures,
    alpha_flat_check,
    uniform_eval,
)
from .ideals import VanishingIdeal, alpha_thick_check, ZETA
from .levelsets import uniform_level_set
from .sets import (
    BlockScheme,
    SymbolicSet,
    ValidationError,
    explicit_family,
)
ZERO = Fraction(0)
ONE = Fraction(1)
HALF = Fraction(1, 2)

TERM_CAP = 250_000


def _fj(x: Fraction) -> dict:
    return {"num": str(x.numerator), "den": str(x.denominator)}


def kappa_constant(alpha: Fraction, d: Fraction) -> Fraction:
    """Envelope constant for window sums of d/n^alpha increments:
    d for alpha = 1 and d/(1 - alpha) for alpha in (0, 1)."""
    alpha = Fraction(alpha)
    d = Fraction(d)
    if not 0 < alpha <= 1:
        raise PreconditionError("the envelope constant needs alpha in (0, 1]")
    return d if alpha == 1 else d / (1 - alpha)


def window_width(n: int, c: Fraction, alpha: Fraction) -> int:
    """floor(c * n^alpha) for rational alpha, exactly."""
    from .ideals import _interval_top

    return _interval_top(n, c, alpha) - n


def structural_flatness(mu: SubmeasureSeq, alpha: Fraction, d: Fraction) -> Optional[bool]:
    """Certified alpha-flatness without enumeration, where known.

    The uniform sequence moves by at most 1/(n+1) per step for every set, so
    it is alpha-flat with constant d for all alpha <= 1, d >= 1.
    """
    if isinstance(mu, UniformMeasures):
        return alpha <= 1 and d >= 1
    tag = getattr(getattr(mu, "kernel", None), "alpha_flat_tag", None)
    if tag is not None and alpha <= tag:
        return None  # tagged, but the constant depends on the set; sample
    return None


# ---------------------------------------------------------------------------
# Exact increment sums under the uniform submeasure
# ---------------------------------------------------------------------------


def uniform_increment_sum(a: SymbolicSet, n: int, width: int) -> Fraction:
    """Sum over i = 1..width of |lambda_{n+i}(a) - lambda_{n+i+1}(a)|, exact.

    The increment at m is |m * 1_a(m+1) - count(a, m)| / (m (m+1)); on a
    membership run both the numerator and its sign freeze, so each stretch
    telescopes to K * (1/first - 1/(last+1)).
    """
    if n < 1 or width < 0:
        raise PreconditionError("need n >= 1 and width >= 0")
    if width == 0:
        return ZERO
    m_lo, m_hi = n + 1, n + width
    total = ZERO
    stream = stretch_stream(a)
    if stream is None:
        raise ValidationError("no stretch decomposition for the increment sum")
    terms_spent = 0
    running = 0  # count(a, st.start - 1), threaded along the walk
    for st in stream:
        pat = st.pattern

        def count_at(x: int) -> int:
            # count(a, x) for x in [st.start - 1, st.end]
            if x < st.start:
                return running
            if pat is not None:
                return running + pat.count_upto(x) - pat.count_upto(st.start - 1)
            return a.count(x)

        # stretch covers positions m+1 in [st.start, st.end]
        lo = max(st.start, m_lo + 1)
        hi = (m_hi + 1) if st.end is None else min(st.end, m_hi + 1)
        if hi >= lo:
            ms_lo, ms_hi = lo - 1, hi - 1  # m-range classified by this stretch
            if pat is not None and pat.period == 1:
                c_mslo = count_at(ms_lo)
                k = (ms_lo - c_mslo) if pat.bits[0] == 1 else c_mslo
                total += k * (Fraction(1, ms_lo) - Fraction(1, ms_hi + 1))
            else:
                terms_spent += ms_hi - ms_lo + 1
                if terms_spent > TERM_CAP:
                    raise ValidationError("window too dense for exact summation")
                c = count_at(ms_lo)
                prev = Fraction(c, ms_lo)
                for m in range(ms_lo, ms_hi + 1):
                    member = pat.member(m + 1) if pat is not None \
                        else a.contains(m + 1)
                    if member:
                        c += 1
                    cur = Fraction(c, m + 1)
                    total += abs(cur - prev)
                    prev = cur
        if st.end is None or st.end >= m_hi + 1:
            break
        running = count_at(st.end)
    return total


def increment_sum(mu: SubmeasureSeq, a: SymbolicSet, n: int, width: int) -> Fraction:
    if isinstance(mu, UniformMeasures):
        return uniform_increment_sum(a, n, width)
    if width > TERM_CAP:
        raise ValidationError("window too wide for per-term evaluation")
    total = ZERO
    prev = mu.eval_set(n + 1, a)
    for i in range(1, width + 1):
        cur = mu.eval_set(n + i + 1, a)
        total += abs(cur - prev)
        prev = cur
    return total


# ---------------------------------------------------------------------------
# Window-sum bound and sliding-window stability
# ---------------------------------------------------------------------------


@dataclass
class BoundReport:
    alpha: Fraction
    d: Fraction
    c: Fraction
    kappa: Fraction
    rows: list  # (n, width, lhs Fraction, rhs Fraction, ok)
    passed: bool
    max_slack: Optional[Fraction]  # max of lhs / rhs over nonzero bounds
    aborted: Optional[str] = None

    def to_json(self) -> dict:
        return {
            "alpha": _fj(self.alpha),
            "d": _fj(self.d),
            "c": _fj(self.c),
            "kappa": _fj(self.kappa),
            "rows": [
                {"n": n, "width": w, "lhs": _fj(l), "rhs": _fj(r), "ok": ok}
                for n, w, l, r, ok in self.rows
            ],
            "passed": self.passed,
            **({"max_slack": _fj(self.max_slack)} if self.max_slack is not None else {}),
            **({"aborted": self.aborted} if self.aborted else {}),
        }


def claim1_bound_check(
    mu: SubmeasureSeq,
    a: SymbolicSet,
    alpha: Fraction,
    d: Fraction,
    c: Fraction,
    n_samples: Sequence[int],
    flat_probe: int = 256,
) -> BoundReport:
    """Exact window sums of increment magnitudes against the envelope:

        sum_{i=1..floor(c n^alpha)} |mu_{n+i}(a) - mu_{n+i+1}(a)|  <=  kappa c

    with kappa = d for alpha = 1 and d/(1-alpha) otherwise.  The flatness
    precondition (increments bounded by d/n^alpha) is certified structurally
    where known and otherwise verified on a probe range first; a violated
    precondition aborts the check.
    """
    alpha, d, c = Fraction(alpha), Fraction(d), Fraction(c)
    kappa = kappa_constant(alpha, d)
    rhs = kappa * c
    flat = structural_flatness(mu, alpha, d)
    if flat is None:
        probe = alpha_flat_check(mu, a, alpha, d, flat_probe)
        flat = probe.holds
    if not flat:
        return BoundReport(alpha, d, c, kappa, [], False, None,
                           aborted="flatness precondition not satisfied")
    rows = []
    slack = None
    for n in sorted(set(int(n) for n in n_samples)):
        w = window_width(n, c, alpha)
        lhs = increment_sum(mu, a, n, w)
        ok = lhs <= rhs
        rows.append((n, w, lhs, rhs, ok))
        if rhs > 0:
            ratio = lhs / rhs
            slack = ratio if slack is None or ratio > slack else slack
    return BoundReport(alpha, d, c, kappa, rows, all(r[4] for r in rows), slack)


@dataclass
class WindowReport:
    delta: Fraction
    c: Fraction
    n0: int
    rows: list  # (n, m, |diff|, ok)
    passed: bool
    infeasible: Optional[str] = None

    def to_json(self) -> dict:
        return {
            "delta": _fj(self.delta),
            "c": _fj(self.c),
            "n0": self.n0,
            "rows": [
                {"n": n, "m": m, "difference": _fj(x), "ok": ok}
                for n, m, x, ok in self.rows
            ],
            "passed": self.passed,
            **({"infeasible": self.infeasible} if self.infeasible else {}),
        }


def claim2_window_check(
    mu: SubmeasureSeq,
    a: SymbolicSet,
    delta: Fraction,
    alpha: Fraction,
    d: Fraction,
    n_samples: Sequence[int],
) -> WindowReport:
    """Pick (c, n0) by the recipe d/n0^alpha + kappa c <= delta and verify
    |mu_{n+m}(a) - mu_n(a)| <= delta exactly on sampled windows.

    The recipe takes c = delta / (2 kappa) and the first power of two n0 with
    d / n0^alpha strictly below what remains.
    """
    delta, alpha, d = Fraction(delta), Fraction(alpha), Fraction(d)
    if delta <= 0:
        raise PreconditionError("need delta > 0")
    kappa = kappa_constant(alpha, d)
    c = delta / (2 * kappa)
    budget = delta - kappa * c
    n0 = 1
    r, s = alpha.numerator, alpha.denominator
    while d**s >= budget**s * n0**r:  # d / n0^alpha >= budget
        n0 *= 2
        if n0 > 1 << 62:
            return WindowReport(delta, c, 0, [], False,
                                infeasible="no window start satisfies the recipe")
    rows = []
    for n in sorted(set(int(n) for n in n_samples)):
        if n < n0:
            continue
        w = window_width(n, c, alpha)
        base = mu.eval_set(n, a)
        for m in sorted({0, 1, w // 2, w}):
            if m < 0:
                continue
            diff = abs(mu.eval_set(n + m, a) - base)
            rows.append((n, m, diff, diff <= delta))
    return WindowReport(delta, c, n0, rows, all(r[3] for r in rows))


# ---------------------------------------------------------------------------
# Slope condition (statistical-to-ordinary upgrades)
# ---------------------------------------------------------------------------


@dataclass
class SlopeReport:
    slope_holds: Optional[bool]
    slope_detail: str
    stat_verdict: str
    tail_checks: list  # (delta, cutoff, tail_clear)
    contradiction: bool
    applicable: bool

    def to_json(self) -> dict:
        return {
            "slope_holds": self.slope_holds,
            "slope_detail": self.slope_detail,
            "stat_verdict": self.stat_verdict,
            "tail_checks": [
                {"delta": _fj(dl), "cutoff": cf, "tail_clear": tc}
                for dl, cf, tc in self.tail_checks
            ],
            "contradiction": self.contradiction,
            "applicable": self.applicable,
        }


def fridy_check(x: SymbolicSequence, d: Fraction, horizon: int = 10**6) -> SlopeReport:
    """Slope condition |x_{n+1} - x_n| <= d/n plus certified statistical limit
    zero must force the ordinary limit; any contradiction found here would
    falsify the underlying theorem and is reported (it must never occur).

    A slope violation makes the condition inapplicable, which is a report, not
    a failure.
    """
    d = Fraction(d)
    slope_holds: Optional[bool] = None
    detail = ""
    if isinstance(x, RampSequence):
        bad = x.max_slope_violation(lambda n: d / n)
        slope_holds = bad is None
        detail = ("verified per linear piece" if slope_holds
                  else f"step at {bad} exceeds the allowance")
    else:
        cert = x.slope_certificate()
        if cert is not None:
            slope_holds = cert <= d
            detail = f"structural slope constant {cert}"
        else:
            slope_holds = None
            detail = "no slope certificate"
            for n in range(1, min(horizon, 65_536)):
                if abs(x.value(n + 1) - x.value(n)) * n > d:
                    slope_holds = False
                    detail = f"step at {n} exceeds the allowance"
                    break
    if slope_holds is False or slope_holds is None:
        return SlopeReport(slope_holds, detail, "not-run", [], False, False)

    rep = stat_limit(x, ZERO, horizon=horizon)
    tails = []
    contradiction = False
    if rep.overall == CONVERGES:
        # the slope condition upgrades the certified statistical zero to an
        # ordinary limit, so every deviation set must be finite; a certified
        # infinite one would falsify the theorem
        from .analysis import set_facts

        for delta in (HALF, Fraction(1, 4), Fraction(1, 10)):
            dev = x.deviation_set(ZERO, delta)
            lo = horizon // 2
            late = dev.count(horizon) - dev.count(lo - 1)
            tails.append((delta, lo, late == 0))
            if set_facts(dev).finite is False:
                contradiction = True
    return SlopeReport(slope_holds, detail, rep.overall, tails, contradiction,
                       True)


# ---------------------------------------------------------------------------
# Sharpness of the slope condition
# ---------------------------------------------------------------------------


@dataclass
class SharpnessReport:
    feasible: bool
    reason: str
    sequence: Optional[RampSequence]
    peaks: list
    envelope: list  # (position, support density Fraction)
    slope_ok: Optional[bool]
    stat_verdict: Optional[str]
    limsup_witness: Optional[Fraction]

    def to_json(self) -> dict:
        return {
            "feasible": self.feasible,
            "reason": self.reason,
            **({"sequence": self.sequence.to_json()} if self.sequence else {}),
            "peaks": self.peaks,
            "envelope": [[n, _fj(v)] for n, v in self.envelope],
            "slope_ok": self.slope_ok,
            "stat_verdict": self.stat_verdict,
            **(
                {"limsup_witness": _fj(self.limsup_witness)}
                if self.limsup_witness is not None
                else {}
            ),
        }


def standard_slope_schedule(spec) -> Callable[[int], Fraction]:
    """Slope allowances d_n: ("log2",) or ("constant", d)."""
    if isinstance(spec, (tuple, list)) and spec and spec[0] == "log2":
        return lambda n: Fraction(max(1, n.bit_length() - 1))
    if isinstance(spec, (tuple, list)) and spec and spec[0] == "constant":
        d = Fraction(spec[1])
        return lambda n: d
    raise ValidationError(f"unknown slope schedule {spec!r}")


def sharpness_search(schedule, horizon: int = 10**6) -> SharpnessReport:
    """Construct a slope-compliant sequence with statistical limit zero and
    peaks at 1/2, when the allowance grows.

    Triangular bumps sit at geometrically spaced positions; a bump at N needs
    width about N / d_N to climb to 1/2 within the allowance, so the support
    density at scale N is about 1/d_N.  The construction is feasible exactly
    when the allowance grows without bound along the bump positions; the
    emitted candidate is re-validated by the engine's own slope and
    statistical-limit checks, never assumed correct.
    """
    d_of = standard_slope_schedule(schedule)

    def bump_width(N: int) -> int:
        # width w with climb slope 1/(2w) <= d_n / n throughout the bump:
        # w = ceil(2N / d_N) leaves a factor-of-two margin against the
        # allowance decaying across [N, N + 2w] ⊂ [N, 3N]
        q = Fraction(2 * N) / d_of(N)
        return -((-q.numerator) // q.denominator)

    positions = []
    N = 16
    while True:
        w = bump_width(N)
        if N + 2 * w > horizon:
            break
        positions.append(N)
        N *= 4
    if not positions:
        return SharpnessReport(False, "horizon below the first bump", None,
                               [], [], None, None, None)
    d_first, d_last = d_of(positions[0]), d_of(positions[-1])
    if len(positions) < 2 or d_last < 2 * d_first:
        return SharpnessReport(
            False,
            "slope allowance does not grow along the bump positions; a "
            "genuine counterexample needs an unbounded allowance",
            None, [], [], None, None, None,
        )

    anchors: list[tuple[int, Fraction]] = [(1, ZERO)]
    peaks = []
    support = []
    for N in positions:
        w = bump_width(N)
        anchors.append((N, ZERO))
        anchors.append((N + w, HALF))
        anchors.append((N + 2 * w, ZERO))
        peaks.append(N + w)
        support.append((N, N + 2 * w))
    x = RampSequence(anchors)

    bad = x.max_slope_violation(lambda n: d_of(n) / n)
    slope_ok = bad is None
    rep = stat_limit(x, ZERO, horizon=horizon)
    env = []
    covered = 0
    for lo, hi in support:
        covered += hi - lo
        env.append((hi, Fraction(covered, hi)))
    limsup_wit = max((x.value(p) for p in peaks), default=None)
    feasible = bool(slope_ok and rep.overall == CONVERGES
                    and limsup_wit is not None and limsup_wit >= HALF)
    reason = "engine-validated construction" if feasible else \
        "construction failed its own validation"
    return SharpnessReport(feasible, reason, x, peaks, env, slope_ok,
                           rep.overall, limsup_wit)


# ---------------------------------------------------------------------------
# Verdict-agreement harness
# ---------------------------------------------------------------------------


@dataclass
class CharacterReport:
    alpha: Fraction
    thick_evidence: dict
    flat_evidence: dict
    compared: int
    falsifications: list
    undecided: list

    @property
    def ok(self) -> bool:
        return not self.falsifications

    def to_json(self) -> dict:
        return {
            "alpha": _fj(self.alpha),
            "thick_evidence": self.thick_evidence,
            "flat_evidence": self.flat_evidence,
            "compared": self.compared,
            "falsifications": self.falsifications,
            "undecided": self.undecided,
            "ok": self.ok,
        }


def character_harness(
    nu: SubmeasureSeq,
    mu: SubmeasureSeq,
    alpha: Fraction,
    corpus: Sequence[tuple[str, SymbolicSequence]],
    limits: Sequence[Fraction],
    horizon: int = 10**6,
) -> CharacterReport:
    """Vanishing-ideal convergence for mu must coincide with pair convergence
    along the vanishing ideal of nu, given the thickness/flatness evidence at
    level alpha.  Certified disagreements are falsifications and must never
    occur; undecided comparisons are reported as such.
    """
    alpha = Fraction(alpha)
    if not 0 < alpha <= 1:
        raise PreconditionError("the agreement harness needs alpha in (0, 1]")
    zmu = VanishingIdeal(mu)
    znu = VanishingIdeal(nu)
    thick_oracle = ZETA if isinstance(nu, UniformMeasures) else znu
    dbl = None
    try:
        from .sets import named_family

        dbl = named_family("factorial-double")
    except Exception:
        pass
    thick = alpha_thick_check(thick_oracle, alpha,
                              dbl if dbl is not None else explicit_family([[2, 4]]),
                              Fraction(1), [24, 720], horizon).to_json()
    flat_probe = {}
    if corpus:
        sample_sets = []
        for _, seq in corpus[:3]:
            if isinstance(seq, IndicatorSequence):
                sample_sets.append(seq.set)
        for i, s_ in enumerate(sample_sets):
            flat_probe[f"set{i}"] = alpha_flat_check(
                mu, s_, alpha, Fraction(2), 512
            ).to_json()

    fal, und = [], []
    compared = 0
    for name, x in corpus:
        for ell in limits:
            v1 = ideal_limit(x, zmu, Fraction(ell), horizon=horizon)
            v2 = imu_limit(x, znu, mu, Fraction(ell), horizon=horizon)
            if v1.certified and v2.certified:
                compared += 1
                if v1.overall != v2.overall:
                    fal.append({"sequence": name, "limit": _fj(Fraction(ell)),
                                "direct": v1.overall, "pair": v2.overall})
            else:
                und.append({"sequence": name, "limit": _fj(Fraction(ell)),
                            "direct": v1.overall, "pair": v2.overall})
    return CharacterReport(alpha, thick, flat_probe, compared, fal, und)


# ---------------------------------------------------------------------------
# Block means and the running-mean series
# ---------------------------------------------------------------------------


class TripleBlockValues(BlockValues):
    """Blocks in consecutive triples: value u on blocks 3u-2 and 3u-1, zero on
    block 3u.  The per-triple bits come from a 0/1 selector."""

    def __init__(self, bits: Callable[[int], int], desc: str = "custom"):
        self.bits = bits
        self.desc = desc

    def value(self, j: int) -> Fraction:
        if j % 3 == 0:
            return ZERO
        u = (j + 2) // 3
        return Fraction(1 if self.bits(u) else 0)

    def deviating_blocks(self, limit, eps):
        raise ValidationError("triple selectors enumerate blocks explicitly")

    def to_json(self) -> dict:
        return {"values": "triple", "selector": self.desc}


def single_peak_sequence(scheme: BlockScheme, u: int) -> BlockConstantSeq:
    """x = 1 exactly on blocks 3u-2 and 3u-1, zero elsewhere."""
    return BlockConstantSeq(scheme, TripleBlockValues(lambda v: 1 if v == u else 0,
                                                      desc=f"peak-{u}"))


@dataclass
class BlockMeanReport:
    rows: list  # (block n, deviation Fraction, bound Fraction, ok)
    passed: bool

    def to_json(self) -> dict:
        return {
            "rows": [
                {"block": n, "deviation": _fj(dv), "bound": _fj(b), "ok": ok}
                for n, dv, b, ok in self.rows
            ],
            "passed": self.passed,
        }


def blockmean_check(
    scheme: BlockScheme,
    x: BlockConstantSeq,
    horizon: int = 10**8,
) -> BlockMeanReport:
    """|x at a_n minus the running mean at a_n| <= 2 a_{n-1} / a_n for every
    block index with a_n <= horizon, exactly.

    The sequence must have the triple shape: zero on every third block and
    equal on the two blocks before it.
    """
    if not isinstance(x.values, TripleBlockValues):
        raise PreconditionError("block-mean checks need triple-shaped sequences")
    if x.scheme is not scheme and (x.scheme.name is None
                                   or x.scheme.name != scheme.name):
        raise PreconditionError("sequence and scheme disagree")
    from .sets import CostLimit

    rows = []
    n = 1
    total = ZERO  # exact sum of x over [1, a_n]
    while True:
        if scheme.finite and n > scheme.max_index():
            break
        try:
            an = scheme.a(n)
        except CostLimit:
            break
        if an > horizon:
            break
        prev = scheme.a(n - 1)
        v = x.values.value(n)
        total += v * (an - prev)
        mean = Fraction(total, an)
        dev = abs(v - mean)
        bound = Fraction(2 * prev, an)
        rows.append((n, dev, bound, dev <= bound))
        n += 1
    return BlockMeanReport(rows, all(r[3] for r in rows))


@dataclass
class SeriesReport:
    samples: list  # (n, mean Fraction)
    crossing: Optional[tuple[int, int]]
    braced_range: tuple[int, int]

    def to_json(self) -> dict:
        return {
            "samples": [[n, _fj(v)] for n, v in self.samples],
            "crossing": list(self.crossing) if self.crossing else None,
            "braced_range": list(self.braced_range),
        }


def figure_series(
    scheme: BlockScheme,
    u: int,
    eps: Fraction,
    resolution: int = 64,
) -> SeriesReport:
    """Running mean of the single-peak sequence across the u-th block triple,
    with the exact interval where the mean reaches eps inside the triple.

    The mean rises across blocks 3u-2 and 3u-1 toward 1 and decays on block
    3u; the crossing interval endpoints come from the exact level-set solver,
    cross-checkable against a resolution-1 scan.
    """
    if u < 1:
        raise PreconditionError("the peak index must be >= 1")
    eps = Fraction(eps)
    lo = scheme.a(3 * u - 3) + 1
    hi = scheme.a(3 * u)
    support = explicit_family([[scheme.a(3 * u - 3) + 1, scheme.a(3 * u - 1)]])
    samples = []
    if resolution > 0:
        points = sorted(
            {max(1, hi * k // resolution) for k in range(1, resolution + 1)}
            | {max(1, lo - 1), lo, scheme.a(3 * u - 2), scheme.a(3 * u - 1), hi}
        )
        for n in points:
            samples.append((n, uniform_eval(support, n)))
    crossing = None
    if eps <= 1:
        level = uniform_level_set(support, eps, horizon=hi + 1)
        members = [p for p in level.pieces if p.q == 1]
        span_lo, span_hi = None, None
        for p in members:
            p_lo = max(p.lo, lo)
            p_hi = min(p.hi if p.hi is not None else hi, hi)
            if p_hi >= p_lo:
                span_lo = p_lo if span_lo is None else min(span_lo, p_lo)
                span_hi = p_hi if span_hi is None else max(span_hi, p_hi)
        if span_lo is not None:
            crossing = (span_lo, span_hi)
    return SeriesReport(samples, crossing, (lo, hi))
