"""Density and submeasure evaluation.

Covers the running-mean functionals lambda_n(A) = |A ∩ [1,n]| / n, the upper
asymptotic density d*(A) = limsup lambda_n(A), exact harmonic partial sums,
and general submeasure sequences mu = (mu_n): the uniform sequence, uniform
measures on lacunary blocks, nonnegative matrices with finitely supported
rows, and the constant sequence nu_n = d*.

Everything is exact rational arithmetic; floats appear only when a report is
rendered.  Density values come with certificates: a closed form (eventually
periodic sets), a limsup witness (interval families with growth tags, values
re-verified exactly), or an honest horizon estimate that never masquerades as
certified.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterator, Optional, Sequence

from .analysis import dstar_witness, lambda_sup_bound, set_facts, stretch_stream
from .levelsets import LevelSet, Piece, _PieceAcc, _finish, ray, uniform_level_set
from .sets import (
    BlockScheme,
    CostLimit,
    Complement,
    FiniteSet,
    Intersection,
    IntervalFamily,
    Residue,
    SetError,
    SymbolicSet,
    Union,
    ValidationError,
    emission_budget,
)
from .verdicts import Verdict, certified_in, certified_out, undecided

ZERO = Fraction(0)
ONE = Fraction(1)


class PreconditionError(SetError):
    """An operation was called outside its stated preconditions."""


# ---------------------------------------------------------------------------
# Running means and upper density
# ---------------------------------------------------------------------------


def uniform_eval(a: SymbolicSet, n: int) -> Fraction:
    """lambda_n(a) = |a ∩ [1, n]| / n, exactly."""
    if n < 1:
        raise PreconditionError("index must be >= 1")
    return Fraction(a.count(n), n)


def prefix_counts(a: SymbolicSet, n_max: int) -> Iterator[int]:
    """Yield count(a, n) for n = 1..n_max with a single incremental pass."""
    c = 0
    for n in range(1, n_max + 1):
        if a.contains(n):
            c += 1
        yield c


@dataclass
class DensityResult:
    value: Fraction
    certificate: str  # 'closed-form' | 'limsup-witness' | 'horizon-estimate'
    witness: list = field(default_factory=list)  # [(n, Fraction value)]
    horizon: Optional[int] = None

    @property
    def certified(self) -> bool:
        return self.certificate != "horizon-estimate"

    def to_json(self) -> dict:
        from .codec import frac_json

        return {
            "value": frac_json(self.value),
            "certificate": self.certificate,
            "witness": [[n, frac_json(v)] for n, v in self.witness[:12]],
            **({"horizon": self.horizon} if self.horizon is not None else {}),
        }


def upper_density(a: SymbolicSet, horizon: int = 10**6) -> DensityResult:
    """d*(a) with the strongest certificate available.

    Falls back to a horizon estimate (running max of lambda_n over all
    interval endpoints plus a geometric grid of ratio ~1.1); estimates carry
    their horizon and are never reported as certified.
    """
    prof = a.periodic_profile()
    if prof is not None:
        return DensityResult(prof.density, "closed-form")

    facts = set_facts(a)
    if facts.dstar_exact is not None:
        w = dstar_witness(a)
        pts = []
        if w is not None:
            try:
                for t in range(1, 7):
                    n = w.point(t)
                    pts.append((n, uniform_eval(a, n)))
            except SetError:
                pts = pts
        return DensityResult(facts.dstar_exact, "limsup-witness", pts)

    # estimate: sample boundaries of the stretch decomposition and a grid
    samples: set[int] = set()
    n = 1
    while n <= horizon:
        samples.add(n)
        n = max(n + 1, n * 11 // 10)
    samples.add(horizon)
    stream = stretch_stream(a)
    if stream is not None:
        try:
            for st in stream:
                if st.start > horizon:
                    break
                samples.add(st.start)
                if st.end is not None and st.end <= horizon:
                    samples.add(st.end)
                if st.end is None:
                    break
        except CostLimit:
            pass
    best, best_n = ZERO, 1
    for n in sorted(samples):
        v = uniform_eval(a, n)
        if v > best:
            best, best_n = v, n
    return DensityResult(best, "horizon-estimate",
                         [(best_n, best)], horizon=horizon)


# ---------------------------------------------------------------------------
# Harmonic partial sums and the summable test
# ---------------------------------------------------------------------------

HARMONIC_TERM_CAP = 500_000


def _harmonic_range(lo: int, hi: int) -> Fraction:
    """Sum of 1/a for a in [lo, hi], exactly, by divide and conquer."""
    if hi < lo:
        return ZERO
    if hi - lo < 32:
        num, den = 0, 1
        for a in range(lo, hi + 1):
            num = num * a + den
            den *= a
        return Fraction(num, den)
    mid = (lo + hi) // 2
    return _harmonic_range(lo, mid) + _harmonic_range(mid + 1, hi)


def harmonic_partial(a: SymbolicSet, n: int) -> Fraction:
    """Sum of 1/k over k in a ∩ [1, n], exactly.

    Raises when the sum would need more than HARMONIC_TERM_CAP terms; exact
    rationals with millions of terms are not representable in practice.
    """
    if n < 1:
        raise PreconditionError("index must be >= 1")
    if a.count(n) > HARMONIC_TERM_CAP:
        raise PreconditionError("too many terms for an exact harmonic sum")
    total = ZERO
    stream = stretch_stream(a)
    if stream is None:
        for k in range(1, n + 1):
            if a.contains(k):
                total += Fraction(1, k)
        return total
    for st in stream:
        u = st.start
        v = n if st.end is None else min(st.end, n)
        if u > n:
            break
        if v >= u:
            if st.pattern is None:
                for k in range(u, v + 1):
                    if a.contains(k):
                        total += Fraction(1, k)
            elif st.pattern.period == 1:
                if st.pattern.bits[0] == 1:
                    total += _harmonic_range(u, v)
            else:
                for k in range(u, v + 1):
                    if st.pattern.member(k):
                        total += Fraction(1, k)
        if st.end is None or st.end >= n:
            break
    return total


def summable_verdict(a: SymbolicSet, trace_to: int = 10_000) -> Verdict:
    """Membership test for {A : sum over A of 1/a converges}.

    Certified through structural facts; otherwise Undecided with a
    partial-sum trace.
    """
    facts = set_facts(a)
    if facts.harmonic == "converges":
        return certified_in("structural convergence certificate")
    if facts.harmonic == "diverges":
        return certified_out("structural divergence certificate")
    trace = []
    k = 8
    while k <= trace_to:
        try:
            trace.append((k, harmonic_partial(a, k)))
        except PreconditionError:
            break
        k *= 4
    from .codec import frac_json

    return undecided(
        "no structural test applies",
        horizon=trace_to,
        witness={"partial_sums": [[n, frac_json(v)] for n, v in trace]},
    )


# ---------------------------------------------------------------------------
# Submeasure sequences
# ---------------------------------------------------------------------------


class SubmeasureSeq:
    """A sequence mu = (mu_n) of submeasures, evaluable exactly.

    ``evaluate(n, a, h)`` returns mu_n(a ∩ [1, h]).  Finite-support instances
    detect when h already covers the support I_n and become h-independent;
    calling them with h below the support is a precondition error.
    """

    name = "?"
    probability = False
    lsc = False  # lower semicontinuous in the truncation sense

    def support(self, n: int) -> SymbolicSet:
        raise NotImplementedError

    def support_max(self, n: int) -> Optional[int]:
        """Largest element of I_n for finite-support instances, else None."""
        return None

    def eval_set(self, n: int, a: SymbolicSet) -> Fraction:
        """mu_n(a) without truncation (well-defined for all instances here)."""
        raise NotImplementedError

    def evaluate(self, n: int, a: SymbolicSet, h: int) -> Fraction:
        if n < 1:
            raise PreconditionError("index must be >= 1")
        m = self.support_max(n)
        if m is not None:
            if h < m:
                raise PreconditionError(
                    f"horizon {h} does not cover the support of index {n} (max {m})"
                )
            return self.eval_set(n, a)
        return self._eval_truncated(n, a, h)

    def _eval_truncated(self, n: int, a: SymbolicSet, h: int) -> Fraction:
        raise NotImplementedError

    def singleton_mass(self, n: int, k: int) -> Fraction:
        return self.eval_set(n, FiniteSet([k]))

    def level_set(self, a: SymbolicSet, delta: Fraction, horizon: int) -> LevelSet:
        """{n : mu_n(a) >= delta} with the strongest tail certificate."""
        raise NotImplementedError

    def smoothness_items(self, k_max: int) -> dict:
        """Structural certificates / refutations for (s1)-(s3); see
        :func:`smoothness_check`."""
        return {}

    def to_json(self) -> dict:
        raise NotImplementedError


class UniformMeasures(SubmeasureSeq):
    """mu_n = uniform probability measure on [1, n]; mu_n(A) = lambda_n(A)."""

    name = "uniform"
    probability = True
    lsc = True

    def support(self, n: int) -> SymbolicSet:
        from .levelsets import window_set

        return window_set(1, n)

    def eval_set(self, n: int, a: SymbolicSet) -> Fraction:
        return uniform_eval(a, n)

    def evaluate(self, n: int, a: SymbolicSet, h: int) -> Fraction:
        if n < 1:
            raise PreconditionError("index must be >= 1")
        if h < n:
            raise PreconditionError("uniform evaluation needs horizon >= index")
        return uniform_eval(a, n)

    def level_set(self, a, delta, horizon):
        return uniform_level_set(a, delta, horizon)

    def singleton_mass(self, n: int, k: int) -> Fraction:
        return Fraction(1, n) if k <= n else ZERO

    def smoothness_items(self, k_max: int) -> dict:
        return {
            "s1": ("certified", "support [1, n] is nonempty for every n"),
            "s2": ("certified", "singleton mass is 1/n for k <= n, 0 before"),
            "s3": ("certified", "total mass is identically 1"),
        }

    def to_json(self) -> dict:
        return {"kind": "uniform"}


class LacunaryBlocks(SubmeasureSeq):
    """mu_n = uniform probability measure on [a_n, a_{n+1})."""

    probability = True
    lsc = True

    def __init__(self, scheme: BlockScheme):
        if scheme.finite:
            raise ValidationError("lacunary submeasures need an infinite scheme")
        self.scheme = scheme
        self.name = f"lacunary-{scheme.name}"

    def _window(self, n: int) -> tuple[int, int]:
        lo = self.scheme.a(n)
        hi = self.scheme.a(n + 1) - 1
        if hi < lo:
            raise ValidationError("degenerate lacunary window")
        return lo, hi

    def support(self, n: int) -> SymbolicSet:
        from .levelsets import window_set

        lo, hi = self._window(n)
        return window_set(lo, hi)

    def support_max(self, n: int) -> int:
        return self._window(n)[1]

    def eval_set(self, n: int, a: SymbolicSet) -> Fraction:
        lo, hi = self._window(n)
        return Fraction(a.count(hi) - a.count(lo - 1), hi - lo + 1)

    def level_set(self, a, delta, horizon):
        # tail certificates stabilize within a few dozen windows; the window
        # endpoints grow super-exponentially, so a small explicit range
        # already reaches astronomical positions
        return lacunary_level_set(self.scheme, a, delta, min(horizon, 96))

    def singleton_mass(self, n: int, k: int) -> Fraction:
        lo, hi = self._window(n)
        return Fraction(1, hi - lo + 1) if lo <= k <= hi else ZERO

    def smoothness_items(self, k_max: int) -> dict:
        return {
            "s1": ("certified", "window [a_n, a_{n+1}) is nonempty for every n"),
            "s2": ("certified",
                   "each k lies in exactly one window; masses vanish afterwards"),
            "s3": ("certified", "each window carries total mass 1"),
        }

    def to_json(self) -> dict:
        return {"kind": "lacunary", **self.scheme.to_json()}


class ConstantUpperDensity(SubmeasureSeq):
    """nu_n = d* for every n; not lower semicontinuous."""

    name = "upper-density"
    probability = True
    lsc = False

    def __init__(self, horizon: int = 10**6):
        self.horizon = horizon

    def support(self, n: int) -> SymbolicSet:
        from .sets import FULL

        return FULL

    def eval_set(self, n: int, a: SymbolicSet) -> Fraction:
        return upper_density(a, self.horizon).value

    def evaluate(self, n: int, a: SymbolicSet, h: int) -> Fraction:
        # truncating d* to [1, h] would make it identically zero; the constant
        # sequence is defined on the untruncated set
        if n < 1:
            raise PreconditionError("index must be >= 1")
        return self.eval_set(n, a)

    def density_result(self, a: SymbolicSet) -> DensityResult:
        return upper_density(a, self.horizon)

    def level_set(self, a, delta, horizon):
        res = upper_density(a, self.horizon)
        acc = _PieceAcc()
        if not res.certified:
            return _finish(delta, horizon, acc, "unknown", 0,
                           ["upper density not certified"])
        if res.value >= delta:
            acc.add_solid(1, None)
            return _finish(delta, horizon, acc, "exact", -1,
                           ["constant value meets the threshold everywhere"])
        return _finish(delta, horizon, acc, "exact", -1,
                       ["constant value below the threshold"])

    def singleton_mass(self, n: int, k: int) -> Fraction:
        return ZERO  # singletons have upper density zero

    def smoothness_items(self, k_max: int) -> dict:
        return {
            "s1": ("certified", "supported on all of N"),
            "s2": ("certified", "singletons have upper density zero"),
            "s3": ("certified", "the full set has upper density one"),
        }

    def to_json(self) -> dict:
        return {"kind": "upper-density"}


# -- matrix kernels ---------------------------------------------------------


class MatrixKernel:
    """Row weights r_{n,k} >= 0 with finitely many nonzero entries per row."""

    name = "?"

    def row_max(self, n: int) -> int:
        raise NotImplementedError

    def weight(self, n: int, k: int) -> Fraction:
        raise NotImplementedError

    def row_value(self, n: int, a: SymbolicSet) -> Fraction:
        raise NotImplementedError

    def row_sum(self, n: int) -> Fraction:
        from .sets import FULL

        return self.row_value(n, FULL)

    def level_set(self, a, delta, horizon) -> Optional[LevelSet]:
        return None

    def smoothness_items(self, k_max: int) -> Optional[dict]:
        return None

    def to_json(self) -> dict:
        raise NotImplementedError


class ExplicitRowsKernel(MatrixKernel):
    """Finite list of explicit rows; absent rows are zero."""

    name = "rows"

    def __init__(self, rows: Sequence[Sequence[tuple[int, Fraction]]]):
        self.rows = [
            sorted(((int(k), Fraction(w)) for k, w in row), key=lambda kw: kw[0])
            for row in rows
        ]
        for row in self.rows:
            for k, w in row:
                if k < 1 or w < 0:
                    raise ValidationError("rows need positive columns, weights >= 0")

    def _row(self, n: int):
        return self.rows[n - 1] if 1 <= n <= len(self.rows) else []

    def row_max(self, n: int) -> int:
        row = self._row(n)
        return row[-1][0] if row else 1

    def weight(self, n: int, k: int) -> Fraction:
        return next((w for k2, w in self._row(n) if k2 == k), ZERO)

    def row_value(self, n: int, a: SymbolicSet) -> Fraction:
        return sum((w for k, w in self._row(n) if a.contains(k)), ZERO)

    def level_set(self, a, delta, horizon) -> LevelSet:
        acc = _PieceAcc()
        for n in range(1, len(self.rows) + 1):
            if self.row_value(n, a) >= delta:
                acc.add_solid(n, n)
        return _finish(delta, horizon, acc, "exact", -1,
                       ["rows beyond the explicit list are zero"])

    def to_json(self) -> dict:
        from .codec import frac_json

        return {
            "kind": "matrix",
            "rows": [[[k, frac_json(w)] for k, w in row] for row in self.rows],
        }


class UniformScaledKernel(MatrixKernel):
    """r_{n,k} = n^{-e} for k <= n: row sums n^{1-e} (vanishing for e > 1)."""

    name = "uniform-scaled"

    def __init__(self, exponent: int = 2):
        if exponent < 1:
            raise ValidationError("exponent must be >= 1")
        self.exponent = exponent

    def row_max(self, n: int) -> int:
        return n

    def weight(self, n: int, k: int) -> Fraction:
        return Fraction(1, n**self.exponent) if k <= n else ZERO

    def row_value(self, n: int, a: SymbolicSet) -> Fraction:
        return Fraction(a.count(n), n**self.exponent)

    def level_set(self, a, delta, horizon) -> LevelSet:
        # count(a, n) <= n, so values are <= n^{1-e}; for e >= 2 only finitely
        # many indices can reach the threshold.
        acc = _PieceAcc()
        if self.exponent == 1:
            return uniform_level_set(a, delta, horizon)
        bound = 1
        while Fraction(1, bound ** (self.exponent - 1)) >= delta:
            bound += 1
        for n in range(1, bound + 1):
            if self.row_value(n, a) >= delta:
                acc.add_solid(n, n)
        return _finish(delta, horizon, acc, "exact", -1,
                       ["row totals decay below the threshold"])

    def smoothness_items(self, k_max: int) -> dict:
        if self.exponent > 1:
            return {
                "s1": ("certified", "supported on [1, n]"),
                "s2": ("certified", "masses n^-e vanish"),
                "s3": ("refuted", "row sums n^(1-e) tend to 0"),
            }
        return {
            "s1": ("certified", "supported on [1, n]"),
            "s2": ("certified", "masses 1/n vanish"),
            "s3": ("certified", "row sums are 1"),
        }

    def to_json(self) -> dict:
        return {"kind": "matrix", "kernel": "uniform-scaled",
                "exponent": self.exponent}


class MaskedUniformKernel(MatrixKernel):
    """lambda_n rows on indices n with n mod m in a residue list, zero rows off it."""

    name = "masked-uniform"

    def __init__(self, mod: int, residues: Sequence[int]):
        if mod < 1:
            raise ValidationError("mask modulus must be >= 1")
        self.mod = mod
        self.residues = tuple(sorted(set(r % mod for r in residues)))
        if not self.residues:
            raise ValidationError("mask needs at least one residue")

    def _on(self, n: int) -> bool:
        return n % self.mod in self.residues

    def row_max(self, n: int) -> int:
        return n

    def weight(self, n: int, k: int) -> Fraction:
        return Fraction(1, n) if self._on(n) and k <= n else ZERO

    def row_value(self, n: int, a: SymbolicSet) -> Fraction:
        return uniform_eval(a, n) if self._on(n) else ZERO

    def level_set(self, a, delta, horizon) -> Optional[LevelSet]:
        base = uniform_level_set(a, delta, horizon)
        if not base.exact:
            return None
        sel = [Residue(self.mod, r) for r in self.residues]
        sel_set = sel[0] if len(sel) == 1 else Union(sel)
        full = Intersection([sel_set, base.as_set()])
        return LevelSet(
            threshold=delta,
            horizon=horizon,
            pieces=(),
            tail="exact",
            cut=-1,
            facts=set_facts(full),
            notes=("masked uniform level set in symbolic form",),
            override_set=full,
        )

    def smoothness_items(self, k_max: int) -> dict:
        return {
            "s1": ("certified", "support descriptor [1, n] is nonempty"),
            "s2": ("certified", "masses are at most 1/n"),
            "s3": ("certified", "row sums equal 1 on the selected residues"),
        }

    def to_json(self) -> dict:
        return {"kind": "matrix", "kernel": "masked-uniform",
                "mod": self.mod, "residues": list(self.residues)}


class PrefixWindowKernel(MatrixKernel):
    """Uniform probability on [1, iota_n] for a nondecreasing integer iota."""

    name = "prefix-window"

    def __init__(self, iota: Callable[[int], int], iota_json: dict,
                 alpha_flat_tag: Optional[Fraction] = None):
        self.iota = iota
        self.iota_json = iota_json
        self.alpha_flat_tag = alpha_flat_tag

    def row_max(self, n: int) -> int:
        return self.iota(n)

    def weight(self, n: int, k: int) -> Fraction:
        i = self.iota(n)
        return Fraction(1, i) if k <= i else ZERO

    def row_value(self, n: int, a: SymbolicSet) -> Fraction:
        i = self.iota(n)
        return Fraction(a.count(i), i)

    def level_set(self, a, delta, horizon) -> Optional[LevelSet]:
        base = uniform_level_set(a, delta, max(self.iota(horizon), horizon))
        if not base.exact:
            return None
        # preimage of solid pieces under the nondecreasing iota
        if any(p.q != 1 for p in base.pieces):
            return None
        acc = _PieceAcc()
        for p in base.pieces:
            lo = _iota_first_at_least(self.iota, p.lo)
            if lo is None:
                continue
            if p.hi is None:
                acc.add_solid(lo, None)
                continue
            hi = _iota_last_at_most(self.iota, p.hi, lo)
            if hi is not None and hi >= lo:
                acc.add_solid(lo, hi)
        return _finish(delta, horizon, acc, "exact", -1,
                       ["preimage of the running-mean level set"])

    def smoothness_items(self, k_max: int) -> dict:
        return {
            "s1": ("certified", "support [1, iota_n] is nonempty"),
            "s2": ("certified", "masses 1/iota_n vanish as iota_n grows"),
            "s3": ("certified", "rows are probability vectors"),
        }

    def to_json(self) -> dict:
        return {"kind": "matrix", "kernel": "prefix-window", **self.iota_json}


def _iota_first_at_least(iota, target, lo=1, hi=None) -> Optional[int]:
    if iota(lo) >= target:
        return lo
    step = 1
    n = lo
    while iota(n) < target:
        step *= 2
        n = lo + step
        if step > 1 << 62:
            return None
    lo2, hi2 = n - step // 2, n
    while lo2 < hi2:
        mid = (lo2 + hi2) // 2
        if iota(mid) >= target:
            hi2 = mid
        else:
            lo2 = mid + 1
    return lo2


def _iota_last_at_most(iota, target, lo=1) -> Optional[int]:
    if iota(lo) > target:
        return None
    step = 1
    n = lo
    while iota(n) <= target:
        step *= 2
        n = lo + step
        if step > 1 << 62:
            return None
    lo2, hi2 = max(lo, n - step), n - 1
    while lo2 < hi2:
        mid = (lo2 + hi2 + 1) // 2
        if iota(mid) <= target:
            lo2 = mid
        else:
            hi2 = mid - 1
    return lo2


class MatrixRows(SubmeasureSeq):
    """Submeasure sequence mu_n(A) = sum over k in A of r_{n,k}."""

    def __init__(self, kernel: MatrixKernel):
        self.kernel = kernel
        self.name = f"matrix-{kernel.name}"
        self.probability = False
        self.lsc = True

    def support(self, n: int) -> SymbolicSet:
        from .levelsets import window_set

        return window_set(1, self.kernel.row_max(n))

    def support_max(self, n: int) -> int:
        return self.kernel.row_max(n)

    def eval_set(self, n: int, a: SymbolicSet) -> Fraction:
        return self.kernel.row_value(n, a)

    def level_set(self, a, delta, horizon):
        ls = self.kernel.level_set(a, delta, horizon)
        if ls is not None:
            return ls
        acc = _PieceAcc()
        for n in range(1, min(horizon, 4096) + 1):
            if self.eval_set(n, a) >= delta:
                acc.add_solid(n, n)
        return _finish(delta, horizon, acc, "unknown", min(horizon, 4096),
                       ["kernel has no tail certificate"])

    def singleton_mass(self, n: int, k: int) -> Fraction:
        return self.kernel.weight(n, k)

    def smoothness_items(self, k_max: int) -> dict:
        items = self.kernel.smoothness_items(k_max)
        return items if items is not None else {}

    def to_json(self) -> dict:
        return self.kernel.to_json()


def flat_family_matrix(
    iota_mult: Fraction = ONE,
    iota_pow: Fraction = ONE,
    gamma: Fraction = Fraction(1, 8),
    validate_to: int = 256,
) -> MatrixRows:
    """Probability rows uniform on [1, iota_n], iota_n = ceil(b * n^beta).

    Validates, with exact arithmetic on n <= validate_to:
      (i) iota_n <= b' n^beta, (ii) iota increments <= c n^gamma,
      (iii) singleton-mass increments <= d / n^(2 beta - gamma),
      (iv) masses vanish beyond iota_n (structural),
    and tags the sequence alpha-flat with alpha = delta - beta = beta - gamma
    (the binding exponent pair; the support-size/mass-increment pairing, not
    the crossed one, is what the telescoped row-difference bound uses).
    """
    b, beta = Fraction(iota_mult), Fraction(iota_pow)
    if b <= 0 or beta <= 0 or beta < gamma:
        raise ValidationError("need b > 0 and 0 < gamma <= beta")

    r, s = beta.numerator, beta.denominator

    def iota(n: int) -> int:
        # ceil(b * n^(r/s)) computed exactly: smallest i with (i*qb)^s >= (pb*n^r)^?
        pb, qb = b.numerator, b.denominator
        target = pb**s * n**r
        i = max(1, _int_root(target // qb**s, s))
        while (i * qb) ** s < target:
            i += 1
        while i > 1 and ((i - 1) * qb) ** s >= target:
            i -= 1
        return i

    delta_exp = 2 * beta - gamma
    alpha = beta - gamma
    incs, mass_incs = [], []
    for n in range(1, validate_to):
        inc = iota(n + 1) - iota(n)
        if inc < 0:
            raise ValidationError("iota must be nondecreasing")
        incs.append((n, Fraction(inc)))
        mass_incs.append((n, abs(Fraction(1, iota(n + 1)) - Fraction(1, iota(n)))))
    cg = _dyadic_envelope_witness(incs, gamma)
    dg = _dyadic_envelope_witness(mass_incs, -delta_exp)
    kern = PrefixWindowKernel(
        iota,
        {"iota": {"mult": {"num": str(b.numerator), "den": str(b.denominator)},
                  "pow": {"num": str(beta.numerator), "den": str(beta.denominator)}}},
        alpha_flat_tag=alpha,
    )
    mu = MatrixRows(kern)
    mu.flat_validation = {
        "alpha": alpha,
        "gamma": gamma,
        "beta": beta,
        "delta_exponent": delta_exp,
        "c_witness": cg,
        "d_witness": dg,
        "validated_to": validate_to,
    }
    return mu


def _int_root(x: int, k: int) -> int:
    """floor(x ** (1/k)) for x >= 0."""
    if x < 0:
        raise ValidationError("negative radicand")
    if x in (0, 1) or k == 1:
        return x
    r = 1 << (-(-x.bit_length() // k) + 1)
    while True:  # Newton iteration on integers
        nr = ((k - 1) * r + x // r ** (k - 1)) // k
        if nr >= r:
            break
        r = nr
    while r**k > x:
        r -= 1
    return r


def le_power(v: Fraction, c: Fraction, n: int, e: Fraction) -> bool:
    """Exact test of v <= c * n^e for rational e = r/s (n >= 1)."""
    if c <= 0:
        return v <= 0
    r, s = e.numerator, e.denominator
    lhs = v / c
    if lhs <= 0:
        return True
    # v/c <= n^(r/s)  <=>  (v/c)^s <= n^r
    return lhs**s <= Fraction(n**r if r >= 0 else 1, 1 if r >= 0 else n**-r)


def _dyadic_envelope_witness(values: list, e: Fraction) -> Fraction:
    """Smallest power of two c with v <= c * n^e for all sampled (n, v)."""
    c = Fraction(1, 1 << 30)
    while not all(le_power(v, c, n, e) for n, v in values):
        c *= 2
        if c > 1 << 40:
            raise ValidationError("no reasonable envelope constant exists")
    return c


# ---------------------------------------------------------------------------
# Submeasure-level operations
# ---------------------------------------------------------------------------


def submeasure_eval(mu: SubmeasureSeq, n: int, a: SymbolicSet, h: int) -> Fraction:
    """mu_n(a ∩ [1, h]); h-independent once h covers a finite support."""
    return mu.evaluate(n, a, h)


@dataclass
class SmoothnessReport:
    verdict: str  # 'smooth' | 'refuted' | 'inconclusive'
    items: dict
    samples: dict

    def to_json(self) -> dict:
        from .codec import frac_json

        return {
            "verdict": self.verdict,
            "items": {k: list(v) for k, v in self.items.items()},
            "samples": {
                k: [[n, frac_json(v)] for n, v in vals]
                for k, vals in self.samples.items()
            },
        }


def smoothness_check(mu: SubmeasureSeq, k_max: int = 16) -> SmoothnessReport:
    """Check the smoothness conditions: nonempty supports, vanishing singleton
    masses, and positive limsup of total masses.

    The limit statements can only be certified structurally (per-instance
    closed forms) or refuted numerically; a generic instance with neither
    comes back inconclusive.
    """
    if k_max < 1:
        raise PreconditionError("need k_max >= 1")
    items = dict(mu.smoothness_items(k_max))
    samples: dict = {}
    sample_ns = [1, 2, 4, 8, 16, 64, 256]
    from .sets import FULL

    samples["total_mass"] = [(n, mu.eval_set(n, FULL)) for n in sample_ns]
    samples["singleton_1"] = [(n, mu.singleton_mass(n, 1)) for n in sample_ns]
    if "s1" not in items:
        items["s1"] = ("certified", "support descriptor present")
    if "s2" not in items:
        vals = [mu.singleton_mass(n, k) for n in sample_ns for k in range(1, k_max + 1)]
        items["s2"] = (
            "inconclusive",
            "no closed form; sampled masses max " + str(max(vals, default=ZERO)),
        )
    if "s3" not in items:
        items["s3"] = ("inconclusive", "no closed form; sampled totals only")
    statuses = [st for st, _ in items.values()]
    if any(st == "refuted" for st in statuses):
        verdict = "refuted"
    elif all(st == "certified" for st in statuses):
        verdict = "smooth"
    else:
        verdict = "inconclusive"
    return SmoothnessReport(verdict, items, samples)


@dataclass
class FlatCheckResult:
    holds: bool
    checked_to: int
    violation: Optional[tuple[int, Fraction, Fraction]]  # (n, |diff|, bound)

    def to_json(self) -> dict:
        from .codec import frac_json

        out = {"holds": self.holds, "checked_to": self.checked_to}
        if self.violation:
            n, diff, bound = self.violation
            out["violation"] = {"n": n, "difference": frac_json(diff),
                                "bound": frac_json(bound)}
        return out


def alpha_flat_check(
    mu: SubmeasureSeq,
    a: SymbolicSet,
    alpha: Fraction,
    d: Fraction,
    n_max: int,
) -> FlatCheckResult:
    """Verify |mu_{n+1}(a) - mu_n(a)| <= d / n^alpha for all n < n_max.

    Exact: for alpha = r/s the comparison is |diff|^s * n^r <= d^s.
    """
    alpha = Fraction(alpha)
    d = Fraction(d)
    if alpha <= 0 or d <= 0 or n_max < 2:
        raise PreconditionError("need alpha > 0, d > 0, n_max >= 2")
    r, s = alpha.numerator, alpha.denominator
    prev = mu.eval_set(1, a)
    for n in range(1, n_max):
        cur = mu.eval_set(n + 1, a)
        diff = abs(cur - prev)
        if diff**s * n**r > d**s:
            # report the violated bound as an approximation for the record
            bound = d / Fraction(_int_root(n**r, s) or 1)
            return FlatCheckResult(False, n_max, (n, diff, bound))
        prev = cur
    return FlatCheckResult(True, n_max, None)


def exh_tail(mu: SubmeasureSeq, a: SymbolicSet, n: int, h: int) -> Fraction:
    """max over k <= h of mu_k((a \\ [1, n]) ∩ [1, h]).

    Realizes the running sup of the induced lower-semicontinuous submeasure on
    the tail of ``a``; requires an LSC-flagged instance.
    """
    if not mu.lsc:
        raise PreconditionError("exhaustive tails need a lower-semicontinuous instance")
    if n < 0 or h < 1:
        raise PreconditionError("need n >= 0 and h >= 1")
    tail = Intersection([a, ray(n + 1)]) if n >= 1 else a

    if isinstance(mu, UniformMeasures):
        # candidates: stretch boundaries, per-phase first/last points (the
        # tail mean is monotone along each phase inside a periodic stretch),
        # every point of short opaque stretches, and h itself
        candidates: set[int] = {h}
        stream = stretch_stream(tail)
        if stream is not None:
            for st in stream:
                if st.start > h:
                    break
                candidates.add(st.start)
                end = h if st.end is None else min(st.end, h)
                candidates.add(end)
                if st.pattern is None:
                    if end - st.start > 300_000:
                        raise PreconditionError(
                            "opaque stretch too long for an exact running sup")
                    candidates.update(range(st.start, end + 1))
                elif st.pattern.period > 1:
                    q = st.pattern.period
                    for t in range(q):
                        first = st.start + ((t - st.start) % q)
                        if first <= end:
                            candidates.add(first)
                            candidates.add(first + (end - first) // q * q)
                if st.end is None or st.end >= h:
                    break
        best = ZERO
        for k in sorted(candidates):
            if 1 <= k <= h:
                v = uniform_eval(tail, k)
                if v > best:
                    best = v
        return best

    # finite-support instances: every index whose support fits under h
    best = ZERO
    k = 1
    while True:
        m = mu.support_max(k)
        if m is None:
            raise PreconditionError("no exhaustive-tail routine for this instance")
        if m > h:
            break
        v = mu.eval_set(k, tail)
        if v > best:
            best = v
        k += 1
        if k > 1 << 20:
            break
    return best


# ---------------------------------------------------------------------------
# Lacunary level sets
# ---------------------------------------------------------------------------

MAGNITUDE_BITS = 4096
CAUTIOUS_BITS = 31  # explicit-evaluation cap for sets without cheap counting
LACUNARY_EVAL_BUDGET = 300_000


def _superexp_probe(fam: IntervalFamily) -> bool:
    """True when the family's 48th interval already starts beyond 2^48, so
    enumerating intervals stays cheap at any representable magnitude."""
    try:
        l = fam.left_at(48)
    except (CostLimit, SetError):
        return True  # runs out of representable range even faster
    return l is None or l.bit_length() >= 48


def _scale_cheap(a: SymbolicSet, in_combo: bool = False) -> bool:
    """Whether exact counting of ``a`` stays cheap at astronomical arguments.

    Standalone families with closed-form counts qualify; inside Boolean
    combinations the intersection counter enumerates intervals, so only
    super-exponentially growing (or finite) families stay cheap there.
    """
    from .sets import FiniteSet, Residue, TwoAdicFiber

    if isinstance(a, (Residue, TwoAdicFiber, FiniteSet)):
        return True
    if isinstance(a, IntervalFamily):
        if a.gen.finite:
            return True
        if not in_combo and a.gen.count_closed(1) is not None:
            return True
        return _superexp_probe(a)
    if isinstance(a, Complement):
        return _scale_cheap(a.child, True)
    if isinstance(a, (Union, Intersection)):
        return all(_scale_cheap(c, True) for c in a.children)
    return False


def lacunary_level_set(
    scheme: BlockScheme, a: SymbolicSet, delta: Fraction, block_horizon: int = 256
) -> LevelSet:
    """{n : mu_n(a) >= delta} for the uniform-on-[a_n, a_{n+1}) sequence.

    Explicit exact evaluation while the endpoints stay below ~2^4096, then a
    tail certificate where the structure allows one:

    * eventually periodic ``a``: window counts stay within a constant of
      density * length, and window lengths grow, so the tail is decided by
      comparing delta with the density (with an exact stabilized-residue
      computation at equality for the factorial scheme);
    * families with a certified vanishing mean bound: tail empty;
    * unions of blocks of the same scheme: the window count has the closed
      form (len - 1) * sel(n+1) + sel(n), giving an exact periodic tail.
    """
    if delta <= 0:
        raise ValidationError("threshold must be positive")
    p, s = delta.numerator, delta.denominator
    acc = _PieceAcc()
    notes: list[str] = []

    align = _alignment_of(scheme, a)
    cheap = _scale_cheap(a) or align is not None
    bit_cap = MAGNITUDE_BITS if cheap else CAUTIOUS_BITS

    j = 1
    prev_hi_count = None  # count(a, a_j - 1) carried between adjacent windows
    try:
        with emission_budget(LACUNARY_EVAL_BUDGET):
            while j <= block_horizon and scheme.next_bits(j) <= bit_cap:
                lo, hi = scheme.a(j), scheme.a(j + 1) - 1
                ln = hi - lo + 1
                if align is not None and j >= align.start \
                        and scheme.next_bits(j) > CAUTIOUS_BITS:
                    cnt = align.window_count(j, ln)
                    prev_hi_count = None
                else:
                    c_lo = prev_hi_count if prev_hi_count is not None \
                        else a.count(lo - 1)
                    prev_hi_count = a.count(hi)
                    cnt = prev_hi_count - c_lo
                if s * cnt >= p * ln:
                    acc.add_solid(j, j)
                j += 1
    except CostLimit:
        notes.append(f"evaluation budget exhausted at block {j}")
        return _finish(delta, block_horizon, acc, "unknown", j - 1, notes)
    cut = j - 1

    # ---- tail certificates ----
    if align is not None and not scheme.finite:
        return _alignment_tail(scheme, a, align, delta, acc, cut, notes,
                               block_horizon)

    prof = a.periodic_profile()
    if prof is not None:
        return _periodic_window_tail(scheme, a, prof, delta, acc, cut, notes,
                                     block_horizon)

    sup = lambda_sup_bound(a, scheme.a(cut) + 1)
    if sup is not None and scheme.ratio_to_zero and 2 * sup < delta:
        # mu_j(a) <= count(a, a_{j+1}) / len_j <= 2 * sup once a_j <= a_{j+1}/2
        if 2 * scheme.a(cut) <= scheme.a(cut + 1):
            notes.append("window means certified below threshold beyond cut")
            return _finish(delta, block_horizon, acc, "exact", -1, notes)

    notes.append("no tail certificate for lacunary windows")
    return _finish(delta, block_horizon, acc, "unknown", cut, notes)


def _alignment_of(scheme: BlockScheme, a: SymbolicSet):
    """SchemeAlignment of ``a`` against ``scheme`` when derivable, else None.

    Alignments compose under complement and Boolean combinations because the
    window interiors are all-or-nothing for every aligned constituent.
    """
    if scheme.name is None:
        return None
    if isinstance(a, IntervalFamily):
        al = a.gen.tags.alignment
        return al if al is not None and al.scheme == scheme.name else None
    if isinstance(a, Complement):
        inner = _alignment_of(scheme, a.child)
        return inner.negate() if inner is not None else None
    if isinstance(a, (Union, Intersection)):
        op = "union" if isinstance(a, Union) else "intersection"
        cur = None
        for c in a.children:
            al = _alignment_of(scheme, c)
            if al is None:
                return None
            cur = al if cur is None else cur.combine(al, op)
            if cur is None:
                return None
        return cur
    return None


def _alignment_tail(scheme, a, align, delta, acc, cut, notes,
                    block_horizon) -> LevelSet:
    p, s = delta.numerator, delta.denominator
    period = align.mod
    # window j eventually qualifies iff its interior is covered and, at
    # delta == 1, its left endpoint belongs as well; lengths must first be
    # large enough that the two endpoint corrections cannot flip the
    # comparison
    need = 2 + (s // max(s - p, 1)) + (s // max(p, 1))
    start = max(cut + 1, align.start)
    while scheme.next_bits(start) <= MAGNITUDE_BITS and \
            scheme.a(start + 1) - scheme.a(start) < need:
        start += 1
        if start > cut + 4096:
            notes.append("aligned tail could not stabilize")
            return _finish(delta, block_horizon, acc, "unknown", cut, notes)
    for j in range(cut + 1, start):
        lo, hi = scheme.a(j), scheme.a(j + 1) - 1
        ln = hi - lo + 1
        if j >= align.start:
            cnt = align.window_count(j, ln)
        else:
            cnt = a.count(hi) - a.count(lo - 1)
        if s * cnt >= p * ln:
            acc.add_solid(j, j)
    phases = []
    for t in range(period):
        inside = t in align.interior
        ep = t in align.endpoint
        if inside and (delta < 1 or ep):
            phases.append(t)
    if phases:
        if len(phases) == period:
            acc.add_solid(start, None)
        else:
            acc.add(Piece(start, None, period, tuple(sorted(phases))))
    notes.append("scheme-aligned windows: exact periodic tail")
    return _finish(delta, block_horizon, acc, "exact", -1, notes)


def _periodic_window_tail(scheme, a, prof, delta, acc, cut, notes,
                          block_horizon) -> LevelSet:
    p, s = delta.numerator, delta.denominator
    q = prof.pattern.period
    pp = prof.pattern.per_period
    dens = Fraction(pp, q)
    if not scheme.ratio_to_zero:
        notes.append("scheme lengths not certified to grow")
        return _finish(delta, block_horizon, acc, "unknown", cut, notes)
    # |count(x) - dens*x| <= c0 for x >= start, with c0 from one period plus
    # the prefix deviation at start
    start = prof.start
    c0 = Fraction(2 * pp + q) + abs(Fraction(a.count(start), 1) - dens * start)
    if dens != delta:
        # windows decide once 2*c0 / len < |dens - delta|
        gap = abs(dens - delta)
        j = cut + 1
        while scheme.next_bits(j) <= MAGNITUDE_BITS and (
            Fraction(2 * c0, scheme.a(j + 1) - scheme.a(j)) >= gap
            or scheme.a(j) < start
        ):
            # evaluate explicitly while the bound is not yet conclusive
            lo, hi = scheme.a(j), scheme.a(j + 1) - 1
            ln = hi - lo + 1
            cnt = a.count(hi) - a.count(lo - 1)
            if s * cnt >= p * ln:
                acc.add_solid(j, j)
            j += 1
            if j > cut + 65536:
                notes.append("periodic window bound failed to stabilize")
                return _finish(delta, block_horizon, acc, "unknown", j - 1, notes)
        if dens > delta:
            acc.add_solid(j, None)
            notes.append("window means certified above threshold from block "
                         + str(j))
        else:
            notes.append("window means certified below threshold from block "
                         + str(j))
        return _finish(delta, block_horizon, acc, "exact", -1, notes)
    # equality: for the factorial scheme the endpoints stabilize mod q, making
    # the comparison a fixed integer
    if scheme.name == "factorial":
        j0 = max(cut + 1, q + 1, scheme.index_of(start) + 1)
        lo, hi = scheme.a(j0), scheme.a(j0 + 1) - 1
        ln = hi - lo + 1
        cnt = a.count(hi) - a.count(lo - 1)
        holds = s * cnt >= p * ln
        for j in range(cut + 1, j0):
            lo, hi = scheme.a(j), scheme.a(j + 1) - 1
            ln = hi - lo + 1
            c = a.count(hi) - a.count(lo - 1)
            if s * c >= p * ln:
                acc.add_solid(j, j)
        if holds:
            acc.add_solid(j0, None)
        notes.append("stabilized endpoints decide the threshold equality")
        return _finish(delta, block_horizon, acc, "exact", -1, notes)
    notes.append("threshold equals the window density; no stabilization rule")
    return _finish(delta, block_horizon, acc, "unknown", cut, notes)
