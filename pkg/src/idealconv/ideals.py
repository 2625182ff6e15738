"""Ideal-membership oracles.

An ideal here is a downward-closed, union-closed family of subsets of N
containing the finite sets; proper if it is not all of P(N).  The oracles
below decide membership for the concrete ideals the engine ships:

* ``fin``             -- finite sets;
* ``zeta``            -- upper asymptotic density zero;
* ``summable``        -- convergent harmonic subseries;
* ``empty-times-fin`` -- all 2-adic fibers finite (a copy of the product of
                         the trivial ideal with the finite one);
* vanishing ideals of a submeasure sequence: limsup mu_n(A ∩ I_n) = 0;
* derived ideals of a pair (ideal, mu): {A : mu_n(A) -> 0 along the ideal},
  the unique ideal whose convergence matches (ideal, mu)-convergence;
* ideals generated by a fixed set together with the finite sets.

Verdicts are three-valued and certificate-backed; Certified verdicts are
stable under raising any horizon.  Membership is decided from certified
structural facts, so an oracle never claims more than the analysis layer can
justify: the honest answer for an arbitrary combination without closed-form
density is Undecided.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .analysis import SetFacts, set_facts
from .functionals import (
    ConstantUpperDensity,
    LacunaryBlocks,
    MatrixRows,
    MaskedUniformKernel,
    PrefixWindowKernel,
    ExplicitRowsKernel,
    UniformMeasures,
    UniformScaledKernel,
    PreconditionError,
    SubmeasureSeq,
    _alignment_of,
    lambda_sup_bound,
    summable_verdict,
    upper_density,
)
from .levelsets import LevelSet
from .sets import (
    Complement,
    Intersection,
    SymbolicSet,
    ValidationError,
)
from .verdicts import IN, OUT, UNDECIDED, Verdict, certified_in, certified_out, undecided

EPS_GRID_DEFAULT = tuple(Fraction(1, m) for m in range(1, 21))


class IdealOracle:
    """Decision procedure for one ideal."""

    name = "?"
    proper = True
    # names of oracles KNOWN (proved) to contain this ideal
    known_supersets: tuple[str, ...] = ()

    def decide(self, a: SymbolicSet, horizon: int = 10**6) -> Verdict:
        return self.decide_facts(set_facts(a), horizon)

    def decide_facts(self, facts: SetFacts, horizon: int = 10**6) -> Verdict:
        raise NotImplementedError

    def decide_level(self, level: LevelSet, horizon: int = 10**6) -> Verdict:
        if level.exact:
            return self.decide(level.as_set(), horizon)
        v = self.decide_facts(level.facts, horizon)
        if v.status == UNDECIDED:
            return undecided(
                "level-set tail uncertified: " + (v.certificate or ""),
                horizon=level.cut,
                witness={"level": level.summary()},
            )
        return v

    def to_json(self) -> dict:
        return {"ideal": self.name}


class FinIdeal(IdealOracle):
    name = "fin"
    known_supersets = ("zeta", "summable", "empty-times-fin")

    def decide_facts(self, facts: SetFacts, horizon: int = 10**6) -> Verdict:
        if facts.finite:
            return certified_in("finite")
        if facts.finite is False:
            return certified_out("infinite")
        return undecided("finiteness not certified", horizon=horizon)


class DensityZeroIdeal(IdealOracle):
    """Sets of upper asymptotic density zero."""

    name = "zeta"

    def decide_facts(self, facts: SetFacts, horizon: int = 10**6) -> Verdict:
        if facts.dstar_zero:
            return certified_in("upper density certified zero")
        if facts.dstar_low is not None and facts.dstar_low > 0:
            return certified_out(
                "upper density certified positive",
                witness={"lower_bound": {"num": str(facts.dstar_low.numerator),
                                         "den": str(facts.dstar_low.denominator)}},
            )
        return undecided("no density certificate", horizon=horizon)


class SummableIdeal(IdealOracle):
    name = "summable"
    known_supersets = ("zeta",)

    def decide(self, a: SymbolicSet, horizon: int = 10**6) -> Verdict:
        return summable_verdict(a, trace_to=min(horizon, 10_000))

    def decide_facts(self, facts: SetFacts, horizon: int = 10**6) -> Verdict:
        if facts.harmonic == "converges":
            return certified_in("harmonic series converges")
        if facts.harmonic == "diverges":
            return certified_out("harmonic series diverges")
        return undecided("no harmonic certificate", horizon=horizon)


class EmptyTimesFin(IdealOracle):
    """Sets whose 2-adic fibers {n : v2(n) = k} are all finite."""

    name = "empty-times-fin"
    known_supersets = ("zeta",)

    def decide_facts(self, facts: SetFacts, horizon: int = 10**6) -> Verdict:
        if facts.fibers_all_finite:
            return certified_in("every 2-adic fiber is finite")
        if facts.fibers_all_finite is False:
            return certified_out("some 2-adic fiber is infinite")
        return undecided("fiber structure not certified", horizon=horizon)


class VanishingIdeal(IdealOracle):
    """{A : limsup mu_n(A ∩ I_n) = 0} for a smooth submeasure sequence."""

    def __init__(self, mu: SubmeasureSeq, eps_grid: Sequence[Fraction] = EPS_GRID_DEFAULT):
        self.mu = mu
        self.eps_grid = tuple(eps_grid)
        self.name = f"zmu:{mu.name}"

    def decide(self, a: SymbolicSet, horizon: int = 10**6) -> Verdict:
        v = _mu_vanishing(self.mu, a, horizon)
        if v is not None:
            return v
        # probe: a certified-infinite level set at any eps refutes vanishing
        for eps in sorted(self.eps_grid):
            level = self.mu.level_set(a, eps, horizon)
            if level.facts.finite is False:
                return certified_out(
                    f"level set at {eps} is infinite",
                    witness={"eps": {"num": str(eps.numerator),
                                     "den": str(eps.denominator)},
                             "level": level.summary()},
                )
        return undecided("no vanishing certificate", horizon=horizon)

    def decide_facts(self, facts: SetFacts, horizon: int = 10**6) -> Verdict:
        if facts.finite:
            return certified_in("finite sets vanish under smooth sequences")
        if facts.cofinite:
            return certified_out(
                "cofinite sets inherit the positive limsup of the total masses")
        if isinstance(self.mu, (UniformMeasures, ConstantUpperDensity)):
            # vanishing under these instances is exactly upper density zero
            if facts.dstar_zero:
                return certified_in("upper density certified zero")
            if facts.dstar_low is not None and facts.dstar_low > 0:
                return certified_out("upper density certified positive")
        return undecided("vanishing needs the set itself", horizon=horizon)

    def to_json(self) -> dict:
        return {"ideal": "zmu", "mu": self.mu.to_json()}


def _mu_vanishing(mu: SubmeasureSeq, a: SymbolicSet, horizon: int) -> Optional[Verdict]:
    """Structural decision of limsup mu_n(a) = 0, by instance."""
    facts = set_facts(a)
    if facts.finite:
        return certified_in("finite set")

    if isinstance(mu, UniformMeasures):
        if facts.dstar_zero:
            return certified_in("upper density zero")
        if facts.dstar_low is not None and facts.dstar_low > 0:
            return certified_out("upper density positive")
        return None

    if isinstance(mu, ConstantUpperDensity):
        res = upper_density(a, mu.horizon)
        if not res.certified:
            return None
        if res.value == 0:
            return certified_in("constant value zero")
        return certified_out("constant value positive",
                             witness={"value": {"num": str(res.value.numerator),
                                                "den": str(res.value.denominator)}})

    if isinstance(mu, LacunaryBlocks):
        align = _alignment_of(mu.scheme, a)
        if align is not None:
            if align.interior:
                return certified_out("window means approach 1 on covered blocks")
            return certified_in("windows meet at most endpoints; means vanish")
        prof = a.periodic_profile()
        if prof is not None:
            if prof.pattern.per_period > 0 and mu.scheme.ratio_to_zero:
                return certified_out("window means approach the positive density")
            return None
        sup = lambda_sup_bound(a, 2)
        if sup is not None and mu.scheme.ratio_to_zero:
            return certified_in("vanishing mean bound dominates the windows")
        return None

    if isinstance(mu, MatrixRows):
        k = mu.kernel
        if isinstance(k, UniformScaledKernel):
            if k.exponent > 1:
                return certified_in("row totals vanish")
            return _mu_vanishing(UniformMeasures(), a, horizon)
        if isinstance(k, MaskedUniformKernel):
            if facts.dstar_zero:
                return certified_in("upper density zero")
            if facts.dstar_low is not None and facts.dstar_low > 0:
                return certified_out(
                    "running means stay high on the selected residues")
            return None
        if isinstance(k, PrefixWindowKernel):
            if facts.dstar_zero:
                return certified_in("upper density zero")
            return None
        if isinstance(k, ExplicitRowsKernel):
            return certified_in("finitely many nonzero rows")
    return None


class DerivedIdeal(IdealOracle):
    """J(base, mu) = {A : mu_n(A) -> 0 along the base ideal}.

    Membership tests, for each eps on the grid, whether the level set
    {n : mu_n(A) >= eps} belongs to the base ideal.  Level sets shrink as eps
    grows and ideals are downward closed, so the verdict at the smallest grid
    eps decides the whole grid.
    """

    def __init__(self, base: IdealOracle, mu: SubmeasureSeq,
                 eps_grid: Sequence[Fraction] = EPS_GRID_DEFAULT):
        self.base = base
        self.mu = mu
        self.eps_grid = tuple(sorted(set(Fraction(e) for e in eps_grid)))
        if not self.eps_grid or self.eps_grid[0] <= 0 or self.eps_grid[-1] > 1:
            raise ValidationError("eps grid values must lie in (0, 1]")
        self.name = f"j-of:{base.name}:{mu.name}"

    def decide(self, a: SymbolicSet, horizon: int = 10**6) -> Verdict:
        eps_min = self.eps_grid[0]
        level = self.mu.level_set(a, eps_min, horizon)
        v = self.base.decide_level(level, horizon)
        if v.status == IN:
            return certified_in(
                "level set at the finest grid threshold is in the base ideal; "
                "verdicts are monotone in the threshold",
                witness={"eps": _fj(eps_min), "level": level.summary(),
                         "base": v.to_json()},
            )
        # refutation search: level sets shrink along the grid and ideals are
        # downward closed, so representative thresholds carry the signal
        probes = sorted({eps_min, self.eps_grid[len(self.eps_grid) // 2],
                         self.eps_grid[-1]})
        for eps in probes:
            lv = level if eps == eps_min else self.mu.level_set(a, eps, horizon)
            bv = v if eps == eps_min else self.base.decide_level(lv, horizon)
            if bv.status == OUT:
                return certified_out(
                    f"level set at grid threshold stays outside {self.base.name}",
                    witness={"eps": _fj(eps), "level": lv.summary(),
                             "base": bv.to_json()},
                )
        return undecided("grid verdicts did not certify either direction",
                         horizon=horizon)

    def decide_facts(self, facts: SetFacts, horizon: int = 10**6) -> Verdict:
        if facts.finite:
            return certified_in("finite sets vanish under smooth sequences")
        return undecided("derived membership needs the set itself",
                         horizon=horizon)

    def to_json(self) -> dict:
        return {"ideal": "j-of", "base": self.base.to_json(),
                "mu": self.mu.to_json()}


class GeneratedIdeal(IdealOracle):
    """Smallest ideal containing a fixed set and all finite sets."""

    def __init__(self, seed: SymbolicSet, name: str = "generated"):
        self.seed = seed
        self.name = name

    def decide(self, a: SymbolicSet, horizon: int = 10**6) -> Verdict:
        rest = Intersection([a, Complement(self.seed)])
        f = set_facts(rest)
        if f.finite:
            return certified_in("contained in the seed up to a finite set")
        if f.finite is False:
            return certified_out("infinitely many elements outside the seed")
        return undecided("remainder finiteness not certified", horizon=horizon)

    def decide_facts(self, facts: SetFacts, horizon: int = 10**6) -> Verdict:
        if facts.finite:
            return certified_in("finite")
        return undecided("generated membership needs the set itself",
                         horizon=horizon)


def _fj(x: Fraction) -> dict:
    return {"num": str(x.numerator), "den": str(x.denominator)}


# ---------------------------------------------------------------------------
# Operations
# ---------------------------------------------------------------------------

FIN = FinIdeal()
ZETA = DensityZeroIdeal()
SUMMABLE = SummableIdeal()
EMPTY_TIMES_FIN = EmptyTimesFin()

_BASE_ORACLES = {o.name: o for o in (FIN, ZETA, SUMMABLE, EMPTY_TIMES_FIN)}


def oracle_by_name(name: str) -> IdealOracle:
    if name in _BASE_ORACLES:
        return _BASE_ORACLES[name]
    if name.startswith("zmu:"):
        from .codec import submeasure_from_json
        import json

        return VanishingIdeal(submeasure_from_json(json.loads(name[4:])))
    if name.startswith("j-of:"):
        from .codec import submeasure_from_json
        import json

        rest = name[5:]
        base_name, mu_json = rest.split(":", 1)
        return j_of(oracle_by_name(base_name), submeasure_from_json(json.loads(mu_json)))
    raise ValidationError(f"unknown ideal {name!r}")


def membership(ideal: IdealOracle, a: SymbolicSet, horizon: int = 10**6) -> Verdict:
    """Decide A ∈ ideal with a certificate, degrading to Undecided."""
    return ideal.decide(a, horizon)


def j_of(ideal: IdealOracle, mu: SubmeasureSeq,
         eps_grid: Sequence[Fraction] = EPS_GRID_DEFAULT) -> DerivedIdeal:
    """The unique ideal whose plain convergence matches (ideal, mu)-convergence."""
    return DerivedIdeal(ideal, mu, eps_grid)


def proper_check(j: DerivedIdeal, horizon: int = 10**6) -> dict:
    """Proper iff N does not belong, i.e. mu_n(N) does not vanish along the base."""
    from .sets import FULL

    v = j.decide(FULL, horizon)
    verdict = {"in": "improper", "out": "proper", "undecided": "undecided"}[v.status]
    return {"result": verdict, "membership_of_full_set": v.to_json()}


@dataclass
class ThickReport:
    alpha: Fraction
    c: Fraction
    checked: list  # (n, hi, contained)
    ideal_verdict: Verdict
    structural: Optional[str]
    consistent: bool

    def to_json(self) -> dict:
        return {
            "alpha": _fj(self.alpha),
            "c": _fj(self.c),
            "checked": [[n, hi, bool(ok)] for n, hi, ok in self.checked],
            "ideal_verdict": self.ideal_verdict.to_json(),
            "structural": self.structural,
            "consistent": self.consistent,
        }


def _interval_top(n: int, c: Fraction, alpha: Fraction) -> int:
    """Largest integer m with m - n <= c * n^alpha (alpha = r/s rational)."""
    r, s = alpha.numerator, alpha.denominator
    cp, cq = c.numerator, c.denominator
    # k <= c * n^(r/s)  <=>  (k * cq)^s <= cp^s * n^r
    target = cp**s * n**r
    k = _int_root_local(target // (cq**s), s)
    while ((k + 1) * cq) ** s <= target:
        k += 1
    while k > 0 and (k * cq) ** s > target:
        k -= 1
    return n + k


def _int_root_local(x: int, k: int) -> int:
    from .functionals import _int_root

    return _int_root(x, k)


def alpha_thick_check(
    ideal: IdealOracle,
    alpha: Fraction,
    a: SymbolicSet,
    c: Fraction,
    witness_ns: Sequence[int],
    horizon: int = 10**6,
) -> ThickReport:
    """Probe the thickness obstruction for an ideal.

    Verifies [n, n + c n^alpha] ⊆ a exactly at the witness points and pairs
    that with the ideal's verdict on ``a``; a thickness refutation would be
    "intervals verified AND a certified inside".  For the density-zero ideal
    at alpha = 1 the thickness is certified structurally: a set containing
    [n, (1+c) n] has upper density at least c / (1 + c).
    """
    alpha = Fraction(alpha)
    c = Fraction(c)
    if alpha <= 0 or c <= 0:
        raise PreconditionError("need alpha > 0 and c > 0")
    checked = []
    for n in witness_ns:
        hi = _interval_top(n, c, alpha)
        contained = a.count(hi) - a.count(n - 1) == hi - n + 1
        checked.append((n, hi, contained))
    v = ideal.decide(a, horizon)
    structural = None
    if ideal.name == "zeta" and alpha == 1:
        bound = c / (1 + c)
        structural = (
            "certified 1-thick: a set containing [n, (1+c)n] infinitely often "
            f"has upper density at least {bound}"
        )
    consistent = not (all(ok for _, _, ok in checked) and v.status == IN)
    return ThickReport(alpha, c, checked, v, structural, consistent)


@dataclass
class InclusionReport:
    first: str
    second: str
    refutations: list
    undecided: list
    agreements: int

    @property
    def refuted(self) -> bool:
        return bool(self.refutations)

    def to_json(self) -> dict:
        return {
            "first": self.first,
            "second": self.second,
            "refutations": self.refutations,
            "undecided": self.undecided,
            "agreements": self.agreements,
            "conclusion": (
                "inclusion refuted" if self.refutations else
                "no refutation found (evidence, not proof)"
            ),
        }


def inclusion_probe(
    first: IdealOracle,
    second: IdealOracle,
    corpus: Sequence[tuple[str, SymbolicSet]],
    horizon: int = 10**6,
) -> InclusionReport:
    """Search a corpus for a member of ``first`` certified outside ``second``."""
    refutations, undecided_names, agree = [], [], 0
    for name, a in corpus:
        v1 = first.decide(a, horizon)
        v2 = second.decide(a, horizon)
        if v1.status == IN and v2.status == OUT:
            refutations.append({"set": name, "first": v1.to_json(),
                                "second": v2.to_json()})
        elif v1.status == UNDECIDED or v2.status == UNDECIDED:
            undecided_names.append(name)
        else:
            agree += 1
    return InclusionReport(first.name, second.name, refutations,
                           undecided_names, agree)
