"""Convergence verdicts for symbolic real sequences.

Three modes, all reduced to exact level-set computations plus ideal
membership:

* plain ideal convergence: for each eps, the deviation set
  D_eps = {n : |x_n - limit| >= eps} must belong to the ideal;
* statistical-style convergence: for each (eps, delta), the set of indices n
  where the running mean of D_eps reaches delta must belong to the ideal;
* submeasure convergence: the same with mu_n(D_eps) in place of the running
  mean.

The space is fixed to the rationals with the standard metric, so deviation
sets have closed forms for every shipped sequence variant and all arithmetic
stays exact.  Thresholds are closed (>=) on both grids.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional, Sequence

from .functionals import PreconditionError, SubmeasureSeq, UniformMeasures
from .ideals import EPS_GRID_DEFAULT, IdealOracle, IN, OUT, UNDECIDED
from .levelsets import ray, window_set
from .sets import (
    BlockScheme,
    Complement,
    EMPTY,
    FULL,
    SymbolicSet,
    Union,
    ValidationError,
    block_union,
    explicit_family,
)

ZERO = Fraction(0)
ONE = Fraction(1)
DELTA_GRID_DEFAULT = EPS_GRID_DEFAULT


# ---------------------------------------------------------------------------
# Sequences
# ---------------------------------------------------------------------------


class SymbolicSequence:
    """A real sequence with exact rational evaluation at every index."""

    def value(self, n: int) -> Fraction:
        raise NotImplementedError

    def deviation_set(self, limit: Fraction, eps: Fraction) -> SymbolicSet:
        """{n : |x_n - limit| >= eps} as a symbolic set (exact)."""
        raise NotImplementedError

    def slope_certificate(self) -> Optional[Fraction]:
        """d such that |x_{n+1} - x_n| <= d / n for all n, when certified."""
        return None

    def to_json(self) -> dict:
        raise NotImplementedError


class IndicatorSequence(SymbolicSequence):
    """x_n = 1 if n in A else 0."""

    def __init__(self, a: SymbolicSet):
        self.set = a

    def value(self, n: int) -> Fraction:
        return ONE if self.set.contains(n) else ZERO

    def deviation_set(self, limit: Fraction, eps: Fraction) -> SymbolicSet:
        parts = []
        if abs(ONE - limit) >= eps:
            parts.append(self.set)
        if abs(limit) >= eps:
            parts.append(Complement(self.set))
        if not parts:
            return EMPTY
        if len(parts) == 2:
            return FULL
        return parts[0]

    def to_json(self) -> dict:
        return {"kind": "indicator", "set": self.set.to_json()}


class BlockValues:
    """Rational value of block j, with an exact deviation selector."""

    def value(self, j: int) -> Fraction:
        raise NotImplementedError

    def deviating_blocks(self, limit: Fraction, eps: Fraction):
        """(kind, payload) describing {j : |v_j - limit| >= eps}:
        ('residues', mod, tuple) | ('finite', tuple) | ('cofinite', tuple)."""
        raise NotImplementedError

    def to_json(self) -> dict:
        raise NotImplementedError


class PeriodicBlockValues(BlockValues):
    def __init__(self, values: Sequence[Fraction]):
        self.values = tuple(Fraction(v) for v in values)
        if not self.values:
            raise ValidationError("need at least one block value")

    def value(self, j: int) -> Fraction:
        return self.values[(j - 1) % len(self.values)]

    def deviating_blocks(self, limit, eps):
        m = len(self.values)
        rs = tuple(
            j % m for j in range(1, m + 1) if abs(self.values[j - 1] - limit) >= eps
        )
        return ("residues", m, rs)

    def to_json(self) -> dict:
        from .codec import frac_json

        return {"values": "periodic", "cycle": [frac_json(v) for v in self.values]}


class DecayBlockValues(BlockValues):
    """v_j = top / j: converges to zero in the ordinary sense."""

    def __init__(self, top: Fraction = ONE):
        self.top = Fraction(top)

    def value(self, j: int) -> Fraction:
        return self.top / j

    def deviating_blocks(self, limit, eps):
        hi_thr = limit + eps
        lo_thr = limit - eps
        if hi_thr <= 0:
            return ("cofinite", ())  # positive values always deviate upward
        j_hi = _floor(self.top / hi_thr)  # last block with value >= hi_thr
        if lo_thr > 0:
            j_lo = _ceil(self.top / lo_thr)  # first block with value <= lo_thr
            return ("cofinite", tuple(range(j_hi + 1, j_lo)))
        return ("finite", tuple(range(1, j_hi + 1)))

    def to_json(self) -> dict:
        from .codec import frac_json

        return {"values": "decay", "top": frac_json(self.top)}


class BlockConstantSeq(SymbolicSequence):
    """Constant on each scheme block (a_{j-1}, a_j]."""

    def __init__(self, scheme: BlockScheme, values: BlockValues):
        if scheme.finite:
            raise ValidationError("block-constant sequences need an infinite scheme")
        self.scheme = scheme
        self.values = values

    def value(self, n: int) -> Fraction:
        return self.values.value(self.scheme.index_of(n))

    def deviation_set(self, limit: Fraction, eps: Fraction) -> SymbolicSet:
        kind, *payload = self.values.deviating_blocks(limit, eps)
        if kind == "residues":
            mod, rs = payload
            if not rs:
                return EMPTY
            if len(rs) == mod:
                return FULL
            return block_union(self.scheme, mod, rs)
        if kind == "finite":
            (js,) = payload
            ivs = [list(self.scheme.block(j)) for j in sorted(js)]
            merged = []
            for l, r in ivs:
                if merged and l <= merged[-1][1] + 1:
                    merged[-1][1] = max(merged[-1][1], r)
                else:
                    merged.append([l, r])
            return explicit_family(merged) if merged else EMPTY
        if kind == "cofinite":
            (js,) = payload
            if not js:
                return FULL
            ivs = [list(self.scheme.block(j)) for j in sorted(js)]
            merged = []
            for l, r in ivs:
                if merged and l <= merged[-1][1] + 1:
                    merged[-1][1] = max(merged[-1][1], r)
                else:
                    merged.append([l, r])
            return Complement(explicit_family(merged))
        raise ValidationError(f"unknown selector {kind!r}")

    def to_json(self) -> dict:
        return {"kind": "block-constant", **self.scheme.to_json(),
                **self.values.to_json()}


class FormulaSeq(SymbolicSequence):
    """Named exact closed forms, monotone from some point on."""

    def __init__(self, name: str, param: Fraction = ONE):
        if name not in ("constant", "inv-index", "inv-sqrt-ceil"):
            raise ValidationError(f"unknown formula {name!r}")
        self.name = name
        self.param = Fraction(param)

    def value(self, n: int) -> Fraction:
        if self.name == "constant":
            return self.param
        if self.name == "inv-index":
            return self.param / n
        from math import isqrt

        k = isqrt(n - 1) + 1  # ceil(sqrt(n))
        return self.param / k

    def slope_certificate(self) -> Optional[Fraction]:
        if self.name == "constant":
            return ZERO
        # both decaying families move by at most param/n per step
        return abs(self.param)

    def deviation_set(self, limit: Fraction, eps: Fraction) -> SymbolicSet:
        if self.name == "constant":
            return FULL if abs(self.param - limit) >= eps else EMPTY
        # values are positive and nonincreasing with limit 0
        hi_thr = limit + eps  # x_n >= hi_thr -> deviating above
        lo_thr = limit - eps  # x_n <= lo_thr -> deviating below
        parts = []
        if hi_thr <= 0:
            return FULL
        last_hi = self._last_n_with_value_ge(hi_thr)
        if last_hi is not None and last_hi >= 1:
            parts.append(window_set(1, last_hi))
        if lo_thr > 0:
            first_lo = self._first_n_with_value_le(lo_thr)
            if first_lo is not None:
                parts.append(ray(first_lo))
        elif lo_thr == 0:
            pass  # values never reach 0
        if not parts:
            return EMPTY
        return parts[0] if len(parts) == 1 else Union(parts)

    def _last_n_with_value_ge(self, y: Fraction) -> Optional[int]:
        if self.value(1) < y:
            return None
        lo, hi = 1, 2
        while self.value(hi) >= y:
            hi *= 2
            if hi > 1 << 62:
                return None
        while lo < hi - 1:
            mid = (lo + hi) // 2
            if self.value(mid) >= y:
                lo = mid
            else:
                hi = mid
        return lo

    def _first_n_with_value_le(self, y: Fraction) -> Optional[int]:
        if self.value(1) <= y:
            return 1
        lo, hi = 1, 2
        while self.value(hi) > y:
            hi *= 2
            if hi > 1 << 62:
                return None
        while lo < hi - 1:
            mid = (lo + hi) // 2
            if self.value(mid) > y:
                lo = mid
            else:
                hi = mid
        return hi

    def to_json(self) -> dict:
        from .codec import frac_json

        return {"kind": "formula", "name": self.name, "param": frac_json(self.param)}


class RampSequence(SymbolicSequence):
    """Piecewise-linear interpolation through rational anchor points.

    Anchors (n_0, v_0), ..., (n_k, v_k) with n_0 = 1; the value is constant
    v_k beyond the last anchor.  Used for slope-constrained constructions.
    """

    def __init__(self, anchors: Sequence[tuple[int, Fraction]]):
        pts = [(int(n), Fraction(v)) for n, v in anchors]
        if not pts or pts[0][0] != 1:
            raise ValidationError("ramp anchors must start at index 1")
        for (n1, _), (n2, _) in zip(pts, pts[1:]):
            if n2 <= n1:
                raise ValidationError("ramp anchors must be strictly increasing")
        self.anchors = pts

    def value(self, n: int) -> Fraction:
        if n < 1:
            raise PreconditionError("indices start at 1")
        pts = self.anchors
        if n >= pts[-1][0]:
            return pts[-1][1]
        from bisect import bisect_right

        i = bisect_right([p[0] for p in pts], n) - 1
        (n1, v1), (n2, v2) = pts[i], pts[i + 1]
        return v1 + (v2 - v1) * (n - n1) / (n2 - n1)

    def max_slope_violation(self, d_of_n: Callable[[int], Fraction]) -> Optional[int]:
        """First n with |x_{n+1} - x_n| > d_of_n(n), or None.

        Within a linear piece the step is constant while the allowance
        d_of_n(n) is checked at the piece's worst index.
        """
        pts = self.anchors
        for (n1, v1), (n2, v2) in zip(pts, pts[1:]):
            step = abs(v2 - v1) / (n2 - n1)
            if step == 0:
                continue
            # the allowance is smallest at the largest index of the piece
            for n in (n1, n2 - 1):
                if step > d_of_n(n):
                    # scan for the first violating index in the piece
                    for m in range(n1, n2):
                        if step > d_of_n(m):
                            return m
        return None

    def slope_certificate(self) -> Optional[Fraction]:
        # smallest d with |step| <= d/n for all pieces, if the check passes
        best = ZERO
        pts = self.anchors
        for (n1, v1), (n2, v2) in zip(pts, pts[1:]):
            step = abs(v2 - v1) / (n2 - n1)
            need = step * (n2 - 1)
            if need > best:
                best = need
        return best

    def deviation_set(self, limit: Fraction, eps: Fraction) -> SymbolicSet:
        out: list[list[int]] = []

        def add(lo: int, hi: int) -> None:
            if hi < lo:
                return
            if out and lo <= out[-1][1] + 1:
                out[-1][1] = max(out[-1][1], hi)
            else:
                out.append([lo, hi])

        pts = self.anchors
        for (n1, v1), (n2, v2) in zip(pts, pts[1:]):
            for lo, hi in self._piece_deviation(n1, v1, n2, v2, limit, eps):
                add(lo, hi)
        tail_dev = abs(pts[-1][1] - limit) >= eps
        head = explicit_family(out) if out else EMPTY
        if tail_dev:
            return Union([head, ray(pts[-1][0])]) if out else ray(pts[-1][0])
        return head

    @staticmethod
    def _piece_deviation(n1, v1, n2, v2, limit, eps):
        """Deviating integer subranges of [n1, n2 - 1] along a linear piece.

        A line leaves a closed band at most twice: the region below on one
        side and the region above on the other, each solvable exactly.
        """
        lo_t, hi_t = limit - eps, limit + eps
        last = n2 - 1
        slope = Fraction(v2 - v1, n2 - n1)
        segs = []
        if slope == 0:
            if abs(v1 - limit) >= eps:
                segs.append((n1, last))
        elif slope > 0:
            if v1 <= lo_t:
                top = n1 + (lo_t - v1) / slope  # stays <= lo_t up to here
                segs.append((n1, min(last, _floor(top))))
            fh = _ceil(n1 + (hi_t - v1) / slope)  # first index at or above hi_t
            if fh <= last:
                segs.append((max(n1, fh), last))
        else:
            if v1 >= hi_t:
                top = n1 + (hi_t - v1) / slope
                segs.append((n1, min(last, _floor(top))))
            fl = _ceil(n1 + (lo_t - v1) / slope)
            if fl <= last:
                segs.append((max(n1, fl), last))
        return [(lo, hi) for lo, hi in segs if hi >= lo]

    def to_json(self) -> dict:
        from .codec import frac_json

        return {
            "kind": "ramp",
            "anchors": [[n, frac_json(v)] for n, v in self.anchors],
        }


def _floor(x: Fraction) -> int:
    return x.numerator // x.denominator


def _ceil(x: Fraction) -> int:
    return -((-x.numerator) // x.denominator)


def sequence_from_json(d) -> SymbolicSequence:
    from .codec import frac_from_json, scheme_from_json, set_from_json

    kind = d.get("kind")
    if kind == "indicator":
        return IndicatorSequence(set_from_json(d["set"]))
    if kind == "block-constant":
        scheme = scheme_from_json(d)
        if d.get("values") == "periodic":
            vals = PeriodicBlockValues([frac_from_json(v) for v in d["cycle"]])
        elif d.get("values") == "decay":
            vals = DecayBlockValues(frac_from_json(d.get("top", 1)))
        else:
            raise ValidationError("unknown block values")
        return BlockConstantSeq(scheme, vals)
    if kind == "formula":
        return FormulaSeq(d["name"], frac_from_json(d.get("param", 1)))
    if kind == "ramp":
        return RampSequence([(n, frac_from_json(v)) for n, v in d["anchors"]])
    raise ValidationError(f"unknown sequence kind {kind!r}")


# ---------------------------------------------------------------------------
# Reports and verdict engines
# ---------------------------------------------------------------------------

CONVERGES = "converges"
DIVERGES = "diverges"


@dataclass
class ConvergenceReport:
    mode: str
    limit: Fraction
    ideal: str
    mu: Optional[dict]
    eps_grid: tuple
    delta_grid: Optional[tuple]
    horizon: int
    cells: list
    overall: str  # 'converges' | 'diverges' | 'undecided'

    @property
    def certified(self) -> bool:
        return self.overall in (CONVERGES, DIVERGES)

    def to_json(self) -> dict:
        from .codec import frac_json

        return {
            "mode": self.mode,
            "limit": frac_json(self.limit),
            "ideal": self.ideal,
            **({"mu": self.mu} if self.mu else {}),
            "eps_grid": [frac_json(e) for e in self.eps_grid],
            **(
                {"delta_grid": [frac_json(d) for d in self.delta_grid]}
                if self.delta_grid is not None
                else {}
            ),
            "horizon": self.horizon,
            "cells": self.cells,
            "overall": self.overall,
        }


def _fj(x: Fraction) -> dict:
    return {"num": str(x.numerator), "den": str(x.denominator)}


def ideal_limit(
    x: SymbolicSequence,
    ideal: IdealOracle,
    limit: Fraction,
    eps_grid: Sequence[Fraction] = EPS_GRID_DEFAULT,
    horizon: int = 10**6,
) -> ConvergenceReport:
    """Plain ideal convergence: every deviation set must lie in the ideal.

    Deviation sets shrink as eps grows, so the finest grid eps decides
    convergence; a certified refutation at any eps decides divergence.
    """
    limit = Fraction(limit)
    grid = tuple(sorted(set(Fraction(e) for e in eps_grid)))
    cells = []
    overall = None
    d_min = x.deviation_set(limit, grid[0])
    v_min = ideal.decide(d_min, horizon)
    cells.append({"eps": _fj(grid[0]), "verdict": v_min.to_json()})
    if v_min.status == IN:
        overall = CONVERGES
        cells[-1]["note"] = "decides every coarser threshold by monotonicity"
    else:
        # deviation sets shrink as eps grows, so a refutation at any probe
        # threshold already decides divergence
        probes = sorted({grid[0], grid[len(grid) // 2], grid[-1]})
        for eps in probes:
            if eps == grid[0]:
                v = v_min
            else:
                v = ideal.decide(x.deviation_set(limit, eps), horizon)
                cells.append({"eps": _fj(eps), "verdict": v.to_json()})
            if v.status == OUT:
                overall = DIVERGES
                break
        if overall is None:
            overall = UNDECIDED
    return ConvergenceReport(
        "ideal", limit, ideal.name, None, grid, None, horizon, cells, overall
    )


def imu_limit(
    x: SymbolicSequence,
    ideal: IdealOracle,
    mu: SubmeasureSeq,
    limit: Fraction,
    eps_grid: Sequence[Fraction] = EPS_GRID_DEFAULT,
    delta_grid: Sequence[Fraction] = DELTA_GRID_DEFAULT,
    horizon: int = 10**6,
) -> ConvergenceReport:
    """Submeasure convergence: for each (eps, delta) the level set
    {n : mu_n(D_eps) >= delta} must lie in the ideal.

    Both families are monotone (deviation sets shrink as eps grows; level
    sets shrink as delta grows), so the pair of finest thresholds decides
    convergence and any certified refutation decides divergence.
    """
    limit = Fraction(limit)
    egrid = tuple(sorted(set(Fraction(e) for e in eps_grid)))
    dgrid = tuple(sorted(set(Fraction(d) for d in delta_grid)))
    cells = []
    d_min = x.deviation_set(limit, egrid[0])
    level_min = mu.level_set(d_min, dgrid[0], horizon)
    v_min = ideal.decide_level(level_min, horizon)
    cells.append({
        "eps": _fj(egrid[0]),
        "delta": _fj(dgrid[0]),
        "level": level_min.summary(),
        "verdict": v_min.to_json(),
    })
    if v_min.status == IN:
        cells[-1]["note"] = "decides every coarser grid pair by monotonicity"
        overall = CONVERGES
    else:
        # refutation search: any certified-outside cell decides divergence.
        # Level sets only shrink along both grids and ideals are downward
        # closed, so representative corners and the diagonal carry the signal;
        # the full grid would only repeat subsets of the finest cell.
        overall = None
        probes = {egrid[0], egrid[len(egrid) // 2], egrid[-1]}
        dprobes = {dgrid[0], dgrid[len(dgrid) // 2], dgrid[-1]}
        for eps in sorted(probes):
            dev = x.deviation_set(limit, eps)
            for delta in sorted(dprobes):
                if (eps, delta) == (egrid[0], dgrid[0]):
                    v = v_min
                else:
                    level = mu.level_set(dev, delta, horizon)
                    v = ideal.decide_level(level, horizon)
                    cells.append({"eps": _fj(eps), "delta": _fj(delta),
                                  "level": level.summary(),
                                  "verdict": v.to_json()})
                if v.status == OUT:
                    overall = DIVERGES
                    break
            if overall:
                break
        if overall is None:
            overall = UNDECIDED
    return ConvergenceReport(
        "imu", limit, ideal.name, mu.to_json(), egrid, dgrid, horizon, cells,
        overall,
    )


def istat_limit(
    x: SymbolicSequence,
    ideal: IdealOracle,
    limit: Fraction,
    eps_grid: Sequence[Fraction] = EPS_GRID_DEFAULT,
    delta_grid: Sequence[Fraction] = DELTA_GRID_DEFAULT,
    horizon: int = 10**6,
) -> ConvergenceReport:
    """Running-mean statistical convergence along an ideal (the uniform
    submeasure specialization of :func:`imu_limit`)."""
    rep = imu_limit(x, ideal, UniformMeasures(), limit, eps_grid, delta_grid,
                    horizon)
    rep.mode = "istat"
    return rep


def stat_limit(
    x: SymbolicSequence,
    limit: Fraction,
    eps_grid: Sequence[Fraction] = EPS_GRID_DEFAULT,
    delta_grid: Sequence[Fraction] = DELTA_GRID_DEFAULT,
    horizon: int = 10**6,
) -> ConvergenceReport:
    """Plain statistical convergence (finite-ideal special case)."""
    from .ideals import FIN

    rep = istat_limit(x, FIN, limit, eps_grid, delta_grid, horizon)
    rep.mode = "stat"
    return rep


@dataclass
class HarnessReport:
    name: str
    checked: int
    vacuous: int
    falsifications: list
    undecided: list

    @property
    def ok(self) -> bool:
        return not self.falsifications

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "checked": self.checked,
            "vacuous": self.vacuous,
            "falsifications": self.falsifications,
            "undecided": self.undecided,
            "ok": self.ok,
        }


def implication_harness(
    corpus: Sequence[tuple[str, SymbolicSequence]],
    mu: SubmeasureSeq,
    nu: SubmeasureSeq,
    limit: Fraction,
    horizon: int = 10**6,
) -> HarnessReport:
    """Vanishing-ideal convergence implies submeasure convergence along the
    other vanishing ideal; a falsification here would be a corpus sequence
    certified convergent in the first sense and divergent in the second.
    """
    from .ideals import VanishingIdeal

    zmu = VanishingIdeal(mu)
    znu = VanishingIdeal(nu)
    fal, und = [], []
    checked = vacuous = 0
    for name, x in corpus:
        v1 = ideal_limit(x, zmu, limit, horizon=horizon)
        if v1.overall != CONVERGES:
            vacuous += 1
            if v1.overall == UNDECIDED:
                und.append(name)
            continue
        v2 = imu_limit(x, znu, mu, limit, horizon=horizon)
        checked += 1
        if v2.overall == DIVERGES:
            fal.append({"sequence": name, "first": v1.overall,
                        "second": v2.overall})
        elif v2.overall == UNDECIDED:
            und.append(name)
    return HarnessReport("vanishing-implies-pair-convergence", checked,
                         vacuous, fal, und)
