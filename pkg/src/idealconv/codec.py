"""JSON wire formats.

Rationals serialize as {"num": "...", "den": "..."} with decimal strings;
floats never appear in JSON output.  Symbolic sets, block schemes, and
submeasure sequences round-trip through the encodings below.
"""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Any

from .sets import (
    BlockScheme,
    BlockUnionGen,
    Complement,
    ExplicitIntervals,
    FiniteSet,
    Intersection,
    IntervalFamily,
    Residue,
    SymbolicSet,
    TwoAdicFiber,
    Union,
    ValidationError,
    make_block_scheme,
    make_generator,
)


def frac_json(x: Fraction) -> dict:
    x = Fraction(x)
    return {"num": str(x.numerator), "den": str(x.denominator)}


def frac_from_json(d: Any) -> Fraction:
    if isinstance(d, dict):
        return Fraction(int(d["num"]), int(d["den"]))
    if isinstance(d, int):
        return Fraction(d)
    if isinstance(d, str):
        return Fraction(d)  # "p/q" or "p"
    raise ValidationError(f"not a rational: {d!r}")


def parse_rational(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as e:
        raise ValidationError(f"bad rational {text!r}: {e}") from None


def set_to_json(a: SymbolicSet) -> dict:
    return a.to_json()


def set_from_json(d: Any) -> SymbolicSet:
    if not isinstance(d, dict) or "kind" not in d:
        raise ValidationError("set description must be an object with a 'kind'")
    kind = d["kind"]
    if kind == "finite":
        return FiniteSet(d.get("elems", []))
    if kind == "residue":
        return Residue(int(d["mod"]), int(d["res"]))
    if kind == "fiber2":
        return TwoAdicFiber(int(d["k"]))
    if kind == "intervals":
        if "endpoints" in d:
            return IntervalFamily(ExplicitIntervals(d["endpoints"]))
        gen = d["gen"]
        if gen == "ratio":
            return IntervalFamily(make_generator(
                "ratio", start=int(d["start"]), rho=int(d["rho"]),
                gap=int(d["gap"])))
        if gen == "sparse":
            return IntervalFamily(make_generator(
                "sparse", start=int(d["start"]), gap=int(d["gap"])))
        return IntervalFamily(make_generator(gen))
    if kind == "block-union":
        scheme = scheme_from_json(d)
        return IntervalFamily(BlockUnionGen(scheme, int(d["mod"]), d["residues"]))
    if kind == "union":
        return Union([set_from_json(c) for c in d["of"]])
    if kind == "intersection":
        return Intersection([set_from_json(c) for c in d["of"]])
    if kind == "complement":
        return Complement(set_from_json(d["of"]))
    raise ValidationError(f"unknown set kind {kind!r}")


def scheme_from_json(d: Any) -> BlockScheme:
    spec = d["scheme"] if isinstance(d, dict) else d
    return make_block_scheme(spec)


def submeasure_from_json(d: Any):
    from .functionals import (
        ConstantUpperDensity,
        ExplicitRowsKernel,
        LacunaryBlocks,
        MaskedUniformKernel,
        MatrixRows,
        UniformMeasures,
        UniformScaledKernel,
        flat_family_matrix,
    )

    if not isinstance(d, dict) or "kind" not in d:
        raise ValidationError("submeasure description must have a 'kind'")
    kind = d["kind"]
    if kind == "uniform":
        return UniformMeasures()
    if kind == "lacunary":
        return LacunaryBlocks(scheme_from_json(d))
    if kind == "upper-density":
        return ConstantUpperDensity()
    if kind == "matrix":
        kernel = d.get("kernel")
        if kernel is None and "rows" in d:
            rows = [
                [(int(k), frac_from_json(w)) for k, w in row] for row in d["rows"]
            ]
            return MatrixRows(ExplicitRowsKernel(rows))
        if kernel == "uniform-scaled":
            return MatrixRows(UniformScaledKernel(int(d.get("exponent", 2))))
        if kernel == "masked-uniform":
            return MatrixRows(MaskedUniformKernel(int(d["mod"]), d["residues"]))
        if kernel == "prefix-window":
            iota = d["iota"]
            return flat_family_matrix(
                frac_from_json(iota["mult"]), frac_from_json(iota["pow"])
            )
        raise ValidationError(f"unknown matrix kernel {kernel!r}")
    raise ValidationError(f"unknown submeasure kind {kind!r}")


def dumps(obj: Any) -> str:
    """Deterministic JSON: sorted keys, no float formatting surprises."""
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))
