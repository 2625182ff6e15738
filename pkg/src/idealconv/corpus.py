"""The shipped set and sequence corpus.

A corpus is a versioned JSON document of named symbolic sets and named
symbolic sequences.  The shipped corpus is generated deterministically from a
seed: the named standards (squares, evens, the factorial run set, tower
blocks, 2-adic fibers), a family of seeded randomized interval families, and
Boolean combinations, together with the derived indicator sequences plus
block-constant, formula, and ramp sequences.  Generation is byte-for-byte
reproducible for a fixed seed.
"""

from __future__ import annotations

import json
import random
from pathlib import Path

from .codec import dumps, set_from_json
from .convergence import sequence_from_json
from .sets import ValidationError

SCHEMA_VERSION = 1
DEFAULT_SEED = 1
CORPUS_SIZE = 50


def _named_standards() -> list[tuple[str, dict]]:
    return [
        ("factorial-A", {"kind": "intervals", "gen": "factorial"}),
        ("evens", {"kind": "residue", "mod": 2, "res": 0}),
        ("odds", {"kind": "residue", "mod": 2, "res": 1}),
        ("squares", {"kind": "intervals", "gen": "squares"}),
        ("powers2", {"kind": "intervals", "gen": "powers2"}),
        ("factorial-double", {"kind": "intervals", "gen": "factorial-double"}),
        ("factorial-short", {"kind": "intervals", "gen": "factorial-short"}),
        ("tower-blocks", {"kind": "block-union", "scheme": "tower",
                          "mod": 2, "residues": [1]}),
        ("factorial-odd-blocks", {"kind": "block-union", "scheme": "factorial",
                                  "mod": 2, "residues": [1]}),
        ("fiber-0", {"kind": "fiber2", "k": 0}),
        ("fiber-1", {"kind": "fiber2", "k": 1}),
        ("fiber-2", {"kind": "fiber2", "k": 2}),
        ("threes", {"kind": "residue", "mod": 3, "res": 1}),
        ("twelves", {"kind": "residue", "mod": 12, "res": 5}),
        ("small-finite", {"kind": "finite", "elems": [1, 4, 9, 16, 25]}),
        ("empty", {"kind": "finite", "elems": []}),
        ("factorial-A-complement",
         {"kind": "complement", "of": {"kind": "intervals", "gen": "factorial"}}),
        ("evens-minus-squares",
         {"kind": "intersection", "of": [
             {"kind": "residue", "mod": 2, "res": 0},
             {"kind": "complement", "of": {"kind": "intervals", "gen": "squares"}},
         ]}),
        ("evens-in-factorial-A",
         {"kind": "intersection", "of": [
             {"kind": "residue", "mod": 2, "res": 0},
             {"kind": "intervals", "gen": "factorial"},
         ]}),
        ("squares-or-threes",
         {"kind": "union", "of": [
             {"kind": "intervals", "gen": "squares"},
             {"kind": "residue", "mod": 3, "res": 1},
         ]}),
    ]


def _random_sets(rng: random.Random, count: int) -> list[tuple[str, dict]]:
    out = []
    for i in range(count):
        if i % 3 == 0:
            d = {
                "kind": "intervals", "gen": "ratio",
                "start": rng.randrange(2, 40),
                "rho": rng.choice([2, 2, 3]),
                "gap": rng.choice([2, 3, 5]),
            }
        elif i % 3 == 1:
            d = {
                "kind": "intervals", "gen": "sparse",
                "start": rng.randrange(2, 60),
                "gap": rng.choice([2, 3, 4, 5]),
            }
        else:
            lo = 1
            endpoints = []
            for _ in range(rng.randrange(3, 9)):
                lo += rng.randrange(1, 40)
                hi = lo + rng.randrange(0, 25)
                endpoints.append([lo, hi])
                lo = hi + 1
            d = {"kind": "intervals", "endpoints": endpoints}
        out.append((f"rand-{i:02d}", d))
    return out


def _residue_mixes(rng: random.Random, count: int) -> list[tuple[str, dict]]:
    out = []
    for i in range(count):
        q1 = rng.choice([2, 3, 4, 5, 6])
        q2 = rng.choice([2, 3, 4, 5, 6, 8])
        r1, r2 = rng.randrange(q1), rng.randrange(q2)
        op = rng.choice(["union", "intersection"])
        d = {"kind": op, "of": [
            {"kind": "residue", "mod": q1, "res": r1},
            {"kind": "residue", "mod": q2, "res": r2},
        ]}
        if rng.random() < 0.3:
            d = {"kind": "complement", "of": d}
        out.append((f"mix-{i:02d}", d))
    return out


def generate(seed: int = DEFAULT_SEED, size: int = CORPUS_SIZE) -> dict:
    """Deterministic corpus document with ``size`` sets and the derived
    sequence list (indicators plus block-constant, formula, and ramp
    sequences)."""
    rng = random.Random(seed)
    sets = list(_named_standards())
    n_random = max(10, (size - len(sets)) * 2 // 3)
    sets += _random_sets(rng, n_random)
    sets += _residue_mixes(rng, max(0, size - len(sets)))
    sets = sets[:size]

    sequences: list[tuple[str, dict]] = []
    for name, d in sets:
        sequences.append((f"ind-{name}", {"kind": "indicator", "set": d}))
    sequences += [
        ("block-periodic-factorial",
         {"kind": "block-constant", "scheme": "factorial", "values": "periodic",
          "cycle": [{"num": "1", "den": "1"}, {"num": "0", "den": "1"},
                    {"num": "0", "den": "1"}]}),
        ("block-halves-tower",
         {"kind": "block-constant", "scheme": "tower", "values": "periodic",
          "cycle": [{"num": "1", "den": "2"}, {"num": "0", "den": "1"}]}),
        ("block-decay-factorial",
         {"kind": "block-constant", "scheme": "factorial", "values": "decay",
          "top": {"num": "1", "den": "1"}}),
        ("formula-zero", {"kind": "formula", "name": "constant",
                          "param": {"num": "0", "den": "1"}}),
        ("formula-third", {"kind": "formula", "name": "constant",
                           "param": {"num": "1", "den": "3"}}),
        ("formula-inv-index", {"kind": "formula", "name": "inv-index",
                               "param": {"num": "1", "den": "1"}}),
        ("formula-inv-sqrt", {"kind": "formula", "name": "inv-sqrt-ceil",
                              "param": {"num": "1", "den": "1"}}),
        ("ramp-spike",
         {"kind": "ramp", "anchors": [
             [1, {"num": "0", "den": "1"}],
             [64, {"num": "0", "den": "1"}],
             [80, {"num": "1", "den": "2"}],
             [96, {"num": "0", "den": "1"}],
         ]}),
    ]

    return {
        "version": SCHEMA_VERSION,
        "seed": seed,
        "sets": [{"name": n, "set": d} for n, d in sets],
        "sequences": [{"name": n, "seq": d} for n, d in sequences],
    }


def shipped_corpus() -> dict:
    return generate(DEFAULT_SEED, CORPUS_SIZE)


def validate(doc: dict) -> None:
    """Schema check; raises naming the offending entry."""
    if not isinstance(doc, dict) or doc.get("version") != SCHEMA_VERSION:
        raise ValidationError(
            f"corpus version must be {SCHEMA_VERSION}, got {doc.get('version')!r}"
        )
    for section, key, parser in (("sets", "set", set_from_json),
                                 ("sequences", "seq", sequence_from_json)):
        entries = doc.get(section, [])
        if not isinstance(entries, list):
            raise ValidationError(f"corpus section {section!r} must be a list")
        seen = set()
        for entry in entries:
            name = entry.get("name") if isinstance(entry, dict) else None
            if not name:
                raise ValidationError(f"unnamed entry in {section!r}")
            if name in seen:
                raise ValidationError(f"duplicate corpus entry {name!r}")
            seen.add(name)
            try:
                parser(entry[key])
            except Exception as e:
                raise ValidationError(f"corpus entry {name!r} is invalid: {e}") from None


def save(doc: dict, path) -> None:
    validate(doc)
    Path(path).write_text(dumps(doc) + "\n")


def load(path) -> dict:
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as e:
        raise ValidationError(f"corpus file is not JSON: {e}") from None
    validate(doc)
    return doc


def materialize_sets(doc: dict) -> list:
    return [(e["name"], set_from_json(e["set"])) for e in doc["sets"]]


def materialize_sequences(doc: dict) -> list:
    return [(e["name"], sequence_from_json(e["seq"])) for e in doc["sequences"]]
