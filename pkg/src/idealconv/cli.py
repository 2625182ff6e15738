"""Command-line front end.

Subcommands: count, density, member, converge, tauberian, corpus.  All
reports are JSON with sorted keys; rationals are {"num": ..., "den": ...}
decimal strings, never floats.  Exit codes: 0 for a positive verdict or pass,
1 negative, 2 undecided, 64 usage error.  The default horizon comes from the
IDEALCONV_HORIZON environment variable when set, or a JSON config file passed
with --config.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass
from fractions import Fraction

from . import corpus as corpus_mod
from .codec import dumps, frac_json, parse_rational, set_from_json, submeasure_from_json
from .convergence import (
    CONVERGES,
    DIVERGES,
    ideal_limit,
    imu_limit,
    istat_limit,
    sequence_from_json,
)
from .functionals import harmonic_partial, upper_density
from .ideals import membership, oracle_by_name
from .sets import SetError, ValidationError, make_block_scheme
from .tauberian import (
    blockmean_check,
    claim1_bound_check,
    claim2_window_check,
    character_harness,
    figure_series,
    fridy_check,
    sharpness_search,
    single_peak_sequence,
)
from .verdicts import IN, OUT, UNDECIDED

EXIT_POSITIVE = 0
EXIT_NEGATIVE = 1
EXIT_UNDECIDED = 2
EXIT_USAGE = 64


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    horizon: int = 10**6
    eps_grid: tuple = tuple(Fraction(1, m) for m in range(1, 21))
    delta_grid: tuple = tuple(Fraction(1, m) for m in range(1, 21))
    output: str = "json"

    def __post_init__(self):
        if self.horizon < 10**3:
            raise UsageError("horizon must be at least 1000")
        for g in (self.eps_grid, self.delta_grid):
            if not g or any(not (0 < v <= 1) for v in g):
                raise UsageError("grid values must lie in (0, 1]")
        if self.output not in ("json", "csv", "table"):
            raise UsageError(f"unknown output format {self.output!r}")


def _load_config(args) -> RunConfig:
    horizon = None
    output = "json"
    if args.config:
        try:
            raw = json.loads(open(args.config).read())
        except (OSError, json.JSONDecodeError) as e:
            raise UsageError(f"bad config file: {e}")
        horizon = raw.get("horizon", horizon)
        output = raw.get("output", output)
    env = os.environ.get("IDEALCONV_HORIZON")
    if env:
        try:
            horizon = int(env)
        except ValueError:
            raise UsageError("IDEALCONV_HORIZON must be an integer")
    if getattr(args, "horizon", None):
        horizon = args.horizon
    if getattr(args, "format", None):
        output = args.format
    return RunConfig(horizon=horizon or 10**6, output=output)


def _parse_json_arg(text: str, what: str) -> dict:
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise UsageError(f"malformed {what} JSON at position {e.pos}: {e.msg}")


def _emit(obj, cfg: RunConfig) -> None:
    if cfg.output == "table":
        for k, v in sorted(obj.items()):
            print(f"{k}\t{json.dumps(v, sort_keys=True)}")
    else:
        print(dumps(obj))


def _verdict_exit(status: str) -> int:
    return {IN: EXIT_POSITIVE, OUT: EXIT_NEGATIVE,
            UNDECIDED: EXIT_UNDECIDED}[status]


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def cmd_count(args, cfg: RunConfig) -> int:
    a = set_from_json(_parse_json_arg(args.set, "set"))
    if args.n < 1:
        raise UsageError("n must be >= 1")
    _emit({"n": args.n, "count": a.count(args.n),
           "member": a.contains(args.n)}, cfg)
    return EXIT_POSITIVE


def cmd_density(args, cfg: RunConfig) -> int:
    a = set_from_json(_parse_json_arg(args.set, "set"))
    res = upper_density(a, cfg.horizon)
    _emit({"upper_density": res.to_json()}, cfg)
    return EXIT_POSITIVE if res.certified else EXIT_UNDECIDED


def cmd_member(args, cfg: RunConfig) -> int:
    try:
        ideal = oracle_by_name(args.ideal)
    except ValidationError as e:
        raise UsageError(str(e))
    a = set_from_json(_parse_json_arg(args.set, "set"))
    v = membership(ideal, a, cfg.horizon)
    _emit({"ideal": ideal.name, "verdict": v.to_json()}, cfg)
    return _verdict_exit(v.status)


def cmd_harmonic(args, cfg: RunConfig) -> int:
    a = set_from_json(_parse_json_arg(args.set, "set"))
    val = harmonic_partial(a, args.n)
    _emit({"n": args.n, "partial_sum": frac_json(val)}, cfg)
    return EXIT_POSITIVE


def cmd_converge(args, cfg: RunConfig) -> int:
    x = sequence_from_json(_parse_json_arg(args.seq, "sequence"))
    try:
        ideal = oracle_by_name(args.ideal)
    except ValidationError as e:
        raise UsageError(str(e))
    limit = parse_rational(args.limit)
    if args.mode == "ideal":
        rep = ideal_limit(x, ideal, limit, cfg.eps_grid, cfg.horizon)
    elif args.mode == "istat":
        rep = istat_limit(x, ideal, limit, cfg.eps_grid, cfg.delta_grid,
                          cfg.horizon)
    else:
        if not args.mu:
            raise UsageError("--mu is required for imu mode")
        mu = submeasure_from_json(_parse_json_arg(args.mu, "submeasure"))
        rep = imu_limit(x, ideal, mu, limit, cfg.eps_grid, cfg.delta_grid,
                        cfg.horizon)
    _emit(rep.to_json(), cfg)
    if rep.overall == CONVERGES:
        return EXIT_POSITIVE
    if rep.overall == DIVERGES:
        return EXIT_NEGATIVE
    return EXIT_UNDECIDED


def cmd_corpus(args, cfg: RunConfig) -> int:
    if args.action == "generate":
        doc = corpus_mod.generate(args.seed, args.size)
        if args.out:
            corpus_mod.save(doc, args.out)
            _emit({"written": args.out, "sets": len(doc["sets"]),
                   "sequences": len(doc["sequences"])}, cfg)
        else:
            print(dumps(doc))
        return EXIT_POSITIVE
    if args.action == "save":
        corpus_mod.save(corpus_mod.shipped_corpus(), args.out or "corpus.json")
        _emit({"written": args.out or "corpus.json"}, cfg)
        return EXIT_POSITIVE
    if args.action == "load":
        doc = corpus_mod.load(args.path) if args.path else corpus_mod.shipped_corpus()
        _emit({"version": doc["version"],
               "sets": [e["name"] for e in doc["sets"]],
               "sequences": [e["name"] for e in doc["sequences"]]}, cfg)
        return EXIT_POSITIVE
    raise UsageError(f"unknown corpus action {args.action!r}")


def cmd_tauberian(args, cfg: RunConfig) -> int:
    from .functionals import UniformMeasures

    mu = UniformMeasures()
    if args.mu:
        mu = submeasure_from_json(_parse_json_arg(args.mu, "submeasure"))
    if args.check == "claim1":
        a = set_from_json(_parse_json_arg(args.set, "set"))
        samples = [int(v) for v in (args.samples or "16,256,4096").split(",")]
        rep = claim1_bound_check(mu, a, parse_rational(args.alpha),
                                 parse_rational(args.d),
                                 parse_rational(args.c), samples)
        _emit(rep.to_json(), cfg)
        return EXIT_POSITIVE if rep.passed else EXIT_NEGATIVE
    if args.check == "claim2":
        a = set_from_json(_parse_json_arg(args.set, "set"))
        samples = [int(v) for v in (args.samples or "64,1024,65536").split(",")]
        rep = claim2_window_check(mu, a, parse_rational(args.delta),
                                  parse_rational(args.alpha),
                                  parse_rational(args.d), samples)
        _emit(rep.to_json(), cfg)
        return EXIT_POSITIVE if rep.passed else EXIT_NEGATIVE
    if args.check == "fridy":
        x = sequence_from_json(_parse_json_arg(args.seq, "sequence"))
        rep = fridy_check(x, parse_rational(args.d), cfg.horizon)
        _emit(rep.to_json(), cfg)
        if rep.contradiction:
            return EXIT_NEGATIVE
        return EXIT_POSITIVE if rep.applicable else EXIT_UNDECIDED
    if args.check == "sharpness":
        sched = ("log2",) if args.schedule == "log2" \
            else ("constant", parse_rational(args.schedule))
        rep = sharpness_search(sched, cfg.horizon)
        _emit(rep.to_json(), cfg)
        return EXIT_POSITIVE if rep.feasible else EXIT_NEGATIVE
    if args.check == "character":
        from .corpus import materialize_sequences, shipped_corpus

        doc = corpus_mod.load(args.corpus) if args.corpus else shipped_corpus()
        seqs = materialize_sequences(doc)[: args.size or 12]
        rep = character_harness(mu, mu, parse_rational(args.alpha or "1"),
                                seqs, [Fraction(0), Fraction(1)], cfg.horizon)
        _emit(rep.to_json(), cfg)
        return EXIT_POSITIVE if rep.ok else EXIT_NEGATIVE
    if args.check == "blockmean":
        scheme = make_block_scheme(args.scheme)
        x = single_peak_sequence(scheme, args.peak or 2)
        rep = blockmean_check(scheme, x, args.bound or 10**8)
        _emit(rep.to_json(), cfg)
        return EXIT_POSITIVE if rep.passed else EXIT_NEGATIVE
    if args.check == "figure1":
        scheme = make_block_scheme(args.scheme)
        rep = figure_series(scheme, args.peak or 2,
                            parse_rational(args.eps or "1/10"),
                            args.resolution or 64)
        if args.csv:
            with open(args.csv, "w") as fh:
                fh.write("n,mean\n")
                for n, v in rep.samples:
                    fh.write(f"{n},{v.numerator}/{v.denominator}\n")
        _emit(rep.to_json(), cfg)
        return EXIT_POSITIVE
    raise UsageError(f"unknown tauberian check {args.check!r}")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="idealconv",
        description="Exact ideal-convergence machinery over symbolic integer sets.",
    )
    p.add_argument("--config", help="JSON config file")
    p.add_argument("--horizon", type=int, help="analysis horizon (default 10^6)")
    p.add_argument("--format", choices=["json", "csv", "table"],
                   help="output format")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("count", help="exact prefix count of a set")
    c.add_argument("--set", required=True)
    c.add_argument("--n", type=int, required=True)
    c.set_defaults(fn=cmd_count)

    c = sub.add_parser("density", help="upper asymptotic density with certificate")
    c.add_argument("--set", required=True)
    c.set_defaults(fn=cmd_density)

    c = sub.add_parser("member", help="ideal membership verdict")
    c.add_argument("--ideal", required=True,
                   help="fin | zeta | summable | empty-times-fin | zmu:<json> | j-of:<ideal>:<json>")
    c.add_argument("--set", required=True)
    c.set_defaults(fn=cmd_member)

    c = sub.add_parser("harmonic", help="exact harmonic partial sum over a set")
    c.add_argument("--set", required=True)
    c.add_argument("--n", type=int, required=True)
    c.set_defaults(fn=cmd_harmonic)

    c = sub.add_parser("converge", help="convergence verdict engines")
    c.add_argument("--mode", choices=["ideal", "istat", "imu"], required=True)
    c.add_argument("--seq", required=True)
    c.add_argument("--ideal", required=True)
    c.add_argument("--mu")
    c.add_argument("--limit", required=True)
    c.set_defaults(fn=cmd_converge)

    c = sub.add_parser("corpus", help="corpus generation and persistence")
    c.add_argument("action", choices=["generate", "save", "load"])
    c.add_argument("--seed", type=int, default=corpus_mod.DEFAULT_SEED)
    c.add_argument("--size", type=int, default=corpus_mod.CORPUS_SIZE)
    c.add_argument("--out")
    c.add_argument("--path")
    c.set_defaults(fn=cmd_corpus)

    c = sub.add_parser("tauberian", help="quantitative verification checks")
    c.add_argument("check", choices=["claim1", "claim2", "fridy", "sharpness",
                                     "character", "blockmean", "figure1"])
    c.add_argument("--set")
    c.add_argument("--seq")
    c.add_argument("--mu")
    c.add_argument("--alpha")
    c.add_argument("--d", default="1")
    c.add_argument("--c", default="1")
    c.add_argument("--delta", default="1/2")
    c.add_argument("--eps")
    c.add_argument("--samples")
    c.add_argument("--schedule", default="log2")
    c.add_argument("--scheme", default="factorial")
    c.add_argument("--peak", type=int)
    c.add_argument("--resolution", type=int)
    c.add_argument("--bound", type=int)
    c.add_argument("--csv")
    c.add_argument("--corpus")
    c.add_argument("--size", type=int)
    c.set_defaults(fn=cmd_tauberian)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code not in (0, None) else 0
    try:
        cfg = _load_config(args)
        return args.fn(args, cfg)
    except UsageError as e:
        print(f"usage error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (ValidationError, SetError) as e:
        print(f"usage error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
