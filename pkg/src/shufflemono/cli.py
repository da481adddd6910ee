"""Command-line entry point: ``shufflemono {gen,learn,bench,fit,verify}``.

Exit codes: 0 on success (including runs whose outcome is a failure record),
2 for usage or input errors, 1 when an internal check is breached.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

from . import formats
from .exact import query_budget
from .harness import (
    GENERATORS,
    LEARNERS,
    UsageError,
    fit_query_model,
    generate,
    load_suite,
    read_csv,
    run_learner,
    run_suite,
    summarize,
    to_csv,
)
from .instance import InstanceError
from .verify import exhaustive_verify_exact, is_monotone_under, verify_star_condition

TRACE_KEYS = ("phase", "case", "queried", "outcome", "S", "Z")


class InternalBreach(RuntimeError):
    pass


def _write(text: str, out) -> None:
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


# ---------------------------------------------------------------------------
# gen


def cmd_gen(args) -> int:
    params = {k: getattr(args, k) for k in ("n", "D", "d", "m") if getattr(args, k) is not None}
    g = generate(args.generator, params, args.seed)
    _write(formats.dumps(g) + "\n", args.out)
    return 0


# ---------------------------------------------------------------------------
# learn


class _TraceWriter:
    def __init__(self, fh):
        self.fh = fh

    def __call__(self, record, state):
        row = {k: record.get(k) for k in TRACE_KEYS}
        row["queried"] = [int(x) for x in row["queried"] or ()]
        self.fh.write(json.dumps(row) + "\n")


def cmd_learn(args) -> int:
    g = formats.load(args.instance)
    fh = open(args.trace, "w") if args.trace else None
    try:
        rec = run_learner(args.learner, g, seed=args.seed, eps=args.eps, delta=args.delta,
                          corrupt=args.corrupt, corrupt_mode=args.corrupt_mode,
                          callback=_TraceWriter(fh) if fh else None)
    finally:
        if fh:
            fh.close()
    row = rec.to_dict()
    if args.format == "json":
        sys.stdout.write(json.dumps(row) + "\n")
    else:
        flat = {k: json.dumps(v) if isinstance(v, dict) else v for k, v in row.items()}
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=list(flat), lineterminator="\n")
        w.writeheader()
        w.writerow(flat)
        sys.stdout.write(buf.getvalue())

    # a realizable, uncorrupted exact run must be right and within budget
    if (args.learner == "exact" and g.is_realizable and not args.corrupt
            and (not rec.correct or rec.distinct_queries > query_budget(g.instance.n, g.instance.D))):
        raise InternalBreach(f"exact learner breached its guarantee: {row}")
    return 0


# ---------------------------------------------------------------------------
# bench / fit


def cmd_bench(args) -> int:
    spec = load_suite(Path(args.suite).read_text())
    rows = run_suite(spec, parallel=args.parallel, timing=args.timing)
    out = Path(args.out)
    out.write_text(to_csv(rows, "trials"))
    summary = out.with_name(out.stem + ".summary.csv")
    summary.write_text(to_csv(summarize(rows), "summary"))
    print(f"wrote {len(rows)} rows to {out} and the summary to {summary}", file=sys.stderr)
    return 0


def cmd_fit(args) -> int:
    rows = read_csv(Path(args.csv).read_text())
    print(json.dumps(fit_query_model(rows, args.learner)))
    return 0


# ---------------------------------------------------------------------------
# verify


def cmd_verify(args) -> int:
    if args.what == "exhaustive":
        try:
            report = exhaustive_verify_exact(args.n_max, args.D_max, tuple(args.tie_break))
        except ValueError as err:
            raise UsageError(str(err)) from None
        print(json.dumps(report))
        if report["failures"]:
            raise InternalBreach(f"{len(report['failures'])} exhaustive failures")
        return 0
    g = formats.load(args.instance)
    result = {"realizable": g.is_realizable}
    t = g.truth
    if t.monotone_index is not None:
        result["planted_monotone"] = is_monotone_under(t.labeling, g.instance, t.monotone_index)
    if g.metadata.get("generator") == "star" and g.hypotheses:
        result["star_condition"] = verify_star_condition(g.points, g.hypotheses)
    print(json.dumps(result))
    return 0


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="shufflemono", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="generate an instance file")
    gen.add_argument("generator", choices=GENERATORS)
    gen.add_argument("--n", type=int)
    gen.add_argument("--D", type=int)
    gen.add_argument("--d", type=int, help="dimension (star)")
    gen.add_argument("--m", type=int, help="half-width (depth2)")
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--out", default="-")
    gen.set_defaults(func=cmd_gen)

    learn = sub.add_parser("learn", help="run a learner and print a run record")
    learn.add_argument("learner", choices=LEARNERS)
    learn.add_argument("instance")
    learn.add_argument("--seed", type=int, default=0)
    learn.add_argument("--eps", type=float)
    learn.add_argument("--delta", type=float)
    learn.add_argument("--corrupt", type=float, default=0.0, help="fraction of labels to flip")
    learn.add_argument("--corrupt-mode", choices=("uniform", "boundary"), default="uniform")
    learn.add_argument("--format", choices=("json", "csv"), default="json")
    learn.add_argument("--trace", help="write per-step search records as JSON lines")
    learn.set_defaults(func=cmd_learn)

    bench = sub.add_parser("bench", help="run a benchmark suite to CSV")
    bench.add_argument("suite")
    bench.add_argument("--out", required=True)
    bench.add_argument("--parallel", type=int, default=1)
    bench.add_argument("--timing", action="store_true",
                       help="add wall-clock columns (makes output non-reproducible)")
    bench.set_defaults(func=cmd_bench)

    fit = sub.add_parser("fit", help="regress a learner's query counts on D and log2 n")
    fit.add_argument("csv")
    fit.add_argument("--learner", default="exact")
    fit.set_defaults(func=cmd_fit)

    ver = sub.add_parser("verify", help="run the exhaustive check or inspect an instance")
    vsub = ver.add_subparsers(dest="what", required=True)
    ex = vsub.add_parser("exhaustive")
    ex.add_argument("--n-max", type=int, default=5)
    ex.add_argument("--D-max", type=int, default=2)
    ex.add_argument("--tie-break", nargs="+", choices=("smallest", "largest"),
                    default=["smallest", "largest"])
    inst = vsub.add_parser("instance")
    inst.add_argument("instance")
    ver.set_defaults(func=cmd_verify)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "parallel", 1) < 1:
        parser.error("--parallel must be at least 1")
    try:
        return args.func(args)
    except (UsageError, InstanceError, OSError) as err:
        print(f"shufflemono: error: {err}", file=sys.stderr)
        return 2
    except InternalBreach as err:
        print(f"shufflemono: internal check failed: {err}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
