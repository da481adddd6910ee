"""Run learners against planted instances and tabulate query counts."""

from __future__ import annotations

import csv
import io
import itertools
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction

import numpy as np

from .approx import ApproxParams, eps_exact_learn, realizable_learn, sub_rng, tolerant_learn
from .exact import NotRealizableError, baseline_learn, learn_hypothesis
from .generators import (
    GeneratedInstance,
    circle_generated,
    corrupt_labels,
    depth_two_generated,
    gen_random_shuffled,
    star_generated,
)
from .instance import LabelOracle, evaluate_hypothesis_all

LEARNERS = ("exact", "baseline", "eps-exact", "realizable", "tolerant")
GENERATORS = ("random", "circle", "star", "depth2")
BENCH_SCHEMA = "shufflemono-bench/1"

# sub-seed namespace for corruption draws, disjoint from the learners' own
_CORRUPT = 2


class UsageError(ValueError):
    """Bad parameters supplied by the caller."""


def generate(name: str, params: dict, seed=None) -> GeneratedInstance:
    try:
        if name == "random":
            return gen_random_shuffled(int(params["n"]), int(params["D"]), seed)
        if name == "circle":
            return circle_generated(int(params["n"]))
        if name == "star":
            return star_generated(int(params["d"]))
        if name == "depth2":
            return depth_two_generated(int(params["m"]))
    except KeyError as err:
        raise UsageError(f"generator {name!r} needs parameter {err.args[0]!r}") from None
    except ValueError as err:
        raise UsageError(str(err)) from None
    raise UsageError(f"unknown generator {name!r}; choose from {', '.join(GENERATORS)}")


@dataclass
class RunRecord:
    learner: str
    metadata: dict
    distinct_queries: int
    total_calls: int
    correct: bool
    error_fraction: str
    wall_time_ms: float | None
    seed: int | None
    status: str = "ok"
    extra: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        d = asdict(self)
        d.update(d.pop("extra"))
        return d


def _check_params(learner, eps, delta):
    if learner not in LEARNERS:
        raise UsageError(f"unknown learner {learner!r}; choose from {', '.join(LEARNERS)}")
    if learner == "eps-exact" and eps is None:
        raise UsageError("eps-exact needs --eps")
    if learner in ("realizable", "tolerant") and (eps is None or delta is None):
        raise UsageError(f"{learner} needs --eps and --delta")
    try:
        if eps is not None or delta is not None:
            ApproxParams(eps if eps is not None else 0.5, delta if delta is not None else 0.5)
    except ValueError as err:
        raise UsageError(str(err)) from None


def run_learner(learner: str, g: GeneratedInstance, *, seed: int = 0, eps=None, delta=None,
                corrupt: float = 0.0, corrupt_mode: str = "uniform", callback=None,
                timing: bool = True) -> RunRecord:
    """Run one learner on a fresh oracle over ``g``'s planted labels."""
    _check_params(learner, eps, delta)
    inst, truth = g.instance, g.truth
    if not 0 <= corrupt <= 1:
        raise UsageError("--corrupt must be a fraction in [0, 1]")
    budget = math.floor(corrupt * inst.n)
    try:
        flips = corrupt_labels(inst, truth, budget, corrupt_mode, sub_rng(seed, _CORRUPT))
    except ValueError as err:
        raise UsageError(str(err)) from None
    oracle = LabelOracle(truth.labeling, flips)

    status, labels = "ok", None
    start = time.perf_counter()
    try:
        if learner == "baseline":
            labels = baseline_learn(oracle, inst)
        else:
            if learner == "exact":
                h = learn_hypothesis(oracle, inst, callback=callback)
            elif learner == "eps-exact":
                h = eps_exact_learn(oracle, inst, eps, callback=callback)
            elif learner == "realizable":
                h = realizable_learn(oracle, inst, ApproxParams(eps, delta, seed))
            else:
                h = tolerant_learn(oracle, inst, ApproxParams(eps, delta, seed))
            labels = evaluate_hypothesis_all(h, inst)
    except NotRealizableError as err:
        status = "not-realizable"
        labels = err.labels
    elapsed = (time.perf_counter() - start) * 1000

    extra = {}
    if labels is None:
        error = Fraction(1)
    else:
        error = Fraction(int(np.sum(labels != truth.labeling)), inst.n)
        if flips:
            served = oracle.target()
            extra["served_error_fraction"] = str(Fraction(int(np.sum(labels != served)), inst.n))
    if flips:
        extra["corrupted"] = len(flips)
    meta = {**g.metadata, "n": inst.n, "D": inst.D}
    return RunRecord(learner, meta, oracle.distinct_queries, oracle.total_calls,
                     status == "ok" and error == 0, str(error),
                     round(elapsed, 3) if timing else None, seed, status, extra)


# ---------------------------------------------------------------------------
# Benchmarks


@dataclass(frozen=True)
class Trial:
    cell: int
    generator: str
    params: tuple
    learners: tuple
    trial: int
    seed: int
    options: tuple


def _cells(spec: dict):
    cells = spec.get("cells", [spec])
    if not isinstance(cells, list) or not cells:
        raise UsageError("suite needs a non-empty 'cells' list")
    return cells


def expand_suite(spec: dict) -> list[Trial]:
    """All trials of a suite, in spec order, each with its own derived seed."""
    if not isinstance(spec, dict):
        raise UsageError("suite spec must be a JSON object")
    master = int(spec.get("seed", 0))
    trials = []
    for c, cell in enumerate(_cells(spec)):
        try:
            gen = cell["generator"]
            learners = cell["learners"]
            grid = cell.get("grid", {})
            count = int(cell.get("trials", 1))
        except (KeyError, TypeError) as err:
            raise UsageError(f"cell {c} is malformed: missing {err}") from None
        if gen not in GENERATORS:
            raise UsageError(f"cell {c}: unknown generator {gen!r}")
        if isinstance(learners, str):
            learners = [learners]
        for name in learners:
            if name not in LEARNERS:
                raise UsageError(f"cell {c}: unknown learner {name!r}")
        keys = sorted(grid)
        options = tuple(sorted((k, cell[k]) for k in ("eps", "delta", "corrupt", "corrupt_mode")
                               if k in cell))
        for g, values in enumerate(itertools.product(*(grid[k] for k in keys))):
            params = tuple(zip(keys, values))
            for t in range(count):
                ss = np.random.SeedSequence(master, spawn_key=(c, g, t))
                seed = int(ss.generate_state(1, dtype=np.uint32)[0])
                trials.append(Trial(c, gen, params, tuple(learners), t, seed, options))
    return trials


def run_trial(trial: Trial, timing: bool = False) -> list[dict]:
    params = dict(trial.params)
    g = generate(trial.generator, params, trial.seed)
    opts = dict(trial.options)
    rows = []
    for name in trial.learners:
        rec = run_learner(name, g, seed=trial.seed, eps=opts.get("eps"), delta=opts.get("delta"),
                          corrupt=opts.get("corrupt", 0.0),
                          corrupt_mode=opts.get("corrupt_mode", "uniform"), timing=timing)
        row = {"cell": trial.cell, "generator": trial.generator,
               "params": ";".join(f"{k}={v}" for k, v in trial.params),
               "n": g.instance.n, "D": g.instance.D, "learner": name, "trial": trial.trial,
               "seed": trial.seed, "distinct_queries": rec.distinct_queries,
               "total_calls": rec.total_calls, "correct": rec.correct,
               "error_fraction": rec.error_fraction, "status": rec.status}
        if timing:
            row["wall_time_ms"] = rec.wall_time_ms
        rows.append(row)
    return rows


def run_suite(spec: dict, parallel: int = 1, timing: bool = False) -> list[dict]:
    trials = expand_suite(spec)
    if parallel > 1:
        with ProcessPoolExecutor(parallel) as pool:
            chunks = list(pool.map(run_trial, trials, itertools.repeat(timing)))
    else:
        chunks = [run_trial(t, timing) for t in trials]
    return [row for chunk in chunks for row in chunk]


def summarize(rows: list[dict]) -> list[dict]:
    groups: dict = {}
    for r in rows:
        groups.setdefault((r["cell"], r["params"], r["learner"]), []).append(r)
    out = []
    for (cell, params, learner), rs in groups.items():
        q = [r["distinct_queries"] for r in rs]
        out.append({"cell": cell, "params": params, "learner": learner, "n": rs[0]["n"],
                    "D": rs[0]["D"], "trials": len(rs),
                    "mean_queries": f"{sum(q) / len(q):.3f}", "max_queries": max(q),
                    "success_rate": f"{sum(r['correct'] for r in rs) / len(rs):.4f}"})
    return out


def to_csv(rows: list[dict], kind: str) -> str:
    buf = io.StringIO()
    buf.write(f"# {BENCH_SCHEMA} {kind}\n")
    if rows:
        w = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
        w.writeheader()
        w.writerows(rows)
    return buf.getvalue()


def read_csv(text: str) -> list[dict]:
    lines = [ln for ln in text.splitlines() if not ln.startswith("#")]
    return list(csv.DictReader(lines))


def fit_query_model(rows, learner: str = "exact") -> dict:
    """Least-squares fit ``queries ~ c0 + cD * D + cL * log2(n)`` over the
    rows of one learner."""
    sel = [r for r in rows if r["learner"] == learner]
    if not sel:
        raise UsageError(f"no rows for learner {learner!r}")
    D = np.array([float(r["D"]) for r in sel])
    L = np.log2([float(r["n"]) for r in sel])
    y = np.array([float(r["distinct_queries"]) for r in sel])
    A = np.column_stack([np.ones_like(D), D, L])
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    return {"learner": learner, "rows": len(sel), "intercept": float(coef[0]),
            "coef_D": float(coef[1]), "coef_log2n": float(coef[2])}


def load_suite(text: str) -> dict:
    try:
        return json.loads(text)
    except json.JSONDecodeError as err:
        raise UsageError(f"suite spec is not valid JSON: {err}") from None
