"""Brute-force and analytic checkers used to certify learner outputs."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .instance import (
    GeometricHypothesis,
    LabelOracle,
    PointSet,
    ShuffledInstance,
    ThresholdHypothesis,
    check_index,
    evaluate_hypothesis_all,
)


def _bits(f) -> np.ndarray:
    a = np.asarray(f)
    if a.dtype.kind in "US":
        a = np.array([int(c) for c in "".join(a.ravel().tolist())])
    a = np.asarray(a, dtype=np.int64).ravel()
    if a.size == 0 or np.any((a != 0) & (a != 1)):
        raise ValueError("expected a non-empty 0/1 vector")
    return a


# ---------------------------------------------------------------------------
# Distance to monotone


@dataclass(frozen=True, eq=False)
class MonotoneDistanceResult:
    distance: Fraction
    witness: np.ndarray
    witness_threshold: int

    @property
    def mismatches(self) -> int:
        return self.distance.numerator * self.witness.size // self.distance.denominator


def monotone_distance(f) -> MonotoneDistanceResult:
    """Normalized Hamming distance from ``f`` (indexed by rank) to the closest
    non-decreasing vector.

    The witness is the step ``g(r) = 1 iff r >= j`` for the smallest ``j`` in
    ``1..n+1`` attaining the minimum.
    """
    f = _bits(f)
    n = f.size
    ones_before = np.concatenate(([0], np.cumsum(f)))          # ones among ranks < j
    zeros_from = (n - f.sum()) - (np.arange(n + 1) - ones_before)  # zeros among ranks >= j
    cost = ones_before + zeros_from
    k = int(np.argmin(cost))
    witness = (np.arange(1, n + 1) >= k + 1).astype(np.uint8)
    return MonotoneDistanceResult(Fraction(int(cost[k]), n), witness, k + 1)


def brute_monotone_distance(f) -> Fraction:
    """Same quantity by trying every monotone vector; for cross-checks only."""
    f = _bits(f)
    n = f.size
    best = min(int(np.sum(f != (np.arange(n) >= j))) for j in range(n + 1))
    return Fraction(best, n)


# ---------------------------------------------------------------------------
# Realizability


def is_monotone_under(labeling, inst: ShuffledInstance, i: int) -> bool:
    check_index(inst, i)
    seq = np.asarray(labeling, dtype=np.int8)[inst.inv_rank[i]]
    return bool(np.all(seq[1:] >= seq[:-1]))


def consistent_hypotheses(inst: ShuffledInstance, labeling) -> set[ThresholdHypothesis]:
    """Every threshold hypothesis whose labels equal ``labeling`` exactly."""
    lab = np.asarray(labeling, dtype=np.int8)
    if lab.shape != (inst.n,):
        raise ValueError(f"labeling must have {inst.n} entries")
    seq = lab[inst.inv_rank]
    monotone = np.all(seq[:, 1:] >= seq[:, :-1], axis=1)
    j = inst.n - int(lab.sum()) + 1
    return {ThresholdHypothesis(int(i), j) for i in np.flatnonzero(monotone)}


# ---------------------------------------------------------------------------
# Sampling tester


def violation_sample_test(f, s: int, rng: np.random.Generator) -> bool:
    """Draw ``s`` ranks uniformly with replacement and report whether the
    sampled set contains ranks ``p < q`` with ``f(p) = 1`` and ``f(q) = 0``."""
    if s < 2:
        raise ValueError("need at least two samples")
    f = _bits(f)
    ranks = rng.integers(0, f.size, size=s)
    ones = ranks[f[ranks] == 1]
    zeros = ranks[f[ranks] == 0]
    return bool(ones.size and zeros.size and ones.min() < zeros.max())


# ---------------------------------------------------------------------------
# Constructions


def verify_star_condition(points, hypotheses: Sequence[GeometricHypothesis]) -> bool:
    """``h_0`` (first) and ``h_i`` disagree on point ``j`` exactly when ``i == j``."""
    pts = points if isinstance(points, PointSet) else PointSet(points)
    if len(hypotheses) != pts.n + 1:
        raise ValueError(f"expected {pts.n + 1} hypotheses for {pts.n} points, "
                         f"got {len(hypotheses)}")
    center = hypotheses[0](pts)
    disagree = np.stack([h(pts) != center for h in hypotheses[1:]])
    return bool(np.array_equal(disagree, np.eye(pts.n, dtype=bool)))


def adversary_lower_bound(H) -> int:
    """Queries an adversary can force before a single row of ``H`` remains.

    ``H[k, x]`` is hypothesis ``k``'s label on point ``x``.  The adversary
    always answers with the label that keeps more hypotheses alive; the
    learner greedily queries the point splitting the live set most evenly.
    When every step can eliminate at most one hypothesis (the greedy minority
    is at most 1), the count is a lower bound for every learner.
    """
    H = np.asarray(H, dtype=np.int8)
    alive = np.ones(H.shape[0], dtype=bool)
    asked = np.zeros(H.shape[1], dtype=bool)
    queries = 0
    while alive.sum() > 1:
        live = H[alive]
        ones = live.sum(axis=0)
        minority = np.minimum(ones, live.shape[0] - ones)
        minority[asked] = -1
        x = int(np.argmax(minority))
        if minority[x] <= 0:
            break  # nothing left distinguishes the survivors
        answer = int(ones[x] * 2 > live.shape[0])
        alive &= H[:, x] == answer
        asked[x] = True
        queries += 1
    return queries


# ---------------------------------------------------------------------------
# Instrumented invariants


@dataclass
class InvariantMonitor:
    """Search callback checking the loop invariant and the per-call budget of
    the three-query step.

    ``truth`` is the realizable labeling being learned.  Violations are
    collected as strings rather than raised.
    """

    inst: ShuffledInstance
    truth: np.ndarray
    violations: list = field(default_factory=list)
    calls: int = 0
    max_step_queries: int = 0

    def __post_init__(self):
        self.truth = np.asarray(self.truth, dtype=np.uint8)
        self._pairs = {}
        for h in consistent_hypotheses(self.inst, self.truth):
            j = h.threshold_rank
            if 1 < j <= self.inst.n:
                row = self.inst.inv_rank[h.direction_index]
                self._pairs[h.direction_index] = (int(row[j - 2]), int(row[j - 1]))

    def _truth_in(self, C) -> bool:
        return any(np.array_equal(evaluate_hypothesis_all(h, self.inst), self.truth) for h in C)

    def __call__(self, record: dict, state) -> None:
        phase = record["phase"]
        if phase == "loop":
            live = set(state.Z.tolist())
            for i, (x, y) in self._pairs.items():
                if i in state.S and not (x in live and y in live) and not self._truth_in(state.C):
                    self.violations.append(
                        f"ordering {i} live but boundary pair ({x}, {y}) left Z "
                        f"with no correct candidate")
        elif phase == "subroutine":
            self.calls += 1
            k = len(record["queried"])
            self.max_step_queries = max(self.max_step_queries, k)
            if k > 3:
                self.violations.append(f"three-query step used {k} queries")
            if record["outcome"] == "reduced":
                limit = math.ceil(2 * record["from_size"] / 3)
                if record["Z"] > limit:
                    self.violations.append(
                        f"reduction left {record['Z']} of {record['from_size']} elements")


# ---------------------------------------------------------------------------
# Exhaustive driver


def _tuples(n: int, D: int):
    ident = tuple(range(n))
    for rest in itertools.product(itertools.permutations(range(n)), repeat=D - 1):
        yield (ident,) + rest


def exhaustive_verify_exact(n_max: int, D_max: int,
                            tie_breaks=("smallest",), *, monitor: bool = True) -> dict:
    """Run both exact learners on every small instance and every planted
    hypothesis.

    The first ordering is fixed to the identity (relabeling elements maps any
    instance to one of these).  Returns ``{cases, failures, max_queries_seen}``
    where ``cases`` counts learner runs, plus ``plants`` (instance and plant
    pairs per size) and the number of three-query steps checked.
    """
    from .exact import (
        NotRealizableError,
        baseline_budget,
        baseline_learn,
        query_budget,
        shuffled_monotone_learn,
    )

    if n_max > 6 or D_max > 2:
        raise ValueError("exhaustive enumeration is limited to n <= 6 and D <= 2")
    cases, failures, steps, plants = 0, [], 0, {}
    max_seen = {"exact": 0, "baseline": 0}
    for n in range(1, n_max + 1):
        for D in range(1, D_max + 1):
            for orders in _tuples(n, D):
                inst = ShuffledInstance.from_orders(orders)
                for i in range(D):
                    for j in range(1, n + 2):
                        h = ThresholdHypothesis(i, j)
                        truth = h.labels(inst)
                        key = f"n={n},D={D}"
                        plants[key] = plants.get(key, 0) + 1
                        tag = {"n": n, "D": D, "orders": [list(o) for o in orders],
                               "plant": [i, j]}
                        runs = [("baseline", None)] + [("exact", tb) for tb in tie_breaks]
                        for name, tb in runs:
                            cases += 1
                            oracle = LabelOracle(truth)
                            mon = InvariantMonitor(inst, truth) if monitor and tb else None
                            try:
                                if name == "baseline":
                                    out, budget = baseline_learn(oracle, inst), baseline_budget(n, D)
                                else:
                                    out = shuffled_monotone_learn(oracle, inst, tie_break=tb,
                                                                  callback=mon)
                                    budget = query_budget(n, D)
                            except NotRealizableError as err:
                                failures.append({**tag, "learner": name, "tie_break": tb,
                                                 "error": str(err)})
                                continue
                            q = oracle.distinct_queries
                            max_seen[name] = max(max_seen[name], q)
                            problems = []
                            if not np.array_equal(out, truth):
                                problems.append("wrong labels")
                            if q > budget:
                                problems.append(f"{q} queries exceed budget {budget}")
                            if mon is not None:
                                steps += mon.calls
                                problems.extend(mon.violations)
                            if problems:
                                failures.append({**tag, "learner": name, "tie_break": tb,
                                                 "problems": problems})
    return {"cases": cases, "failures": failures, "max_queries_seen": max_seen,
            "plants": plants, "steps_checked": steps}


__all__ = [
    "InvariantMonitor",
    "MonotoneDistanceResult",
    "adversary_lower_bound",
    "brute_monotone_distance",
    "consistent_hypotheses",
    "exhaustive_verify_exact",
    "is_monotone_under",
    "monotone_distance",
    "verify_star_condition",
    "violation_sample_test",
]
