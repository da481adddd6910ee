"""Randomized and epsilon-accurate learners built on the exact learner."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .exact import (
    NotRealizableError,
    TAIL_SIZE,
    TieBreak,
    _chooser,
    contender,
    learn_hypothesis,
    search,
    shuffled_monotone_learn,
)
from .instance import ShuffledInstance, ThresholdHypothesis, evaluate_hypothesis_all, restrict

# sub-seed namespaces
_ROUND, _FINAL = 0, 1


@dataclass(frozen=True)
class ApproxParams:
    epsilon: float
    delta: float
    seed: int = 0

    def __post_init__(self):
        if not 0 < self.epsilon < 1:
            raise ValueError(f"epsilon must lie in (0, 1), got {self.epsilon}")
        if not 0 < self.delta < 1:
            raise ValueError(f"delta must lie in (0, 1), got {self.delta}")

    @property
    def corruption_budget(self) -> float:
        """Largest tolerated corrupted fraction."""
        return self.epsilon * self.delta / 400

    def rounds(self, D: int) -> int:
        return math.ceil(50 * math.log(D / self.delta))

    @property
    def sample_size(self) -> int:
        return math.ceil(40 / (self.epsilon * self.delta))


def sub_rng(seed: int, *key: int) -> np.random.Generator:
    """Independent generator for ``key`` under the master ``seed``."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=key))


# ---------------------------------------------------------------------------
# Randomized binary search


def rbs_query_bound(eps: float, delta: float) -> int:
    """Query ceiling for :func:`random_binary_search`; exact only while the
    stopping size ``9 eps n / delta`` is at least 4 (integer thirds can cost
    one extra query below that)."""
    C = 9 / delta
    return max(0, math.ceil(math.log(1 / (C * eps), 1.5))) + 1


def random_binary_search(query: Callable[[int], int], n: int, eps: float, delta: float,
                         rng: np.random.Generator) -> int:
    """Learn a monotone step over ranks ``1..n`` from a labeling that is
    ``eps``-close to monotone.

    ``query(r)`` returns the label at rank ``r``.  Returns the threshold rank
    ``j`` of the output ``g(r) = 1 iff r >= j``.
    """
    if n < 1:
        raise ValueError("n must be positive")
    stop = (9 / delta) * eps * n
    lo, hi = 1, n
    while hi - lo + 1 > stop:
        size = hi - lo + 1
        third = size // 3
        if third == 0:
            # fewer than three ranks: every rank is "middle"; cut at the answer
            r = int(rng.integers(lo, hi + 1))
            if query(r):
                hi = r - 1
            else:
                lo = r + 1
            continue
        r = int(rng.integers(lo + third, hi - third + 1))
        if query(r):
            hi -= third
        else:
            lo += third
    return hi + 1


# ---------------------------------------------------------------------------
# Tolerant learner


def _round_votes(oracle, inst: ShuffledInstance, params: ApproxParams, j: int) -> np.ndarray:
    rng = sub_rng(params.seed, _ROUND, j)
    sample = np.unique(rng.integers(0, inst.n, size=params.sample_size))
    sub, ids = restrict(inst, sample)
    try:
        labels = shuffled_monotone_learn(oracle.view(ids), sub)
    except NotRealizableError as err:
        labels = err.labels if err.labels is not None else np.zeros(sub.n, np.uint8)
    seq = labels[sub.inv_rank].astype(np.int8)
    monotone = np.all(np.diff(seq, axis=1) >= 0, axis=1)
    return np.where(monotone, 1, -1)


def vote_tally(oracle, inst: ShuffledInstance, params: ApproxParams,
               rounds=None) -> np.ndarray:
    """Sum over sampling rounds of +1/-1 monotonicity votes per ordering.

    Each round draws its own sub-seed, so any ``rounds`` ordering yields the
    same totals.
    """
    if rounds is None:
        rounds = range(params.rounds(inst.D))
    tally = np.zeros(inst.D, dtype=np.int64)
    for j in rounds:
        tally += _round_votes(oracle, inst, params, j)
    return tally


def tolerant_learn(oracle, inst: ShuffledInstance, params: ApproxParams) -> ThresholdHypothesis:
    """Return a threshold hypothesis within ``epsilon`` of the oracle's labeling
    with probability at least ``1 - 2 delta``, provided the labeling is within
    ``epsilon * delta / 400`` of some threshold hypothesis."""
    if inst.D == 1:
        best = 0
    else:
        best = int(np.argmax(vote_tally(oracle, inst, params)))
    order = inst.inv_rank[best]
    eps = params.epsilon * params.delta / 10
    j = random_binary_search(lambda r: oracle.query(order[r - 1]), inst.n, eps,
                             params.delta, sub_rng(params.seed, _FINAL))
    return ThresholdHypothesis(best, j)


# ---------------------------------------------------------------------------
# Deterministic epsilon learner


def _fit_outside(inst, state, end):
    """A threshold hypothesis matching every discarded element's inferred
    label, along the first live ordering that admits one; the cut is placed
    as late as allowed, so undecided elements default to 0."""
    n = inst.n
    ids = np.flatnonzero(state.learned >= 0)
    vals = state.learned[ids]
    if not state.S:
        return None
    for i in sorted(state.S, reverse=(end == -1)):
        r = inst.rank[i, ids]
        lo = int(r[vals == 0].max()) + 1 if np.any(vals == 0) else 1
        hi = int(r[vals == 1].min()) if np.any(vals == 1) else n + 1
        if lo <= hi:
            return ThresholdHypothesis(i, hi)
    return None


def eps_exact_learn(oracle, inst: ShuffledInstance, eps: float, *,
                    tie_break: TieBreak = "smallest", callback=None) -> ThresholdHypothesis:
    """Deterministically return a threshold hypothesis with at most an
    ``eps`` fraction of mislabeled elements, using O(D + log(1/eps)) queries."""
    if eps <= 0:
        raise ValueError("eps must be positive")
    n = inst.n
    stop = max(math.ceil(eps * n), TAIL_SIZE)
    if stop == TAIL_SIZE:
        return learn_hypothesis(oracle, inst, tie_break=tie_break, callback=callback)

    _, end = _chooser(tie_break)
    const, state = search(oracle, inst, stop_size=stop, tie_break=tie_break, callback=callback)
    if const is not None:
        return const
    h_c = contender(oracle, state.C, inst) if state.C else None
    h_z = _fit_outside(inst, state, end)
    if h_c is None and h_z is None:
        raise NotRealizableError("no hypothesis is consistent with the search")
    if h_c is None or h_z is None:
        return h_c or h_z

    outside = np.ones(n, dtype=bool)
    outside[state.Z] = False
    lc = evaluate_hypothesis_all(h_c, inst)
    lz = evaluate_hypothesis_all(h_z, inst)
    differ = np.flatnonzero(outside & (lc != lz))
    if differ.size == 0:
        return h_c
    x = int(differ[0])
    return h_c if oracle.query(x) == lc[x] else h_z


def eps_exact_budget(D: int, eps: float) -> int:
    return 10 * D + 12 * math.ceil(math.log2(1 / eps)) + 15


# ---------------------------------------------------------------------------
# Realizable learner


def branch_budgets(D: int, params: ApproxParams) -> tuple[int, int]:
    """(deterministic, randomized) query-budget proxies used to pick a branch."""
    b1 = D + math.ceil(math.log2(1 / params.epsilon))
    b2 = math.ceil(math.log(D / params.delta) / (params.delta * params.epsilon))
    return b1, b2


def realizable_learn(oracle, inst: ShuffledInstance, params: ApproxParams) -> ThresholdHypothesis:
    b1, b2 = branch_budgets(inst.D, params)
    if b1 <= b2:
        return eps_exact_learn(oracle, inst, params.epsilon)
    return tolerant_learn(oracle, inst, params)
