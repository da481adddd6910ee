"""Deterministic exact learners for shuffled monotone labelings.

Three learners share one oracle protocol (``query(x) -> bit`` plus an
``observed`` mapping of answered ids):

* :func:`contender` -- candidate elimination, at most ``|C|`` queries.
* :func:`baseline_learn` -- one binary search per ordering, O(D log n).
* :func:`shuffled_monotone_learn` -- the parallel binary search, O(D + log n),
  built on the three-query :func:`remove_or_reduce` step.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Literal

import numpy as np

from .instance import (
    LabelOracle,
    ShuffledInstance,
    ThresholdHypothesis,
    evaluate_hypothesis_all,
    restrict,
)

TieBreak = Literal["smallest", "largest"]
Callback = Callable[[dict, "SearchState"], None]

TAIL_SIZE = 10


class NotRealizableError(RuntimeError):
    """No ordering makes the observed labels monotone.

    ``labels`` carries the learner's best-effort labeling (or ``None``).
    """

    def __init__(self, message, labels=None):
        super().__init__(message)
        self.labels = labels


def _chooser(tie_break: TieBreak):
    if tie_break == "smallest":
        return min, 0
    if tie_break == "largest":
        return max, -1
    raise ValueError(f"tie_break must be 'smallest' or 'largest', got {tie_break!r}")


# ---------------------------------------------------------------------------
# Contender


def contender(oracle, C, inst: ShuffledInstance) -> ThresholdHypothesis:
    """Eliminate candidates until all survivors agree; return a survivor.

    Each round queries the smallest id on which two live candidates differ
    and drops every candidate that disagrees with the answer.
    """
    C = list(dict.fromkeys(C))
    if not C:
        raise ValueError("contender needs at least one candidate")
    H = np.stack([evaluate_hypothesis_all(h, inst) for h in C])
    live = np.arange(len(C))
    while live.size > 1:
        sub = H[live]
        split = np.flatnonzero(sub.min(axis=0) != sub.max(axis=0))
        if split.size == 0:
            break
        x = int(split[0])
        bit = oracle.query(x)
        live = live[sub[:, x] == bit]
        if live.size == 0:
            # only reachable if the oracle answers inconsistently
            raise NotRealizableError("every candidate was eliminated")
    return C[int(live[0])]


def _check_against_observed(oracle, labels: np.ndarray) -> None:
    for x, bit in oracle.observed.items():
        if labels[x] != bit:
            raise NotRealizableError(
                f"learned labeling disagrees with the oracle at element {x}", labels)


# ---------------------------------------------------------------------------
# Baseline


def baseline_learn(oracle, inst: ShuffledInstance) -> np.ndarray:
    """Independent binary search along every ordering, then :func:`contender`.

    Small instances (``n < D * ceil(log2(n + 2))``) are simply queried in full.
    """
    n, D = inst.n, inst.D
    if n < D * math.ceil(math.log2(n + 2)):
        return np.array([oracle.query(x) for x in range(n)], dtype=np.uint8)

    candidates = []
    for i in range(D):
        # labels at ranks 0 and n + 1 are the sentinels 0 and 1
        lo, hi = 0, n + 1
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if oracle.query(inst.inv_rank[i, mid - 1]):
                hi = mid
            else:
                lo = mid
        candidates.append(ThresholdHypothesis(i, hi))
    h = contender(oracle, candidates, inst)
    labels = evaluate_hypothesis_all(h, inst)
    _check_against_observed(oracle, labels)
    return labels


# ---------------------------------------------------------------------------
# Search state, windows and colouring


@dataclass
class SearchState:
    """Live orderings ``S``, live elements ``Z`` (original ids, ascending),
    candidate set ``C`` and the labels inferred for elements already discarded
    from ``Z`` (``learned``, one entry per original id, -1 where nothing was
    inferred).

    ``sub`` holds the orderings restricted to ``Z``; only rows that were live
    at the last shrink are kept, so read it through :meth:`ranks` and
    :meth:`order`.
    """

    inst: ShuffledInstance
    S: list
    Z: np.ndarray
    sub: ShuffledInstance
    C: list = field(default_factory=list)
    learned: np.ndarray = None
    rows: tuple = None

    def __post_init__(self):
        if self.learned is None:
            self.learned = np.full(self.inst.n, -1, dtype=np.int8)
        if self.rows is None:
            self.rows = tuple(range(self.sub.D))
        self._row = {i: r for r, i in enumerate(self.rows)}

    @classmethod
    def initial(cls, inst: ShuffledInstance) -> "SearchState":
        return cls(inst, list(range(inst.D)), np.arange(inst.n), inst)

    @property
    def m(self) -> int:
        return self.sub.n

    def ranks(self, S) -> np.ndarray:
        """Restricted ranks, one row per ordering in ``S``."""
        return self.sub.rank[[self._row[i] for i in S]]

    def order(self, i: int) -> np.ndarray:
        """Local ids of ``Z`` in ascending order of ordering ``i``."""
        return self.sub.inv_rank[self._row[i]]

    def shrink(self, keep_local: np.ndarray) -> None:
        """Keep only the live elements selected by the local boolean mask."""
        live = sorted(self.S)
        sel = [self._row[i] for i in live]
        rows = ShuffledInstance(self.sub.rank[sel], self.sub.inv_rank[sel])
        self.sub, local_ids = restrict(rows, keep_local)
        self.Z = self.Z[local_ids]
        self.rows = tuple(live)
        self._row = {i: r for r, i in enumerate(live)}


@dataclass
class Coloring:
    """Element classes over the restricted ids of ``Z`` for the live rows
    ``S`` (row ``s`` describes ordering ``S[s]``).

    Boundary arrays hold local element ids per row, ``-1`` when the set they
    bound is empty; the matching rank arrays then hold ``0`` (blue-side) or
    ``m + 1`` (red-side) so comparisons stay vacuous.
    """

    S: list
    ranks: np.ndarray
    below: np.ndarray
    above: np.ndarray
    blue: np.ndarray
    red: np.ndarray
    purple: np.ndarray
    green: np.ndarray
    orange: np.ndarray
    strong_purple: np.ndarray
    bd_blue: np.ndarray
    bd_red: np.ndarray
    bd_blue_green: np.ndarray
    bd_red_orange: np.ndarray
    rank_blue: np.ndarray
    rank_red: np.ndarray
    rank_blue_green: np.ndarray
    rank_red_orange: np.ndarray

    @property
    def boundaries_defined(self) -> bool:
        return bool(self.blue.any() and self.red.any())


def _extreme(ranks: np.ndarray, mask: np.ndarray, largest: bool, fill: int):
    """Per row, the element of ``mask`` with the largest/smallest rank."""
    if not mask.any():
        rows = ranks.shape[0]
        return np.full(rows, -1), np.full(rows, fill)
    if largest:
        masked = np.where(mask, ranks, 0)
        el = masked.argmax(axis=1)
    else:
        masked = np.where(mask, ranks, fill)
        el = masked.argmin(axis=1)
    return el, ranks[np.arange(ranks.shape[0]), el]


def color(state: SearchState, W) -> Coloring:
    """Classify every live element against the windows ``W`` (no queries)."""
    S = list(state.S)
    m = state.m
    R = state.ranks(S)
    a = np.array([W[i][0] for i in S])[:, None]
    b = np.array([W[i][1] for i in S])[:, None]
    below = R < a
    above = R > b
    blue = below.any(axis=0)
    red = above.any(axis=0)
    purple = ~blue & ~red

    bd_b, r_b = _extreme(R, blue, True, 0)
    bd_r, r_r = _extreme(R, red, False, m + 1)
    green = purple & (R < r_b[:, None]).any(axis=0)
    orange = purple & (R > r_r[:, None]).any(axis=0)
    strong = purple & ~green & ~orange
    bd_bg, r_bg = _extreme(R, blue | green, True, 0)
    bd_ro, r_ro = _extreme(R, red | orange, False, m + 1)
    return Coloring(S, R, below, above, blue, red, purple, green, orange, strong,
                    bd_b, bd_r, bd_bg, bd_ro, r_b, r_r, r_bg, r_ro)


# ---------------------------------------------------------------------------
# RemoveOrReduce


@dataclass(frozen=True)
class RuleOut:
    index: int
    case: int
    queried: tuple = ()


@dataclass(frozen=True)
class BoundaryPair:
    """Ordering ``index`` has ``low`` immediately before ``high`` among the
    live elements, observed with labels 0 and 1.  Ids are original."""

    index: int
    low: int
    high: int
    case: int
    queried: tuple = ()


@dataclass(frozen=True, eq=False)
class Reduced:
    """Discard ``discarded`` (original ids), all inferred to carry ``value``;
    ``keep`` is the local mask over the live elements that survive."""

    keep: np.ndarray
    discarded: np.ndarray
    value: int
    case: int
    queried: tuple = ()

    @property
    def learned(self) -> dict:
        return dict.fromkeys(self.discarded.tolist(), self.value)


SubroutineOutcome = RuleOut | BoundaryPair | Reduced


def max_window_size(m: int) -> int:
    """Largest narrowest-window size for which discarding the bigger of the
    blue and red sets leaves at most ``ceil(2m/3)`` elements."""
    return 2 * math.ceil(2 * m / 3) + 1 - m


class _Step:
    """One RemoveOrReduce call: colouring plus query bookkeeping."""

    def __init__(self, oracle, state: SearchState, col: Coloring, tie_break: TieBreak):
        self.oracle = oracle
        self.state = state
        self.col = col
        self.pick, self.end = _chooser(tie_break)
        self.queried: list[int] = []

    def ask(self, local) -> int:
        x = int(self.state.Z[local])
        if x not in self.queried:
            self.queried.append(x)
        return self.oracle.query(x)

    def first(self, mask) -> int:
        return int(np.flatnonzero(mask)[self.end])

    def rule_out(self, row, case) -> RuleOut:
        return RuleOut(int(self.col.S[row]), case, tuple(self.queried))

    def pair(self, row, low, high, case) -> BoundaryPair:
        Z = self.state.Z
        return BoundaryPair(int(self.col.S[row]), int(Z[low]), int(Z[high]), case,
                            tuple(self.queried))

    # an element observed with label 1 that some ordering places too early
    def one_too_early(self, x, case) -> RuleOut:
        col = self.col
        if col.blue[x]:
            return self.rule_out(self.first(col.below[:, x]), case)
        row = self.first(col.ranks[:, x] < col.rank_blue)
        if self.ask(col.bd_blue[row]) == 0:
            return self.rule_out(row, case)
        return self.rule_out(self.first(col.below[:, col.bd_blue[row]]), case)

    # an element observed with label 0 that some ordering places too late
    def zero_too_late(self, y, case) -> RuleOut:
        col = self.col
        if col.red[y]:
            return self.rule_out(self.first(col.above[:, y]), case)
        row = self.first(col.ranks[:, y] > col.rank_red)
        if self.ask(col.bd_red[row]) == 1:
            return self.rule_out(row, case)
        return self.rule_out(self.first(col.above[:, col.bd_red[row]]), case)

    def adjacent_pair(self, row, x, y, case) -> RuleOut | BoundaryPair:
        """``x`` (blue side) sits immediately before ``y`` (red side)."""
        lx, ly = self.ask(x), self.ask(y)
        if lx == 1:
            return self.one_too_early(x, case)
        if ly == 0:
            return self.zero_too_late(y, case)
        return self.pair(row, x, y, case)

    def one_sided(self, row, blue_side: bool, case) -> RuleOut:
        """Every live element is on one side.  When some element must carry
        label 1 (resp. 0), the last (first) element of ordering ``row`` must too
        if that ordering is the monotone one."""
        order = self.state.order(self.col.S[row])
        if blue_side:
            x = int(order[-1])
            if self.ask(x) == 0:
                return self.rule_out(row, case)
            return self.one_too_early(x, case)
        x = int(order[0])
        if self.ask(x) == 1:
            return self.rule_out(row, case)
        return self.zero_too_late(x, case)

    def reduce(self, discard, value, case) -> Reduced:
        return Reduced(~discard, self.state.Z[discard], value, case, tuple(self.queried))


def remove_or_reduce(oracle, state: SearchState, W, *,
                     tie_break: TieBreak = "smallest") -> SubroutineOutcome:
    """Spend at most three queries to rule out an ordering, find a boundary
    pair, or discard at least a third of the live elements.

    ``W`` maps every live ordering to a window ``(a, b)`` of restricted ranks.
    """
    m = state.m
    if not state.S:
        raise ValueError("no live orderings")
    for i in state.S:
        a, b = W[i]
        if not 1 <= a <= b <= m:
            raise ValueError(f"window {W[i]} for ordering {i} is not inside 1..{m}")
    narrowest = min(W[i][1] - W[i][0] + 1 for i in state.S)
    if narrowest > max_window_size(m):
        raise ValueError(f"narrowest window has {narrowest} ranks; at most "
                         f"{max_window_size(m)} allowed for {m} live elements")

    col = color(state, W)
    st = _Step(oracle, state, col, tie_break)
    pick_row = st.end  # row 0 is the smallest live ordering, -1 the largest

    # case 1: blue and red at once
    both = col.blue & col.red
    if both.any():
        x = st.first(both)
        if st.ask(x) == 1:
            return st.rule_out(st.first(col.below[:, x]), 1)
        return st.rule_out(st.first(col.above[:, x]), 1)

    # case 2: a red element precedes a blue one in some ordering
    if col.boundaries_defined:
        crossed = col.rank_red < col.rank_blue
        if crossed.any():
            row = st.first(crossed)
            x, y = col.bd_blue[row], col.bd_red[row]
            lx, ly = st.ask(x), st.ask(y)
            if lx == 1:
                return st.rule_out(st.first(col.below[:, x]), 2)
            if ly == 0:
                return st.rule_out(st.first(col.above[:, y]), 2)
            return st.rule_out(row, 2)

    # case 3: nothing purple
    if not col.purple.any():
        row = range(len(col.S))[pick_row]
        if col.boundaries_defined:
            return st.adjacent_pair(row, col.bd_blue[row], col.bd_red[row], 3)
        return st.one_sided(row, blue_side=bool(col.blue.any()), case=3)

    # case 4: green and orange at once
    go = col.green & col.orange
    if go.any():
        z = st.first(go)
        if st.ask(z) == 1:
            return st.one_too_early(z, 4)
        return st.zero_too_late(z, 4)

    blue_green = col.blue | col.green
    red_orange = col.red | col.orange
    both_sides = bool(blue_green.any() and red_orange.any())

    # case 5: red/orange precedes blue/green in some ordering
    if both_sides:
        crossed = col.rank_red_orange < col.rank_blue_green
        if crossed.any():
            row = st.first(crossed)
            x, y = col.bd_blue_green[row], col.bd_red_orange[row]
            lx, ly = st.ask(x), st.ask(y)
            if lx == 1:
                return st.one_too_early(x, 5)
            if ly == 0:
                return st.zero_too_late(y, 5)
            return st.rule_out(row, 5)

    # case 6: no strong purple element
    if not col.strong_purple.any():
        row = range(len(col.S))[pick_row]
        if both_sides:
            return st.adjacent_pair(row, col.bd_blue_green[row], col.bd_red_orange[row], 6)
        return st.one_sided(row, blue_side=bool(blue_green.any()), case=6)

    row = range(len(col.S))[pick_row]
    order = state.order(col.S[row])
    strong_ranks = col.ranks[row][col.strong_purple]

    if col.blue.sum() >= col.red.sum():
        # case 7: discard blue, anchored left of the first strong purple element
        z = int(order[strong_ranks.min() - 1])
        x = int(order[strong_ranks.min() - 2])
        if not blue_green[x]:
            # x is orange; anchor on the blue/green boundary instead
            x = int(col.bd_blue_green[row])
            z = int(order[col.rank_blue_green[row]])
            if not col.strong_purple[z]:
                return st.adjacent_pair(row, x, z, 7)
        lz, lx = st.ask(z), st.ask(x)
        if lx == 1:
            return st.one_too_early(x, 7)
        if lz == 1:
            return st.pair(row, x, z, 7)
        return st.reduce(col.blue, 0, 7)

    # case 8: discard red, anchored right of the last strong purple element
    z = int(order[strong_ranks.max() - 1])
    y = int(order[strong_ranks.max()])
    if not red_orange[y]:
        y = int(col.bd_red_orange[row])
        z = int(order[col.rank_red_orange[row] - 2])
        if not col.strong_purple[z]:
            return st.adjacent_pair(row, z, y, 8)
    lz, ly = st.ask(z), st.ask(y)
    if ly == 0:
        return st.zero_too_late(y, 8)
    if lz == 0:
        return st.pair(row, z, y, 8)
    return st.reduce(col.red, 1, 8)


# ---------------------------------------------------------------------------
# Main learner


def _emit(callback, state, **record):
    if callback is not None:
        record.setdefault("S", len(state.S))
        record.setdefault("Z", int(state.Z.size))
        callback(record, state)


def _constant_check(oracle, inst, state, callback):
    n = inst.n
    ends = sorted({int(inst.inv_rank[i, r]) for i in state.S for r in (0, n - 1)})
    bits = {oracle.query(x) for x in ends}
    _emit(callback, state, phase="constant-check", case=None, queried=ends,
          outcome="constant" if len(bits) == 1 else "mixed")
    if len(bits) == 1:
        bit = bits.pop()
        return ThresholdHypothesis(state.S[0], 1 if bit else n + 1)
    return None


def search(oracle, inst: ShuffledInstance, *, stop_size: int = TAIL_SIZE,
           tie_break: TieBreak = "smallest", callback: Callback | None = None):
    """Run the constant check and the main loop until ``|Z| <= stop_size`` or no
    ordering is live.  Returns ``(constant_hypothesis_or_None, state)``."""
    pick, end = _chooser(tie_break)
    state = SearchState.initial(inst)
    const = _constant_check(oracle, inst, state, callback)
    if const is not None:
        return const, state

    while state.Z.size > stop_size and state.S:
        _emit(callback, state, phase="loop", case=None, queried=[], outcome=None)
        Z, m = state.Z, int(state.Z.size)
        k = pick(state.S)
        probe_ranks = [1, math.ceil(m / 3), math.ceil(2 * m / 3), m]
        order = state.order(k)
        zs = [int(order[r - 1]) for r in probe_ranks]
        bits = np.array([oracle.query(Z[z]) for z in zs])
        probed = [int(Z[z]) for z in zs]

        if bits[0] == 1 or bits[3] == 0:
            state.S.remove(k)
            _emit(callback, state, phase="probe", case=None, queried=probed,
                  outcome=f"rule-out:{k}")
            continue

        W, violator = {}, None
        for i in sorted(state.S, reverse=(end == -1)):
            r = state.ranks([i])[0, zs]
            a, b = int(r[bits == 0].max()), int(r[bits == 1].min())
            if a > b:
                violator = i
                break
            W[i] = (a, b)
        if violator is not None:
            state.S.remove(violator)
            _emit(callback, state, phase="probe", case=None, queried=probed,
                  outcome=f"rule-out:{violator}")
            continue

        outcome = remove_or_reduce(oracle, state, W, tie_break=tie_break)
        if isinstance(outcome, RuleOut):
            state.S.remove(outcome.index)
            tag = f"rule-out:{outcome.index}"
        elif isinstance(outcome, BoundaryPair):
            state.S.remove(outcome.index)
            state.C.append(ThresholdHypothesis(
                outcome.index, int(inst.rank[outcome.index, outcome.high])))
            tag = f"boundary-pair:{outcome.index}"
        else:
            state.learned[outcome.discarded] = outcome.value
            state.shrink(outcome.keep)
            tag = "reduced"
        _emit(callback, state, phase="subroutine", case=outcome.case,
              queried=list(outcome.queried), outcome=tag, result=outcome,
              from_size=m)
    return None, state


def _tail(oracle, inst, state, callback, end):
    """Query every live element and harvest boundary pairs from each live
    ordering along which the live labels are monotone."""
    Z = state.Z
    bits = np.array([oracle.query(x) for x in Z], dtype=np.uint8)
    for i in sorted(state.S, reverse=(end == -1)):
        order = state.order(i)
        seq = bits[order]
        if seq[0] == 0 and seq[-1] == 1 and np.all(np.diff(seq.astype(int)) >= 0):
            first_one = int(order[np.argmax(seq)])
            state.C.append(ThresholdHypothesis(i, int(inst.rank[i, Z[first_one]])))
    _emit(callback, state, phase="tail", case=None, queried=[int(x) for x in Z],
          outcome=f"candidates:{len(state.C)}")


def learn_hypothesis(oracle, inst: ShuffledInstance, *, tie_break: TieBreak = "smallest",
                     callback: Callback | None = None) -> ThresholdHypothesis:
    """Exact learner returning the recovered hypothesis."""
    const, state = search(oracle, inst, tie_break=tie_break, callback=callback)
    if const is not None:
        return const
    _, end = _chooser(tie_break)
    if state.S:
        _tail(oracle, inst, state, callback, end)
    if not state.C:
        raise NotRealizableError("no candidate hypothesis survived the search")
    h = contender(oracle, state.C, inst)
    _emit(callback, state, phase="contender", case=None, queried=[], outcome=repr(h))
    _check_against_observed(oracle, evaluate_hypothesis_all(h, inst))
    return h


def shuffled_monotone_learn(oracle, inst: ShuffledInstance, *,
                            tie_break: TieBreak = "smallest",
                            callback: Callback | None = None) -> np.ndarray:
    """Learn every label exactly with O(D + log n) distinct queries.

    Requires some ordering along which the oracle's labels are
    non-decreasing; raises :class:`NotRealizableError` when the answers show
    otherwise.
    """
    h = learn_hypothesis(oracle, inst, tie_break=tie_break, callback=callback)
    return evaluate_hypothesis_all(h, inst)


def query_budget(n: int, D: int) -> int:
    """Distinct-query ceiling for :func:`shuffled_monotone_learn`."""
    return 10 * D + 12 * math.ceil(math.log2(n)) + 14


def baseline_budget(n: int, D: int) -> int:
    return min(n, D * (math.ceil(math.log2(n + 2)) + 1) + D)


__all__ = [
    "BoundaryPair", "Coloring", "LabelOracle", "NotRealizableError", "Reduced",
    "RuleOut", "SearchState", "baseline_budget", "baseline_learn", "color",
    "contender", "learn_hypothesis", "max_window_size", "query_budget",
    "remove_or_reduce", "search", "shuffled_monotone_learn",
]
