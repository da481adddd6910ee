"""Data model: point sets, rank permutations, threshold hypotheses and the
query-counting label oracle."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping

import numpy as np


class InstanceError(ValueError):
    """Malformed instance data (shape, range or finiteness problems)."""


class DimensionMismatchError(InstanceError):
    pass


def _frozen(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class PointSet:
    points: np.ndarray

    def __post_init__(self):
        pts = np.array(self.points, dtype=float)
        if pts.ndim == 1:
            pts = pts.reshape(-1, 1)
        if pts.ndim != 2 or pts.shape[0] < 1 or pts.shape[1] < 1:
            raise InstanceError(f"expected a non-empty (n, d) array, got shape {pts.shape}")
        if not np.all(np.isfinite(pts)):
            raise InstanceError("point coordinates must be finite")
        object.__setattr__(self, "points", _frozen(pts))

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def dim(self) -> int:
        return self.points.shape[1]


@dataclass(frozen=True, eq=False)
class DirectionSet:
    """Unit normal vectors; rows are normalized on construction."""

    directions: np.ndarray

    def __post_init__(self):
        u = np.array(self.directions, dtype=float)
        if u.ndim == 1:
            u = u.reshape(-1, 1)
        if u.ndim != 2 or u.shape[0] < 1 or u.shape[1] < 1:
            raise InstanceError(f"expected a non-empty (D, d) array, got shape {u.shape}")
        if not np.all(np.isfinite(u)):
            raise InstanceError("direction coordinates must be finite")
        norms = np.linalg.norm(u, axis=1)
        if np.any(norms == 0):
            raise InstanceError("zero-length direction")
        object.__setattr__(self, "directions", _frozen(u / norms[:, None]))

    @property
    def D(self) -> int:
        return self.directions.shape[0]

    @property
    def dim(self) -> int:
        return self.directions.shape[1]


@dataclass(frozen=True, eq=False)
class ShuffledInstance:
    """``D`` orderings of the element ids ``0..n-1``.

    ``rank[i, x]`` is the 1-based position of element ``x`` under ordering
    ``i``; ``inv_rank[i, r - 1]`` is the element at position ``r``.
    """

    rank: np.ndarray
    inv_rank: np.ndarray = field(repr=False)

    @classmethod
    def from_ranks(cls, ranks) -> "ShuffledInstance":
        rank = np.array(ranks, dtype=np.int64)
        if rank.ndim == 1:
            rank = rank.reshape(1, -1)
        if rank.ndim != 2 or rank.shape[0] < 1 or rank.shape[1] < 1:
            raise InstanceError(f"expected a non-empty (D, n) rank array, got shape {rank.shape}")
        D, n = rank.shape
        expected = np.arange(1, n + 1)
        if not np.array_equal(np.sort(rank, axis=1), np.broadcast_to(expected, (D, n))):
            raise InstanceError("every rank row must be a permutation of 1..n")
        inv = np.empty_like(rank)
        inv[np.arange(D)[:, None], rank - 1] = np.arange(n)
        return cls(_frozen(rank), _frozen(inv))

    @classmethod
    def from_orders(cls, orders) -> "ShuffledInstance":
        """Build from rows listing element ids in ascending order."""
        inv = np.array(orders, dtype=np.int64)
        if inv.ndim == 1:
            inv = inv.reshape(1, -1)
        D, n = inv.shape
        if not np.array_equal(np.sort(inv, axis=1), np.broadcast_to(np.arange(n), (D, n))):
            raise InstanceError("every order row must be a permutation of 0..n-1")
        rank = np.empty_like(inv)
        rank[np.arange(D)[:, None], inv] = np.arange(1, n + 1)
        return cls(_frozen(rank), _frozen(inv))

    @property
    def n(self) -> int:
        return self.rank.shape[1]

    @property
    def D(self) -> int:
        return self.rank.shape[0]

    def sorted_labels(self, labels, i: int) -> np.ndarray:
        """``labels`` read off in ascending order of ordering ``i``."""
        return np.asarray(labels)[self.inv_rank[i]]

    def __eq__(self, other):
        if not isinstance(other, ShuffledInstance):
            return NotImplemented
        return np.array_equal(self.rank, other.rank)

    __hash__ = None


@dataclass(frozen=True)
class ThresholdHypothesis:
    """``x -> 1`` iff ``rank[direction_index, x] >= threshold_rank``.

    ``threshold_rank`` ranges over ``1..n+1``; ``1`` is all-one and ``n+1``
    all-zero.  Direction indices are 0-based.
    """

    direction_index: int
    threshold_rank: int

    def labels(self, inst: ShuffledInstance) -> np.ndarray:
        return evaluate_hypothesis_all(self, inst)


@dataclass(frozen=True)
class GeometricHypothesis:
    """``x -> 1`` iff ``<u, x> > t`` (``>= t`` when ``inclusive``)."""

    direction: tuple
    threshold: float
    inclusive: bool = False

    def __call__(self, points) -> np.ndarray:
        pts = points.points if isinstance(points, PointSet) else np.atleast_2d(np.asarray(points, float))
        proj = pts @ np.asarray(self.direction, dtype=float)
        hit = proj >= self.threshold if self.inclusive else proj > self.threshold
        return hit.astype(np.uint8)


@dataclass(frozen=True, eq=False)
class PlantedTruth:
    labeling: np.ndarray
    monotone_index: int | None = None
    threshold_rank: int | None = None
    boundary_low: int | None = None
    boundary_high: int | None = None

    @classmethod
    def from_hypothesis(cls, inst: ShuffledInstance, h: ThresholdHypothesis) -> "PlantedTruth":
        labels = _frozen(evaluate_hypothesis_all(h, inst))
        i, j = h.direction_index, h.threshold_rank
        low = high = None
        if 1 < j <= inst.n:
            low = int(inst.inv_rank[i, j - 2])
            high = int(inst.inv_rank[i, j - 1])
        return cls(labels, i, j, low, high)

    @property
    def is_constant(self) -> bool:
        return bool(self.labeling.min() == self.labeling.max())


def check_index(inst: ShuffledInstance, i: int) -> None:
    if not 0 <= i < inst.D:
        raise IndexError(f"direction index {i} out of range for D={inst.D}")


def check_element(inst: ShuffledInstance, x: int) -> None:
    if not 0 <= x < inst.n:
        raise IndexError(f"element id {x} out of range for n={inst.n}")


def evaluate_hypothesis(h: ThresholdHypothesis, inst: ShuffledInstance, x: int) -> int:
    check_index(inst, h.direction_index)
    check_element(inst, x)
    if not 1 <= h.threshold_rank <= inst.n + 1:
        raise IndexError(f"threshold rank {h.threshold_rank} outside 1..{inst.n + 1}")
    return int(inst.rank[h.direction_index, x] >= h.threshold_rank)


def evaluate_hypothesis_all(h: ThresholdHypothesis, inst: ShuffledInstance) -> np.ndarray:
    check_index(inst, h.direction_index)
    if not 1 <= h.threshold_rank <= inst.n + 1:
        raise IndexError(f"threshold rank {h.threshold_rank} outside 1..{inst.n + 1}")
    return (inst.rank[h.direction_index] >= h.threshold_rank).astype(np.uint8)


def project_to_instance(points: PointSet, directions: DirectionSet) -> ShuffledInstance:
    """Rank elements by ascending projection onto each direction.

    Equal projections (exact float equality) are ordered by element id.
    """
    if points.dim != directions.dim:
        raise DimensionMismatchError(
            f"points have dimension {points.dim}, directions {directions.dim}")
    proj = directions.directions @ points.points.T  # (D, n)
    ids = np.arange(points.n)
    orders = np.stack([np.lexsort((ids, row)) for row in proj])
    return ShuffledInstance.from_orders(orders)


def reduce_to_axis_aligned(points: PointSet, directions: DirectionSet) -> PointSet:
    """Map each point to its vector of projections, one coordinate per direction."""
    if points.dim != directions.dim:
        raise DimensionMismatchError(
            f"points have dimension {points.dim}, directions {directions.dim}")
    return PointSet(points.points @ directions.directions.T)


def restrict(inst: ShuffledInstance, Z) -> tuple[ShuffledInstance, np.ndarray]:
    """Restrict every ordering to the subset ``Z`` (ids or a boolean mask) and
    compact its ranks.

    Returns ``(sub, ids)``: local element ``k`` of ``sub`` is original element
    ``ids[k]``, with ``ids`` sorted ascending so id order is preserved.
    """
    Z = np.asarray(Z)
    n, D = inst.n, inst.D
    if Z.dtype == bool:
        if Z.shape != (n,):
            raise InstanceError("boolean restriction mask must have one entry per element")
        mask = Z
    else:
        Z = Z.astype(np.int64).ravel()
        if Z.size and (Z.min() < 0 or Z.max() >= n):
            raise IndexError("restriction set contains ids outside the instance")
        mask = np.zeros(n, dtype=bool)
        mask[Z] = True
    ids = np.flatnonzero(mask)
    m = ids.size
    if m == 0:
        raise InstanceError("cannot restrict to an empty set")
    local = np.cumsum(mask) - 1
    inv = inst.inv_rank
    sub_inv = local[inv[mask[inv]]].reshape(D, m)
    sub_rank = np.empty_like(sub_inv)
    flat = (sub_inv + (np.arange(D) * m)[:, None]).ravel()
    sub_rank.ravel()[flat] = np.tile(np.arange(1, m + 1), D)
    return ShuffledInstance(_frozen(sub_rank), _frozen(sub_inv)), _frozen(ids)


def to_geometric(h: ThresholdHypothesis, inst: ShuffledInstance, points: PointSet,
                 directions: DirectionSet) -> GeometricHypothesis:
    """Express ``h`` as a strict halfspace, thresholding at the midpoint of the
    two projections adjacent to the cut (infinite at the extremes).

    Only meaningful relative to this point set; tied projections across the
    cut cannot be separated.
    """
    check_index(inst, h.direction_index)
    u = directions.directions[h.direction_index]
    proj = points.points @ u
    j, n = h.threshold_rank, inst.n
    if j <= 1:
        t = -math.inf
    elif j > n:
        t = math.inf
    else:
        lo = proj[inst.inv_rank[h.direction_index, j - 2]]
        hi = proj[inst.inv_rank[h.direction_index, j - 1]]
        t = float((lo + hi) / 2)
    return GeometricHypothesis(tuple(float(c) for c in u), t)


class LabelOracle:
    """Memoizing, query-counting access to a labeling over element ids.

    ``distinct_queries`` is the budgeted metric; repeated queries are free and
    only bump ``total_calls``.  ``corruption`` flips the listed ids.
    """

    def __init__(self, truth, corruption: Iterable[int] = ()):
        t = np.array(truth, dtype=np.uint8).ravel()
        if t.size == 0 or np.any(t > 1):
            raise InstanceError("truth must be a non-empty 0/1 vector")
        self.truth = _frozen(t)
        self.corruption = frozenset(int(c) for c in corruption)
        if any(not 0 <= c < t.size for c in self.corruption):
            raise IndexError("corruption ids out of range")
        self.cache: dict[int, int] = {}
        self.total_calls = 0

    @property
    def n(self) -> int:
        return self.truth.size

    @property
    def distinct_queries(self) -> int:
        return len(self.cache)

    def query(self, x) -> int:
        x = int(x)
        self.total_calls += 1
        bit = self.cache.get(x)
        if bit is None:
            bit = int(self.truth[x]) ^ (x in self.corruption)
            self.cache[x] = bit
        return bit

    def target(self) -> np.ndarray:
        """The labeling actually served (truth with corruption applied).

        For scoring only; learners must go through :meth:`query`.
        """
        f = self.truth.copy()
        if self.corruption:
            f[list(self.corruption)] ^= 1
        return f

    @property
    def observed(self) -> Mapping[int, int]:
        return self.cache

    def view(self, ids) -> "OracleView":
        return OracleView(self, ids)


class OracleView:
    """Oracle over local ids ``0..len(ids)-1`` backed by a parent oracle.

    Keeps its own cache and counters while forwarding to the parent, so the
    parent still sees every distinct element touched.
    """

    def __init__(self, parent, ids):
        self.parent = parent
        self.ids = np.asarray(ids, dtype=np.int64)
        self.cache: dict[int, int] = {}
        self.total_calls = 0

    @property
    def n(self) -> int:
        return self.ids.size

    @property
    def distinct_queries(self) -> int:
        return len(self.cache)

    @property
    def observed(self) -> Mapping[int, int]:
        return self.cache

    def query(self, x) -> int:
        x = int(x)
        self.total_calls += 1
        bit = self.cache.get(x)
        if bit is None:
            bit = self.parent.query(self.ids[x])
            self.cache[x] = bit
        return bit

    def view(self, ids) -> "OracleView":
        return OracleView(self, ids)
