"""Planted, adversarial and textbook instance constructions."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .instance import (
    DirectionSet,
    GeometricHypothesis,
    PlantedTruth,
    PointSet,
    ShuffledInstance,
    ThresholdHypothesis,
)
from .verify import consistent_hypotheses, is_monotone_under


def as_rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


@dataclass(frozen=True, eq=False)
class GeneratedInstance:
    """An instance with its planted labeling.

    Geometric constructions also carry their points, directions and the
    hypothesis family they were built from.
    """

    instance: ShuffledInstance
    truth: PlantedTruth
    metadata: dict = field(default_factory=dict)
    points: PointSet | None = None
    directions: DirectionSet | None = None
    hypotheses: tuple = ()

    def __post_init__(self):
        t = self.truth
        if t.labeling.shape != (self.instance.n,):
            raise ValueError("planted labeling does not match the instance size")
        if t.monotone_index is not None:
            if not is_monotone_under(t.labeling, self.instance, t.monotone_index):
                raise ValueError(f"planted labeling is not monotone under ordering "
                                 f"{t.monotone_index}")
            h = ThresholdHypothesis(t.monotone_index, t.threshold_rank)
            if not np.array_equal(h.labels(self.instance), t.labeling):
                raise ValueError("planted threshold does not reproduce the labeling")

    @property
    def is_realizable(self) -> bool:
        return self.truth.monotone_index is not None


def planted(inst: ShuffledInstance, labeling, **metadata) -> GeneratedInstance:
    """Wrap a labeling, planting the smallest consistent hypothesis if any."""
    labeling = np.asarray(labeling, dtype=np.uint8)
    found = sorted(consistent_hypotheses(inst, labeling), key=lambda h: h.direction_index)
    if found:
        truth = PlantedTruth.from_hypothesis(inst, found[0])
    else:
        truth = PlantedTruth(labeling)
    return GeneratedInstance(inst, truth, metadata)


def gen_random_shuffled(n: int, D: int, seed=None) -> GeneratedInstance:
    """Independent uniform orderings and a uniformly planted threshold."""
    if n < 1 or D < 1:
        raise ValueError("n and D must be positive")
    rng = as_rng(seed)
    orders = np.stack([rng.permutation(n) for _ in range(D)])
    inst = ShuffledInstance.from_orders(orders)
    h = ThresholdHypothesis(int(rng.integers(D)), int(rng.integers(1, n + 2)))
    meta = {"generator": "random", "n": n, "D": D}
    if not isinstance(seed, np.random.Generator):
        meta["seed"] = seed
    return GeneratedInstance(inst, PlantedTruth.from_hypothesis(inst, h), meta)


def _geometric(points, directions, hypotheses, labeling, **metadata) -> GeneratedInstance:
    from .instance import project_to_instance

    inst = project_to_instance(points, directions)
    g = planted(inst, labeling, **metadata)
    return GeneratedInstance(g.instance, g.truth, g.metadata, points, directions,
                             tuple(hypotheses))


def gen_circle_instance(n: int):
    """``n`` evenly spaced unit-circle points and, for each point, a halfplane
    containing that point alone.  Returns ``(points, hypotheses)``."""
    if n < 3:
        raise ValueError("need at least three points")
    angles = 2 * math.pi * np.arange(n) / n
    pts = np.column_stack([np.cos(angles), np.sin(angles)])
    t = (math.cos(2 * math.pi / n) + 1) / 2
    hyps = [GeometricHypothesis((float(p[0]), float(p[1])), t) for p in pts]
    return PointSet(pts), hyps


def circle_generated(n: int) -> GeneratedInstance:
    """:func:`gen_circle_instance` packaged with the point directions and the
    first hypothesis' labeling planted."""
    points, hyps = gen_circle_instance(n)
    dirs = DirectionSet(np.array([h.direction for h in hyps]))
    return _geometric(points, dirs, hyps, hyps[0](points), generator="circle", n=n)


def gen_depth_two_hard(m: int):
    """Points ``(i, -i)`` for ``i`` in ``-m..m`` and, per ``i``, the labeling of
    ``1(x1 >= i and x2 >= -i)``, which singles out point ``i``.  Returns
    ``(points, labelings)`` with labelings in point order."""
    if m < 1:
        raise ValueError("m must be positive")
    idx = np.arange(-m, m + 1)
    pts = np.column_stack([idx, -idx]).astype(float)
    labelings = [((pts[:, 0] >= i) & (pts[:, 1] >= -i)).astype(np.uint8) for i in idx]
    return PointSet(pts), labelings


def depth_two_generated(m: int) -> GeneratedInstance:
    points, labelings = gen_depth_two_hard(m)
    dirs = DirectionSet(np.eye(2))
    return _geometric(points, dirs, (), labelings[m], generator="depth2", m=m)


def _stump(i: int, d: int, t: float) -> GeometricHypothesis:
    e = [0.0] * d
    e[i] = 1.0
    return GeometricHypothesis(tuple(e), t, inclusive=True)


def gen_star_instance(d: int):
    """``2d`` points ``-1 + e_i/2`` and ``1 - e_i/2`` with the stumps
    ``[h0, h_{1,-}, h_{1,+}, ...]`` forming a star around ``h0 = 1(x_1 >= 0)``.
    Returns ``(points, hypotheses)``."""
    if d < 1:
        raise ValueError("d must be positive")
    pts, hyps = [], [_stump(0, d, 0.0)]
    for i in range(d):
        e = np.eye(d)[i]
        pts += [-1 + e / 2, 1 - e / 2]
        hyps += [_stump(i, d, -0.75), _stump(i, d, 0.75)]
    return PointSet(np.array(pts)), hyps


def star_generated(d: int) -> GeneratedInstance:
    points, hyps = gen_star_instance(d)
    return _geometric(points, DirectionSet(np.eye(d)), hyps, hyps[0](points),
                      generator="star", d=d)


def corrupt_labels(inst: ShuffledInstance, truth: PlantedTruth, budget: int,
                   mode: str = "uniform", seed=None) -> frozenset:
    """Pick ``budget`` element ids whose labels the oracle will flip.

    ``uniform`` draws a random subset; ``boundary`` takes the ranks closest to
    the planted cut along the planted ordering, lower rank first on ties.
    """
    n = inst.n
    if not 0 <= budget <= n:
        raise ValueError(f"budget must lie in 0..{n}, got {budget}")
    if mode == "uniform":
        ids = as_rng(seed).choice(n, size=budget, replace=False)
        return frozenset(int(x) for x in ids)
    if mode == "boundary":
        if truth.monotone_index is None:
            raise ValueError("boundary corruption needs a planted ordering")
        j = truth.threshold_rank
        ranks = sorted(range(1, n + 1), key=lambda r: (abs(2 * r - 2 * j + 1), r))[:budget]
        row = inst.inv_rank[truth.monotone_index]
        return frozenset(int(row[r - 1]) for r in ranks)
    raise ValueError(f"unknown corruption mode {mode!r}")


__all__ = [
    "GeneratedInstance",
    "as_rng",
    "circle_generated",
    "corrupt_labels",
    "depth_two_generated",
    "gen_circle_instance",
    "gen_depth_two_hard",
    "gen_random_shuffled",
    "gen_star_instance",
    "planted",
    "star_generated",
]
