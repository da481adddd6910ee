import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from shufflemono.generators import (
    GeneratedInstance,
    circle_generated,
    corrupt_labels,
    depth_two_generated,
    gen_circle_instance,
    gen_depth_two_hard,
    gen_random_shuffled,
    gen_star_instance,
    star_generated,
)
from shufflemono.formats import dumps
from shufflemono.instance import PlantedTruth, ShuffledInstance, ThresholdHypothesis
from shufflemono.verify import consistent_hypotheses, is_monotone_under, verify_star_condition


@given(st.integers(1, 80), st.integers(1, 6), st.integers(0, 2**32 - 1))
def test_random_instances_are_planted(n, D, seed):
    g = gen_random_shuffled(n, D, seed=seed)
    t = g.truth
    assert 0 <= t.monotone_index < D and 1 <= t.threshold_rank <= n + 1
    assert is_monotone_under(t.labeling, g.instance, t.monotone_index)
    assert t.labeling.sum() == n - t.threshold_rank + 1


def test_random_is_reproducible():
    assert dumps(gen_random_shuffled(50, 3, seed=7)) == dumps(gen_random_shuffled(50, 3, seed=7))
    assert dumps(gen_random_shuffled(50, 3, seed=7)) != dumps(gen_random_shuffled(50, 3, seed=8))


def test_random_rejects_bad_sizes():
    with pytest.raises(ValueError):
        gen_random_shuffled(0, 2)
    with pytest.raises(ValueError):
        gen_random_shuffled(3, 0)


def test_generated_instance_self_checks():
    inst = ShuffledInstance.from_orders([[0, 1, 2]])
    lying = PlantedTruth(np.array([1, 0, 0], dtype=np.uint8), 0, 3)
    with pytest.raises(ValueError):
        GeneratedInstance(inst, lying)


def test_circle_n4_by_hand():
    pts, hyps = gen_circle_instance(4)
    assert np.allclose(pts.points, [[1, 0], [0, 1], [-1, 0], [0, -1]], atol=1e-12)
    assert hyps[0](pts).tolist() == [1, 0, 0, 0]


@pytest.mark.parametrize("n", [3, 5, 8, 64, 257])
def test_circle_isolates_each_point(n):
    pts, hyps = gen_circle_instance(n)
    labels = np.stack([h(pts) for h in hyps])
    assert np.array_equal(labels, np.eye(n))
    assert hyps[0].threshold == pytest.approx((math.cos(2 * math.pi / n) + 1) / 2)


def test_circle_instance_is_realizable():
    g = circle_generated(8)
    assert g.is_realizable and g.instance.D == 8


def test_depth_two_by_hand():
    pts, labelings = gen_depth_two_hard(2)
    assert pts.points.tolist() == [[-2, 2], [-1, 1], [0, 0], [1, -1], [2, -2]]
    assert labelings[2].tolist() == [0, 0, 1, 0, 0]
    assert all(f.sum() == 1 for f in labelings)


@pytest.mark.parametrize("m", [2, 3, 6])
def test_depth_two_not_realizable(m):
    g = depth_two_generated(m)
    assert not g.is_realizable
    assert consistent_hypotheses(g.instance, g.truth.labeling) == set()


def test_star_d2_from_construction():
    pts, hyps = gen_star_instance(2)
    assert pts.points[0].tolist() == [-0.5, -1.0]
    x = pts.points[:1]
    # order: h0, h_{1,-}, h_{1,+}, h_{2,-}, h_{2,+}
    assert [int(h(x)[0]) for h in hyps] == [0, 1, 0, 0, 0]
    assert len(hyps) == 5 and all(h.inclusive for h in hyps)


def test_star_smallest_case_and_realizable_package():
    pts, hyps = gen_star_instance(1)
    assert pts.n == 2 and len(hyps) == 3 and verify_star_condition(pts, hyps)
    g = star_generated(4)
    assert g.is_realizable and g.truth.monotone_index == 0


def test_corruption_modes():
    inst = ShuffledInstance.from_orders([[9, 8, 7, 6, 5, 4, 3, 2, 1, 0]])
    t = PlantedTruth.from_hypothesis(inst, ThresholdHypothesis(0, 5))
    assert corrupt_labels(inst, t, 0, "boundary") == frozenset()
    flips = corrupt_labels(inst, t, 2, "boundary")
    assert sorted(int(inst.rank[0, x]) for x in flips) == [4, 5]
    flips = corrupt_labels(inst, t, 3, "uniform", seed=1)
    assert len(flips) == 3
    with pytest.raises(ValueError):
        corrupt_labels(inst, t, 11)
    with pytest.raises(ValueError):
        corrupt_labels(inst, t, 1, "sideways")
    with pytest.raises(ValueError):
        corrupt_labels(inst, PlantedTruth(t.labeling), 1, "boundary")


@given(st.integers(1, 60), st.integers(0, 60), st.integers(0, 1000))
def test_uniform_corruption_size(n, budget, seed):
    g = gen_random_shuffled(n, 2, seed=seed)
    budget = min(budget, n)
    flips = corrupt_labels(g.instance, g.truth, budget, "uniform", seed=seed)
    assert len(flips) == budget and all(0 <= x < n for x in flips)
