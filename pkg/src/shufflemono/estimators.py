"""scikit-learn style wrappers around the query learners."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin, TransformerMixin
from sklearn.utils import check_random_state
from sklearn.utils.validation import check_is_fitted

from .approx import ApproxParams, eps_exact_learn, realizable_learn, tolerant_learn
from .exact import baseline_learn, learn_hypothesis
from .instance import (
    GeometricHypothesis,
    LabelOracle,
    PointSet,
    project_to_instance,
    reduce_to_axis_aligned,
    to_geometric,
)
from .validation import check_binary_labels, check_directions, check_fraction, check_points
from .verify import consistent_hypotheses

METHODS = ("exact", "baseline", "eps-exact", "realizable", "tolerant")


class HalfspaceQueryLearner(ClassifierMixin, BaseEstimator):
    """Learn a halfspace whose normal is one of a known set of directions by
    querying as few training labels as possible.

    ``fit`` never reads ``y`` wholesale: the labels sit behind a counting
    oracle and ``n_queries_`` reports how many distinct ones were requested.
    Pass ``oracle`` (anything with ``query(index) -> 0/1``) instead of ``y``
    to answer queries interactively.

    Parameters
    ----------
    directions : array of shape (D, n_features), default=None
        Candidate normal vectors; ``None`` uses the coordinate axes, which
        makes the model a decision stump.
    method : {"exact", "baseline", "eps-exact", "realizable", "tolerant"}
    eps, delta : float, optional
        Accuracy and confidence for the approximate methods.
    tie_break : {"smallest", "largest"}
        Which live direction the exact search probes first.
    random_state : int, RandomState or None
        Seeds the randomized methods.
    """

    def __init__(self, directions=None, method="exact", eps=None, delta=None,
                 tie_break="smallest", random_state=None):
        self.directions = directions
        self.method = method
        self.eps = eps
        self.delta = delta
        self.tie_break = tie_break
        self.random_state = random_state

    def _learn(self, oracle, inst):
        m = self.method
        if m == "exact":
            return learn_hypothesis(oracle, inst, tie_break=self.tie_break)
        if m == "baseline":
            labels = baseline_learn(oracle, inst)
            return min(consistent_hypotheses(inst, labels),
                       key=lambda h: h.direction_index)
        eps = check_fraction("eps", self.eps)
        if m == "eps-exact":
            return eps_exact_learn(oracle, inst, eps, tie_break=self.tie_break)
        seed = int(check_random_state(self.random_state).randint(np.iinfo(np.int32).max))
        params = ApproxParams(eps, check_fraction("delta", self.delta), seed)
        if m == "realizable":
            return realizable_learn(oracle, inst, params)
        return tolerant_learn(oracle, inst, params)

    def fit(self, X, y=None, oracle=None):
        if self.method not in METHODS:
            raise ValueError(f"method must be one of {METHODS}, got {self.method!r}")
        X = check_points(X)
        n, d = X.shape
        if (y is None) == (oracle is None):
            raise ValueError("pass exactly one of y or oracle")
        if oracle is None:
            oracle = LabelOracle(check_binary_labels(y, n))
        dirs = check_directions(self.directions, d)
        points = PointSet(X)
        inst = project_to_instance(points, dirs)

        h = self._learn(oracle, inst)
        g = to_geometric(h, inst, points, dirs)
        self.n_features_in_ = d
        self.classes_ = np.array([0, 1])
        self.hypothesis_ = h
        self.direction_index_ = h.direction_index
        self.direction_ = np.array(g.direction)
        self.threshold_ = g.threshold
        self.labels_ = h.labels(inst)
        self.n_queries_ = oracle.distinct_queries
        return self

    def decision_function(self, X):
        check_is_fitted(self, "direction_")
        X = check_points(X)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(f"X has {X.shape[1]} features, expected {self.n_features_in_}")
        return X @ self.direction_ - self.threshold_

    def predict(self, X):
        check_is_fitted(self, "direction_")
        h = GeometricHypothesis(tuple(self.direction_), self.threshold_)
        X = check_points(X)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(f"X has {X.shape[1]} features, expected {self.n_features_in_}")
        return h(X).astype(int)


class AxisAlignedTransformer(TransformerMixin, BaseEstimator):
    """Replace each point by its projections onto the given directions, turning
    a bounded-direction halfspace into a decision stump."""

    def __init__(self, directions=None):
        self.directions = directions

    def fit(self, X, y=None):
        X = check_points(X)
        self.directions_ = check_directions(self.directions, X.shape[1]).directions
        self.n_features_in_ = X.shape[1]
        return self

    def transform(self, X):
        check_is_fitted(self, "directions_")
        X = check_points(X)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(f"X has {X.shape[1]} features, expected {self.n_features_in_}")
        return reduce_to_axis_aligned(PointSet(X), check_directions(self.directions_, X.shape[1])).points
