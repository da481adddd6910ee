import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError
from sklearn.pipeline import make_pipeline

from shufflemono.estimators import AxisAlignedTransformer, HalfspaceQueryLearner
from shufflemono.validation import check_binary_labels, check_directions, check_fraction, check_points


@pytest.fixture
def data():
    rng = np.random.default_rng(0)
    X = rng.normal(size=(800, 3))
    U = rng.normal(size=(5, 3))
    u = U[2] / np.linalg.norm(U[2])
    y = (X @ u > 0.2).astype(int)
    return X, U, y


@pytest.mark.parametrize("method", ["exact", "baseline", "eps-exact", "realizable", "tolerant"])
def test_methods_fit_and_predict(data, method):
    X, U, y = data
    est = HalfspaceQueryLearner(U, method=method, eps=0.05, delta=0.2, random_state=0).fit(X, y)
    assert est.direction_index_ == 2
    assert est.score(X, y) >= 0.95
    assert est.n_queries_ < len(X)
    if method in ("exact", "baseline"):
        assert np.array_equal(est.predict(X), y)
        assert np.array_equal(est.labels_, y)


def test_oracle_instead_of_labels(data):
    X, U, y = data
    asked = []

    class Oracle:
        distinct_queries = property(lambda self: len(set(asked)))
        observed = {}

        def query(self, i):
            asked.append(int(i))
            self.observed[int(i)] = int(y[i])
            return int(y[i])

    est = HalfspaceQueryLearner(U).fit(X, oracle=Oracle())
    assert est.n_queries_ == len(set(asked)) < 100
    with pytest.raises(ValueError):
        HalfspaceQueryLearner(U).fit(X)
    with pytest.raises(ValueError):
        HalfspaceQueryLearner(U).fit(X, y, oracle=Oracle())


def test_params_and_clone(data):
    est = HalfspaceQueryLearner(method="eps-exact", eps=0.1)
    assert est.get_params()["eps"] == 0.1
    assert clone(est).get_params() == est.get_params()
    est.set_params(method="baseline")
    assert est.method == "baseline"


def test_errors(data):
    X, U, y = data
    with pytest.raises(NotFittedError):
        HalfspaceQueryLearner().predict(X)
    with pytest.raises(ValueError):
        HalfspaceQueryLearner(method="magic").fit(X, y)
    with pytest.raises(ValueError):
        HalfspaceQueryLearner(U, method="tolerant", eps=0.1).fit(X, y)
    est = HalfspaceQueryLearner(U).fit(X, y)
    with pytest.raises(ValueError):
        est.predict(X[:, :2])


def test_stump_pipeline(data):
    X, U, y = data
    pipe = make_pipeline(AxisAlignedTransformer(U), HalfspaceQueryLearner())
    pipe.fit(X, y)
    assert pipe[-1].direction_index_ == 2
    assert pipe.score(X, y) == 1.0
    assert pipe[0].transform(X).shape == (800, 5)


def test_validation_helpers():
    assert check_points([[1, 2]]).dtype == float
    with pytest.raises(ValueError):
        check_points([[np.inf, 0]])
    assert check_directions(None, 3).D == 3
    with pytest.raises(ValueError):
        check_directions([[1, 0]], 3)
    with pytest.raises(ValueError):
        check_binary_labels([0, 2], 2)
    with pytest.raises(ValueError):
        check_binary_labels([0, 1, 1], 2)
    with pytest.raises(ValueError):
        check_fraction("eps", None)
    with pytest.raises(ValueError):
        check_fraction("eps", 1.0)
