import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from lindforest.estimator import StationaryStateAnalyzer
from lindforest.exceptions import InvalidSystem
from lindforest.model import LindbladSystem
from lindforest.systems import four_level_cycle, two_basin_decay


def test_params_roundtrip():
    est = StationaryStateAnalyzer(method="both", threads=2)
    assert est.get_params() == {"method": "both", "edge_tol": 1e-12, "threads": 2}
    c = clone(est)
    assert c.get_params() == est.get_params()
    c.set_params(method="determinant")
    assert c.method == "determinant"


def test_fit_attributes():
    est = StationaryStateAnalyzer().fit(two_basin_decay())
    assert est.rank_ == 6 and est.n_basins_ == 2
    np.testing.assert_allclose(est.stationary_vectors_[0, :2], [9 / 13, 4 / 13])
    assert len(est.constraints_) == 2


def test_transform_and_predict():
    est = StationaryStateAnalyzer(method="both").fit(two_basin_decay())
    X = np.zeros((2, 8))
    X[0, 4] = 1
    X[1, :2] = 0.5
    c = est.transform(X)
    np.testing.assert_allclose(c[0], [736749236 / 1268739497, 531990261 / 1268739497])
    np.testing.assert_allclose(c[1], [1, 0])
    pred = est.predict(X)
    np.testing.assert_allclose(pred.sum(axis=1), 1)
    np.testing.assert_allclose(pred[1, :2], [9 / 13, 4 / 13])


def test_unfitted_and_bad_input():
    est = StationaryStateAnalyzer()
    with pytest.raises(NotFittedError):
        est.transform(np.ones((1, 4)) / 4)
    est.fit(four_level_cycle())
    with pytest.raises(ValueError):
        est.transform(np.ones((1, 3)) / 3)
    with pytest.raises(ValueError):
        est.transform(np.ones((1, 4)))
    with pytest.raises(ValueError):
        est.transform([[np.nan, 0, 0, 1]])
    with pytest.raises(TypeError):
        est.fit(np.eye(4))
    with pytest.raises(InvalidSystem):
        est.fit(LindbladSystem([[0, 1], [0, 0]], (np.eye(2),)))


def test_predict_state_is_density_matrix():
    est = StationaryStateAnalyzer().fit(four_level_cycle())
    rho = est.predict_state([1, 0, 0, 0])
    assert np.trace(rho).real == pytest.approx(1)
    np.testing.assert_allclose(np.diag(rho).real, np.array([32877, 7904, 68068, 131508]) / 240357)
