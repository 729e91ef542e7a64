import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError
from sklearn.pipeline import make_pipeline
from sklearn.preprocessing import FunctionTransformer

from conelip import McShaneRegressor, PHMcShaneRegressor, RaySystem, cone_lip, from_points, lip_const
from conelip.exceptions import ValidationError


def test_mcshane_regressor_interpolates_and_keeps_constant(rng):
    X = rng.uniform(-2, 2, size=(12, 2))
    y = np.sin(X).sum(axis=1)
    est = McShaneRegressor(norm="l2").fit(X, y)
    assert np.allclose(est.predict(X), y)
    Z = rng.uniform(-2, 2, size=(20, 2))
    pts = np.vstack([X, Z])
    vals = np.concatenate([y, est.predict(Z)])
    # shift so the first point is the basepoint; constants do not change
    assert lip_const(from_points(pts - pts[0], "l2"), vals - vals[0]) <= est.lipschitz_ * (1 + 1e-12)


def test_mcshane_regressor_methods_order(rng):
    X = rng.uniform(-2, 2, size=(8, 1))
    y = rng.uniform(-1, 1, size=(8,))
    Z = rng.uniform(-3, 3, size=(30, 1))
    lo = McShaneRegressor(method="sup").fit(X, y).predict(Z)
    hi = McShaneRegressor(method="inf").fit(X, y).predict(Z)
    mid = McShaneRegressor(method="mid").fit(X, y).predict(Z)
    assert np.all(lo <= mid + 1e-12) and np.all(mid <= hi + 1e-12)


def test_mcshane_regressor_params():
    est = McShaneRegressor(norm="l1", method="inf", lipschitz=3.0)
    assert est.get_params() == {"norm": "l1", "method": "inf", "lipschitz": 3.0}
    twin = clone(est)
    assert twin.get_params() == est.get_params()
    with pytest.raises(NotFittedError):
        est.predict([[0.0]])
    with pytest.raises(ValidationError):
        McShaneRegressor(lipschitz=0.1).fit([[0.0], [1.0]], [0.0, 1.0])
    with pytest.raises(ValueError):
        McShaneRegressor(method="nope").fit([[0.0], [1.0]], [0.0, 1.0])


def test_pipeline():
    X = np.linspace(-1, 1, 9)[:, None]
    y = np.abs(X[:, 0])
    pipe = make_pipeline(FunctionTransformer(lambda a: 2 * a), McShaneRegressor())
    pipe.fit(X, y)
    assert pipe.score(X, y) == pytest.approx(1.0)


def test_ph_regressor_line():
    est = PHMcShaneRegressor().fit([[1.0], [-2.0]], [2.0, 2.0])
    assert est.lipschitz_ == 2
    assert list(est.predict([[3.0], [-1.0], [0.0]])) == [6.0, 1.0, 0.0]


def test_ph_regressor_plane():
    est = PHMcShaneRegressor(norm="l2").fit([[2.0, 0.0]], [2.0])
    assert est.predict([[0.0, 1.0]])[0] == pytest.approx(0.0, abs=1e-12)
    assert est.predict([[3.0, 0.0]])[0] == 3.0


def test_ph_regressor_keeps_cone_constant(rng):
    X = rng.normal(size=(4, 2))
    y = rng.uniform(-1, 1, size=(4,))
    Z = rng.normal(size=(4, 2))
    for method in ("sup", "inf", "mid"):
        est = PHMcShaneRegressor(method=method).fit(X, y)
        pts = np.vstack([X, Z])
        vals = np.concatenate([y, est.predict(Z)])
        r = np.linalg.norm(pts, axis=1)
        L = cone_lip(RaySystem(pts / r[:, None]), vals / r)
        assert L <= est.lipschitz_ * (1 + 1e-9)


def test_ph_regressor_rejects_inconsistent_ray():
    with pytest.raises(ValidationError):
        PHMcShaneRegressor().fit([[1.0], [2.0]], [1.0, 3.0])
    with pytest.raises(ValidationError):
        PHMcShaneRegressor().fit([[0.0], [2.0]], [1.0, 3.0])
