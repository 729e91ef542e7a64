"""scikit-learn compatible Lipschitz extension estimators.

Both estimators interpolate scattered data without raising its Lipschitz
constant, so they can sit in a ``Pipeline`` or be tuned with
``GridSearchCV`` like any other regressor.
"""

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.utils.validation import check_array, check_is_fitted, check_X_y

from . import _search
from ._validation import check_norm, vector_norm
from .cone import RaySystem, cone_lip
from .elements import DIRECTION_TOL
from .exceptions import DuplicatePoint, ValidationError
from .metric import METRIC_TOL

_METHODS = ("sup", "inf", "mid")


def _check_method(method):
    if method not in _METHODS:
        raise ValueError(f"method must be one of {_METHODS}, got {method!r}")


class McShaneRegressor(RegressorMixin, BaseEstimator):
    """McShane extension of samples ``(X, y)`` to all of R^d.

    Parameters
    ----------
    norm : {"l1", "l2", "linf"}
        Norm defining the metric on R^d.
    method : {"sup", "inf", "mid"}
        Smallest extension, largest extension, or their average. All three
        keep the Lipschitz constant of the data.
    lipschitz : float or None
        Constant to use; must be at least the data's own constant.

    Attributes
    ----------
    lipschitz_ : float
        Constant used by ``predict``.
    """

    def __init__(self, norm="l2", method="mid", lipschitz=None):
        self.norm = norm
        self.method = method
        self.lipschitz = lipschitz

    def fit(self, X, y):
        check_norm(self.norm)
        _check_method(self.method)
        X, y = check_X_y(X, y, y_numeric=True)
        D = vector_norm(X[:, None, :] - X[None, :, :], self.norm)
        iu, ju = np.triu_indices(len(X), 1)
        if len(iu):
            dup = np.flatnonzero(D[iu, ju] < METRIC_TOL)
            if len(dup):
                raise DuplicatePoint(int(iu[dup[0]]), int(ju[dup[0]]))
            L = float(np.max(np.abs(y[iu] - y[ju]) / D[iu, ju]))
        else:
            L = 0.0
        if self.lipschitz is not None:
            if self.lipschitz < L * (1 - 1e-12):
                raise ValidationError(f"lipschitz={self.lipschitz} is below the data constant {L}")
            L = float(self.lipschitz)
        self.X_fit_ = X
        self.y_fit_ = y.astype(float)
        self.lipschitz_ = L
        self.n_features_in_ = X.shape[1]
        return self

    def predict(self, X):
        check_is_fitted(self)
        X = check_array(X)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(f"X has {X.shape[1]} features, expected {self.n_features_in_}")
        D = vector_norm(X[:, None, :] - self.X_fit_[None, :, :], self.norm)
        L, y = self.lipschitz_, self.y_fit_
        lo = np.max(y[None, :] - L * D, axis=1)
        hi = np.min(y[None, :] + L * D, axis=1)
        if self.method == "sup":
            return lo
        if self.method == "inf":
            return hi
        return 0.5 * (lo + hi)


class PHMcShaneRegressor(RegressorMixin, BaseEstimator):
    """Positively homogeneous Lipschitz extension of samples ``(X, y)``.

    The samples define a ph function on the cone they generate
    (``f(r x) = r f(x)``); ``predict`` evaluates an extension to all of R^d
    with the same cone Lipschitz constant. Samples on a common ray must be
    consistent with homogeneity.

    Parameters
    ----------
    norm : {"l1", "l2", "linf"}
    method : {"sup", "inf", "mid"}
    """

    def __init__(self, norm="l2", method="sup"):
        self.norm = norm
        self.method = method

    def fit(self, X, y):
        check_norm(self.norm)
        _check_method(self.method)
        X, y = check_X_y(X, y, y_numeric=True)
        r = vector_norm(X, self.norm, axis=1)
        if np.any(r == 0):
            raise ValidationError("samples at the origin carry no direction")
        U = X / r[:, None]
        vals = y / r
        dirs, dvals = [], []
        for u, v in zip(U, vals):
            for k, w in enumerate(dirs):
                if vector_norm(u - w, self.norm) <= DIRECTION_TOL:
                    if abs(v - dvals[k]) > 1e-9 * max(1.0, abs(v)):
                        raise ValidationError("samples on one ray are not positively homogeneous")
                    break
            else:
                dirs.append(u)
                dvals.append(v)
        self.rays_ = RaySystem(np.array(dirs), self.norm)
        self.values_ = np.array(dvals)
        self.lipschitz_ = cone_lip(self.rays_, self.values_)
        self.n_features_in_ = X.shape[1]
        return self

    def _unit_value(self, u, sign):
        W = np.asarray(self.rays_.directions, dtype=float)
        gaps = vector_norm(W - u, self.norm, axis=1)
        k = int(np.argmin(gaps))
        if gaps[k] <= DIRECTION_TOL:
            return self.values_[k]
        return sign * float(np.max(_search.ray_sup(u, W, sign * self.values_, self.lipschitz_, self.norm)))

    def predict(self, X):
        check_is_fitted(self)
        X = check_array(X)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(f"X has {X.shape[1]} features, expected {self.n_features_in_}")
        out = np.zeros(len(X))
        for n, x in enumerate(X):
            r = vector_norm(x, self.norm)
            if r == 0:
                continue
            u = x / r
            if self.method == "sup":
                out[n] = r * self._unit_value(u, 1.0)
            elif self.method == "inf":
                out[n] = r * self._unit_value(u, -1.0)
            else:
                out[n] = 0.5 * r * (self._unit_value(u, 1.0) + self._unit_value(u, -1.0))
        return out
