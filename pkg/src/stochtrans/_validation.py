"""Input normalisation shared by the estimators."""
import numpy as np
from sklearn.base import TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .core import ProbabilityMatrix
from .exceptions import NotSquareError
from .observation import LinearizedObservation, ObservationMatrix


def check_comparisons(X, p_obs=None):
    """Return ``(values, p_obs, linearized)`` for any supported input.

    ``values`` is a fresh float array in which ``NaN`` marks absent pairs.
    Plain arrays containing absent off-diagonal pairs get ``p_obs`` from the
    observed fraction when it is not supplied.
    """
    if isinstance(X, LinearizedObservation):
        return np.array(X.values), X.p_obs, True
    if isinstance(X, ObservationMatrix):
        return np.array(X.outcomes), X.p_obs if p_obs is None else p_obs, False
    if isinstance(X, ProbabilityMatrix):
        X = X.entries
    a = check_array(
        X, dtype=float, ensure_all_finite="allow-nan", ensure_min_samples=2, ensure_min_features=2, copy=True
    )
    if a.shape[0] != a.shape[1]:
        raise NotSquareError(f"expected a square matrix, got shape {a.shape}")
    off = ~np.eye(a.shape[0], dtype=bool)
    if p_obs is None and np.isnan(a[off]).any():
        p_obs = float(np.mean(~np.isnan(a[off])))
    return a, p_obs, False


def linear_values(X, p_obs=None):
    """Real matrix with expectation ``M`` off the diagonal and ``1/2`` on it."""
    a, p, lin = check_comparisons(X, p_obs)
    if not lin and p is not None:
        a = np.where(np.isnan(a), 0.5, a) / p - (1.0 - p) / (2.0 * p)
    np.fill_diagonal(a, 0.5)
    return a, p


class MatrixEstimatorMixin(TransformerMixin, auto_wrap_output_keys=None):
    """``transform``, ``predict_proba`` and ``predict`` on a fitted ``matrix_``.

    ``transform(X)`` re-estimates on new observations; with no argument it
    returns the fitted estimate.
    """

    def transform(self, X=None):
        check_is_fitted(self, "matrix_")
        if X is None:
            return np.array(self.matrix_)
        from sklearn.base import clone

        return clone(self).fit(X).matrix_.copy()

    def fit_transform(self, X, y=None, **fit_params):
        return self.fit(X, y, **fit_params).matrix_.copy()

    def predict_proba(self, pairs):
        """Estimated probability that ``pairs[:, 0]`` beats ``pairs[:, 1]``."""
        check_is_fitted(self, "matrix_")
        p = np.asarray(pairs, dtype=np.int64).reshape(-1, 2)
        return self.matrix_[p[:, 0], p[:, 1]]

    def predict(self, pairs):
        return (self.predict_proba(pairs) > 0.5).astype(int)
