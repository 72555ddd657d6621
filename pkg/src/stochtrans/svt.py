"""Singular value thresholding estimators and spectral checks."""
from __future__ import annotations

from typing import NamedTuple

import numpy as np
from sklearn.base import BaseEstimator

from .core import ProbabilityMatrix, as_array, skew_project
from .exceptions import NTooSmallError, SOutOfRangeError, StochTransError
from .generators import gen_noiseless
from .observation import sample_full
from ._validation import MatrixEstimatorMixin, linear_values


def soft_threshold_singulars(d, lam):
    """Shrink singular values: ``max(0, d - lam)``."""
    return np.maximum(np.asarray(d, dtype=float) - lam, 0.0)


def hard_threshold_singulars(d, lam):
    """Keep singular values at least ``lam``, zero the rest."""
    d = np.asarray(d, dtype=float)
    return np.where(d >= lam, d, 0.0)


def auto_lambda(n, p_obs=None):
    """Default threshold: ``2.1 sqrt(n)`` for full data, ``3 sqrt(n/p)`` otherwise."""
    if p_obs is None:
        return 2.1 * np.sqrt(n)
    return 3.0 * np.sqrt(n / p_obs)


def project_to_box(X):
    """Restore ``X + X.T = 1`` by averaging, then clip entries to [0, 1]."""
    M = np.clip(skew_project(X), 0.0, 1.0)
    np.fill_diagonal(M, 0.5)
    return M


class SvtResult(NamedTuple):
    raw: np.ndarray
    clipped: ProbabilityMatrix
    lam: float
    singular_values: np.ndarray
    rank: int


def svt_estimate(Y, mode="soft", lam="auto", p_obs=None):
    """Threshold the singular values of an observation matrix.

    Parameters
    ----------
    Y : ObservationMatrix, LinearizedObservation or array-like of shape (n, n)
        Partial observations are linearized before the SVD. The diagonal is
        set to 1/2.
    mode : {"soft", "hard"}, default="soft"
    lam : float or "auto", default="auto"
    p_obs : float, optional
        Sampling rate for plain arrays with absent (``NaN``) pairs.

    Returns
    -------
    SvtResult
        ``raw`` is the reconstruction before any projection, ``clipped`` the
        box-projected matrix.
    """
    X, p = linear_values(Y, p_obs)
    n = X.shape[0]
    if isinstance(lam, str):
        if lam != "auto":
            raise StochTransError(f"lam must be a number or 'auto', got {lam!r}")
        lam = auto_lambda(n, p)
    lam = float(lam)
    if lam < 0:
        raise StochTransError(f"lam must be nonnegative, got {lam}")
    U, d, Vt = np.linalg.svd(X)
    if mode == "soft":
        t = soft_threshold_singulars(d, lam)
    elif mode == "hard":
        t = hard_threshold_singulars(d, lam)
    else:
        raise StochTransError(f"mode must be 'soft' or 'hard', got {mode!r}")
    raw = (U * t) @ Vt
    return SvtResult(raw, ProbabilityMatrix(project_to_box(raw)), lam, d, int(np.count_nonzero(t)))


class SVTEstimator(MatrixEstimatorMixin, BaseEstimator):
    """Singular value thresholding estimate of a comparison matrix.

    Parameters
    ----------
    mode : {"soft", "hard"}, default="soft"
    lam : float or "auto", default="auto"
        ``auto`` picks ``2.1 sqrt(n)`` for full observations and
        ``3 sqrt(n / p_obs)`` for partial ones.
    clip_to_box : bool, default=True
        Project the reconstruction onto valid comparison matrices.
    p_obs : float, optional
        Sampling rate for plain-array input with absent pairs.

    Attributes
    ----------
    matrix_ : ndarray of shape (n, n)
    raw_matrix_ : ndarray of shape (n, n)
    lambda_ : float
    singular_values_ : ndarray of shape (n,)
    rank_ : int
    """

    def __init__(self, mode="soft", lam="auto", clip_to_box=True, p_obs=None):
        self.mode = mode
        self.lam = lam
        self.clip_to_box = clip_to_box
        self.p_obs = p_obs

    def fit(self, X, y=None):
        res = svt_estimate(X, self.mode, self.lam, self.p_obs)
        self.raw_matrix_ = res.raw
        self.matrix_ = np.array(res.clipped) if self.clip_to_box else res.raw
        self.lambda_ = res.lam
        self.singular_values_ = res.singular_values
        self.rank_ = res.rank
        self.n_items_ = res.raw.shape[0]
        return self


def rank_s_tail_bound_check(M, s, tol=1e-12):
    """Check ``sum_{j > s} sigma_j(M)**2 / n**2 <= 1/s``.

    Holds for every SST matrix; used as a test oracle.
    """
    a = as_array(M)
    n = a.shape[0]
    if not 1 <= s <= n - 1:
        raise SOutOfRangeError(f"s must lie in [1, {n - 1}], got {s}")
    sig = np.linalg.svd(a, compute_uv=False)
    return bool(np.sum(sig[s:] ** 2) / n**2 <= 1.0 / s + tol)


def tail_bound_all(M, tol=1e-12):
    """Vectorised :func:`rank_s_tail_bound_check` over every ``s``."""
    a = as_array(M)
    n = a.shape[0]
    sig2 = np.linalg.svd(a, compute_uv=False) ** 2
    tails = np.cumsum(sig2[::-1])[::-1]  # tails[s] = sum_{j >= s} (0-based)
    s = np.arange(1, n)
    return tails[s] / n**2 <= 1.0 / s + tol


def noiseless_spectrum_bounds(n):
    """Indices and bounds of the noiseless-observation spectrum sandwich.

    Returns ``(i, pos, lower, upper)`` where ``pos`` is the 0-based position
    in the descending singular values, i.e. the ``(i + 2)``-th largest value.
    ``upper`` is ``inf`` for ``i = 1``.
    """
    i = np.arange(1, int(np.floor(n / 6 - 1)) + 1)
    lower = n / (4 * np.pi * (i + 1)) - 0.5
    with np.errstate(divide="ignore"):
        upper = np.where(i >= 2, n / (np.pi * np.maximum(i - 1, 1)) + 0.5, np.inf)
    return i, i + 1, lower, upper


def noiseless_spectrum_check(n, seed=0, return_margins=False):
    """Sample noiseless observations with a random diagonal and test the sandwich.

    The ``(i + 2)``-th largest singular value must lie within
    ``[n / (4 pi (i+1)) - 1/2, n / (pi (i-1)) + 1/2]`` for
    ``1 <= i <= n/6 - 1``, the upper side only for ``i >= 2``.
    """
    if n < 18:
        raise NTooSmallError(f"need n >= 18, got {n}")
    Y = sample_full(gen_noiseless(n), seed).outcomes
    sig = np.linalg.svd(Y, compute_uv=False)
    i, pos, lo, hi = noiseless_spectrum_bounds(n)
    s = sig[pos]
    ok = bool(np.all(s >= lo) and np.all(s <= hi))
    if return_margins:
        return ok, float(np.min(np.concatenate([s - lo, hi - s])))
    return ok
