"""Maximum-likelihood fits of Thurstone and BTL models."""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq
from sklearn.base import BaseEstimator
from sklearn.exceptions import ConvergenceWarning

from .core import WeightVector
from .exceptions import NoObservationsError, StochTransError
from .generators import induced_matrix
from .links import get_link
from ._validation import MatrixEstimatorMixin, check_comparisons


@dataclass(frozen=True)
class MleConfig:
    cdf: str = "gaussian"
    grad_tol: float = 1e-7
    max_iters: int = 5000
    step: float = 1.0

    def __post_init__(self):
        get_link(self.cdf)
        if not (self.grad_tol > 0 and self.step > 0 and self.max_iters >= 1):
            raise StochTransError("grad_tol, step and max_iters must be positive")


@dataclass
class MleInfo:
    n_iter: int
    converged: bool
    objective: float
    trace: list = field(default_factory=list, repr=False)


def observed_pairs(Y):
    """Return ``(I, J, y)`` for the compared pairs ``I < J``."""
    a, _, lin = check_comparisons(Y)
    if lin:
        raise StochTransError("the likelihood needs raw outcomes, not linearized values")
    I, J = np.triu_indices(a.shape[0], 1)
    y = a[I, J]
    keep = ~np.isnan(y)
    if not keep.any():
        raise NoObservationsError("no compared pairs")
    return I[keep], J[keep], y[keep], a.shape[0]


def negative_log_likelihood(w, I, J, y, cdf="gaussian"):
    """Objective value and gradient with respect to ``w``."""
    link = get_link(cdf)
    w = np.asarray(w, dtype=float)
    d = w[I] - w[J]
    f = -float(np.sum(y * link.logcdf(d) + (1.0 - y) * link.logcdf(-d)))
    g = -(y * link.hazard(d) - (1.0 - y) * link.hazard(-d))
    n = w.size
    grad = np.bincount(I, g, n) - np.bincount(J, g, n)
    return f, grad


def project_weights(v):
    """Euclidean projection onto ``{w : sum(w) = 0, max|w| <= 1}``.

    The projection has the form ``clip(v - tau, -1, 1)``; ``tau`` is the
    root of the monotone sum, found by bracketing.
    """
    v = np.asarray(v, dtype=float)

    def excess(tau):
        return np.clip(v - tau, -1.0, 1.0).sum()

    lo, hi = v.min() - 1.0, v.max() + 1.0
    tau = brentq(excess, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps)
    w = np.clip(v - tau, -1.0, 1.0)
    free = np.abs(w) < 1.0
    if free.any():
        w[free] -= w.sum() / free.sum()
    return w


def mle_fit(Y, cfg=MleConfig(), w0=None, return_info=False):
    """Maximum-likelihood weights over the centred unit box.

    Projected gradient descent. Trial steps follow the Barzilai-Borwein
    rule (the first is ``cfg.step``) and are halved until the usual
    sufficient-decrease condition holds, so the objective does not increase
    beyond floating-point rounding.

    Parameters
    ----------
    Y : ObservationMatrix or array-like of shape (n, n)
        Outcomes; ``NaN`` marks pairs that were not compared.
    cfg : MleConfig
    w0 : array-like, optional
        Starting point, projected onto the feasible set. Defaults to zero.
    return_info : bool, default=False

    Returns
    -------
    WeightVector, optionally with MleInfo
    """
    I, J, y, n = observed_pairs(Y)
    w = project_weights(np.zeros(n) if w0 is None else w0)
    f, G = negative_log_likelihood(w, I, J, y, cfg.cdf)
    step = cfg.step
    trace = [f]
    converged = False
    # objective changes below this are rounding noise; without the slack the
    # line search collapses the step near the optimum
    slack = 16 * np.finfo(float).eps * max(1.0, abs(f))
    it = 0
    for it in range(1, cfg.max_iters + 1):
        while True:
            wn = project_weights(w - step * G)
            fn, Gn = negative_log_likelihood(wn, I, J, y, cfg.cdf)
            dw = wn - w
            if fn <= f + G @ dw + (dw @ dw) / (2 * step) + slack or step < 1e-16:
                break
            step /= 2
        if fn > f + slack:
            # numerically stalled line search; keep the better point
            break
        gap = np.linalg.norm(dw) / step
        dg = Gn - G
        w, f, G = wn, fn, Gn
        trace.append(f)
        if gap < cfg.grad_tol:
            converged = True
            break
        sy = dw @ dg
        step = (dw @ dw) / sy if sy > 0 else cfg.step
    if not converged:
        warnings.warn(f"MLE did not converge in {it} iterations", ConvergenceWarning, stacklevel=2)
    wv = WeightVector(w, tol=1e-8)
    info = MleInfo(it, bool(converged), f, trace)
    return (wv, info) if return_info else wv


def induce_matrix(w, cdf="gaussian"):
    """Comparison matrix ``M[i, j] = F(w[i] - w[j])``."""
    return induced_matrix(np.asarray(w, dtype=float), cdf)


def mle_matrix_estimate(Y, cfg=MleConfig()):
    return induce_matrix(mle_fit(Y, cfg), cfg.cdf)


def lipschitz_zeta(cdf="gaussian"):
    """``max F'(z)`` over ``|z| <= 2``; both links peak at zero."""
    return float(get_link(cdf).pdf(0.0))


class ParametricMLE(MatrixEstimatorMixin, BaseEstimator):
    """Thurstone or BTL maximum-likelihood estimate.

    Parameters
    ----------
    cdf : {"gaussian", "logistic"}, default="gaussian"
    grad_tol : float, default=1e-7
    max_iters : int, default=5000
    step : float, default=1.0

    Attributes
    ----------
    weights_ : ndarray of shape (n,)
    matrix_ : ndarray of shape (n, n)
    n_iter_ : int
    converged_ : bool
    objective_ : float
    """

    def __init__(self, cdf="gaussian", grad_tol=1e-7, max_iters=5000, step=1.0):
        self.cdf = cdf
        self.grad_tol = grad_tol
        self.max_iters = max_iters
        self.step = step

    def fit(self, X, y=None):
        cfg = MleConfig(self.cdf, self.grad_tol, self.max_iters, self.step)
        w, info = mle_fit(X, cfg, return_info=True)
        self.weights_ = np.array(w.w)
        self.matrix_ = np.array(induce_matrix(w.w, self.cdf))
        self.n_iter_ = info.n_iter
        self.converged_ = info.converged
        self.objective_ = info.objective
        return self
