"""Least-squares estimation over SST matrices.

The workhorse is :func:`bivariate_isotonic_project`, the Frobenius projection
onto matrices faithful to a fixed order. Combined with an order estimate it
gives the two-stage estimator; looping over all orders gives the exact
least-squares estimate for small ``n``.
"""
from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.optimize import isotonic_regression
from sklearn.base import BaseEstimator
from sklearn.exceptions import ConvergenceWarning

from . import _random
from .core import Permutation, ProbabilityMatrix, permute
from .exceptions import ModeMismatchError, NTooLargeForBruteForceError, StochTransError
from ._validation import MatrixEstimatorMixin, check_comparisons, linear_values

BRUTE_FORCE_MAX_N = 8
EXHAUSTIVE_FAS_MAX_N = 10


@dataclass(frozen=True)
class IsotonicConfig:
    tol: float = 1e-8
    max_iters: int = 20000

    def __post_init__(self):
        if not self.tol > 0:
            raise StochTransError("tol must be positive")
        if self.max_iters < 1:
            raise StochTransError("max_iters must be at least 1")


@dataclass(frozen=True)
class FasConfig:
    """Order-estimation strategy: ``exhaustive``, ``rowsum`` or ``local``."""

    strategy: str = "local"
    restarts: int = 4
    seed: int = 0

    def __post_init__(self):
        if self.strategy not in ("exhaustive", "rowsum", "local"):
            raise StochTransError(f"unknown FAS strategy {self.strategy!r}")
        if self.restarts < 0:
            raise StochTransError("restarts must be nonnegative")


@dataclass(frozen=True)
class ProjectionInfo:
    n_iter: int
    converged: bool


def _rows_iso(X, n):
    out = np.zeros_like(X)
    for i in range(n - 1):
        out[i, i + 1 :] = isotonic_regression(X[i, i + 1 :], increasing=True).x
    return out


def _cols_iso(X, n):
    out = np.zeros_like(X)
    for j in range(1, n):
        out[:j, j] = isotonic_regression(X[:j, j], increasing=False).x
    return out


def _project_identity(Y, cfg):
    """Projection onto identity-faithful matrices.

    With the skew constraint the objective reduces to the strict upper
    triangle, target ``Z = (Y + 1 - Y.T) / 2``. Dykstra's scheme alternates
    row-wise increasing and column-wise decreasing isotonic fits; clipping
    the limit to ``[1/2, 1]`` then gives the bounded projection.
    """
    n = Y.shape[0]
    iu = np.triu_indices(n, 1)
    Z = np.zeros((n, n))
    Z[iu] = (Y[iu] + 1.0 - Y.T[iu]) / 2.0
    x = Z.copy()
    p = np.zeros_like(x)
    q = np.zeros_like(x)
    converged = False
    it = 0
    for it in range(1, cfg.max_iters + 1):
        y = _rows_iso(x + p, n)
        p = x + p - y
        xn = _cols_iso(y + q, n)
        q = y + q - xn
        change = np.linalg.norm(xn - x)
        x = xn
        if change < cfg.tol and np.linalg.norm(y - xn) < cfg.tol:
            converged = True
            break
    U = np.clip(x[iu], 0.5, 1.0)
    M = np.full((n, n), 0.5)
    M[iu] = U
    M[iu[1], iu[0]] = 1.0 - U
    return M, ProjectionInfo(it, converged)


def bivariate_isotonic_project(Y, pi=None, cfg=IsotonicConfig(), return_info=False):
    """Frobenius projection of ``Y`` onto matrices faithful to ``pi``.

    Parameters
    ----------
    Y : array-like of shape (n, n)
    pi : Permutation, optional
        Target order; the identity when omitted.
    cfg : IsotonicConfig
    return_info : bool, default=False
        Also return a :class:`ProjectionInfo`.

    Returns
    -------
    ProbabilityMatrix, optionally with ProjectionInfo
        On hitting ``max_iters`` a ``ConvergenceWarning`` is emitted and the
        last iterate is returned.
    """
    a, _, _ = check_comparisons(Y)
    if np.isnan(a).any():
        raise StochTransError("projection input must not contain absent entries")
    n = a.shape[0]
    if pi is None:
        pi = Permutation.identity(n)
    B, info = _project_identity(permute(a, pi), cfg)
    if not info.converged:
        warnings.warn(
            f"isotonic projection stopped after {info.n_iter} iterations", ConvergenceWarning, stacklevel=2
        )
    M = ProbabilityMatrix(permute(B, pi.inverse()))
    return (M, info) if return_info else M


def lse_sst_bruteforce(Y, cfg=IsotonicConfig(), p_obs=None):
    """Exact least squares over all SST matrices by enumerating orders.

    Ties in the objective (within ``1e-9``) go to the lexicographically
    smallest rank vector.

    Returns
    -------
    (ProbabilityMatrix, Permutation)
    """
    a, _ = linear_values(Y, p_obs)
    n = a.shape[0]
    if n > BRUTE_FORCE_MAX_N:
        raise NTooLargeForBruteForceError(f"brute force is limited to n <= {BRUTE_FORCE_MAX_N}, got {n}")
    best = (np.inf, None, None)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ConvergenceWarning)
        for ranks in itertools.permutations(range(1, n + 1)):
            pi = Permutation(ranks)
            M = bivariate_isotonic_project(a, pi, cfg)
            err = float(np.sum((a - M.entries) ** 2))
            if err < best[0] - 1e-9:
                best = (err, M, pi)
    return best[1], best[2]


def _win_weights(Y):
    a, p, lin = check_comparisons(Y)
    if lin or p is not None:
        raise ModeMismatchError("order estimation needs full observations")
    W = a.copy()
    np.fill_diagonal(W, 0.0)
    return W


def count_disagreements(Y, pi):
    """Number of pairs whose outcome contradicts the order ``pi``.

    Real-valued inputs count ``Y[j, i]`` for each ``i`` ranked above ``j``.
    """
    W = _win_weights(Y)
    r = pi.ranks
    above = r[:, None] < r[None, :]
    return float(np.sum(W.T[above]))


def _order_cost(W, order):
    pos = np.empty(len(order), dtype=np.int64)
    pos[order] = np.arange(len(order))
    return float(np.sum(W.T[pos[:, None] < pos[None, :]]))


def _fas_exhaustive(W):
    n = W.shape[0]
    if n > EXHAUSTIVE_FAS_MAX_N:
        raise NTooLargeForBruteForceError(f"exhaustive search is limited to n <= {EXHAUSTIVE_FAS_MAX_N}, got {n}")
    full = (1 << n) - 1
    masks = np.arange(1 << n)
    member = ((masks[:, None] >> np.arange(n)) & 1).astype(float)
    # cost of putting v on top of the set S: sum over u in S of W[u, v]
    top_cost = member @ W
    f = np.zeros(1 << n)
    bits = [m.bit_count() if hasattr(m, "bit_count") else bin(m).count("1") for m in range(1 << n)]
    for S in sorted(range(1, 1 << n), key=bits.__getitem__):
        best = np.inf
        for v in range(n):
            if S >> v & 1:
                rest = S & ~(1 << v)
                c = top_cost[rest, v] + f[rest]
                if c < best:
                    best = c
        f[S] = best
    order, S = [], full
    while S:
        for v in range(n):
            if S >> v & 1:
                rest = S & ~(1 << v)
                if top_cost[rest, v] + f[rest] <= f[S] + 1e-12:
                    order.append(v)
                    S = rest
                    break
    return np.array(order)


def _fas_rowsum(W):
    n = W.shape[0]
    return np.lexsort((np.arange(n), -W.sum(axis=1)))


def _local_search(W, order):
    order = list(order)
    n = len(order)
    improved = True
    while improved:
        improved = False
        for v in range(n):
            cur = order.index(v)
            rest = order[:cur] + order[cur + 1 :]
            a = np.concatenate(([0.0], np.cumsum(W[v, rest])))
            b = np.concatenate(([0.0], np.cumsum(W[rest, v])))
            cost = a + (b[-1] - b)
            p = int(np.argmin(cost))
            if cost[p] < cost[cur] - 1e-12:
                rest.insert(p, v)
                order = rest
                improved = True
    return np.array(order)


def fas_permutation(Y, cfg=FasConfig()):
    """Estimate the order by minimising disagreeing pairs.

    ``exhaustive`` is exact (dynamic programming over subsets, ``n <= 10``).
    ``rowsum`` sorts by number of wins, ties by index. ``local`` runs
    single-item relocation from the row-sum order and from ``restarts``
    shuffled orders and keeps the best.
    """
    W = _win_weights(Y)
    if cfg.strategy == "exhaustive":
        return Permutation.from_order(_fas_exhaustive(W))
    start = _fas_rowsum(W)
    if cfg.strategy == "rowsum":
        return Permutation.from_order(start)
    best = _local_search(W, start)
    best_cost = _order_cost(W, best)
    rng = _random.stream(cfg.seed, _random.RESTARTS)
    for _ in range(cfg.restarts):
        cand = _local_search(W, rng.permutation(W.shape[0]))
        c = _order_cost(W, cand)
        if c < best_cost - 1e-12:
            best, best_cost = cand, c
    return Permutation.from_order(best)


def two_stage_estimate(Y, fas=FasConfig(), iso=IsotonicConfig(), return_permutation=False):
    """Estimate the order, then project onto matrices faithful to it."""
    pi = fas_permutation(Y, fas)
    a, _ = linear_values(Y)
    M = bivariate_isotonic_project(a, pi, iso)
    return (M, pi) if return_permutation else M


class _IsoParams:
    def _iso(self):
        return IsotonicConfig(self.tol, self.max_iters)


class BivariateIsotonicRegression(_IsoParams, MatrixEstimatorMixin, BaseEstimator):
    """Projection onto comparison matrices faithful to a given order.

    Parameters
    ----------
    permutation : Permutation or sequence of int, optional
        1-based ranks; identity when omitted.
    tol : float, default=1e-8
    max_iters : int, default=20000
    """

    def __init__(self, permutation=None, tol=1e-8, max_iters=20000):
        self.permutation = permutation
        self.tol = tol
        self.max_iters = max_iters

    def fit(self, X, y=None):
        a, _ = linear_values(X)
        pi = self.permutation
        if pi is not None and not isinstance(pi, Permutation):
            pi = Permutation(pi)
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always", ConvergenceWarning)
            M, info = bivariate_isotonic_project(a, pi, self._iso(), return_info=True)
        for w in caught:
            warnings.warn(w.message, w.category, stacklevel=2)
        self.matrix_ = np.array(M)
        self.permutation_ = pi or Permutation.identity(a.shape[0])
        self.n_iter_ = info.n_iter
        self.converged_ = info.converged
        return self


class LeastSquaresSST(_IsoParams, MatrixEstimatorMixin, BaseEstimator):
    """Exact least-squares SST estimate by enumerating all orders (``n <= 8``)."""

    def __init__(self, tol=1e-8, max_iters=20000, p_obs=None):
        self.tol = tol
        self.max_iters = max_iters
        self.p_obs = p_obs

    def fit(self, X, y=None):
        M, pi = lse_sst_bruteforce(X, self._iso(), self.p_obs)
        self.matrix_ = np.array(M)
        self.permutation_ = pi
        return self


class TwoStageSST(_IsoParams, MatrixEstimatorMixin, BaseEstimator):
    """Order estimate by feedback arc set, then isotonic projection.

    Parameters
    ----------
    fas : {"exhaustive", "rowsum", "local"}, default="local"
    restarts : int, default=4
        Extra shuffled starts for ``local``.
    tol, max_iters
        Projection settings.
    random_state : int, default=0
        Seed for the shuffled starts.
    """

    def __init__(self, fas="local", restarts=4, tol=1e-8, max_iters=20000, random_state=0):
        self.fas = fas
        self.restarts = restarts
        self.tol = tol
        self.max_iters = max_iters
        self.random_state = random_state

    def fit(self, X, y=None):
        cfg = FasConfig(self.fas, self.restarts, self.random_state)
        pi = fas_permutation(X, cfg)
        a, _ = linear_values(X)
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always", ConvergenceWarning)
            M, info = bivariate_isotonic_project(a, pi, self._iso(), return_info=True)
        for w in caught:
            warnings.warn(w.message, w.category, stacklevel=2)
        self.matrix_ = np.array(M)
        self.permutation_ = pi
        self.n_iter_ = info.n_iter
        self.converged_ = info.converged
        return self
