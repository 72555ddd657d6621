"""Observation matrices and the linearized partial-observation form."""
from __future__ import annotations

import numpy as np

from . import _random
from .core import as_array
from .exceptions import (
    ModeMismatchError,
    NotSquareError,
    PObsOutOfRangeError,
    SkewViolationError,
    StochTransError,
)


def _check_pobs(p_obs):
    if not (0.0 < float(p_obs) <= 1.0):
        raise PObsOutOfRangeError(f"p_obs must lie in (0, 1], got {p_obs}")
    return float(p_obs)


class ObservationMatrix:
    """One binary outcome per pair, possibly with absent pairs.

    Parameters
    ----------
    outcomes : array-like of shape (n, n)
        ``1`` if the row item won, ``0`` if it lost, ``NaN`` if the pair was
        not compared. Diagonal entries are coin flips and carry no signal.
    p_obs : float or None
        ``None`` for full observations, otherwise the pair sampling rate.
    """

    __slots__ = ("outcomes", "p_obs")

    def __init__(self, outcomes, p_obs=None):
        y = np.array(outcomes, dtype=float, copy=True)
        if y.ndim != 2 or y.shape[0] != y.shape[1] or y.shape[0] < 2:
            raise NotSquareError(f"expected a square matrix with n >= 2, got {y.shape}")
        off = ~np.eye(y.shape[0], dtype=bool)
        absent = np.isnan(y)
        if np.any(absent != absent.T):
            raise StochTransError("absent entries must be symmetric")
        present = ~absent & off
        vals = y[present]
        if np.any((vals != 0) & (vals != 1)):
            raise StochTransError("outcomes must be 0, 1 or absent")
        bad = present & (y + y.T != 1)
        if bad.any():
            i, j = np.argwhere(np.tril(bad, -1))[0]
            raise SkewViolationError(int(i), int(j), y[i, j], y[j, i])
        if p_obs is None and np.any(absent & off):
            raise ModeMismatchError("full observations cannot contain absent pairs")
        if p_obs is not None:
            p_obs = _check_pobs(p_obs)
        y.setflags(write=False)
        self.outcomes = y
        self.p_obs = p_obs

    @property
    def n(self):
        return self.outcomes.shape[0]

    @property
    def mode(self):
        return "full" if self.p_obs is None else "partial"

    @property
    def observed(self):
        """Boolean mask of compared off-diagonal pairs."""
        m = ~np.isnan(self.outcomes)
        np.fill_diagonal(m, False)
        return m

    def n_observed_pairs(self):
        return int(np.count_nonzero(np.triu(self.observed, 1)))

    def filled(self, value=0.5):
        """Outcomes with absent entries replaced by ``value``."""
        return np.where(np.isnan(self.outcomes), value, self.outcomes)

    def __array__(self, dtype=None, copy=None):
        return self.outcomes if dtype is None else self.outcomes.astype(dtype)

    def __repr__(self):
        return f"ObservationMatrix(n={self.n}, mode={self.mode!r})"


class LinearizedObservation:
    """Rescaled outcomes whose expectation is the true matrix."""

    __slots__ = ("values", "p_obs")

    def __init__(self, values, p_obs):
        v = np.array(values, dtype=float, copy=True)
        v.setflags(write=False)
        self.values = v
        self.p_obs = _check_pobs(p_obs)

    @property
    def n(self):
        return self.values.shape[0]

    def __array__(self, dtype=None, copy=None):
        return self.values if dtype is None else self.values.astype(dtype)

    def __repr__(self):
        return f"LinearizedObservation(n={self.n}, p_obs={self.p_obs})"


def _outcomes(M, seed):
    a = as_array(M)
    n = a.shape[0]
    iu = np.triu_indices(n, 1)
    u = _random.stream(seed, _random.OUTCOMES).random(iu[0].size)
    win = (u < a[iu]).astype(float)
    y = np.empty((n, n))
    y[iu] = win
    y[iu[1], iu[0]] = 1.0 - win
    y[np.diag_indices(n)] = _random.stream(seed, _random.DIAGONAL).integers(0, 2, n)
    return y, iu


def sample_full(M, seed):
    """Draw one Bernoulli(``M[i, j]``) outcome for every pair ``i < j``."""
    y, _ = _outcomes(M, seed)
    return ObservationMatrix(y)


def sample_partial(M, p_obs, seed):
    """Compare each pair independently with probability ``p_obs``.

    Presence and outcomes use separate random streams, so a pair present
    under two sampling rates receives the same outcome under both.
    """
    p_obs = _check_pobs(p_obs)
    y, iu = _outcomes(M, seed)
    keep = _random.stream(seed, _random.PRESENCE).random(iu[0].size) < p_obs
    y[iu[0][~keep], iu[1][~keep]] = np.nan
    y[iu[1][~keep], iu[0][~keep]] = np.nan
    return ObservationMatrix(y, p_obs)


def linearize_partial(Y):
    """Map partial outcomes to ``Y' = Y/p - (1-p)/(2p)`` with absent set to 1/2."""
    if not isinstance(Y, ObservationMatrix) or Y.mode != "partial":
        raise ModeMismatchError("linearize_partial expects partial observations")
    p = Y.p_obs
    return LinearizedObservation(Y.filled(0.5) / p - (1.0 - p) / (2.0 * p), p)


def write_observation_csv(path, Y):
    y = np.asarray(Y.outcomes if isinstance(Y, ObservationMatrix) else Y, dtype=float)
    with open(path, "w") as fh:
        for row in y:
            fh.write(",".join("" if np.isnan(v) else f"{v:.17g}" for v in row) + "\n")


def read_observation_csv(path, p_obs=None):
    """Load outcomes; empty fields are absent pairs.

    Files with absent pairs need ``p_obs``; when it is omitted the observed
    fraction of pairs is used.
    """
    y = np.genfromtxt(path, delimiter=",", dtype=float, ndmin=2)
    off = ~np.eye(y.shape[0], dtype=bool)
    if p_obs is None and np.isnan(y[off]).any():
        p_obs = float(np.mean(~np.isnan(y[off])))
    return ObservationMatrix(y, p_obs)
