"""Error metrics for matrix and ranking estimates."""
import numpy as np

from .core import as_array, frobenius_distance_sq, permute
from .exceptions import EpsOutOfRangeError, SizeMismatchError


def _pair(A, B):
    a, b = as_array(A), as_array(B)
    if a.shape != b.shape:
        raise SizeMismatchError(f"shapes {a.shape} and {b.shape} differ")
    return a, b


def normalized_mse(A, B):
    """Squared Frobenius distance over ``n**2``, diagonal excluded."""
    a, b = _pair(A, B)
    d = (a - b) ** 2
    np.fill_diagonal(d, 0.0)
    return float(d.sum() / a.shape[0] ** 2)


def kl_divergence(A, B, eps=0.05):
    """Sum of Bernoulli KL divergences over off-diagonal pairs.

    Both matrices are first clipped entrywise to ``[eps, 1 - eps]``.

    Parameters
    ----------
    A, B : array-like of shape (n, n)
    eps : float, default=0.05
        Clip level in ``(0, 1/2]``.
    """
    if not 0.0 < eps <= 0.5:
        raise EpsOutOfRangeError(f"eps must lie in (0, 1/2], got {eps}")
    a, b = _pair(A, B)
    a = np.clip(a, eps, 1 - eps)
    b = np.clip(b, eps, 1 - eps)
    k = a * np.log(a / b) + (1 - a) * np.log((1 - a) / (1 - b))
    np.fill_diagonal(k, 0.0)
    return float(max(k.sum(), 0.0))


def spearman_footrule(pi):
    """Total displacement ``sum |pi(i) - i|`` from the identity."""
    return int(np.abs(pi.ranks - np.arange(pi.n)).sum())


def kemeny(pi):
    """Number of item pairs ordered differently from the identity."""
    r = pi.ranks
    return int(np.count_nonzero(np.triu(r[:, None] > r[None, :], 1)))


def reweighted_footrule(M, pi):
    """``||pi(M) - M||_F**2``: row displacement weighted by row differences."""
    return frobenius_distance_sq(permute(as_array(M), pi), as_array(M))
