"""Core matrix, permutation and weight types.

Conventions
-----------
A pairwise comparison matrix ``M`` holds ``M[i, j]``, the probability that
item ``i`` beats item ``j``. Valid matrices satisfy ``M[j, i] = 1 - M[i, j]``
and have ``0.5`` on the diagonal.

A :class:`Permutation` stores the *rank* of every item: ``mapping[i]`` is the
1-based position of item ``i``, rank 1 being the most preferred. Internally
ranks are kept 0-based in :attr:`Permutation.ranks`.
"""
from __future__ import annotations

import numpy as np

from .exceptions import (
    DiagonalNotHalfError,
    EntryOutOfRangeError,
    InvalidPermutationError,
    InvalidWeightVectorError,
    NotSquareError,
    SizeMismatchError,
    SkewViolationError,
)

SKEW_TOL = 1e-9
LOOSE_TOL = 1e-6


def _frozen(a):
    a = np.array(a, dtype=float, copy=True)
    a.setflags(write=False)
    return a


def as_array(M):
    """Return the dense float array behind a matrix-like object."""
    if isinstance(M, ProbabilityMatrix):
        return M.entries
    if hasattr(M, "values") and isinstance(getattr(M, "values"), np.ndarray):
        return M.values
    return np.asarray(M, dtype=float)


class ProbabilityMatrix:
    """Validated, immutable n x n matrix of pairwise win probabilities.

    Construct through :func:`validate_probability_matrix`; the constructor
    itself trusts its input.
    """

    __slots__ = ("entries",)

    def __init__(self, entries):
        self.entries = _frozen(entries)

    @property
    def n(self):
        return self.entries.shape[0]

    def __array__(self, dtype=None, copy=None):
        if dtype is None:
            return self.entries.copy() if copy else self.entries
        return self.entries.astype(dtype)

    def __getitem__(self, idx):
        return self.entries[idx]

    def __eq__(self, other):
        if not isinstance(other, ProbabilityMatrix):
            return NotImplemented
        return self.entries.shape == other.entries.shape and np.array_equal(
            self.entries, other.entries
        )

    def __hash__(self):
        return hash(self.entries.tobytes())

    def __repr__(self):
        return f"ProbabilityMatrix(n={self.n})"


def _check_square(a, min_n=2):
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise NotSquareError(f"expected a square matrix, got shape {a.shape}")
    if a.shape[0] < min_n:
        raise NotSquareError(f"expected n >= {min_n}, got n = {a.shape[0]}")


def validate_probability_matrix(M, tol=SKEW_TOL):
    """Check the invariants of a pairwise comparison matrix.

    Parameters
    ----------
    M : array-like of shape (n, n)
        Candidate matrix with ``n >= 2``.
    tol : float, default=1e-9
        Tolerance for the skew-complement and diagonal checks.

    Returns
    -------
    ProbabilityMatrix

    Raises
    ------
    NotSquareError, EntryOutOfRangeError, DiagonalNotHalfError,
    SkewViolationError
        On the first violated invariant, scanning in row-major order.
    """
    if isinstance(M, ProbabilityMatrix):
        return M
    a = np.asarray(M, dtype=float)
    _check_square(a)
    bad = ~((a >= -tol) & (a <= 1 + tol))
    if bad.any():
        i, j = np.argwhere(bad)[0]
        raise EntryOutOfRangeError(int(i), int(j), float(a[i, j]))
    d = np.abs(np.diag(a) - 0.5) > tol
    if d.any():
        i = int(np.flatnonzero(d)[0])
        raise DiagonalNotHalfError(i, float(a[i, i]))
    skew = np.abs(a + a.T - 1.0) > tol
    if skew.any():
        # report the later entry of the first broken pair in row-major order
        i, j = np.argwhere(np.tril(skew, -1))[0]
        raise SkewViolationError(int(i), int(j), float(a[i, j]), float(a[j, i]))
    return ProbabilityMatrix(np.clip(a, 0.0, 1.0))


def skew_project(a):
    """Frobenius projection onto ``{X : X + X.T = 1}``."""
    a = np.asarray(a, dtype=float)
    return (a + 1.0 - a.T) / 2.0


class Permutation:
    """Total order of ``n`` items stored as ranks.

    Parameters
    ----------
    mapping : sequence of int
        ``mapping[i]`` is the 1-based rank of item ``i``.
    """

    __slots__ = ("ranks",)

    def __init__(self, mapping):
        m = np.asarray(mapping)
        if m.ndim != 1 or m.size == 0:
            raise InvalidPermutationError("mapping must be a nonempty 1-D sequence")
        if not np.issubdtype(m.dtype, np.integer):
            if not np.all(np.equal(np.mod(m, 1), 0)):
                raise InvalidPermutationError("ranks must be integers")
        r = m.astype(np.int64) - 1
        if not np.array_equal(np.sort(r), np.arange(r.size)):
            raise InvalidPermutationError(f"{list(m)} is not a bijection on 1..{r.size}")
        r.setflags(write=False)
        self.ranks = r

    @classmethod
    def identity(cls, n):
        return cls(np.arange(1, n + 1))

    @classmethod
    def from_order(cls, order):
        """Build from a ranking listed best first, using 0-based item indices."""
        order = np.asarray(order, dtype=np.int64)
        ranks = np.empty_like(order)
        ranks[order] = np.arange(order.size)
        return cls(ranks + 1)

    @property
    def n(self):
        return self.ranks.size

    @property
    def mapping(self):
        return self.ranks + 1

    @property
    def order(self):
        """Item indices sorted from most to least preferred."""
        return np.argsort(self.ranks, kind="stable")

    def inverse(self):
        return Permutation.from_order(self.ranks)

    def compose(self, other):
        """Permutation applying ``other`` first, then ``self``."""
        if other.n != self.n:
            raise SizeMismatchError("permutations differ in size")
        return Permutation(self.ranks[other.ranks] + 1)

    def __eq__(self, other):
        if not isinstance(other, Permutation):
            return NotImplemented
        return np.array_equal(self.ranks, other.ranks)

    def __hash__(self):
        return hash(self.ranks.tobytes())

    def __len__(self):
        return self.n

    def __repr__(self):
        return f"Permutation({self.mapping.tolist()})"


def transposition(n, a, b):
    """Permutation swapping the ranks of items ``a`` and ``b`` (1-based)."""
    m = np.arange(1, n + 1)
    m[[a - 1, b - 1]] = m[[b - 1, a - 1]]
    return Permutation(m)


def reversal(n):
    return Permutation(np.arange(n, 0, -1))


class WeightVector:
    """Centered quality scores bounded by one in sup norm."""

    __slots__ = ("w",)

    def __init__(self, w, tol=1e-9):
        w = np.asarray(w, dtype=float)
        if w.ndim != 1 or w.size < 1:
            raise InvalidWeightVectorError("weights must be a nonempty 1-D array")
        if abs(w.sum()) > tol * max(1, w.size):
            raise InvalidWeightVectorError(f"weights sum to {w.sum():.3g}, expected 0")
        if np.max(np.abs(w)) > 1 + tol:
            raise InvalidWeightVectorError("weights exceed 1 in absolute value")
        self.w = _frozen(w)

    @property
    def n(self):
        return self.w.size

    def __array__(self, dtype=None, copy=None):
        return self.w if dtype is None else self.w.astype(dtype)

    def __repr__(self):
        return f"WeightVector(n={self.n})"


def permute(M, pi):
    """Relabel rows and columns so that ``result[pi(i), pi(j)] = M[i, j]``."""
    a = as_array(M)
    if a.shape[0] != pi.n:
        raise SizeMismatchError(f"matrix has n={a.shape[0]}, permutation has n={pi.n}")
    o = pi.order
    out = a[np.ix_(o, o)]
    return ProbabilityMatrix(out) if isinstance(M, ProbabilityMatrix) else out


def frobenius_distance_sq(A, B):
    """Squared Frobenius distance between two equal-size matrices."""
    a, b = as_array(A), as_array(B)
    if a.shape != b.shape:
        raise SizeMismatchError(f"shapes {a.shape} and {b.shape} differ")
    return float(np.sum((a - b) ** 2))


def read_matrix_csv(path, validate=True):
    a = np.loadtxt(path, delimiter=",", dtype=float, ndmin=2)
    return validate_probability_matrix(a) if validate else a


def write_matrix_csv(path, M):
    np.savetxt(path, as_array(M), delimiter=",", fmt="%.17g")


def read_permutation(path):
    with open(path) as fh:
        text = fh.read().strip()
    return Permutation([int(t) for t in text.split(",")])


def write_permutation(path, pi):
    with open(path, "w") as fh:
        fh.write(",".join(str(int(r)) for r in pi.mapping) + "\n")
