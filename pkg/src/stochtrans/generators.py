"""Ground-truth comparison matrices: random models and fixed fixtures."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import _random
from .core import Permutation, ProbabilityMatrix, WeightVector, permute
from .exceptions import (
    LevelOutOfRangeError,
    NotDivisibleByError,
    ProbabilitiesDoNotSumToOneError,
    StochTransError,
    UnknownFixtureError,
)
from .links import get_link


def _check_n(n):
    n = int(n)
    if n < 2:
        raise StochTransError(f"need at least two items, got n = {n}")
    return n


def _from_upper(n, upper):
    """Complete a strictly upper-triangular fill into a skew matrix."""
    M = np.full((n, n), 0.5)
    iu = np.triu_indices(n, 1)
    M[iu] = upper[iu]
    M[iu[1], iu[0]] = 1.0 - upper[iu]
    return M


def _fill_positions(n, fill):
    if fill == "band":
        # widest band first, left to right within each band
        rows = [i for k in range(n - 1, 0, -1) for i in range(n - k)]
        cols = [i + k for k in range(n - 1, 0, -1) for i in range(n - k)]
    elif fill == "column":
        # last column first, top to bottom within each column
        rows = [i for j in range(n - 1, 0, -1) for i in range(j)]
        cols = [j for j in range(n - 1, 0, -1) for i in range(j)]
    else:
        raise ValueError(f"unknown fill order {fill!r}")
    return np.array(rows, dtype=np.int64), np.array(cols, dtype=np.int64)


def gen_uniform(n, seed, fill="band", return_permutation=False):
    """Random SST matrix built from sorted uniform values.

    Draws ``n(n-1)/2`` values from ``U[1/2, 1]``, sorts them in decreasing
    order and writes them above the diagonal so that rows increase to the
    right and columns decrease downward. Rows and columns are then shuffled
    by a uniformly random permutation.

    Parameters
    ----------
    n : int
    seed : int
    fill : {"band", "column"}, default="band"
        Placement order of the sorted values. ``"band"`` writes the
        corner entry first and sweeps diagonals toward the main diagonal.
        ``"column"`` writes the last column first, top to bottom. Both give
        matrices faithful to the identity before shuffling.
    return_permutation : bool, default=False
        Also return the permutation the output is faithful to.
    """
    n = _check_n(n)
    rng = _random.stream(seed, _random.GENERATOR)
    vals = np.sort(rng.uniform(0.5, 1.0, size=n * (n - 1) // 2))[::-1]
    upper = np.zeros((n, n))
    r, c = _fill_positions(n, fill)
    upper[r, c] = vals
    shuffle = Permutation.from_order(rng.permutation(n))
    M = ProbabilityMatrix(permute(_from_upper(n, upper), shuffle))
    # item k of M is item shuffle^-1(k) of the sorted matrix
    return (M, shuffle.inverse()) if return_permutation else M


def sample_weights(n, seed):
    """Uniform box draw, recentred and rescaled into the feasible set."""
    n = _check_n(n)
    rng = _random.stream(seed, _random.GENERATOR)
    w = rng.uniform(-1.0, 1.0, size=n)
    w = w - w.mean()
    w = w / max(1.0, np.max(np.abs(w)))
    return WeightVector(w)


def gen_parametric(n, seed, cdf="gaussian"):
    """Thurstone (``cdf="gaussian"``) or BTL (``cdf="logistic"``) matrix.

    Returns
    -------
    M : ProbabilityMatrix
        ``M[i, j] = F(w[i] - w[j])``.
    w : WeightVector
    """
    w = sample_weights(n, seed)
    return induced_matrix(w.w, cdf), w


def induced_matrix(w, cdf="gaussian"):
    w = np.asarray(w, dtype=float)
    M = get_link(cdf).cdf(w[:, None] - w[None, :])
    np.fill_diagonal(M, 0.5)
    return ProbabilityMatrix(M)


def gen_high_snr(n, level=0.9):
    """Matrix with ``level`` above the diagonal and ``1 - level`` below."""
    n = _check_n(n)
    if not 0.5 < level <= 1.0:
        raise LevelOutOfRangeError(f"level must lie in (1/2, 1], got {level}")
    upper = np.full((n, n), float(level))
    return ProbabilityMatrix(_from_upper(n, upper))


def gen_noiseless(n):
    """Deterministic outcomes: the lower index always wins."""
    return gen_high_snr(n, 1.0)


def gen_independent_bands(n, seed):
    """SST matrix filled band by band away from the diagonal.

    Each entry is uniform between the largest of its left and lower
    neighbours (and 1/2) and 1, so the result is faithful to the identity.
    """
    n = _check_n(n)
    rng = _random.stream(seed, _random.GENERATOR)
    M = np.full((n, n), 0.5)
    for k in range(1, n):
        i = np.arange(n - k)
        j = i + k
        lo = np.maximum(np.maximum(M[i, j - 1], M[i + 1, j]), 0.5)
        M[i, j] = lo + (1.0 - lo) * rng.random(n - k)
    return ProbabilityMatrix(_from_upper(n, M))


BAD_BLOCKS = np.array([[4, 6, 7, 8], [2, 4, 7, 8], [1, 1, 4, 5], [0, 0, 3, 4]]) / 8.0


def gen_bad_matrix(n):
    """Block SST matrix that no parametric model can fit well.

    Four equal blocks of size ``n/4`` with values taken from
    ``BAD_BLOCKS``. ``n`` must be a multiple of 4.
    """
    n = _check_n(n)
    if n % 4:
        raise NotDivisibleByError(f"n must be divisible by 4, got {n}")
    M = np.kron(BAD_BLOCKS, np.ones((n // 4, n // 4)))
    np.fill_diagonal(M, 0.5)
    return ProbabilityMatrix(M)


def marginals_of_ranking_distribution(spec, tol=1e-9):
    """Pairwise marginals of a distribution over total rankings.

    Parameters
    ----------
    spec : list of (Permutation, float)
        Support rankings with their probabilities.
    """
    spec = list(spec)
    if not spec:
        raise ProbabilitiesDoNotSumToOneError("empty ranking distribution")
    total = sum(float(p) for _, p in spec)
    if abs(total - 1.0) > tol or any(float(p) < 0 for _, p in spec):
        raise ProbabilitiesDoNotSumToOneError(f"probabilities sum to {total}")
    n = spec[0][0].n
    M = np.zeros((n, n))
    for pi, p in spec:
        if pi.n != n:
            raise StochTransError("rankings differ in size")
        r = pi.ranks
        M += float(p) * (r[:, None] < r[None, :])
    np.fill_diagonal(M, 0.5)
    return ProbabilityMatrix(M)


def _perm(*items):
    return Permutation.from_order([i - 1 for i in items])


CONSTRUCTION1 = [
    (_perm(1, 2, 3), Fraction(2, 5)),
    (_perm(3, 1, 2), Fraction(1, 5)),
    (_perm(2, 3, 1), Fraction(2, 5)),
]

CONSTRUCTION2 = [
    (_perm(3, 1, 2, 4), Fraction(1, 8)),
    (_perm(1, 2, 4, 3), Fraction(1, 8)),
    (_perm(2, 1, 4, 3), Fraction(2, 8)),
    (_perm(1, 2, 3, 4), Fraction(4, 8)),
]

_H = 0.5
CONSTRUCTION3 = np.array(
    [
        [_H, _H, 1, 1, 1, 1, 1],
        [_H, _H, _H, _H, 1, 1, 1],
        [0, _H, _H, _H, _H, 1, 1],
        [0, _H, _H, _H, _H, _H, 1],
        [0, 0, _H, _H, _H, _H, 1],
        [0, 0, 0, _H, _H, _H, _H],
        [0, 0, 0, 0, 0, _H, _H],
    ]
)


def fixture(name, n=6):
    """Hard-coded matrices used as membership fixtures.

    Parameters
    ----------
    name : {"construction3_7x7", "fas_counterexample", "construction1",
            "construction2", "construction4"}
    n : int, default=6
        Size of ``fas_counterexample``; must be divisible by 3.
    """
    if name == "construction3_7x7":
        return ProbabilityMatrix(CONSTRUCTION3)
    if name == "fas_counterexample":
        n = _check_n(n)
        if n % 3:
            raise NotDivisibleByError(f"n must be divisible by 3, got {n}")
        blocks = np.array([[0.5, 0.5, 1.0], [0.5, 0.5, 0.75], [0.0, 0.25, 0.5]])
        M = np.kron(blocks, np.ones((n // 3, n // 3)))
        np.fill_diagonal(M, 0.5)
        return ProbabilityMatrix(M)
    if name == "construction4":
        M2 = fixture("construction2").entries
        M = np.full((11, 11), 1.0)
        M[:4, :4] = M2
        M[4:, 4:] = CONSTRUCTION3
        M[4:, :4] = 0.0
        return ProbabilityMatrix(M)
    if name == "construction1":
        return marginals_of_ranking_distribution(CONSTRUCTION1)
    if name == "construction2":
        return marginals_of_ranking_distribution(CONSTRUCTION2)
    raise UnknownFixtureError(f"unknown fixture {name!r}")


GENERATOR_KINDS = (
    "uniform",
    "thurstone",
    "btl",
    "high_snr",
    "independent_bands",
    "bad_matrix",
    "noiseless",
    "ranking_mixture",
)


@dataclass
class GeneratorSpec:
    """Description of a ground-truth model.

    ``level`` is used by ``high_snr``; ``rankings`` by ``ranking_mixture`` as
    a list of ``(mapping, probability)`` pairs with 1-based rank mappings.
    """

    kind: str
    n: int = 0
    seed: int = 0
    level: float = 0.9
    rankings: list = field(default_factory=list)

    def __post_init__(self):
        if self.kind not in GENERATOR_KINDS:
            raise StochTransError(f"unknown generator kind {self.kind!r}")
        if self.kind == "high_snr" and not 0.5 < self.level <= 1.0:
            raise LevelOutOfRangeError(f"level must lie in (1/2, 1], got {self.level}")
        if self.kind == "ranking_mixture":
            total = sum(float(p) for _, p in self.rankings)
            if abs(total - 1.0) > 1e-9:
                raise ProbabilitiesDoNotSumToOneError(f"probabilities sum to {total}")

    def with_size(self, n, seed):
        return GeneratorSpec(self.kind, n, seed, self.level, list(self.rankings))

    def to_dict(self):
        d = {"kind": self.kind}
        if self.kind == "high_snr":
            d["level"] = self.level
        if self.kind == "ranking_mixture":
            d["rankings"] = [[list(map(int, m)), float(p)] for m, p in self.rankings]
        return d


def generate(spec):
    """Draw the matrix described by a :class:`GeneratorSpec`."""
    k, n, seed = spec.kind, spec.n, spec.seed
    if k == "uniform":
        return gen_uniform(n, seed)
    if k == "thurstone":
        return gen_parametric(n, seed, "gaussian")[0]
    if k == "btl":
        return gen_parametric(n, seed, "logistic")[0]
    if k == "high_snr":
        return gen_high_snr(n, spec.level)
    if k == "independent_bands":
        return gen_independent_bands(n, seed)
    if k == "bad_matrix":
        return gen_bad_matrix(n)
    if k == "noiseless":
        return gen_noiseless(n)
    return marginals_of_ranking_distribution(
        [(m if isinstance(m, Permutation) else Permutation(m), p) for m, p in spec.rankings]
    )
