"""Membership checks for stochastic transitivity classes.

Every check returns a :class:`Verdict`, which is truthy when the property
holds and otherwise carries a witness of 0-based item indices.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import Permutation, as_array


@dataclass(frozen=True)
class Verdict:
    holds: bool
    permutation: Permutation | None = None
    witness: tuple | None = None
    detail: str = ""

    def __bool__(self):
        return self.holds

    def to_dict(self):
        d = {"holds": self.holds}
        if self.permutation is not None:
            d["permutation"] = self.permutation.mapping.tolist()
        if self.witness is not None:
            d["witness"] = [int(i) + 1 for i in self.witness]
        if self.detail:
            d["detail"] = self.detail
        return d


def _first(mask):
    idx = np.argwhere(mask)
    return tuple(int(v) for v in idx[0]) if idx.size else None


def is_sst(M, tol=1e-9):
    """Strong stochastic transitivity.

    Items are sorted by decreasing row sum (ties by index) and adjacent rows
    are checked for entrywise dominance. Dominance implies larger row sums,
    so this order is faithful whenever any order is.

    Returns
    -------
    Verdict
        ``permutation`` is the faithful order on success. On failure
        ``witness = (i, j, k)`` where ``i`` sits just above ``j`` yet
        ``M[i, k] < M[j, k]``.
    """
    a = as_array(M)
    n = a.shape[0]
    order = np.lexsort((np.arange(n), -a.sum(axis=1)))
    upper, lower = a[order[:-1]], a[order[1:]]
    hit = _first(upper < lower - tol)
    if hit is None:
        return Verdict(True, Permutation.from_order(order))
    r, k = hit
    i, j = int(order[r]), int(order[r + 1])
    return Verdict(
        False,
        witness=(i, j, k),
        detail=f"item {i + 1} outranks {j + 1} by row sum but loses more often to {k + 1}",
    )


def _triple_scan(a, bound_fn, tol):
    n = a.shape[0]
    off = ~np.eye(n, dtype=bool)
    for i in range(n):
        hyp = (a[i][:, None] >= 0.5 - tol) & (a >= 0.5 - tol)
        bound = bound_fn(a[i][:, None], a)
        bad = hyp & (a[i][None, :] < bound - tol) & off
        bad[i, :] = False
        bad[:, i] = False
        hit = _first(bad)
        if hit is not None:
            return (i, *hit)
    return None


def is_mst(M, tol=1e-9):
    """Moderate stochastic transitivity.

    Checks ``M[i, k] >= min(M[i, j], M[j, k])`` whenever both are at least
    1/2, over all distinct triples.
    """
    a = as_array(M)
    w = _triple_scan(a, np.minimum, tol)
    if w is None:
        return Verdict(True)
    i, j, k = w
    return Verdict(False, witness=w, detail=f"M[{i+1},{k+1}] < min(M[{i+1},{j+1}], M[{j+1},{k+1}])")


def is_wst(M, tol=1e-9):
    """Weak stochastic transitivity: ``M[i, k] >= 1/2`` under the same hypotheses."""
    a = as_array(M)
    w = _triple_scan(a, lambda x, y: np.full(np.broadcast(x, y).shape, 0.5), tol)
    if w is None:
        return Verdict(True)
    i, j, k = w
    return Verdict(False, witness=w, detail=f"M[{i+1},{k+1}] < 1/2")


def parametric_necessary_check(M, slack=0.0):
    """Quadruple condition satisfied by every parametric matrix.

    For distinct ``a, b, c, d``, ``M[a, b] > M[c, d]`` forces
    ``M[a, c] >= M[b, d]``. Both comparisons are widened by ``slack``. A
    pass does not prove the matrix is parametric.
    """
    x = as_array(M)
    n = x.shape[0]
    eye = np.eye(n, dtype=bool)
    # distinct (b, c, d) mask, reused for every a
    distinct = ~(eye[:, :, None] | eye[:, None, :] | eye[None, :, :])
    for a in range(n):
        first = x[a][:, None, None] > x[None, :, :] + slack
        second = x[a][None, :, None] < x[:, None, :] - slack
        bad = first & second & distinct
        bad[a, :, :] = False
        bad[:, a, :] = False
        bad[:, :, a] = False
        hit = _first(bad)
        if hit is not None:
            b, c, d = hit
            return Verdict(
                False,
                witness=(a, b, c, d),
                detail=(
                    f"M[{a+1},{b+1}]={x[a, b]:.6g} > M[{c+1},{d+1}]={x[c, d]:.6g} but "
                    f"M[{a+1},{c+1}]={x[a, c]:.6g} < M[{b+1},{d+1}]={x[b, d]:.6g}"
                ),
            )
    return Verdict(True)


def is_high_snr(M, gamma, tol=1e-9):
    """SST with every pair at least ``gamma`` away from a coin flip."""
    sst = is_sst(M, tol)
    if not sst:
        return Verdict(False, witness=sst.witness, detail="not SST: " + sst.detail)
    a = as_array(M)
    gap = np.maximum(a, a.T) < 0.5 + gamma - tol
    np.fill_diagonal(gap, False)
    hit = _first(gap)
    if hit is None:
        return Verdict(True, sst.permutation)
    i, j = hit
    return Verdict(False, witness=hit, detail=f"pair ({i+1},{j+1}) has max probability {max(a[i, j], a[j, i]):.6g}")


@dataclass(frozen=True)
class RefuterResult:
    status: str  # "refuted" or "unknown"
    witness: list = field(default_factory=list)

    def to_dict(self):
        return {"status": self.status, "witness": [[int(v) + 1 for v in t] for t in self.witness]}


class _ParityUnion:
    def __init__(self, size):
        self.parent = list(range(size))
        self.parity = [0] * size

    def find(self, x):
        path = []
        while self.parent[x] != x:
            path.append(x)
            x = self.parent[x]
        # compress, accumulating parity from the far end
        acc = 0
        for node in reversed(path):
            acc ^= self.parity[node]
            self.parity[node] = acc
            self.parent[node] = x
        return x

    def union(self, a, b, rel):
        """Impose ``value(a) xor value(b) == rel``; False on contradiction."""
        ra, rb = self.find(a), self.find(b)
        pa, pb = self.parity[a] if a != ra else 0, self.parity[b] if b != rb else 0
        if ra == rb:
            return (pa ^ pb) == rel
        self.parent[ra] = rb
        self.parity[ra] = pa ^ pb ^ rel
        return True


def refute_full_membership(M, tol=1e-12):
    """Try to show ``M`` is not a mixture of total rankings.

    Every ranking in the support of such a mixture must orient the pairs
    with ``M`` in ``{0, 1}`` accordingly, and for any triple with
    ``M[i, j] = M[j, k] = 1/2`` and ``M[i, k] = 1`` it must orient exactly
    one of ``(i, j)`` and ``(j, k)`` downward. These parity constraints are
    propagated; a contradiction refutes membership.

    Returns
    -------
    RefuterResult
        ``status`` is ``"refuted"`` or ``"unknown"``; never a proof of
        membership.
    """
    a = as_array(M)
    n = a.shape[0]
    index = {}
    for i in range(n):
        for j in range(i + 1, n):
            index[(i, j)] = len(index) + 1
    uf = _ParityUnion(len(index) + 1)  # node 0 is the constant 0

    def var(x, y):
        return (index[(x, y)], 0) if x < y else (index[(y, x)], 1)

    used = []
    for (i, j), v in index.items():
        if abs(a[i, j] - 1.0) <= tol or abs(a[i, j]) <= tol:
            val = int(round(a[i, j]))
            if not uf.union(v, 0, val):
                return RefuterResult("refuted", [(i, j)])
    half = np.abs(a - 0.5) <= tol
    one = np.abs(a - 1.0) <= tol
    for i, j, k in np.argwhere(half[:, :, None] & half[None, :, :] & one[:, None, :]):
        if len({i, j, k}) < 3:
            continue
        (p, fp), (q, fq) = var(i, j), var(j, k)
        used.append((int(i), int(j), int(k)))
        if not uf.union(p, q, 1 ^ fp ^ fq):
            return RefuterResult("refuted", used)
    return RefuterResult("unknown")


def classify(M):
    """Run every check and return a JSON-ready dictionary."""
    return {
        "sst": is_sst(M).to_dict(),
        "mst": is_mst(M).to_dict(),
        "wst": is_wst(M).to_dict(),
        "parametric_necessary": parametric_necessary_check(M).to_dict(),
        "full_refuter": refute_full_membership(M).to_dict(),
    }
