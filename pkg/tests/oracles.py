"""Independent reference implementations used only by the tests.

None of these import the package's algorithms; they are slow, direct
transcriptions of the definitions.
"""
import itertools

import cvxpy as cp
import numpy as np
from scipy import optimize, stats


def qp_project(Y, order=None):
    """Dense QP over the full matrix: skew, box, monotone in the given order."""
    Y = np.asarray(Y, dtype=float)
    n = len(Y)
    if order is None:
        order = list(range(n))
    P = Y[np.ix_(order, order)]
    M = cp.Variable((n, n))
    cons = [M >= 0, M <= 1, M + M.T == 1]
    for i in range(n):
        for j in range(n - 1):
            cons += [M[i, j + 1] >= M[i, j], M[j + 1, i] <= M[j, i]]
    prob = cp.Problem(cp.Minimize(cp.sum_squares(P - M)), cons)
    prob.solve(solver=cp.CLARABEL, tol_gap_abs=1e-12, tol_gap_rel=1e-12, tol_feas=1e-12)
    out = np.empty((n, n))
    out[np.ix_(order, order)] = M.value
    return out, float(np.sum((Y - out) ** 2))


class QPFamily:
    """One compiled QP per ``n`` with ``Y`` as a parameter, for many orders."""

    def __init__(self, n):
        self.n = n
        self.P = cp.Parameter((n, n))
        self.M = cp.Variable((n, n))
        cons = [self.M >= 0, self.M <= 1, self.M + self.M.T == 1]
        for i in range(n):
            for j in range(n - 1):
                cons += [self.M[i, j + 1] >= self.M[i, j], self.M[j + 1, i] <= self.M[j, i]]
        self.prob = cp.Problem(cp.Minimize(cp.sum_squares(self.P - self.M)), cons)

    def objective(self, Y, order):
        self.P.value = np.asarray(Y, float)[np.ix_(order, order)]
        self.prob.solve(solver=cp.CLARABEL, tol_gap_abs=1e-12, tol_gap_rel=1e-12, tol_feas=1e-12)
        return float(np.sum((self.P.value - self.M.value) ** 2))

    def best(self, Y):
        return min(self.objective(Y, list(o)) for o in itertools.permutations(range(self.n)))


def in_biso(M, order=None, tol=1e-9):
    M = np.asarray(M, float)
    n = len(M)
    if order is not None:
        M = M[np.ix_(order, order)]
    ok = np.all(M >= -tol) and np.all(M <= 1 + tol) and np.allclose(M + M.T, 1, atol=tol)
    ok &= np.all(np.diff(M, axis=1) >= -tol) and np.all(np.diff(M, axis=0) <= tol)
    return bool(ok)


def naive_permute(M, ranks0):
    n = len(M)
    out = np.empty((n, n))
    for i in range(n):
        for j in range(n):
            out[ranks0[i], ranks0[j]] = M[i, j]
    return out


def disagreements(Y, order):
    pos = {v: k for k, v in enumerate(order)}
    n = len(Y)
    return sum(Y[j][i] for i in range(n) for j in range(n) if i != j and pos[i] < pos[j])


def fas_enumerate(Y):
    """Minimum disagreement count over all orders."""
    n = len(Y)
    return min(disagreements(Y, o) for o in itertools.permutations(range(n)))


def sst_by_search(M, tol=1e-9):
    """Is there any order whose permuted matrix is bivariate isotonic?"""
    n = len(M)
    return any(in_biso(M, list(o), tol) for o in itertools.permutations(range(n)))


def mst_loops(M, tol=1e-9):
    n = len(M)
    for i, j, k in itertools.permutations(range(n), 3):
        if M[i][j] >= 0.5 - tol and M[j][k] >= 0.5 - tol and M[i][k] < min(M[i][j], M[j][k]) - tol:
            return (i, j, k)
    return None


def wst_loops(M, tol=1e-9):
    n = len(M)
    for i, j, k in itertools.permutations(range(n), 3):
        if M[i][j] >= 0.5 - tol and M[j][k] >= 0.5 - tol and M[i][k] < 0.5 - tol:
            return (i, j, k)
    return None


def quad_loops(M, slack=0.0):
    n = len(M)
    for a, b, c, d in itertools.permutations(range(n), 4):
        if M[a][b] > M[c][d] + slack and M[a][c] < M[b][d] - slack:
            return (a, b, c, d)
    return None


def footrule_loops(ranks0):
    return sum(abs(r - i) for i, r in enumerate(ranks0))


def kemeny_loops(ranks0):
    n = len(ranks0)
    return sum(1 for i in range(n) for j in range(i + 1, n) if ranks0[i] > ranks0[j])


def nll_direct(w, Y, cdf):
    F = stats.norm.cdf if cdf == "gaussian" else (lambda t: 1 / (1 + np.exp(-t)))
    n = len(w)
    tot = 0.0
    for i in range(n):
        for j in range(i + 1, n):
            y = Y[i][j]
            if np.isnan(y):
                continue
            p = F(w[i] - w[j])
            tot -= y * np.log(p) + (1 - y) * np.log(1 - p)
    return tot


def mle_slsqp(Y, cdf):
    n = len(Y)
    res = optimize.minimize(
        nll_direct,
        np.zeros(n),
        args=(Y, cdf),
        method="SLSQP",
        bounds=[(-1, 1)] * n,
        constraints=[{"type": "eq", "fun": lambda w: np.sum(w)}],
        options={"ftol": 1e-14, "maxiter": 1000},
    )
    return res.x, res.fun


def weight_projection_qp(v):
    w = cp.Variable(len(v))
    cp.Problem(cp.Minimize(cp.sum_squares(w - v)), [cp.sum(w) == 0, w <= 1, w >= -1]).solve(
        solver=cp.CLARABEL, tol_gap_abs=1e-12, tol_gap_rel=1e-12, tol_feas=1e-12
    )
    return w.value
