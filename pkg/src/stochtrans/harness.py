"""Monte Carlo experiment driver.

An experiment crosses a generator with a grid of item counts and a list of
estimators. Each ``(n, trial)`` cell draws a fresh truth and one observation
matrix from a seed derived from ``(base_seed, n, trial)``, so any cell can be
rerun on its own. Records are written as JSON lines; :func:`summarize`
reduces them to per-cell means and log-log slopes.
"""
from __future__ import annotations

import csv
import json
import math
import time
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from ._random import derive_seed
from .exceptions import StochTransError
from .generators import GeneratorSpec, generate
from .lse import BRUTE_FORCE_MAX_N, LeastSquaresSST, TwoStageSST
from .metrics import normalized_mse
from .observation import sample_full, sample_partial
from .parametric import ParametricMLE
from .svt import SVTEstimator

ESTIMATORS = {
    "svt": SVTEstimator,
    "lse": LeastSquaresSST,
    "two_stage": TwoStageSST,
    "mle": ParametricMLE,
}


@dataclass
class EstimatorConfig:
    id: str
    kind: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in ESTIMATORS:
            raise StochTransError(f"unknown estimator kind {self.kind!r}; expected one of {sorted(ESTIMATORS)}")

    def build(self, p_obs=None):
        params = dict(self.params)
        if p_obs is not None and self.kind in ("svt", "lse"):
            params.setdefault("p_obs", p_obs)
        return ESTIMATORS[self.kind](**params)


@dataclass
class ExperimentSpec:
    generator: GeneratorSpec
    n_grid: list
    estimators: list
    trials: int = 20
    p_obs: float | None = None
    base_seed: int = 0

    def __post_init__(self):
        if not self.n_grid:
            raise StochTransError("n_grid must not be empty")
        if self.trials < 1:
            raise StochTransError("trials must be at least 1")
        ids = [e.id for e in self.estimators]
        if len(set(ids)) != len(ids):
            raise StochTransError("estimator ids must be unique")

    @classmethod
    def from_dict(cls, d):
        g = d["generator"]
        gen = GeneratorSpec(
            kind=g["kind"], level=g.get("level", 0.9), rankings=[tuple(r) for r in g.get("rankings", [])]
        )
        ests = [EstimatorConfig(e["id"], e["kind"], e.get("params", {})) for e in d["estimators"]]
        return cls(
            generator=gen,
            n_grid=[int(n) for n in d["n_grid"]],
            estimators=ests,
            trials=int(d.get("trials", 20)),
            p_obs=d.get("p_obs"),
            base_seed=int(d.get("base_seed", 0)),
        )

    @classmethod
    def from_json(cls, path):
        with open(path) as fh:
            return cls.from_dict(json.load(fh))

    def to_dict(self):
        return {
            "generator": self.generator.to_dict(),
            "n_grid": list(self.n_grid),
            "estimators": [asdict(e) for e in self.estimators],
            "trials": self.trials,
            "p_obs": self.p_obs,
            "base_seed": self.base_seed,
        }


@dataclass
class TrialRecord:
    generator: str
    n: int
    trial: int
    estimator: str
    mse: float | None
    seconds: float
    converged: bool | None
    seed: int
    status: str = "ok"
    error: str = ""

    def to_json(self):
        return json.dumps(asdict(self), sort_keys=True)

    @classmethod
    def from_json(cls, line):
        return cls(**json.loads(line))


def cell_seed(base_seed, n, trial):
    return derive_seed(base_seed, n, trial)


def run_cell(spec, n, trial):
    """All estimator records for one ``(n, trial)`` cell."""
    seed = cell_seed(spec.base_seed, n, trial)
    kind = spec.generator.kind
    base = dict(generator=kind, n=n, trial=trial, seed=seed)
    try:
        M = generate(spec.generator.with_size(n, seed))
        if spec.p_obs is None:
            Y = sample_full(M, seed)
        else:
            Y = sample_partial(M, spec.p_obs, seed)
    except Exception as exc:  # noqa: BLE001 - recorded, batch continues
        return [
            TrialRecord(estimator=e.id, mse=None, seconds=0.0, converged=None, status="error",
                        error=f"{type(exc).__name__}: {exc}", **base)
            for e in spec.estimators
        ]
    out = []
    for e in spec.estimators:
        if e.kind == "lse" and n > BRUTE_FORCE_MAX_N:
            out.append(TrialRecord(estimator=e.id, mse=None, seconds=0.0, converged=None, status="skipped",
                                   error=f"brute force skipped for n > {BRUTE_FORCE_MAX_N}", **base))
            continue
        t0 = time.perf_counter()
        try:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                est = e.build(spec.p_obs).fit(Y)
            mse = normalized_mse(est.matrix_, M)
            conv = getattr(est, "converged_", None)
            out.append(TrialRecord(estimator=e.id, mse=mse, seconds=time.perf_counter() - t0,
                                   converged=None if conv is None else bool(conv), **base))
        except Exception as exc:  # noqa: BLE001
            out.append(TrialRecord(estimator=e.id, mse=None, seconds=time.perf_counter() - t0, converged=None,
                                   status="error", error=f"{type(exc).__name__}: {exc}", **base))
    return out


def _run_cell_args(args):
    return run_cell(*args)


def run_experiment(spec, workers=1):
    """Run every cell and return records sorted by ``(n, trial, estimator)``.

    Estimator order follows ``spec.estimators``. Output does not depend on ``workers``.
    """
    cells = [(spec, n, t) for n in spec.n_grid for t in range(spec.trials)]
    if workers and workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(_run_cell_args, cells))
    else:
        chunks = [run_cell(*c) for c in cells]
    rank = {e.id: k for k, e in enumerate(spec.estimators)}
    records = [r for chunk in chunks for r in chunk]
    records.sort(key=lambda r: (r.n, r.trial, rank[r.estimator]))
    return records


def write_records(path, records):
    with open(path, "w") as fh:
        for r in records:
            fh.write(r.to_json() + "\n")


def read_records(path):
    with open(path) as fh:
        return [TrialRecord.from_json(line) for line in fh if line.strip()]


@dataclass
class SummaryRow:
    generator: str
    estimator: str
    n: int
    mean_mse: float
    stderr: float
    count: int
    slope_overall: float | None
    intercept_overall: float | None


def loglog_fit(ns, values):
    """Least-squares line through ``(log n, log value)``: ``(slope, intercept)``."""
    slope, intercept = np.polyfit(np.log(np.asarray(ns, float)), np.log(np.asarray(values, float)), 1)
    return float(slope), float(intercept)


def summarize(records):
    """Per-cell mean and standard error plus a log-log slope per estimator.

    Cells without successful records produce no row. The slope needs at
    least two grid points with positive mean, otherwise it is ``None``.
    """
    cells = {}
    for r in records:
        if r.status == "ok" and r.mse is not None:
            cells.setdefault((r.generator, r.estimator, r.n), []).append(r.mse)
    groups = {}
    for (g, e, n), v in sorted(cells.items()):
        v = np.asarray(v, float)
        se = float(v.std(ddof=1) / math.sqrt(v.size)) if v.size > 1 else 0.0
        groups.setdefault((g, e), []).append((n, float(v.mean()), se, int(v.size)))
    rows = []
    for (g, e), items in groups.items():
        pos = [(n, m) for n, m, _, _ in items if m > 0]
        slope = intercept = None
        if len({n for n, _ in pos}) >= 2:
            slope, intercept = loglog_fit(*zip(*pos))
        rows.extend(SummaryRow(g, e, n, m, se, k, slope, intercept) for n, m, se, k in items)
    return rows


SUMMARY_COLUMNS = ("generator", "estimator", "n", "mean_mse", "stderr", "slope_overall")


def write_summary_csv(path, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(SUMMARY_COLUMNS)
        for r in rows:
            w.writerow([r.generator, r.estimator, r.n, repr(r.mean_mse), repr(r.stderr),
                        "" if r.slope_overall is None else repr(r.slope_overall)])
