"""Command line interface: ``stochtrans <command> ...``."""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
import warnings

import numpy as np

from . import classes, core, generators, harness, lse, metrics, observation, parametric, svt
from .exceptions import StochTransError


def _write_matrix(path, M):
    if path in (None, "-"):
        np.savetxt(sys.stdout, np.asarray(M), delimiter=",", fmt="%.17g")
    else:
        core.write_matrix_csv(path, M)


def _load_observations(path, p_obs):
    return observation.read_observation_csv(path, p_obs)


def cmd_generate(args):
    kind = args.kind
    if kind in ("thurstone", "btl"):
        M, w = generators.gen_parametric(args.n, args.seed, "gaussian" if kind == "thurstone" else "logistic")
        if args.weights_out:
            np.savetxt(args.weights_out, w.w[None, :], delimiter=",", fmt="%.17g")
    elif kind in ("construction1", "construction2", "construction3_7x7", "construction4", "fas_counterexample"):
        M = generators.fixture(kind, args.n or 6)
    else:
        M = generators.generate(generators.GeneratorSpec(kind, args.n, args.seed, args.level))
    _write_matrix(args.out, M)


def cmd_sample(args):
    M = core.read_matrix_csv(args.matrix)
    if args.pobs is None:
        Y = observation.sample_full(M, args.seed)
    else:
        Y = observation.sample_partial(M, args.pobs, args.seed)
    observation.write_observation_csv(args.out, Y)


def _lam(text):
    return text if text == "auto" else float(text)


def cmd_estimate(args):
    Y = _load_observations(args.input, args.pobs)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        if args.method == "svt":
            est = svt.SVTEstimator(args.mode, _lam(args.lam), not args.no_clip).fit(Y)
            info = {"lambda": est.lambda_, "rank": est.rank_}
        elif args.method == "lse":
            if args.strategy == "bruteforce":
                est = lse.LeastSquaresSST(args.tol, args.max_iters).fit(Y)
                info = {}
            else:
                est = lse.TwoStageSST(args.fas, args.restarts, args.tol, args.max_iters).fit(Y)
                info = {"converged": est.converged_, "n_iter": est.n_iter_}
            info["permutation"] = est.permutation_.mapping.tolist()
        else:
            n = Y.n
            if Y.p_obs is not None and Y.p_obs < math.log(n) ** 2 / n:
                print(f"warning: p_obs = {Y.p_obs:.3g} is below (log n)^2/n = {math.log(n) ** 2 / n:.3g}",
                      file=sys.stderr)
            est = parametric.ParametricMLE(args.cdf, args.grad_tol, args.max_iters).fit(Y)
            info = {"weights": est.weights_.tolist(), "converged": est.converged_, "n_iter": est.n_iter_}
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    _write_matrix(args.out, est.matrix_)
    if args.info:
        with open(args.info, "w") as fh:
            json.dump(info, fh)


def cmd_metric(args):
    A = core.read_matrix_csv(args.a)
    B = core.read_matrix_csv(args.b)
    rec = {
        "normalized_mse": metrics.normalized_mse(A, B),
        "frobenius_sq": core.frobenius_distance_sq(A, B),
        "kl": metrics.kl_divergence(A, B, args.eps),
    }
    print(json.dumps(rec))


def cmd_classify(args):
    M = core.read_matrix_csv(args.matrix)
    out = classes.classify(M)
    if args.gamma is not None:
        out["high_snr"] = classes.is_high_snr(M, args.gamma).to_dict()
    print(json.dumps(out))


def cmd_run(args):
    spec = harness.ExperimentSpec.from_json(args.spec)
    os.makedirs(args.out, exist_ok=True)
    records = harness.run_experiment(spec, workers=args.workers)
    harness.write_records(os.path.join(args.out, "records.jsonl"), records)
    harness.write_summary_csv(os.path.join(args.out, "summary.csv"), harness.summarize(records))
    with open(os.path.join(args.out, "spec.json"), "w") as fh:
        json.dump(spec.to_dict(), fh, indent=2)
    n_err = sum(r.status == "error" for r in records)
    print(f"{len(records)} records, {n_err} errors -> {args.out}")


def cmd_summarize(args):
    rows = harness.summarize(harness.read_records(args.records))
    out = args.out
    if os.path.isdir(out):
        out = os.path.join(out, "summary.csv")
    harness.write_summary_csv(out, rows)


def build_parser():
    p = argparse.ArgumentParser(prog="stochtrans", description="Pairwise comparison matrix estimation.")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="write a ground-truth matrix")
    g.add_argument("--kind", required=True,
                   choices=[k for k in generators.GENERATOR_KINDS if k != "ranking_mixture"]
                   + ["construction1", "construction2", "construction3_7x7", "construction4", "fas_counterexample"])
    g.add_argument("--n", type=int, default=0)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--level", type=float, default=0.9)
    g.add_argument("--weights-out")
    g.add_argument("--out")
    g.set_defaults(func=cmd_generate)

    s = sub.add_parser("sample", help="draw observations from a matrix")
    s.add_argument("--matrix", required=True)
    s.add_argument("--pobs", type=float)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_sample)

    e = sub.add_parser("estimate", help="estimate a matrix from observations")
    esub = e.add_subparsers(dest="method", required=True)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--in", dest="input", required=True)
    common.add_argument("--out")
    common.add_argument("--pobs", type=float)
    common.add_argument("--info", help="write fit details as JSON")
    es = esub.add_parser("svt", parents=[common])
    es.add_argument("--mode", choices=["soft", "hard"], default="soft")
    es.add_argument("--lambda", dest="lam", default="auto")
    es.add_argument("--no-clip", action="store_true")
    el = esub.add_parser("lse", parents=[common])
    el.add_argument("--strategy", choices=["bruteforce", "two-stage"], default="two-stage")
    el.add_argument("--fas", choices=["exhaustive", "rowsum", "local"], default="local")
    el.add_argument("--restarts", type=int, default=4)
    el.add_argument("--tol", type=float, default=1e-8)
    el.add_argument("--max-iters", type=int, default=20000)
    em = esub.add_parser("mle", parents=[common])
    em.add_argument("--cdf", choices=["gaussian", "logistic"], default="gaussian")
    em.add_argument("--grad-tol", type=float, default=1e-7)
    em.add_argument("--max-iters", type=int, default=5000)
    e.set_defaults(func=cmd_estimate)

    m = sub.add_parser("metric", help="compare two matrices")
    m.add_argument("a")
    m.add_argument("b")
    m.add_argument("--eps", type=float, default=0.05)
    m.set_defaults(func=cmd_metric)

    c = sub.add_parser("classify", help="class membership verdicts")
    c.add_argument("--matrix", required=True)
    c.add_argument("--gamma", type=float)
    c.set_defaults(func=cmd_classify)

    r = sub.add_parser("run", help="run an experiment spec")
    r.add_argument("--spec", required=True)
    r.add_argument("--out", required=True)
    r.add_argument("--workers", type=int, default=1)
    r.set_defaults(func=cmd_run)

    sm = sub.add_parser("summarize", help="summarize a records file")
    sm.add_argument("--records", required=True)
    sm.add_argument("--out", required=True)
    sm.set_defaults(func=cmd_summarize)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except StochTransError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
