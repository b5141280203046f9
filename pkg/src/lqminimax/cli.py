"""Command-line entry points.

Subcommands: simulate, check-design, fit-rate, pack, rates, counterexample.
All randomness is controlled through --seed; outputs are JSON on stdout and
optional CSV/JSON/SVG files.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import ballgeom, bounds, conditions, harness, linmodel
from .estimators import (
    check_basic_inequality,
    l0_least_squares,
    l1_constrained_ls,
    lasso,
    lq_constrained_ls,
)


def _emit(doc: dict) -> None:
    json.dump(doc, sys.stdout, indent=2, sort_keys=True)
    sys.stdout.write("\n")


# ---------------------------------------------------------------------------
# simulate
# ---------------------------------------------------------------------------


def _cmd_simulate(args) -> int:
    ball = linmodel.BallSpec(q=args.q, radius=args.radius)
    spec = linmodel.DesignSpec(kind=args.design, n=args.n, d=args.d, seed=args.seed)
    X = linmodel.generate_design(spec)
    beta = linmodel.generate_sparse_beta(ball, args.d, pattern=args.pattern,
                                         magnitude=args.magnitude, seed=args.seed)
    inst = linmodel.simulate(X, beta, args.sigma, seed=args.seed, ball=ball)
    doc = {"n": inst.n, "d": inst.d, "sigma": inst.sigma, "seed": inst.seed,
           "beta_support": np.flatnonzero(beta).tolist()}

    if args.estimator != "none":
        if args.estimator == "l0":
            result = l0_least_squares(inst.X, inst.y, args.s or ball.s)
        elif args.estimator == "l1":
            result = l1_constrained_ls(inst.X, inst.y, args.radius)
        elif args.estimator == "lq":
            result = lq_constrained_ls(inst.X, inst.y, ball,
                                       [inst.beta_star, np.zeros(inst.d)])
        elif args.estimator == "lasso":
            result = lasso(inst.X, inst.y, args.lam)
        check = check_basic_inequality(inst, result)
        doc["estimate"] = result.to_json_dict()
        doc["losses"] = {
            "l2": linmodel.loss(linmodel.LossSpec.l2(), inst.X, result.beta_hat, beta),
            "pred": linmodel.loss(linmodel.LossSpec.prediction(), inst.X,
                                  result.beta_hat, beta),
        }
        doc["objective_ok"] = check.objective_ok

    if args.out:
        with open(args.out, "w") as fh:
            fh.write(linmodel.instance_to_json(inst))
        doc["instance_file"] = args.out
    if args.out_csv:
        linmodel.instance_to_csv(inst, args.out_csv)
    _emit(doc)
    return 0


# ---------------------------------------------------------------------------
# check-design
# ---------------------------------------------------------------------------


def _load_matrix(path: str) -> np.ndarray:
    if path.endswith(".json"):
        with open(path) as fh:
            doc = json.load(fh)
        if "X" in doc and "n" in doc:
            return np.array(doc["X"], dtype=float).reshape(int(doc["n"]), int(doc["d"]))
        return np.array(doc["X"], dtype=float)
    return np.loadtxt(path, delimiter=",", ndmin=2)


def _cmd_check_design(args) -> int:
    X = _load_matrix(args.input)
    diag = conditions.diagnose(X, s=args.s, c0=args.c0, seed=args.seed)
    doc = diag.to_json_dict()
    ok = True
    if args.require_kernel_trivial and not diag.kernel_trivial:
        ok = False
    if diag.re_constant < args.min_re:
        ok = False
    if args.max_kappa_c is not None and diag.kappa_c > args.max_kappa_c:
        ok = False
    doc["assumptions_hold"] = ok
    _emit(doc)
    return 0 if ok else 1


# ---------------------------------------------------------------------------
# fit-rate
# ---------------------------------------------------------------------------


def _cmd_fit_rate(args) -> int:
    with open(args.config) as fh:
        doc = json.load(fh)
    config = harness.ExperimentConfig.from_json_dict(doc)
    if args.seed is not None:
        doc["seed_root"] = args.seed
        config = harness.ExperimentConfig.from_json_dict(doc)
    run = harness.run_risk_experiment(config, n_workers=args.workers)
    fit = harness.fit_rate_slope(run.records, loss_kind=args.loss,
                                 predictor=args.predictor, q=config.ball.q,
                                 s=int(config.ball.radius) if config.ball.q == 0 else None,
                                 radius=config.ball.radius)
    if args.out_records:
        fmt = "json" if args.out_records.endswith(".json") else "csv"
        harness.persist(run, args.out_records, format=fmt)
    if args.plot:
        harness.plot_fit_svg(fit, args.plot)
    out = fit.to_json_dict()
    out["config_hash"] = run.config_hash
    out["excluded_cells"] = [list(c) for c in run.excluded_cells]
    _emit(out)
    return 0


# ---------------------------------------------------------------------------
# pack
# ---------------------------------------------------------------------------


def _cmd_pack(args) -> int:
    packing = ballgeom.hamming_packing(args.d, args.s)
    doc = {
        "kind": "hamming",
        "d": args.d,
        "s": args.s,
        "cardinality": packing.cardinality,
        "min_distance": packing.min_pairwise_distance,
        "guaranteed_cardinality": ballgeom.required_hamming_cardinality(args.d, args.s),
    }
    if args.rescale is not None:
        packing = ballgeom.rescale_hypercube_packing(packing, args.rescale, args.s)
        doc["rescaled_delta"] = args.rescale
        doc["rescaled_min_distance"] = packing.min_pairwise_distance
    if args.out:
        ballgeom.packing_to_csv(packing, args.out)
        doc["out"] = args.out
    _emit(doc)
    return 0


# ---------------------------------------------------------------------------
# rates
# ---------------------------------------------------------------------------


def _parse_params(items) -> dict:
    out = {}
    for item in items:
        for piece in item.split(","):
            if not piece:
                continue
            key, _, value = piece.partition("=")
            out[key.strip()] = float(value)
    return out


def _cmd_rates(args) -> int:
    params = _parse_params(args.params or [])
    constants = {k[2:]: v for k, v in params.items() if k.startswith("c_")}
    if "c" in params:
        constants["c"] = params["c"]
    query = bounds.RateQuery(
        theorem=args.theorem,
        n=int(params["n"]),
        d=int(params["d"]) if "d" in params else None,
        q=params.get("q", 0.0),
        radius=params.get("radius", params.get("Rq", params.get("s", 1.0))),
        sigma=params.get("sigma", params.get("tau", 1.0)),
        kappa_c=params.get("kappa_c"),
        kappa_l=params.get("kappa_l"),
        kappa_u=params.get("kappa_u"),
        p=params.get("p", 2.0),
        diam_term=params.get("diam_term", 0.0),
        constants=constants,
    )
    _emit({
        "theorem": args.theorem,
        "value": bounds.minimax_rate(query),
        "formula": bounds.rate_formula(args.theorem),
        "constants_used": constants,
    })
    return 0


# ---------------------------------------------------------------------------
# counterexample
# ---------------------------------------------------------------------------


def _cmd_counterexample(args) -> int:
    report = harness.counterexample_scenario()
    _emit(report.to_json_dict())
    return 0 if report.all_ok else 1


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lqminimax")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="one instance end-to-end")
    p.add_argument("--design", default="standard_gaussian",
                   choices=["standard_gaussian", "identity_sequence"])
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--q", type=float, default=0.0)
    p.add_argument("--radius", type=float, default=1.0)
    p.add_argument("--sigma", type=float, default=1.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--pattern", default="random_support")
    p.add_argument("--magnitude", type=float, default=1.0)
    p.add_argument("--estimator", default="none",
                   choices=["none", "l0", "l1", "lq", "lasso"])
    p.add_argument("--s", type=int, default=None)
    p.add_argument("--lambda", dest="lam", type=float, default=0.1)
    p.add_argument("--out", default=None, help="write instance JSON here")
    p.add_argument("--out-csv", default=None, help="write y and beta_star CSV here")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("check-design", help="measure design constants")
    p.add_argument("--input", required=True, help="design matrix (.csv or .json)")
    p.add_argument("--s", type=int, required=True)
    p.add_argument("--c0", type=float, default=3.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--require-kernel-trivial", action="store_true")
    p.add_argument("--min-re", type=float, default=0.0)
    p.add_argument("--max-kappa-c", type=float, default=None)
    p.set_defaults(func=_cmd_check_design)

    p = sub.add_parser("fit-rate", help="run an experiment config and fit slopes")
    p.add_argument("--config", required=True, help="JSON config file")
    p.add_argument("--loss", default="l2")
    p.add_argument("--predictor", default="n",
                   choices=["n", "s_logd_over_n", "rq_logd_n_pow"])
    p.add_argument("--seed", type=int, default=None, help="override seed_root")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out-records", default=None)
    p.add_argument("--plot", default=None, help="write an SVG of the fit here")
    p.set_defaults(func=_cmd_fit_rate)

    p = sub.add_parser("pack", help="hypercube packing construction")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--s", type=int, required=True)
    p.add_argument("--rescale", type=float, default=None,
                   help="also rescale to an l2 packing with this delta_n")
    p.add_argument("--out", default=None, help="CSV path (JSON sidecar added)")
    p.set_defaults(func=_cmd_pack)

    p = sub.add_parser("rates", help="evaluate a rate formula")
    p.add_argument("--theorem", required=True, choices=list(bounds.THEOREMS))
    p.add_argument("--params", action="append", default=[],
                   help="comma-separated k=v pairs, e.g. n=100,d=32,sigma=1")
    p.set_defaults(func=_cmd_rates)

    p = sub.add_parser("counterexample", help="run the l1-vs-l0 scenario")
    p.set_defaults(func=_cmd_counterexample)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
