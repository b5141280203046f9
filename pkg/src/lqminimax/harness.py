"""Experiment orchestration.

Runs risk sweeps over (n, d) grids with seeded, reproducible trials, fits
log-log rate slopes against the theoretical predictors, reproduces the
l1-vs-l0 counterexample design deterministically, and persists records to
CSV/JSON with a config hash in every file header.

Seeding: seed(cell, trial) = hash(seed_root, n, d, trial), further split
into design / truth / noise streams, so any subset of trials can be rerun
in isolation and workers can execute out of order.
"""

from __future__ import annotations

import hashlib
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy.optimize import linprog

from .conditions import in_cone
from .errors import ConsistencyError, ParameterError
from .estimators import (
    EstimateResult,
    check_basic_inequality,
    l0_least_squares,
    l1_constrained_ls,
    lasso,
    lq_constrained_ls,
)
from .linmodel import (
    BallSpec,
    DesignSpec,
    LossSpec,
    ProblemInstance,
    derive_seed,
    generate_design,
    generate_sparse_beta,
    loss,
    sequence_model_instance,
    simulate,
)

__all__ = [
    "ExperimentConfig",
    "TrialRecord",
    "RateFitResult",
    "ExperimentRun",
    "CounterexampleReport",
    "run_risk_experiment",
    "fit_rate_slope",
    "counterexample_scenario",
    "corollary1_experiment",
    "min_l1_interpolant",
    "persist",
    "load_records",
    "config_hash",
    "plot_fit_svg",
]

TRIM_FRACTION = 0.02  # trimmed-mean risk estimate; raw means are kept too


# ---------------------------------------------------------------------------
# configuration
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ExperimentConfig:
    ball: BallSpec
    sigma: float
    n_grid: tuple
    estimator: dict
    d_rule: tuple = ("fixed", 32)  # or ("proportional", ratio)
    design_kind: str = "standard_gaussian"
    sigma_cov: Optional[tuple] = None  # rows of the covariance, for correlated designs
    trials_per_cell: int = 1
    losses: tuple = (LossSpec.l2(), LossSpec.prediction())
    seed_root: int = 0
    beta_pattern: str = "random_support"
    beta_magnitude: float = 1.0
    # "constant" uses beta_magnitude; "threshold_logd" places entries at the
    # per-cell detection scale sigma sqrt(2 log d / n), the least favorable
    # configuration for soft-sparse balls
    beta_magnitude_rule: str = "constant"
    kappa_exponent: float = 0.5
    enforce_scaling: bool = False

    def __post_init__(self):
        grid = tuple(int(n) for n in self.n_grid)
        object.__setattr__(self, "n_grid", grid)
        if any(b >= a for a, b in zip(grid[1:], grid)):
            raise ParameterError(f"n_grid must be strictly increasing, got {grid}")
        if self.trials_per_cell < 1:
            raise ParameterError("need at least one trial per cell")
        if self.d_rule[0] not in ("fixed", "proportional"):
            raise ParameterError(f"unknown d_rule {self.d_rule!r}")

    def dim_at(self, n: int) -> int:
        kind, value = self.d_rule
        return int(value) if kind == "fixed" else int(round(value * n))

    def scaling_ok(self, n: int, d: int) -> bool:
        """d / (Rq n^{q/2}) >= d^kappa; the condition only binds for q > 0."""
        if self.ball.q == 0.0:
            return True
        lhs = d / (self.ball.radius * n ** (self.ball.q / 2.0))
        return lhs >= d**self.kappa_exponent

    def to_json_dict(self) -> dict:
        return {
            "ball": {"q": self.ball.q, "radius": self.ball.radius},
            "sigma": self.sigma,
            "n_grid": list(self.n_grid),
            "estimator": self.estimator,
            "d_rule": list(self.d_rule),
            "design_kind": self.design_kind,
            "sigma_cov": None if self.sigma_cov is None else [list(r) for r in self.sigma_cov],
            "trials_per_cell": self.trials_per_cell,
            "losses": [{"kind": sp.kind, "p": sp.p} for sp in self.losses],
            "seed_root": self.seed_root,
            "beta_pattern": self.beta_pattern,
            "beta_magnitude": self.beta_magnitude,
            "beta_magnitude_rule": self.beta_magnitude_rule,
            "kappa_exponent": self.kappa_exponent,
            "enforce_scaling": self.enforce_scaling,
        }

    @classmethod
    def from_json_dict(cls, doc: dict) -> "ExperimentConfig":
        ball = BallSpec(q=float(doc["ball"]["q"]), radius=float(doc["ball"]["radius"]))
        losses = tuple(
            LossSpec(kind=item["kind"], p=float(item.get("p", 2.0)))
            for item in doc.get("losses", [{"kind": "lp", "p": 2.0},
                                           {"kind": "l2_prediction"}])
        )
        return cls(
            ball=ball,
            sigma=float(doc["sigma"]),
            n_grid=tuple(int(v) for v in doc["n_grid"]),
            estimator=dict(doc["estimator"]),
            d_rule=tuple(doc.get("d_rule", ["fixed", 32])),
            design_kind=doc.get("design_kind", "standard_gaussian"),
            sigma_cov=(None if doc.get("sigma_cov") is None
                       else tuple(tuple(r) for r in doc["sigma_cov"])),
            trials_per_cell=int(doc.get("trials_per_cell", 1)),
            losses=losses,
            seed_root=int(doc.get("seed_root", 0)),
            beta_pattern=doc.get("beta_pattern", "random_support"),
            beta_magnitude=float(doc.get("beta_magnitude", 1.0)),
            beta_magnitude_rule=doc.get("beta_magnitude_rule", "constant"),
            kappa_exponent=float(doc.get("kappa_exponent", 0.5)),
            enforce_scaling=bool(doc.get("enforce_scaling", False)),
        )


def config_hash(config: ExperimentConfig) -> str:
    canonical = json.dumps(config.to_json_dict(), sort_keys=True)
    return hashlib.sha256(canonical.encode()).hexdigest()[:16]


# ---------------------------------------------------------------------------
# records
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TrialRecord:
    n: int
    d: int
    trial: int
    seed: int
    losses: dict
    objective_ok: bool
    wall_ms: float


@dataclass
class ExperimentRun:
    """Records plus the cells excluded by the scaling gate (never silent)."""

    records: list
    excluded_cells: list
    config_hash: str
    seed_root: int

    def __iter__(self):
        return iter(self.records)

    def __len__(self):
        return len(self.records)


# ---------------------------------------------------------------------------
# running trials
# ---------------------------------------------------------------------------


def _run_estimator(config: ExperimentConfig, inst: ProblemInstance) -> EstimateResult:
    est = config.estimator
    kind = est["kind"]
    if kind == "l0":
        return l0_least_squares(inst.X, inst.y, int(est["s"]))
    if kind == "l1":
        return l1_constrained_ls(
            inst.X, inst.y, float(est["radius"]),
            max_iter=int(est.get("max_iter", 20_000)),
            tol=float(est.get("tol", 1e-8)),
        )
    if kind == "lq":
        starts = [np.zeros(inst.d)]
        if est.get("oracle_start", True):
            starts.insert(0, inst.beta_star)
        return lq_constrained_ls(
            inst.X, inst.y, config.ball, starts,
            max_iter=int(est.get("max_iter", 2_000)),
            tol=float(est.get("tol", 1e-9)),
        )
    if kind == "lasso":
        return lasso(inst.X, inst.y, float(est["lam"]),
                     max_iter=int(est.get("max_iter", 10_000)),
                     tol=float(est.get("tol", 1e-10)))
    raise ParameterError(f"unknown estimator kind {kind!r}")


def _run_trial(config: ExperimentConfig, n: int, d: int, trial: int) -> TrialRecord:
    seed = derive_seed(config.seed_root, n, d, trial)
    start = time.perf_counter()
    if config.design_kind == "identity_sequence":
        X = np.eye(n)
    else:
        cov = None if config.sigma_cov is None else np.array(config.sigma_cov, float)
        X = generate_design(DesignSpec(kind=config.design_kind, n=n, d=d,
                                       seed=derive_seed(seed, 1), sigma_cov=cov))
    if config.beta_magnitude_rule == "threshold_logd":
        magnitude = config.sigma * math.sqrt(2.0 * math.log(d) / n)
    elif config.beta_magnitude_rule == "constant":
        magnitude = config.beta_magnitude
    else:
        raise ParameterError(f"unknown magnitude rule {config.beta_magnitude_rule!r}")
    beta = generate_sparse_beta(config.ball, d, pattern=config.beta_pattern,
                                magnitude=magnitude, seed=derive_seed(seed, 2))
    inst = simulate(X, beta, config.sigma, seed=seed, ball=config.ball)
    result = _run_estimator(config, inst)
    check = check_basic_inequality(inst, result)
    if config.estimator["kind"] == "l0" and not check.objective_ok:
        raise ConsistencyError(
            f"exact l0 solver beaten by the truth at (n={n}, d={d}, trial={trial}): "
            "solver bug"
        )
    losses = {sp.name: loss(sp, inst.X, result.beta_hat, inst.beta_star)
              for sp in config.losses}
    wall_ms = (time.perf_counter() - start) * 1e3
    return TrialRecord(n=n, d=d, trial=trial, seed=seed, losses=losses,
                       objective_ok=check.objective_ok, wall_ms=wall_ms)


def _run_trial_star(args) -> TrialRecord:
    return _run_trial(*args)


def run_risk_experiment(config: ExperimentConfig, n_workers: int = 1) -> ExperimentRun:
    """Execute every (cell, trial) job and return records in canonical order.

    Cells failing the scaling condition are excluded and reported in
    ``excluded_cells`` when ``enforce_scaling`` is set.  Identical
    (config, seed_root) always reproduce bit-identical records regardless of
    worker count.
    """
    jobs = []
    excluded = []
    for n in config.n_grid:
        d = config.dim_at(n)
        if config.enforce_scaling and not config.scaling_ok(n, d):
            excluded.append((n, d))
            continue
        jobs.extend((config, n, d, trial) for trial in range(config.trials_per_cell))
    if n_workers > 1:
        with ProcessPoolExecutor(max_workers=n_workers) as pool:
            records = list(pool.map(_run_trial_star, jobs, chunksize=8))
    else:
        records = [_run_trial(*job) for job in jobs]
    records.sort(key=lambda r: (r.n, r.d, r.trial))
    return ExperimentRun(records=records, excluded_cells=excluded,
                         config_hash=config_hash(config),
                         seed_root=config.seed_root)


# ---------------------------------------------------------------------------
# slope fitting
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RateFitResult:
    slope: float
    intercept: float
    r_squared: float
    n_points: int
    loss_kind: str
    theoretical_slope: float
    predictor: str
    cells: tuple  # (n, d, x, trimmed_mean, raw_mean) per fitted cell
    excluded_zero_cells: int = 0

    def to_json_dict(self) -> dict:
        return {
            "slope": self.slope,
            "intercept": self.intercept,
            "r_squared": self.r_squared,
            "n_points": self.n_points,
            "loss_kind": self.loss_kind,
            "theoretical_slope": self.theoretical_slope,
            "predictor": self.predictor,
            "cells": [list(c) for c in self.cells],
            "excluded_zero_cells": self.excluded_zero_cells,
        }


def _trimmed_mean(values: np.ndarray, frac: float = TRIM_FRACTION) -> float:
    values = np.sort(np.asarray(values, dtype=float))
    k = int(math.floor(frac * len(values)))
    if len(values) > 2 * k and k > 0:
        values = values[k:-k]
    return float(values.mean())


def _predictor_value(predictor: str, n: int, d: int, q: float,
                     s: Optional[int], radius: Optional[float]) -> float:
    if predictor == "n":
        return float(n)
    if predictor == "s_logd_over_n":
        if s is None:
            raise ParameterError("predictor s_logd_over_n needs s")
        return s * math.log(d / s) / n
    if predictor == "rq_logd_n_pow":
        if radius is None:
            raise ParameterError("predictor rq_logd_n_pow needs the ball radius")
        return radius * (math.log(d) / n) ** (1.0 - q / 2.0)
    raise ParameterError(f"unknown predictor {predictor!r}")


def fit_rate_slope(
    records: Sequence[TrialRecord],
    loss_kind: str = "l2",
    predictor: str = "n",
    q: float = 0.0,
    s: Optional[int] = None,
    radius: Optional[float] = None,
) -> RateFitResult:
    """OLS fit of log(mean loss) against log(predictor), one point per cell.

    Cell risk is the 2%-trimmed mean over trials (raw means kept alongside);
    zero-mean cells are excluded and counted.  The theoretical slope is -1
    (q = 0) or -(1 - q/2) against n, and +1 against the composite
    predictors.
    """
    by_cell: dict = {}
    for rec in records:
        by_cell.setdefault((rec.n, rec.d), []).append(rec.losses[loss_kind])
    xs, ys, cells = [], [], []
    excluded = 0
    for (n, d), vals in sorted(by_cell.items()):
        vals = np.array(vals)
        trimmed = _trimmed_mean(vals)
        raw = float(vals.mean())
        if trimmed <= 0.0:
            excluded += 1
            continue
        x = _predictor_value(predictor, n, d, q, s, radius)
        xs.append(math.log(x))
        ys.append(math.log(trimmed))
        cells.append((n, d, x, trimmed, raw))
    if len(xs) < 3:
        raise ParameterError(f"need at least 3 usable cells, got {len(xs)}")
    slope, intercept = np.polyfit(xs, ys, 1)
    fitted = slope * np.array(xs) + intercept
    resid = np.array(ys) - fitted
    total = np.array(ys) - np.mean(ys)
    r_squared = 1.0 - float(resid @ resid) / float(total @ total)
    if predictor == "n":
        theoretical = -1.0 if q == 0.0 else -(1.0 - q / 2.0)
    else:
        theoretical = 1.0
    return RateFitResult(slope=float(slope), intercept=float(intercept),
                         r_squared=r_squared, n_points=len(xs),
                         loss_kind=loss_kind, theoretical_slope=theoretical,
                         predictor=predictor, cells=tuple(cells),
                         excluded_zero_cells=excluded)


# ---------------------------------------------------------------------------
# the l1-vs-l0 counterexample
# ---------------------------------------------------------------------------

COUNTEREXAMPLE_X = np.array([[1.0, -2.0, -1.0], [2.0, -3.0, -3.0]])
COUNTEREXAMPLE_BETA = np.array([1.0, 0.0, 0.0])


def min_l1_interpolant(X: np.ndarray, y: np.ndarray) -> np.ndarray:
    """argmin ||b||_1 subject to X b = y, via the LP split b = b+ - b-."""
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    d = X.shape[1]
    res = linprog(c=np.ones(2 * d), A_eq=np.hstack([X, -X]), b_eq=y,
                  bounds=(0, None), method="highs")
    if not res.success:
        raise ConsistencyError(f"interpolation LP failed: {res.message}")
    return res.x[:d] - res.x[d:]


@dataclass(frozen=True)
class CounterexampleReport:
    kernel_ok: bool       # (1, 1/3, 1/3) annihilated by the design
    cone_ok: bool         # ... lies in the comparison cone but not in B_0(2)
    l0_recovery_ok: bool  # exact l0 solver returns the truth at sigma = 0
    l1_failure_ok: bool   # min-l1 interpolant is (0,-1/3,-1/3) with norm 2/3
    beta_l0: tuple
    beta_min_l1: tuple
    min_l1_norm: float

    @property
    def all_ok(self) -> bool:
        return self.kernel_ok and self.cone_ok and self.l0_recovery_ok and self.l1_failure_ok

    def to_json_dict(self) -> dict:
        return {
            "kernel_ok": self.kernel_ok,
            "cone_ok": self.cone_ok,
            "l0_recovery_ok": self.l0_recovery_ok,
            "l1_failure_ok": self.l1_failure_ok,
            "all_ok": self.all_ok,
            "beta_l0": list(self.beta_l0),
            "beta_min_l1": list(self.beta_min_l1),
            "min_l1_norm": self.min_l1_norm,
        }


def counterexample_scenario() -> CounterexampleReport:
    """Deterministic 2x3 design where l1 interpolation fails and l0 succeeds."""
    X = COUNTEREXAMPLE_X
    beta_star = COUNTEREXAMPLE_BETA
    y = X @ beta_star  # noiseless

    delta = np.array([1.0, 1.0 / 3.0, 1.0 / 3.0])
    kernel_ok = bool(np.max(np.abs(X @ delta)) <= 1e-12)
    cone_ok = in_cone(delta, s=1, c0=1.0) and np.count_nonzero(delta) > 2

    l0 = l0_least_squares(X, y, s=1)
    l0_recovery_ok = bool(np.linalg.norm(l0.beta_hat - beta_star) <= 1e-10)

    beta_l1 = min_l1_interpolant(X, y)
    target = np.array([0.0, -1.0 / 3.0, -1.0 / 3.0])
    l1_norm = float(np.abs(beta_l1).sum())
    l1_failure_ok = bool(
        np.max(np.abs(beta_l1 - target)) <= 1e-6 and abs(l1_norm - 2.0 / 3.0) <= 1e-6
    )

    return CounterexampleReport(
        kernel_ok=kernel_ok,
        cone_ok=bool(cone_ok),
        l0_recovery_ok=l0_recovery_ok,
        l1_failure_ok=l1_failure_ok,
        beta_l0=tuple(l0.beta_hat),
        beta_min_l1=tuple(beta_l1),
        min_l1_norm=l1_norm,
    )


# ---------------------------------------------------------------------------
# sequence-model rate experiment
# ---------------------------------------------------------------------------


def corollary1_experiment(
    n_grid: Sequence[int],
    tau: float,
    ball: BallSpec,
    trials_per_cell: int = 40,
    seed_root: int = 0,
) -> RateFitResult:
    """Sequence-model risk slope against (2 log n) / n.

    Spikes are placed at the detection threshold tau sqrt(2 log n / n): with
    constant large spikes the risk decays parametrically at 1/n and the
    log-factor the theory predicts would be invisible.  Only the certified
    q = 0 and q = 1 estimators are allowed.
    """
    if ball.q not in (0.0, 1.0):
        raise ParameterError("only the certified q = 0 and q = 1 estimators run here")
    if len(n_grid) < 3:
        raise ParameterError(f"need at least 3 grid points, got {len(n_grid)}")
    records = []
    for n in n_grid:
        magnitude = tau * math.sqrt(2.0 * math.log(n) / n)
        for trial in range(trials_per_cell):
            seed = derive_seed(seed_root, n, n, trial)
            inst = sequence_model_instance(n, tau, ball, seed=seed,
                                           magnitude=magnitude)
            if ball.q == 0.0:
                result = l0_least_squares(inst.X, inst.y, ball.s)
            else:
                result = l1_constrained_ls(inst.X, inst.y, ball.radius)
            l2 = loss(LossSpec.l2(), None, result.beta_hat, inst.beta_star)
            records.append(TrialRecord(n=n, d=n, trial=trial, seed=seed,
                                       losses={"l2": l2},
                                       objective_ok=True, wall_ms=0.0))

    by_cell: dict = {}
    for rec in records:
        by_cell.setdefault(rec.n, []).append(rec.losses["l2"])
    xs, ys, cells = [], [], []
    for n in sorted(by_cell):
        vals = np.array(by_cell[n])
        trimmed = _trimmed_mean(vals)
        xs.append(math.log(2.0 * math.log(n) / n))
        ys.append(math.log(trimmed))
        cells.append((n, n, 2.0 * math.log(n) / n, trimmed, float(vals.mean())))
    slope, intercept = np.polyfit(xs, ys, 1)
    fitted = slope * np.array(xs) + intercept
    resid = np.array(ys) - fitted
    total = np.array(ys) - np.mean(ys)
    r_squared = 1.0 - float(resid @ resid) / float(total @ total)
    return RateFitResult(slope=float(slope), intercept=float(intercept),
                         r_squared=r_squared, n_points=len(xs), loss_kind="l2",
                         theoretical_slope=1.0 - ball.q / 2.0,
                         predictor="two_logn_over_n", cells=tuple(cells))


# ---------------------------------------------------------------------------
# persistence
# ---------------------------------------------------------------------------

CSV_HEADER = "n,d,trial,seed,loss_l2,loss_pred,objective_ok,wall_ms"


def persist(obj, path, format: str = "csv",
            config_hash_value: Optional[str] = None,
            seed_root: Optional[int] = None) -> None:
    """Write records, diagnostics, or fit results to CSV or JSON.

    Every file starts with (or embeds) the config hash and root seed; JSON
    output round-trips losslessly through ``load_records``.
    """
    path = str(path)
    if isinstance(obj, ExperimentRun):
        _persist_records(obj.records, path, format, obj.config_hash, obj.seed_root,
                         obj.excluded_cells)
        return
    if isinstance(obj, (list, tuple)) and (not obj or isinstance(obj[0], TrialRecord)):
        _persist_records(list(obj), path, format,
                         config_hash_value or "none",
                         seed_root if seed_root is not None else -1, [])
        return
    if hasattr(obj, "to_json_dict"):
        doc = obj.to_json_dict()
        if format == "json":
            with open(path, "w") as fh:
                json.dump(doc, fh, sort_keys=True)
        elif format == "csv":
            flat = {k: v for k, v in doc.items() if not isinstance(v, (list, dict))}
            with open(path, "w") as fh:
                fh.write(",".join(flat.keys()) + "\n")
                fh.write(",".join(str(v) for v in flat.values()) + "\n")
        else:
            raise ParameterError(f"unknown format {format!r}")
        return
    raise ParameterError(f"cannot persist object of type {type(obj).__name__}")


def _record_row(rec: TrialRecord) -> list:
    extras = {k: v for k, v in rec.losses.items() if k not in ("l2", "pred")}
    row = [rec.n, rec.d, rec.trial, rec.seed,
           repr(rec.losses.get("l2", float("nan"))),
           repr(rec.losses.get("pred", float("nan"))),
           rec.objective_ok, repr(rec.wall_ms)]
    row.extend(repr(extras[k]) for k in sorted(extras))
    return row


def _persist_records(records, path, format, hash_value, seed_root, excluded) -> None:
    if format == "csv":
        extra_keys = sorted({k for r in records for k in r.losses
                             if k not in ("l2", "pred")})
        header = CSV_HEADER + "".join(f",loss_{k}" for k in extra_keys)
        with open(path, "w") as fh:
            fh.write(f"# config={hash_value} seed_root={seed_root}\n")
            fh.write(header + "\n")
            for rec in records:
                fh.write(",".join(str(v) for v in _record_row(rec)) + "\n")
    elif format == "json":
        doc = {
            "config_hash": hash_value,
            "seed_root": seed_root,
            "excluded_cells": [list(c) for c in excluded],
            "records": [
                {
                    "n": rec.n, "d": rec.d, "trial": rec.trial, "seed": rec.seed,
                    "losses": rec.losses, "objective_ok": rec.objective_ok,
                    "wall_ms": rec.wall_ms,
                }
                for rec in records
            ],
        }
        with open(path, "w") as fh:
            json.dump(doc, fh, sort_keys=True)
    else:
        raise ParameterError(f"unknown format {format!r}")


def load_records(path) -> ExperimentRun:
    """Inverse of ``persist(..., format='json')`` for records."""
    with open(path) as fh:
        doc = json.load(fh)
    records = [
        TrialRecord(n=item["n"], d=item["d"], trial=item["trial"], seed=item["seed"],
                    losses=item["losses"], objective_ok=item["objective_ok"],
                    wall_ms=item["wall_ms"])
        for item in doc["records"]
    ]
    return ExperimentRun(records=records,
                         excluded_cells=[tuple(c) for c in doc.get("excluded_cells", [])],
                         config_hash=doc["config_hash"], seed_root=doc["seed_root"])


# ---------------------------------------------------------------------------
# plotting (static SVG, no dependencies)
# ---------------------------------------------------------------------------


def plot_fit_svg(fit: RateFitResult, path) -> None:
    """Scatter of log cell means with the fitted line, as a standalone SVG."""
    xs = [math.log(c[2]) for c in fit.cells]
    ys = [math.log(c[3]) for c in fit.cells]
    x0, x1 = min(xs), max(xs)
    y0, y1 = min(ys), max(ys)
    pad_x = 0.05 * (x1 - x0 or 1.0)
    pad_y = 0.05 * (y1 - y0 or 1.0)
    x0, x1, y0, y1 = x0 - pad_x, x1 + pad_x, y0 - pad_y, y1 + pad_y
    width, height, margin = 480, 360, 45

    def sx(x):
        return margin + (x - x0) / (x1 - x0) * (width - 2 * margin)

    def sy(y):
        return height - margin - (y - y0) / (y1 - y0) * (height - 2 * margin)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<line x1="{margin}" y1="{height - margin}" x2="{width - margin}" '
        f'y2="{height - margin}" stroke="black"/>',
        f'<line x1="{margin}" y1="{margin}" x2="{margin}" '
        f'y2="{height - margin}" stroke="black"/>',
    ]
    for x, y in zip(xs, ys):
        parts.append(f'<circle cx="{sx(x):.2f}" cy="{sy(y):.2f}" r="4" fill="steelblue"/>')
    ya = fit.slope * x0 + fit.intercept
    yb = fit.slope * x1 + fit.intercept
    parts.append(
        f'<line x1="{sx(x0):.2f}" y1="{sy(ya):.2f}" x2="{sx(x1):.2f}" '
        f'y2="{sy(yb):.2f}" stroke="crimson" stroke-width="1.5"/>'
    )
    parts.append(
        f'<text x="{margin}" y="{margin - 12}" font-size="13">'
        f'log {fit.loss_kind} risk vs log {fit.predictor}: slope {fit.slope:.3f} '
        f'(theory {fit.theoretical_slope:.2f}), r^2 {fit.r_squared:.3f}</text>'
    )
    parts.append("</svg>")
    with open(str(path), "w") as fh:
        fh.write("\n".join(parts))
