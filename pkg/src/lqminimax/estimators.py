"""Constrained least-squares estimators over lq-balls, plus the Lasso.

q = 0 is solved exactly by support enumeration, q = 1 by projected gradient
with a Frank-Wolfe duality-gap certificate, q in (0, 1) by multi-start
projected gradient with a feasibility heuristic (no global guarantee; use an
oracle warm start in simulations), and the Lasso by cyclic coordinate
descent.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations, islice
from typing import Optional, Sequence

import numpy as np

from .ballgeom import ball_contains, project_l1, project_lq_heuristic
from .errors import DimensionError, EnumerationBudgetError, ParameterError
from .linmodel import BallSpec, ProblemInstance

__all__ = [
    "EstimateResult",
    "BasicInequalityCheck",
    "l0_least_squares",
    "l1_constrained_ls",
    "lq_constrained_ls",
    "lasso",
    "check_basic_inequality",
    "sigma_max_power_iteration",
]

L0_ENUMERATION_BUDGET = 10_000_000
_ENUM_CHUNK = 200_000


@dataclass
class EstimateResult:
    """Solver output: estimate, residual objective ||y - X bhat||_2^2, and flags."""

    beta_hat: np.ndarray
    objective: float
    support: tuple
    iterations: int
    converged: bool
    feasible: bool
    info: dict = field(default_factory=dict)

    def to_json_dict(self) -> dict:
        return {
            "beta_hat": self.beta_hat.tolist(),
            "objective": self.objective,
            "support": list(self.support),
            "iterations": self.iterations,
            "converged": self.converged,
            "feasible": self.feasible,
            "info": {k: v for k, v in self.info.items() if _json_ok(v)},
        }


def _json_ok(v) -> bool:
    return isinstance(v, (int, float, bool, str, list, tuple, type(None)))


def sigma_max_power_iteration(X: np.ndarray, rel_tol: float = 1e-6,
                              max_iter: int = 500, seed: int = 0) -> float:
    """Largest singular value of X by power iteration on X^T X."""
    X = np.asarray(X, dtype=float)
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(X.shape[1])
    v /= np.linalg.norm(v)
    prev = 0.0
    for _ in range(max_iter):
        u = X.T @ (X @ v)
        norm = np.linalg.norm(u)
        if norm == 0.0:
            return 0.0
        v = u / norm
        if abs(norm - prev) <= rel_tol * norm:
            break
        prev = norm
    return float(np.sqrt(norm))


# ---------------------------------------------------------------------------
# exact l0 least squares
# ---------------------------------------------------------------------------


def _scalar_identity_factor(X: np.ndarray) -> Optional[float]:
    """c such that X == c * I, or None."""
    n, d = X.shape
    if n != d:
        return None
    diag = np.diagonal(X)
    c = diag[0]
    if c == 0.0 or not np.all(diag == c):
        return None
    if np.count_nonzero(X) != n:
        return None
    return float(c)


def _l0_identity(X: np.ndarray, y: np.ndarray, s: int, c: float) -> EstimateResult:
    # for X = c*I the global optimum keeps the s largest |y_i|; lexsort's
    # secondary index key gives the lexicographically smallest tied support
    d = len(y)
    order = np.lexsort((np.arange(d), -np.abs(y)))
    support = np.sort(order[:s])
    beta = np.zeros(d)
    beta[support] = y[support] / c
    resid = y.copy()
    resid[support] = 0.0
    return EstimateResult(
        beta_hat=beta,
        objective=float(resid @ resid),
        support=tuple(int(j) for j in np.flatnonzero(beta)),
        iterations=1,
        converged=True,
        feasible=True,
        info={"method": "l0_identity"},
    )


def l0_least_squares(X: np.ndarray, y: np.ndarray, s: int) -> EstimateResult:
    """Exact least squares over the l0-ball: min ||y - X b||_2^2 s.t. ||b||_0 <= s.

    Enumerates every size-s support in lexicographic order and solves the
    normal equations on each (minimum-norm via SVD with 1e-12 relative cutoff
    when a submatrix is rank deficient); ties go to the lexicographically
    smallest support.  Scalar multiples of the identity take an exact
    top-s shortcut instead, which makes sequence-model sizes feasible.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    n, d = X.shape
    if y.shape != (n,):
        raise DimensionError(f"y has shape {y.shape}, expected ({n},)")
    if not 1 <= s <= d:
        raise ParameterError(f"need 1 <= s <= d, got s={s}, d={d}")

    c = _scalar_identity_factor(X)
    if c is not None:
        return _l0_identity(X, y, s, c)

    n_supports = math.comb(d, s)
    if n_supports > L0_ENUMERATION_BUDGET:
        raise EnumerationBudgetError(
            f"C({d},{s}) = {n_supports} supports exceeds the "
            f"budget {L0_ENUMERATION_BUDGET}"
        )

    gram = X.T @ X
    corr = X.T @ y
    yy = float(y @ y)

    best_obj = math.inf
    best_support: Optional[np.ndarray] = None
    combos = combinations(range(d), s)
    examined = 0
    while True:
        chunk = np.array(list(islice(combos, _ENUM_CHUNK)), dtype=np.intp)
        if chunk.size == 0:
            break
        examined += chunk.shape[0]
        resid = _chunk_residuals(X, y, gram, corr, yy, chunk)
        k = int(np.argmin(resid))
        if resid[k] < best_obj:
            best_obj = float(resid[k])
            best_support = chunk[k]

    support = best_support
    b, *_ = np.linalg.lstsq(X[:, support], y, rcond=1e-12)
    beta = np.zeros(d)
    beta[support] = b
    r = y - X[:, support] @ b
    return EstimateResult(
        beta_hat=beta,
        objective=float(r @ r),
        support=tuple(int(j) for j in np.flatnonzero(beta)),
        iterations=examined,
        converged=True,
        feasible=True,
        info={"method": "l0_enumeration", "n_supports": examined},
    )


def _chunk_residuals(X, y, gram, corr, yy, supports) -> np.ndarray:
    """Residual ||y - X_S b_S||^2 for every support row, via the Gram matrix."""
    g_ss = gram[supports[:, :, None], supports[:, None, :]]
    c_s = corr[supports]
    try:
        sol = np.linalg.solve(g_ss, c_s[..., None])[..., 0]
        if not np.all(np.isfinite(sol)):
            raise np.linalg.LinAlgError
        resid = yy - np.einsum("ms,ms->m", c_s, sol)
        if resid.min() < -1e-8 * max(yy, 1.0):
            raise np.linalg.LinAlgError  # cancellation blew up; redo carefully
    except np.linalg.LinAlgError:
        resid = np.empty(supports.shape[0])
        for i, sup in enumerate(supports):
            b, *_ = np.linalg.lstsq(X[:, sup], y, rcond=1e-12)
            r = y - X[:, sup] @ b
            resid[i] = r @ r
    return np.maximum(resid, 0.0)


# ---------------------------------------------------------------------------
# l1-constrained least squares (projected gradient, certified)
# ---------------------------------------------------------------------------


def l1_constrained_ls(
    X: np.ndarray,
    y: np.ndarray,
    r1: float,
    max_iter: int = 20_000,
    tol: float = 1e-8,
    start: Optional[np.ndarray] = None,
    record_trace: bool = False,
) -> EstimateResult:
    """Projected gradient for min ||y - X b||_2^2 subject to ||b||_1 <= r1.

    Steps 1/L along the half-quadratic gradient with L the largest squared
    singular value (power iteration), so the objective never increases.
    Convergence is certified by the Frank-Wolfe duality gap of the full
    objective: at exit with converged=True the objective is within tol of
    the constrained optimum.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    if r1 <= 0:
        raise ParameterError(f"r1 must be positive, got {r1}")
    # power iteration approaches sigma_max from below; pad so 1/L never overshoots
    lip = (sigma_max_power_iteration(X) * (1.0 + 1e-5)) ** 2
    beta = np.zeros(X.shape[1]) if start is None else project_l1(np.asarray(start, float), r1)
    trace = []
    converged = False
    gap = math.inf
    it = 0
    for it in range(1, max_iter + 1):
        r = X @ beta - y
        if record_trace:
            trace.append(float(r @ r))
        grad_half = X.T @ r
        grad = 2.0 * grad_half
        gap = float(grad @ beta + r1 * np.max(np.abs(grad)))
        if gap <= tol:
            converged = True
            break
        if lip == 0.0:
            break
        beta = project_l1(beta - grad_half / lip, r1)
    r = y - X @ beta
    obj = float(r @ r)
    if record_trace:
        trace.append(obj)
    info = {"duality_gap": gap, "lipschitz": lip}
    if record_trace:
        info["objective_trace"] = trace
    return EstimateResult(
        beta_hat=beta,
        objective=obj,
        support=tuple(int(j) for j in np.flatnonzero(beta)),
        iterations=it,
        converged=converged,
        feasible=ball_contains(BallSpec(q=1.0, radius=r1), beta, tol=1e-8),
        info=info,
    )


# ---------------------------------------------------------------------------
# lq-constrained least squares (heuristic, q in (0,1))
# ---------------------------------------------------------------------------


def lq_constrained_ls(
    X: np.ndarray,
    y: np.ndarray,
    ball: BallSpec,
    starts: Sequence[np.ndarray],
    max_iter: int = 2_000,
    tol: float = 1e-9,
) -> EstimateResult:
    """Multi-start projected gradient over the nonconvex ball, q in (0, 1).

    Keeps the best feasible iterate ever visited, including the projected
    starts themselves, so supplying the truth as an oracle warm start
    guarantees an objective no worse than at the truth.  The converged flag
    only reports stationarity of the last run; no global claim is made.
    """
    if not 0.0 < ball.q < 1.0:
        raise ParameterError(f"lq solver requires q in (0, 1), got {ball.q}")
    if len(starts) == 0:
        raise ParameterError("need at least one start")
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    lip = (sigma_max_power_iteration(X) * (1.0 + 1e-5)) ** 2
    step = 1.0 / lip if lip > 0 else 1.0

    best_beta: Optional[np.ndarray] = None
    best_obj = math.inf
    total_iters = 0
    any_stationary = False

    def consider(b: np.ndarray) -> float:
        nonlocal best_beta, best_obj
        r = y - X @ b
        obj = float(r @ r)
        if obj < best_obj:
            best_obj, best_beta = obj, b.copy()
        return obj

    for raw in starts:
        beta = project_lq_heuristic(np.asarray(raw, dtype=float), ball)
        consider(beta)
        for _ in range(max_iter):
            total_iters += 1
            grad_half = X.T @ (X @ beta - y)
            nxt = project_lq_heuristic(beta - step * grad_half, ball)
            consider(nxt)
            if np.max(np.abs(nxt - beta)) <= tol:
                any_stationary = True
                beta = nxt
                break
            beta = nxt

    return EstimateResult(
        beta_hat=best_beta,
        objective=best_obj,
        support=tuple(int(j) for j in np.flatnonzero(best_beta)),
        iterations=total_iters,
        converged=any_stationary,
        feasible=ball_contains(ball, best_beta, tol=1e-8),
        info={"n_starts": len(starts)},
    )


# ---------------------------------------------------------------------------
# lasso
# ---------------------------------------------------------------------------


def _soft(x: float, t: float) -> float:
    return math.copysign(max(abs(x) - t, 0.0), x)


def lasso(
    X: np.ndarray,
    y: np.ndarray,
    lam: float,
    max_iter: int = 10_000,
    tol: float = 1e-10,
    path_steps: int = 50,
) -> EstimateResult:
    """Cyclic coordinate descent for (1/2n)||y - X b||_2^2 + lam ||b||_1.

    Runs pathwise: a geometric ladder of penalties from lam_max down to the
    target, warm-starting each stage (cold starts crawl along flat
    interpolation valleys on underdetermined designs when lam is tiny).
    Each stage, including the final one at exactly ``lam``, exits when the
    largest coordinate change in a sweep is <= tol.  Columns that are
    identically zero are skipped and flagged in info; the KKT residual of
    the final iterate is reported.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    if lam < 0:
        raise ParameterError(f"lambda must be nonnegative, got {lam}")
    n, d = X.shape
    col_sq = np.einsum("ij,ij->j", X, X) / n
    skipped = np.flatnonzero(col_sq == 0.0)
    beta = np.zeros(d)
    resid = y.copy()

    lam_max = float(np.abs(X.T @ y).max()) / n if d else 0.0
    if path_steps > 1 and 0.0 <= lam < lam_max:
        ladder = list(np.geomspace(lam_max, max(lam, lam_max * 1e-10), path_steps))
        if ladder[-1] != lam:
            ladder.append(lam)
    else:
        ladder = [lam]

    converged = False
    total_sweeps = 0
    for stage_lam in ladder:
        converged = False
        for _ in range(max_iter):
            total_sweeps += 1
            max_change = 0.0
            for j in range(d):
                if col_sq[j] == 0.0:
                    continue
                old = beta[j]
                rho = float(X[:, j] @ resid) / n + col_sq[j] * old
                new = _soft(rho, stage_lam) / col_sq[j]
                if new != old:
                    resid += X[:, j] * (old - new)
                    beta[j] = new
                    max_change = max(max_change, abs(new - old))
            if max_change <= tol:
                converged = True
                break

    resid = y - X @ beta  # refresh: the sweep updates accumulate roundoff
    grad = X.T @ resid / n
    kkt = 0.0
    for j in range(d):
        if j in skipped:
            continue
        if beta[j] == 0.0:
            kkt = max(kkt, abs(grad[j]) - lam)
        else:
            kkt = max(kkt, abs(grad[j] - lam * np.sign(beta[j])))
    obj = float(resid @ resid)
    return EstimateResult(
        beta_hat=beta,
        objective=obj,
        support=tuple(int(j) for j in np.flatnonzero(beta)),
        iterations=total_sweeps,
        converged=converged,
        feasible=True,
        info={
            "kkt_residual": max(kkt, 0.0),
            "penalized_objective": obj / (2 * n) + lam * float(np.abs(beta).sum()),
            "skipped_columns": skipped.tolist(),
        },
    )


# ---------------------------------------------------------------------------
# the basic inequality
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BasicInequalityCheck:
    objective_ok: bool
    eqn_basic_ok: bool
    lhs: float
    rhs: float


def check_basic_inequality(instance: ProblemInstance, result: EstimateResult) -> BasicInequalityCheck:
    """Verify estimator non-inferiority at the truth and its consequence.

    objective_ok: ||y - X bhat||^2 <= ||y - X b*||^2 + 1e-8.  eqn_basic_ok:
    ||X delta||^2 / n <= 2 |w^T X delta| / n + 1e-8, with w = y - X b*,
    which follows algebraically whenever objective_ok holds.
    """
    X, y = instance.X, instance.y
    w = y - X @ instance.beta_star
    r_hat = y - X @ result.beta_hat
    objective_ok = float(r_hat @ r_hat) <= float(w @ w) + 1e-8
    delta = result.beta_hat - instance.beta_star
    xd = X @ delta
    n = X.shape[0]
    lhs = float(xd @ xd) / n
    rhs = 2.0 * abs(float(w @ xd)) / n
    return BasicInequalityCheck(
        objective_ok=objective_ok,
        eqn_basic_ok=lhs <= rhs + 1e-8,
        lhs=lhs,
        rhs=rhs,
    )
