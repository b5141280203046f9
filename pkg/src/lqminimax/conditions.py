"""Design-matrix diagnostics.

Measures the constants that drive the theory: maximum normalized column
norm, extreme singular values over all 2s-column submatrices, the restricted
eigenvalue over the comparison cone, triviality of the kernel on sparse
vectors, kernel diameter inside an lq-ball, and a Monte Carlo check of the
two-sided curvature bounds for correlated Gaussian row ensembles.

Exact minimization over the cone is nonconvex; anything sampled is tagged as
an upper estimate and never presented as a certificate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations
from typing import Optional

import numpy as np
from scipy.linalg import null_space

from .errors import ConsistencyError, DimensionError, EnumerationBudgetError, ParameterError
from .linmodel import BallSpec, DesignSpec, symmetric_sqrt

__all__ = [
    "REParams",
    "REEstimate",
    "DesignDiagnostics",
    "Prop1Report",
    "column_norm_constant",
    "sparse_spectrum",
    "sparse_min_singular",
    "re_constant",
    "kernel_trivial_zero",
    "kernel_diameter",
    "verify_prop1",
    "prop1_margins",
    "ident_consistency",
    "diagnose",
    "in_cone",
]

SUBMATRIX_ENUMERATION_BUDGET = 1_000_000
_CHUNK = 50_000

# tail/head mass ratios used to build cone samples; fixed so the admitted
# candidate set only grows with c0, making the sampled estimate monotone
_TAIL_RATIO_GRID = (0.0, 0.25, 0.5, 1.0, 2.0, 4.0, 8.0)


# ---------------------------------------------------------------------------
# column normalization
# ---------------------------------------------------------------------------


def column_norm_constant(X: np.ndarray) -> float:
    """max_j ||X_j||_2 / sqrt(n)."""
    X = np.asarray(X, dtype=float)
    if X.size == 0:
        raise DimensionError("empty design")
    return float(np.linalg.norm(X, axis=0).max() / np.sqrt(X.shape[0]))


# ---------------------------------------------------------------------------
# sparse spectrum
# ---------------------------------------------------------------------------


def _support_singular_values(X: np.ndarray, level: int):
    """Yield (supports_chunk, singular_values_chunk) over all size-``level`` supports.

    Works on the R factor of X = QR, which shares singular values with X and
    keeps the batched SVDs small.
    """
    n, d = X.shape
    count = math.comb(d, level)
    if count > SUBMATRIX_ENUMERATION_BUDGET:
        raise EnumerationBudgetError(
            f"C({d},{level}) = {count} submatrices exceeds the budget "
            f"{SUBMATRIX_ENUMERATION_BUDGET}; use a sampled mode"
        )
    r_factor = np.linalg.qr(X, mode="r")
    combos = combinations(range(d), level)
    while True:
        chunk = []
        for _ in range(_CHUNK):
            nxt = next(combos, None)
            if nxt is None:
                break
            chunk.append(nxt)
        if not chunk:
            return
        supports = np.array(chunk, dtype=np.intp)
        sub = r_factor[:, supports]  # (rows, m, level)
        sub = np.moveaxis(sub, 1, 0)  # (m, rows, level)
        svals = np.linalg.svd(sub, compute_uv=False)
        yield supports, svals


def sparse_spectrum(X: np.ndarray, s: int) -> tuple[float, float]:
    """Extreme singular values of X_S / sqrt(n) over all supports |S| = 2s.

    Equals the min and max of ||X theta||_2 / (sqrt(n) ||theta||_2) over
    2s-sparse theta.  Exact; raises when C(d, 2s) exceeds the budget.
    """
    X = np.asarray(X, dtype=float)
    n, d = X.shape
    level = 2 * s
    if not 1 <= s or level > d:
        raise ParameterError(f"need 1 <= 2s <= d, got s={s}, d={d}")
    kappa_l = math.inf
    kappa_u = 0.0
    rank_limited = level > min(n, d)
    for _, svals in _support_singular_values(X, level):
        kappa_u = max(kappa_u, float(svals.max()))
        kappa_l = min(kappa_l, float(svals.min()))
    if rank_limited:
        kappa_l = 0.0  # fewer rows than columns forces a null direction
    sqrt_n = math.sqrt(n)
    return max(kappa_l, 0.0) / sqrt_n, kappa_u / sqrt_n


def sparse_min_singular(X: np.ndarray, level: int) -> float:
    """min over supports |S| = level of sigma_min(X_S) / sqrt(n)."""
    X = np.asarray(X, dtype=float)
    n, d = X.shape
    if not 1 <= level <= d:
        raise ParameterError(f"need 1 <= level <= d, got {level}")
    if level > min(n, d):
        return 0.0
    worst = math.inf
    for _, svals in _support_singular_values(X, level):
        worst = min(worst, float(svals.min()))
    return max(worst, 0.0) / math.sqrt(n)


def kernel_trivial_zero(X: np.ndarray, s: int) -> bool:
    """True iff every n x 2s submatrix has full column rank.

    Rank is judged on singular values with a 1e-10 relative cutoff per
    submatrix.  2s > n forces rank deficiency, hence False.
    """
    X = np.asarray(X, dtype=float)
    n, d = X.shape
    level = 2 * s
    if level > d:
        raise ParameterError(f"need 2s <= d, got s={s}, d={d}")
    if level > n:
        return False
    for _, svals in _support_singular_values(X, level):
        if np.any(svals[:, -1] <= 1e-10 * svals[:, 0]):
            return False
    return True


# ---------------------------------------------------------------------------
# restricted eigenvalue over the comparison cone
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class REParams:
    s: int
    c0: float

    def __post_init__(self):
        if self.s < 1 or self.s != int(self.s):
            raise ParameterError(f"s must be a positive integer, got {self.s}")
        if self.c0 < 0:
            raise ParameterError(f"c0 must be nonnegative, got {self.c0}")


@dataclass(frozen=True)
class REEstimate:
    value: float
    method: str  # "exact_tiny" or "sampled_upper"

    def __float__(self):
        return self.value


def in_cone(theta: np.ndarray, s: int, c0: float, rtol: float = 1e-12) -> bool:
    """Tail l1-mass dominated by the top-s mass: sum_{j>s} |t_(j)| <= c0 sum_{j<=s} |t_(j)|."""
    a = np.sort(np.abs(np.asarray(theta, dtype=float)))[::-1]
    head = a[:s].sum()
    tail = a[s:].sum()
    return tail <= c0 * head + rtol * max(head, 1.0)


def _scale_tail(theta: np.ndarray, s: int, ratio: float) -> np.ndarray:
    """Rescale the tail coordinates so tail mass = ratio * head mass."""
    a = np.abs(theta)
    order = np.argsort(a)[::-1]
    head = a[order[:s]].sum()
    tail = a[order[s:]].sum()
    out = theta.astype(float).copy()
    if tail == 0.0:
        return out
    out[order[s:]] *= ratio * head / tail
    return out


def _ratio(X: np.ndarray, theta: np.ndarray) -> float:
    nrm = np.linalg.norm(theta)
    if nrm == 0.0:
        return math.inf
    return float(np.linalg.norm(X @ theta) / (math.sqrt(X.shape[0]) * nrm))


def _corner_directions(X: np.ndarray, s: int, budget: int = 5000):
    """Bottom singular directions of every s-column submatrix (cone corners).

    These realize the exact minimum of the ratio over s-sparse vectors, so a
    sampled estimate that includes them is never above that minimum.
    """
    n, d = X.shape
    if math.comb(d, s) > budget:
        return
    for support in combinations(range(d), s):
        sub = X[:, support]
        _, _, vt = np.linalg.svd(sub, full_matrices=False)
        theta = np.zeros(d)
        theta[list(support)] = vt[-1]
        yield theta


def _cone_samples(X: np.ndarray, params: REParams, n_samples: int, seed: int):
    d = X.shape[1]
    rng = np.random.default_rng(seed)
    yield from _corner_directions(X, params.s)
    for _ in range(n_samples):
        z = rng.standard_normal(d)
        if in_cone(z, params.s, params.c0):
            yield z
        for ratio in _TAIL_RATIO_GRID:
            if ratio <= params.c0:
                yield _scale_tail(z, params.s, ratio)


def re_constant(
    X: np.ndarray,
    params: REParams,
    mode: str = "sampled",
    n_samples: int = 2000,
    seed: int = 0,
) -> REEstimate:
    """Estimate kappa(X, c0) = min of ||X t||_2 / (sqrt(n) ||t||_2) over the cone.

    ``sampled`` minimizes over cone corners plus random directions whose tail
    mass is rescaled onto a fixed ratio grid; the admitted set only grows
    with c0, so estimates are monotone on a shared seed.  The result is an
    upper estimate of the true constant, tagged ``sampled_upper``.

    ``exact_tiny`` (d <= 12) additionally certifies zero through kernel
    directions lying in the cone and polishes the best candidates by local
    perturbation with a decaying radius.
    """
    if mode not in ("sampled", "exact_tiny"):
        raise ParameterError(f"unknown mode {mode!r}")
    X = np.asarray(X, dtype=float)
    n, d = X.shape
    if params.s >= d:
        # the cone is all of R^d: no tail coordinates exist
        smin = np.linalg.svd(X, compute_uv=False)[-1]
        method = "exact_tiny" if mode == "exact_tiny" else "sampled_upper"
        return REEstimate(float(smin) / math.sqrt(n), method)

    if mode == "exact_tiny":
        if d > 12:
            raise ParameterError(f"exact_tiny mode is limited to d <= 12, got d={d}")
        zero_dir = _kernel_cone_direction(X, params)
        if zero_dir is not None:
            return REEstimate(0.0, "exact_tiny")

    best = math.inf
    best_theta = None
    for theta in _cone_samples(X, params, n_samples, seed):
        val = _ratio(X, theta)
        if val < best:
            best, best_theta = val, theta

    if mode == "exact_tiny" and best_theta is not None:
        best, best_theta = _polish(X, params, best_theta, best, seed)
        return REEstimate(best, "exact_tiny")
    return REEstimate(best, "sampled_upper")


def _kernel_cone_direction(X: np.ndarray, params: REParams) -> Optional[np.ndarray]:
    basis = null_space(X, rcond=1e-10)
    if basis.shape[1] == 0:
        return None
    candidates = [basis[:, j] for j in range(basis.shape[1])]
    rng = np.random.default_rng(12345)
    for _ in range(512):
        g = rng.standard_normal(basis.shape[1])
        candidates.append(basis @ g)
    for v in candidates:
        for signed in (v, -v):
            if np.linalg.norm(signed) > 0 and in_cone(signed, params.s, params.c0):
                return signed
    return None


def _polish(X, params, theta, value, seed, rounds: int = 400):
    rng = np.random.default_rng(seed + 1)
    theta = theta / np.linalg.norm(theta)
    radius = 0.5
    for k in range(rounds):
        cand = theta + radius * rng.standard_normal(len(theta))
        # restore cone membership by clipping the tail mass
        a = np.sort(np.abs(cand))[::-1]
        head, tail = a[: params.s].sum(), a[params.s:].sum()
        if tail > params.c0 * head:
            cand = _scale_tail(cand, params.s, params.c0)
        val = _ratio(X, cand)
        if val < value:
            value, theta = val, cand / np.linalg.norm(cand)
        radius = max(radius * 0.98, 1e-8)
    return value, theta


# ---------------------------------------------------------------------------
# kernel diameter
# ---------------------------------------------------------------------------


def kernel_diameter(
    X: np.ndarray,
    ball: BallSpec,
    p: float = 2.0,
    n_samples: int = 2000,
    seed: int = 0,
) -> float:
    """Lower estimate of the largest lp-norm of a kernel element inside the ball.

    Exactly 0 for a trivial kernel.  For q = 0 the set B_0(s) is a cone, so
    the diameter is either 0 or infinite; the decision is made on the
    difference set B_0(2s) (two s-sparse vectors are indistinguishable iff
    their difference is annihilated), matching the sparse-recovery
    criterion.  For q > 0, kernel directions are sampled and rescaled to the
    ball boundary.
    """
    X = np.asarray(X, dtype=float)
    if ball.q == 0.0:
        return 0.0 if kernel_trivial_zero(X, ball.s) else math.inf
    basis = null_space(X, rcond=1e-10)
    if basis.shape[1] == 0:
        return 0.0
    rng = np.random.default_rng(seed)
    candidates = [basis[:, j] for j in range(basis.shape[1])]
    for _ in range(n_samples):
        candidates.append(basis @ rng.standard_normal(basis.shape[1]))
    best = 0.0
    for v in candidates:
        qmass = float(np.sum(np.abs(v) ** ball.q))
        if qmass == 0.0:
            continue
        scale = (ball.radius / qmass) ** (1.0 / ball.q)
        best = max(best, float(np.sum(np.abs(scale * v) ** p) ** (1.0 / p)))
    return best


# ---------------------------------------------------------------------------
# random-design curvature bounds
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Prop1Report:
    lower_violations: int
    upper_violations: int
    n_checks: int
    lower_margin_min: float
    upper_margin_min: float


def prop1_margins(X: np.ndarray, sigma_cov: np.ndarray, v: np.ndarray) -> tuple[float, float]:
    """Margins of the two-sided curvature bounds at one direction v.

    lower margin: ||Xv||/sqrt(n) - (||S^{1/2}v||/2 - 6 sqrt(rho log d / n) ||v||_1);
    upper margin: (3||S^{1/2}v|| + 6 sqrt(rho log d / n) ||v||_1) - ||Xv||/sqrt(n).
    Nonnegative margins mean the bounds hold.
    """
    X = np.asarray(X, dtype=float)
    n, d = X.shape
    root = symmetric_sqrt(np.asarray(sigma_cov, dtype=float))
    rho = float(np.max(np.diag(sigma_cov)))
    coef = 6.0 * math.sqrt(rho * math.log(d) / n)
    v = np.asarray(v, dtype=float)
    xv = float(np.linalg.norm(X @ v)) / math.sqrt(n)
    sv = float(np.linalg.norm(root @ v))
    l1 = float(np.abs(v).sum())
    return xv - (0.5 * sv - coef * l1), (3.0 * sv + coef * l1) - xv


def verify_prop1(
    spec: DesignSpec,
    n_draws: int = 10,
    n_directions: int = 1000,
    seed: int = 0,
) -> Prop1Report:
    """Monte Carlo check of the curvature bounds for N(0, Sigma) row designs.

    Draws fresh designs and random directions (dense Gaussian, sparse, and
    coordinate vectors) and counts violations of either bound.
    """
    if spec.kind == "standard_gaussian":
        sigma_cov = np.eye(spec.d)
    elif spec.kind == "correlated_gaussian":
        sigma_cov = np.asarray(spec.sigma_cov, dtype=float)
    else:
        raise ParameterError("verify_prop1 needs a Gaussian row ensemble")
    n, d = spec.n, spec.d
    root = symmetric_sqrt(sigma_cov)
    rho = float(np.max(np.diag(sigma_cov)))
    coef = 6.0 * math.sqrt(rho * math.log(d) / n)

    rng = np.random.default_rng(seed)
    lower_viol = upper_viol = checks = 0
    lower_margin = upper_margin = math.inf
    for _ in range(n_draws):
        X = rng.standard_normal((n, d)) @ root
        dirs = _direction_batch(rng, d, n_directions)
        xv = np.linalg.norm(X @ dirs.T, axis=0) / math.sqrt(n)
        sv = np.linalg.norm(root @ dirs.T, axis=0)
        l1 = np.abs(dirs).sum(axis=1)
        low = xv - (0.5 * sv - coef * l1)
        up = (3.0 * sv + coef * l1) - xv
        lower_viol += int(np.count_nonzero(low < -1e-12))
        upper_viol += int(np.count_nonzero(up < -1e-12))
        checks += len(dirs)
        lower_margin = min(lower_margin, float(low.min()))
        upper_margin = min(upper_margin, float(up.min()))
    return Prop1Report(
        lower_violations=lower_viol,
        upper_violations=upper_viol,
        n_checks=checks,
        lower_margin_min=lower_margin,
        upper_margin_min=upper_margin,
    )


def _direction_batch(rng: np.random.Generator, d: int, count: int) -> np.ndarray:
    """Half dense Gaussian, a quarter sparse, a quarter coordinate directions."""
    n_dense = count - count // 4 - count // 4
    dense = rng.standard_normal((n_dense, d))
    sparse = np.zeros((count // 4, d))
    for row in sparse:
        support = rng.choice(d, size=rng.integers(1, 4), replace=False)
        row[support] = rng.standard_normal(len(support))
    coords = np.zeros((count // 4, d))
    cols = rng.integers(0, d, size=count // 4)
    coords[np.arange(count // 4), cols] = rng.choice((-1.0, 1.0), size=count // 4)
    return np.vstack([dense, sparse, coords])


# ---------------------------------------------------------------------------
# identifiability consistency and combined diagnostics
# ---------------------------------------------------------------------------


def ident_consistency(kappa_l: float, f_l_value: float, diam2_estimate: float) -> bool:
    """Check diam_2 <= f_l / kappa_l, the curvature-to-identifiability link."""
    if kappa_l == 0.0:
        raise ConsistencyError("kappa_l = 0 makes the identifiability bound vacuous")
    return diam2_estimate <= f_l_value / kappa_l + 1e-10


@dataclass
class DesignDiagnostics:
    """Measured design constants at a given sparsity level."""

    kappa_c: float
    kappa_l: float
    kappa_u: float
    re_constant: float
    re_method: str
    kernel_trivial: bool
    diam2_estimate: float
    f_l_name: str = "zero"
    f_l_value: float = 0.0

    def to_json_dict(self) -> dict:
        return {
            "kappa_c": self.kappa_c,
            "kappa_l": self.kappa_l,
            "kappa_u": self.kappa_u,
            "re_constant": self.re_constant,
            "re_method": self.re_method,
            "kernel_trivial": self.kernel_trivial,
            "diam2_estimate": self.diam2_estimate,
            "f_l_name": self.f_l_name,
            "f_l_value": self.f_l_value,
        }


def diagnose(
    X: np.ndarray,
    s: int,
    c0: float = 3.0,
    ball: Optional[BallSpec] = None,
    n_samples: int = 2000,
    seed: int = 0,
    f_l_name: str = "zero",
    f_l_value: float = 0.0,
) -> DesignDiagnostics:
    """Measure every design constant at sparsity level s (spectrum at 2s)."""
    X = np.asarray(X, dtype=float)
    if ball is None:
        ball = BallSpec(q=0.0, radius=float(s))
    kappa_l, kappa_u = sparse_spectrum(X, s)
    mode = "exact_tiny" if X.shape[1] <= 12 else "sampled"
    re = re_constant(X, REParams(s=s, c0=c0), mode=mode, n_samples=n_samples, seed=seed)
    return DesignDiagnostics(
        kappa_c=column_norm_constant(X),
        kappa_l=kappa_l,
        kappa_u=kappa_u,
        re_constant=re.value,
        re_method=re.method,
        kernel_trivial=kernel_trivial_zero(X, s),
        diam2_estimate=kernel_diameter(X, ball, p=2.0, n_samples=n_samples, seed=seed),
        f_l_name=f_l_name,
        f_l_value=f_l_value,
    )
