"""Closed-form rate and tail bounds, plus exact small-scale suprema oracles.

Each theorem's risk formula is evaluated in log-space.  Constants that the
theory leaves unspecified must be supplied explicitly through the constants
map (pass 1.0 to reproduce the bare shape); the explicit constants 24, 6,
144 and 81 are built in.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations
from typing import Optional

import numpy as np
from scipy.special import gammaln

from .errors import DimensionError, EnumerationBudgetError, ParameterError

__all__ = [
    "RateQuery",
    "FanoParams",
    "ChiSquareTails",
    "LogBinomial",
    "minimax_rate",
    "rate_formula",
    "fano_error_bound",
    "chi_square_tails",
    "sup_correlation_exact",
    "sup_correlation_pred_exact",
    "log_binomial",
    "THEOREMS",
]

SUPPORT_ENUMERATION_BUDGET = 1_000_000

THEOREMS = (
    "T1a", "T1b", "T2a", "T2b_plain", "T2b_sharp",
    "T3a", "T3b", "T4a", "T4b", "Cor1",
)

_FORMULAS = {
    "T1a": "c * max(diam_term, Rq * (sigma^2/kappa_c^2 * log(d)/n)^((p-q)/2))",
    "T1b": "c * max(diam_term, s^(p/2) * (sigma^2/kappa_u^2 * log(d/s)/n)^(p/2))",
    "T2a": "24 * Rq * (kappa_c^2/kappa_l^2 * sigma^2/kappa_l^2 * log(d)/n)^(1-q/2)",
    "T2b_plain": "6 * kappa_c^2/kappa_l^2 * sigma^2/kappa_l^2 * s*log(d)/n",
    "T2b_sharp": "144 * kappa_u^2/kappa_l^2 * sigma^2/kappa_l^2 * s*log(d/s)/n",
    "T3a": "c * Rq * kappa_l^2 * (sigma^2/kappa_c^2 * log(d)/n)^(1-q/2)",
    "T3b": "c * kappa_l^2 * sigma^2/kappa_u^2 * s*log(d/s)/n",
    "T4a": "c * kappa_c^2 * Rq * (sigma^2/kappa_c^2 * log(d)/n)^(1-q/2)",
    "T4b": "81 * sigma^2 * s*log(d/s)/n",
    "Cor1": "c * (2*tau^2*log(n)/n)^(1-q/2)",
}

# theorems whose leading constant the theory never pins down
_NEEDS_CONSTANT = {"T1a", "T1b", "T3a", "T3b", "T4a", "Cor1"}


@dataclass(frozen=True)
class RateQuery:
    """Inputs for one theorem's risk formula.

    ``radius`` is Rq for q > 0 and the integer s for q = 0 theorems; for
    Cor1, ``sigma`` plays the role of tau and n is the sequence length.
    """

    theorem: str
    n: int
    q: float = 0.0
    radius: float = 1.0
    sigma: float = 1.0
    d: Optional[float] = None  # only enters through log d
    kappa_c: Optional[float] = None
    kappa_l: Optional[float] = None
    kappa_u: Optional[float] = None
    p: float = 2.0
    diam_term: float = 0.0
    constants: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.theorem not in THEOREMS:
            raise ParameterError(f"unknown theorem {self.theorem!r}")
        if self.n < 1:
            raise ParameterError("n must be positive")
        if self.sigma <= 0 or self.radius <= 0:
            raise ParameterError("sigma and radius must be positive")


def rate_formula(theorem: str) -> str:
    return _FORMULAS[theorem]


def _need(query: RateQuery, *names: str) -> list[float]:
    vals = []
    for name in names:
        v = getattr(query, name)
        if v is None:
            raise ParameterError(f"{query.theorem} needs parameter {name!r}")
        if name.startswith("kappa") and v <= 0:
            raise ParameterError(f"{name} must be positive, got {v}")
        vals.append(float(v))
    return vals


def _generic_constant(query: RateQuery) -> float:
    if "c" not in query.constants:
        raise ParameterError(
            f"{query.theorem} has an unspecified generic constant; "
            "pass constants={'c': ...} (1.0 reproduces the bare shape)"
        )
    return float(query.constants["c"])


def _pow_log(base_log: float, expo: float) -> float:
    return math.exp(expo * base_log)


def minimax_rate(query: RateQuery) -> float:
    """Evaluate the selected theorem's risk expression.

    Products and powers run in log-space so large-n queries never underflow
    to zero prematurely.
    """
    t = query.theorem
    q, p = query.q, query.p

    if t == "Cor1":
        c = _generic_constant(query)
        tau = query.sigma
        base = math.log(2.0) + 2.0 * math.log(tau) + math.log(math.log(query.n)) - math.log(query.n)
        return c * _pow_log(base, 1.0 - q / 2.0)

    if t == "T1a":
        c = _generic_constant(query)
        (d, kc) = _need(query, "d", "kappa_c")
        base = (2.0 * math.log(query.sigma) - 2.0 * math.log(kc)
                + math.log(math.log(d)) - math.log(query.n))
        entropy_term = math.exp(math.log(query.radius) + (p - q) / 2.0 * base)
        return c * max(query.diam_term, entropy_term)

    if t == "T1b":
        c = _generic_constant(query)
        (d, ku) = _need(query, "d", "kappa_u")
        s = query.radius
        base = (2.0 * math.log(query.sigma) - 2.0 * math.log(ku)
                + math.log(math.log(d / s)) - math.log(query.n))
        entropy_term = math.exp(p / 2.0 * math.log(s) + p / 2.0 * base)
        return c * max(query.diam_term, entropy_term)

    if t == "T2a":
        (d, kc, kl) = _need(query, "d", "kappa_c", "kappa_l")
        base = (2.0 * math.log(kc) - 4.0 * math.log(kl) + 2.0 * math.log(query.sigma)
                + math.log(math.log(d)) - math.log(query.n))
        return 24.0 * query.radius * _pow_log(base, 1.0 - q / 2.0)

    if t == "T2b_plain":
        (d, kc, kl) = _need(query, "d", "kappa_c", "kappa_l")
        s = query.radius
        return 6.0 * math.exp(
            2.0 * math.log(kc) - 4.0 * math.log(kl) + 2.0 * math.log(query.sigma)
            + math.log(s) + math.log(math.log(d)) - math.log(query.n)
        )

    if t == "T2b_sharp":
        (d, ku, kl) = _need(query, "d", "kappa_u", "kappa_l")
        s = query.radius
        return 144.0 * math.exp(
            2.0 * math.log(ku) - 4.0 * math.log(kl) + 2.0 * math.log(query.sigma)
            + math.log(s) + math.log(math.log(d / s)) - math.log(query.n)
        )

    if t == "T3a":
        c = _generic_constant(query)
        (d, kc, kl) = _need(query, "d", "kappa_c", "kappa_l")
        base = (2.0 * math.log(query.sigma) - 2.0 * math.log(kc)
                + math.log(math.log(d)) - math.log(query.n))
        return c * math.exp(math.log(query.radius) + 2.0 * math.log(kl)
                            + (1.0 - q / 2.0) * base)

    if t == "T3b":
        c = _generic_constant(query)
        (d, ku, kl) = _need(query, "d", "kappa_u", "kappa_l")
        s = query.radius
        return c * math.exp(
            2.0 * math.log(kl) + 2.0 * math.log(query.sigma) - 2.0 * math.log(ku)
            + math.log(s) + math.log(math.log(d / s)) - math.log(query.n)
        )

    if t == "T4a":
        c = _generic_constant(query)
        (d, kc) = _need(query, "d", "kappa_c")
        base = (2.0 * math.log(query.sigma) - 2.0 * math.log(kc)
                + math.log(math.log(d)) - math.log(query.n))
        return c * math.exp(2.0 * math.log(kc) + math.log(query.radius)
                            + (1.0 - q / 2.0) * base)

    if t == "T4b":
        (d,) = _need(query, "d")
        s = query.radius
        return 81.0 * math.exp(
            2.0 * math.log(query.sigma) + math.log(s)
            + math.log(math.log(d / s)) - math.log(query.n)
        )

    raise ParameterError(f"unknown theorem {t!r}")


# ---------------------------------------------------------------------------
# Fano arithmetic
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FanoParams:
    """Packing/covering inputs for the hypothesis-testing error bound."""

    delta_n: float
    epsilon_n: float
    log_pack: float
    log_cover: float
    n: int
    sigma: float
    kappa_c: float
    c_route: float = 1.0  # covering-argument constant, unspecified by the theory

    def __post_init__(self):
        if self.log_pack <= 0:
            raise ParameterError(f"log_pack must be positive, got {self.log_pack}")
        if self.delta_n <= 0 or self.epsilon_n <= 0 or self.sigma <= 0:
            raise ParameterError("delta_n, epsilon_n, sigma must be positive")


def fano_error_bound(params: FanoParams) -> float:
    """1 - (log_cover + c n kappa_c^2 eps^2 / sigma^2 + log 2) / log_pack, in [0, 1]."""
    info = (params.log_cover
            + params.c_route * params.n * params.kappa_c**2 * params.epsilon_n**2
            / params.sigma**2)
    value = 1.0 - (info + math.log(2.0)) / params.log_pack
    return min(max(value, 0.0), 1.0)


# ---------------------------------------------------------------------------
# chi-square tails
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ChiSquareTails:
    """Deviation thresholds and their probability bounds for chi^2_m.

    upper: P[Z - m >= 2 sqrt(m x) + 2 x] <= e^{-x};
    lower: P[Z - m <= -2 sqrt(m x)] <= e^{-x};
    simplified (valid for x >= 1): P[(Z - m)/m >= 4 x] <= e^{-m x}.
    """

    upper_threshold: float
    upper_dev_bound: float
    lower_threshold: float
    lower_dev_bound: float
    simplified_threshold: float
    simplified_4t_bound: float
    simplified_valid: bool


def chi_square_tails(m: int, x: float) -> ChiSquareTails:
    if m < 1:
        raise ParameterError(f"degrees of freedom must be >= 1, got {m}")
    if x <= 0:
        raise ParameterError(f"x must be positive, got {x}")
    dev = 2.0 * math.sqrt(m * x)
    return ChiSquareTails(
        upper_threshold=m + dev + 2.0 * x,
        upper_dev_bound=math.exp(-x),
        lower_threshold=m - dev,
        lower_dev_bound=math.exp(-x),
        simplified_threshold=m * (1.0 + 4.0 * x),
        simplified_4t_bound=math.exp(-m * x),
        simplified_valid=x >= 1.0,
    )


# ---------------------------------------------------------------------------
# exact suprema of the noise-design correlation
# ---------------------------------------------------------------------------


def sup_correlation_exact(X: np.ndarray, w: np.ndarray, s: int, r: float) -> float:
    """sup of |w^T X theta| / n over ||theta||_0 <= 2s, ||theta||_2 <= r.

    The support maximization is separable: the supremum equals
    (r/n) sqrt(sum of the 2s largest (X_j^T w)^2), which is the support
    enumeration in closed form.
    """
    X = np.asarray(X, dtype=float)
    w = np.asarray(w, dtype=float)
    if w.shape != (X.shape[0],):
        raise DimensionError(f"w has shape {w.shape}, expected ({X.shape[0]},)")
    if s < 1 or r < 0:
        raise ParameterError("need s >= 1 and r >= 0")
    z_sq = (X.T @ w) ** 2
    k = min(2 * s, X.shape[1])
    top = np.sort(z_sq)[-k:]
    return float(r / X.shape[0] * math.sqrt(top.sum()))


def sup_correlation_pred_exact(X: np.ndarray, w: np.ndarray, s: int, r: float) -> float:
    """sup of |w^T X theta| / n over 2s-sparse theta with ||X theta||_2/sqrt(n) <= r.

    Per support the supremum is r ||P_S w||_2 / sqrt(n) with P_S the
    projection on the column span of X_S; the result maximizes over all
    supports (rank judged at 1e-12 relative).
    """
    X = np.asarray(X, dtype=float)
    w = np.asarray(w, dtype=float)
    n, d = X.shape
    if w.shape != (n,):
        raise DimensionError(f"w has shape {w.shape}, expected ({n},)")
    if s < 1 or r < 0:
        raise ParameterError("need s >= 1 and r >= 0")
    level = min(2 * s, d)
    count = math.comb(d, level)
    if count > SUPPORT_ENUMERATION_BUDGET:
        raise EnumerationBudgetError(
            f"C({d},{level}) = {count} supports exceeds the budget "
            f"{SUPPORT_ENUMERATION_BUDGET}"
        )
    best = 0.0
    for support in combinations(range(d), level):
        sub = X[:, support]
        u, svals, _ = np.linalg.svd(sub, full_matrices=False)
        keep = svals > 1e-12 * (svals[0] if svals.size else 0.0)
        proj_norm_sq = float(np.sum((u[:, keep].T @ w) ** 2))
        best = max(best, proj_norm_sq)
    return float(r * math.sqrt(best) / math.sqrt(n))


# ---------------------------------------------------------------------------
# binomial coefficients
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LogBinomial:
    value: float
    lower: float  # s log(d/s)
    upper: float  # s log(d e / s)


def log_binomial(d: int, s: int) -> LogBinomial:
    """Exact log C(d, s) via log-gamma, with the standard bracketing."""
    if not 0 <= s <= d:
        raise ParameterError(f"need 0 <= s <= d, got s={s}, d={d}")
    value = float(gammaln(d + 1) - gammaln(s + 1) - gammaln(d - s + 1))
    if s == 0:
        return LogBinomial(value=value, lower=0.0, upper=0.0)
    return LogBinomial(
        value=value,
        lower=s * math.log(d / s),
        upper=s * (math.log(d / s) + 1.0),
    )
