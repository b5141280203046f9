"""Evaluate the closed-form rates, Fano arithmetic, and tail bounds.

Lower and upper bounds share their (n, d, radius) shape; the explicit
constants 24, 6, 144, 81 are built in, and every unspecified constant must
be passed explicitly.
"""

import math

import numpy as np

from lqminimax import (
    FanoParams,
    RateQuery,
    chi_square_tails,
    fano_error_bound,
    log_binomial,
    minimax_rate,
    sup_correlation_exact,
)

common = dict(n=400, d=1024, sigma=1.0, kappa_c=1.0, kappa_l=0.8, kappa_u=1.3)

for q, radius in ((0.0, 5.0), (0.5, 2.0), (1.0, 1.0)):
    upper = minimax_rate(RateQuery("T2a", q=q, radius=radius, **common))
    lower = minimax_rate(RateQuery("T1a", q=q, radius=radius,
                                   constants={"c": 1.0}, **common))
    print(f"q={q}: l2 lower {lower:.4f} <= upper {upper:.4f}")

zero = dict(n=400, d=1024, sigma=1.0, q=0.0, radius=5.0)
print("q=0 sharp upper (s log(d/s)/n):",
      minimax_rate(RateQuery("T2b_sharp", kappa_u=1.3, kappa_l=0.8, **zero)))
print("prediction upper, constant 81:",
      minimax_rate(RateQuery("T4b", **zero)))

# the log number of models over the sample size is the q=0 rate's meaning
lb = log_binomial(1024, 5)
print(f"log C(1024,5) = {lb.value:.2f}, bracketed by "
      f"[{lb.lower:.2f}, {lb.upper:.2f}]; divided by n: {lb.value / 400:.4f}")

# Fano arithmetic: at the saturated packing/covering relations the testing
# error stays above 1/4
log_n2 = 3.0
params = FanoParams(delta_n=0.1, epsilon_n=0.05, log_pack=4 * log_n2,
                    log_cover=log_n2, n=400, sigma=1.0, kappa_c=1.0,
                    c_route=log_n2 / (400 * 0.05**2))
print("Fano error bound:", fano_error_bound(params))

# chi-square deviations: analytic bound vs Monte Carlo
tails = chi_square_tails(m=10, x=1.0)
z = np.random.default_rng(0).chisquare(10, size=100_000)
print(f"P[chi2_10 >= {tails.upper_threshold:.2f}]: bound {tails.upper_dev_bound:.4f}, "
      f"observed {np.mean(z >= tails.upper_threshold):.4f}")

# the exact noise-correlation supremum vs its theoretical envelope
rng = np.random.default_rng(1)
n, d, s = 50, 20, 2
X = rng.standard_normal((n, d))
w = rng.standard_normal(n)
exact = sup_correlation_exact(X, w, s=s, r=1.0)
envelope = 6 * 1.0 * 1.0 * 1.5 * math.sqrt(s * math.log(d / s) / n)
print(f"sup correlation (exact): {exact:.4f} vs envelope ~{envelope:.4f}")
