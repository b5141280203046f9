"""Measure the design constants that gate the theory.

Column normalization holds for essentially any reasonable ensemble; the
curvature-type conditions (sparse spectrum, restricted eigenvalue, trivial
sparse kernel) are the ones that separate easy designs from degenerate
ones.  The two-sided curvature bound for correlated Gaussian rows is
checked by Monte Carlo.
"""

import numpy as np

from lqminimax import (
    BallSpec,
    DesignSpec,
    REParams,
    column_norm_constant,
    diagnose,
    generate_design,
    kernel_diameter,
    kernel_trivial_zero,
    re_constant,
    sparse_spectrum,
    verify_prop1,
)

X = generate_design(DesignSpec("standard_gaussian", n=60, d=10, seed=5))

print("kappa_c:", column_norm_constant(X))
kl, ku = sparse_spectrum(X, s=2)
print(f"sparse spectrum at level 4: kappa_l={kl:.3f}, kappa_u={ku:.3f}")
print("kernel trivial on B_0(4):", kernel_trivial_zero(X, s=2))

for c0 in (1.0, 3.0):
    est = re_constant(X, REParams(s=2, c0=c0), n_samples=500, seed=0)
    print(f"RE estimate over the cone (c0={c0}): {est.value:.3f} [{est.method}]")

diag = diagnose(X, s=2, c0=3.0)
print("full diagnostics:", diag.to_json_dict())

# a degenerate design: identical columns kill identifiability for l2 error
col = np.linspace(1, 4, 8)
X_bad = np.column_stack([col, col, col])
print("\nidentical columns -> kernel trivial:", kernel_trivial_zero(X_bad, s=1),
      " kernel diameter:", kernel_diameter(X_bad, BallSpec(0.0, 1)))

# curvature bounds for a correlated row ensemble
spec = DesignSpec("correlated_gaussian", n=200, d=400, seed=0,
                  sigma_cov=np.diag([4.0] + [1.0] * 399))
report = verify_prop1(spec, n_draws=3, n_directions=500, seed=1)
print(f"\ncurvature bounds over {report.n_checks} direction checks: "
      f"{report.lower_violations} lower / {report.upper_violations} upper violations, "
      f"worst margins {report.lower_margin_min:.4f} / {report.upper_margin_min:.4f}")
