"""Geometry of lq-balls: projections, the truncation inequality, packings.

The packing construction on the sparse ternary hypercube is the engine
behind the hard-sparsity lower bounds; its l2 rescaling carries an exact
pairwise-distance certificate.
"""

import numpy as np

from lqminimax import (
    BallSpec,
    ball_contains,
    entropy_bounds,
    greedy_pack,
    hamming_packing,
    project_l1,
    project_lq_heuristic,
    qconvex_entropy_bound,
    rescale_hypercube_packing,
    truncation_inequality,
)

# Euclidean projection onto the l1-ball
theta = np.array([2.0, 1.0, -0.2])
print("project_l1([2, 1, -0.2], r=1):", project_l1(theta, 1.0))

# nonconvex ball: the heuristic restores feasibility, never worse than
# truncation or global rescaling
ball = BallSpec(q=0.5, radius=1.0)
proj = project_lq_heuristic(np.array([4.0, 0.0, 0.0]), ball)
print("lq projection of (4,0,0):", proj, " feasible:", ball_contains(ball, proj))

# l1 mass of a soft-sparse vector splits into a top block and a tail
rng = np.random.default_rng(0)
theta = rng.standard_normal(30) * 0.3
qmass = np.sum(np.abs(theta) ** 0.5)
theta *= min(1.0, (2 * 1.0 / qmass) ** 2)
chk = truncation_inequality(theta, rq=1.0, q=0.5, tau=0.4)
print(f"truncation inequality: {chk.lhs:.3f} <= {chk.rhs:.3f} -> {chk.holds}")

# hypercube packing: >= exp((s/2) log((d-s)/(s/2))) points, pairwise >= s/2
packing = hamming_packing(d=10, s=4)
print(f"hamming packing d=10 s=4: {packing.cardinality} points, "
      f"min distance {packing.min_pairwise_distance}")

scaled = rescale_hypercube_packing(packing, delta_n=0.5, s=4)
sq = np.sum((scaled.points[0] - scaled.points[1]) ** 2)
print(f"rescaled: first pair squared distance {sq:.3f} in "
      f"[{0.5**2}, {8 * 0.5**2}]")

# greedy packing lower-bounds the packing number of any sampled set
grid = [np.array([x, y]) for x in np.linspace(-1, 1, 9)
        for y in np.linspace(-1, 1, 9) if abs(x) + abs(y) <= 1]
pack = greedy_pack(grid, delta=0.5)
print("greedy packing of the l1 ball grid at delta=0.5:", pack.cardinality, "points")

# entropy bound formulas (constants are knobs; shapes are the content)
out = entropy_bounds(p=2.0, q=0.5, rq=1.0, d=128, epsilon=0.25)
print(f"entropy of B_0.5(1) at eps=0.25: [{out.lower:.2f}, {out.upper:.2f}], "
      f"lower range valid: {out.lower_valid}")
print("q-convex hull bound:", qconvex_entropy_bound(0.5, 1.0, 128, 0.25, kappa_c=1.2))
