"""
What D does not depend on
=========================

D is built from a choice of Hopf lifts and a labelling of the points, but
its value does not depend on either.  It is also unchanged by rigid motions
and scaling.
"""

import numpy as np

from confpoly import Configuration
from confpoly.geom import build_lift_table, gauge_perturb
from confpoly.maps import determinant
from confpoly.verify import CampaignSpec, random_isometry, run_invariance_campaign

rng = np.random.default_rng(0)
cfg = Configuration("euclidean", rng.normal(size=(5, 3)))
D = determinant(cfg, 2)
print("D =", D)

# %%
# Re-gauge the lifts: each symplectic pair is rescaled by lambda and 1/lambda.
table = build_lift_table(cfg)
for seed in range(3):
    print("gauge", seed, determinant(cfg, 2, table=gauge_perturb(table, seed)))

# %%
# Relabel the points.
for _ in range(3):
    print("relabelled", determinant(cfg.permuted(rng.permutation(5)), 2))

# %%
# Rotate, translate and rescale.
for _ in range(3):
    print("moved", determinant(random_isometry(cfg, rng), 2))

# %%
# The same checks, run as a seeded campaign on hyperbolic configurations.
report = run_invariance_campaign(CampaignSpec(n=4, d=2, mode="star", space="hyperbolic",
                                              trials=20, seed=1))
print(report.pass_counts, "violations:", len(report.violations))
