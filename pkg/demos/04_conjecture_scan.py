"""
Looking for small |D|
=====================

The conjectured lower bound |D| >= 1 is probed two ways: random sampling and
Nelder-Mead minimization with restarts.  Values below 1 would be findings,
not errors.
"""

from confpoly.verify import CampaignSpec, minimize_absD, run_conjecture_scan

# %%
# Random sampling at a few sizes.
for n, d in ((3, 1), (4, 2), (5, 2)):
    rep = run_conjecture_scan(CampaignSpec(n=n, d=d, trials=200, seed=0))
    print(f"(n, d) = ({n}, {d}): min |D| = {rep.min_abs:.6f}, candidates: {len(rep.candidates)}")

# %%
# Local minimization from random starts.  For three points the infimum is
# reached by collinear configurations, where D = 1.
res = minimize_absD(3, 1, seed=0, budget=5)
print("best |D|:", res.best_abs)
print("trace:", [round(v, 8) for _, v in res.trace])
print(res.best_config.points)
