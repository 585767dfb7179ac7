"""
Regret bounds next to measured regret
=====================================

For each of a few seeded scenarios, compare the measured regret with the
classical bound for diminishing steps, and look at the ingredients of the
BB-specific bounds.
"""

from onlinebb.learner import run
from onlinebb.losses import max_gradient_norm
from onlinebb.regret import regret_report
from onlinebb.scenarios import seeded_suite
from onlinebb.steppers import StepPolicy

for sc in seeded_suite(4, dim=5, K=1000, seed=3):
    c = sc.fset.diameter() / max_gradient_norm(sc.seq, sc.fset)
    rep = regret_report(run(sc.seq, StepPolicy("diminishing", alpha0=c), sc.fset, sc.x0),
                        sc.seq, sc.fset)
    print(f"{sc.name:<20} diminishing: R(K) = {rep.R_K:9.3f} <= bound {rep.zinkevich:10.1f}")

    tr = run(sc.seq, StepPolicy("bb2"), sc.fset, sc.x0)
    rep = regret_report(tr, sc.seq, sc.fset)
    t1, t2 = rep.theorem1, rep.theorem2
    print(f"{'':<20} bb2:         R(K) = {rep.R_K:9.3f}, linearized {rep.lin_regret[-1]:9.3f}")
    print(f"{'':<20}   ratio condition {t1.condition_t1}, step sum below Z {t1.flag_P}, "
          f"zeta = {t2.zeta:.3g}, degenerate rounds {int(tr.degenerate.sum())}")
