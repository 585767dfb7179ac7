"""
Barzilai-Borwein step sizes on a fixed quadratic
================================================

Both secant step sizes sit between the inverse extreme curvatures, and the
short one (bb2) never exceeds the long one (bb1).
"""

import numpy as np

from onlinebb import QuadraticLoss
from onlinebb.steppers import SecantPair, StepPolicy, bb1, bb2

rng = np.random.default_rng(0)

# a 4-d quadratic with curvatures 1, 2, 5 and 10
f = QuadraticLoss(np.diag([1.0, 2.0, 5.0, 10.0]), np.zeros(4))

for _ in range(5):
    x, x_prev = rng.standard_normal(4), rng.standard_normal(4)
    pair = SecantPair(x - x_prev, f.gradient(x) - f.gradient(x_prev))
    print(f"bb2 = {bb2(pair):.4f}   bb1 = {bb1(pair):.4f}   (range [0.1, 1])")

# The policy object adds the safeguards: a fallback step when no pair exists
# or the pair is degenerate, and clamping into [alpha_min, alpha_max].
policy = StepPolicy("alt_bb", period=2)
print("round 1 :", policy.next_step(None, 1))
zero = SecantPair(np.zeros(4), np.zeros(4))
print("degenerate pair :", policy.next_step(zero, 2), "flagged:", policy.last_flagged)
for k in range(3, 7):
    print(f"round {k}: uses {policy.formula_for(k)}")
