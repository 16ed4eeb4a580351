"""How much of a model is contextual, and which inequality shows it.

Run with ``python3 demos/01_contextual_fraction.py``.
"""
from fractions import Fraction

import numpy as np

from contextuality.bell import evaluate, normalized_violation
from contextuality.catalog import chsh_model, deterministic_zero, pr_box
from contextuality.empirical import is_strongly_contextual, mix
from contextuality.fraction import decompose, noncontextual_fraction, witnessing_inequality

# The PR box satisfies every "outcomes agree" constraint except one, which asks
# them to differ.  No global assignment fits, so the whole model is contextual.
pr = pr_box()
print("PR box cf:", noncontextual_fraction(pr).cf, "strongly contextual:", is_strongly_contextual(pr))

# The exact CHSH tables from |Phi+> at angles 0 and pi/3: a quarter is contextual.
e = chsh_model()
res = noncontextual_fraction(e)
print("CHSH model ncf:", res.ncf, "cf:", res.cf)

# The dual optimum gives an inequality with bound 0 and algebraic bound 1 ...
ineq = witnessing_inequality(e)
print("witness bound:", ineq.bound, "algebraic bound:", ineq.algebraic_bound)
print("normalised violation:", normalized_violation(ineq, e))

# ... and the primal optimum splits the model into a local part and a
# strongly contextual remainder.  The local part sits on the inequality's
# boundary and the remainder attains its maximum.
dec = decompose(e, res)
print("NC part value:", evaluate(ineq, dec.noncontextual),
      "SC part value:", evaluate(ineq, dec.strongly_contextual))
for ctx, table in zip(e.scenario.contexts, dec.strongly_contextual.tables):
    print("  SC table", ctx, [str(p) for p in table])

# Mixing with a deterministic model dilutes contextuality linearly.
for lam in (Fraction(1, 4), Fraction(1, 2), Fraction(3, 4)):
    print(f"cf({lam} PR + {1 - lam} det) =", noncontextual_fraction(mix(pr, deterministic_zero(), lam)).cf)

# Float models go through the float backend and agree to solver precision.
print("float backend on the CHSH model:", noncontextual_fraction(e.as_float()).cf,
      np.isclose(float(res.cf), noncontextual_fraction(e.as_float()).cf))
