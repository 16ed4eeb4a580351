"""Operations that cannot create contextuality.

Translating measurements, coarse-graining outcomes, mixing, choosing
between two experiments and running them side by side all leave the
contextual fraction where one would expect: never higher, and for
choice and product, exactly min and product of the non-contextual fractions.
"""
import numpy as np

from contextuality.catalog import chsh_model, pr_box
from contextuality.empirical import SubDistribution, mix
from contextuality.fraction import noncontextual_fraction
from contextuality.morphisms import (choice, coarse_grain, couple_subdistributions,
                                     deterministic_local_model, marginals, product, translate)
from contextuality.randomize import random_model, random_translation

rng = np.random.default_rng(7)
ncf = lambda e: noncontextual_fraction(e).ncf

print("ncf(PR & CHSH) =", ncf(choice(pr_box(), chsh_model())), "= min(0, 3/4)")
print("ncf(CHSH x CHSH) =", ncf(product(chsh_model(), chsh_model())), "= (3/4)^2")
print("coarse-graining PR to one outcome gives cf",
      noncontextual_fraction(coarse_grain(pr_box(), {"0": "*", "1": "*"})).cf)

e = random_model(3, rng)
while noncontextual_fraction(e).cf < 0.05:
    e = random_model(3, rng)
print("\nrandom three-party model cf:", round(noncontextual_fraction(e).cf, 6))
for _ in range(5):
    f = random_translation(e.scenario, rng)
    print("  after a random translation:", round(noncontextual_fraction(translate(f, e)).cf, 6))
other = random_model(3, rng)
print("  mixing 50/50 with another model:", round(noncontextual_fraction(mix(e, other, 0.5)).cf, 6),
      "<=", round((noncontextual_fraction(e).cf + noncontextual_fraction(other).cf) / 2, 6))

# Couplings glue two subdistributions of unequal weight along a common part.
bS = SubDistribution({"s1": 0.3, "s2": 0.2})
bT = SubDistribution({"t1": 0.1, "t2": 0.4})
b = couple_subdistributions(bS, bT)
print("\ncoupling:", b.weights)
print("marginals:", [m.weights for m in marginals(b)])

# Deterministic local models are all built from one generator by the
# operations above.
print("\nbuilt from the generator:", deterministic_local_model([["1", "0"], ["0", "1"]], ["0", "1"]))
