"""Contextuality as a resource: MBQC with linear side-processing and games.

A computation that only adds bits mod 2 can compute non-affine functions
only by drawing on contextuality in its resource.  Its failure rate is
bounded below by NCF(resource) times the distance of the target from the
nearest affine function.  The same shape of bound holds for constraint games,
with the fraction of formulae no assignment can satisfy in place of that
distance.
"""
import math
from fractions import Fraction

from contextuality.catalog import ghz_mermin
from contextuality.empirical import mix, uniform_model
from contextuality.games import (chsh_game, check_game_bound, game_inequality, k_consistency,
                                 tsirelson_game)
from contextuality.mbqc import OR, check_mbqc_bound, nu_tilde, or_gadget
from contextuality.quantum import bell_state, born_model
from contextuality.scenario import bell_scenario

print("distance of OR from affine maps:", nu_tilde(OR))

# The GHZ gadget computes OR perfectly.  Adding white noise to the resource
# lowers both the success rate and the contextual fraction, and the bound
# follows along.
ghz, noise = ghz_mermin(3), uniform_model(bell_scenario(3))
print(f"{'noise':>6} {'p_fail':>8} {'ncf':>6} {'bound':>8} {'slack':>8}")
for k in range(0, 5):
    p = Fraction(k, 4)
    rep = check_mbqc_bound(or_gadget(mix(noise, ghz, p)), OR)
    print(f"{str(p):>6} {str(rep.failure):>8} {str(rep.ncf):>6} {str(rep.bound):>8} {str(rep.slack):>8}")

# CHSH as a game: at most 3 of the 4 parity constraints hold together.
cs = chsh_game()
print("\nCHSH game k =", k_consistency(cs), "inequality bound", game_inequality(cs).bound)

# Measured at (pi/8, 5pi/8), |Phi+> wins a relabelled CHSH game with
# probability (2 + sqrt 2)/4, and the bound is attained exactly.
rep = check_game_bound(tsirelson_game(), born_model(bell_state(), (math.pi / 8, 5 * math.pi / 8)))
print("quantum strategy:", {k: round(v, 9) if isinstance(v, float) else v
                            for k, v in rep.to_dict().items()})
print("expected p_fail:", (2 - math.sqrt(2)) / 4, "expected ncf:", 2 - math.sqrt(2))
