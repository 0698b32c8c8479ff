"""
Does the deployment process matter?
===================================

Place the same number of base stations on a regular square lattice, mark
each one macro with probability Q = lambda_M / (lambda_M + lambda_S), and
compare the association probabilities with the PPP closed form.

The uplink tier (Case 1 share) matches exactly, because it only depends on
the labelling. The split between Case 2 and Case 4 does not: on a lattice
the nearest small cell is never very far away, so more devices end up
fully on a small cell. The gap is largest for pico cells at high density.

    python demos/fig9_grid.py
"""
from dude import McConfig, case_probabilities, estimate_case_probs_grid, estimate_case_probs_ppp, make_scenario
from dude.geometry import matched_grid

mc = McConfig(n_trials=400, probes_per_trial=250)
for p_small in (20.0, 30.0):
    print(f"P_S = {p_small:g} dBm      p2: closed form / PPP MC / grid MC     p4: closed form / grid MC")
    for ratio in (1, 2, 5, 10, 15, 20):
        s = make_scenario(p_small, ratio, alpha=3.0)
        cf = case_probabilities(s)
        ppp = estimate_case_probs_ppp(s, mc)
        grid = estimate_case_probs_grid(matched_grid(s, 100.0), s, mc)
        print(f"  ratio {ratio:4g}   {cf.p2:.3f} / {ppp.p2.mean:.3f} / {grid.p2.mean:.3f}"
              f"          {cf.p4:.3f} / {grid.p4.mean:.3f}")

###############################################################################
# Lognormal shadowing randomises the effective geometry and narrows the gap.
s = make_scenario(30.0, 10.0, alpha=3.0, macro_shadow=(0, 8), small_shadow=(0, 8))
print("\nPcell, ratio 10, 8 dB shadowing:",
      f"closed form p2 {case_probabilities(s).p2:.3f},",
      f"grid p2 {estimate_case_probs_grid(matched_grid(s, 100.0), s, mc).p2.mean:.3f}")
