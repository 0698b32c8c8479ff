"""
Association probabilities in a two-tier network
===============================================

A macro tier (46 dBm) shares the plane with small cells at 20 dBm (femto)
or 30 dBm (pico), path-loss exponent 3. For each density ratio we compare
the closed-form case probabilities with a Monte Carlo run over PPP
deployments, then write the table with ``run_sweep``.

Run from the repository root::

    python demos/fig1_association.py [out_dir]
"""
import sys
from pathlib import Path

import numpy as np

from dude import McConfig, case2_peak_density_ratio, case_probabilities, estimate_case_probs_ppp, make_scenario
from dude.config import load_scenario, load_sweep
from dude.sweep import run_sweep

here = Path(__file__).parent
out = Path(sys.argv[1]) if len(sys.argv) > 1 else Path("out/fig1")

###############################################################################
# Closed form against brute force at a handful of ratios. 2000 deployments
# with 50 probes each give 1e5 classified devices per point.
mc = McConfig(n_trials=2000, probes_per_trial=50)
for p_small in (20.0, 30.0):
    print(f"P_S = {p_small:g} dBm")
    print("  ratio    p1 (cf / mc)       p2 (cf / mc)       p4 (cf / mc)")
    for ratio in (1, 2, 5, 10, 15, 20):
        s = make_scenario(p_small, ratio, alpha=3.0)
        cf = case_probabilities(s)
        est = estimate_case_probs_ppp(s, mc)
        print(f"  {ratio:5g}  " + "  ".join(f"{a:.4f} / {b.mean:.4f}" for a, b in
                                          ((cf.p1, est.p1), (cf.p2, est.p2), (cf.p4, est.p4))))

###############################################################################
# Decoupled access (Case 2) peaks where lambda_S / lambda_M = (P_M / P_S)^(1/alpha).
for p_small in (20.0, 30.0):
    s = make_scenario(p_small, 1.0, alpha=3.0)
    r = case2_peak_density_ratio(s)
    print(f"P_S = {p_small:g} dBm: Case-2 peak {case_probabilities(make_scenario(p_small, r, 3.0)).p2:.3f}"
          f" at ratio {r:.2f}")

###############################################################################
# A smooth analytic curve for plotting, and the sweep outputs on disk.
ratios = np.linspace(0.5, 20, 79)
curve = np.array([case_probabilities(make_scenario(20.0, r, 3.0)) for r in ratios])
print("Fcell p2 curve max on a fine grid:", curve[:, 1].max().round(4))

res = run_sweep(load_scenario(here / "configs" / "assoc_alpha3.toml"),
                load_sweep(here / "configs" / "fig1_sweep.toml"), out)
print(f"wrote {', '.join(p.name for p in res.files)} to {out} (exit code {res.exit_code})")
