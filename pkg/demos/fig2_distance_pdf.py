"""
Where does a decoupled device send its uplink?
==============================================

Case-2 devices take the downlink from a macro cell, yet a small cell is
their nearest base station. With decoupled access (DUDe) the uplink goes to
that small cell; with coupled access (DRP) it stays on the macro. The
distance laws below show how much shorter the DUDe link is.

    python demos/fig2_distance_pdf.py [out_dir]
"""
import sys
from pathlib import Path

import numpy as np

from dude import McConfig, case2_cdf, case2_mean_distance, case2_pdf, make_scenario
from dude.montecarlo import sample_case2_distances_both

out = Path(sys.argv[1]) if len(sys.argv) > 1 else Path("out/fig2")
out.mkdir(parents=True, exist_ok=True)

mc = McConfig(n_trials=1000, probes_per_trial=50)
for name, p_small in (("Fcell", 20.0), ("Pcell", 30.0)):
    s = make_scenario(p_small, 5.0, alpha=4.0)
    samples = sample_case2_distances_both(s, mc)
    print(f"{name}:")
    for policy in ("dude", "drp"):
        d = samples[policy]
        ks = d.ks_statistic(lambda x: case2_cdf(policy, x, s))
        print(f"  {policy:4s} mean {case2_mean_distance(policy, s):7.1f} m (MC {d.mean:7.1f} m),"
              f" KS {ks:.4f} over {d.total} samples")

    # analytic densities on a common grid, one column per policy
    x = np.linspace(0, 1500, 301)
    table = np.column_stack([x, case2_pdf("dude", x, s), case2_pdf("drp", x, s)])
    path = out / f"distance_pdf_{name.lower()}.csv"
    np.savetxt(path, table, delimiter=",", header="units: x_m=m, pdf=1/m\nx_m,dude_pdf,drp_pdf", comments="# ")
    print(f"  wrote {path}")
