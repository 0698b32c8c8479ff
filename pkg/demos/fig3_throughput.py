"""
Uplink throughput of decoupled devices
======================================

Spectral efficiency of Case-2 devices from the nested quadrature, turned
into per-device throughput by sharing B among the devices of a cell. The
table maps DRP throughput to DUDe throughput as the small-cell density
grows.

The absolute scale depends on the macro density, which sets how many
devices share each cell. Fitting lambda_M to one reference point
(Fcell DRP ~ 7 kbps at lambda_S = 15 lambda_M) and checking the others
is a calibration run, shown at the end.

    python demos/fig3_throughput.py [out_dir]
"""
import sys
from pathlib import Path

from dude import make_scenario, ul_throughput_case2
from dude.analytic import calibrate_macro_intensity
from dude.config import load_scenario
from dude.sweep import compare_policies

here = Path(__file__).parent
out = Path(sys.argv[1]) if len(sys.argv) > 1 else Path("out/fig3")

rows = compare_policies(load_scenario(here / "configs" / "fcell.toml"), out,
                        ratios=(1, 5, 10, 15), series=(20.0, 30.0))
print("P_S   ratio   DRP kbps   DUDe kbps   gain")
for r in rows:
    print(f"{r.small_power_dbm:4g}  {r.lambda_ratio:5g}  {r.drp_bps / 1e3:9.3f}  {r.dude_bps / 1e3:10.2f}"
          f"  {r.gain_ratio:6.1f}")

###############################################################################
# Calibration: throughput scales with lambda_M (fewer devices per cell) while
# the interference-limited spectral efficiency barely moves.
lam_m = calibrate_macro_intensity(7e3, "drp", make_scenario(20.0, 15.0, 4.0))
print(f"\nlambda_M fitted to Fcell DRP = 7 kbps: {lam_m:.2f} per km2")
for name, p_small, ref in (("Fcell", 20.0, {"drp": 7, "dude": 500}), ("Pcell", 30.0, {"drp": 25, "dude": 400})):
    s = make_scenario(p_small, 15.0, 4.0, macro_intensity_km2=lam_m)
    for policy in ("drp", "dude"):
        print(f"  {name} {policy:4s}: {ul_throughput_case2(policy, s).value / 1e3:7.1f} kbps"
              f" (reference ~{ref[policy]} kbps)")
