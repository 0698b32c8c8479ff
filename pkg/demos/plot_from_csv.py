"""
Plot sweep CSVs
===============

Renders the CSV files written by ``dude`` (or the other demos) with
matplotlib, which is not a dependency of the core package.

    python demos/plot_from_csv.py out/fig1/case_probs.csv out/fig1/case_probs.png
"""
import sys

import numpy as np

try:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
except ImportError:  # pragma: no cover
    sys.exit("matplotlib is required: pip install matplotlib")


def read(path):
    with open(path) as fh:
        lines = [ln for ln in fh if not ln.startswith("#")]
    header = lines[0].strip().split(",")
    rows = [ln.strip().split(",") for ln in lines[1:] if ln.strip()]
    return {h: [r[i] for r in rows] for i, h in enumerate(header)}


def main(src, dst):
    t = read(src)
    fig, ax = plt.subplots(figsize=(6, 4))
    if "p2" in t:
        series = sorted(set(t.get("small_power_dbm", [""])))
        for ps in series:
            for eng in sorted(set(t["engine"])):
                idx = [i for i in range(len(t["engine"]))
                       if t["engine"][i] == eng and t.get("small_power_dbm", [""] * len(t["engine"]))[i] == ps]
                x = np.array([float(t["lambda_ratio"][i]) for i in idx])
                for k, style in (("p1", "-"), ("p2", "--"), ("p4", ":")):
                    y = np.array([float(t[k][i]) for i in idx])
                    ax.plot(x, y, style, marker="o" if eng != "analytic" else None, label=f"{k} {eng} {ps}")
        ax.set_xlabel("lambda_S / lambda_M")
        ax.set_ylabel("probability")
    elif "gain_ratio" in t:
        ax.loglog(np.array(t["drp_bps"], float) / 1e3, np.array(t["dude_bps"], float) / 1e3, "o-")
        ax.set_xlabel("DRP throughput [kbps]")
        ax.set_ylabel("DUDe throughput [kbps]")
    else:
        cols = [c for c in t if c not in ("engine", "policy")]
        ax.plot(np.array(t[cols[0]], float), np.array(t[cols[1]], float))
        ax.set_xlabel(cols[0])
        ax.set_ylabel(cols[1])
    if ax.get_legend_handles_labels()[1]:
        ax.legend(fontsize=6)
    fig.tight_layout()
    fig.savefig(dst, dpi=150)
    print(f"wrote {dst}")


if __name__ == "__main__":
    main(*sys.argv[1:3])
