#!/usr/bin/env python3
"""Plot an acn-outage CSV: outage against the swept parameter.

    acn-outage simulate presets/fig4_lambda.conf --out fig4.csv
    python3 scripts/plot_sweep.py fig4.csv --dest D1 -o fig4_d1.png

MC rows are drawn as markers with 95% error bars, analytic rows as lines.
"""

import argparse

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import pandas as pd


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("csv")
    ap.add_argument("--dest", choices=["D1", "D2"], default="D1")
    ap.add_argument("--logx", action="store_true")
    ap.add_argument("--liny", action="store_true", help="linear outage axis")
    ap.add_argument("-o", "--out", default="outage.png")
    args = ap.parse_args()

    df = pd.read_csv(args.csv)
    df = df[df.destination == args.dest]
    param = df.sweep_param.iloc[0]

    fig, ax = plt.subplots(figsize=(6, 4.5))
    for i, (proto, g) in enumerate(df.groupby("protocol", sort=True)):
        color = f"C{i}"
        an = g[g.estimator == "analytic"].sort_values("sweep_value")
        if len(an):
            ax.plot(an.sweep_value, an.p_out, "-", color=color, label=f"{proto} (analytic)")
        mc = g[g.estimator == "mc"].sort_values("sweep_value")
        if len(mc):
            err = [mc.p_out - mc.ci_low, mc.ci_high - mc.p_out]
            ax.errorbar(mc.sweep_value, mc.p_out, yerr=err, fmt="o", ms=4,
                        color=color, mfc="none", label=f"{proto} (mc)")

    if args.logx:
        ax.set_xscale("log")
    if not args.liny:
        ax.set_yscale("log")
    ax.set_xlabel(param)
    ax.set_ylabel(f"outage probability at {args.dest}")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(args.out, dpi=150)
    print(f"wrote {args.out}")


if __name__ == "__main__":
    main()
