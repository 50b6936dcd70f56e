#!/usr/bin/env python3
"""Plot ber.csv from a scenario run: one curve per scheme, log-scale BER."""

import argparse
import csv
from collections import defaultdict

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("csv", help="ber.csv written by `grassrelay ber`")
    parser.add_argument("-o", "--out", default="ber.png", help="image file")
    args = parser.parse_args()

    curves = defaultdict(list)
    sweep = "SNR"
    with open(args.csv, newline="") as f:
        for row in csv.DictReader(f):
            sweep = row["sweep_var"]
            curves[row["scheme"]].append(
                (float(row["snr_db"]), float(row["ber"]), float(row["stderr"]))
            )

    fig, ax = plt.subplots(figsize=(6, 4.5))
    for scheme, points in curves.items():
        x, ber, err = zip(*sorted(points))
        # Zero-error points cannot be drawn on a log axis.
        keep = [i for i, b in enumerate(ber) if b > 0]
        ax.errorbar([x[i] for i in keep], [ber[i] for i in keep],
                    yerr=[err[i] for i in keep], marker="o", ms=3, capsize=2, label=scheme)
    ax.set_yscale("log")
    ax.set_xlabel(f"{sweep} (dB)")
    ax.set_ylabel("BER")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(args.out, dpi=150)


if __name__ == "__main__":
    main()
