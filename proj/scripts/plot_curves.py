#!/usr/bin/env python3
"""Learning curves with one-standard-deviation bands.

Reads the curve_k*.csv files written by `topkboost --sweep-k` (columns
round,mean,std) or a curves.csv from a single run (per-seed rows, averaged
here), and writes a PNG.

    scripts/plot_curves.py out/curve_k3.csv out/curve_k7.csv -o curves.png
"""
import argparse
import csv
import math
import re
from collections import defaultdict
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402


def load(path):
    with open(path, newline="") as f:
        rows = list(csv.DictReader(f))
    if rows and "mean" in rows[0]:
        return ([int(r["round"]) for r in rows], [float(r["mean"]) for r in rows],
                [float(r["std"]) for r in rows])
    by_round = defaultdict(list)
    for r in rows:
        by_round[int(r["round"])].append(float(r["avg_weighted_rank_loss"]))
    rounds = sorted(by_round)
    means, stds = [], []
    for t in rounds:
        v = by_round[t]
        mu = sum(v) / len(v)
        means.append(mu)
        stds.append(math.sqrt(sum((x - mu) ** 2 for x in v) / (len(v) - 1)) if len(v) > 1 else 0.0)
    return rounds, means, stds


def label_for(path):
    m = re.search(r"curve_k(\d+)", Path(path).name)
    return f"k={m.group(1)}" if m else Path(path).stem


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("curves", nargs="+")
    ap.add_argument("-o", "--output", default="curves.png")
    ap.add_argument("--title", default="")
    args = ap.parse_args()

    fig, ax = plt.subplots(figsize=(7, 4.5))
    for path in args.curves:
        rounds, mean, std = load(path)
        line, = ax.plot(rounds, mean, label=label_for(path), linewidth=1.2)
        ax.fill_between(rounds, [m - s for m, s in zip(mean, std)], [m + s for m, s in zip(mean, std)],
                        color=line.get_color(), alpha=0.2, linewidth=0)
    ax.set_xlabel("round")
    ax.set_ylabel("cumulative average weighted rank loss")
    if args.title:
        ax.set_title(args.title)
    ax.legend()
    fig.tight_layout()
    fig.savefig(args.output, dpi=150)


if __name__ == "__main__":
    main()
