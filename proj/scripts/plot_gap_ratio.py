#!/usr/bin/env python3
"""Plot spectral-gap ratios (bound vs classical) against alpha_star.

Generate the input with, e.g.:

    treebound sweep --depth 2,3,4 --alpha-star 0.001:0.95:0.002 --beta-star 0 \
        --out gap_ratio.csv
    scripts/plot_gap_ratio.py gap_ratio.csv
"""

import csv
import sys
from collections import defaultdict

import matplotlib.pyplot as plt


def main() -> None:
    if len(sys.argv) != 2:
        sys.exit(__doc__)
    curves = defaultdict(list)
    with open(sys.argv[1], newline="") as f:
        for row in csv.DictReader(f):
            curves[int(row["T"])].append((float(row["alpha_star"]), float(row["gap_ratio"])))
    for depth, points in sorted(curves.items()):
        points.sort()
        plt.plot([p[0] for p in points], [p[1] for p in points], label=f"T = {depth}")
    plt.xlabel(r"$\alpha^\star$")
    plt.ylabel("spectral-gap ratio")
    plt.legend()
    plt.grid(True, alpha=0.3)
    plt.tight_layout()
    plt.show()


if __name__ == "__main__":
    main()
