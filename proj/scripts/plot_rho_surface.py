#!/usr/bin/env python3
"""Plot the bound rho_T over the (alpha_star, beta_star) triangle.

Generate the input with, e.g.:

    treebound sweep --depth 2,3,4 --alpha-star 0:0.5:0.01 --beta-star 0:0.5:0.01 \
        --out rho_surface.csv
    scripts/plot_rho_surface.py rho_surface.csv
"""

import csv
import sys
from collections import defaultdict

import matplotlib.pyplot as plt


def main() -> None:
    if len(sys.argv) != 2:
        sys.exit(__doc__)
    surfaces = defaultdict(list)
    with open(sys.argv[1], newline="") as f:
        for row in csv.DictReader(f):
            surfaces[int(row["T"])].append(
                (float(row["alpha_star"]), float(row["beta_star"]), float(row["rho"]))
            )
    fig = plt.figure()
    ax = fig.add_subplot(projection="3d")
    for depth, points in sorted(surfaces.items()):
        ax.plot_trisurf(
            [p[0] for p in points],
            [p[1] for p in points],
            [p[2] for p in points],
            alpha=0.7,
            label=f"T = {depth}",
        )
    ax.set_xlabel(r"$\alpha^\star$")
    ax.set_ylabel(r"$\beta^\star$")
    ax.set_zlabel(r"$\rho_T$")
    plt.tight_layout()
    plt.show()


if __name__ == "__main__":
    main()
