#!/usr/bin/env python3
"""Equivariance histograms: transported ensemble against the leaf density.

Input: a histogram CSV (center_1[, center_2], empirical, theory). One
spatial column gives paired bars; two give side-by-side heat maps.
"""
import sys

import numpy as np
import matplotlib.pyplot as plt

from _common import SchemaMismatch, read_csv, save, standard_parser


def build_figure(histogram_csv):
    cols, header = read_csv(histogram_csv, ["center_1", "empirical", "theory"])
    if "center_2" in header:
        c1 = np.unique(cols["center_1"])
        c2 = np.unique(cols["center_2"])
        emp = cols["empirical"].reshape(len(c1), len(c2))
        th = cols["theory"].reshape(len(c1), len(c2))
        fig, axes = plt.subplots(1, 2, figsize=(8.6, 3.9), sharey=True)
        vmax = max(emp.max(), th.max())
        for ax, data, title in ((axes[0], emp, "transported ensemble"),
                                (axes[1], th, "leaf density")):
            im = ax.pcolormesh(c1, c2, data.T, vmin=0.0, vmax=vmax,
                               shading="nearest")
            ax.set_title(title)
            ax.set_xlabel("$q_1$")
        axes[0].set_ylabel("$q_2$")
        fig.colorbar(im, ax=axes, shrink=0.85, label="bin probability")
        return fig
    fig, ax = plt.subplots(figsize=(6.4, 3.9))
    width = np.min(np.diff(np.sort(np.unique(cols["center_1"])))) * 0.42
    ax.bar(cols["center_1"] - width / 2, cols["empirical"], width=width,
           label="transported ensemble")
    ax.bar(cols["center_1"] + width / 2, cols["theory"], width=width,
           label="leaf density")
    ax.set_xlabel("q")
    ax.set_ylabel("bin probability")
    ax.set_title("equivariance check")
    ax.legend(fontsize=8)
    fig.tight_layout()
    return fig


def main(argv=None):
    parser = standard_parser(__doc__)
    args = parser.parse_args(argv)
    try:
        fig = build_figure(args.input)
    except SchemaMismatch as exc:
        print(f"schema mismatch: {exc}", file=sys.stderr)
        return 2
    save(fig, args.output)
    return 0


if __name__ == "__main__":
    sys.exit(main())
