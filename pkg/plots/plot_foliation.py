#!/usr/bin/env python3
"""Leaf fan of a foliation with its kink set drawn thick.

Input: the foliation export CSV (s, x, f, is_kink); optionally the kink
curve CSV (s, x_kink, ...) for the thick curve, otherwise the flagged kink
rows of the main file are used.
"""
import sys

import numpy as np
import matplotlib.pyplot as plt

from _common import SchemaMismatch, read_csv, save, standard_parser


def build_figure(foliation_csv, kink_csv=None):
    cols, _ = read_csv(foliation_csv, ["s", "x", "f", "is_kink"])
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    smooth = cols["is_kink"] == 0
    for s in np.unique(cols["s"]):
        sel = smooth & (cols["s"] == s)
        order = np.argsort(cols["x"][sel])
        ax.plot(cols["x"][sel][order], cols["f"][sel][order],
                lw=0.9, color="tab:blue")
    if kink_csv is not None:
        kc, _ = read_csv(kink_csv, ["s", "x_kink"])
        ridge = kc["x_kink"]
        tpos = [cols["f"][(cols["s"] == s) & (cols["is_kink"] == 1)]
                for s in kc["s"]]
        tval = np.array([t[0] if len(t) else np.nan for t in tpos])
        order = np.argsort(kc["s"])
        ax.plot(ridge[order], tval[order], lw=3.2, color="black", label="kink set")
    else:
        kink = cols["is_kink"] == 1
        if np.any(kink):
            order = np.argsort(cols["s"][kink])
            ax.plot(cols["x"][kink][order], cols["f"][kink][order],
                    lw=3.2, color="black", label="kink set")
    ax.set_xlabel("x")
    ax.set_ylabel("t")
    ax.set_title("time leaves and their kink set")
    if ax.get_legend_handles_labels()[0]:
        ax.legend(loc="lower right")
    fig.tight_layout()
    return fig


def main(argv=None):
    parser = standard_parser(__doc__)
    parser.add_argument("--kinks", default=None, help="kink curve CSV")
    args = parser.parse_args(argv)
    try:
        fig = build_figure(args.input, args.kinks)
    except SchemaMismatch as exc:
        print(f"schema mismatch: {exc}", file=sys.stderr)
        return 2
    save(fig, args.output)
    return 0


if __name__ == "__main__":
    sys.exit(main())
