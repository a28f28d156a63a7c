#!/usr/bin/env python3
"""Both-sides flux panels at sampled kink points.

Input: the current-condition checker JSON ({"records": [{s, q, slot,
flux_left, flux_right, mismatch, ...}]}). Left panel: the one-sided normal
fluxes per sampled point; right panel: their relative mismatch.
"""
import sys

import numpy as np
import matplotlib.pyplot as plt

from _common import SchemaMismatch, read_json, save, standard_parser


def build_figure(report_json):
    obj = read_json(report_json, ["records"])
    recs = obj["records"]
    if not recs:
        raise SchemaMismatch(f"{report_json}: records list is empty")
    for key in ("flux_left", "flux_right", "mismatch"):
        if key not in recs[0]:
            raise SchemaMismatch(f"{report_json}: records lack {key!r}")
    fl = np.array([r["flux_left"] for r in recs])
    fr = np.array([r["flux_right"] for r in recs])
    mism = np.array([max(r["mismatch"], 1e-18) for r in recs])
    idx = np.arange(len(recs))

    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(8.6, 3.8))
    ax1.plot(idx, fl, "o", ms=4, label="flux from left", alpha=0.8)
    ax1.plot(idx, fr, "x", ms=5, label="flux from right", alpha=0.8)
    ax1.set_xlabel("sampled kink point")
    ax1.set_ylabel("normal flux of the chart current")
    ax1.set_title("flux into the kink set, both sides")
    ax1.legend(fontsize=8)

    ax2.semilogy(idx, mism, ".", color="tab:green")
    ax2.set_xlabel("sampled kink point")
    ax2.set_ylabel("relative mismatch")
    ax2.set_title("|flux_L - flux_R| / max(|flux|)")
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
