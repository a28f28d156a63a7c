#!/usr/bin/env python3
"""Chart trajectories crossing the kink set.

Input: a trajectory CSV (s, q_1..q_N, v_1..v_N, event_flag). Every particle
column becomes one polyline in the (q, s) plane; rows flagged as events are
marked, and the kink set is drawn thick (from --kinks, the kink-curve CSV,
or vertically through the flagged crossing points if absent).
"""
import sys

import numpy as np
import matplotlib.pyplot as plt

from _common import SchemaMismatch, read_csv, save, standard_parser


def build_figure(trajectory_csv, kink_csv=None):
    cols, header = read_csv(trajectory_csv, ["s", "event_flag"])
    slots = [h for h in header if h.startswith("q_")]
    if not slots:
        raise SchemaMismatch(f"{trajectory_csv}: no q_* columns")
    fig, ax = plt.subplots(figsize=(5.6, 4.6))
    s = cols["s"]
    order = np.argsort(s)
    for j, name in enumerate(slots):
        ax.plot(cols[name][order], s[order], lw=1.0,
                label=f"particle {name[2:]}")
    ev = cols["event_flag"] == 1
    if kink_csv is not None:
        kc, _ = read_csv(kink_csv, ["s", "x_kink"])
        ko = np.argsort(kc["s"])
        ax.plot(kc["x_kink"][ko], kc["s"][ko], lw=3.2, color="black",
                label="kink set")
    elif np.any(ev):
        for name in slots:
            for qev in np.unique(np.round(cols[name][ev], 9)):
                near = np.any(np.abs(cols[name][ev] - qev) < 1e-9)
                if near:
                    ax.plot([qev, qev], [s.min(), s.max()], lw=3.2,
                            color="black", zorder=0)
    if np.any(ev):
        for name in slots:
            ax.plot(cols[name][ev], s[ev], "o", ms=5, color="tab:red",
                    zorder=5)
    ax.set_xlabel("q")
    ax.set_ylabel("s")
    ax.set_title("trajectories crossing the kink set")
    ax.legend(loc="upper left", fontsize=8)
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
