"""Figure scripts render their bundled sample inputs and carry the expected
compositional elements: a leaf fan with a thick kink curve, trajectories
with marked crossings at the kink set, and both-sides flux panels."""
import importlib.util
import os
import sys

import pytest

HERE = os.path.dirname(__file__)
ROOT = os.path.dirname(HERE)
DATA = os.path.join(ROOT, "sample_data")

sys.path.insert(0, ROOT)


def _load(name):
    spec = importlib.util.spec_from_file_location(name, os.path.join(ROOT, f"{name}.py"))
    mod = importlib.util.module_from_spec(spec)
    spec.loader.exec_module(mod)
    return mod


plot_foliation = _load("plot_foliation")
plot_trajectories = _load("plot_trajectories")
plot_kink_flux = _load("plot_kink_flux")
plot_histogram = _load("plot_histogram")
from _common import SchemaMismatch  # noqa: E402


def test_foliation_composition(tmp_path):
    fig = plot_foliation.build_figure(os.path.join(DATA, "foliation.csv"),
                                      os.path.join(DATA, "kink_curve.csv"))
    widths = [ln.get_linewidth() for ln in fig.axes[0].lines]
    assert sum(w < 2 for w in widths) >= 3      # several thin leaves
    assert any(w >= 3 for w in widths)          # one thick kink curve
    out = tmp_path / "fol.png"
    assert plot_foliation.main(["--input", os.path.join(DATA, "foliation.csv"),
                                "--kinks", os.path.join(DATA, "kink_curve.csv"),
                                "--output", str(out)]) == 0
    assert out.stat().st_size > 10_000


def test_trajectory_composition(tmp_path):
    fig = plot_trajectories.build_figure(os.path.join(DATA, "trajectory.csv"),
                                         os.path.join(DATA, "kink_curve.csv"))
    ax = fig.axes[0]
    widths = [ln.get_linewidth() for ln in ax.lines]
    assert sum(w < 2 for w in widths) >= 2      # one polyline per particle
    assert any(w >= 3 for w in widths)          # thick kink set
    assert any(ln.get_marker() == "o" for ln in ax.lines)   # crossing marker
    out = tmp_path / "traj.png"
    assert plot_trajectories.main(["--input", os.path.join(DATA, "trajectory.csv"),
                                   "--output", str(out)]) == 0
    assert out.stat().st_size > 10_000


def test_kink_flux_composition(tmp_path):
    fig = plot_kink_flux.build_figure(os.path.join(DATA, "current_condition.json"))
    assert len(fig.axes) == 2                   # both-sides panel + mismatch panel
    assert len(fig.axes[0].lines) >= 2          # left and right flux series
    out = tmp_path / "flux.png"
    assert plot_kink_flux.main(["--input", os.path.join(DATA, "current_condition.json"),
                                "--output", str(out)]) == 0
    assert out.stat().st_size > 10_000


@pytest.mark.parametrize("name", ["histogram_1d.csv", "histogram_2d.csv"])
def test_histogram_renders(tmp_path, name):
    fig = plot_histogram.build_figure(os.path.join(DATA, name))
    assert fig.axes
    out = tmp_path / f"{name}.png"
    assert plot_histogram.main(["--input", os.path.join(DATA, name),
                                "--output", str(out)]) == 0
    assert out.stat().st_size > 10_000


def test_empty_trajectory_schema_mismatch(tmp_path):
    empty = tmp_path / "empty.csv"
    empty.write_text("")
    with pytest.raises(SchemaMismatch):
        plot_trajectories.build_figure(str(empty))
    assert plot_trajectories.main(["--input", str(empty),
                                   "--output", str(tmp_path / "x.png")]) == 2
    header_only = tmp_path / "header.csv"
    header_only.write_text("s,q_1,v_1,event_flag\n")
    with pytest.raises(SchemaMismatch):
        plot_trajectories.build_figure(str(header_only))


def test_wrong_columns_schema_mismatch(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("a,b\n1,2\n")
    for mod in (plot_foliation, plot_histogram):
        with pytest.raises(SchemaMismatch):
            mod.build_figure(str(bad))


def test_rendering_deterministic(tmp_path):
    blobs = []
    for sub in ("r1.png", "r2.png"):
        out = tmp_path / sub
        plot_histogram.main(["--input", os.path.join(DATA, "histogram_1d.csv"),
                             "--output", str(out)])
        blobs.append(out.read_bytes())
    assert blobs[0] == blobs[1]
