import numpy as np
import pytest

from bohmdirac import geometry as geo
from bohmdirac.errors import (InvalidFamily, KinkWithoutSide, LightlikeTangent,
                              NotInFuture)
from bohmdirac.minkowski import apply_boost, interval2

SQ75 = np.sqrt(0.75)


# ---------------------------------------------------------------------------
# Minkowski primitives
# ---------------------------------------------------------------------------

def test_interval_boost_invariance():
    rng = np.random.default_rng(0)
    pts = rng.normal(size=(200, 2, 2))
    for v in (-0.8, -0.3, 0.5, 0.95):
        boosted = apply_boost(v, pts)
        s2 = interval2(pts[:, 0], pts[:, 1])
        s2b = interval2(boosted[:, 0], boosted[:, 1])
        assert np.max(np.abs(s2 - s2b)) < 1e-11


# ---------------------------------------------------------------------------
# normals
# ---------------------------------------------------------------------------

def test_flat_leaf_normal(flat):
    n = geo.leaf_normal(flat, 1.0, 0.37)
    assert np.allclose(n.vec, [1.0, 0.0])
    assert abs(n.norm2 - 1.0) < 1e-12


def test_wedge_flank_normal():
    # outward flank slope -0.5 on x > 0 for a peak-shaped leaf
    fol = geo.wedge_foliation(0.5, 0.0, SQ75)
    n = geo.leaf_normal(fol, 1.0, 2.0)
    assert np.allclose(n.vec, np.array([1.0, -0.5]) / SQ75, atol=1e-14)
    assert abs(n.norm2 - 1.0) < 1e-12


def test_kink_side_normals_opposite_and_unit():
    fol = geo.wedge_foliation(0.5, 0.0, SQ75)
    xk = float(fol.kink_x(np.asarray(1.0))[0])
    nl = geo.leaf_normal(fol, 1.0, xk, side=geo.LEFT)
    nr = geo.leaf_normal(fol, 1.0, xk, side=geo.RIGHT)
    assert nl.vec[1] == -nr.vec[1] != 0.0
    assert abs(abs(np.arctanh(nl.vec[1] / nl.vec[0]))
               - abs(np.arctanh(nr.vec[1] / nr.vec[0]))) < 1e-14
    for n in (nl, nr):
        assert abs(n.norm2 - 1.0) < 1e-12
    with pytest.raises(KinkWithoutSide):
        geo.leaf_normal(fol, 1.0, xk)


def test_lightlike_rejected():
    with pytest.raises(LightlikeTangent):
        geo.normal_from_slope(0.999, delta=0.02)
    with pytest.raises(LightlikeTangent):
        geo.WedgeLeaf(a=0.995)


# ---------------------------------------------------------------------------
# Lorentzian distance
# ---------------------------------------------------------------------------

def test_distance_flat_vertical():
    assert abs(geo.lorentzian_distance_to_surface(geo.FlatLeaf(0.0), [2.0, 0.0])
               - 2.0) < 1e-12


def test_distance_flat_offset_column():
    # (1, 3) above t = 0: the causal maximizer is the point straight below
    assert abs(geo.lorentzian_distance_to_surface(geo.FlatLeaf(0.0), [1.0, 3.0])
               - 1.0) < 1e-12


def test_distance_not_in_future():
    with pytest.raises(NotInFuture):
        geo.lorentzian_distance_to_surface(geo.FlatLeaf(0.0), [-0.1, 3.0])


def test_distance_peak_wedge_closed_form_and_bruteforce():
    # peak surface t = -a|x|: interior maximizer u* = a t / (1 - a^2),
    # distance above the apex t / sqrt(1 - a^2)
    a = 0.5
    surf = geo.WedgeLeaf(a=a)
    for t in (0.5, 1.0, 2.3):
        d, u = geo.lorentzian_distance_to_surface(surf, [t, 0.0], return_argmax=True)
        assert abs(d - t / np.sqrt(1 - a * a)) < 1e-10
        assert abs(abs(u) - a * t / (1 - a * a)) < 1e-6
        # brute-force oracle: dense grid without refinement
        uu = np.linspace(-10 * t, 10 * t, 200_001)
        tau2 = np.maximum((t + a * np.abs(uu)) ** 2 - uu ** 2, 0.0)
        assert abs(d - np.sqrt(tau2.max())) < 1e-6


def test_distance_batch_matches_scalar():
    surf = geo.WedgeLeaf(a=0.4)
    pts = np.array([[1.0, 0.3], [2.0, -1.2], [0.7, 4.0]])
    batch = geo.lorentzian_distance_to_surface(surf, pts)
    for p, d in zip(pts, batch):
        assert abs(geo.lorentzian_distance_to_surface(surf, p) - d) < 1e-12


# ---------------------------------------------------------------------------
# analytic wedge family
# ---------------------------------------------------------------------------

def test_wedge_family_validation():
    geo.wedge_foliation(0.9, 0.0, 0.1)          # accepted: c - a|v| = 0.1 > 0
    with pytest.raises(InvalidFamily):
        geo.wedge_foliation(0.5, 2.0, 0.5)      # c - a|v| = -0.5
    with pytest.raises(InvalidFamily):
        geo.wedge_foliation(0.99, 0.0, 1.0)     # beyond spacelike margin
    flatf = geo.wedge_foliation(0.0, 0.0, 1.0)  # flat degenerate family
    assert flatf.n_kinks == 0
    assert float(np.asarray(flatf.f(2.0, 5.0))) == 2.0


def test_wedge_family_kink_curve_and_lapse():
    fol = geo.wedge_foliation(0.5, 0.3, 0.9)
    s = np.array([1.0, 2.0])
    assert np.allclose(fol.kink_x(s), [[0.3, 0.6]])
    assert np.allclose(fol.kink_xdot(s), [[0.3, 0.3]])
    # lapse jumps across the kink for moving kinks
    assert float(np.asarray(fol.lapse(1.0, 0.2))) == pytest.approx(0.9 - 0.15)
    assert float(np.asarray(fol.lapse(1.0, 0.4))) == pytest.approx(0.9 + 0.15)


def test_foliation_ordering_and_lapse_positive(moving_wedge):
    rng = np.random.default_rng(1)
    s = rng.uniform(0.1, 5.0, size=1000)
    x = rng.uniform(-5.0, 5.0, size=1000)
    f0 = np.asarray(moving_wedge.f(s, x))
    f1 = np.asarray(moving_wedge.f(s + 1e-3, x))
    assert np.all(f1 > f0)
    lap = np.asarray(moving_wedge.lapse(s, x, side=1.0))
    assert np.all(lap > 0)


# ---------------------------------------------------------------------------
# dn = 0 builder
# ---------------------------------------------------------------------------

@pytest.fixture(scope="module")
def dn0_peak():
    surf = geo.WedgeLeaf(a=0.5)
    s_grid = np.array([0.5, 1.0, 1.7, 2.5])
    x_grid = np.linspace(-3.0, 3.0, 121)
    return geo.build_dn0_foliation(surf, s_grid, x_grid, tol=1e-10)


def test_dn0_flat_propagation():
    fol = geo.build_dn0_foliation(geo.FlatLeaf(0.0), [0.5, 1.0],
                                  np.linspace(-2, 2, 41), tol=1e-10)
    assert np.max(np.abs(fol.table - np.array([[0.5], [1.0]]))) < 1e-9
    assert all(len(k) == 0 for k in fol.kink_curves)


def test_dn0_peak_wedge_closed_form(dn0_peak):
    # every leaf is the inward normal translation of both flanks:
    # f_s(x) = -a|x| + s*sqrt(1-a^2), kink persists at x = 0
    a = 0.5
    for i, s in enumerate(dn0_peak.s_grid):
        expect = -a * np.abs(dn0_peak.x_grid) + s * np.sqrt(1 - a * a)
        assert np.max(np.abs(dn0_peak.table[i] - expect)) < 1e-8
        assert len(dn0_peak.kink_curves[i]) == 1
        assert abs(dn0_peak.kink_curves[i][0]) < 1e-9


def test_dn0_peak_matches_analytic_wedge(dn0_peak):
    fol = geo.wedge_foliation(0.5, 0.0, SQ75)
    for i, s in enumerate(dn0_peak.s_grid):
        # analytic family f_s(x) = c*s - a|x| with c = sqrt(1 - a^2)
        assert np.max(np.abs(dn0_peak.table[i]
                             - np.asarray(fol.f(s, dn0_peak.x_grid)))) < 1e-8


def test_dn0_distance_on_leaf(dn0_peak):
    rng = np.random.default_rng(2)
    worst = 0.0
    for _ in range(100):
        s = float(rng.choice(dn0_peak.s_grid))
        x = float(rng.uniform(-3.0, 3.0))
        t = dn0_peak.f(s, x)
        d = geo.lorentzian_distance_to_surface(dn0_peak.surface, np.array([t, x]))
        worst = max(worst, abs(d - s))
    assert worst < 2e-10


def test_dn0_valley_smooth_cap():
    # valley surface t = +a|x|: the future maximizer sits at the vertex for
    # a cone of points, the leaves cap it smoothly (no kink detected) and
    # follow the hyperbola sqrt(s^2 + x^2) near the axis
    surf = geo.WedgeLeaf(a=-0.5)
    s_grid = np.array([0.8, 1.5])
    x_grid = np.linspace(-1.5, 1.5, 101)
    fol = geo.build_dn0_foliation(surf, s_grid, x_grid, tol=1e-10)
    assert all(len(k) == 0 for k in fol.kink_curves)
    inner = np.abs(x_grid) < 0.4   # inside the vertex cone for both leaves
    for i, s in enumerate(s_grid):
        hyper = np.sqrt(s * s + x_grid[inner] ** 2)
        assert np.max(np.abs(fol.table[i][inner] - hyper)) < 1e-8
    # grid oracle: the maximizer stays at the vertex on the axis region
    assert np.max(np.abs(fol.argmax_table[:, inner])) < 1e-5


def test_dn0_envelope_normals(dn0_peak):
    # slope/lapse from the envelope formulas against the closed form
    s = 1.0
    assert abs(dn0_peak.slope(s, 1.3) + 0.5) < 1e-7
    assert abs(dn0_peak.slope(s, -1.3) - 0.5) < 1e-7
    assert abs(dn0_peak.lapse(s, 1.3) - SQ75) < 1e-7


def test_dn0_kink_rapidity_symmetry(dn0_peak):
    (rl, rr), = dn0_peak.kink_rapidities(1.0)
    print(f"dn0 kink rapidities: left={rl:.9f} right={rr:.9f} "
          f"(|diff| = {abs(rl - rr):.2e})")
    assert abs(rl - rr) < 1e-6
    # arctanh(a): rapidity between each flank and the vertical kink curve
    assert abs(abs(rl) - np.arctanh(0.5)) < 1e-6


def test_dn0_asymmetric_wedge_moving_kink_rapidity():
    # different flank slopes make the kink curve move; the constant-distance
    # law still equalizes the flank-to-kink rapidities on both sides
    surf = geo.WedgeLeaf(a=0.0, a_left=0.3, a_right=0.6)
    s_grid = np.array([0.8, 1.4])
    x_grid = np.linspace(-2.5, 2.5, 101)
    fol = geo.build_dn0_foliation(surf, s_grid, x_grid, tol=1e-11)
    k0 = fol.kink_curves[0]
    k1 = fol.kink_curves[1]
    assert len(k0) == 1 and len(k1) == 1
    assert k1[0] != pytest.approx(k0[0], abs=1e-3)   # the kink moves
    (rl, rr), = fol.kink_rapidities(1.1)
    print(f"asymmetric dn0 rapidities: left={rl:.9f} right={rr:.9f} "
          f"(|diff| = {abs(rl - rr):.2e})")
    assert abs(rl - rr) < 1e-6


def test_spacelike_violation_detected():
    surf = geo.WedgeLeaf(a=0.5)
    fol = geo.Dn0Foliation(surf, tol=1e-10)
    with pytest.raises(Exception):
        fol.f(-1.0, 0.0)
