import itertools

import numpy as np
import pytest

from bohmdirac import dirac, geometry as geo, guidance as gd
from bohmdirac.errors import CornerPoint, NullCurrent, OnKinkSet

SQ75 = np.sqrt(0.75)


# ---------------------------------------------------------------------------
# velocities and densities
# ---------------------------------------------------------------------------

def test_rest_product_velocities(wedge, psi_rest2):
    v = gd.guidance_velocity(psi_rest2, wedge, 1.0, [0.7, -1.2])
    assert np.allclose(v, [[1.0, 0.0], [1.0, 0.0]], atol=1e-14)


def test_single_particle_velocity_foliation_independent(flat, wedge, rep2):
    psi = dirac.MultiTimeWaveFunction.product(rep2, [1.0], [[{"k": 0.8}]])
    vf = gd.guidance_velocity(psi, flat, 1.0, [0.6])
    vw = gd.guidance_velocity(psi, wedge, 1.0, [0.6])
    v = 0.8 / np.sqrt(1.64)
    assert np.allclose(vf, [[1.0, v]], atol=1e-12)
    assert np.allclose(vw, [[1.0, v]], atol=1e-12)


def test_entangled_velocity_side_dependence(wedge, psi_entangled):
    """Particle 2 at the kink: particle 1's velocity depends on the side,
    particle 2's own does not (its own normal never enters)."""
    vL = gd.guidance_velocity(psi_entangled, wedge, 1.0, [0.8, 0.0], sides=[0, -1])
    vR = gd.guidance_velocity(psi_entangled, wedge, 1.0, [0.8, 0.0], sides=[0, +1])
    assert abs(vL[0, 1] - vR[0, 1]) > 1e-3
    assert abs(vL[1, 1] - vR[1, 1]) < 1e-14


def test_velocity_timelike_or_lightlike(wedge, psi_entangled):
    rng = np.random.default_rng(9)
    chart = gd.ConfigurationChart(wedge, 2)
    s = rng.uniform(0.3, 4.0, size=500)
    q = rng.uniform(-4, 4, size=(500, 2))
    flow = gd.chart_flow(psi_entangled, chart, s, q, np.ones_like(q))
    assert np.nanmax(np.abs(flow["w"])) <= 1.0 + 1e-10


def test_null_current_raises(flat, rep2):
    # equal-weight opposite modes create nodes of the current
    psi = dirac.MultiTimeWaveFunction.product(
        rep2, [1.0], [[{"k": 0.5}, {"k": 0.5, "amplitude": -1.0}]])
    with pytest.raises(NullCurrent):
        gd.guidance_velocity(psi, flat, 0.0, [0.0])


def test_rho_sigma_flat_equals_density(flat, rep2, psi_rest2):
    rho = gd.rho_sigma(psi_rest2, flat, 1.0, [0.4, -0.4])
    T = dirac.current_tensor_components(
        psi_rest2, np.array([[1.0, 0.4], [1.0, -0.4]]))
    assert rho == pytest.approx(T[0, 0], rel=1e-13)


def test_rho_sigma_product_factorization(wedge, rep2):
    """Algebraic oracle: for product states rho factorizes into the
    per-particle normal contractions."""
    f1 = [{"k": 0.7}, {"k": -0.2, "amplitude": 0.5}]
    f2 = [{"k": 0.4}]
    psi = dirac.MultiTimeWaveFunction.product(rep2, [1.0, 1.3], [f1, f2])
    s, q = 1.2, np.array([0.9, -1.7])
    rho = gd.rho_sigma(psi, wedge, s, q)
    parts = []
    for j, (f, m) in enumerate(zip((f1, f2), (1.0, 1.3))):
        psi1 = dirac.MultiTimeWaveFunction.product(rep2, [m], [f])
        parts.append(gd.rho_sigma(psi1, wedge, s, [q[j]]))
    assert rho == pytest.approx(parts[0] * parts[1], rel=1e-12)


def test_rho_sigma_kink_sides_differ(wedge, psi_entangled):
    rl = gd.rho_sigma(psi_entangled, wedge, 1.0, [0.0, 0.9], sides=[-1, 0])
    rr = gd.rho_sigma(psi_entangled, wedge, 1.0, [0.0, 0.9], sides=[+1, 0])
    assert abs(rl - rr) > 1e-6
    assert rl >= 0 and rr >= 0


# ---------------------------------------------------------------------------
# chart current
# ---------------------------------------------------------------------------

def test_chart_current_flat(flat, rep2):
    psi = dirac.MultiTimeWaveFunction.product(rep2, [1.0], [[{"k": 0.6}]])
    chart = gd.ConfigurationChart(flat, 1)
    cur = gd.chart_current(psi, chart, (1.0, [0.3]))
    T = dirac.current_tensor_components(psi, np.array([[1.0, 0.3]]))
    assert cur.j0 == pytest.approx(T[0], rel=1e-13)
    assert cur.jvec[0] / cur.j0 == pytest.approx(T[1] / T[0], rel=1e-12)


def test_chart_rest_state_stays_put(wedge, psi_rest2):
    """Rest product state on the wedge: chart velocity vanishes, so the
    space-time world lines keep x constant through the chart map."""
    chart = gd.ConfigurationChart(wedge, 2)
    flow = gd.chart_flow(psi_rest2, chart, np.array([1.0]), np.array([[0.8, -0.5]]))
    assert np.max(np.abs(flow["dqds"])) < 1e-14
    emb = chart.embed(np.array([1.0, 2.0]), np.array([[0.8, -0.5], [0.8, -0.5]]))
    assert np.allclose(emb[:, :, 1], [[0.8, -0.5], [0.8, -0.5]])


def test_continuity_equation_fd(wedge, psi_entangled):
    """FD oracle for d_s j0 + div_q jhat = 0 away from the kink set."""
    chart = gd.ConfigurationChart(wedge, 2)
    rng = np.random.default_rng(12)
    h = 1e-3
    worst = 0.0
    for _ in range(20):
        s = float(rng.uniform(0.5, 3.0))
        q = rng.uniform(0.2, 3.0, size=2) * rng.choice([-1.0, 1.0], size=2)
        def j(s_, q_):
            return gd.chart_flow(psi_entangled, chart, np.array([s_]), q_[None])
        div = (j(s + h, q)["j0"][0] - j(s - h, q)["j0"][0]) / (2 * h)
        for k in range(2):
            dq = np.zeros(2)
            dq[k] = h
            div += (j(s, q + dq)["jhat"][0, k] - j(s, q - dq)["jhat"][0, k]) / (2 * h)
        scale = abs(j(s, q)["j0"][0])
        worst = max(worst, abs(div) / scale)
    assert worst < 1e-5


# ---------------------------------------------------------------------------
# the current form and the pushforward identity
# ---------------------------------------------------------------------------

def test_current_form_n1_rest(flat, rep2):
    psi = dirac.MultiTimeWaveFunction.product(rep2, [1.0], [[{"k": 0.0}]])
    J = gd.current_form_J(psi, np.array([[0.3, 0.8]]))
    T = dirac.current_tensor_components(psi, np.array([[0.3, 0.8]]))
    assert J[0] == pytest.approx(-T[1], abs=1e-14)   # rest: zero
    assert J[1] == pytest.approx(T[0], rel=1e-14)
    assert abs(J[0]) < 1e-14


def test_current_form_interleaved_index_oracle(psi_entangled):
    """Brute-force check of the two equivalent index orderings for N = 2:
    the interleaved ordering (1mu, D1, 2nu, D2) with no prefactor equals the
    packed ordering (1mu, 2nu, D1, D2) with sign (-1)^{N(N-1)/2}."""
    cfg = np.array([[0.4, -0.7], [0.9, 1.1]])
    T = dirac.current_tensor_components(psi_entangled, cfg)
    eps = gd.levi_civita(4)
    J16 = np.zeros((4, 4))
    for D1, D2 in itertools.product(range(4), repeat=2):
        acc = 0.0
        for mu, nu in itertools.product(range(2), repeat=2):
            acc += T[mu, nu] * eps[0 + mu, D1, 2 + nu, D2]
        J16[D1, D2] = acc
    J17 = gd.current_form_J(psi_entangled, cfg)
    assert np.max(np.abs(J16 - J17)) < 1e-12 * max(np.max(np.abs(J17)), 1)


def test_current_form_antisymmetry(psi_entangled):
    cfg = np.array([[0.4, -0.7], [0.9, 1.1]])
    J = gd.current_form_J(psi_entangled, cfg)
    assert np.max(np.abs(J + J.T)) < 1e-13


def test_pushforward_flat_exact(flat, rep2):
    psi = dirac.MultiTimeWaveFunction.product(rep2, [1.0], [[{"k": 0.5}]])
    chart = gd.ConfigurationChart(flat, 1)
    res, lhs, rhs = gd.pushforward_identity_check(psi, chart, (1.0, [0.4]))
    assert res < 1e-14


def test_pushforward_wedge_random(chart_wedge2, psi_entangled):
    rng = np.random.default_rng(13)
    worst = 0.0
    for _ in range(100):
        s = float(rng.uniform(0.3, 4.0))
        q = rng.uniform(0.05, 4.0, size=2) * rng.choice([-1.0, 1.0], size=2)
        res, _, _ = gd.pushforward_identity_check(psi_entangled, chart_wedge2, (s, q))
        worst = max(worst, res)
    assert worst < 1e-9


def test_pushforward_jacobian_fd_oracle(chart_wedge2, psi_entangled):
    """The analytic chart Jacobian against centered finite differences."""
    s, q = 1.3, np.array([0.8, -1.6])
    M = chart_wedge2.jacobian(np.array([s]), q[None])[0]
    h = 1e-6
    fd = np.zeros_like(M)
    for col, dvec in enumerate(np.eye(3)):
        yp = (s + h * dvec[0], q + h * dvec[1:])
        ym = (s - h * dvec[0], q - h * dvec[1:])
        ep = chart_wedge2.embed(np.array([yp[0]]), yp[1][None])[0].ravel()
        em = chart_wedge2.embed(np.array([ym[0]]), ym[1][None])[0].ravel()
        fd[:, col] = (ep - em) / (2 * h)
    assert np.max(np.abs(M - fd)) < 1e-8


def test_form_continuous_pushforward_jumps_on_kink(chart_wedge2, psi_entangled):
    """On the kink set J itself has equal side limits (it never sees the
    foliation) while the chart expression phi_* J jumps: the two tangent
    planes of the chart image differ across the kink."""
    s, q = 1.0, np.array([0.0, 1.2])
    cfg = chart_wedge2.embed(np.array([s]), q[None])
    J = gd.current_form_J(psi_entangled, cfg)[0]
    JL = gd.current_form_J(psi_entangled, cfg)[0]   # side-independent by construction
    assert np.max(np.abs(J - JL)) == 0.0
    with pytest.raises(OnKinkSet):
        gd.pushforward_identity_check(psi_entangled, chart_wedge2, (s, q))
    resL, lhsL, _ = gd.pushforward_identity_check(psi_entangled, chart_wedge2,
                                                  (s, q), sides=[-1, 0])
    resR, lhsR, _ = gd.pushforward_identity_check(psi_entangled, chart_wedge2,
                                                  (s, q), sides=[+1, 0])
    assert resL < 1e-9 and resR < 1e-9
    gap = np.max(np.abs(lhsL - lhsR))
    assert gap > 1e-6
    # and the limits from nearby off-kink points agree with the tagged ones
    eps = 1e-9
    Jn = gd.current_form_J(psi_entangled,
                           chart_wedge2.embed(np.array([s]), np.array([[eps, 1.2]])))[0]
    assert np.max(np.abs(Jn - J)) < 1e-7


# ---------------------------------------------------------------------------
# current condition at kinks
# ---------------------------------------------------------------------------

def test_current_condition_product_rest(wedge, psi_rest2, rep2):
    chart = gd.ConfigurationChart(wedge, 2)
    rep = gd.current_condition_check(psi_rest2, chart, (1.0, [0.7, 0.0]))
    assert rep.slot == 1
    assert rep.mismatch < 1e-10
    # a rest state carries no flux across the static kink: both sides ~ 0
    assert rep.null_flux and not rep.same_sign
    # a moving product state gives equal nonzero fluxes of one sign
    psi = dirac.MultiTimeWaveFunction.product(
        rep2, [1.0, 1.0], [[{"k": 0.5}], [{"k": 0.4}]])
    rep = gd.current_condition_check(psi, chart, (1.0, [0.7, 0.0]))
    assert not rep.null_flux and rep.same_sign
    assert rep.mismatch < 1e-10


def test_current_condition_entangled_random(chart_wedge2, psi_entangled):
    rng = np.random.default_rng(14)
    worst = 0.0
    for _ in range(100):
        s = float(rng.uniform(0.3, 4.0))
        slot = int(rng.integers(2))
        q = np.zeros(2)
        q[slot] = 0.0
        q[1 - slot] = float(rng.uniform(0.1, 4.0) * rng.choice([-1, 1]))
        rep = gd.current_condition_check(psi_entangled, chart_wedge2, (s, q))
        assert rep.slot == slot
        worst = max(worst, rep.mismatch)
    assert worst < 1e-9


def test_current_condition_moving_kink(psi_entangled):
    """v != 0 exercises the nontrivial cancellation between the density
    jump and the lapse jump in the normal flux."""
    fol = geo.wedge_foliation(0.5, 0.3, 0.9)
    chart = gd.ConfigurationChart(fol, 2)
    rng = np.random.default_rng(15)
    for _ in range(25):
        s = float(rng.uniform(0.5, 3.0))
        q = np.array([0.3 * s, float(rng.uniform(1.0, 3.0))])
        rep = gd.current_condition_check(psi_entangled, chart, (s, q))
        assert rep.mismatch < 1e-9
        # the one-sided densities genuinely differ; only the flux balances
        fl = gd.chart_current(psi_entangled, chart, (s, q), sides=[-1, 0])
        fr = gd.chart_current(psi_entangled, chart, (s, q), sides=[+1, 0])
        assert abs(fl.j0 - fr.j0) > 1e-12


def test_current_condition_spd_product_invariance(chart_wedge2, psi_entangled):
    rng = np.random.default_rng(16)
    A = rng.normal(size=(3, 3))
    G = A @ A.T + 3 * np.eye(3)
    for s, qo in ((0.7, 1.3), (2.1, -2.4)):
        plain = gd.current_condition_check(psi_entangled, chart_wedge2,
                                           (s, [0.0, qo]))
        spd = gd.current_condition_check(psi_entangled, chart_wedge2,
                                         (s, [0.0, qo]), product=G)
        assert spd.mismatch < 1e-9
        assert plain.same_sign == spd.same_sign
        # fluxes rescale by a common positive factor
        ratio = spd.flux_left / plain.flux_left
        assert ratio > 0
        assert spd.flux_right / plain.flux_right == pytest.approx(ratio, rel=1e-12)


def test_current_condition_corner_rejected(chart_wedge2, psi_entangled):
    with pytest.raises(CornerPoint):
        gd.current_condition_check(psi_entangled, chart_wedge2, (1.0, [0.0, 0.0]))
    with pytest.raises(OnKinkSet):
        gd.current_condition_check(psi_entangled, chart_wedge2, (1.0, [0.5, 0.7]))


def test_kink_chart_set_pieces(chart_wedge2):
    ks = chart_wedge2.kink_set()
    assert ks.pieces() == [(0, 0), (1, 0)]
    g = ks.gradient(1, 0, 1.0)
    assert np.allclose(g, [0.0, 0.0, 1.0])
    q = ks.point(0, 0, 2.0, [1.5])
    assert np.allclose(q, [0.0, 1.5])
