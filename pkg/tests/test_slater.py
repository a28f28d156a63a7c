import numpy as np
import pytest

from bohmdirac import dirac, slater
from bohmdirac.errors import DegenerateField, InvalidFamily, NullCurrent


@pytest.fixture(scope="module")
def single_wave():
    return slater.MaxwellField([slater.MaxwellMode(
        k=np.array([0.0, 0.0, 1.3]), polarization=np.array([1.0, 0.0, 0.0]),
        amplitude=1.0, phase=0.3)])


@pytest.fixture(scope="module")
def geom():
    return slater.WedgeGeometry3D(a=0.5, v=0.2, c=1.0)


# ---------------------------------------------------------------------------
# field and stress tensor
# ---------------------------------------------------------------------------

def test_mode_validation():
    with pytest.raises(ValueError):
        slater.MaxwellMode(k=np.array([1.0, 0, 0]),
                           polarization=np.array([1.0, 0, 0]),
                           amplitude=1.0, phase=0.0)


def test_single_wave_stress_is_null_dyad(single_wave):
    """For one lightlike plane wave T^{mu nu} is proportional to k^mu k^nu."""
    x = np.array([0.2, 0.1, -0.4, 0.7])
    T = slater.stress_tensor(single_wave, x)
    k4 = np.array([1.3, 0.0, 0.0, 1.3])
    w2 = T[0, 0] / k4[0] ** 2
    assert np.max(np.abs(T - w2 * np.outer(k4, k4))) < 1e-13


def test_stress_invariants_random_fields():
    rng = np.random.default_rng(31)
    eta = np.diag([1.0, -1, -1, -1])
    for _ in range(20):
        fld = slater.MaxwellField.random(rng, n_modes=3)
        x = rng.normal(size=4)
        T = slater.stress_tensor(fld, x)
        assert np.max(np.abs(T - T.T)) < 1e-12
        assert abs(np.trace(eta @ T)) < 1e-10 * max(np.max(np.abs(T)), 1)
        assert T[0, 0] >= 0.0
        div = slater.stress_divergence_fd(fld, x)
        assert np.max(np.abs(div)) < 1e-6 * max(np.max(np.abs(T)), 1)


# ---------------------------------------------------------------------------
# guidance law
# ---------------------------------------------------------------------------

def test_velocity_single_wave_along_k(single_wave):
    v = slater.slater_velocity(single_wave, np.array([0.2, 0.1, -0.4, 0.7]),
                               np.array([1.0, 0, 0, 0]))
    assert np.allclose(v, [1.0, 0.0, 0.0, 1.0], atol=1e-12)


def test_velocity_flat_normal_reduces_to_t_mu0():
    rng = np.random.default_rng(32)
    fld = slater.MaxwellField.random(rng, n_modes=2)
    x = rng.normal(size=4)
    T = slater.stress_tensor(fld, x)
    v = slater.slater_velocity(fld, x, np.array([1.0, 0, 0, 0]))
    assert np.allclose(v, T[:, 0] / T[0, 0], atol=1e-13)


def test_velocity_componentwise_oracle_and_causal():
    rng = np.random.default_rng(33)
    for _ in range(50):
        fld = slater.MaxwellField.random(rng, n_modes=2)
        x = rng.normal(size=4)
        a = rng.uniform(0.0, 0.8)
        e = rng.normal(size=3)
        e /= np.linalg.norm(e)
        n = np.concatenate([[1.0], -a * e]) / np.sqrt(1 - a * a)
        T = slater.stress_tensor(fld, x)
        expect = np.array([sum(T[mu, nu] * n[nu] for nu in range(4))
                           for mu in range(4)])
        v = slater.slater_velocity(fld, x, n)
        assert np.allclose(v, expect / expect[0], atol=1e-12)
        assert np.linalg.norm(v[1:]) <= 1.0 + 1e-10


def test_null_current_on_zero_field():
    fld = slater.MaxwellField([])
    with pytest.raises(NullCurrent):
        slater.slater_velocity(fld, np.zeros(4), np.array([1.0, 0, 0, 0]))


# ---------------------------------------------------------------------------
# kink violation
# ---------------------------------------------------------------------------

def test_geometry_validation():
    with pytest.raises(InvalidFamily):
        slater.WedgeGeometry3D(a=1.2)
    with pytest.raises(InvalidFamily):
        slater.WedgeGeometry3D(a=0.5, v=3.0, c=1.0)


def test_kink_violation_random_fields(geom):
    rng = np.random.default_rng(34)
    for _ in range(100):
        fld = slater.MaxwellField.random(rng, n_modes=2)
        x = geom.point_on_kink(s=float(rng.uniform(0.3, 1.5)),
                               perp=(rng.normal(), rng.normal()))
        rep = slater.slater_kink_violation(fld, geom, x)
        assert rep["n_K_star"] is not None
        assert rep["continuation_fails"]
        assert rep["sign_left"] != rep["sign_right"]
        # the constructed normal gives strictly opposite signs by solving
        # n.j_L = +1, n.j_R = -1
        n = np.array(rep["n_K_star"])
        assert np.sign(n @ np.array(rep["j_L"])) > 0 > np.sign(n @ np.array(rep["j_R"]))


def test_degenerate_wedge_no_mismatch(single_wave):
    geom0 = slater.WedgeGeometry3D(a=0.0, v=0.0, c=1.0)
    rep = slater.slater_kink_violation(single_wave, geom0, np.array([0.5, 0.1, 0.2, 0.3]))
    assert rep["mismatch_geometric"] == 0.0
    assert not rep["continuation_fails"]
    assert rep["n_K_star"] is None


def test_violating_normal_degenerate_cases():
    j = np.array([1.0, 0.2, 0.0, 0.0])
    with pytest.raises(DegenerateField):
        slater.violating_normal(j, j)
    with pytest.raises(DegenerateField):
        slater.violating_normal(j, 0.5 * j)      # positively parallel
    n = slater.violating_normal(j, -0.5 * j)     # anti-parallel is fine
    assert n @ j > 0 > n @ (-0.5 * j)


def test_dirac_contrast_same_geometry(geom, rep4):
    psi = dirac.MultiTimeWaveFunction.product(rep4, [1.0], [[
        {"k": [0.3, 0.1, -0.2]}, {"k": [-0.4, 0.2, 0.5], "amplitude": 0.8}]])
    con = slater.dirac_kink_contrast(psi, geom, geom.point_on_kink(0.9))
    assert con["mismatch_geometric"] == 0.0
    assert con["chart_mismatch_rel"] < 1e-9


def test_divergence_constant_vs_varying(geom):
    rng = np.random.default_rng(35)
    fld = slater.MaxwellField.random(rng, n_modes=2)
    x = geom.point_on_kink(0.7)
    scale = float(np.max(np.abs(slater.stress_tensor(fld, x))))
    n_const = geom.normal_down(+1)
    assert abs(slater.slater_divergence_check(fld, lambda _: n_const, x)) < 1e-6 * scale

    ax = geom.axis

    def n_var(xx):
        chi = 0.3 * np.sin(0.8 * (xx[1:] @ ax) + 0.5 * xx[0])
        return np.concatenate([[np.cosh(chi)], -np.sinh(chi) * ax])

    assert abs(slater.slater_divergence_check(fld, n_var, x)) > 1e-3 * scale


def test_divergence_zero_field(geom):
    fld = slater.MaxwellField([])
    assert slater.slater_divergence_check(
        fld, lambda _: geom.normal_down(1), np.zeros(4)) == 0.0
