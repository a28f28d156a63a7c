import numpy as np
import pytest

from bohmdirac import dirac, geometry
from bohmdirac.guidance import ConfigurationChart

SQ75 = np.sqrt(0.75)


@pytest.fixture(scope="session")
def rep2():
    return dirac.get_representation("dirac2")


@pytest.fixture(scope="session")
def rep4():
    return dirac.get_representation("dirac4")


@pytest.fixture(scope="session")
def wedge():
    """Static acceptance wedge: a = 0.5, v = 0, unit-distance lapse."""
    return geometry.wedge_foliation(0.5, 0.0, SQ75)


@pytest.fixture(scope="session")
def moving_wedge():
    return geometry.wedge_foliation(0.5, 0.3, 0.9)


@pytest.fixture(scope="session")
def flat():
    return geometry.flat_foliation()


@pytest.fixture(scope="session")
def psi_single(rep2):
    return dirac.MultiTimeWaveFunction.product(rep2, [1.0], [[{"k": 0.7}]])


@pytest.fixture(scope="session")
def psi_twomode(rep2):
    return dirac.MultiTimeWaveFunction.product(
        rep2, [1.0], [[{"k": 0.9}, {"k": -0.5, "amplitude": 0.6 + 0.3j}]])


@pytest.fixture(scope="session")
def psi_rest2(rep2):
    return dirac.MultiTimeWaveFunction.product(
        rep2, [1.0, 1.0], [[{"k": 0.0}], [{"k": 0.0}]])


@pytest.fixture(scope="session")
def psi_product2(rep2):
    return dirac.MultiTimeWaveFunction.product(
        rep2, [1.0, 1.0], [[{"k": 0.6}], [{"k": -0.3}]])


@pytest.fixture(scope="session")
def psi_entangled(rep2):
    """The acceptance state: swap-entangled two-mode factors, all modes
    right-moving so ensembles drift across the static kink."""
    return dirac.MultiTimeWaveFunction.superposition(rep2, [1.0, 1.0], [
        (1.0, [[{"k": 1.4}, {"k": 0.6}], [{"k": 1.0}, {"k": 0.2}]]),
        (1.0, [[{"k": 1.0}, {"k": 0.2}], [{"k": 1.4}, {"k": 0.6}]]),
    ])


@pytest.fixture(scope="session")
def chart_wedge2(wedge):
    return ConfigurationChart(wedge, 2)


@pytest.fixture(scope="session")
def chart_flat1(flat):
    return ConfigurationChart(flat, 1)
