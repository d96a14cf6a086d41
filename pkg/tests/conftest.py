from pathlib import Path

import pytest
from unittest.mock import Mock

import sys
sys.path.insert(0, str(Path(__file__).parent.parent))

from src.settings import Settings
from src.dirac_spectrum import DiracSpectrum
from src.eta_invariants import EtaCalculator
from src.families import example44_gamma, example44_gamma_prime, mjh_group, remark35_group, table2_group
from src.flat_manifold import build_group
from src.hodge_laplace import HodgeSpectrum
from src.isospec import IsospectralityChecker, LengthSpectrumCalculator
from src.spin_oracle import SpinOracle
from src.spin_structures import SpinStructureSolver


### Settings Fixtures ###
@pytest.fixture
def settings():
    """Fixture to create default engine settings"""
    return Settings()


### Group Fixtures ###
@pytest.fixture
def torus3():
    """Fixture to create the 3-torus group"""
    return build_group([], n=3, name="torus:3")


@pytest.fixture
def remark35():
    """Fixture to create the 3-dimensional group generated by diag(-1,-1,1) L_{e_3/2}"""
    return remark35_group()


@pytest.fixture
def gamma44():
    """Fixture to create the asymmetric 7-dimensional group Gamma"""
    return example44_gamma()


@pytest.fixture
def gamma44_prime():
    """Fixture to create the symmetric 7-dimensional group Gamma'"""
    return example44_gamma_prime()


@pytest.fixture
def m1():
    """Fixture to create the 4-dimensional Z_2^2 group M_1"""
    return table2_group("M1")


@pytest.fixture
def m1_prime():
    """Fixture to create the 4-dimensional Z_2^2 group M_1'"""
    return table2_group("M1p")


@pytest.fixture
def mjh_5_1_2():
    """Fixture to create Gamma_{1,2} in dimension 5"""
    return mjh_group(5, 1, 2)


### Engine Fixtures ###
@pytest.fixture
def solver(settings):
    """Fixture to create a SpinStructureSolver with a mocked logger"""
    engine = SpinStructureSolver(settings)
    engine.logger = Mock()
    return engine


@pytest.fixture
def dirac(settings):
    """Fixture to create a DiracSpectrum engine with a mocked logger"""
    engine = DiracSpectrum(settings)
    engine.logger = Mock()
    return engine


@pytest.fixture
def eta_calculator(settings):
    """Fixture to create an EtaCalculator with a mocked logger"""
    engine = EtaCalculator(settings)
    engine.logger = Mock()
    return engine


@pytest.fixture
def hodge(settings):
    """Fixture to create a HodgeSpectrum engine with a mocked logger"""
    engine = HodgeSpectrum(settings)
    engine.logger = Mock()
    return engine


@pytest.fixture
def oracle(settings):
    """Fixture to create a SpinOracle with a mocked logger"""
    engine = SpinOracle(settings)
    engine.logger = Mock()
    return engine


@pytest.fixture
def lengths(settings):
    """Fixture to create a LengthSpectrumCalculator with a mocked logger"""
    engine = LengthSpectrumCalculator(settings)
    engine.logger = Mock()
    return engine


@pytest.fixture
def checker(settings):
    """Fixture to create an IsospectralityChecker with a mocked logger"""
    engine = IsospectralityChecker(settings)
    engine.logger = Mock()
    return engine
