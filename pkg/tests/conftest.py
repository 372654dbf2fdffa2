import pytest

from thermokernel.gas import GasModel, add_ideal_gas
from thermokernel.reservoirs import add_reservoir
from thermokernel.systems import World


@pytest.fixture
def world():
    return World()


@pytest.fixture
def gas(world):
    """One mole of monoatomic gas in natural units, reference (1, 1)."""
    return add_ideal_gas(world, GasModel())


@pytest.fixture
def unit_reservoir(world):
    return add_reservoir(world, 1.0)


def make_abstract_atoms(world, n):
    return [world.new_atom("abstract") for _ in range(n)]
