import numpy as np
import pytest

from laplab.lattice import Field, GridSpec, PHYSICAL, sample


@pytest.fixture(scope="session")
def g2():
    return GridSpec(dimension=2, half_width=6.8, points_per_axis=128)


@pytest.fixture(scope="session")
def g2_fine():
    return GridSpec(dimension=2, half_width=6.8, points_per_axis=256)


@pytest.fixture(scope="session")
def g3():
    return GridSpec(dimension=3, half_width=6.8, points_per_axis=32)


@pytest.fixture(scope="session")
def g3_well():
    return GridSpec(dimension=3, half_width=6.0, points_per_axis=32)


@pytest.fixture(scope="session")
def gauss2(g2):
    return sample(lambda x, y: np.exp(-(x**2 + y**2) / 2.0), g2)


@pytest.fixture(scope="session")
def gauss3(g3):
    return sample(lambda x, y, z: np.exp(-(x**2 + y**2 + z**2) / 2.0), g3)


def gaussian_field(grid, width=1.0, center=None, wavevector=None) -> Field:
    center = center or (0.0,) * grid.dimension
    wavevector = wavevector or (0.0,) * grid.dimension
    r2 = sum((x - c) ** 2 for x, c in zip(grid.coord_grids(), center))
    ph = sum(k * x for x, k in zip(grid.coord_grids(), wavevector))
    vals = np.exp(-r2 / (2.0 * width**2)) * np.exp(1j * ph)
    return Field(grid, np.ascontiguousarray(np.broadcast_to(vals, grid.shape)),
                 PHYSICAL)
