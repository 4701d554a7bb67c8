import numpy as np
import pytest

from gevrey_flow import (
    InteractionMatrix,
    Lattice,
    ModelConfig,
    PowerLawKernel,
)


@pytest.fixture(scope="session")
def cfg_repulsive_d1():
    """The d=1 repulsive configuration used by the decay acceptance runs."""
    return ModelConfig(
        d=1, s=1.0, nu=1.0, alpha=0.1, beta=0.1, epsilon=0.05,
        matrix=InteractionMatrix.scalar(-1.0), kernel=PowerLawKernel(2.0),
    )


@pytest.fixture(scope="session")
def cfg_rotation_d2():
    """The d=2 Hamiltonian (rotation) configuration."""
    return ModelConfig(
        d=2, s=1.0, nu=1.0, alpha=0.1, beta=0.1, epsilon=0.05,
        matrix=InteractionMatrix.rotation(), kernel=PowerLawKernel(2.0),
    )


@pytest.fixture(scope="session")
def lat16():
    return Lattice(1, 16)


@pytest.fixture(scope="session")
def lat8():
    return Lattice(1, 8)


def l2(coeffs):
    return float(np.sqrt((np.abs(coeffs) ** 2).sum()))
