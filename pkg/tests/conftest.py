import numpy as np
import pytest

from mirrormag import (
    PhysicalParams,
    build_system_matrices,
    derive_params,
    figure_preset,
    run_sweep,
)


@pytest.fixture(scope="session")
def reference_params():
    return PhysicalParams()


@pytest.fixture(scope="session")
def reference_matrices(reference_params):
    derived = derive_params(reference_params)
    return build_system_matrices(derived, reference_params)


@pytest.fixture(scope="session")
def fig2a_result():
    """Shared full-resolution detuning-plane sweep (61x61)."""
    return run_sweep(figure_preset("fig2a"), jobs=2)


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20260810)
