import pytest

import spreadwidth as sw


@pytest.fixture(scope="session")
def basis6():
    return sw.build_basis(6)


@pytest.fixture(scope="session")
def h_default():
    return sw.hamiltonian(sw.ModelParameters(0.1, 30))


@pytest.fixture(scope="session")
def spec_default(h_default):
    return sw.diagonalize(h_default)


@pytest.fixture(scope="session")
def spec_enlarged():
    return sw.diagonalize(sw.hamiltonian(sw.ModelParameters(0.1, 34)))


@pytest.fixture(scope="session")
def labels_default(spec_default):
    return sw.classify_symmetry(spec_default)


@pytest.fixture(scope="session")
def study_default(h_default, spec_default):
    return sw.delta_jprime_study(
        h_default, [1, 10, 15, 20], ("N", "l"), epsilon=1e-3, ref_spectrum=spec_default
    )
