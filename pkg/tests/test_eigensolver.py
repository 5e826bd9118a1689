import numpy as np
import pytest

import spreadwidth as sw
from spreadwidth.oscillator import OperatorMatrix


def test_unperturbed_shell_spectrum():
    spec = sw.diagonalize(sw.hamiltonian(sw.ModelParameters(0.0, 5)))
    expected = np.repeat(np.arange(1, 7, dtype=float), np.arange(1, 7))
    assert np.max(np.abs(spec.energies - expected)) <= 1e-10
    # degenerate clusters canonicalize to the basis unit vectors
    assert np.array_equal(spec.coefficients, np.eye(spec.dim))


def test_small_offdiagonal_block():
    basis = sw.build_basis(1)
    m = np.array([[0.0, 1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 5.0]])
    spec = sw.diagonalize(OperatorMatrix(basis, m))
    assert np.allclose(spec.energies, [-1.0, 1.0, 5.0], atol=1e-12)
    r = 1.0 / np.sqrt(2.0)
    # canonical sign: first significant entry positive
    assert np.allclose(spec.coefficients[0], [r, -r, 0.0], atol=1e-12)
    assert np.allclose(spec.coefficients[1], [r, r, 0.0], atol=1e-12)


def test_rejects_non_symmetric():
    basis = sw.build_basis(1)
    m = np.array([[0.0, 1.0, 0.0], [0.0, 0.0, 0.0], [0.0, 0.0, 5.0]])
    with pytest.raises(ValueError):
        sw.diagonalize(OperatorMatrix(basis, m, symmetric=False))
    with pytest.raises(ValueError):
        sw.diagonalize(OperatorMatrix(basis, m, symmetric=True))


def test_rejects_non_finite():
    basis = sw.build_basis(1)
    m = np.full((3, 3), np.nan)
    with pytest.raises(ValueError):
        sw.diagonalize(OperatorMatrix(basis, m))


def test_orthonormality_and_residuals(h_default, spec_default):
    c = spec_default.coefficients
    assert np.max(np.abs(c @ c.T - np.eye(spec_default.dim))) <= 1e-10
    resid = h_default.mat @ c.T - c.T * spec_default.energies[np.newaxis, :]
    assert np.max(np.linalg.norm(resid, axis=0)) <= 1e-8 * np.linalg.norm(h_default.mat)


def test_trace_preserved(h_default, spec_default):
    tr = np.trace(h_default.mat)
    assert abs(spec_default.energies.sum() - tr) <= 1e-8 * abs(tr)


def test_deterministic_output(h_default, spec_default):
    again = sw.diagonalize(h_default)
    assert np.array_equal(again.energies, spec_default.energies)
    assert np.array_equal(again.coefficients, spec_default.coefficients)


def test_energies_converged_against_enlarged_basis(spec_default, spec_enlarged):
    diff = np.abs(spec_default.energies - spec_enlarged.energies[: spec_default.dim])
    # frozen from the enlarged-basis oracle: 60 lowest states are stable to
    # 1e-6; the lowest 100 only to ~1e-3 (truncation reaches down by then)
    assert np.max(diff[:60]) <= 1e-6
    assert np.max(diff[:100]) <= 2e-3


def test_subspace_full_cutoff_equals_diagonalize(h_default, spec_default):
    sub = sw.subspace_solve(h_default, h_default.basis.max_shell)
    assert np.array_equal(sub.energies, spec_default.energies)
    assert np.array_equal(sub.coefficients, spec_default.coefficients)


def test_subspace_one_shell(h_default):
    sub = sw.subspace_solve(h_default, 1)
    assert sub.dim == 3
    assert sub.basis.max_shell == 1


def test_subspace_rejects_large_cutoff(h_default):
    with pytest.raises(ValueError):
        sw.subspace_solve(h_default, 31)


def test_ritz_energies_close_to_full(h_default, spec_default):
    sub = sw.subspace_solve(h_default, 20)
    assert np.max(np.abs(sub.energies[:30] - spec_default.energies[:30])) <= 1e-3


def test_cauchy_interlacing():
    rng = np.random.default_rng(11)
    basis = sw.build_basis(3)
    a = rng.standard_normal((10, 10))
    m = a + a.T  # bitwise symmetric
    full = np.sort(np.linalg.eigvalsh(m))
    sub = sw.subspace_solve(OperatorMatrix(basis, m), 2)
    k = sub.dim
    for j, mu in enumerate(sub.energies):
        assert full[j] - 1e-12 <= mu <= full[j + 10 - k] + 1e-12
