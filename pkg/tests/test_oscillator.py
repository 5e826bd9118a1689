import math

import numpy as np
import pytest

import spreadwidth as sw
from spreadwidth.oscillator import FockState

from oracles import v_element_quadrature

LAM = 0.1


def test_basis_dimensions():
    assert sw.build_basis(0).dim == 1
    assert sw.build_basis(1).dim == 3
    assert sw.build_basis(30).dim == 496


def test_basis_order_and_index_maps():
    basis = sw.build_basis(3)
    assert [(s.n1, s.n2) for s in basis.states[:6]] == [(0, 0), (0, 1), (1, 0), (0, 2), (1, 1), (2, 0)]
    for i, s in enumerate(basis.states):
        assert basis.index(s) == i
        assert basis.state(i) == s
    # shell cutoffs select contiguous prefixes
    small = sw.build_basis(2)
    assert basis.states[: small.dim] == small.states


def test_basis_rejects_bad_input():
    with pytest.raises(ValueError):
        sw.build_basis(-1)
    with pytest.raises(ValueError):
        sw.build_basis(2).index((3, 0))
    with pytest.raises(ValueError):
        FockState(-1, 0)


def test_lowering_annihilates_vacuum(basis6):
    low = sw.ladder_matrix(basis6, 1, "lower").mat
    assert np.all(low[:, basis6.index((0, 0))] == 0.0)


def test_raising_amplitudes(basis6):
    up = sw.ladder_matrix(basis6, 1, "raise").mat
    assert up[basis6.index((1, 0)), basis6.index((0, 0))] == 1.0
    assert up[basis6.index((3, 1)), basis6.index((2, 1))] == pytest.approx(math.sqrt(3), abs=1e-15)
    # raising out of the truncation is dropped
    assert np.all(up[:, basis6.index((6, 0))] == 0.0)


def test_ladder_rejects_bad_tags(basis6):
    with pytest.raises(ValueError):
        sw.ladder_matrix(basis6, 3, "raise")
    with pytest.raises(ValueError):
        sw.ladder_matrix(basis6, 1, "up")


def test_number_operators(basis6):
    n1, n2, ntot = (op.mat for op in sw.number_operators(basis6))
    i = basis6.index((2, 1))
    assert ntot[i, i] == 3.0 and n1[i, i] == 2.0 and n2[i, i] == 1.0
    assert n1[0, 0] == 0.0
    b1 = sw.build_basis(1)
    assert np.trace(sw.number_operators(b1)[2].mat) == 2.0


def test_angular_momentum_elements(basis6):
    m = sw.angular_momentum_matrix(basis6)
    assert not m.symmetric
    # l = i M with <(0,1)| M |(1,0)> = 1, i.e. <(0,1)| l |(1,0)> = +i
    assert m.mat[basis6.index((0, 1)), basis6.index((1, 0))] == 1.0
    assert np.array_equal(m.mat, -m.mat.T)
    assert np.all(m.mat[:, basis6.index((0, 0))] == 0.0)
    n = sw.number_operators(basis6)[2].mat
    assert np.max(np.abs(m.mat @ n - n @ m.mat)) == 0.0


def test_h0_diagonal(basis6):
    h0 = sw.h0_matrix(basis6).mat
    assert h0[0, 0] == 1.0
    assert h0[basis6.index((2, 1)), basis6.index((2, 1))] == 4.0
    values, counts = np.unique(np.diag(h0), return_counts=True)
    assert list(counts) == [int(v) for v in values]  # shell N+1 holds N+1 states


@pytest.mark.parametrize(
    "bra,ket,expected",
    [
        ((2, 1), (0, 0), LAM / 2),
        ((0, 1), (0, 0), 0.0),
        ((0, 3), (0, 0), -LAM * math.sqrt(3) / 6),
    ],
)
def test_v_known_elements(basis6, bra, ket, expected):
    v = sw.v_matrix(basis6, LAM).mat
    got = v[basis6.index(bra), basis6.index(ket)]
    assert got == pytest.approx(expected, abs=1e-12)
    assert got == pytest.approx(v_element_quadrature(bra, ket, LAM), abs=1e-12)


def test_v_matches_quadrature_exhaustively(basis6):
    v = sw.v_matrix(basis6, LAM).mat
    worst = 0.0
    for i, si in enumerate(basis6.states):
        for j, sj in enumerate(basis6.states):
            q = v_element_quadrature((si.n1, si.n2), (sj.n1, sj.n2), LAM)
            worst = max(worst, abs(v[i, j] - q))
    assert worst <= 1e-10


def test_v_selection_rules(basis6):
    v = sw.v_matrix(basis6, LAM).mat
    for i, si in enumerate(basis6.states):
        for j, sj in enumerate(basis6.states):
            d_shell = abs(si.shell - sj.shell)
            d_n1 = si.n1 - sj.n1
            if d_shell not in (1, 3) or d_n1 not in (-2, 0, 2):
                assert v[i, j] == 0.0, (si, sj)


def test_v_and_h_exactly_symmetric(basis6):
    v = sw.v_matrix(basis6, LAM).mat
    assert np.array_equal(v, v.T)
    h = sw.hamiltonian(sw.ModelParameters(LAM, 6)).mat
    assert np.array_equal(h, h.T)


def test_parity_commutes_exactly():
    h = sw.hamiltonian(sw.ModelParameters(LAM, 10))
    pi = sw.parity_vector(h.basis)
    comm = h.mat * pi[np.newaxis, :] - pi[:, np.newaxis] * h.mat
    assert np.max(np.abs(comm)) == 0.0


def test_v_interior_independent_of_truncation():
    v10 = sw.v_matrix(sw.build_basis(10), LAM).mat
    v20 = sw.v_matrix(sw.build_basis(20), LAM).mat
    d = sw.build_basis(7).dim  # both states at shell <= 10 - 3
    assert np.max(np.abs(v10[:d, :d] - v20[:d, :d])) <= 1e-14


def test_hamiltonian_lambda_zero_is_h0():
    h = sw.hamiltonian(sw.ModelParameters(0.0, 6)).mat
    assert np.array_equal(h, np.diag(np.diag(h)))
    assert np.array_equal(np.diag(h), sw.build_basis(6).shells + 1.0)


def test_model_parameters_validation():
    with pytest.raises(ValueError):
        sw.ModelParameters(float("nan"), 5)
    with pytest.raises(ValueError):
        sw.ModelParameters(0.1, -2)
