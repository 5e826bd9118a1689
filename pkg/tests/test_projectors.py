import numpy as np
import pytest

import spreadwidth as sw
from spreadwidth.projectors import (
    all_transition_operators,
    transition_algebra_deviation,
    transition_elementary_deviation,
)


def unit(basis, state):
    v = np.zeros(basis.dim)
    v[basis.index(state)] = 1.0
    return v


def test_state_builder_words(basis6):
    vac = unit(basis6, (0, 0))
    assert sw.state_builder(sw.FockState(0, 0)).factors == ()
    assert np.array_equal(sw.state_builder(sw.FockState(0, 0)).to_matrix(basis6) @ vac, vac)
    built = sw.state_builder(sw.FockState(1, 0)).to_matrix(basis6) @ vac
    assert np.array_equal(built, unit(basis6, (1, 0)))
    built = sw.state_builder(sw.FockState(2, 1)).to_matrix(basis6) @ vac
    assert np.max(np.abs(built - unit(basis6, (2, 1)))) <= 1e-12


def test_lowering_word_reaches_vacuum(basis6):
    word = sw.lowering_word(sw.FockState(2, 3))
    out = word.to_matrix(basis6) @ unit(basis6, (2, 3))
    assert np.max(np.abs(out - unit(basis6, (0, 0)))) <= 1e-12


def test_ladder_word_order(basis6):
    # factors are in operator order: the last factor acts first
    word = sw.LadderWord(((1, "lower"), (1, "raise")), 1.0)  # a1 a1+ = n1 + 1
    out = word.to_matrix(basis6) @ unit(basis6, (0, 0))
    assert np.array_equal(out, unit(basis6, (0, 0)))


def test_sinc_projector_is_exact_01_diagonal(basis6):
    for coord in (1, 2):
        for n in (0, 1, 4):
            p = sw.sinc_projector(basis6, coord, n).mat
            occ = basis6.n1 if coord == 1 else basis6.n2
            assert np.array_equal(p, np.diag((occ == n).astype(float)))
    p0 = sw.sinc_projector(basis6, 1, 0).mat
    assert p0[basis6.index((0, 3)), basis6.index((0, 3))] == 1.0
    assert p0[basis6.index((1, 2)), basis6.index((1, 2))] == 0.0


def test_sinc_projector_algebra(basis6):
    for coord in (1, 2):
        projs = [sw.sinc_projector(basis6, coord, n).mat for n in range(7)]
        for n, p in enumerate(projs):
            assert np.array_equal(p @ p, p)
            for m in range(n + 1, 7):
                assert np.all(p @ projs[m] == 0.0)
        assert np.array_equal(sum(projs), np.eye(basis6.dim))


def test_sinc_projector_validation(basis6):
    with pytest.raises(ValueError):
        sw.sinc_projector(basis6, 1, -1)
    with pytest.raises(ValueError):
        sw.sinc_projector(basis6, 0, 1)


def test_shell_projector(basis6):
    p = sw.shell_projector(basis6, 0, 0).mat
    assert np.array_equal(p, np.outer(unit(basis6, (0, 0)), unit(basis6, (0, 0))))
    total = sum(sw.shell_projector(basis6, s.n1, s.n2).mat for s in basis6.states)
    assert np.array_equal(total, np.eye(basis6.dim))
    for s in basis6.states:
        assert np.trace(sw.shell_projector(basis6, s.n1, s.n2).mat) == 1.0


def test_transition_operator_examples(basis6):
    t = sw.transition_operator(basis6, (0, 0), (0, 0)).mat
    assert np.max(np.abs(t - sw.shell_projector(basis6, 0, 0).mat)) <= 1e-12
    t = sw.transition_operator(basis6, (1, 0), (0, 1)).mat
    expected = np.zeros_like(t)
    expected[basis6.index((1, 0)), basis6.index((0, 1))] = 1.0
    assert np.max(np.abs(t - expected)) <= 1e-10


def test_transition_operator_rejects_outside_states(basis6):
    with pytest.raises(ValueError):
        sw.transition_operator(basis6, (7, 0), (0, 0))
    with pytest.raises(ValueError):
        sw.transition_operator(basis6, (0, 0), (0, 7))


def test_transition_operators_exhaustively_elementary(basis6):
    stack = all_transition_operators(basis6)
    assert transition_elementary_deviation(basis6, stack) <= 1e-10


def test_transition_operator_product_rule():
    basis = sw.build_basis(4)
    stack = all_transition_operators(basis)
    assert transition_algebra_deviation(basis, stack) <= 1e-10


def test_haar_quadrature_reproduces_sinc(basis6):
    for coord in (1, 2):
        for n in range(7):
            dev = sw.haar_projector_check(basis6, coord, n, quadrature_points=basis6.max_shell + 2)
            assert dev <= 1e-12


def test_haar_quadrature_needs_enough_points(basis6):
    with pytest.raises(ValueError):
        sw.haar_projector_check(basis6, 1, 0, quadrature_points=1)
