"""Explicit operator realizations: ladder words, occupation projectors and
basis transition operators.

The projector onto occupation n of one mode comes out of the U(1) group
average as the diagonal function sinc(a^+ a - n); since occupations are
integers this evaluates to exactly 1 at the selected occupation and exactly 0
elsewhere (the removable singularity takes its limit value 1).  Combining the
two modes gives the projector on a single Fock state, and sandwiching it
between raising and lowering ladder words yields the transition operator
phi_mu phi_nu^*, which equals the elementary matrix e_mu e_nu^T whenever the
intermediate states fit inside the truncation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .oscillator import FockBasis, FockState, OperatorMatrix, ladder_matrix

__all__ = [
    "LadderWord",
    "state_builder",
    "lowering_word",
    "sinc_projector",
    "shell_projector",
    "transition_operator",
    "all_transition_operators",
    "transition_elementary_deviation",
    "transition_algebra_deviation",
    "haar_projector_check",
]


@dataclass(frozen=True)
class LadderWord:
    """Ordered product of ladder factors times a scalar coefficient.

    ``factors`` is in operator order: the last factor acts first on a state.
    """

    factors: tuple[tuple[int, str], ...]
    coefficient: float = 1.0

    def to_matrix(self, basis: FockBasis) -> np.ndarray:
        """Evaluate the word as a product of truncated ladder matrices."""
        out = self.coefficient * np.eye(basis.dim)
        for coordinate, kind in self.factors:
            out = out @ ladder_matrix(basis, coordinate, kind).mat
        return out


def state_builder(mu: FockState) -> LadderWord:
    """Word S+_mu with S+_mu applied to the vacuum giving the unit state mu.

    (a1^+)^n1 (a2^+)^n2 / sqrt(n1! n2!).
    """
    factors = ((1, "raise"),) * mu.n1 + ((2, "raise"),) * mu.n2
    return LadderWord(factors, 1.0 / math.sqrt(math.factorial(mu.n1) * math.factorial(mu.n2)))


def lowering_word(nu: FockState) -> LadderWord:
    """Word S_nu lowering the state nu to the vacuum with unit amplitude."""
    factors = ((1, "lower"),) * nu.n1 + ((2, "lower"),) * nu.n2
    return LadderWord(factors, 1.0 / math.sqrt(math.factorial(nu.n1) * math.factorial(nu.n2)))


def sinc_projector(basis: FockBasis, coordinate: int, n: int) -> OperatorMatrix:
    """Projector sinc(occupation - n) on one mode, an exact 0/1 diagonal.

    All occupations in the basis are integers, so the sinc takes its exact
    integer values: 1 at the removable singularity, 0 elsewhere.
    """
    if coordinate not in (1, 2):
        raise ValueError(f"coordinate must be 1 or 2, got {coordinate}")
    if n < 0:
        raise ValueError(f"occupation must be >= 0, got {n}")
    occ = basis.n1 if coordinate == 1 else basis.n2
    return OperatorMatrix(basis, np.diag((occ == n).astype(float)), symmetric=True)


def shell_projector(basis: FockBasis, n1: int, n2: int) -> OperatorMatrix:
    """Product of the two mode projectors: selects the single state (n1, n2)."""
    p1 = sinc_projector(basis, 1, n1).mat
    p2 = sinc_projector(basis, 2, n2).mat
    return OperatorMatrix(basis, p1 @ p2, symmetric=True)


def transition_operator(basis: FockBasis, mu, nu) -> OperatorMatrix:
    """phi_mu phi_nu^* = S+_mu S_nu P_nu as a matrix in the truncated basis.

    The projector first collapses onto nu, the lowering word walks down to
    the vacuum and the raising word builds mu, so intermediate shells never
    exceed max(shell(mu), shell(nu)) and the result equals the elementary
    matrix e_mu e_nu^T whenever both states lie inside the basis.
    """
    mu = basis.states[basis.index(mu)]
    nu = basis.states[basis.index(nu)]
    raise_mat = state_builder(mu).to_matrix(basis)
    lower_mat = lowering_word(nu).to_matrix(basis)
    proj = shell_projector(basis, nu.n1, nu.n2).mat
    return OperatorMatrix(basis, raise_mat @ (lower_mat @ proj), symmetric=False)


def all_transition_operators(basis: FockBasis) -> np.ndarray:
    """Stack of every transition operator, indexed [mu, nu] by basis position.

    Intended for small bases (the array holds dim^4 floats).
    """
    if basis.dim > 50:
        raise ValueError(f"exhaustive transition stack is meant for small bases, dim={basis.dim}")
    d = basis.dim
    stack = np.empty((d, d, d, d))
    for mu in range(d):
        for nu in range(d):
            stack[mu, nu] = transition_operator(basis, basis.state(mu), basis.state(nu)).mat
    return stack


def transition_elementary_deviation(basis: FockBasis, stack: np.ndarray | None = None) -> float:
    """Max deviation of every transition operator from its elementary matrix."""
    if stack is None:
        stack = all_transition_operators(basis)
    d = basis.dim
    dev = 0.0
    for mu in range(d):
        for nu in range(d):
            expected = np.zeros((d, d))
            expected[mu, nu] = 1.0
            dev = max(dev, float(np.max(np.abs(stack[mu, nu] - expected))))
    return dev


def transition_algebra_deviation(basis: FockBasis, stack: np.ndarray | None = None) -> float:
    """Max deviation from (phi_mu phi_nu^*)(phi_sigma phi_tau^*) = delta_nu_sigma phi_mu phi_tau^*.

    Exhaustive over all operator pairs; products are evaluated as matrix
    products of the stacked transition operators.
    """
    if stack is None:
        stack = all_transition_operators(basis)
    d = basis.dim
    # lay all right factors side by side so each left factor needs one GEMM
    right_wide = stack.reshape(d * d, d, d).transpose(1, 0, 2).reshape(d, d * d * d)
    dev = 0.0
    for mu in range(d):
        expected_nu = stack[mu].transpose(1, 0, 2).reshape(d, d * d)  # all tau blocks for sigma = nu
        for nu in range(d):
            prod = stack[mu, nu] @ right_wide
            prod[:, nu * d * d : (nu + 1) * d * d] -= expected_nu
            dev = max(dev, float(np.max(np.abs(prod))))
    return dev


def haar_projector_check(basis: FockBasis, coordinate: int, n: int, quadrature_points: int) -> float:
    """Deviation of the discretized U(1) group average from the sinc projector.

    Evaluates (1/M) sum_j exp(-i n x_j) T(x_j) with T(x) = diag(exp(i m x))
    on the equispaced grid x_j = 2 pi j / M.  Discrete Fourier orthogonality
    makes this exact once M exceeds the largest occupation, so the returned
    maximum deviation from the sinc form is pure rounding noise.
    """
    occ = (basis.n1 if coordinate == 1 else basis.n2).astype(float)
    max_occ = int(occ.max()) if basis.dim else 0
    if quadrature_points < max_occ + 1:
        raise ValueError(
            f"need at least {max_occ + 1} quadrature points to resolve occupations up to {max_occ}, "
            f"got {quadrature_points}"
        )
    x = 2.0 * np.pi * np.arange(quadrature_points) / quadrature_points
    phases = np.exp(1j * np.outer(occ - n, x))
    quad_diag = phases.mean(axis=1)
    exact = sinc_projector(basis, coordinate, n).mat.diagonal()
    return float(np.max(np.abs(quad_diag - exact)))
