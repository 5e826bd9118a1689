"""Truncated 2D oscillator Fock space and the Henon-Heiles Hamiltonian.

Units are hbar = omega = m = 1 throughout, so the unperturbed energies are
n1 + n2 + 1 and the shell spacing is exactly 1.  All operators are stored as
dense real matrices in the truncated basis (the projected operator P A P).
Products that pass through states outside the truncation are evaluated in an
enlarged basis and projected back, so every stored matrix element between
working-basis states is exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "FockState",
    "FockBasis",
    "OperatorMatrix",
    "ModelParameters",
    "build_basis",
    "ladder_matrix",
    "position_matrix",
    "number_operators",
    "angular_momentum_matrix",
    "h0_matrix",
    "v_matrix",
    "hamiltonian",
    "parity_vector",
]


@dataclass(frozen=True, order=True)
class FockState:
    """Occupation pair |n1, n2> of the two Cartesian oscillator modes."""

    n1: int
    n2: int

    def __post_init__(self):
        if self.n1 < 0 or self.n2 < 0:
            raise ValueError(f"occupations must be non-negative, got {(self.n1, self.n2)}")

    @property
    def shell(self) -> int:
        return self.n1 + self.n2


class FockBasis:
    """All states with n1 + n2 <= max_shell in a fixed canonical order.

    Ordering is shell-major (ascending n1 + n2), then ascending n1 within a
    shell.  A shell cutoff K therefore selects a contiguous prefix of the
    basis, which is what the model-space machinery relies on.
    """

    def __init__(self, max_shell: int):
        if max_shell < 0:
            raise ValueError(f"max_shell must be >= 0, got {max_shell}")
        self.max_shell = int(max_shell)
        self.states = tuple(
            FockState(n1, n - n1) for n in range(self.max_shell + 1) for n1 in range(n + 1)
        )
        self.dim = len(self.states)
        self._index = {s: i for i, s in enumerate(self.states)}
        self.n1 = np.array([s.n1 for s in self.states], dtype=np.int64)
        self.n2 = np.array([s.n2 for s in self.states], dtype=np.int64)
        self.shells = self.n1 + self.n2

    def __len__(self) -> int:
        return self.dim

    def __contains__(self, state) -> bool:
        return self._as_state(state) in self._index

    @staticmethod
    def _as_state(state) -> FockState:
        if isinstance(state, FockState):
            return state
        n1, n2 = state
        return FockState(int(n1), int(n2))

    def index(self, state) -> int:
        """Position of a state in the canonical order."""
        s = self._as_state(state)
        try:
            return self._index[s]
        except KeyError:
            raise ValueError(f"state {(s.n1, s.n2)} is outside the max_shell={self.max_shell} basis") from None

    def state(self, index: int) -> FockState:
        return self.states[index]

    def shell_slice(self, shell: int) -> slice:
        """Contiguous index range of one shell."""
        if not 0 <= shell <= self.max_shell:
            raise ValueError(f"shell {shell} outside 0..{self.max_shell}")
        start = shell * (shell + 1) // 2
        return slice(start, start + shell + 1)

    def p_dim(self, p_shells: int) -> int:
        """Dimension of the prefix holding all shells <= p_shells."""
        if not 0 <= p_shells <= self.max_shell:
            raise ValueError(f"p_shells {p_shells} outside 0..{self.max_shell}")
        return (p_shells + 1) * (p_shells + 2) // 2


def build_basis(max_shell: int) -> FockBasis:
    """Truncated basis with all (n1, n2), n1 + n2 <= max_shell."""
    return FockBasis(max_shell)


@dataclass
class OperatorMatrix:
    """Dense real matrix of an operator over a FockBasis.

    ``symmetric=True`` means the matrix is the operator itself (real
    symmetric, exactly equal to its transpose by construction).  The angular
    momentum is the one purely imaginary operator here; it is stored through
    its real antisymmetric part M with l = i M and ``symmetric=False``.
    """

    basis: FockBasis
    mat: np.ndarray
    symmetric: bool = True

    def __post_init__(self):
        self.mat = np.asarray(self.mat, dtype=float)
        if self.mat.shape != (self.basis.dim, self.basis.dim):
            raise ValueError(f"matrix shape {self.mat.shape} does not match basis dim {self.basis.dim}")


@dataclass(frozen=True)
class ModelParameters:
    """Perturbation strength and basis cutoff (the only free knobs)."""

    lam: float = 0.1
    max_shell: int = 30

    def __post_init__(self):
        if not math.isfinite(self.lam):
            raise ValueError(f"lambda must be finite, got {self.lam}")
        if self.max_shell < 0:
            raise ValueError(f"max_shell must be >= 0, got {self.max_shell}")


def ladder_matrix(basis: FockBasis, coordinate: int, kind: str) -> OperatorMatrix:
    """Matrix of a_k (kind="lower") or a_k^dagger (kind="raise"), k in {1, 2}.

    <n-1|a|n> = sqrt(n) on the chosen coordinate.  Transitions that leave the
    truncated basis are dropped, i.e. this is the projected operator.
    """
    if coordinate not in (1, 2):
        raise ValueError(f"coordinate must be 1 or 2, got {coordinate}")
    if kind not in ("raise", "lower"):
        raise ValueError(f"kind must be 'raise' or 'lower', got {kind!r}")
    m = np.zeros((basis.dim, basis.dim))
    for j, s in enumerate(basis.states):
        n = s.n1 if coordinate == 1 else s.n2
        if kind == "lower":
            if n == 0:
                continue
            target = FockState(s.n1 - 1, s.n2) if coordinate == 1 else FockState(s.n1, s.n2 - 1)
            amp = math.sqrt(n)
        else:
            target = FockState(s.n1 + 1, s.n2) if coordinate == 1 else FockState(s.n1, s.n2 + 1)
            if target.shell > basis.max_shell:
                continue
            amp = math.sqrt(n + 1)
        m[basis.index(target), j] = amp
    return OperatorMatrix(basis, m, symmetric=False)


def position_matrix(basis: FockBasis, coordinate: int) -> OperatorMatrix:
    """q_k = (a_k + a_k^dagger) / sqrt(2), exactly symmetric."""
    low = ladder_matrix(basis, coordinate, "lower").mat
    return OperatorMatrix(basis, (low + low.T) / math.sqrt(2.0), symmetric=True)


def number_operators(basis: FockBasis):
    """Diagonal matrices of n1, n2 and N = n1 + n2."""
    op1 = OperatorMatrix(basis, np.diag(basis.n1.astype(float)))
    op2 = OperatorMatrix(basis, np.diag(basis.n2.astype(float)))
    opn = OperatorMatrix(basis, np.diag(basis.shells.astype(float)))
    return op1, op2, opn


def angular_momentum_matrix(basis: FockBasis) -> OperatorMatrix:
    """Real antisymmetric part M of l = q1 p2 - q2 p1 = i (a1 a2^+ - a1^+ a2).

    The returned matrix is M with l = i M.  Both terms conserve the shell, so
    M is exactly block diagonal over shells and commutes with N everywhere in
    the truncated basis.
    """
    m = np.zeros((basis.dim, basis.dim))
    for j, s in enumerate(basis.states):
        # a1 a2^+ : (n1, n2) -> (n1-1, n2+1), amplitude sqrt(n1 (n2+1))
        if s.n1 >= 1:
            m[basis.index((s.n1 - 1, s.n2 + 1)), j] += math.sqrt(s.n1 * (s.n2 + 1))
        # -a1^+ a2 : (n1, n2) -> (n1+1, n2-1), amplitude sqrt((n1+1) n2)
        if s.n2 >= 1:
            m[basis.index((s.n1 + 1, s.n2 - 1)), j] -= math.sqrt((s.n1 + 1) * s.n2)
    return OperatorMatrix(basis, m, symmetric=False)


def h0_matrix(basis: FockBasis) -> OperatorMatrix:
    """Unperturbed oscillator energies n1 + n2 + 1 on the diagonal."""
    return OperatorMatrix(basis, np.diag(basis.shells.astype(float) + 1.0))


def v_matrix(basis: FockBasis, lam: float) -> OperatorMatrix:
    """Cubic coupling lambda (q1^2 q2 - q2^3 / 3) as an exact projected matrix.

    The polynomial changes the total shell by +-1 or +-3 only, so evaluating
    the ladder products in a basis enlarged by three shells and cutting back
    to the working prefix leaves every retained element exact.
    """
    if not math.isfinite(lam):
        raise ValueError(f"lambda must be finite, got {lam}")
    big = FockBasis(basis.max_shell + 3)
    q1 = position_matrix(big, 1).mat
    q2 = position_matrix(big, 2).mat
    w = q1 @ q1 @ q2 - (q2 @ q2 @ q2) / 3.0
    d = basis.dim
    v = lam * w[:d, :d]
    # interior elements are exact and symmetric; averaging with the transpose
    # removes rounding asymmetry without touching exact zeros
    v = 0.5 * (v + v.T)
    return OperatorMatrix(basis, v, symmetric=True)


def hamiltonian(params: ModelParameters) -> OperatorMatrix:
    """H = H0 + lambda V in the truncated basis, exactly symmetric."""
    basis = FockBasis(params.max_shell)
    h = h0_matrix(basis).mat + v_matrix(basis, params.lam).mat
    return OperatorMatrix(basis, h, symmetric=True)


def parity_vector(basis: FockBasis) -> np.ndarray:
    """Diagonal of the reflection q1 -> -q1, i.e. (-1)**n1 per state."""
    return np.where(basis.n1 % 2 == 0, 1.0, -1.0)
