"""Approximate integrals of motion from model-space Ritz solutions.

Diagonalizing the Hamiltonian block over a finite model space P yields Ritz
pairs (E_p, psi_p).  The subset S whose full-basis residual stays below a
threshold defines

  * the integrable approximation  H_s = sum_S E_p psi_p psi_p^T, and
  * an orthogonal transform U whose first dim S columns are the accepted
    Ritz vectors (the remaining columns are the leftover Ritz vectors, a
    deterministic choice of the otherwise arbitrary completion).

Conjugating the basis quantum-number operators with U produces operators
J' = U J U^T that are exactly diagonal on the accepted solutions, commute
with H_s in the whole space, and coincide with the original J outside P.

The quantum numbers transformed this way must be diagonal in the working
basis.  For n1, n2 and N = n1 + n2 that is automatic.  The angular momentum
is handled through its quantum-number relabeling m = n1 - n2, the diagonal
operator with the same per-shell spectrum {-N, -N+2, ..., N}; it is the image
of l under the fixed intra-shell rotation that maps circular to Cartesian
modes, so fragmentation measured on it is the fragmentation of the azimuthal
label.  The true antisymmetric matrix of l lives in the oscillator module.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .eigensolver import Spectrum, diagonalize, subspace_solve
from .oscillator import FockBasis, OperatorMatrix

__all__ = [
    "INTEGRAL_NAMES",
    "ModelSpace",
    "UnitaryTransform",
    "ApproxIntegral",
    "integral_diagonal",
    "build_model_space",
    "build_unitary",
    "integrable_hamiltonian",
    "integrable_hamiltonian_explicit",
    "transform_integral",
    "norm_bound_check",
    "delta_jprime_study",
    "IntegralStudy",
    "StudyRow",
]

INTEGRAL_NAMES = ("n1", "n2", "N", "l")

ORTHOGONALITY_TOL = 1e-10


def integral_diagonal(basis: FockBasis, name: str) -> np.ndarray:
    """Eigenvalue of the named basis integral for every basis state."""
    if name == "n1":
        return basis.n1.astype(float)
    if name == "n2":
        return basis.n2.astype(float)
    if name == "N":
        return basis.shells.astype(float)
    if name == "l":
        # azimuthal quantum-number relabeling, see module docstring
        return (basis.n1 - basis.n2).astype(float)
    raise ValueError(f"unknown integral {name!r}, expected one of {INTEGRAL_NAMES}")


@dataclass
class ModelSpace:
    """A P-space (shell cutoff) with its accepted Ritz solutions S."""

    parent: FockBasis
    p_shells: int
    energies: np.ndarray  # all Ritz energies over P, ascending
    vectors: np.ndarray  # (dim P, dim P), row k = Ritz vector k over P indices
    residuals: np.ndarray  # full-basis residual norm per Ritz state
    epsilon: float
    accepted: np.ndarray  # Ritz indices with residual <= epsilon, ascending energy

    @property
    def p_dim(self) -> int:
        return self.vectors.shape[1]

    @property
    def dim_s(self) -> int:
        return len(self.accepted)

    @property
    def accepted_residuals(self) -> np.ndarray:
        return self.residuals[self.accepted]

    def embedded(self, ritz_indices) -> np.ndarray:
        """Ritz vectors padded with zeros on the complement Q."""
        rows = np.zeros((len(ritz_indices), self.parent.dim))
        rows[:, : self.p_dim] = self.vectors[ritz_indices]
        return rows


def build_model_space(h: OperatorMatrix, p_shells: int, epsilon: float) -> ModelSpace:
    """Ritz-solve the P block and accept solutions by full-basis residual.

    An empty S (no Ritz state below the residual threshold) is a legitimate
    outcome reported through dim_s == 0, not an error.
    """
    if epsilon <= 0:
        raise ValueError(f"residual threshold must be positive, got {epsilon}")
    ritz = subspace_solve(h, p_shells)
    d = h.basis.dim
    p_dim = ritz.dim
    embedded = np.zeros((d, p_dim))
    embedded[:p_dim, :] = ritz.coefficients.T
    resid = h.mat @ embedded - embedded * ritz.energies[np.newaxis, :]
    norms = np.linalg.norm(resid, axis=0)
    accepted = np.flatnonzero(norms <= epsilon)
    return ModelSpace(
        parent=h.basis,
        p_shells=p_shells,
        energies=ritz.energies,
        vectors=ritz.coefficients,
        residuals=norms,
        epsilon=epsilon,
        accepted=accepted,
    )


@dataclass
class UnitaryTransform:
    """Orthogonal transform sending basis state k to the k-th reordered Ritz state.

    ``rows`` holds the Ritz coefficient rows, accepted solutions first, so the
    operator matrix on the P block is rows.T (columns are the Ritz vectors);
    off the P block the transform is the identity.
    """

    model_space: ModelSpace
    rows: np.ndarray  # (dim P, dim P), first dim_s rows = accepted Ritz rows

    @property
    def p_dim(self) -> int:
        return self.rows.shape[0]

    def apply(self, diag_values: np.ndarray) -> np.ndarray:
        """Full-basis matrix of U diag(j) U^T for a diagonal integral."""
        parent = self.model_space.parent
        out = np.diag(diag_values.astype(float))
        p = self.p_dim
        block = self.rows.T @ (self.rows * diag_values[:p, np.newaxis])
        out[:p, :p] = 0.5 * (block + block.T)
        return out


def build_unitary(ms: ModelSpace) -> UnitaryTransform:
    """Assemble U from the full Ritz coefficient block, accepted rows first."""
    if ms.dim_s < 1:
        raise ValueError("cannot build the transform from an empty solution subspace")
    rest = np.setdiff1d(np.arange(ms.p_dim), ms.accepted)
    order = np.concatenate([ms.accepted, rest])
    rows = ms.vectors[order]
    gram_dev = np.max(np.abs(rows @ rows.T - np.eye(ms.p_dim)))
    if gram_dev > ORTHOGONALITY_TOL:
        raise ValueError(f"Ritz coefficient block is rank deficient (orthogonality defect {gram_dev:.3e})")
    return UnitaryTransform(model_space=ms, rows=rows)


def integrable_hamiltonian(ms: ModelSpace) -> OperatorMatrix:
    """H_s = sum over S of E_p times the outer product of the Ritz vector.

    Identically zero outside span(S); equal to H when S exhausts the exact
    eigenbasis.
    """
    d = ms.parent.dim
    if ms.dim_s == 0:
        return OperatorMatrix(ms.parent, np.zeros((d, d)), symmetric=True)
    vecs = ms.embedded(ms.accepted)
    h_s = (vecs.T * ms.energies[ms.accepted]) @ vecs
    return OperatorMatrix(ms.parent, 0.5 * (h_s + h_s.T), symmetric=True)


def integrable_hamiltonian_explicit(ms: ModelSpace) -> OperatorMatrix:
    """H_s assembled from ladder-word transition operators.

    Expands the outer products over the basis transition operators
    phi_mu phi_nu^* realized by ladder words and projectors; intended for
    small bases as an independent route to the same matrix.
    """
    from .projectors import transition_operator

    weights = np.zeros((ms.p_dim, ms.p_dim))
    for k in ms.accepted:
        c = ms.vectors[k]
        weights += ms.energies[k] * np.outer(c, c)
    d = ms.parent.dim
    h_s = np.zeros((d, d))
    for mu in range(ms.p_dim):
        for nu in range(ms.p_dim):
            if weights[mu, nu] != 0.0:
                h_s += weights[mu, nu] * transition_operator(
                    ms.parent, ms.parent.state(mu), ms.parent.state(nu)
                ).mat
    return OperatorMatrix(ms.parent, 0.5 * (h_s + h_s.T), symmetric=True)


@dataclass
class ApproxIntegral:
    """A transformed quantum-number operator J' = U J U^T."""

    name: str
    op: OperatorMatrix
    model_space: ModelSpace


def transform_integral(ms: ModelSpace, u: UnitaryTransform, which: str) -> ApproxIntegral:
    """Conjugate the named basis integral with the model-space transform."""
    if u.model_space is not ms:
        raise ValueError("transform was built from a different model space")
    diag = integral_diagonal(ms.parent, which)
    return ApproxIntegral(
        name=which,
        op=OperatorMatrix(ms.parent, u.apply(diag), symmetric=True),
        model_space=ms,
    )


def norm_bound_check(h: OperatorMatrix, ms: ModelSpace, trials: int, seed: int = 1) -> float:
    """Max of ||(H - H_s) chi|| over random unit vectors chi in span(S).

    The residual bound guarantees the result never exceeds
    epsilon * sqrt(dim S).
    """
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    if ms.dim_s == 0:
        raise ValueError("solution subspace is empty, nothing to sample")
    if h.basis.dim != ms.parent.dim:
        raise ValueError("Hamiltonian basis does not match the model space parent")
    vecs = ms.embedded(ms.accepted)
    h_s = integrable_hamiltonian(ms).mat
    rng = np.random.default_rng(seed)
    coeffs = rng.standard_normal((trials, ms.dim_s))
    coeffs /= np.linalg.norm(coeffs, axis=1, keepdims=True)
    chi = coeffs @ vecs
    dev = h.mat @ chi.T - h_s @ chi.T
    return float(np.max(np.linalg.norm(dev, axis=0)))


@dataclass
class StudyRow:
    """One aggregated fragmentation row of the P-space size study."""

    kp_shells: int
    integral: str
    symmetry_block: str
    energy_bin: float
    delta_jprime_avg: float
    in_s_space: bool


@dataclass
class IntegralStudy:
    """Fragmentation of the transformed integrals across P-space sizes.

    Per-state arrays cover every reference eigenstate; ``delta_jprime`` maps
    (p_shells, integral name) to the Delta J' values and ``baseline`` holds
    Delta J of the untransformed integrals.  ``rows`` is the aggregated form
    (symmetry block x energy bin x in-S flag).
    """

    p_sizes: list[int]
    integrals: list[str]
    energies: np.ndarray
    blocks: list[str]
    baseline: dict[str, np.ndarray]
    delta_jprime: dict[tuple[int, str], np.ndarray]
    in_s: dict[int, np.ndarray]
    dim_s: dict[int, int]
    s_top_energy: dict[int, float | None]
    rows: list[StudyRow] = field(default_factory=list)


def _delta_for_matrix(mat: np.ndarray, coeffs: np.ndarray) -> np.ndarray:
    """Delta A of a symmetric matrix in every row state of coeffs.

    Evaluated as ||(A - <A>) v|| per state, which stays accurate down to
    machine scale where the naive second-moment difference cancels.
    """
    w = mat @ coeffs.T
    means = np.einsum("ij,ji->i", coeffs, w)
    return np.linalg.norm(w - coeffs.T * means[np.newaxis, :], axis=0)


def delta_jprime_study(
    h_ref: OperatorMatrix,
    p_sizes,
    integrals=("N", "l"),
    epsilon: float = 1e-3,
    bins: int = 20,
    ref_spectrum: Spectrum | None = None,
) -> IntegralStudy:
    """Delta J' of the transformed integrals in the reference eigenstates.

    The full-basis diagonalization of ``h_ref`` is taken as truth.  For every
    P-space size the transformed integrals are evaluated in all reference
    states; a state counts as inside S when its energy lies below the top
    accepted Ritz energy minus one shell spacing (edge guard).  Sizes whose S
    comes out empty are recorded with dim_s == 0 and contribute no rows.
    """
    from .spacings import classify_symmetry

    p_sizes = [int(k) for k in p_sizes]
    integrals = [str(n) for n in integrals]
    for name in integrals:
        integral_diagonal(h_ref.basis, name)  # validates the names
    if ref_spectrum is None:
        ref_spectrum = diagonalize(h_ref)
    coeffs = ref_spectrum.coefficients
    energies = ref_spectrum.energies
    labels = classify_symmetry(ref_spectrum)
    blocks = [lab.block for lab in labels]

    baseline = {
        name: _delta_for_matrix(np.diag(integral_diagonal(h_ref.basis, name)), coeffs)
        for name in integrals
    }

    study = IntegralStudy(
        p_sizes=p_sizes,
        integrals=integrals,
        energies=energies,
        blocks=blocks,
        baseline=baseline,
        delta_jprime={},
        in_s={},
        dim_s={},
        s_top_energy={},
    )

    for kp in p_sizes:
        ms = build_model_space(h_ref, kp, epsilon)
        study.dim_s[kp] = ms.dim_s
        if ms.dim_s == 0:
            study.s_top_energy[kp] = None
            study.in_s[kp] = np.zeros(len(energies), dtype=bool)
            continue
        top = float(ms.energies[ms.accepted].max())
        study.s_top_energy[kp] = top
        study.in_s[kp] = energies < top - 1.0
        u = build_unitary(ms)
        for name in integrals:
            jp = transform_integral(ms, u, name)
            study.delta_jprime[(kp, name)] = _delta_for_matrix(jp.op.mat, coeffs)

    edges = np.linspace(0.0, float(np.ceil(energies.max())), bins + 1)
    centers = 0.5 * (edges[:-1] + edges[1:])
    bin_of = np.clip(np.searchsorted(edges, energies, side="right") - 1, 0, bins - 1)
    block_arr = np.array(blocks)
    for kp in p_sizes:
        if study.dim_s[kp] == 0:
            continue
        for name in integrals:
            values = study.delta_jprime[(kp, name)]
            for block in ("A", "B", "C", "D"):
                for k in range(bins):
                    for flag in (True, False):
                        mask = (block_arr == block) & (bin_of == k) & (study.in_s[kp] == flag)
                        if mask.any():
                            study.rows.append(
                                StudyRow(
                                    kp_shells=kp,
                                    integral=name,
                                    symmetry_block=block,
                                    energy_bin=float(centers[k]),
                                    delta_jprime_avg=float(values[mask].mean()),
                                    in_s_space=flag,
                                )
                            )
    return study
