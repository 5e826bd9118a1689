"""Dense symmetric eigendecomposition with explicit accuracy contracts.

The factorization itself is LAPACK's (via numpy.linalg.eigh); what this
module adds is the contract layer: input rejection, deterministic handling of
degenerate clusters, a canonical sign convention, and verification of the
orthonormality and residual bounds on every produced spectrum.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .oscillator import FockBasis, OperatorMatrix

__all__ = ["Spectrum", "diagonalize", "subspace_solve"]

#: eigenvalue clusters closer than this are treated as degenerate and
#: re-orthonormalized deterministically
DEGENERACY_GAP = 1e-9

ORTHONORMALITY_TOL = 1e-10
RESIDUAL_TOL = 1e-8


@dataclass
class Spectrum:
    """Eigenvalues and eigenvectors of a real symmetric operator.

    ``energies`` is ascending; row i of ``coefficients`` holds eigenvector i
    over the basis states, so coefficients[i, alpha] = c_i^alpha.
    """

    basis: FockBasis
    energies: np.ndarray
    coefficients: np.ndarray

    @property
    def dim(self) -> int:
        return len(self.energies)

    def verify(self, mat: np.ndarray) -> None:
        """Assert the orthonormality and residual invariants against mat."""
        c = self.coefficients
        gram = c @ c.T
        dev = np.max(np.abs(gram - np.eye(self.dim)))
        if dev > ORTHONORMALITY_TOL:
            raise RuntimeError(f"eigenvector orthonormality violated: {dev:.3e}")
        resid = mat @ c.T - c.T * self.energies[np.newaxis, :]
        scale = np.linalg.norm(mat)
        worst = float(np.max(np.linalg.norm(resid, axis=0)))
        if worst > RESIDUAL_TOL * max(scale, 1.0):
            raise RuntimeError(f"eigenpair residual {worst:.3e} exceeds {RESIDUAL_TOL:.1e} * ||H||_F")


def _canonical_sign(vectors: np.ndarray) -> np.ndarray:
    """Flip each row so its first significant entry is positive."""
    out = vectors.copy()
    for row in out:
        big = np.abs(row) > 1e-12 * np.max(np.abs(row))
        lead = int(np.argmax(big))
        if row[lead] < 0.0:
            row *= -1.0
    return out


def _canonicalize_degenerate(energies: np.ndarray, vectors: np.ndarray) -> np.ndarray:
    """Re-span each degenerate cluster deterministically.

    Within a cluster (successive gaps below DEGENERACY_GAP) the subspace is
    well defined but LAPACK's choice of basis inside it is arbitrary.  We
    replace it by Gram-Schmidt on the projections of the basis unit vectors,
    taken in basis-index order, which depends only on the subspace.
    """
    out = vectors.copy()
    n = len(energies)
    start = 0
    while start < n:
        stop = start + 1
        while stop < n and energies[stop] - energies[stop - 1] < DEGENERACY_GAP:
            stop += 1
        size = stop - start
        if size > 1:
            block = out[start:stop]
            proj = block.T @ block  # projector onto the cluster subspace
            picked = []
            for col in range(proj.shape[0]):
                v = proj[:, col].copy()
                for u in picked:
                    v -= (u @ v) * u
                norm = np.linalg.norm(v)
                if norm > 1e-8:
                    picked.append(v / norm)
                    if len(picked) == size:
                        break
            if len(picked) == size:
                out[start:stop] = np.array(picked)
        start = stop
    return out


def _solve(mat: np.ndarray, basis: FockBasis) -> Spectrum:
    if not np.all(np.isfinite(mat)):
        raise ValueError("matrix contains non-finite entries")
    try:
        energies, vectors = np.linalg.eigh(mat)
    except np.linalg.LinAlgError as exc:
        raise RuntimeError(f"eigensolver did not converge on a {mat.shape[0]}x{mat.shape[0]} matrix: {exc}") from exc
    coeffs = _canonicalize_degenerate(energies, vectors.T)
    coeffs = _canonical_sign(coeffs)
    spectrum = Spectrum(basis=basis, energies=energies, coefficients=coeffs)
    spectrum.verify(mat)
    return spectrum


def diagonalize(op: OperatorMatrix) -> Spectrum:
    """Full decomposition of a symmetric OperatorMatrix.

    Rejects matrices that are not exactly symmetric (all operators built by
    this package are symmetric by construction, so any mismatch is a bug).
    """
    if not op.symmetric or not np.array_equal(op.mat, op.mat.T):
        raise ValueError("diagonalize requires an exactly symmetric matrix")
    return _solve(op.mat, op.basis)


def subspace_solve(op: OperatorMatrix, p_shells: int) -> Spectrum:
    """Ritz step: diagonalize the block of all shells <= p_shells.

    Returned coefficients run over the P-space indices only; the attached
    basis is the standalone Fock basis with max_shell = p_shells, whose
    ordering coincides with the parent prefix.
    """
    if not op.symmetric or not np.array_equal(op.mat, op.mat.T):
        raise ValueError("subspace_solve requires an exactly symmetric matrix")
    if p_shells > op.basis.max_shell:
        raise ValueError(f"p_shells {p_shells} exceeds basis max_shell {op.basis.max_shell}")
    sub_basis = FockBasis(p_shells)
    d = sub_basis.dim
    return _solve(op.mat[:d, :d].copy(), sub_basis)
