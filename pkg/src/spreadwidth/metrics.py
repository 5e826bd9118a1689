"""Chaoticity diagnostics: strength functions, spreading widths, kappa,
mean-square fragmentation and the model-space projection criterion.

The spreading width of a probability distribution over eigenstates is the
minimal contiguous energy window (in ascending energy order) that carries at
least half of the total probability.  Dividing by the unperturbed level
spacing D0 (= 1 here) gives the dimensionless chaoticity parameter kappa;
kappa crossing unity marks the loss of the unperturbed quantum numbers.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .eigensolver import Spectrum, diagonalize
from .oscillator import FockBasis, ModelParameters, OperatorMatrix, hamiltonian, number_operators

__all__ = [
    "StrengthFunction",
    "MetricsRow",
    "strength_function",
    "shell_strength_function",
    "spreading_width",
    "kappa",
    "shell_average",
    "shell_spreading_width",
    "ms_deviation",
    "fragmentation_ratio",
    "hose_taylor_projection",
    "dominant_shell",
    "metrics_for_spectrum",
    "threshold_crossing",
    "sweep_metrics",
]

HALF_WEIGHT = 0.5
COMPLETENESS_TOL = 1e-10

#: unperturbed shell spacing of the 2D oscillator with hbar = omega = 1
D0 = 1.0

#: classical dissociation energy in scaled units lambda^2 * E
SCALED_DISSOCIATION = 1.0 / 6.0


@dataclass
class StrengthFunction:
    """Probability P(E_i) of one basis state over the exact eigenstates."""

    energies: np.ndarray
    probs: np.ndarray

    def __post_init__(self):
        self.energies = np.asarray(self.energies, dtype=float)
        self.probs = np.asarray(self.probs, dtype=float)
        if self.energies.shape != self.probs.shape or self.energies.ndim != 1:
            raise ValueError("energies and probs must be matching 1-d arrays")
        if len(self.probs) == 0:
            raise ValueError("empty strength function")
        if np.any(np.diff(self.energies) < 0):
            raise ValueError("energies must be ascending")
        if np.any(self.probs < -1e-15) or np.any(self.probs > 1.0 + 1e-12):
            raise ValueError("probabilities outside [0, 1]")
        total = float(self.probs.sum())
        if abs(total - 1.0) > COMPLETENESS_TOL:
            raise ValueError(f"probabilities sum to {total}, completeness violated")


def strength_function(spectrum: Spectrum, alpha) -> StrengthFunction:
    """P_alpha(E_i) = |c_i^alpha|^2 for one basis state alpha."""
    idx = spectrum.basis.index(alpha)
    return StrengthFunction(spectrum.energies, spectrum.coefficients[:, idx] ** 2)


def shell_strength_function(spectrum: Spectrum, shell: int) -> StrengthFunction:
    """Strength function averaged over the complete shell.

    The shell-summed probability is invariant under any orthogonal rotation
    of the basis states inside the shell, so widths derived from it do not
    depend on how the degenerate unperturbed basis was chosen.
    """
    sl = spectrum.basis.shell_slice(shell)
    probs = (spectrum.coefficients[:, sl] ** 2).mean(axis=1)
    return StrengthFunction(spectrum.energies, probs)


def spreading_width(sf: StrengthFunction) -> float:
    """Minimal energy window holding at least half of the probability.

    Two-pointer scan over the ascending energies; a single eigenstate already
    carrying P >= 0.5 gives width zero.
    """
    e = sf.energies
    cum = np.concatenate(([0.0], np.cumsum(sf.probs)))
    n = len(e)
    best = np.inf
    r = 0
    for left in range(n):
        if r < left:
            r = left
        while r < n and cum[r + 1] - cum[left] < HALF_WEIGHT:
            r += 1
        if r == n:
            break
        best = min(best, e[r] - e[left])
    if not np.isfinite(best):
        raise ValueError("no window reaches half weight; completeness violated")
    return float(best)


def kappa(gamma_spr: float, d0: float = D0) -> float:
    """Chaoticity parameter: spreading width over the unperturbed spacing."""
    if d0 <= 0:
        raise ValueError(f"level spacing must be positive, got {d0}")
    return gamma_spr / d0


def shell_average(values, basis: FockBasis, shell: int) -> float:
    """Arithmetic mean of per-basis-state values over one shell."""
    values = np.asarray(values, dtype=float)
    if values.shape != (basis.dim,):
        raise ValueError("need one value per basis state")
    return float(values[basis.shell_slice(shell)].mean())


def shell_spreading_width(spectrum: Spectrum, shell: int) -> float:
    """Spreading width of the shell-averaged strength function."""
    return spreading_width(shell_strength_function(spectrum, shell))


def ms_deviation(op: OperatorMatrix, state: np.ndarray) -> float:
    """Root-mean-square deviation of an observable in a normalized state.

    For a symmetric matrix the observable is the matrix itself; for an
    antisymmetric matrix M the observable is i M (the angular momentum
    convention), and the same real arithmetic applies because <iM> vanishes
    identically and <(iM)^2> = ||M v||^2 for real v.
    """
    v = np.asarray(state, dtype=float)
    if abs(np.linalg.norm(v) - 1.0) > 1e-10:
        raise ValueError("state is not normalized")
    m = op.mat
    if not (np.array_equal(m, m.T) or np.array_equal(m, -m.T)):
        raise ValueError("ms_deviation needs a symmetric or antisymmetric matrix")
    w = m @ v
    mean = float(v @ w)
    # <A^2> - <A>^2 evaluated as ||(A - <A>) v||^2, which avoids the
    # catastrophic cancellation that otherwise floors the result near 1e-7
    resid = w - mean * v
    return float(np.linalg.norm(resid))


def fragmentation_ratio(delta_a: float, eigen_gap: float) -> float:
    """Delta A over the operator's neighboring-eigenvalue gap.

    Below one the operator still acts as an approximate integral of motion
    for the state; above one it is destroyed.
    """
    if eigen_gap <= 0:
        raise ValueError(f"eigenvalue gap must be positive, got {eigen_gap}")
    return delta_a / eigen_gap


def hose_taylor_projection(state: np.ndarray, indices) -> tuple[float, float]:
    """Model-space weight P_s and the convergence indicator Pr = 2 (1 - P_s).

    P_s > 0.5 (Pr < 1) is the existence condition for the effective
    Hamiltonian and its approximate quantum numbers.
    """
    v = np.asarray(state, dtype=float)
    if abs(np.linalg.norm(v) - 1.0) > 1e-10:
        raise ValueError("state is not normalized")
    idx = np.asarray(indices, dtype=int)
    if idx.size == 0:
        raise ValueError("empty model-space index set")
    ps = min(float(np.sum(v[idx] ** 2)), 1.0)
    return ps, 2.0 * (1.0 - ps)


def dominant_shell(state: np.ndarray, basis: FockBasis) -> int:
    """Shell carrying the largest aggregated probability of the state."""
    v = np.asarray(state, dtype=float) ** 2
    weights = np.bincount(basis.shells, weights=v, minlength=basis.max_shell + 1)
    return int(np.argmax(weights))


@dataclass
class MetricsRow:
    """One aggregated output row, keyed by scaled energy epsilon = lambda^2 E.

    Shell rows (shell >= 0) carry the shell-averaged spreading width and
    kappa plus the eigenstate quantities averaged over the states assigned to
    that shell.  Bin rows (shell is None) average the eigenstate quantities
    over uniform epsilon bins.  Missing aggregates stay None.
    """

    epsilon: float
    shell: int | None
    kappa: float | None
    delta_n_ratio: float | None
    pr: float | None
    ps: float | None
    gamma_spr: float | None


def _eigenstate_quantities(spectrum: Spectrum, n_op: OperatorMatrix):
    """Per-eigenstate Delta N, P_s onto the dominant shell, and Pr."""
    basis = spectrum.basis
    c = spectrum.coefficients
    w = n_op.mat @ c.T
    means = np.einsum("ij,ji->i", c, w)
    delta_n = np.linalg.norm(w - c.T * means[np.newaxis, :], axis=0)

    shell_prob = np.zeros((spectrum.dim, basis.max_shell + 1))
    for n in range(basis.max_shell + 1):
        sl = basis.shell_slice(n)
        shell_prob[:, n] = np.sum(c[:, sl] ** 2, axis=1)
    assigned = np.argmax(shell_prob, axis=1)
    ps = np.minimum(shell_prob[np.arange(spectrum.dim), assigned], 1.0)
    pr = 2.0 * (1.0 - ps)
    return delta_n, assigned, ps, pr


def metrics_for_spectrum(
    spectrum: Spectrum,
    lam: float,
    bins: int = 20,
    epsilon_max: float = SCALED_DISSOCIATION,
) -> list[MetricsRow]:
    """All aggregated chaoticity rows for one diagonalized Hamiltonian."""
    if bins < 1:
        raise ValueError(f"bins must be >= 1, got {bins}")
    basis = spectrum.basis
    _, _, n_op = number_operators(basis)
    delta_n, assigned, ps, pr = _eigenstate_quantities(spectrum, n_op)
    ratio = delta_n / 1.0  # unit eigenvalue gap of N
    eps_states = lam * lam * spectrum.energies

    rows: list[MetricsRow] = []
    for shell in range(basis.max_shell + 1):
        gamma = shell_spreading_width(spectrum, shell)
        mask = assigned == shell
        rows.append(
            MetricsRow(
                epsilon=lam * lam * (shell + 1.0),
                shell=shell,
                kappa=kappa(gamma),
                gamma_spr=gamma,
                delta_n_ratio=float(ratio[mask].mean()) if mask.any() else None,
                pr=float(pr[mask].mean()) if mask.any() else None,
                ps=float(ps[mask].mean()) if mask.any() else None,
            )
        )

    edges = np.linspace(0.0, epsilon_max, bins + 1)
    centers = 0.5 * (edges[:-1] + edges[1:])
    for k in range(bins):
        mask = (eps_states >= edges[k]) & (eps_states < edges[k + 1])
        rows.append(
            MetricsRow(
                epsilon=float(centers[k]),
                shell=None,
                kappa=None,
                gamma_spr=None,
                delta_n_ratio=float(ratio[mask].mean()) if mask.any() else None,
                pr=float(pr[mask].mean()) if mask.any() else None,
                ps=float(ps[mask].mean()) if mask.any() else None,
            )
        )
    return rows


def threshold_crossing(epsilons, values, threshold: float = 1.0):
    """Scaled energy where a monotone-trend curve first reaches the threshold.

    Works on (epsilon, value) pairs with None values skipped; interpolates
    linearly between the bracketing points.  Returns None if the curve never
    reaches the threshold.
    """
    pts = [(e, v) for e, v in zip(epsilons, values) if v is not None]
    prev_e = prev_v = None
    for e, v in pts:
        if v >= threshold:
            if prev_e is None or prev_v is None or v == prev_v:
                return float(e)
            return float(prev_e + (threshold - prev_v) * (e - prev_e) / (v - prev_v))
        prev_e, prev_v = e, v
    return None


def sweep_metrics(
    params_grid,
    operators=("N",),
    bins: int = 20,
) -> list[MetricsRow]:
    """Chaoticity rows for every parameter point of a sweep.

    The fragmentation column of the output is defined for the total quantum
    number N (the destruction of the main quantum number); requesting other
    operators is rejected here, they are available through ms_deviation.
    """
    params_grid = list(params_grid)
    if not params_grid:
        raise ValueError("empty parameter grid")
    bad = [name for name in operators if name != "N"]
    if bad:
        raise ValueError(f"sweep fragmentation column is defined for operator N only, got {bad}")
    rows: list[MetricsRow] = []
    for params in params_grid:
        spectrum = diagonalize(hamiltonian(params))
        rows.extend(metrics_for_spectrum(spectrum, params.lam, bins=bins))
    return rows
