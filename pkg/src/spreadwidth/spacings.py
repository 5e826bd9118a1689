"""Symmetry-block bookkeeping and nearest-neighbor spacing statistics.

The Hamiltonian commutes exactly with the reflection q1 -> -q1, and its
three-fold symmetry produces exactly degenerate doublets.  Reflection parity
plus degeneracy pairing therefore splits the spectrum into four blocks:
non-degenerate even (A), non-degenerate odd (B) and the degenerate pairs
(C even member, D odd member).  Spacing statistics must always be taken
inside one block; mixing blocks fakes a Poisson law.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .eigensolver import Spectrum
from .oscillator import parity_vector

__all__ = [
    "SymmetryLabel",
    "SpacingSample",
    "WindowAnalysis",
    "classify_symmetry",
    "unfold",
    "spacing_distance",
    "block_spacing_windows",
    "poisson_bin_mass",
    "wigner_bin_mass",
    "SPACING_BIN_EDGES",
]

PARITY_PURITY = 0.99
DEGENERACY_TOL = 1e-6

#: histogram grid for the distance to the reference spacing laws
SPACING_BIN_EDGES = np.arange(0.0, 4.0 + 0.25, 0.25)


@dataclass
class SymmetryLabel:
    """Block assignment of one eigenstate."""

    block: str  # A | B | C | D
    parity: int  # +1 or -1 under q1 -> -q1
    partner: int | None = None  # index of the degenerate companion (C/D only)
    flag: str | None = None  # diagnostic, e.g. ambiguous parity


def classify_symmetry(spectrum: Spectrum, tol_degeneracy: float = DEGENERACY_TOL) -> list[SymmetryLabel]:
    """Assign each eigenstate to one of the blocks A, B, C, D.

    Parity is the expectation of the reflection; values below the purity
    threshold are flagged but still classified by sign.  Near-degenerate
    clusters are paired greedily into opposite-parity (C, D) couples; members
    left over are treated as accidental near-degeneracies and labeled A or B
    with a flag.
    """
    pi = parity_vector(spectrum.basis)
    expect = spectrum.coefficients**2 @ pi
    energies = spectrum.energies
    n = spectrum.dim
    labels: list[SymmetryLabel | None] = [None] * n

    start = 0
    while start < n:
        stop = start + 1
        while stop < n and energies[stop] - energies[stop - 1] <= tol_degeneracy:
            stop += 1
        members = list(range(start, stop))
        while members:
            i = members.pop(0)
            partner = None
            for j in members:
                if expect[i] * expect[j] < 0:
                    partner = j
                    break
            if partner is not None:
                members.remove(partner)
                even, odd = (i, partner) if expect[i] > 0 else (partner, i)
                labels[even] = SymmetryLabel("C", 1, partner=odd)
                labels[odd] = SymmetryLabel("D", -1, partner=even)
            else:
                par = 1 if expect[i] > 0 else -1
                flag = "unpaired-degeneracy" if stop - start > 1 else None
                labels[i] = SymmetryLabel("A" if par > 0 else "B", par, flag=flag)
        start = stop

    for i, lab in enumerate(labels):
        if abs(expect[i]) <= PARITY_PURITY:
            lab.flag = f"ambiguous-parity({expect[i]:.3f})" if lab.flag is None else lab.flag
    return labels  # type: ignore[return-value]


def unfold(energies, fit_degree: int = 5) -> np.ndarray:
    """Map energies to unit mean level density via a polynomial staircase fit.

    Fits the cumulative level count N(E) (midpoint convention) with a
    polynomial over the rescaled domain, which makes the result invariant
    under affine transformations of the input.
    """
    e = np.asarray(energies, dtype=float)
    if e.ndim != 1 or len(e) < 20:
        raise ValueError(f"need at least 20 ascending levels, got {e.shape}")
    if not 3 <= fit_degree <= 9:
        raise ValueError(f"fit degree must be within [3, 9], got {fit_degree}")
    if np.any(np.diff(e) < 0):
        raise ValueError("energies must be ascending")
    staircase = np.arange(len(e)) + 0.5
    poly, info = np.polynomial.Polynomial.fit(e, staircase, deg=fit_degree, full=True)
    rank = info[1]
    if rank < fit_degree + 1:
        raise ValueError(f"ill-conditioned staircase fit (rank {rank} < {fit_degree + 1})")
    unfolded = poly(e)
    mean_spacing = (unfolded[-1] - unfolded[0]) / (len(e) - 1)
    if not 0.95 <= mean_spacing <= 1.05:
        raise ValueError(f"unfolding failed to normalize the density (mean spacing {mean_spacing:.3f})")
    return unfolded


@dataclass
class SpacingSample:
    """Unfolded nearest-neighbor spacings of one symmetry block.

    The unit-mean invariant applies to the spacings of a complete unfolded
    block; pass ``enforce_mean=False`` for windowed subsets, whose local mean
    may legitimately drift.
    """

    block: str
    spacings: np.ndarray
    enforce_mean: bool = True

    def __post_init__(self):
        self.spacings = np.asarray(self.spacings, dtype=float)
        if np.any(self.spacings < 0):
            raise ValueError("negative spacing, unfolding was not monotone")
        if self.enforce_mean and len(self.spacings) > 0:
            mean = float(self.spacings.mean())
            if not 0.95 <= mean <= 1.05:
                raise ValueError(f"unfolded spacings have mean {mean:.3f}, expected 1 within 5%")


def poisson_bin_mass(a: float, b: float) -> float:
    """Mass of the Poisson law exp(-s) on [a, b)."""
    return math.exp(-a) - math.exp(-b)


def wigner_bin_mass(a: float, b: float) -> float:
    """Mass of the Wigner surmise (pi/2) s exp(-pi s^2 / 4) on [a, b)."""
    return math.exp(-math.pi * a * a / 4.0) - math.exp(-math.pi * b * b / 4.0)


def spacing_distance(sample: SpacingSample) -> tuple[float, float]:
    """L1 distances of the empirical spacing histogram to Poisson and Wigner.

    Histogram bin width 0.25 on [0, 4]; the reference masses are the exact
    per-bin integrals of the two densities.
    """
    s = sample.spacings
    if len(s) < 20:
        raise ValueError(f"need at least 20 spacings, got {len(s)}")
    counts, _ = np.histogram(s, bins=SPACING_BIN_EDGES)
    emp = counts / len(s)
    edges = SPACING_BIN_EDGES
    d_poisson = 0.0
    d_wigner = 0.0
    for k in range(len(edges) - 1):
        a, b = edges[k], edges[k + 1]
        d_poisson += abs(emp[k] - poisson_bin_mass(a, b))
        d_wigner += abs(emp[k] - wigner_bin_mass(a, b))
    return float(d_poisson), float(d_wigner)


@dataclass
class WindowAnalysis:
    """Spacing statistics of one scaled-energy window, per block and pooled."""

    window: tuple[float, float]  # requested, in epsilon = lambda^2 E units
    used_window: tuple[float, float]  # after any widening
    levels: dict  # block -> number of levels inside the window
    samples: dict  # block -> SpacingSample ("ALL" = pooled)
    distances: dict  # block -> (d_poisson, d_wigner) or None if too few

    def pooled_distances(self):
        return self.distances.get("ALL")


def block_spacing_windows(
    spectrum,
    lam: float,
    window: tuple[float, float],
    labels=None,
    blocks=("A", "B", "C", "D"),
    trust_top: float | None = None,
    fit_degree: int = 5,
    min_spacings: int = 20,
    widen: bool = False,
    widen_step: float = 0.005,
) -> WindowAnalysis:
    """Unfold each block over its trusted levels and window the spacings.

    Each block is unfolded separately over energies up to ``trust_top``
    (default: two shells below the truncation).  A spacing belongs to the
    window when the midpoint of its level pair does, in epsilon = lambda^2 E
    units.  With ``widen=True`` the upper edge grows in ``widen_step`` steps
    until the pooled sample reaches ``min_spacings`` (the documented merge
    rule for thinly populated windows); per-block distances stay empty where
    a single block remains below the minimum.
    """
    if labels is None:
        labels = classify_symmetry(spectrum)
    if trust_top is None:
        trust_top = float(spectrum.basis.max_shell - 1)
    block_arr = np.array([lab.block for lab in labels])
    energies = spectrum.energies

    unfolded: dict[str, tuple[np.ndarray, np.ndarray]] = {}
    for b in blocks:
        lv = energies[(block_arr == b) & (energies <= trust_top)]
        if len(lv) < 20:
            continue
        try:
            u = unfold(lv, fit_degree=fit_degree)
        except ValueError:
            # too few or too irregular levels for a usable staircase fit;
            # the block shows up with counts but without distances
            continue
        mid = lam * lam * 0.5 * (lv[1:] + lv[:-1])
        unfolded[b] = (np.diff(u), mid)

    lo, hi = window
    while True:
        pooled = []
        levels = {}
        samples = {}
        for b in blocks:
            lv = energies[block_arr == b]
            eps_lv = lam * lam * lv
            levels[b] = int(np.sum((eps_lv >= lo) & (eps_lv < hi)))
            if b not in unfolded:
                samples[b] = SpacingSample(b, np.array([]), enforce_mean=False)
                continue
            s, mid = unfolded[b]
            sel = s[(mid >= lo) & (mid < hi)]
            samples[b] = SpacingSample(b, sel, enforce_mean=False)
            pooled.append(sel)
        all_s = np.concatenate(pooled) if pooled else np.array([])
        samples["ALL"] = SpacingSample("ALL", all_s, enforce_mean=False)
        if not widen or len(all_s) >= min_spacings or hi >= lam * lam * trust_top:
            break
        hi = hi + widen_step

    distances = {}
    need = max(min_spacings, 20)  # spacing_distance refuses smaller samples
    for key, sample in samples.items():
        distances[key] = spacing_distance(sample) if len(sample.spacings) >= need else None
    return WindowAnalysis(
        window=window,
        used_window=(lo, hi),
        levels=levels,
        samples=samples,
        distances=distances,
    )
