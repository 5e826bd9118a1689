"""Deterministic text output helpers.

All numbers are written with 17 significant digits and a '.' decimal point
regardless of locale, so identical runs produce byte-identical files.
"""

from __future__ import annotations

import os

import numpy as np

from .eigensolver import Spectrum
from .oscillator import OperatorMatrix

__all__ = ["fmt", "write_lines", "dump_operator_matrix", "spectrum_csv_lines", "coefficient_triplet_lines"]


def fmt(value) -> str:
    """Render one CSV cell; None becomes an empty cell."""
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.17g}"
    return str(value)


def write_lines(path: str, lines) -> None:
    """Write lines with trailing newline, creating parent directories."""
    parent = os.path.dirname(path)
    if parent:
        os.makedirs(parent, exist_ok=True)
    with open(path, "w", newline="\n") as fh:
        for line in lines:
            fh.write(line)
            fh.write("\n")


def dump_operator_matrix(op: OperatorMatrix, path: str) -> None:
    """Debug dump: header "dim D" then one "i j value" line per nonzero entry."""
    lines = [f"dim {op.basis.dim}"]
    rows, cols = np.nonzero(op.mat)
    for i, j in zip(rows, cols):
        lines.append(f"{i} {j} {fmt(op.mat[i, j])}")
    write_lines(path, lines)


def spectrum_csv_lines(spectrum: Spectrum) -> list[str]:
    """Plain "index,energy" dump of a spectrum."""
    lines = ["index,energy"]
    for i, e in enumerate(spectrum.energies):
        lines.append(f"{i},{fmt(e)}")
    return lines


def coefficient_triplet_lines(spectrum: Spectrum) -> list[str]:
    """Text triplets "i,alpha,c" of the full coefficient matrix."""
    lines = ["i,alpha,c"]
    c = spectrum.coefficients
    for i in range(c.shape[0]):
        for alpha in range(c.shape[1]):
            lines.append(f"{i},{alpha},{fmt(c[i, alpha])}")
    return lines
