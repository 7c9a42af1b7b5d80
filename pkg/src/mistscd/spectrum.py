"""Dressed spectrum of the generalized Jaynes-Cummings Hamiltonian.

The number-conserving coupling splits the Hamiltonian into blocks of fixed
total excitation ``N = i + n``.  Each block is a real symmetric tridiagonal
matrix in the bare basis ``|i, N - i>``, so the full dressed table costs one
small tridiagonal eigenproblem per block.
"""
from __future__ import annotations

import csv
import io
import logging
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .errors import ComputationError, InputError
from .params import Labeling, SystemParams

log = logging.getLogger(__name__)

#: Overlaps below this value are recorded as ambiguous labels.
LABEL_WARNING_OVERLAP = 0.5


def block_bands(params: SystemParams, n_tot: int):
    """Diagonal and off-diagonal bands of excitation block ``n_tot``.

    Basis element ``i`` is the bare state ``|i, n_tot - i>``.
    """
    if n_tot < 0:
        raise InputError(f"excitation number must be non-negative, got {n_tot}")
    d = min(params.transmon_levels, n_tot + 1)
    i = np.arange(d)
    diag = params.bare_energy(i, n_tot - i).astype(float)
    off = params.g * np.sqrt((i[:-1] + 1.0) * (n_tot - i[:-1]))
    return diag, off


def build_block(params: SystemParams, n_tot: int) -> np.ndarray:
    """Dense symmetric matrix of excitation block ``n_tot`` (rad/s)."""
    diag, off = block_bands(params, n_tot)
    return np.diag(diag) + np.diag(off, 1) + np.diag(off, -1)


def _assign_adiabatic(diag, vecs):
    # a tridiagonal matrix with non-zero couplings has a simple spectrum, so
    # eigenvalue ranks cannot change along g -> 0; inherit the bare ranks
    rank = np.empty(len(diag), dtype=int)
    rank[np.argsort(diag, kind="stable")] = np.arange(len(diag))
    return rank


def _assign_overlap(diag, vecs):
    weights = vecs**2
    d = len(diag)
    rank = np.full(d, -1)
    used = np.zeros(d, dtype=bool)
    order = np.argsort(-weights, axis=None, kind="stable")
    for flat in order:
        bare, col = divmod(int(flat), d)
        if rank[bare] >= 0 or used[col]:
            continue
        rank[bare] = col
        used[col] = True
    return rank


_ASSIGNERS = {Labeling.ADIABATIC: _assign_adiabatic, Labeling.OVERLAP: _assign_overlap}


@dataclass(frozen=True)
class LabelWarning:
    n_tot: int
    level: int
    photons: int
    overlap: float


@dataclass(frozen=True)
class DressedSpectrum:
    """Dressed energies ``E[i, n]`` (rad/s) with their bare-state overlaps."""

    energies: np.ndarray
    overlap: np.ndarray
    params: SystemParams
    warnings: tuple = field(default=(), repr=False)

    @property
    def levels(self) -> int:
        return self.energies.shape[0]

    @property
    def n_max(self) -> int:
        return self.energies.shape[1] - 1

    def eigenenergy(self, i: int, n: int) -> float:
        return eigenenergy(self, i, n)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["i", "n", "energy_rad_per_s", "overlap"])
        for i in range(self.levels):
            for n in range(self.n_max + 1):
                w.writerow([i, n, f"{self.energies[i, n]:.12g}", f"{self.overlap[i, n]:.12g}"])
        return buf.getvalue()


def diagonalize_strip(params: SystemParams) -> DressedSpectrum:
    """Diagonalize every excitation block needed to fill ``E[i, n]`` for ``n <= n_max``."""
    L, n_max = params.transmon_levels, params.n_max
    energies = np.full((L, n_max + 1), np.nan)
    overlap = np.full((L, n_max + 1), np.nan)
    assign = _ASSIGNERS[params.labeling]
    warnings = []

    for n_tot in range(n_max + L):
        diag, off = block_bands(params, n_tot)
        if len(diag) == 1:
            vals, vecs = diag.copy(), np.ones((1, 1))
        else:
            try:
                vals, vecs = eigh_tridiagonal(diag, off)
            except (np.linalg.LinAlgError, ValueError) as exc:
                raise ComputationError(f"eigensolver failed on block n_tot={n_tot}: {exc}") from exc
        col = assign(diag, vecs)
        bare = np.arange(len(diag))
        photons = n_tot - bare
        keep = photons <= n_max
        weight = vecs[bare, col] ** 2
        energies[bare[keep], photons[keep]] = vals[col[keep]]
        overlap[bare[keep], photons[keep]] = weight[keep]
        for b in bare[keep & (weight < LABEL_WARNING_OVERLAP)]:
            warnings.append(LabelWarning(n_tot, int(b), int(photons[b]), float(weight[b])))

    if warnings:
        log.debug("%d dressed labels with overlap < %.2f", len(warnings), LABEL_WARNING_OVERLAP)
    energies.flags.writeable = False
    overlap.flags.writeable = False
    return DressedSpectrum(energies, overlap, params, tuple(warnings))


def eigenenergy(spec: DressedSpectrum, i: int, n: int) -> float:
    if not (0 <= i < spec.levels and 0 <= n <= spec.n_max):
        raise InputError(f"(i={i}, n={n}) outside table [0,{spec.levels}) x [0,{spec.n_max}]")
    return float(spec.energies[i, n])
