"""Fan diagram of relative level shifts and ladder-crossing photon numbers."""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass

import numpy as np

from .errors import InputError
from .spectrum import DressedSpectrum


@dataclass(frozen=True)
class FanCurve:
    """``omega_bar_k(N) = E[k, N - k (+1)] - omega_r * N`` sampled at integer N."""

    level: int
    extra_photon: bool
    photons: np.ndarray
    omega_bar: np.ndarray
    omega_r: float

    @property
    def scaled(self) -> np.ndarray:
        """Curve divided by the bare cavity frequency."""
        return self.omega_bar / self.omega_r

    def at(self, N):
        N = np.asarray(N)
        return self.omega_bar[N - self.photons[0]]


@dataclass(frozen=True)
class CrossingResult:
    initial_level: int
    target_level: int
    n_star: float
    bracket: tuple
    error_bound: float

    def as_dict(self) -> dict:
        return {
            "k": self.initial_level,
            "j": self.target_level,
            "n_star": self.n_star,
            "bracket": list(self.bracket),
            "error_bound": self.error_bound,
        }


def error_bound(n_star: float) -> float:
    """Photon-number uncertainty ``2 sqrt(N)`` attached to a crossing."""
    return 2.0 * math.sqrt(n_star)


def fan_curve(spec: DressedSpectrum, k: int, extra_photon: bool = False) -> FanCurve:
    if not 0 <= k < spec.levels:
        raise InputError(f"level k={k} outside [0, {spec.levels})")
    shift = 1 if extra_photon else 0
    N = np.arange(max(0, k - shift), spec.n_max)
    E = spec.energies[k, N - k + shift]
    omega_r = spec.params.omega_r
    return FanCurve(k, bool(extra_photon), N, E - omega_r * N, omega_r)


def find_crossings(spec: DressedSpectrum, k_initial: int, j_target: int, n_range=None) -> list:
    """Integer-N sign changes of ``fan(k, +1 photon) - fan(j)``, linearly refined."""
    if not (0 <= k_initial < spec.levels and 0 <= j_target < spec.levels):
        raise InputError(f"levels ({k_initial}, {j_target}) outside [0, {spec.levels})")
    start = fan_curve(spec, k_initial, extra_photon=True)
    target = fan_curve(spec, j_target, extra_photon=False)
    lo = max(start.photons[0], target.photons[0])
    hi = spec.n_max - 1
    if n_range is not None:
        lo, hi = max(lo, int(n_range[0])), min(hi, int(n_range[1]))
    if hi <= lo:
        raise InputError(f"empty photon range [{lo}, {hi}] for crossing search")

    N = np.arange(lo, hi + 1)
    D = start.at(N) - target.at(N)
    out = []
    for a in range(len(N) - 1):
        d0, d1 = D[a], D[a + 1]
        if d0 == 0.0:
            continue
        if d1 == 0.0:
            n_star = float(N[a + 1])
        elif (d0 < 0) != (d1 < 0):
            n_star = float(N[a] + d0 / (d0 - d1))
        else:
            continue
        out.append(CrossingResult(k_initial, j_target, n_star, (int(N[a]), int(N[a + 1])), error_bound(n_star)))
    return sorted(out, key=lambda c: c.n_star)


def fan_table_csv(spec: DressedSpectrum, levels, extra_levels=()) -> str:
    """Fan curves divided by omega_r; blank cells where a curve is undefined."""
    levels, extra_levels = list(levels), list(extra_levels)
    curves = [fan_curve(spec, k) for k in levels] + [fan_curve(spec, k, True) for k in extra_levels]
    header = ["N"] + [f"k{k}" for k in levels] + [f"k{k}_plus1" for k in extra_levels]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for N in range(spec.n_max):
        row = [N]
        for c in curves:
            row.append(f"{c.scaled[N - c.photons[0]]:.12g}" if N >= c.photons[0] else "")
        w.writerow(row)
    return buf.getvalue()


def crossings_csv(results) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["k", "j", "n_star", "error_bound"])
    for c in results:
        w.writerow([c.initial_level, c.target_level, f"{c.n_star:.12g}", f"{c.error_bound:.12g}"])
    return buf.getvalue()
