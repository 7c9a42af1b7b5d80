"""Effective cavity resonance ``omega_i(n) = E[i, n+1] - E[i, n]``."""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import PchipInterpolator

from .errors import InputError, RangeError
from .spectrum import DressedSpectrum


@dataclass(frozen=True)
class EffResCurve:
    """Per-level effective resonance with a shape-preserving cubic interpolant.

    Attributes
    ----------
    level : int
        Dressed transmon level.
    samples : ndarray
        ``omega_i(n)`` in rad/s at integer ``n = 0 .. n_max - 1``.
    omega_r : float
        Bare cavity frequency, for derived views such as the dispersive shift.
    """

    level: int
    samples: np.ndarray
    omega_r: float
    _interp: PchipInterpolator
    _deriv: PchipInterpolator

    @property
    def n_top(self) -> float:
        """Largest photon number covered by the table."""
        return float(len(self.samples) - 1)

    @property
    def chi(self) -> float:
        """Dispersive shift ``omega_i(0) - omega_r``."""
        return float(self.samples[0] - self.omega_r)

    def _check(self, n):
        n = np.asarray(n, dtype=float)
        if np.any(n < 0):
            raise InputError("photon number must be non-negative")
        if np.any(n > self.n_top):
            raise RangeError(
                f"photon number {float(np.max(n)):.6g} exceeds effective-resonance table "
                f"(n <= {self.n_top:g}); increase n_max"
            )
        return n

    def eval(self, n):
        n = self._check(n)
        out = self._interp(n)
        return float(out) if out.ndim == 0 else out

    def eval_derivative(self, n):
        n = self._check(n)
        out = self._deriv(n)
        return float(out) if out.ndim == 0 else out

    # unchecked hot-path evaluation for the integrators and root scans
    def __call__(self, n):
        return self._interp(n)

    def derivative(self, n):
        return self._deriv(n)

    def local_minimum(self, n_hi=None):
        """Integer photon number of the smallest sample below ``n_hi``."""
        stop = len(self.samples) if n_hi is None else int(n_hi) + 1
        return int(np.argmin(self.samples[:stop]))

    def to_rows(self):
        n = np.arange(len(self.samples))
        return zip(n, self.samples, self._deriv(n.astype(float)))


def effective_resonance(spec: DressedSpectrum, i: int) -> EffResCurve:
    if not 0 <= i < spec.levels:
        raise InputError(f"level {i} outside [0, {spec.levels})")
    if spec.n_max < 2:
        raise InputError("effective resonance needs n_max >= 2")
    samples = np.diff(spec.energies[i])
    samples.flags.writeable = False
    nodes = np.arange(len(samples), dtype=float)
    interp = PchipInterpolator(nodes, samples, extrapolate=False)
    return EffResCurve(i, samples, spec.params.omega_r, interp, interp.derivative())


def effres_csv(curves) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["i", "n", "omega_eff_rad_per_s", "d_omega_dn"])
    for c in curves:
        for n, val, d in c.to_rows():
            w.writerow([c.level, int(n), f"{val:.12g}", f"{d:.12g}"])
    return buf.getvalue()
