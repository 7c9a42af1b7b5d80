"""Steady states of the amplitude equation and their stability.

Setting ``d(alpha)/dt = 0`` and eliminating the phase gives the branch-free
condition

    H(n) = n * ((omega_i(n) - omega_M)**2 + kappa**2 / 4) - E**2 / 4 = 0,

on ``0 < n <= (E/kappa)**2``.  ``H(0+) < 0`` and ``H((E/kappa)**2) >= 0``, so
a sign scan always finds an odd number of roots.
"""
from __future__ import annotations

import csv
import enum
import io
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .effres import EffResCurve
from .errors import ComputationError, DegenerateRootError, InputError, RangeError
from .params import TWO_PI, SystemParams

GRID_POINTS = 4096
LOG_POINTS = 1024
LOG_FLOOR = 1e-12  # smallest scanned n, relative to alpha0**2
ROOT_RTOL = 1e-10
DEGENERATE_DET = 1e-9  # |det| threshold in units of kappa**2
TOP_PAD = 1e-9

#: frequency window (omega_M - omega_r) for the S0/S1 scan, rad/s; the
#: low-frequency bistable band can be narrower than 0.2 MHz, hence 10 kHz steps
DEFAULT_WINDOW = TWO_PI * np.linspace(-30e6, 10e6, 4001)


class Stability(str, enum.Enum):
    STABLE = "stable"
    SADDLE = "saddle"


class RegionLabel(str, enum.Enum):
    S0 = "S0"
    S1 = "S1"
    SB_LOW = "SB_LOW"
    SB_HIGH = "SB_HIGH"


@dataclass(frozen=True)
class FixedPoint:
    n_star: float
    r: float
    theta: float
    detuning_sign: int
    stability: Stability | None = None
    jacobian_det: float = math.nan
    jacobian_trace: float = math.nan

    @property
    def alpha(self) -> complex:
        return self.r * complex(math.cos(self.theta), math.sin(self.theta))


def scan_grid(n_top: float) -> np.ndarray:
    """Scan points on ``(0, n_top]``: logarithmic below one photon, linear above."""
    if n_top <= 0:
        raise InputError("drive amplitude must be positive")
    if n_top <= 1.0:
        return np.geomspace(LOG_FLOOR * n_top, n_top, GRID_POINTS)
    low = np.geomspace(LOG_FLOOR * n_top, 1.0, LOG_POINTS, endpoint=False)
    return np.concatenate([low, np.linspace(1.0, n_top, GRID_POINTS - LOG_POINTS)])


def _prepare(curve: EffResCurve, drive_amplitude, kappa):
    if not drive_amplitude > 0:
        raise InputError("fixed points need a positive drive amplitude")
    n_top = (drive_amplitude / kappa) ** 2
    if n_top > curve.n_top:
        raise RangeError(f"alpha0^2 = {n_top:.6g} exceeds effective-resonance table (n <= {curve.n_top:g})")
    # H(n_top) >= 0 exactly; pad so a root at the endpoint survives rounding
    grid = np.minimum(scan_grid(n_top * (1 + TOP_PAD)), curve.n_top)
    return grid, curve(grid)


def _h(grid, omega_grid, drive_amplitude, omega_M, kappa):
    det = omega_grid - np.asarray(omega_M)[..., None]
    return grid * (det * det + 0.25 * kappa * kappa) - 0.25 * drive_amplitude * drive_amplitude


def root_counts(curve: EffResCurve, drive_amplitude, omega_M, kappa) -> np.ndarray:
    """Number of grid sign changes of H for each entry of ``omega_M``."""
    grid, wg = _prepare(curve, drive_amplitude, kappa)
    nonneg = _h(grid, wg, drive_amplitude, np.atleast_1d(omega_M), kappa) >= 0
    return np.count_nonzero(nonneg[:, 1:] != nonneg[:, :-1], axis=1)


def classify(point: FixedPoint, curve: EffResCurve, drive_amplitude, omega_M, params: SystemParams) -> FixedPoint:
    """Fill stability from the Jacobian of the real/imaginary flow at ``point``."""
    kappa = params.kappa
    n = point.n_star
    J = jacobian(curve, point.alpha, omega_M, kappa)
    det = float(J[0, 0] * J[1, 1] - J[0, 1] * J[1, 0])
    trace = float(np.trace(J))
    if abs(det) < DEGENERATE_DET * kappa**2:
        raise DegenerateRootError(f"degenerate fixed point at n = {n:.6g} (det = {det:.3g})")
    stability = Stability.STABLE if det > 0 else Stability.SADDLE
    return FixedPoint(point.n_star, point.r, point.theta, point.detuning_sign, stability, det, trace)


def jacobian(curve, alpha, omega_M, kappa):
    """Analytic 2x2 Jacobian of the flow in (Re alpha, Im alpha)."""
    x, y = alpha.real, alpha.imag
    n = x * x + y * y
    delta = float(curve(n)) - omega_M
    slope = float(curve.derivative(n))
    return np.array([
        [-0.5 * kappa + 2 * x * y * slope, delta + 2 * y * y * slope],
        [-delta - 2 * x * x * slope, -0.5 * kappa - 2 * x * y * slope],
    ])


def find_roots(curve: EffResCurve, drive_amplitude, omega_M, params: SystemParams, classify_points=True) -> list:
    """Fixed points sorted by photon number."""
    kappa = params.kappa
    grid, wg = _prepare(curve, drive_amplitude, kappa)
    H = _h(grid, wg, drive_amplitude, omega_M, kappa)
    nonneg = H >= 0
    brackets = np.flatnonzero(nonneg[1:] != nonneg[:-1])

    def h_scalar(n):
        d = float(curve(n)) - omega_M
        return n * (d * d + 0.25 * kappa * kappa) - 0.25 * drive_amplitude**2

    out = []
    for a in brackets:
        lo, hi = grid[a], grid[a + 1]
        n_star = brentq(h_scalar, lo, hi, xtol=1e-300, rtol=ROOT_RTOL)
        delta = float(curve(n_star)) - omega_M
        alpha = -1j * drive_amplitude / (2j * delta + kappa)
        p = FixedPoint(n_star, abs(alpha), math.atan2(alpha.imag, alpha.real), int(np.sign(delta)))
        out.append(classify(p, curve, drive_amplitude, omega_M, params) if classify_points else p)
    return out


def _label_from_roots(roots) -> RegionLabel | None:
    if len(roots) == 1:
        return None
    if len(roots) == 3:
        stable = [p for p in roots if p.stability is Stability.STABLE]
        if len(stable) != 2:
            raise ComputationError("three fixed points without two stable ones")
        same = stable[0].detuning_sign == stable[1].detuning_sign
        return RegionLabel.SB_LOW if same else RegionLabel.SB_HIGH
    if len(roots) % 2 == 0:
        raise DegenerateRootError(f"{len(roots)} fixed points: parameter point on a bifurcation boundary")
    raise ComputationError(f"{len(roots)} fixed points: multistability is outside the model's expected range")


def single_label(counts_below, counts_above) -> RegionLabel:
    """S1 when bistability exists on both sides of a monostable frequency."""
    both = np.any(np.asarray(counts_below) >= 3) and np.any(np.asarray(counts_above) >= 3)
    return RegionLabel.S1 if both else RegionLabel.S0


def region(curve: EffResCurve, drive_amplitude, omega_M, params: SystemParams, window=None) -> RegionLabel:
    """Region label of one (drive, frequency) point.

    ``window`` holds the measurement detunings ``omega_M - omega_r`` (rad/s)
    scanned to tell S1 from S0; defaults to -30..+10 MHz (value/2pi).
    """
    roots = find_roots(curve, drive_amplitude, omega_M, params)
    label = _label_from_roots(roots)
    if label is not None:
        return label
    offsets = DEFAULT_WINDOW if window is None else np.asarray(window, dtype=float)
    scan = params.omega_r + offsets
    counts = root_counts(curve, drive_amplitude, scan, params.kappa)
    return single_label(counts[scan < omega_M], counts[scan > omega_M])


def roots_csv(rows) -> str:
    """Rows of ``(E, omega_M, roots, region)``."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["E_rad_per_s", "omega_M_rad_per_s", "root_count", "n_star", "stability", "region"])
    for E, wM, roots, reg in rows:
        w.writerow([
            f"{E:.12g}", f"{wM:.12g}", len(roots),
            ";".join(f"{p.n_star:.12g}" for p in roots),
            ";".join(p.stability.value if p.stability else "" for p in roots),
            reg.value if reg is not None else "",
        ])
    return buf.getvalue()
