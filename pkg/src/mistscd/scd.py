"""Semiclassical dynamics of the driven cavity amplitude.

In the frame rotating at the drive frequency the coherent amplitude obeys

    d(alpha)/dt = -i (omega_i(|alpha|^2) - omega_M) alpha - i E/2 - (kappa/2) alpha

with ``omega_i`` the effective resonance of the occupied transmon level.
The readout signal is the time integral of ``alpha`` over the pulse.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass

import numpy as np

from . import dopri
from .effres import EffResCurve
from .errors import InputError, RangeError, StiffnessError
from .params import SystemParams

RTOL = 1e-8
ATOL = 1e-10
#: maximum linear-cavity photon number as a fraction of the tabulated range
HEADROOM = 1.5


@dataclass(frozen=True)
class DriveConfig:
    drive_amplitude: float
    omega_M: float
    t0: float = 1e-6
    initial_alpha: complex = 0j

    def __post_init__(self):
        if not self.drive_amplitude >= 0:
            raise InputError(f"drive amplitude must be >= 0, got {self.drive_amplitude!r}")
        if not self.t0 > 0:
            raise InputError(f"integration time must be > 0, got {self.t0!r}")


@dataclass(frozen=True)
class Trajectory:
    times: np.ndarray
    alphas: np.ndarray
    integral: complex
    accepted: int
    rejected: int

    @property
    def final(self) -> complex:
        return complex(self.alphas[-1])

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["t", "re_alpha", "im_alpha", "n"])
        for t, a in zip(self.times, self.alphas):
            w.writerow([f"{t:.12g}", f"{a.real:.12g}", f"{a.imag:.12g}", f"{abs(a) ** 2:.12g}"])
        return buf.getvalue()


def check_headroom(curve: EffResCurve, drive_amplitude, kappa):
    n_lin = (np.max(drive_amplitude) / kappa) ** 2
    limit = curve.n_top / HEADROOM
    if n_lin > limit:
        raise RangeError(
            f"drive photon number {n_lin:.6g} exceeds headroom limit {limit:.6g}; "
            f"increase n_max to at least {math.ceil(HEADROOM * n_lin) + 1}"
        )


def alpha_dot(curve: EffResCurve, alpha, drive_amplitude, omega_M, kappa):
    """Right-hand side of the amplitude equation (vectorized over ``alpha``)."""
    alpha = np.asarray(alpha, dtype=complex)
    n = np.minimum(alpha.real**2 + alpha.imag**2, curve.n_top)
    detuning = curve(n) - omega_M
    return -1j * detuning * alpha - 0.5j * drive_amplitude - 0.5 * kappa * alpha


def _lane_rhs(curve, drive, omega_M, kappa):
    n_top = curve.n_top

    def rhs(lanes, y):
        x, p = y[:, 0], y[:, 1]
        n = np.minimum(x * x + p * p, n_top)
        detuning = curve(n) - omega_M[lanes]
        out = np.empty_like(y)
        out[:, 0] = detuning * p - 0.5 * kappa * x
        out[:, 1] = -detuning * x - 0.5 * drive[lanes] - 0.5 * kappa * p
        out[:, 2] = x
        out[:, 3] = p
        return out

    def in_domain(y):
        return y[:, 0] ** 2 + y[:, 1] ** 2 <= n_top

    return rhs, in_domain


@dataclass(frozen=True)
class BatchResult:
    final_alpha: np.ndarray
    integral: np.ndarray
    status: np.ndarray


def integrate_many(curve, drive_amplitude, omega_M, kappa, t0=1e-6, initial_alpha=0j,
                   rtol=RTOL, atol=ATOL) -> BatchResult:
    """Integrate independent (drive, frequency) pairs; failures are reported per lane.

    ``status`` uses the codes of :mod:`mistscd.dopri`.
    """
    drive_amplitude = np.atleast_1d(np.asarray(drive_amplitude, dtype=float))
    omega_M = np.broadcast_to(np.asarray(omega_M, dtype=float), drive_amplitude.shape).copy()
    m = drive_amplitude.size
    y0 = np.zeros((m, 4))
    a0 = np.broadcast_to(np.asarray(initial_alpha, dtype=complex), (m,))
    y0[:, 0], y0[:, 1] = a0.real, a0.imag
    rhs, in_domain = _lane_rhs(curve, drive_amplitude, omega_M, kappa)
    res = dopri.integrate_lanes(rhs, y0, t0, rtol=rtol, atol=atol, err_components=(0, 1),
                                h0=1e-3 / kappa, in_domain=in_domain)
    return BatchResult(res.y[:, 0] + 1j * res.y[:, 1], res.y[:, 2] + 1j * res.y[:, 3], res.status)


def integrate(curve: EffResCurve, drive: DriveConfig, params: SystemParams,
              rtol=RTOL, atol=ATOL) -> Trajectory:
    """Integrate one trajectory from ``drive.initial_alpha`` to ``drive.t0``."""
    kappa = params.kappa
    check_headroom(curve, drive.drive_amplitude, kappa)
    if abs(drive.initial_alpha) ** 2 > curve.n_top:
        raise RangeError("initial amplitude outside effective-resonance table")
    E = np.array([drive.drive_amplitude])
    wM = np.array([drive.omega_M])
    rhs, in_domain = _lane_rhs(curve, E, wM, kappa)
    y0 = np.array([[drive.initial_alpha.real, drive.initial_alpha.imag, 0.0, 0.0]])
    res = dopri.integrate_lanes(rhs, y0, drive.t0, rtol=rtol, atol=atol, err_components=(0, 1),
                                h0=1e-3 / kappa, in_domain=in_domain, record=True)
    times = np.array([h[0][0] for h in res.history])
    states = np.array([h[1][0] for h in res.history])
    alphas = states[:, 0] + 1j * states[:, 1]
    if res.status[0] == dopri.LEFT_DOMAIN:
        raise RangeError(f"|alpha|^2 = {abs(alphas[-1]) ** 2:.6g} left the effective-resonance table "
                         f"at t = {times[-1]:.6g} s; increase n_max")
    if res.status[0] == dopri.STEP_UNDERFLOW:
        raise StiffnessError(f"step size underflow at t = {times[-1]:.6g} s, alpha = {alphas[-1]:.6g}",
                             t=float(times[-1]), alpha=complex(alphas[-1]))
    return Trajectory(times, alphas, complex(states[-1, 2] + 1j * states[-1, 3]),
                      int(res.accepted[0]), int(res.rejected[0]))


def readout_from_integral(integral, drive_amplitude, t0, kappa):
    """Normalized transmission and phase from the integrated amplitude.

    ``T = |M| kappa / E`` and ``phi = arg(M) + pi/2`` with ``M = integral / t0``,
    so a resonant linear cavity at steady state gives ``(1, 0)``.
    """
    integral = np.asarray(integral, dtype=complex)
    E = np.asarray(drive_amplitude, dtype=float)
    M = integral / t0
    with np.errstate(divide="ignore", invalid="ignore"):
        T = np.where(E > 0, np.abs(M) * kappa / np.where(E > 0, E, 1.0), 0.0)
    phi = np.where(E > 0, np.angle(1j * M), 0.0)
    # np.angle maps onto [-pi, pi]; fold -pi into the (-pi, pi] convention
    phi = np.where(phi <= -np.pi, phi + 2 * np.pi, phi)
    return T, phi


def readout(traj: Trajectory, drive: DriveConfig, params: SystemParams):
    T, phi = readout_from_integral(traj.integral, drive.drive_amplitude, drive.t0, params.kappa)
    return float(T), float(phi)


def landscape(curve, drive: DriveConfig, params: SystemParams, re_axis, im_axis):
    """Natural ``log|alpha_dot|`` and ``arg(alpha_dot)`` on a phase-space grid."""
    X, Y = np.meshgrid(np.asarray(re_axis, float), np.asarray(im_axis, float), indexing="xy")
    alpha = X + 1j * Y
    if np.max(np.abs(alpha) ** 2) > curve.n_top:
        raise RangeError("landscape grid extends beyond effective-resonance table")
    ad = alpha_dot(curve, alpha, drive.drive_amplitude, drive.omega_M, params.kappa)
    with np.errstate(divide="ignore"):
        mag = np.log(np.abs(ad))
    return X, Y, mag, np.angle(ad)


def landscape_csv(X, Y, mag, ang) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["re_alpha", "im_alpha", "log_abs_alpha_dot", "angle_alpha_dot"])
    for x, y, m_, a in zip(X.ravel(), Y.ravel(), mag.ravel(), ang.ravel()):
        w.writerow([f"{x:.12g}", f"{y:.12g}", f"{m_:.12g}", f"{a:.12g}"])
    return buf.getvalue()
