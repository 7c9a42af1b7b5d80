"""Response maps over (drive, measurement frequency) and critical photon numbers."""
from __future__ import annotations

import csv
import io
import json
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.signal import find_peaks

from . import dopri, fixed_points as fp, scd
from .effres import EffResCurve
from .errors import InputError, MistScdError
from .params import TWO_PI, SystemParams

log = logging.getLogger(__name__)

LEVEL_NAMES = {0: "g", 1: "e", 2: "f"}

#: measured critical photon numbers, carried only as reference data
EXPERIMENT_REFERENCE = {0: 49.0, 1: 61.0, 2: 20.0}

#: peak prominence as a fraction of the column's dphi/df range
PEAK_PROMINENCE = 0.01
#: minimum frequency separation of the two phase-gradient peaks, Hz
PEAK_SEPARATION_HZ = 0.5e6

MODES = ("ode", "fixed_point", "both")


def amp_to_photon(drive_amplitude, params: SystemParams):
    """Resonant linear-cavity photon number ``(E / kappa)**2``."""
    return (np.asarray(drive_amplitude, dtype=float) / params.kappa) ** 2


def photon_to_amp(photons, params: SystemParams):
    return params.kappa * np.sqrt(np.asarray(photons, dtype=float))


def default_drive_axis(params: SystemParams, n_lo=1.0, n_hi=400.0, count=49):
    return photon_to_amp(np.geomspace(n_lo, n_hi, count), params)


def default_freq_axis(lo_mhz=-30.0, hi_mhz=10.0, count=161):
    return TWO_PI * np.linspace(lo_mhz * 1e6, hi_mhz * 1e6, count)


@dataclass
class ResponseMap:
    """Readout and steady-state classification on a drive x frequency grid.

    Rows follow ``drive_axis`` and columns ``freq_axis`` (``omega_M - omega_r``).
    Cells that were not computed hold NaN / -1 / None; cells that failed carry
    a non-empty entry in ``errors``.
    """

    level: int
    drive_axis: np.ndarray
    freq_axis: np.ndarray
    params: SystemParams
    T: np.ndarray
    phi: np.ndarray
    root_count: np.ndarray
    region: np.ndarray
    errors: np.ndarray
    meta: dict = field(default_factory=dict)

    @property
    def photons(self) -> np.ndarray:
        return amp_to_photon(self.drive_axis, self.params)

    @property
    def invalid(self) -> np.ndarray:
        return self.errors != ""

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["E_rad_per_s", "N", "delta_Mr_rad_per_s", "T", "phi", "root_count", "region"])
        N = self.photons
        for r, E in enumerate(self.drive_axis):
            for c, d in enumerate(self.freq_axis):
                reg = self.region[r, c]
                w.writerow([
                    f"{E:.12g}", f"{N[r]:.12g}", f"{d:.12g}",
                    f"{self.T[r, c]:.12g}", f"{self.phi[r, c]:.12g}",
                    "" if self.root_count[r, c] < 0 else int(self.root_count[r, c]),
                    "" if reg is None else reg.value,
                ])
        return buf.getvalue()


def _ode_rows(curve, drive_axis, omega_M, params, t0, rtol, atol):
    E = np.repeat(drive_axis, len(omega_M))
    wM = np.tile(omega_M, len(drive_axis))
    return scd.integrate_many(curve, E, wM, params.kappa, t0=t0, rtol=rtol, atol=atol)


def _fixed_point_row(curve, E, omega_M, params, window):
    kappa = params.kappa
    counts = fp.root_counts(curve, E, omega_M, kappa)
    scan = params.omega_r + window
    scan_counts = fp.root_counts(curve, E, scan, kappa)
    regions = np.empty(len(omega_M), dtype=object)
    errors = np.full(len(omega_M), "", dtype=object)
    for c, wM in enumerate(omega_M):
        if counts[c] == 1:
            regions[c] = fp.single_label(scan_counts[scan < wM], scan_counts[scan > wM])
            continue
        try:
            regions[c] = fp._label_from_roots(fp.find_roots(curve, E, wM, params))
        except MistScdError as exc:
            errors[c] = type(exc).__name__
    return counts, regions, errors


def run_map(curve: EffResCurve, drive_axis, freq_axis, params: SystemParams, mode="ode",
            t0=1e-6, threads=1, rtol=scd.RTOL, atol=scd.ATOL, window=None) -> ResponseMap:
    """Evaluate every (drive, frequency) cell.

    ``mode`` is ``"ode"`` (transmission and phase from the integrated
    amplitude), ``"fixed_point"`` (root count and region) or ``"both"``.
    Cells are independent; the result does not depend on ``threads``.
    """
    if mode not in MODES:
        raise InputError(f"mode must be one of {MODES}, got {mode!r}")
    drive_axis = np.asarray(drive_axis, dtype=float)
    freq_axis = np.asarray(freq_axis, dtype=float)
    if drive_axis.size == 0 or freq_axis.size == 0:
        raise InputError("map axes must be non-empty")
    if np.any(np.diff(drive_axis) <= 0) or np.any(np.diff(freq_axis) <= 0):
        raise InputError("map axes must be strictly ascending")
    if np.any(drive_axis <= 0):
        raise InputError("drive amplitudes must be positive")
    scd.check_headroom(curve, drive_axis, params.kappa)

    shape = (drive_axis.size, freq_axis.size)
    T = np.full(shape, np.nan)
    phi = np.full(shape, np.nan)
    counts = np.full(shape, -1, dtype=int)
    region = np.full(shape, None, dtype=object)
    errors = np.full(shape, "", dtype=object)
    omega_M = params.omega_r + freq_axis
    row_chunks = np.array_split(np.arange(drive_axis.size), max(1, min(threads, drive_axis.size)))

    if mode in ("ode", "both"):
        def job(rows):
            return rows, _ode_rows(curve, drive_axis[rows], omega_M, params, t0, rtol, atol)

        with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
            results = list(pool.map(job, row_chunks))
        integral = np.full(shape, np.nan + 0j)
        status = np.zeros(shape, dtype=int)
        for rows, res in results:
            integral[rows] = res.integral.reshape(len(rows), -1)
            status[rows] = res.status.reshape(len(rows), -1)
        Tv, pv = scd.readout_from_integral(integral, drive_axis[:, None], t0, params.kappa)
        ok = status == dopri.OK
        T[ok], phi[ok] = Tv[ok], pv[ok]
        errors[status == dopri.LEFT_DOMAIN] = "RangeError"
        errors[status == dopri.STEP_UNDERFLOW] = "StiffnessError"

    if mode in ("fixed_point", "both"):
        win = fp.DEFAULT_WINDOW if window is None else np.asarray(window, dtype=float)

        def fp_job(r):
            return _fixed_point_row(curve, drive_axis[r], omega_M, params, win)

        with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
            rows = list(pool.map(fp_job, range(drive_axis.size)))
        for r, (cnt, reg, err) in enumerate(rows):
            counts[r], region[r] = cnt, reg
            errors[r] = np.where(errors[r] == "", err, errors[r])

    n_bad = int(np.count_nonzero(errors != ""))
    if n_bad:
        log.warning("%d of %d map cells failed", n_bad, errors.size)
    meta = {"mode": mode, "t0": t0, "rtol": rtol, "atol": atol}
    return ResponseMap(curve.level, drive_axis, freq_axis, params, T, phi, counts, region, errors, meta)


def _parabolic(x, y, j):
    y0, y1, y2 = y[j - 1], y[j], y[j + 1]
    den = y0 - 2.0 * y1 + y2
    if den == 0.0:
        return x[j], y1
    s = 0.5 * (y0 - y2) / den
    return x[j] + s * (x[j + 1] - x[j]), y1 - 0.25 * (y0 - y2) * s


def phase_gradient(phi, freq_hz):
    return np.gradient(np.unwrap(np.asarray(phi, dtype=float)), np.asarray(freq_hz, dtype=float))


def phase_gradient_peaks(phi, freq_axis, prominence=PEAK_PROMINENCE) -> list:
    """Peaks of ``dphi/df`` along one drive column, highest first.

    ``freq_axis`` is in rad/s; returned positions are in the same units and
    peak values are in rad per Hz.
    """
    phi = np.asarray(phi, dtype=float)
    freq_axis = np.asarray(freq_axis, dtype=float)
    if phi.size < 8:
        raise InputError("phase-gradient peak search needs at least 8 frequency samples")
    if not np.all(np.isfinite(phi)):
        return []
    f_hz = freq_axis / TWO_PI
    grad = phase_gradient(phi, f_hz)
    span = float(grad.max() - grad.min())
    # below a nanoradian of structure across the axis the column counts as flat
    if span <= 1e-9 / (f_hz[-1] - f_hz[0]):
        return []
    idx, _ = find_peaks(grad, prominence=prominence * span)
    peaks = [_parabolic(freq_axis, grad, j) for j in idx]
    return sorted(peaks, key=lambda p: -p[1])


def _sustained(flags):
    """First index from which every flag is true."""
    for r in range(len(flags)):
        if all(flags[r:]):
            return r
    return None


def split_flags(rmap: ResponseMap, prominence=PEAK_PROMINENCE, separation_hz=PEAK_SEPARATION_HZ):
    sep = TWO_PI * separation_hz
    flags = []
    for r in range(len(rmap.drive_axis)):
        peaks = phase_gradient_peaks(rmap.phi[r], rmap.freq_axis, prominence)
        flags.append(len(peaks) >= 2 and abs(peaks[0][0] - peaks[1][0]) > sep)
    return flags


def critical_point_scd(rmap: ResponseMap, prominence=PEAK_PROMINENCE, separation_hz=PEAK_SEPARATION_HZ):
    """Photon number where the two leading phase-gradient peaks split for good.

    Returns ``None`` when the split never persists to the top of the map.
    """
    r = _sustained(split_flags(rmap, prominence, separation_hz))
    return None if r is None else float(rmap.photons[r])


def divergence_flags(rmap: ResponseMap, separation_hz=PEAK_SEPARATION_HZ):
    sep = TWO_PI * separation_hz
    flags = []
    for r in range(len(rmap.drive_axis)):
        T, phi = rmap.T[r], rmap.phi[r]
        if not (np.all(np.isfinite(T)) and np.all(np.isfinite(phi))):
            flags.append(False)
            continue
        f_T = rmap.freq_axis[np.argmax(T)]
        f_phi = rmap.freq_axis[np.argmax(phase_gradient(phi, rmap.freq_axis / TWO_PI))]
        flags.append(abs(f_T - f_phi) > sep)
    return flags


def critical_point_divergence(rmap: ResponseMap, separation_hz=PEAK_SEPARATION_HZ):
    """Photon number where the transmission maximum and steepest phase part ways."""
    r = _sustained(divergence_flags(rmap, separation_hz))
    return None if r is None else float(rmap.photons[r])


def punch_out_photons(rmap: ResponseMap, tolerance_hz=0.5e6):
    """Smallest drive from which the transmission peak sits at the bare cavity."""
    flags = [bool(np.all(np.isfinite(T))) and abs(rmap.freq_axis[np.argmax(T)]) <= TWO_PI * tolerance_hz
             for T in rmap.T]
    r = _sustained(flags)
    return None if r is None else float(rmap.photons[r])


@dataclass(frozen=True)
class CriticalPointReport:
    level: int
    n_c_scd: float | None
    n_mist: float | None
    n_c_experiment_reference: float | None
    method: dict

    def as_dict(self) -> dict:
        return {
            "level": self.level,
            "level_name": LEVEL_NAMES.get(self.level, str(self.level)),
            "n_c_scd": self.n_c_scd,
            "n_mist": self.n_mist,
            "n_c_experiment_reference": self.n_c_experiment_reference,
            "method": self.method,
        }


def fig5_summary(reports) -> list:
    """Per-level comparison of reference, level-crossing and dynamics critical points.

    The ``n_min`` column takes the lower model prediction and ``mechanism``
    names the model that supplies it.
    """
    reports = sorted(reports, key=lambda r: r.level)
    if {r.level for r in reports} != {0, 1, 2}:
        raise InputError("summary needs reports for levels g, e and f")
    rows = []
    for rep in reports:
        cands = [(v, name) for v, name in ((rep.n_mist, "MIST"), (rep.n_c_scd, "SCD")) if v is not None]
        n_min, mech = min(cands) if cands else (None, None)
        rows.append({
            "level": LEVEL_NAMES[rep.level],
            "n_c_experiment_reference": rep.n_c_experiment_reference,
            "n_mist": rep.n_mist,
            "n_c_scd": rep.n_c_scd,
            "n_min": n_min,
            "mechanism": mech,
        })
    return rows


def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, float):
        return f"{v:.12g}"
    return str(v)


def summary_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    cols = ["level", "n_c_experiment_reference", "n_mist", "n_c_scd", "n_min", "mechanism"]
    w.writerow(cols)
    for row in rows:
        w.writerow([_fmt(row[c]) for c in cols])
    return buf.getvalue()


def to_json(obj) -> str:
    def clean(o):
        if isinstance(o, float):
            return None if math.isnan(o) else float(f"{o:.12g}")
        if isinstance(o, dict):
            return {k: clean(v) for k, v in o.items()}
        if isinstance(o, (list, tuple)):
            return [clean(v) for v in o]
        if isinstance(o, np.generic):
            return clean(o.item())
        return o

    return json.dumps(clean(obj), indent=2, sort_keys=True) + "\n"
