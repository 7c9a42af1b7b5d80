"""Flat ``key = value`` run configuration.

Frequencies carry an explicit unit suffix in the key (``omega_r_GHz``,
``g_MHz``, ``delta_Mr_MHz`` ...) and are quoted as value/2pi; they are turned
into rad/s exactly once, by :meth:`RunConfig.system_params` and friends.
Lists are comma separated.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, fields, replace

import numpy as np

from .errors import InputError
from .params import TWO_PI, EtaConvention, KappaConvention, Labeling, SystemParams

UNITS = {"Hz": 1.0, "kHz": 1e3, "MHz": 1e6, "GHz": 1e9}
LEVELS = {"g": 0, "e": 1, "f": 2}
DRIVE_CONVENTIONS = ("per_2pi", "rad_per_s")


class ConfigError(InputError):
    pass


@dataclass(frozen=True)
class Quantity:
    """Frequency as entered: value(s) and unit."""

    values: tuple
    unit: str = "MHz"

    @property
    def value(self) -> float:
        return self.values[0]

    def hz(self) -> np.ndarray:
        return np.array(self.values, dtype=float) * UNITS[self.unit]

    def emit(self) -> str:
        return ", ".join(repr(float(v)) for v in self.values)


def _q(*values, unit="MHz"):
    return Quantity(tuple(float(v) for v in values), unit)


FREQUENCY_KEYS = ("omega_r", "omega_q", "eta", "g", "kappa", "drive", "delta_Mr",
                  "map_freq_min", "map_freq_max", "peak_separation")
REQUIRED = ("omega_r", "omega_q", "eta", "g", "kappa")


@dataclass(frozen=True)
class RunConfig:
    omega_r: Quantity
    omega_q: Quantity
    eta: Quantity
    g: Quantity
    kappa: Quantity
    transmon_levels: int = 30
    n_max: int = 700
    eta_convention: str = EtaConvention.HALVED.value
    kappa_convention: str = KappaConvention.ANGULAR.value
    labeling: str = Labeling.ADIABATIC.value
    fig3_drive_convention: str = "per_2pi"
    level: str = "f"
    drive: Quantity = field(default_factory=lambda: _q(13.0))
    delta_Mr: Quantity = field(default_factory=lambda: _q(-8.2, -9.0, -10.85))
    t0_us: float = 1.0
    map_n_min: float = 1.0
    map_n_max: float = 400.0
    map_n_drives: int = 49
    map_freq_min: Quantity = field(default_factory=lambda: _q(-30.0))
    map_freq_max: Quantity = field(default_factory=lambda: _q(10.0))
    map_n_freqs: int = 161
    peak_prominence: float = 0.01
    peak_separation: Quantity = field(default_factory=lambda: _q(0.5))
    crossing_k: tuple = (0, 1, 2)
    crossing_j: int = 7
    landscape_points: int = 121
    landscape_extent: float = 1.1
    mode: str = "ode"
    threads: int = 1

    # -- resolved views (rad/s) -------------------------------------------------
    def system_params(self) -> SystemParams:
        kconv = KappaConvention(self.kappa_convention)
        kappa_hz = self.kappa.hz()[0]
        return SystemParams(
            omega_r=float(TWO_PI * self.omega_r.hz()[0]),
            omega_q=float(TWO_PI * self.omega_q.hz()[0]),
            eta=float(TWO_PI * self.eta.hz()[0]),
            g=float(TWO_PI * self.g.hz()[0]),
            kappa=float(TWO_PI * kappa_hz if kconv is KappaConvention.ANGULAR else kappa_hz),
            transmon_levels=self.transmon_levels,
            n_max=self.n_max,
            eta_convention=self.eta_convention,
            kappa_convention=kconv,
            labeling=self.labeling,
        )

    def drive_amplitudes(self) -> np.ndarray:
        scale = TWO_PI if self.fig3_drive_convention == "per_2pi" else 1.0
        return scale * self.drive.hz()

    def detunings(self) -> np.ndarray:
        return TWO_PI * self.delta_Mr.hz()

    def level_index(self) -> int:
        return parse_level(self.level)

    def t0(self) -> float:
        return self.t0_us * 1e-6

    def freq_axis(self) -> np.ndarray:
        lo, hi = self.map_freq_min.hz()[0], self.map_freq_max.hz()[0]
        return TWO_PI * np.linspace(lo, hi, self.map_n_freqs)

    def photon_axis(self) -> np.ndarray:
        return np.geomspace(self.map_n_min, self.map_n_max, self.map_n_drives)

    def separation_hz(self) -> float:
        return float(self.peak_separation.hz()[0])

    def with_(self, **changes) -> "RunConfig":
        return replace(self, **changes)

    # -- serialization ----------------------------------------------------------
    def emit(self) -> str:
        lines = []
        for f in fields(self):
            v = getattr(self, f.name)
            if isinstance(v, Quantity):
                lines.append(f"{f.name}_{v.unit} = {v.emit()}")
            elif isinstance(v, tuple):
                lines.append(f"{f.name} = {', '.join(str(x) for x in v)}")
            elif isinstance(v, float):
                lines.append(f"{f.name} = {v!r}")
            else:
                lines.append(f"{f.name} = {v}")
        return "\n".join(lines) + "\n"

    def resolved(self) -> dict:
        """Fully resolved values in rad/s, for provenance records."""
        p = self.system_params()
        out = {f.name: getattr(p, f.name) for f in fields(p)}
        for k in ("eta_convention", "kappa_convention", "labeling"):
            out[k] = out[k].value
        out.update(
            level=self.level_index(),
            drive_rad_per_s=self.drive_amplitudes().tolist(),
            delta_Mr_rad_per_s=self.detunings().tolist(),
            t0_s=self.t0(),
            map_photons=[self.map_n_min, self.map_n_max, self.map_n_drives],
            map_delta_Mr_rad_per_s=[float(self.freq_axis()[0]), float(self.freq_axis()[-1]), self.map_n_freqs],
            peak_prominence=self.peak_prominence,
            peak_separation_rad_per_s=TWO_PI * self.separation_hz(),
            fig3_drive_convention=self.fig3_drive_convention,
        )
        return out


def parse_level(text) -> int:
    text = str(text).strip()
    if text in LEVELS:
        return LEVELS[text]
    try:
        value = int(text)
    except ValueError:
        raise InputError(f"level must be g, e, f or an integer, got {text!r}") from None
    if value < 0:
        raise InputError(f"level must be non-negative, got {value}")
    return value


_FIELD_TYPES = {f.name: f for f in fields(RunConfig)}
_INT_FIELDS = {"transmon_levels", "n_max", "map_n_drives", "map_n_freqs", "crossing_j",
               "landscape_points", "threads"}
_FLOAT_FIELDS = {"t0_us", "map_n_min", "map_n_max", "peak_prominence", "landscape_extent"}
_CHOICES = {
    "eta_convention": tuple(e.value for e in EtaConvention),
    "kappa_convention": tuple(e.value for e in KappaConvention),
    "labeling": tuple(e.value for e in Labeling),
    "fig3_drive_convention": DRIVE_CONVENTIONS,
    "mode": ("ode", "fixed_point", "both"),
}
_POSITIVE = {"omega_r", "omega_q", "kappa", "transmon_levels", "n_max", "t0_us", "map_n_min",
             "map_n_max", "map_n_drives", "map_n_freqs", "landscape_points", "landscape_extent",
             "threads", "peak_separation"}
_NON_NEGATIVE = {"eta", "g", "drive", "peak_prominence", "crossing_j", "crossing_k"}


def _split_key(key):
    for name in FREQUENCY_KEYS:
        for unit in UNITS:
            if key == f"{name}_{unit}":
                return name, unit
    return key, None


def _number(text, kind, key, lineno):
    try:
        if kind is int:
            return int(text)
        v = float(text)
    except ValueError:
        raise ConfigError(f"line {lineno}: malformed number {text!r} for key {key!r}") from None
    if not math.isfinite(v):
        raise ConfigError(f"line {lineno}: non-finite value for key {key!r}")
    return v


def parse_config(text: str) -> RunConfig:
    values = {}
    seen_line = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw.strip()!r}")
        key, _, val = (s.strip() for s in line.partition("="))
        name, unit = _split_key(key)
        if name in FREQUENCY_KEYS and unit is None:
            raise ConfigError(f"line {lineno}: frequency key {key!r} needs a unit suffix (_Hz, _kHz, _MHz, _GHz)")
        if name not in _FIELD_TYPES:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if name in values:
            raise ConfigError(f"line {lineno}: key {name!r} already set on line {seen_line[name]}")
        if val == "":
            raise ConfigError(f"line {lineno}: empty value for key {key!r}")

        if unit is not None:
            items = [_number(v.strip(), float, key, lineno) for v in val.split(",")]
            if name not in ("drive", "delta_Mr") and len(items) != 1:
                raise ConfigError(f"line {lineno}: key {key!r} takes a single value")
            parsed = Quantity(tuple(items), unit)
            check = items
        elif name == "crossing_k":
            parsed = tuple(_number(v.strip(), int, key, lineno) for v in val.split(","))
            check = parsed
        elif name in _INT_FIELDS:
            parsed = _number(val, int, key, lineno)
            check = [parsed]
        elif name in _FLOAT_FIELDS:
            parsed = _number(val, float, key, lineno)
            check = [parsed]
        elif name == "level":
            parse_level(val)
            parsed = val
            check = []
        else:
            if name in _CHOICES and val not in _CHOICES[name]:
                raise ConfigError(f"line {lineno}: {key} must be one of {_CHOICES[name]}, got {val!r}")
            parsed = val
            check = []

        if name in _POSITIVE and any(not x > 0 for x in check):
            raise ConfigError(f"line {lineno}: {key} must be positive")
        if name in _NON_NEGATIVE and any(x < 0 for x in check):
            raise ConfigError(f"line {lineno}: {key} must be non-negative")
        values[name] = parsed
        seen_line[name] = lineno

    missing = [k for k in REQUIRED if k not in values]
    if missing:
        raise ConfigError("missing required keys: " + ", ".join(f"{k}_<unit>" for k in missing))
    try:
        cfg = RunConfig(**values)
        cfg.system_params()
    except InputError as exc:
        raise ConfigError(str(exc)) from None
    if cfg.transmon_levels < 2:
        raise ConfigError("transmon_levels must be >= 2")
    if cfg.map_n_freqs < 8:
        raise ConfigError("map_n_freqs must be >= 8 for phase-gradient peaks")
    return cfg


PAPER_PRESET = """\
# measured device, frequencies as value/2pi
omega_r_GHz = 5.078
omega_q_GHz = 5.795
g_MHz = 55
eta_MHz = 111
kappa_MHz = 1.3
"""

PRESETS = {"paper": PAPER_PRESET}


def load_preset(name: str) -> RunConfig:
    if name not in PRESETS:
        raise InputError(f"unknown preset {name!r}; available: {', '.join(PRESETS)}")
    return parse_config(PRESETS[name])
