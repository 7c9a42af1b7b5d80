"""Device constants and modelling conventions.

All frequencies held by :class:`SystemParams` are angular (rad/s).
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace

from .errors import InputError

TWO_PI = 2.0 * math.pi


class EtaConvention(str, enum.Enum):
    """Prefactor of the transmon ``b†b†bb`` anharmonic term."""

    AS_PRINTED = "as_printed"  # -eta b†b†bb
    HALVED = "halved"  # -(eta/2) b†b†bb, so that w12 - w01 = -eta

    @property
    def factor(self) -> float:
        return 1.0 if self is EtaConvention.AS_PRINTED else 0.5


class KappaConvention(str, enum.Enum):
    """How a cavity linewidth quoted in MHz maps onto the damping rate."""

    ANGULAR = "angular"  # kappa = 2*pi * value
    ORDINARY = "ordinary"  # kappa = value (1/s)


class Labeling(str, enum.Enum):
    """Rule assigning bare labels to eigenvectors inside one excitation block."""

    ADIABATIC = "adiabatic"  # energy rank inherited from the g -> 0 limit
    OVERLAP = "overlap"  # greedy descending |<bare|dressed>|^2


@dataclass(frozen=True)
class SystemParams:
    omega_r: float
    omega_q: float
    eta: float
    g: float
    kappa: float
    transmon_levels: int = 30
    n_max: int = 700
    eta_convention: EtaConvention = EtaConvention.HALVED
    kappa_convention: KappaConvention = KappaConvention.ANGULAR
    labeling: Labeling = Labeling.ADIABATIC

    def __post_init__(self):
        for name in ("omega_r", "omega_q", "kappa"):
            if not getattr(self, name) > 0:
                raise InputError(f"{name} must be positive, got {getattr(self, name)!r}")
        for name in ("eta", "g"):
            if not getattr(self, name) >= 0:
                raise InputError(f"{name} must be non-negative, got {getattr(self, name)!r}")
        if self.transmon_levels < 2:
            raise InputError(f"transmon_levels must be >= 2, got {self.transmon_levels}")
        if self.n_max < 1:
            raise InputError(f"n_max must be >= 1, got {self.n_max}")
        object.__setattr__(self, "eta_convention", EtaConvention(self.eta_convention))
        object.__setattr__(self, "kappa_convention", KappaConvention(self.kappa_convention))
        object.__setattr__(self, "labeling", Labeling(self.labeling))

    @property
    def delta(self) -> float:
        """Qubit-cavity detuning omega_q - omega_r."""
        return self.omega_q - self.omega_r

    @property
    def anharmonic_factor(self) -> float:
        return self.eta_convention.factor

    def bare_energy(self, i, n):
        """Uncoupled energy of |i, n> (rad/s)."""
        return n * self.omega_r + i * self.omega_q - self.anharmonic_factor * self.eta * i * (i - 1)

    def with_(self, **changes) -> "SystemParams":
        return replace(self, **changes)


def kappa_from_mhz(value_mhz: float, convention: KappaConvention) -> float:
    if KappaConvention(convention) is KappaConvention.ANGULAR:
        return TWO_PI * value_mhz * 1e6
    return value_mhz * 1e6


def reference_params(**overrides) -> SystemParams:
    """Device constants of the measured sample (frequencies given as value/2pi)."""
    conv = KappaConvention(overrides.pop("kappa_convention", KappaConvention.ANGULAR))
    base = dict(
        omega_r=TWO_PI * 5.078e9,
        omega_q=TWO_PI * 5.795e9,
        eta=TWO_PI * 111e6,
        g=TWO_PI * 55e6,
        kappa=kappa_from_mhz(1.3, conv),
        kappa_convention=conv,
    )
    base.update(overrides)
    return SystemParams(**base)
