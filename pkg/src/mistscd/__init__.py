"""Ladder-crossing and semiclassical-dynamics models of measurement-induced
bistability in a driven transmon-cavity system."""

from .effres import EffResCurve, effective_resonance
from .errors import (
    ComputationError,
    DegenerateRootError,
    InputError,
    MistScdError,
    RangeError,
    StiffnessError,
)
from .fixed_points import FixedPoint, RegionLabel, Stability, classify, find_roots, region
from .mist import CrossingResult, FanCurve, error_bound, fan_curve, find_crossings
from .params import EtaConvention, KappaConvention, Labeling, SystemParams, reference_params
from .response import (
    CriticalPointReport,
    ResponseMap,
    amp_to_photon,
    critical_point_divergence,
    critical_point_scd,
    fig5_summary,
    phase_gradient_peaks,
    run_map,
)
from .scd import DriveConfig, Trajectory, integrate, readout
from .spectrum import DressedSpectrum, build_block, diagonalize_strip, eigenenergy

__version__ = "0.1.0"
