"""Relativistic bookkeeping for atom-fountain and neutron interferometers.

Kinematics of the two arms, proper time along them, the detected fringe
phase by several independent routes, the laser-lattice field forms, and a
scenario runner tying them together.
"""
from .kinematics import (
    C_SI,
    HBAR_SI,
    Device,
    DeviceFrame,
    ExperimentParams,
    Frame,
    build_paths,
    closure_heights,
    evaluate,
)
from .phase import ChirpError, ChirpSetting, PhaseBreakdown, detected_phase
from .propertime import ProperTimeResult, proper_time_closed_form, proper_time_oracle
from .quadrature import BACKEND, QuadratureError, QuadratureSpec

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "C_SI",
    "HBAR_SI",
    "ChirpError",
    "ChirpSetting",
    "Device",
    "DeviceFrame",
    "ExperimentParams",
    "Frame",
    "PhaseBreakdown",
    "ProperTimeResult",
    "QuadratureError",
    "QuadratureSpec",
    "build_paths",
    "closure_heights",
    "detected_phase",
    "evaluate",
    "proper_time_closed_form",
    "proper_time_oracle",
]
