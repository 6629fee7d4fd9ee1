"""Pulse-level synthesis and verification of geometric gates on two-level
Rydberg atoms: one-qubit rotations from three-segment phase-jump schedules,
a blockade-mediated two-qubit gate, and the numeric checks (zero dynamical
phase, half-solid-angle, holonomy conditions, blockade-error scaling) that
certify the gates as geometric.

Units throughout: time in us, angular frequencies and rates in rad/us,
angles in rad.
"""

from .analysis import ControlErrorModel, gate_distance, robustness_scan, summarize
from .linalg import expm, kron, matmul
from .onequbit import (
    BlochPath,
    EigenPair,
    OneQubitGateSpec,
    composed_gate,
    dynamical_phase,
    eigenbasis,
    evolve_numeric,
    segment_propagators,
    solid_angle,
    target_gate,
)
from .openquantum import DecayModel, decay_scan, gate_fidelity_under_decay, lindblad_evolve
from .pulses import Envelope, PulseSchedule, PulseSegment, build_one_qubit_schedule
from .results import SweepResult
from .twoqubit import (
    BrightDarkBasis,
    TwoQubitGateSpec,
    analytic_evolution,
    blockade_scan,
    bright_dark_basis,
    effective_hamiltonian,
    entangling_witness,
    evolve_numeric_full,
    full_hamiltonian,
    gate_matrix,
    holonomy_checks,
    pi_area_envelope,
    rotating_frame_hamiltonian,
)

__version__ = "0.1.0"

__all__ = [
    "BlochPath",
    "BrightDarkBasis",
    "ControlErrorModel",
    "DecayModel",
    "EigenPair",
    "Envelope",
    "OneQubitGateSpec",
    "PulseSchedule",
    "PulseSegment",
    "SweepResult",
    "TwoQubitGateSpec",
    "analytic_evolution",
    "blockade_scan",
    "bright_dark_basis",
    "build_one_qubit_schedule",
    "composed_gate",
    "decay_scan",
    "dynamical_phase",
    "effective_hamiltonian",
    "eigenbasis",
    "entangling_witness",
    "evolve_numeric",
    "evolve_numeric_full",
    "expm",
    "full_hamiltonian",
    "gate_distance",
    "gate_fidelity_under_decay",
    "gate_matrix",
    "holonomy_checks",
    "kron",
    "lindblad_evolve",
    "matmul",
    "pi_area_envelope",
    "robustness_scan",
    "rotating_frame_hamiltonian",
    "segment_propagators",
    "solid_angle",
    "summarize",
    "target_gate",
]
