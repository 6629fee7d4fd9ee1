"""Lindblad evolution for remnant Rydberg-state decay.

The qubit's upper level is long lived but not stable; its decay rate
1/tau_c bounds the usable gate time.  This module evolves density matrices
under the pulse Hamiltonians with a per-atom decay channel and quantifies the
resulting gate infidelity at the operating point (pulse area pi, so
tau = pi/peak, against lifetimes of order 100 us).

Channel conventions: 'ground' recycles the decayed population into |g>
(trace preserving, jump operator |g><r| per atom); 'leakage' drops it from
the simulated space entirely (trace nonincreasing, anticommutator term only),
which bounds the worst case where decay lands outside the qubit.

Two-qubit systems are evolved in the lab frame, where the decay channel is
exact, and the final state is rotated by exp(-i V tau |rr><rr|) before being
compared to the rotating-frame ideal gate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import linalg
from .onequbit import OneQubitGateSpec, build_one_qubit_schedule, schedule_hamiltonian, target_gate
from .pulses import PulseSchedule
from .results import SweepResult
from .twoqubit import RR, TwoQubitGateSpec, full_hamiltonian, gate_matrix

__all__ = [
    "DecayModel",
    "DecayRecord",
    "lindblad_evolve",
    "gate_fidelity_under_decay",
    "decay_scan",
]

TARGETS = ("ground", "leakage")

MAX_PHASE_PER_STEP = 0.05


@dataclass(frozen=True)
class DecayModel:
    """Upper-level decay at rate gamma_r = 1/tau_c (per us), per atom."""

    gamma_r: float
    target: str = "ground"
    dims: int = 2

    def __post_init__(self) -> None:
        if self.gamma_r < 0.0:
            raise ValueError("decay rate must be nonnegative")
        if self.target not in TARGETS:
            raise ValueError(f"unknown decay target {self.target!r}")
        if self.dims not in (2, 4):
            raise ValueError("dims must be 2 (one atom) or 4 (two atoms)")


@dataclass
class DecayRecord:
    times: np.ndarray
    trace: np.ndarray
    purity: np.ndarray


def _jump_operators(model: DecayModel) -> list[np.ndarray]:
    g_r = np.zeros((2, 2), dtype=complex)
    g_r[0, 1] = 1.0  # |g><r|
    if model.dims == 2:
        return [g_r]
    eye = linalg.identity(2)
    return [linalg.kron(g_r, eye), linalg.kron(eye, g_r)]


def _system_hamiltonian(system, model: DecayModel, duration: float | None):
    """Hamiltonian callable, duration, dimension, and smooth-window edges.

    Integration windows are split at the schedule's phase jumps so no RK4
    step straddles a discontinuity.
    """
    if system is None:
        if duration is None:
            raise ValueError("free decay needs an explicit duration")
        dim = model.dims
        zero = np.zeros((dim, dim), dtype=complex)
        return (lambda t: zero), duration, dim, (duration,)
    if isinstance(system, PulseSchedule):
        if model.dims != 2:
            raise ValueError("a pulse schedule drives a single atom (dims=2)")
        return schedule_hamiltonian(system), system.total_duration, 2, system.boundaries
    if isinstance(system, TwoQubitGateSpec):
        if model.dims != 4:
            raise ValueError("a two-qubit spec needs dims=4")
        return (lambda t: full_hamiltonian(system, t)), system.duration, 4, (system.duration,)
    raise TypeError(f"unsupported system type {type(system).__name__}")


def lindblad_evolve(
    system,
    model: DecayModel,
    steps: int = 4000,
    rho0: np.ndarray | None = None,
    duration: float | None = None,
) -> tuple[np.ndarray, DecayRecord]:
    """Fixed-step RK4 master-equation evolution over the pulse.

    ``system`` is a one-qubit PulseSchedule, a TwoQubitGateSpec (lab frame),
    or None for free decay over ``duration``.  With gamma_r = 0 the result
    reproduces the unitary propagation to the integrator tolerance (better
    than 1e-8 at the default step counts for the one-qubit operating point).
    The step count must resolve both the drive and the decay rate.
    """
    h_fn, tau, dim, edges = _system_hamiltonian(system, model, duration)
    if rho0 is None:
        rho0 = np.zeros((dim, dim), dtype=complex)
        rho0[0, 0] = 1.0
    rho = np.asarray(rho0, dtype=complex).copy()
    if rho.shape != (dim, dim):
        raise ValueError(f"rho0 has shape {rho.shape}, expected {(dim, dim)}")

    scale_probe = max(np.abs(np.linalg.eigvalsh(h_fn(0.5 * tau))).max(), np.abs(np.linalg.eigvalsh(h_fn(0.25 * tau))).max())
    if (float(scale_probe) + model.gamma_r) * (tau / steps) > MAX_PHASE_PER_STEP:
        need = math.ceil((float(scale_probe) + model.gamma_r) * tau / MAX_PHASE_PER_STEP)
        raise ValueError(f"steps={steps} do not resolve the dynamics; need >= {need}")

    jumps = [math.sqrt(model.gamma_r) * l for l in _jump_operators(model)] if model.gamma_r > 0 else []
    jdag_j = [l.conj().T @ l for l in jumps]
    recycle = model.target == "ground"

    def rhs(t: float, r: np.ndarray) -> np.ndarray:
        h = h_fn(t)
        out = -1j * (h @ r - r @ h)
        for l, ll in zip(jumps, jdag_j):
            if recycle:
                out += l @ r @ l.conj().T - 0.5 * (ll @ r + r @ ll)
            else:
                out += -0.5 * (ll @ r + r @ ll)
        return out

    # split steps over smooth windows so none straddles a phase jump
    windows: list[tuple[float, float, int]] = []
    start = 0.0
    for end in edges:
        n = max(1, round(steps * (end - start) / tau))
        windows.append((start, end, n))
        start = end
    n_total = sum(n for _, _, n in windows)

    times = np.empty(n_total + 1)
    trace = np.empty(n_total + 1)
    purity = np.empty(n_total + 1)

    def record(i: int, t: float) -> None:
        times[i] = t
        trace[i] = rho.trace().real
        purity[i] = float(np.linalg.norm(rho, ord="fro") ** 2)

    record(0, 0.0)
    idx = 0
    for w_start, w_end, n in windows:
        dt = (w_end - w_start) / n
        for k in range(n):
            t = w_start + k * dt
            t_end = w_end if k == n - 1 else t + dt
            # sample the right edge one ulp inside the window: H is
            # right-continuous, so the exact edge belongs to the next segment
            t_right = float(np.nextafter(t_end, w_start))
            k1 = rhs(t, rho)
            k2 = rhs(t + 0.5 * dt, rho + 0.5 * dt * k1)
            k3 = rhs(t + 0.5 * dt, rho + 0.5 * dt * k2)
            k4 = rhs(t_right, rho + dt * k3)
            rho = rho + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            idx += 1
            record(idx, t_end)
    return rho, DecayRecord(times=times, trace=trace, purity=purity)


_AXIS_STATES_1Q = [
    np.array([1.0, 0.0], dtype=complex),
    np.array([0.0, 1.0], dtype=complex),
    np.array([1.0, 1.0], dtype=complex) / math.sqrt(2.0),
    np.array([1.0, -1.0], dtype=complex) / math.sqrt(2.0),
    np.array([1.0, 1.0j], dtype=complex) / math.sqrt(2.0),
    np.array([1.0, -1.0j], dtype=complex) / math.sqrt(2.0),
]

_PRODUCT_FACTORS_2Q = [
    np.array([1.0, 0.0], dtype=complex),
    np.array([0.0, 1.0], dtype=complex),
    np.array([1.0, 1.0], dtype=complex) / math.sqrt(2.0),
    np.array([1.0, 1.0j], dtype=complex) / math.sqrt(2.0),
]


def _ensemble(dim: int) -> list[np.ndarray]:
    if dim == 2:
        return list(_AXIS_STATES_1Q)
    return [np.kron(a, b) for a in _PRODUCT_FACTORS_2Q for b in _PRODUCT_FACTORS_2Q]


def gate_fidelity_under_decay(
    spec,
    model: DecayModel,
    steps: int = 4000,
    envelope_kind: str = "square",
    peak: float = 5.0 * math.pi,
    truncation: float = 4.0,
) -> float:
    """Average state fidelity of the decaying gate over a fixed ensemble.

    One-qubit specs average over the six axis states; two-qubit specs over
    the sixteen products of {|g>, |r>, |+>, |+i>} per atom.  The ideal output
    is the closed-system gate applied to each input.
    """
    if isinstance(spec, OneQubitGateSpec):
        if model.dims != 2:
            raise ValueError("one-qubit spec needs dims=2")
        schedule = build_one_qubit_schedule(spec, envelope_kind, peak, truncation)
        ideal = target_gate(spec)
        rotate_out = None
        system = schedule
    elif isinstance(spec, TwoQubitGateSpec):
        if model.dims != 4:
            raise ValueError("two-qubit spec needs dims=4")
        ideal = gate_matrix(spec.phi)
        frame = np.eye(4, dtype=complex)
        frame[RR, RR] = np.exp(1j * spec.interaction * spec.duration)
        rotate_out = frame  # lab -> rotating at the final time
        system = spec
    else:
        raise TypeError(f"unsupported spec type {type(spec).__name__}")

    total = 0.0
    ensemble = _ensemble(model.dims)
    for psi in ensemble:
        rho0 = np.outer(psi, psi.conj())
        rho, _ = lindblad_evolve(system, model, steps=steps, rho0=rho0)
        if rotate_out is not None:
            rho = rotate_out @ rho @ rotate_out.conj().T
        target = ideal @ psi
        total += float(np.vdot(target, rho @ target).real)
    return total / len(ensemble)


def decay_scan(
    spec,
    lifetimes,
    model_target: str = "ground",
    steps: int = 4000,
    envelope_kind: str = "square",
    peak: float = 5.0 * math.pi,
) -> SweepResult:
    """Gate infidelity versus upper-level lifetime tau_c."""
    lifetimes = [float(x) for x in lifetimes]
    if not lifetimes or any(x <= 0 for x in lifetimes):
        raise ValueError("lifetimes must be a nonempty list of positive times")
    dims = 4 if isinstance(spec, TwoQubitGateSpec) else 2
    if isinstance(spec, TwoQubitGateSpec):
        tau = spec.duration
    else:
        tau = build_one_qubit_schedule(spec, envelope_kind, peak).total_duration
    rates, one_minus_f, trace_err = [], [], []
    for tc in lifetimes:
        model = DecayModel(gamma_r=1.0 / tc, target=model_target, dims=dims)
        f = gate_fidelity_under_decay(spec, model, steps=steps, envelope_kind=envelope_kind, peak=peak)
        rates.append(1.0 / tc)
        one_minus_f.append(1.0 - f)
        if model_target == "ground":
            rho, rec = lindblad_evolve(
                spec if dims == 4 else build_one_qubit_schedule(spec, envelope_kind, peak),
                model,
                steps=steps,
            )
            trace_err.append(abs(float(rec.trace[-1]) - 1.0))
        else:
            trace_err.append(float("nan"))
    return SweepResult(
        axis_name="gamma_r",
        axis_values=rates,
        metrics={"tau": [tau] * len(rates), "one_minus_F": one_minus_f, "trace_error": trace_err},
        metadata={
            "lifetimes": lifetimes,
            "target": model_target,
            "steps": steps,
            "envelope": envelope_kind,
            "peak": peak,
        },
    )
