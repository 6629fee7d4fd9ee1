"""Shared fixed-step time-ordered propagation.

Two methods are provided.  ``exp-midpoint`` exponentiates the Hamiltonian
sampled at each step midpoint, which is exactly unitary per step and exact
for piecewise-constant generators; it is the default for closed-system
propagation.  ``rk4`` integrates dU/dt = -i H(t) U with the classic
fourth-order rule and is kept for non-unitary generators.

Step sizes are validated against the fastest frequency present: each step
must satisfy (||H(t_mid)|| + carrier_rate) * dt <= max_phase_per_step, where
``carrier_rate`` lets callers account for an oscillating frame term (such as
an interaction strength V driving exp(-iVt) factors) that the instantaneous
norm does not reveal.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import linalg

METHODS = ("exp-midpoint", "rk4")


@dataclass(frozen=True)
class IntegratorConfig:
    method: str = "exp-midpoint"
    steps: int = 1000
    max_phase_per_step: float = 0.05

    def __post_init__(self) -> None:
        if self.method not in METHODS:
            raise ValueError(f"unknown integrator method {self.method!r}")
        if self.steps < 100:
            raise ValueError("integrator needs at least 100 steps")
        if not 0.0 < self.max_phase_per_step <= 0.5:
            raise ValueError("max_phase_per_step must lie in (0, 0.5]")


class StepValidationError(ValueError):
    """Raised when the configured step count cannot resolve the dynamics."""

    def __init__(self, message: str, required_steps: int):
        super().__init__(message)
        self.required_steps = required_steps


def required_steps(
    max_norm: float,
    span: float,
    max_phase_per_step: float = 0.05,
    carrier_rate: float = 0.0,
) -> int:
    """Smallest step count with (max_norm + carrier_rate) * dt <= max phase."""
    return max(1, math.ceil((max_norm + carrier_rate) * span / max_phase_per_step))


def _spectral_norm(h: np.ndarray) -> float:
    return float(np.abs(np.linalg.eigvalsh(h)).max()) if h.shape[0] > 1 else float(abs(h[0, 0]))


def _check_step(h: np.ndarray, dt: float, span: float, config: IntegratorConfig, carrier_rate: float) -> None:
    if np.linalg.norm(h - h.conj().T, ord="fro") > 1e-10 * max(1.0, np.linalg.norm(h, ord="fro")):
        raise ValueError("Hamiltonian sample is not Hermitian")
    norm = _spectral_norm(h)
    if (norm + carrier_rate) * dt > config.max_phase_per_step * (1.0 + 1e-9):
        need = required_steps(norm, span, config.max_phase_per_step, carrier_rate)
        raise StepValidationError(
            f"step too large: ({norm:.6g} + {carrier_rate:.6g}) rad/us * {dt:.6g} us exceeds "
            f"{config.max_phase_per_step} rad per step; need at least {need} steps over this span",
            required_steps=need,
        )


def propagate(
    hamiltonian: Callable[[float], np.ndarray],
    t0: float,
    t1: float,
    config: IntegratorConfig,
    carrier_rate: float = 0.0,
    breakpoints: tuple[float, ...] = (),
) -> np.ndarray:
    """Time-ordered propagator for i dU/dt = H(t) U over [t0, t1].

    Deterministic fixed-step evolution: identical inputs give bit-identical
    results.  ``breakpoints`` lists interior times where H jumps (segment
    boundaries); the configured steps are spread over the smooth windows so
    no step straddles a discontinuity, which makes piecewise-constant
    Hamiltonians exact up to roundoff.  Raises ``StepValidationError``
    (reporting the required step count) if any step violates the
    phase-per-step bound.
    """
    if not t1 > t0:
        raise ValueError("propagation needs t1 > t0")
    span = t1 - t0
    edges = [t0] + sorted(t for t in breakpoints if t0 < t < t1) + [t1]
    dim = np.asarray(hamiltonian(t0)).shape[0]
    u = linalg.identity(dim)
    for a, b in zip(edges[:-1], edges[1:]):
        n = max(1, round(config.steps * (b - a) / span))
        u = _propagate_window(hamiltonian, a, b, n, span, config, carrier_rate) @ u
    return u


def _propagate_window(
    hamiltonian: Callable[[float], np.ndarray],
    t0: float,
    t1: float,
    n: int,
    span: float,
    config: IntegratorConfig,
    carrier_rate: float,
) -> np.ndarray:
    dt = (t1 - t0) / n
    dim = np.asarray(hamiltonian(t0)).shape[0]
    u = linalg.identity(dim)
    if config.method == "exp-midpoint":
        for k in range(n):
            tm = t0 + (k + 0.5) * dt
            h = np.asarray(hamiltonian(tm), dtype=complex)
            _check_step(h, dt, span, config, carrier_rate)
            u = linalg.expm(h, -1j * dt) @ u
        return u
    # rk4 on the propagator itself; H is right-continuous, so sample the
    # right edge one ulp inside the window
    for k in range(n):
        ta = t0 + k * dt
        tb = t1 if k == n - 1 else ta + dt
        h_a = np.asarray(hamiltonian(ta), dtype=complex)
        h_m = np.asarray(hamiltonian(ta + 0.5 * dt), dtype=complex)
        h_b = np.asarray(hamiltonian(float(np.nextafter(tb, t0))), dtype=complex)
        _check_step(h_m, dt, span, config, carrier_rate)
        k1 = -1j * (h_a @ u)
        k2 = -1j * (h_m @ (u + 0.5 * dt * k1))
        k3 = -1j * (h_m @ (u + 0.5 * dt * k2))
        k4 = -1j * (h_b @ (u + dt * k3))
        u = u + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return u
