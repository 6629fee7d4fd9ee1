"""One-qubit geometric gate synthesis and verification.

The target rotation exp(i gamma n.sigma) with axis
n = (sin theta cos varphi, sin theta sin varphi, cos theta) is produced by a
three-segment resonant pulse whose laser phase is piecewise constant.  The
axis eigenstate |d> is driven around a closed two-meridian loop on the Bloch
sphere (up to the north pole, down the far meridian to the south pole, and
back), picks up no dynamical phase along the way, and returns with the purely
geometric phase gamma, equal to half the enclosed solid angle.

This module provides the analytic segment propagators and their composition,
the axis eigenbasis, a numeric propagator that records the Bloch trajectory
of |d(t)>, and the phase/solid-angle diagnostics used to verify the geometry.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import linalg
from .pulses import PulseSchedule, build_one_qubit_schedule, one_qubit_segment_phases
from .results import atomic_write_text, format_float

__all__ = [
    "OneQubitGateSpec",
    "EigenPair",
    "BlochPath",
    "target_gate",
    "segment_propagators",
    "composed_gate",
    "eigenbasis",
    "schedule_hamiltonian",
    "evolve_numeric",
    "dynamical_phase",
    "total_phase",
    "solid_angle",
    "schedule_gate_spec",
    "wrap_angle",
]


def wrap_angle(x: float) -> float:
    """Reduce an angle to (-pi, pi]."""
    y = math.fmod(x + math.pi, 2.0 * math.pi)
    if y <= 0.0:
        y += 2.0 * math.pi
    return y - math.pi


@dataclass(frozen=True)
class OneQubitGateSpec:
    """Rotation parameters: polar/azimuthal axis angles and rotation angle."""

    theta: float
    varphi: float
    gamma: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.theta <= math.pi:
            raise ValueError(f"theta must lie in [0, pi], got {self.theta}")

    @property
    def axis(self) -> np.ndarray:
        st, ct = math.sin(self.theta), math.cos(self.theta)
        return np.array([st * math.cos(self.varphi), st * math.sin(self.varphi), ct])


@dataclass(frozen=True)
class EigenPair:
    """Axis eigenstates: d (eigenvalue +1) and b (eigenvalue -1)."""

    d: np.ndarray
    b: np.ndarray


def target_gate(spec: OneQubitGateSpec) -> np.ndarray:
    """cos(gamma) I + i sin(gamma) (n.sigma), the ideal rotation."""
    n = spec.axis
    nsigma = n[0] * linalg.SIGMA_X + n[1] * linalg.SIGMA_Y + n[2] * linalg.SIGMA_Z
    return math.cos(spec.gamma) * linalg.identity(2) + 1j * math.sin(spec.gamma) * nsigma


def _ladder(phase: float) -> np.ndarray:
    # exp(-i chi)|g><r| + h.c. for chi = phase
    e = complex(math.cos(phase), -math.sin(phase))
    return np.array([[0.0, e], [np.conj(e), 0.0]], dtype=complex)


def _segment_unitary(area: float, phase: float) -> np.ndarray:
    # exp(-i * area * ladder(phase)) in closed form
    m = _ladder(phase)
    return math.cos(area) * linalg.identity(2) - 1j * math.sin(area) * m


def segment_propagators(spec: OneQubitGateSpec) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """The three analytic pulse-segment unitaries, in time order."""
    ph1, ph2, _ = one_qubit_segment_phases(spec.varphi, spec.gamma)
    u1 = _segment_unitary(0.5 * spec.theta, ph1)
    u2 = _segment_unitary(0.5 * math.pi, ph2)
    u3 = _segment_unitary(0.5 * (math.pi - spec.theta), ph1)
    return u1, u2, u3


def composed_gate(spec: OneQubitGateSpec) -> np.ndarray:
    """Product (third)(second)(first); equals target_gate to 1e-12."""
    u1, u2, u3 = segment_propagators(spec)
    return u3 @ u2 @ u1


def eigenbasis(spec: OneQubitGateSpec) -> EigenPair:
    c, s = math.cos(0.5 * spec.theta), math.sin(0.5 * spec.theta)
    ep = complex(math.cos(spec.varphi), math.sin(spec.varphi))
    d = np.array([c, s * ep], dtype=complex)
    b = np.array([s * np.conj(ep), -c], dtype=complex)
    return EigenPair(d=d, b=b)


@dataclass
class BlochPath:
    """Sampled trajectory of a tracked state.

    ``vectors`` holds unit Bloch vectors (x, y, z) = (<sx>, <sy>, <sz>) with
    |g> at the north pole.  ``total_phase`` is the unwrapped angle of the
    overlap with the initial state; ``dyn_integrand`` is <psi|H(t)|psi> in
    rad/us, whose time integral (negated) is the dynamical phase.
    """

    times: np.ndarray
    vectors: np.ndarray
    total_phase: np.ndarray
    dyn_integrand: np.ndarray

    def closure_error(self) -> float:
        return float(np.linalg.norm(self.vectors[-1] - self.vectors[0]))

    def is_closed(self, tol: float = 1e-6) -> bool:
        return self.closure_error() <= tol

    def to_csv(self, path) -> None:
        lines = ["# geomgate-csv v1", "t,rx,ry,rz,total_phase,dyn_integrand"]
        for k in range(len(self.times)):
            row = [self.times[k], *self.vectors[k], self.total_phase[k], self.dyn_integrand[k]]
            lines.append(",".join(format_float(v) for v in row))
        atomic_write_text(path, "\n".join(lines) + "\n")


def bloch_vector(state: np.ndarray) -> np.ndarray:
    g, r = state[0], state[1]
    return np.array([2.0 * (g.conjugate() * r).real, 2.0 * (g.conjugate() * r).imag, abs(g) ** 2 - abs(r) ** 2])


def schedule_hamiltonian(schedule: PulseSchedule):
    """H(t) = omega(t)|g><r| + h.c. as a callable of global time."""

    def h(t: float) -> np.ndarray:
        w = schedule.sample_rabi(t)
        return np.array([[0.0, w], [np.conj(w), 0.0]], dtype=complex)

    return h


def schedule_gate_spec(schedule: PulseSchedule) -> OneQubitGateSpec:
    """Invert a generated three-segment schedule back to its rotation spec."""
    if len(schedule.segments) != 3:
        raise ValueError("spec recovery needs the full three-segment schedule")
    areas = schedule.segment_areas()
    theta = 2.0 * areas[0]
    varphi = schedule.segments[0].phase + 0.5 * math.pi
    gamma = schedule.segments[1].phase - varphi - 0.5 * math.pi
    return OneQubitGateSpec(theta=min(max(theta, 0.0), math.pi), varphi=varphi, gamma=gamma)


def _allocate_steps(schedule: PulseSchedule, steps: int) -> list[int]:
    durations = [seg.envelope.duration for seg in schedule.segments]
    total = sum(durations)
    counts = [max(1, round(steps * d / total)) for d in durations]
    # nudge the largest segment so the counts add up exactly
    counts[int(np.argmax(durations))] += steps - sum(counts)
    return [max(1, c) for c in counts]


def evolve_numeric(
    schedule: PulseSchedule,
    steps: int = 10_000,
    state: np.ndarray | None = None,
) -> tuple[np.ndarray, BlochPath]:
    """Numeric propagator plus the Bloch trajectory of a tracked state.

    Steps are spread over the segments proportionally to duration, with
    midpoint sampling of the envelope inside each segment (exactly unitary
    per step, and exact for square envelopes).  The tracked state defaults
    to the axis eigenstate |d> recovered from the schedule; for degenerate
    schedules with fewer than three segments it falls back to |g> unless
    given explicitly.
    """
    if steps < 100:
        raise ValueError("evolve_numeric needs at least 100 steps")
    if state is None:
        try:
            state = eigenbasis(schedule_gate_spec(schedule)).d
        except ValueError:
            state = np.array([1.0, 0.0], dtype=complex)
    state0 = np.asarray(state, dtype=complex)
    state0 = state0 / np.linalg.norm(state0)

    counts = _allocate_steps(schedule, steps)
    n_total = sum(counts)
    times = np.empty(n_total + 1)
    vectors = np.empty((n_total + 1, 3))
    raw_phase = np.empty(n_total + 1)
    integrand = np.empty(n_total + 1)

    u = linalg.identity(2)
    psi = state0.copy()
    h = schedule_hamiltonian(schedule)

    def record(idx: int, t: float) -> None:
        times[idx] = t
        vectors[idx] = bloch_vector(psi)
        ov = np.vdot(state0, psi)
        raw_phase[idx] = math.atan2(ov.imag, ov.real)
        integrand[idx] = float(np.vdot(psi, h(t) @ psi).real)

    record(0, 0.0)
    idx = 0
    start = 0.0
    for seg, n_seg in zip(schedule.segments, counts):
        dur = seg.envelope.duration
        dt = dur / n_seg
        m = _ladder(seg.phase)
        for j in range(n_seg):
            amp = seg.envelope.value((j + 0.5) * dt)
            a = amp * dt  # phase area of this substep
            step = math.cos(a) * linalg.identity(2) - 1j * math.sin(a) * m
            u = step @ u
            psi = step @ psi
            idx += 1
            t = start + (j + 1) * dt if j + 1 < n_seg else start + dur
            record(idx, t)
        start += dur

    path = BlochPath(
        times=times,
        vectors=vectors,
        total_phase=np.unwrap(raw_phase),
        dyn_integrand=integrand,
    )
    return u, path


def dynamical_phase(path: BlochPath) -> float:
    """-integral of <psi|H|psi> dt by the trapezoidal rule over the samples."""
    if len(path.times) == 0:
        raise ValueError("empty path")
    if len(path.times) == 1:
        return 0.0
    return -float(np.trapezoid(path.dyn_integrand, path.times))


def total_phase(path: BlochPath) -> float:
    """Cyclic-evolution phase arg<psi(0)|psi(tau)>, reduced to (-pi, pi]."""
    return wrap_angle(float(path.total_phase[-1]))


def solid_angle(path: BlochPath) -> float:
    """Signed solid angle enclosed by a closed Bloch path, in (-4pi, 4pi).

    Computed as the summed spherical excess of geodesic triangles fanned from
    the path start.  Orientation: positive for loops running clockwise as
    seen from outside the sphere (right-handed about the inward normal).
    This is the sense traced by the generated schedules and makes the
    enclosed area equal twice the acquired cyclic phase, so
    solid_angle / 2 == gamma (mod 2pi).
    """
    if not path.is_closed():
        raise ValueError(f"path is not closed (gap {path.closure_error():.3g})")
    # Mirror one coordinate: the fan formula below counts counterclockwise
    # loops positive, while the schedule loops run clockwise.
    pts = path.vectors * np.array([1.0, -1.0, 1.0])
    a = pts[0]
    total = 0.0
    for k in range(1, len(pts) - 1):
        b, c = pts[k], pts[k + 1]
        num = float(np.dot(a, np.cross(b, c)))
        den = 1.0 + float(np.dot(a, b)) + float(np.dot(b, c)) + float(np.dot(c, a))
        total += 2.0 * math.atan2(num, den)
    return total
