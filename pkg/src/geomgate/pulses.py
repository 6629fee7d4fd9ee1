"""Pulse envelopes and piecewise-constant-phase schedules.

A schedule is an ordered list of segments.  Each segment carries a real
amplitude envelope ``peak * shape(t)`` (rad/us over us) and one constant laser
phase ``chi``; the complex drive inside the segment is
``omega(t) = envelope(t) * exp(-1j * chi)``.

The gate realized by a schedule depends on the envelope only through the
segment areas, so every envelope kind exposes its area in closed form and the
builder solves segment durations from the requested areas.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import TYPE_CHECKING, Iterable

if TYPE_CHECKING:  # pragma: no cover
    from .onequbit import OneQubitGateSpec

ENVELOPE_KINDS = ("square", "sin2", "gaussian")

# Cumulative pulse-area split of the three-segment construction: the first
# segment sweeps theta/2, the middle exchange always sweeps pi/2, the closing
# segment sweeps the complement (pi - theta)/2.  Total area is always pi.
TOTAL_SCHEDULE_AREA = math.pi


@dataclass(frozen=True)
class Envelope:
    """Real amplitude shape of one pulse segment.

    Parameters
    ----------
    kind : {'square', 'sin2', 'gaussian'}
        Shape family.  'gaussian' is truncated: the segment holds
        ``truncation`` standard deviations, centered, and is *not*
        renormalized; the closed-form area accounts for the cut tails
        through an erf factor.
    peak : float
        Peak amplitude in rad/us (> 0).
    duration : float
        Segment length in us (> 0).
    truncation : float
        Gaussian only: duration / sigma (default 4.0, ignored otherwise).
    """

    kind: str
    peak: float
    duration: float
    truncation: float = 4.0

    def __post_init__(self) -> None:
        if self.kind not in ENVELOPE_KINDS:
            raise ValueError(f"unknown envelope kind {self.kind!r}")
        if not self.peak > 0.0:
            raise ValueError("envelope peak must be positive")
        if not self.duration > 0.0:
            raise ValueError("envelope duration must be positive")
        if self.kind == "gaussian":
            if not self.truncation > 0.0:
                raise ValueError("gaussian truncation must be positive")
        else:
            # truncation is meaningless outside the gaussian family; pin it
            # so equality and serialization stay canonical
            object.__setattr__(self, "truncation", 4.0)

    @property
    def sigma(self) -> float:
        return self.duration / self.truncation

    def value(self, t: float) -> float:
        """Amplitude at time t within [0, duration]."""
        if self.kind == "square":
            return self.peak
        if self.kind == "sin2":
            return self.peak * math.sin(math.pi * t / self.duration) ** 2
        u = (t - 0.5 * self.duration) / self.sigma
        return self.peak * math.exp(-0.5 * u * u)

    def area(self) -> float:
        """Closed-form integral of the amplitude over the segment."""
        return self.partial_area(self.duration)

    def partial_area(self, t: float) -> float:
        """Closed-form integral of the amplitude over [0, t]."""
        if t < -1e-15 or t > self.duration * (1.0 + 1e-12):
            raise ValueError(f"time {t} outside segment [0, {self.duration}]")
        t = min(max(t, 0.0), self.duration)
        if self.kind == "square":
            return self.peak * t
        if self.kind == "sin2":
            # integral of sin^2(pi t / T) = t/2 - (T/4pi) sin(2pi t/T)
            return self.peak * (0.5 * t - self.duration / (4.0 * math.pi) * math.sin(2.0 * math.pi * t / self.duration))
        s = self.sigma
        half = 0.5 * self.duration
        c = s * math.sqrt(math.pi / 2.0)
        return self.peak * c * (math.erf((t - half) / (s * math.sqrt(2.0))) + math.erf(half / (s * math.sqrt(2.0))))


def duration_for_area(kind: str, peak: float, area: float, truncation: float = 4.0) -> float:
    """Segment duration whose envelope integrates to ``area`` at ``peak``."""
    if not peak > 0.0:
        raise ValueError("peak must be positive")
    if area < 0.0:
        raise ValueError("area must be nonnegative")
    if kind == "square":
        return area / peak
    if kind == "sin2":
        return 2.0 * area / peak
    if kind == "gaussian":
        # area = peak * sigma * sqrt(2pi) * erf(k / (2 sqrt 2)), sigma = T/k
        k = truncation
        eff = math.sqrt(2.0 * math.pi) / k * math.erf(k / (2.0 * math.sqrt(2.0)))
        return area / (peak * eff)
    raise ValueError(f"unknown envelope kind {kind!r}")


@dataclass(frozen=True)
class PulseSegment:
    """One envelope plus the constant laser phase chi (stored unreduced)."""

    envelope: Envelope
    phase: float

    def __post_init__(self) -> None:
        if not math.isfinite(self.phase):
            raise ValueError("segment phase must be finite")


@dataclass(frozen=True)
class PulseSchedule:
    """Ordered pulse segments; times are relative to the schedule start."""

    segments: tuple[PulseSegment, ...]

    def __post_init__(self) -> None:
        if not self.segments:
            raise ValueError("schedule needs at least one segment")
        object.__setattr__(self, "segments", tuple(self.segments))

    @property
    def boundaries(self) -> tuple[float, ...]:
        """Cumulative segment end times (last entry is the total duration)."""
        out, acc = [], 0.0
        for seg in self.segments:
            acc += seg.envelope.duration
            out.append(acc)
        return tuple(out)

    @property
    def total_duration(self) -> float:
        return self.boundaries[-1]

    def total_area(self) -> float:
        return sum(seg.envelope.area() for seg in self.segments)

    def segment_areas(self) -> tuple[float, ...]:
        return tuple(seg.envelope.area() for seg in self.segments)

    def locate(self, t: float) -> tuple[int, float]:
        """Segment index and local time for global time t.

        Right-continuous at interior boundaries; t == total duration maps to
        the end of the last segment.
        """
        if t < -1e-15 or t > self.total_duration * (1.0 + 1e-12) + 1e-300:
            raise ValueError(f"time {t} outside schedule [0, {self.total_duration}]")
        t = max(t, 0.0)
        start = 0.0
        for k, seg in enumerate(self.segments):
            end = start + seg.envelope.duration
            if t < end or k == len(self.segments) - 1:
                return k, min(t - start, seg.envelope.duration)
            start = end
        raise AssertionError("unreachable")

    def sample_rabi(self, t: float) -> complex:
        """Complex drive envelope(t) * exp(-1j * chi) at global time t."""
        k, tl = self.locate(t)
        seg = self.segments[k]
        return seg.envelope.value(tl) * complex(math.cos(seg.phase), -math.sin(seg.phase))

    def partial_area(self, t: float) -> float:
        """Accumulated amplitude area over [0, t]."""
        k, tl = self.locate(t)
        acc = sum(self.segments[j].envelope.area() for j in range(k))
        return acc + self.segments[k].envelope.partial_area(tl)

    def to_json_dict(self) -> dict:
        segs = []
        for seg in self.segments:
            d = {
                "kind": seg.envelope.kind,
                "peak": seg.envelope.peak,
                "duration": seg.envelope.duration,
                "phase": seg.phase,
            }
            if seg.envelope.kind == "gaussian":
                d["truncation"] = seg.envelope.truncation
            segs.append(d)
        return {"segments": segs}

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), sort_keys=True)

    @classmethod
    def from_json_dict(cls, data: dict) -> "PulseSchedule":
        if set(data) != {"segments"}:
            raise ValueError(f"unexpected schedule fields {sorted(set(data) - {'segments'})}")
        segs = []
        for raw in data["segments"]:
            allowed = {"kind", "peak", "duration", "phase", "truncation"}
            extra = set(raw) - allowed
            if extra:
                raise ValueError(f"unexpected segment fields {sorted(extra)}")
            env = Envelope(
                kind=raw["kind"],
                peak=float(raw["peak"]),
                duration=float(raw["duration"]),
                truncation=float(raw.get("truncation", 4.0)),
            )
            segs.append(PulseSegment(envelope=env, phase=float(raw["phase"])))
        return cls(segments=tuple(segs))

    @classmethod
    def from_json(cls, text: str) -> "PulseSchedule":
        return cls.from_json_dict(json.loads(text))


def one_qubit_segment_areas(theta: float) -> tuple[float, float, float]:
    """Segment areas (theta/2, pi/2, (pi - theta)/2) of the rotation loop."""
    if theta < 0.0 or theta > math.pi:
        raise ValueError(f"theta must lie in [0, pi], got {theta}")
    return 0.5 * theta, 0.5 * math.pi, 0.5 * (math.pi - theta)


def one_qubit_segment_phases(varphi: float, gamma: float) -> tuple[float, float, float]:
    """Laser phases chi of the three segments (first and third coincide)."""
    first = varphi - 0.5 * math.pi
    middle = gamma + varphi + 0.5 * math.pi
    return first, middle, first


def build_one_qubit_schedule(
    spec: "OneQubitGateSpec",
    envelope_kind: str = "square",
    peak: float = 5.0 * math.pi,
    truncation: float = 4.0,
) -> PulseSchedule:
    """Three-segment schedule realizing the rotation (theta, varphi, gamma).

    Segment durations are solved from the closed-form envelope area at the
    given peak.  A segment whose required area is exactly zero (theta == 0
    drops the first, theta == pi drops the third) is omitted so integrators
    never see zero-length steps; the composed gate is unaffected.
    """
    if not peak > 0.0:
        raise ValueError("peak must be positive")
    areas = one_qubit_segment_areas(spec.theta)
    phases = one_qubit_segment_phases(spec.varphi, spec.gamma)
    segments = []
    for area, phase in zip(areas, phases):
        if area == 0.0:
            continue
        env = Envelope(
            kind=envelope_kind,
            peak=peak,
            duration=duration_for_area(envelope_kind, peak, area, truncation),
            truncation=truncation,
        )
        segments.append(PulseSegment(envelope=env, phase=phase))
    return PulseSchedule(segments=tuple(segments))
