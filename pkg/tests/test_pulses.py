# Envelopes and schedules.  Closed-form areas are checked against an
# adaptive-quadrature oracle; schedule geometry against hand-computed
# durations and the cumulative-area split (theta/2, +pi/2, +(pi-theta)/2).

import json
import math

import numpy as np
import pytest
from scipy.integrate import quad

from geomgate.onequbit import OneQubitGateSpec
from geomgate.pulses import (
    Envelope,
    PulseSchedule,
    PulseSegment,
    build_one_qubit_schedule,
    duration_for_area,
)

PEAK = 5.0 * math.pi


def test_square_area_closed_form():
    env = Envelope("square", peak=math.pi, duration=1.0)
    assert env.area() == pytest.approx(math.pi, abs=0)


def test_sin2_area_is_half_peak_times_duration():
    env = Envelope("sin2", peak=math.pi, duration=1.0)
    assert env.area() == pytest.approx(math.pi / 2, abs=1e-15)


@pytest.mark.parametrize("kind,peak,duration", [
    ("sin2", 2.3, 0.7),
    ("gaussian", 1.0, 1.0),
    ("gaussian", 4.0, 0.31),
])
def test_partial_area_matches_quadrature(kind, peak, duration):
    env = Envelope(kind, peak=peak, duration=duration)
    for frac in (0.2, 0.5, 0.83, 1.0):
        t = frac * duration
        oracle, err = quad(env.value, 0.0, t, epsabs=1e-13, epsrel=1e-13)
        assert err < 1e-11
        assert env.partial_area(t) == pytest.approx(oracle, abs=1e-10)


def test_partial_area_monotone_and_bounds():
    env = Envelope("gaussian", peak=2.0, duration=1.0)
    samples = [env.partial_area(t) for t in np.linspace(0, 1, 50)]
    assert all(b >= a - 1e-15 for a, b in zip(samples, samples[1:]))
    with pytest.raises(ValueError):
        env.partial_area(1.5)


def test_duration_for_area_round_trips():
    for kind in ("square", "sin2", "gaussian"):
        dur = duration_for_area(kind, peak=3.0, area=1.1)
        env = Envelope(kind, peak=3.0, duration=dur)
        assert env.area() == pytest.approx(1.1, abs=1e-12)


def test_reference_schedule_areas_and_durations():
    # peak 5pi rad/us, theta=pi/2: areas (pi/4, pi/2, pi/4),
    # square durations (0.05, 0.1, 0.05) us, total 0.2 us
    spec = OneQubitGateSpec(math.pi / 2, 0.0, math.pi / 2)
    sched = build_one_qubit_schedule(spec, "square", PEAK)
    assert sched.segment_areas() == pytest.approx((math.pi / 4, math.pi / 2, math.pi / 4), abs=1e-15)
    durations = [s.envelope.duration for s in sched.segments]
    assert durations == pytest.approx([0.05, 0.1, 0.05], abs=1e-15)
    assert sched.total_duration == pytest.approx(0.2, abs=1e-15)


def test_schedule_phases_follow_the_construction():
    spec = OneQubitGateSpec(math.pi / 2, 0.3, 1.1)
    sched = build_one_qubit_schedule(spec, "square", PEAK)
    assert sched.segments[0].phase == pytest.approx(0.3 - math.pi / 2)
    assert sched.segments[1].phase == pytest.approx(1.1 + 0.3 + math.pi / 2)
    assert sched.segments[2].phase == pytest.approx(0.3 - math.pi / 2)
    # phases are stored unreduced
    spec_big = OneQubitGateSpec(math.pi / 2, 6.0, 3.0)
    sched_big = build_one_qubit_schedule(spec_big, "square", PEAK)
    assert sched_big.segments[1].phase == pytest.approx(3.0 + 6.0 + math.pi / 2)


def test_degenerate_theta_drops_segments():
    sched0 = build_one_qubit_schedule(OneQubitGateSpec(0.0, 0.2, 0.4), "square", math.pi)
    assert len(sched0.segments) == 2
    assert sched0.segment_areas() == pytest.approx((math.pi / 2, math.pi / 2), abs=1e-15)
    sched_pi = build_one_qubit_schedule(OneQubitGateSpec(math.pi, 0.2, 0.4), "square", math.pi)
    assert len(sched_pi.segments) == 2
    assert sched_pi.segment_areas() == pytest.approx((math.pi / 2, math.pi / 2), abs=1e-15)


def test_sin2_schedule_frozen_durations():
    # areas (pi/6, pi/2, pi/3) at peak 2pi with sin2: duration = 2*area/peak
    spec = OneQubitGateSpec(math.pi / 3, math.pi / 4, math.pi)
    sched = build_one_qubit_schedule(spec, "sin2", 2.0 * math.pi)
    assert sched.segment_areas() == pytest.approx((math.pi / 6, math.pi / 2, math.pi / 3), abs=1e-15)
    durations = [s.envelope.duration for s in sched.segments]
    assert durations == pytest.approx([1.0 / 6.0, 0.5, 1.0 / 3.0], abs=1e-15)


def test_cumulative_areas_at_boundaries():
    spec = OneQubitGateSpec(1.234, 0.5, -0.7)
    for kind in ("square", "sin2", "gaussian"):
        sched = build_one_qubit_schedule(spec, kind, PEAK)
        t1, t2, tau = sched.boundaries
        assert sched.partial_area(t1) == pytest.approx(spec.theta / 2, abs=1e-12)
        assert sched.partial_area(t2) == pytest.approx(spec.theta / 2 + math.pi / 2, abs=1e-12)
        assert sched.partial_area(tau) == pytest.approx(math.pi, abs=1e-12)


def test_segment_areas_independent_of_envelope_shape():
    spec = OneQubitGateSpec(0.9, 2.2, 0.4)
    areas = [build_one_qubit_schedule(spec, kind, PEAK).segment_areas() for kind in ("square", "sin2", "gaussian")]
    assert areas[0] == pytest.approx(areas[1], abs=1e-13)
    assert areas[0] == pytest.approx(areas[2], abs=1e-13)


def test_sample_rabi_reference_values():
    spec = OneQubitGateSpec(math.pi / 2, 0.0, math.pi / 2)
    sched = build_one_qubit_schedule(spec, "square", PEAK)
    # first segment: 5pi * exp(-i(0 - pi/2)) = 5pi * i
    assert sched.sample_rabi(0.0) == pytest.approx(PEAK * 1j, abs=1e-12)
    # inside the middle segment: 5pi * exp(-i*pi) = -5pi
    assert sched.sample_rabi(0.075) == pytest.approx(-PEAK, abs=1e-12)
    # t = tau evaluates the last segment at its end
    assert sched.sample_rabi(sched.total_duration) == pytest.approx(PEAK * 1j, abs=1e-12)
    with pytest.raises(ValueError):
        sched.sample_rabi(sched.total_duration + 0.01)
    with pytest.raises(ValueError):
        sched.sample_rabi(-0.01)


def test_sample_rabi_magnitude_equals_envelope():
    spec = OneQubitGateSpec(1.0, 0.8, -0.5)
    sched = build_one_qubit_schedule(spec, "sin2", PEAK)
    for t in np.linspace(0.0, sched.total_duration, 37):
        k, tl = sched.locate(float(t))
        assert abs(sched.sample_rabi(float(t))) == pytest.approx(sched.segments[k].envelope.value(tl), abs=1e-13)


def test_right_continuity_at_boundaries():
    spec = OneQubitGateSpec(math.pi / 2, 0.0, 1.0)
    sched = build_one_qubit_schedule(spec, "square", PEAK)
    t1 = sched.boundaries[0]
    # at t1 the sample belongs to the second segment
    assert np.angle(sched.sample_rabi(t1)) == pytest.approx(-np.angle(np.exp(1j * sched.segments[1].phase)))


def test_json_round_trip_and_strictness():
    spec = OneQubitGateSpec(0.7, 1.9, -2.1)
    for kind in ("square", "gaussian"):
        sched = build_one_qubit_schedule(spec, kind, PEAK, truncation=5.0)
        again = PulseSchedule.from_json(sched.to_json())
        assert again == sched
    with pytest.raises(ValueError, match="unexpected"):
        PulseSchedule.from_json_dict({"segments": [], "extra": 1})
    with pytest.raises(ValueError, match="unexpected"):
        PulseSchedule.from_json_dict({"segments": [{"kind": "square", "peak": 1, "duration": 1, "phase": 0, "x": 2}]})


def test_validation_errors():
    with pytest.raises(ValueError, match="peak"):
        build_one_qubit_schedule(OneQubitGateSpec(1.0, 0.0, 0.0), "square", -1.0)
    with pytest.raises(ValueError, match="theta"):
        OneQubitGateSpec(3.5, 0.0, 0.0)
    with pytest.raises(ValueError, match="kind"):
        Envelope("triangle", peak=1.0, duration=1.0)
    with pytest.raises(ValueError):
        PulseSchedule(segments=())
    with pytest.raises(ValueError, match="finite"):
        PulseSegment(Envelope("square", 1.0, 1.0), phase=float("nan"))
