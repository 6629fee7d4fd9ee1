# Shared propagation engine: exactness on constant and piecewise-constant
# generators, the composition law, step validation arithmetic, determinism,
# and measured convergence order on a commuting reference problem.

import math

import numpy as np
import pytest

from geomgate import linalg
from geomgate.evolve import IntegratorConfig, StepValidationError, propagate, required_steps
from geomgate.onequbit import OneQubitGateSpec, composed_gate, schedule_hamiltonian
from geomgate.pulses import build_one_qubit_schedule


def test_constant_generator_is_exact():
    h = 0.8 * linalg.SIGMA_X + 0.3 * linalg.SIGMA_Z
    u = propagate(lambda t: h, 0.0, 2.5, IntegratorConfig(steps=100))
    assert linalg.frobenius(u - linalg.expm(h, -1j * 2.5)) <= 1e-12


def test_piecewise_constant_schedule_is_exact():
    spec = OneQubitGateSpec(1.3, 0.4, -0.8)
    sched = build_one_qubit_schedule(spec, "square", 5.0 * math.pi)
    u = propagate(
        schedule_hamiltonian(sched),
        0.0,
        sched.total_duration,
        IntegratorConfig(steps=300),
        breakpoints=sched.boundaries[:-1],
    )
    assert linalg.frobenius(u - composed_gate(spec)) <= 1e-10


def smooth_h(t):
    return math.cos(t) * linalg.SIGMA_X + math.sin(t) * linalg.SIGMA_Z


def test_composition_over_subintervals():
    config = IntegratorConfig(steps=400)
    u_full = propagate(smooth_h, 0.0, 2.0, config, breakpoints=(1.0,))
    u_a = propagate(smooth_h, 0.0, 1.0, IntegratorConfig(steps=200))
    u_b = propagate(smooth_h, 1.0, 2.0, IntegratorConfig(steps=200))
    assert linalg.frobenius(u_full - u_b @ u_a) <= 1e-9


def test_unitarity_drift():
    u = propagate(smooth_h, 0.0, 5.0, IntegratorConfig(steps=2000))
    assert linalg.frobenius(u.conj().T @ u - np.eye(2)) <= 1e-9


def test_determinism_bit_identical():
    config = IntegratorConfig(steps=500)
    u1 = propagate(smooth_h, 0.0, 3.0, config)
    u2 = propagate(smooth_h, 0.0, 3.0, config)
    assert np.array_equal(u1, u2)


def test_required_steps_arithmetic():
    # an oscillating term at 200pi rad/us over 0.2 us needs about 2514 steps
    # at 0.05 rad per step
    assert required_steps(0.0, 0.2, 0.05, carrier_rate=200.0 * math.pi) == 2514


def test_carrier_rate_enforced():
    h = 0.5 * linalg.SIGMA_X
    with pytest.raises(StepValidationError) as info:
        propagate(lambda t: h, 0.0, 0.2, IntegratorConfig(steps=2000), carrier_rate=200.0 * math.pi)
    assert info.value.required_steps >= 2514
    # enough steps pass
    propagate(lambda t: h, 0.0, 0.2, IntegratorConfig(steps=2600), carrier_rate=200.0 * math.pi)


def test_non_hermitian_sample_rejected():
    bad = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex)
    with pytest.raises(ValueError, match="Hermitian"):
        propagate(lambda t: bad, 0.0, 1.0, IntegratorConfig(steps=100))


def test_config_validation():
    with pytest.raises(ValueError, match="steps"):
        IntegratorConfig(steps=10)
    with pytest.raises(ValueError, match="max_phase_per_step"):
        IntegratorConfig(max_phase_per_step=0.9)
    with pytest.raises(ValueError, match="method"):
        IntegratorConfig(method="euler")
    with pytest.raises(ValueError, match="t1"):
        propagate(smooth_h, 1.0, 1.0, IntegratorConfig(steps=100))


def test_exp_midpoint_convergence_on_reference_problem():
    # fixed-axis drive with quartic envelope f(t) = 60 t^2 (1-t)^2: the
    # propagator error is the midpoint-quadrature error of the area, whose
    # leading Delta-t^2 term cancels because f'(0) = f'(1), so halving the
    # step should cut the error by ~16 (assert >= 8)
    axis = (linalg.SIGMA_X + 2.0 * linalg.SIGMA_Z) / math.sqrt(5.0)
    area = 60.0 / 30.0  # integral of 60 t^2 (1-t)^2 over [0, 1]
    exact = linalg.expm(axis, -1j * area)

    def h(t):
        return 60.0 * t * t * (1.0 - t) ** 2 * axis

    def error(steps):
        u = propagate(h, 0.0, 1.0, IntegratorConfig(steps=steps))
        return linalg.frobenius(u - exact)

    e1, e2 = error(200), error(400)
    assert e1 > 1e-12  # far from roundoff, the ratio is meaningful
    assert e1 / e2 >= 8.0


def test_rk4_matches_constant_generator():
    h = 1.2 * linalg.SIGMA_Y
    u = propagate(lambda t: h, 0.0, 1.0, IntegratorConfig(method="rk4", steps=2000))
    assert linalg.frobenius(u - linalg.expm(h, -1j)) <= 1e-10
