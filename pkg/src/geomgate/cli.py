"""Command-line entry point.

Commands: gate1, gate2, verify, blockade-scan, robustness-scan, decay-scan,
bloch-path.  A run is described either by flags or by a strict JSON config
(--config); unknown config fields are rejected.  Angles accept pi literals
("pi/2", "3*pi/4"); frequencies accept an optional MHz suffix, read as the
angular value in rad/us ("5piMHz" means 5*pi rad/us, so a pulse of area pi
at that peak lasts 0.2 us).

Exit codes: 0 success, 1 numerical validation failure, 2 invalid config.
"""

from __future__ import annotations

import argparse
import ast
import json
import math
import sys
from dataclasses import asdict, dataclass, fields

import numpy as np

from . import analysis, linalg, onequbit, openquantum, twoqubit
from .evolve import StepValidationError
from .onequbit import OneQubitGateSpec
from .pulses import ENVELOPE_KINDS, build_one_qubit_schedule
from .results import atomic_write_json, format_float
from .twoqubit import TwoQubitGateSpec, pi_area_envelope

COMMANDS = ("gate1", "gate2", "verify", "blockade-scan", "robustness-scan", "decay-scan", "bloch-path")


class ConfigError(ValueError):
    """Invalid run configuration; the message names the offending field."""


_ALLOWED_NODES = (
    ast.Expression, ast.BinOp, ast.UnaryOp, ast.Constant, ast.Name, ast.Load,
    ast.Add, ast.Sub, ast.Mult, ast.Div, ast.Pow, ast.USub, ast.UAdd,
)


def parse_number(value, field: str = "value") -> float:
    """Parse a float or a pi-literal expression like 'pi/2' or '5pi'."""
    if isinstance(value, bool):
        raise ConfigError(f"{field}: expected a number, got a boolean")
    if isinstance(value, (int, float)):
        return float(value)
    text = str(value).strip().replace("pi", "*pi").replace("**pi", "*pi")
    if text.startswith("*pi"):
        text = "1" + text
    text = text.replace("(*pi", "(1*pi").replace("+*pi", "+1*pi").replace("-*pi", "-1*pi").replace("/*pi", "/1*pi")
    text = text.replace("*pi", "*PI").replace("PI", "pi")
    try:
        tree = ast.parse(text, mode="eval")
        for node in ast.walk(tree):
            if not isinstance(node, _ALLOWED_NODES):
                raise ValueError(f"disallowed token {type(node).__name__}")
            if isinstance(node, ast.Name) and node.id != "pi":
                raise ValueError(f"unknown name {node.id!r}")
        return float(eval(compile(tree, "<config>", "eval"), {"__builtins__": {}}, {"pi": math.pi}))
    except (SyntaxError, ValueError) as exc:
        raise ConfigError(f"{field}: cannot parse number {value!r} ({exc})") from None


def parse_frequency(value, field: str = "frequency") -> float:
    """Parse a rate in rad/us; an optional MHz suffix keeps the same number
    (the conventional 'MHz' figures here are already angular)."""
    if isinstance(value, str):
        text = value.strip()
        if text.lower().endswith("mhz"):
            text = text[:-3].strip()
        return parse_number(text, field)
    return parse_number(value, field)


def parse_number_list(value, field: str) -> tuple[float, ...]:
    """Comma list of numbers; 'a:b:s' items expand to inclusive ranges."""
    if isinstance(value, (list, tuple)):
        return tuple(parse_number(v, field) for v in value)
    out: list[float] = []
    for item in str(value).split(","):
        item = item.strip()
        if not item:
            continue
        if ":" in item:
            parts = [parse_number(p, field) for p in item.split(":")]
            if len(parts) != 3 or parts[2] == 0:
                raise ConfigError(f"{field}: range syntax is start:stop:step, got {item!r}")
            start, stop, step = parts
            n = int(math.floor((stop - start) / step + 1e-9)) + 1
            out.extend(start + k * step for k in range(max(n, 0)))
        else:
            out.append(parse_number(item, field))
    return tuple(out)


@dataclass
class RunConfig:
    """Everything one run needs; serializes to/from a strict JSON document."""

    command: str
    theta: float = math.pi / 2
    varphi: float = 0.0
    gamma: float = math.pi / 2
    phi: float = math.pi / 2
    interaction: float = 200.0 * math.pi
    area: float = math.pi
    envelope: str = "square"
    peak: float = 5.0 * math.pi
    truncation: float = 4.0
    steps: int = 4000
    samples: int = 2000
    qubits: int = 1
    ratios: tuple[float, ...] = (10.0, 20.0, 40.0, 80.0)
    lifetimes: tuple[float, ...] = (25.0, 50.0, 100.0, 200.0)
    epsilons: tuple[float, ...] = ()
    phase_offsets: tuple[float, ...] = ()
    detunings: tuple[float, ...] = ()
    decay_target: str = "ground"
    out: str | None = None
    format: str = "csv"

    def __post_init__(self) -> None:
        if self.command not in COMMANDS:
            raise ConfigError(f"command: unknown command {self.command!r}")
        if self.envelope not in ENVELOPE_KINDS:
            raise ConfigError(f"envelope: unknown kind {self.envelope!r}")
        if self.format not in ("csv", "json"):
            raise ConfigError(f"format: expected csv or json, got {self.format!r}")
        if self.decay_target not in ("ground", "leakage"):
            raise ConfigError(f"decay_target: expected ground or leakage, got {self.decay_target!r}")
        if self.qubits not in (1, 2):
            raise ConfigError(f"qubits: expected 1 or 2, got {self.qubits!r}")
        if not self.peak > 0:
            raise ConfigError("peak: must be positive")
        if not 0.0 <= self.theta <= math.pi:
            raise ConfigError(f"theta: must lie in [0, pi], got {self.theta}")
        if self.steps < 100:
            raise ConfigError("steps: must be at least 100")
        if self.samples < 100:
            raise ConfigError("samples: must be at least 100")

    _NUMBER_FIELDS = ("theta", "varphi", "gamma", "phi", "area", "truncation")
    _FREQ_FIELDS = ("interaction", "peak")
    _LIST_FIELDS = ("ratios", "lifetimes", "epsilons", "phase_offsets", "detunings")
    _INT_FIELDS = ("steps", "samples", "qubits")

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"{sorted(unknown)[0]}: unknown config field")
        if "command" not in data:
            raise ConfigError("command: missing")
        kwargs: dict = {}
        for key, raw in data.items():
            if key in cls._NUMBER_FIELDS:
                kwargs[key] = parse_number(raw, key)
            elif key in cls._FREQ_FIELDS:
                kwargs[key] = parse_frequency(raw, key)
            elif key in cls._LIST_FIELDS:
                kwargs[key] = parse_number_list(raw, key)
            elif key in cls._INT_FIELDS:
                try:
                    kwargs[key] = int(raw)
                except (TypeError, ValueError):
                    raise ConfigError(f"{key}: expected an integer, got {raw!r}") from None
            else:
                kwargs[key] = raw
        return cls(**kwargs)

    def to_dict(self) -> dict:
        d = asdict(self)
        for key in self._LIST_FIELDS:
            d[key] = list(d[key])
        return d


def _print_matrix(u: np.ndarray, label: str) -> None:
    print(f"{label} ({u.shape[0]}x{u.shape[1]}):")
    for row in u:
        cells = " ".join(f"{v.real:+.10f}{v.imag:+.10f}j" for v in row)
        print(f"  [ {cells} ]")


def _matrix_payload(u: np.ndarray) -> dict:
    return {"re": [[float(v.real) for v in row] for row in u], "im": [[float(v.imag) for v in row] for row in u]}


def _emit_sweep(result, config: RunConfig) -> None:
    result.metadata["config"] = config.to_dict()
    if config.out:
        if config.format == "csv":
            result.to_csv(config.out)
        else:
            result.to_json(config.out)
        print(f"wrote {config.out}")
    else:
        print(result.to_csv_text(), end="")


def _cmd_gate1(config: RunConfig) -> int:
    spec = OneQubitGateSpec(theta=config.theta, varphi=config.varphi, gamma=config.gamma)
    schedule = build_one_qubit_schedule(spec, config.envelope, config.peak, config.truncation)
    gate = onequbit.composed_gate(spec)
    _print_matrix(gate, "gate")
    print("schedule:")
    print("  idx kind     peak           duration       phase          area")
    for k, seg in enumerate(schedule.segments):
        env = seg.envelope
        print(
            f"  {k:<3d} {env.kind:<8s} {format_float(env.peak):<14s} "
            f"{format_float(env.duration):<14s} {format_float(seg.phase):<14s} {format_float(env.area())}"
        )
    print(f"total duration: {format_float(schedule.total_duration)} us")
    if config.out:
        atomic_write_json(
            config.out,
            {"config": config.to_dict(), "gate": _matrix_payload(gate), "schedule": schedule.to_json_dict()},
        )
        print(f"wrote {config.out}")
    return 0


def _cmd_gate2(config: RunConfig) -> int:
    gate = twoqubit.analytic_gate_at_area(config.phi, config.area)
    _print_matrix(gate, "gate")
    entangling, diag = twoqubit.entangling_witness(gate)
    print(f"entangling: {entangling} (g1={diag['g1']:.6g}, g2={diag['g2']:.6g})")
    if config.out:
        atomic_write_json(
            config.out,
            {
                "config": config.to_dict(),
                "gate": _matrix_payload(gate),
                "entangling": entangling,
                "invariants": {"g1_re": diag["g1"].real, "g1_im": diag["g1"].imag, "g2": diag["g2"]},
            },
        )
        print(f"wrote {config.out}")
    return 0


def _cmd_bloch_path(config: RunConfig) -> int:
    spec = OneQubitGateSpec(theta=config.theta, varphi=config.varphi, gamma=config.gamma)
    schedule = build_one_qubit_schedule(spec, config.envelope, config.peak, config.truncation)
    _, path = onequbit.evolve_numeric(schedule, steps=config.samples)
    omega = onequbit.solid_angle(path)
    print(f"samples: {len(path.times)}")
    print(f"closure error: {format_float(path.closure_error())}")
    print(f"dynamical phase: {format_float(onequbit.dynamical_phase(path))}")
    print(f"total phase: {format_float(onequbit.total_phase(path))}")
    print(f"solid angle: {format_float(omega)} (half: {format_float(0.5 * omega)})")
    if config.out:
        if config.format == "csv":
            path.to_csv(config.out)
        else:
            atomic_write_json(
                config.out,
                {
                    "config": config.to_dict(),
                    "t": [float(x) for x in path.times],
                    "r": [[float(v) for v in row] for row in path.vectors],
                    "total_phase": [float(x) for x in path.total_phase],
                    "dyn_integrand": [float(x) for x in path.dyn_integrand],
                },
            )
        print(f"wrote {config.out}")
    return 0


def _cmd_blockade_scan(config: RunConfig) -> int:
    spec = TwoQubitGateSpec(
        phi=config.phi,
        interaction=config.interaction,
        envelope=pi_area_envelope(config.envelope, config.peak, config.truncation),
    )
    result = twoqubit.blockade_scan(spec, config.ratios, steps=config.steps)
    slope = result.metadata.get("slope_fit")
    print(f"blockade scan over ratios {list(config.ratios)}")
    print(f"slope_fit: {'undefined' if slope is None else format_float(slope)}")
    _emit_sweep(result, config)
    return 0


def _cmd_robustness_scan(config: RunConfig) -> int:
    grid = []
    epsilons = config.epsilons
    detunings = config.detunings
    if not (config.epsilons or config.phase_offsets or config.detunings):
        epsilons = tuple(round(-0.1 + 0.01 * k, 10) for k in range(21))
        detunings = tuple(round(-0.2 + 0.02 * k, 10) * config.peak for k in range(21))
    grid.extend(analysis.ControlErrorModel(rabi_scale_epsilon=e) for e in epsilons)
    grid.extend(analysis.ControlErrorModel(phase_offset=p) for p in config.phase_offsets)
    grid.extend(analysis.ControlErrorModel(detuning=d) for d in detunings)
    if config.qubits == 1:
        spec = OneQubitGateSpec(theta=config.theta, varphi=config.varphi, gamma=config.gamma)
    else:
        spec = TwoQubitGateSpec(
            phi=config.phi,
            interaction=config.interaction,
            envelope=pi_area_envelope(config.envelope, config.peak, config.truncation),
        )
    result = analysis.robustness_scan(spec, grid, steps=config.steps, envelope_kind=config.envelope, peak=config.peak)
    print(f"robustness scan over {len(grid)} error points")
    _emit_sweep(result, config)
    return 0


def _cmd_decay_scan(config: RunConfig) -> int:
    if config.qubits == 1:
        spec = OneQubitGateSpec(theta=config.theta, varphi=config.varphi, gamma=config.gamma)
    else:
        spec = TwoQubitGateSpec(
            phi=config.phi,
            interaction=config.interaction,
            envelope=pi_area_envelope(config.envelope, config.peak, config.truncation),
        )
    result = openquantum.decay_scan(
        spec,
        config.lifetimes,
        model_target=config.decay_target,
        steps=config.steps,
        envelope_kind=config.envelope,
        peak=config.peak,
    )
    print(f"decay scan over lifetimes {list(config.lifetimes)} us")
    _emit_sweep(result, config)
    return 0


def _verify_checks(config: RunConfig):
    rng = np.random.default_rng(20260809)

    def random_spec() -> OneQubitGateSpec:
        return OneQubitGateSpec(
            theta=float(rng.uniform(0.05, math.pi - 0.05)),
            varphi=float(rng.uniform(0.0, 2.0 * math.pi)),
            gamma=float(rng.uniform(-math.pi + 0.05, math.pi)),
        )

    def one_qubit_identity():
        worst = 0.0
        for th in np.linspace(0.0, math.pi, 8):
            for ph in np.linspace(0.0, 2.0 * math.pi, 8, endpoint=False):
                for ga in np.linspace(-math.pi, math.pi, 8):
                    spec = OneQubitGateSpec(float(th), float(ph), float(ga))
                    worst = max(worst, linalg.frobenius(onequbit.composed_gate(spec) - onequbit.target_gate(spec)))
        return worst, 1e-12

    def eigen_action():
        worst = 0.0
        for _ in range(10):
            spec = random_spec()
            pair = onequbit.eigenbasis(spec)
            u = onequbit.composed_gate(spec)
            worst = max(worst, abs(np.vdot(pair.d, u @ pair.d) - np.exp(1j * spec.gamma)))
            worst = max(worst, abs(np.vdot(pair.b, u @ pair.b) - np.exp(-1j * spec.gamma)))
        return worst, 1e-12

    def numeric_analytic():
        spec = OneQubitGateSpec(math.pi / 2, 0.0, math.pi / 2)
        sched = build_one_qubit_schedule(spec, "square", config.peak)
        u, _ = onequbit.evolve_numeric(sched, steps=4000)
        return analysis.gate_distance(u, onequbit.composed_gate(spec))["frobenius"], 1e-8

    def parallel_transport():
        worst = 0.0
        for _ in range(5):
            spec = random_spec()
            sched = build_one_qubit_schedule(spec, "square", config.peak)
            _, path = onequbit.evolve_numeric(sched, steps=2000)
            worst = max(worst, float(np.max(np.abs(path.dyn_integrand))) / config.peak)
        return worst, 1e-10

    def solid_angle_half():
        worst = 0.0
        for _ in range(3):
            spec = random_spec()
            sched = build_one_qubit_schedule(spec, "square", config.peak)
            _, path = onequbit.evolve_numeric(sched, steps=10_000)
            half = 0.5 * onequbit.solid_angle(path)
            worst = max(worst, abs(onequbit.wrap_angle(half - spec.gamma)))
        return worst, 1e-3

    def cyclic_chain():
        spec = OneQubitGateSpec(math.pi / 3, 0.7, -1.1)
        sched = build_one_qubit_schedule(spec, "square", config.peak)
        d0 = onequbit.eigenbasis(spec).d
        from .pulses import PulseSchedule

        worst = 0.0
        u1, _ = onequbit.evolve_numeric(PulseSchedule(sched.segments[:1]), steps=500, state=d0)
        worst = max(worst, 1.0 - abs((u1 @ d0)[0]))
        u2, _ = onequbit.evolve_numeric(PulseSchedule(sched.segments[:2]), steps=1000, state=d0)
        worst = max(worst, 1.0 - abs((u2 @ d0)[1]))
        u3, _ = onequbit.evolve_numeric(sched, steps=1500, state=d0)
        worst = max(worst, abs(np.vdot(d0, u3 @ d0) - np.exp(1j * spec.gamma)))
        return worst, 1e-6

    def two_qubit_identity():
        worst = 0.0
        for _ in range(20):
            phi = float(rng.uniform(-math.pi, math.pi))
            c, s = math.cos(phi), math.sin(phi)
            printed = np.array(
                [[-1, 0, 0, 0], [0, c, s, 0], [0, s, -c, 0], [0, 0, 0, 1]], dtype=complex
            )
            worst = max(worst, float(np.max(np.abs(twoqubit.gate_matrix(phi) - printed))))
        return worst, 1e-14

    def dark_state():
        spec = TwoQubitGateSpec(config.phi, config.interaction, pi_area_envelope("square", config.peak))
        dark = twoqubit.bright_dark_basis(spec.phi).dark
        worst = 0.0
        for t in np.linspace(0.0, spec.duration, 31):
            worst = max(worst, float(np.max(np.abs(twoqubit.analytic_evolution(spec, float(t)) @ dark - dark))))
        return worst, 1e-14

    def holonomy():
        spec = TwoQubitGateSpec(config.phi, config.interaction, pi_area_envelope("square", config.peak))
        rep = twoqubit.holonomy_checks(spec, samples=201)
        worst = max(rep.block_error, rep.cyclicity_error, rep.max_transport_single, rep.max_transport_gg)
        return worst, 1e-10

    def effective_numeric():
        spec = TwoQubitGateSpec(config.phi, config.interaction, pi_area_envelope("square", config.peak))
        u = twoqubit.evolve_numeric_full(spec, "effective", steps=2000)
        return linalg.frobenius(u - twoqubit.gate_matrix(spec.phi)), 1e-8

    def witness():
        ent_half = twoqubit.entangling_witness(twoqubit.gate_matrix(math.pi / 2))[0]
        ent_zero = twoqubit.entangling_witness(twoqubit.gate_matrix(0.0))[0]
        return (0.0 if (ent_half and not ent_zero) else 1.0), 0.5

    def config_round_trip():
        again = RunConfig.from_dict(config.to_dict())
        return (0.0 if again == config else 1.0), 0.5

    return [
        ("one-qubit composed equals target", one_qubit_identity),
        ("axis eigenstates pick up conjugate phases", eigen_action),
        ("numeric matches analytic gate", numeric_analytic),
        ("parallel transport (zero dynamical phase)", parallel_transport),
        ("half solid angle equals rotation angle", solid_angle_half),
        ("cyclic chain d -> g -> r -> d", cyclic_chain),
        ("two-qubit gate matches closed form", two_qubit_identity),
        ("dark state is stationary", dark_state),
        ("holonomy block and transport conditions", holonomy),
        ("effective-frame numerics match closed form", effective_numeric),
        ("entangling witness classifies phi=pi/2 and phi=0", witness),
        ("config round-trip", config_round_trip),
    ]


def _cmd_verify(config: RunConfig) -> int:
    first_failure = None
    for name, fn in _verify_checks(config):
        value, tol = fn()
        if value <= tol:
            print(f"ok   {name} ({value:.3g} <= {tol:g})")
        else:
            print(f"FAIL {name} ({value:.3g} > {tol:g})")
            if first_failure is None:
                first_failure = name
    if first_failure is not None:
        print(f"first failing invariant: {first_failure}")
        return 1
    print("all invariants hold")
    return 0


_DISPATCH = {
    "gate1": _cmd_gate1,
    "gate2": _cmd_gate2,
    "verify": _cmd_verify,
    "blockade-scan": _cmd_blockade_scan,
    "robustness-scan": _cmd_robustness_scan,
    "decay-scan": _cmd_decay_scan,
    "bloch-path": _cmd_bloch_path,
}


def run(config: RunConfig) -> int:
    """Dispatch a validated run configuration; returns the exit status."""
    return _DISPATCH[config.command](config)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="geomgate", description="Geometric Rydberg gate synthesis and verification")
    parser.add_argument("--config", help="JSON run configuration (overrides all other flags)")
    sub = parser.add_subparsers(dest="command")
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--theta")
        p.add_argument("--varphi")
        p.add_argument("--gamma")
        p.add_argument("--phi")
        p.add_argument("--interaction")
        p.add_argument("--area")
        p.add_argument("--envelope", choices=ENVELOPE_KINDS)
        p.add_argument("--peak")
        p.add_argument("--truncation")
        p.add_argument("--steps")
        p.add_argument("--samples")
        p.add_argument("--qubits")
        p.add_argument("--ratios")
        p.add_argument("--lifetimes")
        p.add_argument("--epsilons")
        p.add_argument("--phase-offsets", dest="phase_offsets")
        p.add_argument("--detunings")
        p.add_argument("--decay-target", dest="decay_target", choices=("ground", "leakage"))
        p.add_argument("--out")
        p.add_argument("--format", choices=("csv", "json"))
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.config:
            with open(args.config, "r", encoding="utf-8") as f:
                config = RunConfig.from_dict(json.load(f))
        else:
            if not args.command:
                print("error: no command given (and no --config)", file=sys.stderr)
                return 2
            data = {k: v for k, v in vars(args).items() if k not in ("config",) and v is not None}
            config = RunConfig.from_dict(data)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (OSError, json.JSONDecodeError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    try:
        return run(config)
    except (StepValidationError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
