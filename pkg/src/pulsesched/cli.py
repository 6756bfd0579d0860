"""Command-line interface.

Subcommands: schedule, calibrate, rabi, rb.  Exit codes: 0 success,
2 configuration error, 3 simulation/calibration error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import bench
from .circuit import decompose_dynamic, decompose_static, merge_virtual_z, parse_circuit
from .errors import ConfigError, PulseschedError
from .gateset import (
    DYNAMIC,
    STATIC,
    GateSet,
    build_dynamic_gateset,
    build_static_gateset,
)
from .scheduler import build_graph, cpm, graph_to_dot, initial_durations, optimize_durations, create_schedule
from .sim import NoiseModel, simulate_rabi, write_rabi_csv


def _load_noise(path) -> NoiseModel:
    if path is None:
        return NoiseModel()
    try:
        with open(path) as fh:
            return NoiseModel.from_json(json.load(fh))
    except (OSError, json.JSONDecodeError, KeyError) as exc:
        raise ConfigError(f"cannot read noise model {path}: {exc}") from exc


def _parse_int_list(text) -> list[int]:
    try:
        return [int(p) for p in str(text).split(",") if p != ""]
    except ValueError as exc:
        raise ConfigError(f"bad integer list {text!r}") from exc


def _parse_float_list(text) -> list[float]:
    try:
        return [float(p) for p in str(text).split(",") if p != ""]
    except ValueError as exc:
        raise ConfigError(f"bad number list {text!r}") from exc


def _cmd_schedule(args) -> int:
    try:
        text = Path(args.circuit).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read circuit: {exc}") from exc
    try:
        gs = GateSet.load(args.gateset)
    except (OSError, json.JSONDecodeError, KeyError) as exc:
        raise ConfigError(f"cannot read gate set: {exc}") from exc
    c = parse_circuit(text)
    lowered = decompose_static(c) if gs.mode == STATIC else decompose_dynamic(c)
    lowered = merge_virtual_z(lowered)
    g = build_graph(lowered, initial_durations(lowered, gs))
    makespan = cpm(g)
    if not args.no_optimize:
        optimize_durations(g, gs)
    sch = create_schedule(g, gs)
    sch.write_json(args.out)
    if args.dot:
        Path(args.dot).write_text(graph_to_dot(g))
    print(f"scheduled {len(lowered.gates)} gates on {lowered.width} qubits; "
          f"makespan {makespan} dt ({makespan * gs.dt_ns:.1f} ns) -> {args.out}")
    return 0


def _cmd_calibrate(args) -> int:
    nm = _load_noise(args.noise)
    if args.mode == STATIC:
        if not args.durations:
            raise ConfigError("static calibration needs --durations")
        gs = build_static_gateset(
            _parse_int_list(args.durations), nm, args.qubits,
            min_duration=args.min_dur, max_duration=args.max_dur,
        )
    else:
        gs = build_dynamic_gateset(
            nm, args.qubits,
            min_duration=args.min_dur if args.min_dur is not None else 32,
            max_duration=args.max_dur if args.max_dur is not None else 128,
        )
    gs.write_json(args.out)
    print(f"calibrated {args.mode} gate set for {args.qubits} qubit(s) -> {args.out}")
    return 0


def _cmd_rabi(args) -> int:
    nm = _load_noise(args.noise)
    amplitudes = _parse_float_list(args.amplitudes)
    if not amplitudes:
        raise ConfigError("need at least one amplitude")
    data = simulate_rabi(amplitudes, nm, qubit=args.qubit, window_dt=args.window)
    write_rabi_csv(data, args.out)
    print(f"rabi sweep over {len(amplitudes)} amplitude(s) -> {args.out}")
    return 0


def _cmd_rb(args) -> int:
    nm = _load_noise(args.noise)
    cfg = bench.RBConfig(
        n_qubits=args.qubits,
        clifford_lengths=tuple(_parse_int_list(args.lengths)),
        circuits_per_length=args.circuits_per_length,
        mode=args.mode,
        min_duration=args.min_dur,
        max_duration=args.max_dur,
        seed=args.seed,
        shots=args.shots,
    )
    if args.gateset:
        gs = GateSet.load(args.gateset)
        gs.min_duration = cfg.min_duration
        gs.max_duration = cfg.max_duration
        if gs.mode != cfg.mode:
            raise ConfigError(f"gate set mode {gs.mode!r} does not match --mode {cfg.mode!r}")
        gs.validate_coverage(cfg.n_qubits)
    elif cfg.mode == STATIC:
        gs = build_static_gateset(
            [d for d in (32, 48, 64, 120, 256, 512) if d >= cfg.min_duration],
            nm, cfg.n_qubits, min_duration=cfg.min_duration, max_duration=cfg.max_duration,
        )
    else:
        gs = build_dynamic_gateset(
            nm, cfg.n_qubits, min_duration=cfg.min_duration, max_duration=cfg.max_duration
        )
    result = bench.run_rb(cfg, gs, nm)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    bench.write_rbresult_csv(result, out / "rbresult.csv")
    bench.write_durations_csv(result, out / "durations.csv")
    bench.write_timescale_csv(result, nm, out / "timescale.csv")
    for length in result.lengths():
        print(
            f"length {length:4d}: fixed P0 {result.mean_p0(length, bench.FIXED):.4f}  "
            f"optimized P0 {result.mean_p0(length, bench.OPTIMIZED):.4f}"
        )
    print(f"paired latencies equal: {result.paired_latencies_equal()} -> {out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="pulsesched", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    ps = sub.add_parser("schedule", help="compile a circuit file into a pulse schedule")
    ps.add_argument("circuit")
    ps.add_argument("--gateset", required=True)
    ps.add_argument("--no-optimize", action="store_true")
    ps.add_argument("--out", required=True)
    ps.add_argument("--dot", help="also write the dependency graph in DOT form")
    ps.set_defaults(fn=_cmd_schedule)

    pc = sub.add_parser("calibrate", help="calibrate a gate set against the simulator")
    pc.add_argument("--mode", choices=(STATIC, DYNAMIC), required=True)
    pc.add_argument("--durations", help="comma-separated static durations in dt")
    pc.add_argument("--min-dur", type=int, default=None)
    pc.add_argument("--max-dur", type=int, default=None)
    pc.add_argument("--qubits", type=int, default=1)
    pc.add_argument("--noise", help="noise model JSON")
    pc.add_argument("--out", required=True)
    pc.set_defaults(fn=_cmd_calibrate)

    pr = sub.add_parser("rabi", help="simulated Rabi amplitude sweep")
    pr.add_argument("--amplitudes", required=True)
    pr.add_argument("--qubit", type=int, default=0)
    pr.add_argument("--window", type=int, default=None, help="observation window in dt")
    pr.add_argument("--noise")
    pr.add_argument("--out", required=True)
    pr.set_defaults(fn=_cmd_rabi)

    pb = sub.add_parser("rb", help="randomized benchmarking, fixed vs optimized")
    pb.add_argument("--qubits", type=int, required=True)
    pb.add_argument("--lengths", required=True)
    pb.add_argument("--mode", choices=(STATIC, DYNAMIC), default=STATIC)
    pb.add_argument("--min-dur", type=int, default=32)
    pb.add_argument("--max-dur", type=int, default=512)
    pb.add_argument("--shots", type=int, default=1024)
    pb.add_argument("--seed", type=int, default=0)
    pb.add_argument("--circuits-per-length", type=int, default=10)
    pb.add_argument("--gateset", help="reuse a calibrated gate set JSON")
    pb.add_argument("--noise")
    pb.add_argument("--out-dir", required=True)
    pb.set_defaults(fn=_cmd_rb)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except PulseschedError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
