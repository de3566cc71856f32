"""Command-line front end.

Commands: estimate, schedule, quickswap, verify, devices. Global flags
select constants, seed, output format and destination. The fixture
directory can be overridden with the ACTIVOL_FIXTURES environment
variable.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction
from pathlib import Path
from typing import Dict, Optional

import numpy as np

from . import blocknet, costs, device, program, sched, semantics

EXIT_OK = 0
EXIT_UNKNOWN_OP = 3
EXIT_BAD_PARAMS = 4
EXIT_INFEASIBLE = 5
EXIT_FILE = 6
EXIT_VERIFY_FAILED = 7


def fixtures_dir() -> Path:
    env = os.environ.get("ACTIVOL_FIXTURES")
    if env:
        return Path(env)
    return Path(__file__).parent / "fixtures"


def _read_text(path_or_name: str, kind: str) -> str:
    p = Path(path_or_name)
    if not p.exists():
        candidate = fixtures_dir() / f"{path_or_name}.json"
        if candidate.exists():
            p = candidate
        else:
            raise FileNotFoundError(f"no such {kind}: {path_or_name}")
    return p.read_text(encoding="utf-8")


def _load_devices() -> Dict:
    return json.loads((fixtures_dir() / "devices.json").read_text(encoding="utf-8"))


def _fmt_seconds(t: float) -> str:
    if t == 0:
        return "0 s"
    if t < 120:
        return f"{t:.3g} s"
    if t < 2 * 3600:
        return f"{t / 60:.3g} min"
    if t < 2 * 86400:
        return f"{t / 3600:.3g} h"
    if t < 2 * 365 * 86400:
        return f"{t / 86400:.3g} days"
    return f"{t / (365 * 86400):.3g} years"


def _blocks_str(quarters: Fraction) -> str:
    b = quarters / 4
    return str(float(b)) if b.denominator != 1 else str(b.numerator)


def metrics_from_preset(doc: Dict) -> device.DeviceMetrics:
    style = doc.get("style")
    if style == "matter-av":
        return device.matter_av_metrics(
            int(doc["workspace"]), int(doc["d"]), float(doc["cycle_time"])
        )
    if style == "photonic-av":
        cfg = device.PhotonicConfig(
            rsg_count=int(doc["rsg_count"]),
            tau_rsg=float(doc["tau_rsg"]),
            delay_bins=int(doc["delay_bins"]),
            distance_d=int(doc["d"]),
            delay_kind=doc.get("delay_kind", "fiber"),
        )
        return device.photonic_metrics(cfg)
    raise ValueError(f"preset style {style!r} is not an active-volume machine")


def _emit(args, payload: Dict, text: str):
    if args.format == "json":
        out = json.dumps(payload, indent=2, default=str) + "\n"
    elif args.format == "csv":
        keys = list(payload)
        out = ",".join(keys) + "\n" + ",".join(str(payload[k]) for k in keys) + "\n"
    else:
        out = text
    if args.out:
        Path(args.out).write_text(out, encoding="utf-8")
    else:
        sys.stdout.write(out)


def _constants_from_flag(spec: Optional[str]) -> costs.CostConstants:
    if not spec:
        return costs.DEFAULT
    kw = {}
    for item in spec.split(","):
        key, _, val = item.partition("=")
        key = key.strip()
        if key not in ("c_t", "c_ccz"):
            raise ValueError(f"unknown constant {key!r}")
        kw[key] = Fraction(val.strip()) * 4  # given in blocks
    return costs.CostConstants(**kw)


def cmd_estimate(args) -> int:
    try:
        text = _read_text(args.program, "program file")
        overrides = _constants_from_flag(args.constants) if args.constants else None
        prog = program.parse_program(text, constants=overrides)
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FILE
    except program.UnknownOpError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_UNKNOWN_OP
    except (program.BadParamsError, program.ProgramError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_PARAMS

    depth = sched.reaction_depth(prog)
    vol_q = prog.total_volume
    payload = {
        "memory_requirement": prog.memory_requirement,
        "active_volume_blocks": float(vol_q) / 4,
        "active_volume_quarters": int(vol_q) if vol_q.denominator == 1 else str(vol_q),
        "reaction_depth": float(depth),
    }
    lines = [
        f"memory requirement : {prog.memory_requirement} qubits",
        f"active volume      : {_blocks_str(vol_q)} blocks",
        f"reaction depth     : {float(depth):g}",
    ]

    if args.machine:
        try:
            presets = _load_devices()
            if args.machine in presets:
                doc = presets[args.machine]
            else:
                doc = json.loads(_read_text(args.machine, "machine file"))
            metrics = metrics_from_preset(doc)
        except FileNotFoundError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_FILE
        except (ValueError, KeyError) as exc:
            print(f"error: bad machine description: {exc}", file=sys.stderr)
            return EXIT_BAD_PARAMS
        if prog.memory_requirement > metrics.memory_qubits:
            print(
                f"error: program needs {prog.memory_requirement} qubits, "
                f"machine has {metrics.memory_qubits}",
                file=sys.stderr,
            )
            return EXIT_INFEASIBLE
        summary = costs.CostSummary(volume=vol_q, reaction_depth=depth)
        est = device.av_runtime(summary, metrics)
        err = device.total_error(metrics.per_block_error, float(vol_q) / 4)
        payload.update(
            wall_time_seconds=est.wall_time,
            limiting_factor=est.limiting_factor,
            total_error=err,
            machine_memory=metrics.memory_qubits,
            machine_speed_blocks_per_sec=metrics.speed_blocks_per_sec,
        )
        lines += [
            f"wall time          : {_fmt_seconds(est.wall_time)} ({est.limiting_factor}-limited)",
            f"total error        : {err:.3g}",
        ]
    _emit(args, payload, "\n".join(lines) + "\n")
    return EXIT_OK


def cmd_schedule(args) -> int:
    try:
        prog = program.parse_program(_read_text(args.program, "program file"))
        presets = _load_devices()
        mdoc = (
            presets[args.machine]
            if args.machine in presets
            else json.loads(_read_text(args.machine, "machine file"))
        )
        cfg = sched.MachineConfig(
            n_modules=int(mdoc["n_modules"]),
            distance_d=int(mdoc["d"]),
            code_cycle=float(mdoc["cycle_time"]),
            reaction_time=float(mdoc.get("reaction_time", mdoc["cycle_time"])),
        )
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FILE
    except program.UnknownOpError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_UNKNOWN_OP
    except (KeyError, ValueError, program.ProgramError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_PARAMS
    try:
        rep = sched.pack_cycles(prog, cfg)
    except sched.InfeasibleError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    payload = {
        "logical_cycles": rep.logical_cycles,
        "blocks_executed": float(rep.blocks_executed),
        "idle_workspace_blocks": float(rep.idle_workspace_blocks),
        "bridge_qubits": rep.bridge_qubits_created,
        "stall_cycles": rep.stall_cycles,
        "borrowed_workspace": rep.borrowed_workspace,
        "reaction_depth": float(rep.reaction_depth),
        "wall_time_seconds": rep.wall_time,
        "total_error": rep.total_error,
    }
    lines = [f"{k:22s}: {v}" for k, v in payload.items()]
    if args.trace:
        for i, (load, budget) in enumerate(zip(rep.cycle_loads, rep.cycle_budgets)):
            lines.append(f"cycle {i}: load {float(load)} / budget {float(budget)}")
    _emit(args, payload, "\n".join(lines) + "\n")
    return EXIT_OK


def cmd_quickswap(args) -> int:
    try:
        stats = sched.quickswap_experiment(args.nq, args.sep, args.trials, args.seed)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_PARAMS
    payload = {
        "n_q": stats.n_q,
        "s": stats.s,
        "trials": stats.trials,
        "mean": stats.mean,
        "std": stats.std,
        "max": stats.max,
        "failures": stats.failures,
        "seed": stats.seed,
    }
    if args.format == "csv":
        out = stats.to_csv()
        if args.out:
            Path(args.out).write_text(out, encoding="utf-8")
        else:
            sys.stdout.write(out)
        return EXIT_OK
    text = (
        f"n_q={stats.n_q} s={stats.s} trials={stats.trials} "
        f"mean={stats.mean:.2f} std={stats.std:.2f} max={stats.max} "
        f"failures={stats.failures}\n"
    )
    _emit(args, payload, text)
    return EXIT_OK


_BUILDERS = {
    "cnot": blocknet.build_cnot,
    "hadamard": blocknet.build_hadamard,
    "reactive_cz": blocknet.build_reactive_cz,
    "toffoli": blocknet.build_toffoli_consumption,
}

_REFERENCE_OPS = {
    "cnot": lambda: semantics.circuit_oracle(2, [("CNOT", 0, 1)]),
    "hadamard": lambda: semantics.circuit_oracle(1, [("H", 0)]),
}


def _builder_network(name: str):
    if name in _BUILDERS:
        return _BUILDERS[name]()
    if ":" in name:
        kind, _, arg = name.partition(":")
        if kind == "zmeas":
            return blocknet.build_zmeas_network(int(arg))
        if kind == "xmeas":
            return blocknet.build_xmeas_network(int(arg))
        if kind == "ppm":
            return blocknet.build_ppm_network(arg)
    return None


def cmd_verify(args) -> int:
    name = args.network
    try:
        net = _builder_network(name)
    except (blocknet.NetworkError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_PARAMS
    semantic_ref = None
    if net is None:
        try:
            net = blocknet.from_json(_read_text(name, "network file"))
        except FileNotFoundError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_FILE
        except (ValueError, KeyError) as exc:
            print(f"error: cannot parse network: {exc}", file=sys.stderr)
            return EXIT_BAD_PARAMS
    report = blocknet.validate_network(net, range_r=args.range)
    lines = [f"blocks: {len(net.blocks)}", f"structural check: {'ok' if report.ok else 'FAILED'}"]
    for v in report.violations:
        lines.append(f"  {v.rule}: blocks {list(v.block_ids)}: {v.message}")
    sem_status = "skipped"
    if report.ok:
        n_open = len(net.input_labels) + len(net.output_labels)
        if n_open <= semantics.MAX_OPEN_LEGS:
            try:
                m = semantics.contract_network(net)
                sem_status = "contracted"
                if name in _REFERENCE_OPS:
                    ok = semantics.equal_up_to_scalar(m, _REFERENCE_OPS[name]())
                    sem_status = "matches reference" if ok else "MISMATCH"
                    if not ok:
                        report = blocknet.ValidationReport(
                            violations=report.violations
                            + (blocknet.Violation("semantics", (), "oracle mismatch"),)
                        )
            except semantics.ZeroMapError:
                sem_status = "zero map"
    lines.append(f"semantics: {sem_status}")
    payload = {
        "blocks": len(net.blocks),
        "valid": report.ok,
        "violations": [v.rule for v in report.violations],
        "semantics": sem_status,
    }
    _emit(args, payload, "\n".join(lines) + "\n")
    return EXIT_OK if report.ok and sem_status != "MISMATCH" else EXIT_VERIFY_FAILED


def cmd_devices(args) -> int:
    presets = _load_devices()
    if args.preset:
        if args.preset not in presets:
            print(f"error: unknown preset {args.preset!r}", file=sys.stderr)
            return EXIT_FILE
        doc = presets[args.preset]
        payload = dict(doc)
        if doc.get("style", "").endswith("av") and doc.get("style") != "baseline":
            try:
                m = metrics_from_preset(doc)
                payload.update(
                    memory_qubits=m.memory_qubits,
                    speed_blocks_per_sec=m.speed_blocks_per_sec,
                    per_block_error=m.per_block_error,
                    reaction_time=m.reaction_time,
                )
            except ValueError:
                pass
        text = "\n".join(f"{k:22s}: {v}" for k, v in payload.items()) + "\n"
        _emit(args, payload, text)
        return EXIT_OK

    # comparison table for the factoring workload
    prog = program.parse_program(
        (fixtures_dir() / "factoring.json").read_text(encoding="utf-8")
    )
    vol_blocks = float(prog.total_volume) / 4
    rows = []
    for name, doc in presets.items():
        style = doc.get("style")
        if style == "baseline":
            t = device.baseline_runtime(
                int(doc["n_q"]), float(doc["n_t"]), int(doc["d"]),
                cycle_time=float(doc["cycle_time"]),
            )
        elif style == "baseline-photonic":
            cfg = device.PhotonicConfig(
                rsg_count=int(doc["rsg_count"]),
                tau_rsg=float(doc["tau_rsg"]),
                delay_bins=int(doc["delay_bins"]),
                distance_d=int(doc["d"]),
            )
            t = device.baseline_runtime(
                int(doc["n_q"]), float(doc["n_t"]), int(doc["d"]), photonic=cfg
            )
        else:
            m = metrics_from_preset(doc)
            t = vol_blocks / m.speed_blocks_per_sec
        rows.append((name, style, t))
    payload = {name: t for name, _, t in rows}
    width = max(len(r[0]) for r in rows)
    text = "\n".join(
        f"{name:{width}s}  {style:18s}  {_fmt_seconds(t)}" for name, style, t in rows
    ) + "\n"
    _emit(args, payload, text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="activol",
        description="Resource estimation for active-volume surface-code machines",
    )
    ap.add_argument("--constants", help="overrides, e.g. c_t=25,c_ccz=35 (blocks)")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--format", choices=("json", "text", "csv"), default="text")
    ap.add_argument("--out", help="write output to this path instead of stdout")

    # the global flags are also accepted after the subcommand name
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--constants", default=argparse.SUPPRESS)
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS)
    common.add_argument(
        "--format", choices=("json", "text", "csv"), default=argparse.SUPPRESS
    )
    common.add_argument("--out", default=argparse.SUPPRESS)

    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("estimate", parents=[common], help="memory, volume and depth of a program")
    p.add_argument("program", help="program file or fixture name")
    p.add_argument("--machine", help="device preset name or machine file")
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("schedule", parents=[common], help="cycle-by-cycle packing of a program")
    p.add_argument("program")
    p.add_argument("--machine", required=True)
    p.add_argument("--trace", action="store_true")
    p.set_defaults(func=cmd_schedule)

    p = sub.add_parser("quickswap", parents=[common], help="memory rearrangement statistics")
    p.add_argument("--nq", type=int, required=True)
    p.add_argument("--sep", type=int, default=3)
    p.add_argument("--trials", type=int, default=100)
    p.set_defaults(func=cmd_quickswap)

    p = sub.add_parser("verify", parents=[common], help="validate and contract a block network")
    p.add_argument("network", help="builder name (cnot, hadamard, reactive_cz, "
                                   "toffoli, zmeas:<w>, xmeas:<w>, ppm:<pauli>) or file")
    p.add_argument("--range", type=int, default=12)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("devices", parents=[common], help="device presets and comparison table")
    p.add_argument("--preset")
    p.add_argument("--compare", action="store_true")
    p.set_defaults(func=cmd_devices)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        _constants_from_flag(args.constants)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_PARAMS
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
