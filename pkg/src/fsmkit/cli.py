"""Command-line front end: check, simulate, emit, bench.

Exit codes: 0 success, 1 validation/check failure, 2 usage or parse error.
Every subcommand is deterministic given its arguments and input files, and
writes only to the paths named in its flags (or stdout).
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import dsl, emit as emit_mod, env as env_mod, itlc, sim
from .model import FsmSpec, moore_output, validate
from .timer import DEFAULT_LONG_TICKS, DEFAULT_SHORT_TICKS, TimerConfig

LIGHT_ORDER = ("mg", "my", "mr", "sg", "sy", "sr")


class _CliError(Exception):
    def __init__(self, code: int, message: str):
        self.code = code
        self.message = message
        super().__init__(message)


def _read_text(path: str, what: str) -> str:
    try:
        return Path(path).read_text("utf-8")
    except OSError as exc:
        raise _CliError(2, f"cannot read {what} '{path}': {exc}") from exc


def _load_spec(path: str) -> FsmSpec:
    text = _read_text(path, "machine description")
    try:
        return dsl.parse(text)
    except dsl.ParseFailure as exc:
        detail = "\n".join(f"{path}:{e}" for e in exc.errors)
        raise _CliError(2, detail) from exc


def _timer_config(args: argparse.Namespace) -> TimerConfig:
    try:
        return TimerConfig(short_ticks=args.short, long_ticks=args.long)
    except ValueError as exc:
        raise _CliError(2, str(exc)) from exc


def cmd_check(args: argparse.Namespace) -> int:
    spec = _load_spec(args.fsm)
    report = validate(spec)
    for f in report.findings:
        print(f"{f.kind} {f.state or '-'} {f.message}")
    return 0 if report.ok else 1


def _light_bits(moore: dict[str, int]) -> str:
    return "".join(str(moore.get(name, 0)) for name in LIGHT_ORDER)


def cmd_simulate(args: argparse.Namespace) -> int:
    spec = _load_spec(args.fsm)
    cfg = _timer_config(args)
    try:
        stim = sim.parse_stimulus(_read_text(args.stim, "stimulus"))
        trace = sim.simulate(spec, cfg, stim)
    except sim.SimError as exc:
        raise _CliError(2, str(exc)) from exc
    log_lines = [
        f"{r.tick} {r.state} c={r.inputs['c']} ts={r.inputs['ts']} "
        f"tl={r.inputs['tl']} st={r.st} {_light_bits(dict(r.moore))}"
        for r in trace.records
    ]
    log_text = "\n".join(log_lines) + "\n"
    if args.log:
        Path(args.log).write_text(log_text, "utf-8")
    else:
        sys.stdout.write(log_text)
    if args.vcd:
        Path(args.vcd).write_text(sim.write_vcd(trace), "utf-8")
    return 0


def cmd_emit(args: argparse.Namespace) -> int:
    spec = _load_spec(args.fsm)
    report = validate(spec)
    if not report.ok:
        for f in report.findings:
            print(f"{f.kind} {f.state or '-'} {f.message}", file=sys.stderr)
        return 1
    try:
        if args.format == "verilog":
            opts = emit_mod.EmitOptions(module_name=spec.name, state_encoding=args.encoding)
            text = emit_mod.emit_verilog(spec, opts)
        else:
            if args.pins:
                pins = emit_mod.parse_pin_file(_read_text(args.pins, "pin file"))
            else:
                pins = emit_mod.PinMap(tuple(
                    emit_mod.PinEntry(*row) for row in itlc.DEFAULT_PIN_ROWS))
            pins.check_against(spec)
            text = emit_mod.emit_ucf(pins)
    except emit_mod.EmitError as exc:
        raise _CliError(2, str(exc)) from exc
    if args.output:
        Path(args.output).write_text(text, "utf-8")
    else:
        sys.stdout.write(text)
    return 0


def cmd_bench(args: argparse.Namespace) -> int:
    spec = _load_spec(args.fsm)
    cfg = _timer_config(args)
    if not 0.0 <= args.arrival <= 1.0:
        raise _CliError(2, f"--arrival must be in [0, 1], got {args.arrival}")
    if args.seeds < 1:
        raise _CliError(2, f"--seeds must be >= 1, got {args.seeds}")
    try:
        results = []
        for seed in range(args.seeds):
            model = env_mod.TrafficModel(
                arrival_prob=args.arrival, seed=seed, horizon=args.horizon,
                service_rate=args.service_rate)
            metrics, _trace = env_mod.run_env(spec, cfg, model)
            results.append(metrics)
            print(metrics.as_record(prefix=f"seed={seed} "))
    except (ValueError, sim.SimError) as exc:
        raise _CliError(2, str(exc)) from exc
    k = len(results)
    aggregate = env_mod.Metrics(
        mean_side_wait=sum(m.mean_side_wait for m in results) / k,
        max_side_wait=max(m.max_side_wait for m in results),
        main_green_share=sum(m.main_green_share for m in results) / k,
        side_vehicles_served=sum(m.side_vehicles_served for m in results),
        cycles_completed=sum(m.cycles_completed for m in results),
    )
    print(aggregate.as_record(prefix="aggregate "))
    return 0


def _add_timer_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--short", type=int, default=DEFAULT_SHORT_TICKS,
                        help="ticks until the short (amber) interval expires")
    parser.add_argument("--long", type=int, default=DEFAULT_LONG_TICKS,
                        help="ticks until the long (green) interval expires")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fsmkit",
        description="Define, validate, simulate, and emit HDL for clocked "
                    "Moore machines with transition pulses.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="validate a machine description")
    p.add_argument("fsm")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("simulate", help="closed-loop cycle-accurate simulation")
    p.add_argument("fsm")
    p.add_argument("stim")
    _add_timer_flags(p)
    p.add_argument("--vcd", help="write a VCD waveform to this path")
    p.add_argument("--log", help="write the per-tick text log to this path")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("emit", help="generate Verilog or UCF text")
    p.add_argument("fsm")
    p.add_argument("--format", choices=("verilog", "ucf"), default="verilog")
    p.add_argument("--encoding", choices=(emit_mod.BINARY, emit_mod.ONE_HOT),
                   default=emit_mod.BINARY)
    p.add_argument("--pins", help="pin file (default: the bundled board map)")
    p.add_argument("-o", "--output", help="write to this path instead of stdout")
    p.set_defaults(func=cmd_emit)

    p = sub.add_parser("bench", help="run the stochastic traffic environment")
    p.add_argument("fsm")
    p.add_argument("--arrival", type=float, required=True,
                   help="per-tick per-approach arrival probability")
    p.add_argument("--seeds", type=int, default=1)
    p.add_argument("--horizon", type=int, default=1000)
    p.add_argument("--service-rate", type=int, default=1)
    _add_timer_flags(p)
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _CliError as exc:
        print(exc.message, file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
