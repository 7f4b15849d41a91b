"""Command-line front end.

Every subcommand writes CSV or JSON to ``--out`` (default: stdout).
Exit codes: 0 success / completely positive, 2 usage or input error,
3 complete-positivity violation.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from . import correlation, effective_env, tcl
from .correlation import CorrelationKernel
from .effective_env import ChannelSpec
from .superop import CPViolationError, SuperOperator, check_cp, extract_kraus

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NOT_CP = 3

COMMANDS = ("decay-curve", "simulate", "check-cp", "kraus", "compare-tcl")


class UsageError(ValueError):
    pass


@dataclass
class RunConfig:
    command: str
    kernel: Optional[CorrelationKernel] = None
    channel: Optional[ChannelSpec] = None
    tau_max: float = 5.0
    grid_points: int = 101
    output_path: Optional[str] = None
    format: str = "csv"
    bloch: Optional[np.ndarray] = None
    closed_form: bool = False
    tau: float = 1.0
    superop: Optional[SuperOperator] = None
    steps: Optional[int] = None

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise UsageError(f"unknown command {self.command!r}")
        if self.grid_points < 2:
            raise UsageError("--points must be at least 2")
        if not self.tau_max > 0:
            raise UsageError("--tau-max must be positive")
        if self.format not in ("csv", "json"):
            raise UsageError("--format must be csv or json")

    @property
    def grid(self) -> np.ndarray:
        return np.linspace(0.0, self.tau_max, self.grid_points)


def _load_json_arg(text: str, what: str):
    """Inline JSON or a path to a JSON file."""
    try:
        if text.lstrip().startswith(("{", "[")):
            return json.loads(text)
        return json.loads(Path(text).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read {what}: {exc}") from exc


def _parse_bloch(text: str) -> np.ndarray:
    try:
        values = [float(v) for v in text.split(",")]
    except ValueError as exc:
        raise UsageError(f"--bloch expects sx,sy,sz: {exc}") from exc
    try:
        return effective_env.check_bloch(values)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def _table(columns: dict, fmt: str) -> str:
    names = list(columns)
    if fmt == "json":
        return json.dumps({k: [float(v) for v in columns[k]] for k in names}) + "\n"
    rows = zip(*(columns[k] for k in names))
    lines = [",".join(names)] + [",".join(_fmt(v) for v in row) for row in rows]
    return "\n".join(lines) + "\n"


def cmd_decay_curve(config: RunConfig) -> tuple[str, int]:
    taus = config.grid
    values = [correlation.decay(config.kernel, t) for t in taus]
    return _table({"tau": taus, "decay": values}, config.format), EXIT_OK


def cmd_simulate(config: RunConfig) -> tuple[str, int]:
    taus = config.grid
    s = effective_env.trajectory(
        config.channel, config.bloch, config.kernel, taus, closed_form=config.closed_form
    )
    cols = {"tau": taus, "sx": s[:, 0], "sy": s[:, 1], "sz": s[:, 2]}
    return _table(cols, config.format), EXIT_OK


def _target_superop(config: RunConfig) -> SuperOperator:
    if config.superop is not None:
        return config.superop
    return effective_env.channel_superop(config.channel, config.kernel, config.tau)


def cmd_check_cp(config: RunConfig) -> tuple[str, int]:
    report = check_cp(_target_superop(config))
    code = EXIT_OK if report.is_cp else EXIT_NOT_CP
    return json.dumps(report.to_json()) + "\n", code


def cmd_kraus(config: RunConfig) -> tuple[str, int]:
    kraus = extract_kraus(_target_superop(config))
    return json.dumps(kraus.to_json()) + "\n", EXIT_OK


def cmd_compare_tcl(config: RunConfig) -> tuple[str, int]:
    taus, dev, traj = tcl.compare_with_dilation(
        config.channel, config.kernel, config.bloch, config.tau_max,
        points=config.grid_points, steps=config.steps,
    )
    return _table({"tau": taus, "deviation": dev}, config.format), EXIT_OK


def trajectory_csv(traj: tcl.Trajectory) -> str:
    """TCL trajectory as ``tau,sx,sy,sz,trace_drift`` rows."""
    bloch = traj.bloch
    drift = np.abs(np.trace(traj.states, axis1=1, axis2=2) - 1)
    cols = {"tau": traj.taus, "sx": bloch[:, 0], "sy": bloch[:, 1], "sz": bloch[:, 2],
            "trace_drift": drift}
    return _table(cols, "csv")


_HANDLERS = {
    "decay-curve": cmd_decay_curve,
    "simulate": cmd_simulate,
    "check-cp": cmd_check_cp,
    "kraus": cmd_kraus,
    "compare-tcl": cmd_compare_tcl,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="effenv",
        description="Qubit decoherence through a one-qubit effective environment.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, kernel=True, channel=False, grid=False, bloch=False):
        if kernel:
            p.add_argument("--kernel", required=not channel or grid,
                           help='kernel JSON or file, e.g. {"kind":"exponential","kappa":1,"tau_r":1}')
        if channel:
            p.add_argument("--channel", help='channel JSON or file, e.g. {"kind":"dephasing","r":[0,0,0]}')
        if grid:
            p.add_argument("--tau-max", type=float, default=5.0)
            p.add_argument("--points", type=int, default=101)
            p.add_argument("--format", choices=("csv", "json"), default="csv")
        if bloch:
            p.add_argument("--bloch", default="1,0,0", help="initial system Bloch vector sx,sy,sz")
        p.add_argument("--out", help="output path (default: stdout)")

    common(sub.add_parser("decay-curve", help="tau,decay over a uniform grid"), grid=True)

    p = sub.add_parser("simulate", help="Bloch trajectory via the dilation")
    common(p, channel=True, grid=True, bloch=True)
    p.add_argument("--closed-form", action="store_true", help="use the closed-form Bloch dynamics")

    for name, text in (("check-cp", "complete-positivity report"), ("kraus", "canonical Kraus set")):
        p = sub.add_parser(name, help=text)
        common(p, channel=True)
        p.add_argument("--tau", type=float, default=1.0)
        p.add_argument("--superop", help="superoperator JSON file instead of a channel")

    p = sub.add_parser("compare-tcl", help="TCL vs dilation deviation")
    common(p, channel=True, grid=True, bloch=True)
    p.add_argument("--steps", type=int, default=None,
                   help="RK4 steps over the whole run (default 2048 per 1/kappa)")
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    kw = {"command": args.command, "output_path": args.out}
    try:
        if getattr(args, "kernel", None):
            kw["kernel"] = CorrelationKernel.from_json(_load_json_arg(args.kernel, "kernel"))
        if getattr(args, "channel", None):
            kw["channel"] = ChannelSpec.from_json(_load_json_arg(args.channel, "channel"))
        if getattr(args, "superop", None):
            kw["superop"] = SuperOperator.from_json(_load_json_arg(args.superop, "superoperator"))
    except UsageError:
        raise
    except (ValueError, TypeError, KeyError) as exc:
        raise UsageError(str(exc)) from exc
    for attr, key in (("tau_max", "tau_max"), ("points", "grid_points"), ("format", "format"),
                      ("closed_form", "closed_form"), ("tau", "tau"), ("steps", "steps")):
        if hasattr(args, attr):
            kw[key] = getattr(args, attr)
    if hasattr(args, "bloch"):
        kw["bloch"] = _parse_bloch(args.bloch)

    cmd = args.command
    if cmd in ("simulate", "compare-tcl") and kw.get("channel") is None:
        raise UsageError(f"{cmd} needs --channel")
    if cmd in ("check-cp", "kraus") and kw.get("superop") is None:
        if kw.get("channel") is None or kw.get("kernel") is None:
            raise UsageError(f"{cmd} needs --superop, or --channel with --kernel")
    return RunConfig(**kw)


def run(config: RunConfig) -> int:
    try:
        text, code = _HANDLERS[config.command](config)
    except CPViolationError as exc:
        sys.stderr.write(json.dumps(exc.report.to_json()) + "\n")
        return EXIT_NOT_CP
    if config.output_path:
        Path(config.output_path).write_text(text)
    else:
        sys.stdout.write(text)
    return code


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = config_from_args(args)
        return run(config)
    except (UsageError, correlation.NonCPRegimeError, ValueError) as exc:
        sys.stderr.write(f"effenv {args.command}: error: {exc}\n")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
