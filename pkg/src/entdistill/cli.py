"""Evaluate, optimize, sweep and verify two-pair distillation protocols.

Subcommands cover single-point evaluation, theta optimization, CSV sweeps
and oracle verification.

Exit codes: 0 success, 1 I/O error, 2 usage or domain error, 3 verification
failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

from . import _backend
from .objective import ChannelModel, DegenerateProtocolError, EvaluationResult, evaluate_at
from .optimize import MODES, SearchConfig, optimize_protocol
from .oracle import ACCEPTANCE_MIN_SAMPLES, OracleConfig, mc_evaluate, within_sigma
from .protocol import REGISTRY, Protocol, ProtocolError, ProtocolParams, get_protocol, load_protocol

EXIT_OK, EXIT_IO, EXIT_USAGE, EXIT_VERIFY = 0, 1, 2, 3

CSV_COLUMNS = ("protocol", "mode", "F", "p", "theta_star", "avg_fidelity", "p_succ", "input_state_fidelity")
SWEEP_DEFAULTS = {"p": (0.0, 0.5, 26), "F": (0.0, 1.0, 21)}


class UsageError(Exception):
    pass


def _fidelity_arg(text):
    try:
        val = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not 0.0 <= val <= 1.0:
        raise argparse.ArgumentTypeError(f"input fidelity must lie in [0, 1], got {val}")
    return val


def _flip_arg(text):
    try:
        val = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not 0.0 <= val <= 0.5:
        raise argparse.ArgumentTypeError(f"bit flip probability must lie in [0, 0.5], got {val}")
    return val


def _fmt(x):
    return "" if x is None else format(x, ".12g")


# -- protocol resolution --------------------------------------------------------

def _resolve(args) -> list[Protocol]:
    names = []
    pos = getattr(args, "protocol_pos", None)
    if isinstance(pos, list):
        names.extend(pos)
    elif pos:
        names.append(pos)
    names.extend(args.protocol or [])
    protos = []
    try:
        protos.extend(get_protocol(n) for n in names)
        if args.circuit_file:
            protos.append(load_protocol(args.circuit_file))
    except OSError as exc:
        raise UsageError(f"cannot read circuit file: {exc}") from None
    except ProtocolError as exc:
        raise UsageError(str(exc)) from None
    if not protos:
        raise UsageError("no protocol given (name, --protocol or --circuit-file)")
    return protos


def _single(args) -> Protocol:
    protos = _resolve(args)
    if len(protos) != 1:
        raise UsageError("this command takes exactly one protocol")
    return protos[0]


def _theta_for(proto: Protocol, theta):
    if proto.num_params == 0:
        if theta is not None:
            raise UsageError(f"protocol {proto.name!r} has no free parameters; drop --theta")
        return None
    if theta is None:
        raise UsageError(f"protocol {proto.name!r} needs --theta")
    return ProtocolParams(theta).theta


def _search_config(args) -> SearchConfig:
    try:
        return SearchConfig(grid_points=args.grid_points)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


# -- commands ---------------------------------------------------------------------

def _print_result(proto, theta, F, p, res: EvaluationResult, out):
    out.write(f"protocol      {proto.name}\n")
    out.write(f"theta         {_fmt(theta) or '-'}\n")
    out.write(f"F             {_fmt(F)}\n")
    out.write(f"p             {_fmt(p)}\n")
    out.write(f"avg_fidelity  {_fmt(res.avg_fidelity)}\n")
    out.write(f"p_succ        {_fmt(res.p_succ)}\n")
    out.write("outcome  P^xy            F^xy\n")
    for (x, y), m in sorted(res.per_outcome.items()):
        fid = "-" if m.fidelity is None else _fmt(m.fidelity)
        out.write(f"{x}{y}       {_fmt(m.probability):<15} {fid}\n")


def cmd_eval(args, out=None):
    out = out or sys.stdout
    proto = _single(args)
    theta = _theta_for(proto, args.theta)
    res = evaluate_at(proto, theta, args.F, ChannelModel(args.p))
    if args.json:
        payload = {"protocol": proto.name, "theta": theta, "F": args.F, "p": args.p, **res.to_json()}
        out.write(json.dumps(payload, indent=2) + "\n")
    else:
        _print_result(proto, theta, args.F, args.p, res, out)
    return EXIT_OK


def cmd_optimize(args, out=None):
    out = out or sys.stdout
    proto = _single(args)
    if proto.num_params == 0:
        raise UsageError(f"protocol {proto.name!r} has no free parameters to optimize")
    params, res = optimize_protocol(proto, args.F, ChannelModel(args.p), args.mode, _search_config(args))
    out.write(f"mode          {args.mode}\n")
    _print_result(proto, params.theta, args.F, args.p, res, out)
    return EXIT_OK


@dataclass(frozen=True)
class SweepSpec:
    protocols: tuple[Protocol, ...]
    mode: str
    sweep_var: str
    sweep_range: tuple[float, float, int]
    fixed_F: float | None
    fixed_p: float | None
    theta: float | None = None
    optimizer: SearchConfig = SearchConfig()

    def __post_init__(self):
        start, stop, steps = self.sweep_range
        lo, hi = (0.0, 1.0) if self.sweep_var == "F" else (0.0, 0.5)
        if self.sweep_var not in ("p", "F"):
            raise UsageError(f"sweep variable must be p or F, got {self.sweep_var!r}")
        if steps < 2:
            raise UsageError("a sweep needs at least 2 steps")
        if not (lo <= start <= hi and lo <= stop <= hi):
            raise UsageError(f"{self.sweep_var} range must lie within [{lo}, {hi}]")
        if self.mode not in MODES + ("fixed",):
            raise UsageError(f"unknown mode {self.mode!r}")

    def points(self) -> list[float]:
        start, stop, steps = self.sweep_range
        return [round(start + (stop - start) * i / (steps - 1), 12) for i in range(steps)]


def _sweep_point(proto: Protocol, mode: str, F: float, p: float, theta, cfg: SearchConfig):
    ch = ChannelModel(p)
    if proto.num_params == 0:
        mode, theta_star = "fixed", None
        res = evaluate_at(proto, None, F, ch)
    elif mode == "fixed":
        theta_star = theta
        res = evaluate_at(proto, theta, F, ch)
    else:
        params, res = optimize_protocol(proto, F, ch, mode, cfg)
        theta_star = params.theta
    return (proto.name, mode, F, p, theta_star, res.avg_fidelity, res.p_succ, (1 + F) / 2)


def run_sweep(spec: SweepSpec, jobs: int = 1) -> list[tuple]:
    """Rows in (protocol, sweep point) order regardless of scheduling."""
    tasks = []
    for proto in spec.protocols:
        theta = None
        if spec.mode == "fixed" and proto.num_params == 1:
            if spec.theta is None:
                raise UsageError(f"mode 'fixed' needs --theta for protocol {proto.name!r}")
            theta = ProtocolParams(spec.theta).theta
        for x in spec.points():
            F, p = (x, spec.fixed_p) if spec.sweep_var == "F" else (spec.fixed_F, x)
            tasks.append((proto, spec.mode, F, p, theta, spec.optimizer))
    if jobs > 1:
        with ProcessPoolExecutor(jobs) as pool:
            return list(pool.map(_sweep_point, *zip(*tasks)))
    return [_sweep_point(*t) for t in tasks]


def write_csv(rows, fh):
    writer = csv.writer(fh, lineterminator="\r\n")
    writer.writerow(CSV_COLUMNS)
    for name, mode, F, p, theta, fid, ps, ref in rows:
        writer.writerow([name, mode, _fmt(F), _fmt(p), _fmt(theta), _fmt(fid), _fmt(ps), _fmt(ref)])


def cmd_sweep(args, out=None):
    out = out or sys.stdout
    protos = tuple(_resolve(args))
    default_start, default_stop, default_steps = SWEEP_DEFAULTS[args.var]
    spec = SweepSpec(
        protocols=protos,
        mode=args.mode,
        sweep_var=args.var,
        sweep_range=(
            default_start if args.start is None else args.start,
            default_stop if args.stop is None else args.stop,
            default_steps if args.steps is None else args.steps,
        ),
        fixed_F=args.F,
        fixed_p=args.p,
        theta=args.theta,
        optimizer=_search_config(args),
    )
    if args.var == "p" and args.F is None:
        raise UsageError("a p sweep needs a fixed --F")
    if args.var == "F" and args.p is None:
        raise UsageError("an F sweep needs a fixed --p")
    rows = run_sweep(spec, jobs=args.jobs)
    buf = io.StringIO()
    write_csv(rows, buf)
    if args.out in (None, "-"):
        out.write(buf.getvalue())
    else:
        with open(args.out, "w", newline="", encoding="utf-8") as fh:
            fh.write(buf.getvalue())
    return EXIT_OK


def cmd_verify(args, out=None, err=None):
    out, err = out or sys.stdout, err or sys.stderr
    proto = _single(args)
    if args.samples < ACCEPTANCE_MIN_SAMPLES:
        err.write(f"warning: {args.samples} samples is below {ACCEPTANCE_MIN_SAMPLES}; estimates are coarse\n")
    ch = ChannelModel(args.p)
    if proto.num_params == 1 and args.theta is None:
        params, _ = optimize_protocol(proto, args.F, ch, "noise_aware", _search_config(args))
        theta = params.theta
    else:
        theta = _theta_for(proto, args.theta)
    exact = evaluate_at(proto, theta, args.F, ch)
    mc = mc_evaluate(
        proto,
        None if theta is None else ProtocolParams(theta),
        args.F,
        ch,
        OracleConfig(num_samples=args.samples, seed=args.seed, workers=args.workers),
    )
    checks = [
        ("avg_fidelity", exact.avg_fidelity, mc.avg_fidelity, mc.se_avg_fidelity),
        ("p_succ", exact.p_succ, mc.p_succ, mc.se_p_succ),
    ]
    out.write(f"protocol {proto.name}  theta {_fmt(theta) or '-'}  F {_fmt(args.F)}  p {_fmt(args.p)}\n")
    out.write(f"samples {mc.num_samples}  seed {mc.seed}  successes {mc.num_success}\n")
    out.write("quantity      exact           estimate        std_err         delta/se  result\n")
    ok = True
    for label, ex, est, se in checks:
        passed = within_sigma(ex, est, se)
        ok &= passed
        z = abs(ex - est) / se if se > 0 else 0.0
        out.write(
            f"{label:<13} {_fmt(ex):<15} {_fmt(est):<15} {_fmt(se):<15} {z:8.3f}  {'PASS' if passed else 'FAIL'}\n"
        )
    out.write("PASS\n" if ok else "FAIL\n")
    return EXIT_OK if ok else EXIT_VERIFY


def cmd_list(args, out=None):
    out = out or sys.stdout
    for name, factory in REGISTRY.items():
        proto = factory()
        succ = ",".join(f"{x}{y}" for x, y in sorted(proto.success_set))
        out.write(f"{name:<12} params={proto.num_params} success={{{succ}}}\n")
    return EXIT_OK


# -- parser -------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="entdistill", description=__doc__.split("\n\n")[0])
    parser.add_argument("--backend", choices=_backend.available(), help="kernel backend (default: fastest available)")
    sub = parser.add_subparsers(dest="command", required=True)

    def protocol_args(p, many=False):
        p.add_argument("protocol_pos", nargs="*" if many else "?", metavar="PROTOCOL",
                       help=f"registry name ({', '.join(REGISTRY)})")
        p.add_argument("--protocol", action="append", help="registry name (repeatable)" if many else "registry name")
        p.add_argument("--circuit-file", help="JSON circuit description")

    p_eval = sub.add_parser("eval", help="evaluate one protocol at one point")
    protocol_args(p_eval)
    p_eval.add_argument("--theta", type=float)
    p_eval.add_argument("--F", type=_fidelity_arg, required=True)
    p_eval.add_argument("--p", type=_flip_arg, required=True)
    p_eval.add_argument("--json", action="store_true", help="print JSON instead of a table")
    p_eval.set_defaults(func=cmd_eval)

    p_opt = sub.add_parser("optimize", help="maximize over theta")
    protocol_args(p_opt)
    p_opt.add_argument("--F", type=_fidelity_arg, required=True)
    p_opt.add_argument("--p", type=_flip_arg, required=True)
    p_opt.add_argument("--mode", choices=MODES, default="noise_aware")
    p_opt.add_argument("--grid-points", type=int, default=SearchConfig.grid_points)
    p_opt.set_defaults(func=cmd_optimize)

    p_sweep = sub.add_parser("sweep", help="sweep p or F and write CSV")
    protocol_args(p_sweep, many=True)
    p_sweep.add_argument("--mode", choices=MODES + ("fixed",), default="noise_aware")
    p_sweep.add_argument("--var", choices=("p", "F"), default="p")
    p_sweep.add_argument("--start", type=float)
    p_sweep.add_argument("--stop", type=float)
    p_sweep.add_argument("--steps", type=int)
    p_sweep.add_argument("--F", type=_fidelity_arg, help="fixed input fidelity for p sweeps")
    p_sweep.add_argument("--p", type=_flip_arg, help="fixed flip probability for F sweeps")
    p_sweep.add_argument("--theta", type=float, help="angle for --mode fixed")
    p_sweep.add_argument("--grid-points", type=int, default=SearchConfig.grid_points)
    p_sweep.add_argument("--jobs", type=int, default=1, help="worker processes")
    p_sweep.add_argument("--out", help="CSV path (default stdout)")
    p_sweep.set_defaults(func=cmd_sweep)

    p_ver = sub.add_parser("verify", help="compare exact results with the Monte-Carlo oracle")
    protocol_args(p_ver)
    p_ver.add_argument("--F", type=_fidelity_arg, required=True)
    p_ver.add_argument("--p", type=_flip_arg, required=True)
    p_ver.add_argument("--theta", type=float, help="default: noise-aware optimum")
    p_ver.add_argument("--samples", type=int, default=OracleConfig.num_samples)
    p_ver.add_argument("--seed", type=int, default=0)
    p_ver.add_argument("--workers", type=int, default=1)
    p_ver.add_argument("--grid-points", type=int, default=SearchConfig.grid_points)
    p_ver.set_defaults(func=cmd_verify)

    p_list = sub.add_parser("list-protocols", help="show built-in protocols")
    p_list.set_defaults(func=cmd_list)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.backend:
            _backend.set_backend(args.backend)
        return args.func(args)
    except (UsageError, ProtocolError, DegenerateProtocolError, ValueError) as exc:
        print(f"entdistill {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"entdistill {args.command}: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
