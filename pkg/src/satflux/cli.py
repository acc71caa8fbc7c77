"""Command-line entry point: ``satflux {simulate,tw,check,sweep}``.

Exit codes: 0 success, 1 validation failure, 2 configuration or usage error.
Runtime termination events (blow-up threshold, positivity loss) are recorded
in the run metadata and do not change the exit code.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from . import io, validation
from .config import RunConfig
from .errors import ConfigError, SatfluxError
from .flux import make_classical_flux
from .solver import ModelParams, run
from .waves import continuous_profile, jump_profile

log = logging.getLogger("satflux")

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2

# simulate flags that mirror config keys
_MIRRORED = {"M": ("model", "M"), "a": ("model", "a"), "m": ("model", "m"), "c": ("flux", "c"),
             "nu": ("flux", "nu"), "N": ("grid", "N"), "eps": ("grid", "eps"),
             "t_end": ("time", "t_end"), "snapshot_dt": ("time", "snapshot_dt")}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(f"{self.prog}: {message}")


def _parser() -> argparse.ArgumentParser:
    p = _Parser(prog="satflux", description="Flux-saturated Keller-Segel simulator in mass coordinates.")
    p.add_argument("--seedless", action="store_true", help="accepted and ignored (runs are deterministic)")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="cmd", required=True, parser_class=_Parser)

    s = sub.add_parser("simulate", help="run the dual solver from a config file")
    s.add_argument("--config", required=True)
    s.add_argument("--out")
    s.add_argument("--svg", action="store_true", help="emit SVG plots (same as output.emit_svg)")
    s.add_argument("--seedless", action="store_true")
    for flag, (_, key) in _MIRRORED.items():
        s.add_argument(f"--{flag.replace('_', '-')}", dest=flag,
                       type=int if key == "N" else float, default=None)

    t = sub.add_parser("tw", help="construct a traveling-wave profile")
    t.add_argument("--kind", choices=("continuous", "jump"), required=True)
    t.add_argument("--a", type=float, default=1.0)
    t.add_argument("--c", type=float, default=1.0)
    t.add_argument("--nu", type=float, default=1.0)
    t.add_argument("--m", type=float, default=0.0)
    t.add_argument("--M", type=float, default=None, help="mass (jump: defaults to 2c/a)")
    t.add_argument("--tau", type=float, default=None, help="reduced speed (default: entropic -aM/2)")
    t.add_argument("--v-edge", dest="v_edge", type=float, default=1.0)
    t.add_argument("--xi-minus", dest="xi_minus", type=float, default=0.0)
    t.add_argument("--N", type=int, default=None)
    t.add_argument("--out")
    t.add_argument("--svg", action="store_true")
    t.add_argument("--seedless", action="store_true")

    c = sub.add_parser("check", help="validate a run directory")
    c.add_argument("--run", required=True)
    c.add_argument("--steady", action="store_true",
                   help="also require stationarity and RH residuals (auto for jump_wave runs)")
    c.add_argument("--seedless", action="store_true")

    w = sub.add_parser("sweep", help="run simulate for each value of one parameter")
    w.add_argument("--config", required=True)
    w.add_argument("--param", required=True, help="table.key or a unique key such as M")
    w.add_argument("--values", required=True, help="comma-separated values")
    w.add_argument("--out")
    w.add_argument("--jobs", type=int, default=1)
    w.add_argument("--seedless", action="store_true")
    return p


# ---------------------------------------------------------------------------


def _simulate(cfg: RunConfig, out: Path, svg: bool = False) -> dict:
    params, scheme = cfg.params(), cfg.scheme()
    v0 = cfg.initial(params, scheme)
    traj = run(params, scheme, v0, sigma_minus=cfg["initial"]["sigma_minus"])
    io.write_run(traj, out, cfg.to_dict())
    if svg or cfg["output"]["emit_svg"]:
        io.write_run_plots(traj, out)
    return {"out": str(out), "termination": traj.termination, "t": traj.termination_time,
            "ell": traj.fronts[-1].ell, "steps": traj.meta["steps"]}


def _cmd_simulate(args) -> int:
    cfg = RunConfig.load(args.config)
    for flag, (section, key) in _MIRRORED.items():
        val = getattr(args, flag)
        if val is not None:
            cfg = cfg.with_override(section, key, val)
    out = cfg.output_dir(args.out)
    info = _simulate(cfg, out, args.svg)
    print(f"simulate: {info['termination']} at t={info['t']:.6g}, ell={info['ell']:.8g}, "
          f"{info['steps']} steps -> {out}")
    return EXIT_OK


def _cmd_tw(args) -> int:
    try:
        flux = make_classical_flux(args.nu, args.c)
        if args.kind == "jump":
            M = 2.0 * args.c / args.a if args.M is None else args.M
            params = ModelParams(a=args.a, m=args.m, M=M, flux=flux)
            kw = {} if args.N is None else {"N": args.N}
            prof = jump_profile(params, args.v_edge, args.xi_minus, **kw)
        else:
            if args.M is None:
                raise ConfigError("tw --kind continuous needs --M")
            tau = -args.a * args.M / 2.0 if args.tau is None else args.tau
            params = ModelParams(a=args.a, m=args.m, M=args.M, flux=flux)
            kw = {} if args.N is None else {"N": args.N}
            prof = continuous_profile(params, args.M, tau, args.xi_minus, **kw)
    except ConfigError:
        raise
    except SatfluxError as exc:
        raise ConfigError(str(exc)) from exc
    out = Path(args.out) if args.out else RunConfig.from_dict({}).output_dir()
    csv_path, _ = io.write_profile(prof, out / "profile.csv")
    if args.svg:
        io.atomic_write_text(out / "profile.svg", io.svg_polylines(
            [(prof.xi, prof.U, f"{prof.kind} profile")], "traveling wave", "xi", "U"))
    print(f"tw: {prof.kind} sigma={prof.sigma:.10g} kappa_bar={prof.kappa_bar:.10g} "
          f"ell={prof.ell:.10g} residual={prof.residual:.3g} -> {csv_path}")
    return EXIT_OK


def _cmd_check(args) -> int:
    run_dir = Path(args.run)
    try:
        traj = io.read_run(run_dir)
        meta = json.loads((run_dir / "metadata.json").read_text(encoding="utf-8"))
    except (OSError, KeyError, ValueError, SatfluxError) as exc:
        raise ConfigError(f"cannot load run {run_dir}: {exc}") from exc
    steady = args.steady or meta.get("config", {}).get("initial", {}).get("kind") == "jump_wave"
    report = validation.validate(traj, steady=steady)
    io.atomic_write_text(run_dir / "report.json", report.to_json())
    for e in report.entries:
        print(f"{'PASS' if e.passed else 'FAIL'} {e.name}: residual={e.residual:.3g} tol={e.tolerance:.3g}"
              + (f" at t={e.t:.6g}" if e.t is not None else "")
              + (f", eta={e.eta:.6g}" if e.eta is not None else ""))
    return EXIT_OK if report.passed else EXIT_FAIL


def _sweep_member(payload):
    cfg = RunConfig.from_dict(payload["config"], payload["base_dir"])
    return _simulate(cfg, Path(payload["out"]))


def _cmd_sweep(args) -> int:
    cfg = RunConfig.load(args.config)
    section, key = cfg.find_key(args.param)
    try:
        values = [float(x) for x in args.values.split(",") if x.strip()]
    except ValueError as exc:
        raise ConfigError(f"--values: {exc}") from exc
    if not values:
        raise ConfigError("--values: empty list")
    if key == "N" or key == "max_steps":
        values = [int(x) for x in values]
    root = cfg.output_dir(args.out)
    payloads = []
    for val in values:
        member = cfg.with_override(section, key, val)
        payloads.append({"config": member.to_dict(), "base_dir": str(member.base_dir),
                         "out": str(root / f"{key}={val:g}")})
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as ex:
            results = list(ex.map(_sweep_member, payloads))
    else:
        results = [_sweep_member(p) for p in payloads]
    for val, info in zip(values, results):
        print(f"sweep {key}={val:g}: {info['termination']} at t={info['t']:.6g}, ell={info['ell']:.8g}")
    return EXIT_OK


_COMMANDS = {"simulate": _cmd_simulate, "tw": _cmd_tw, "check": _cmd_check, "sweep": _cmd_sweep}


def run_cli(argv=None) -> int:
    try:
        args = _parser().parse_args(argv)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return _COMMANDS[args.cmd](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except SatfluxError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


def main() -> None:
    sys.exit(run_cli())
