"""Command-line surface: quench, sweep, overlap, coherent, windows.

Progress goes to stderr; results go only to the output file.  Exit codes:
0 success, 1 validation error, 2 runtime or solver error.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from . import analysis, io, protocol
from .basis import enumerate_sector
from .config import RunConfig, apply_overrides, parse_config
from .errors import ValidationError
from .hamiltonian import ModelParams, build_hamiltonian
from .linalg import eigh_dense

_DEFAULT_OUT = {
    "quench": "trajectory.json",
    "coherent": "trajectory.json",
    "sweep": "sweep.csv",
    "overlap": "overlap.json",
    "windows": "windows.json",
}

_DEFAULT_FORMAT = {
    "quench": "json",
    "coherent": "json",
    "sweep": "csv",
    "overlap": "json",
    "windows": "json",
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bhquench",
        description="Quench dynamics of bosons on a chain with an asymmetric barrier",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, doc in (
        ("quench", "one preparation-and-quench trajectory"),
        ("sweep", "population-imbalance (U, t) grid"),
        ("overlap", "eigenstate overlap and Fock-composition report"),
        ("coherent", "quench from a product coherent state"),
        ("windows", "directional-transport windows of a sweep"),
    ):
        p = sub.add_parser(name, help=doc)
        p.add_argument("--config", help="key = value configuration file")
        p.add_argument("--L", type=int)
        p.add_argument("--N", type=int)
        p.add_argument("--U", type=float)
        p.add_argument("--h", type=float)
        p.add_argument("--tmax", type=float)
        p.add_argument("--dt", type=float)
        p.add_argument("--barrier")
        p.add_argument("--out")
        p.add_argument("--format", dest="format")
    return parser


def _load_config(args) -> RunConfig:
    if args.config:
        with open(args.config) as fh:
            cfg = parse_config(fh.read())
    else:
        cfg = RunConfig().validate()
    overrides = {key: getattr(args, key)
                 for key in ("L", "N", "U", "h", "tmax", "dt", "barrier", "out", "format")}
    return apply_overrides(cfg, overrides)


def _check_format(cfg: RunConfig, command: str) -> None:
    wanted = cfg.format or _DEFAULT_FORMAT[command]
    if wanted != _DEFAULT_FORMAT[command]:
        raise ValidationError(
            f"subcommand '{command}' writes {_DEFAULT_FORMAT[command]}, not {wanted}"
        )


def _workers() -> int:
    try:
        return max(1, int(os.environ.get("THREADS", "1")))
    except ValueError:
        return 1


def _cmd_quench(cfg: RunConfig, out: str) -> None:
    spec = protocol.QuenchSpec(L=cfg.L, N=cfg.N, U=cfg.U, J=cfg.J, h=cfg.h,
                               barrier=cfg.barrier_value(),
                               times=protocol.default_times(cfg.tmax, cfg.dt))
    print(f"quench: L={cfg.L} N={cfg.N} U={cfg.U} barrier={cfg.barrier}",
          file=sys.stderr)
    io.write_trajectory_json(protocol.run_quench(spec), out)


def _cmd_coherent(cfg: RunConfig, out: str) -> None:
    spec = protocol.QuenchSpec(L=cfg.L, N=cfg.N, U=cfg.U, J=cfg.J, h=cfg.h,
                               barrier=cfg.barrier_value(),
                               times=protocol.default_times(cfg.tmax, cfg.dt))
    cspec = protocol.CoherentSpec(mean_occupations=cfg.coherent_occupations(),
                                  weight_tol=cfg.weight_tol, n_max=cfg.N_max)
    print(f"coherent quench: means={cspec.mean_occupations} barrier={cfg.barrier}",
          file=sys.stderr)
    traj = protocol.run_coherent_quench(spec, cspec, workers=_workers())
    io.write_trajectory_json(traj, out)


def _sweep_grid(cfg: RunConfig) -> analysis.SweepGrid:
    u_grid = analysis.default_u_grid(cfg.U_min, cfg.U_max, cfg.dU)
    t_grid = protocol.default_times(cfg.tmax, cfg.sweep_dt)
    return analysis.sweep_interaction(cfg.L, cfg.N, cfg.J, cfg.h, u_grid, t_grid,
                                      workers=_workers())


def _cmd_sweep(cfg: RunConfig, out: str) -> None:
    io.write_sweep_csv(_sweep_grid(cfg), out)


def _cmd_windows(cfg: RunConfig, out: str) -> None:
    grid = _sweep_grid(cfg)
    windows = analysis.find_directional_windows(grid, cfg.threshold)
    io.write_windows_json(windows, cfg.threshold, out)


def _cmd_overlap(cfg: RunConfig, out: str) -> None:
    psi0 = protocol.prepare_initial_state(cfg.L, cfg.N, cfg.J, cfg.U, cfg.h)
    basis = psi0.basis if psi0.basis is not None else enumerate_sector(cfg.L, cfg.N)
    barrier = protocol.resolve_barrier(cfg.barrier_value(), cfg.L, cfg.h)
    spec = eigh_dense(build_hamiltonian(basis, ModelParams(cfg.J, cfg.U, barrier)))
    report = analysis.overlap_analysis(psi0, spec, top_k=cfg.top_k,
                                       report_threshold=cfg.report_threshold)
    io.write_overlap_json(report, out)


_COMMANDS = {
    "quench": _cmd_quench,
    "coherent": _cmd_coherent,
    "sweep": _cmd_sweep,
    "overlap": _cmd_overlap,
    "windows": _cmd_windows,
}


def cli_main(argv) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 1 if exc.code not in (0, None) else 0
    try:
        cfg = _load_config(args)
        _check_format(cfg, args.command)
        out = cfg.out or _DEFAULT_OUT[args.command]
        _COMMANDS[args.command](cfg, out)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # solver failures, I/O errors
        print(f"runtime error: {exc}", file=sys.stderr)
        return 2
    print(f"wrote {out}", file=sys.stderr)
    return 0


def main() -> None:
    sys.exit(cli_main(sys.argv[1:]))
