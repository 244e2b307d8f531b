#!/usr/bin/env python3
"""Run the full experiment set and write every artifact into one directory.

Produces the population-imbalance heatmap data, the Fock- and coherent-state
trajectory pairs at the optimal interaction, the eigenstate-overlap reports
for both barrier orientations, and the directional-window scans of the
eight-site chain.  ``--fast`` shrinks grids for a quick end-to-end check.
"""

import argparse
import sys
import time
from pathlib import Path

import numpy as np

import bhquench as bq
from bhquench import io


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--outdir", default="results", help="output directory")
    ap.add_argument("--fast", action="store_true",
                    help="coarse grids, skip the coherent and L=8 runs")
    ap.add_argument("--threads", type=int, default=1)
    args = ap.parse_args()

    out = Path(args.outdir)
    out.mkdir(parents=True, exist_ok=True)
    L, N, U, h = 6, 4, 1.42, 10.0
    dt = 0.25 if args.fast else 0.05
    sweep_dt = 1.0 if args.fast else 0.25
    du = 0.1 if args.fast else 0.02
    times = bq.default_times(50.0, dt)

    def stamp(msg):
        print(f"[{time.strftime('%H:%M:%S')}] {msg}", file=sys.stderr)

    stamp("Fock-state quench trajectories")
    for barrier in ("vertical", "angled"):
        traj = bq.run_quench(bq.QuenchSpec(L=L, N=N, U=U, h=h, barrier=barrier,
                                           times=times))
        io.write_trajectory_json(traj, out / f"trajectory_{barrier}.json")

    stamp("overlap reports")
    psi0 = bq.prepare_initial_state(L, N, 1.0, U, h)
    basis = psi0.basis
    for barrier, pot in (("vertical", bq.potential_vertical(L, h)),
                         ("angled", bq.potential_angled(L, h))):
        spec = bq.eigh_dense(bq.build_hamiltonian(basis,
                                                  bq.ModelParams(1.0, U, pot)))
        report = bq.overlap_analysis(psi0, spec)
        io.write_overlap_json(report, out / f"overlap_{barrier}.json")

    stamp("interaction sweep")
    u_grid = np.arange(0.0, 3.0 + du / 2, du)
    grid = bq.sweep_interaction(L, N, 1.0, h, u_grid,
                                bq.default_times(50.0, sweep_dt),
                                workers=args.threads)
    io.write_sweep_csv(grid, out / "imbalance_sweep.csv")

    if not args.fast:
        stamp("coherent-state trajectories (takes a few minutes)")
        cspec = bq.CoherentSpec(mean_occupations=(2.0, 2.0, 0, 0, 0, 0))
        for barrier in ("vertical", "angled"):
            traj = bq.run_coherent_quench(
                bq.QuenchSpec(L=L, N=N, U=U, h=h, barrier=barrier, times=times),
                cspec, workers=args.threads)
            io.write_trajectory_json(traj, out / f"trajectory_coherent_{barrier}.json")

        stamp("eight-site directional windows")
        u8 = np.arange(0.0, 5.0 + du / 2, du)
        t8 = bq.default_times(100.0, sweep_dt)
        for n8 in (3, 4):
            g8 = bq.sweep_interaction(8, n8, 1.0, h, u8, t8, workers=args.threads)
            io.write_sweep_csv(g8, out / f"imbalance_sweep_L8_N{n8}.csv")
            windows = bq.find_directional_windows(g8, 0.5)
            io.write_windows_json(windows, 0.5, out / f"windows_L8_N{n8}.json")

    stamp(f"done; artifacts in {out}/")
    return 0


if __name__ == "__main__":
    sys.exit(main())
