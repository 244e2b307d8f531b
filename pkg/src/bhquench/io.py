"""Result serialization: CSV for sweep grids, JSON for structured reports.

All reals are rendered at 12 significant digits, below solver tolerance and
stable under round-tripping, so identical runs produce byte-identical files.
"""

from __future__ import annotations

import json

import numpy as np

from .analysis import OverlapReport, SweepGrid
from .basis import occupation_label
from .errors import ValidationError
from .protocol import Trajectory


def _fmt(x: float) -> str:
    return f"{float(x):.12g}"


def _round12(x: float) -> float:
    return float(_fmt(x))


def _round_list(values) -> list:
    return [_round12(v) for v in values]


def write_sweep_csv(grid: SweepGrid, path) -> None:
    """Header 'U,t,dn' then one row per (U, t), U-major, trailing newline."""
    lines = ["U,t,dn"]
    for i, u in enumerate(grid.U_values):
        for j, t in enumerate(grid.t_values):
            lines.append(f"{_fmt(u)},{_fmt(t)},{_fmt(grid.dn[i, j])}")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def read_sweep_csv(path) -> SweepGrid:
    """Inverse of write_sweep_csv (used for round-trip checks)."""
    with open(path) as fh:
        header = fh.readline().strip()
        if header != "U,t,dn":
            raise ValidationError(f"unexpected sweep CSV header: '{header}'")
        rows = [line.strip().split(",") for line in fh if line.strip()]
    if not rows:
        raise ValidationError("sweep CSV has no data rows")
    us = sorted({float(r[0]) for r in rows})
    ts = sorted({float(r[1]) for r in rows})
    dn = np.full((len(us), len(ts)), np.nan)
    ui = {u: i for i, u in enumerate(us)}
    ti = {t: i for i, t in enumerate(ts)}
    for r in rows:
        dn[ui[float(r[0])], ti[float(r[1])]] = float(r[2])
    if np.isnan(dn).any():
        raise ValidationError("sweep CSV is not a complete (U, t) grid")
    return SweepGrid(U_values=np.array(us), t_values=np.array(ts), dn=dn)


def trajectory_document(traj: Trajectory) -> dict:
    return {
        "times": _round_list(traj.times),
        "site_density": [_round_list(row) for row in traj.site_density],
        "n_after": _round_list(traj.n_after),
        "norm": _round_list(traj.norm),
        "energy": _round_list(traj.energy),
        "discarded_weight": _round12(traj.discarded_weight),
    }


def write_trajectory_json(traj: Trajectory, path) -> None:
    with open(path, "w") as fh:
        json.dump(trajectory_document(traj), fh, indent=1)
        fh.write("\n")


def overlap_document(report: OverlapReport) -> dict:
    entries = []
    for e in report.entries:
        entries.append({
            "eigen_index": e.index,
            "energy": _round12(e.energy),
            "overlap": _round12(e.overlap),
            "degenerate": e.degenerate,
            "fock_top": [
                {
                    "occupation": occupation_label(c.occupation),
                    "basis_index": c.basis_index,
                    "weight": _round12(c.weight),
                }
                for c in e.fock_top
            ],
        })
    return {
        "entries": entries,
        "degenerate_groups": [
            {"indices": list(idx), "overlap": _round12(ov)}
            for idx, ov in report.degenerate_groups
        ],
    }


def write_overlap_json(report: OverlapReport, path) -> None:
    with open(path, "w") as fh:
        json.dump(overlap_document(report), fh, indent=1)
        fh.write("\n")


def write_windows_json(windows, threshold: float, path) -> None:
    doc = {
        "threshold": _round12(threshold),
        "windows": [
            {"U_lo": _round12(lo), "U_hi": _round12(hi), "sign": sign}
            for (lo, hi), sign in windows
        ],
    }
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=1)
        fh.write("\n")
