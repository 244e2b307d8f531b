"""Strict readers for the simulator's result files.

Any deviation from the documented schemas is a hard SchemaError; nothing is
coerced silently.
"""

from __future__ import annotations

import json

import numpy as np


class SchemaError(ValueError):
    """Input file does not match the documented CSV/JSON schema."""


def read_sweep_csv(path):
    """Sweep grid from 'U,t,dn' CSV; returns (U, t, dn) with dn shaped (|U|, |t|)."""
    with open(path) as fh:
        header = fh.readline().rstrip("\n")
        if header != "U,t,dn":
            raise SchemaError(f"{path}: expected header 'U,t,dn', got '{header}'")
        triples = []
        for lineno, line in enumerate(fh, start=2):
            if not line.strip():
                continue
            parts = line.strip().split(",")
            if len(parts) != 3:
                raise SchemaError(f"{path}:{lineno}: expected 3 columns")
            try:
                triples.append(tuple(float(x) for x in parts))
            except ValueError:
                raise SchemaError(f"{path}:{lineno}: non-numeric row") from None
    if not triples:
        raise SchemaError(f"{path}: empty grid, nothing to draw")
    us = sorted({r[0] for r in triples})
    ts = sorted({r[1] for r in triples})
    if len(triples) != len(us) * len(ts):
        raise SchemaError(f"{path}: rows do not form a complete (U, t) grid")
    dn = np.full((len(us), len(ts)), np.nan)
    ui = {u: i for i, u in enumerate(us)}
    ti = {t: i for i, t in enumerate(ts)}
    for u, t, v in triples:
        dn[ui[u], ti[t]] = v
    if np.isnan(dn).any():
        raise SchemaError(f"{path}: duplicate or missing (U, t) cells")
    return np.array(us), np.array(ts), dn


_TRAJ_KEYS = {"times", "site_density", "n_after", "norm", "energy"}


def read_trajectory(path) -> dict:
    """Trajectory JSON with times / site_density / n_after / norm / energy."""
    with open(path) as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"{path}: not valid JSON ({exc})") from None
    missing = _TRAJ_KEYS - set(doc)
    if missing:
        raise SchemaError(f"{path}: missing keys {sorted(missing)}")
    n = len(doc["times"])
    if n == 0:
        raise SchemaError(f"{path}: empty time grid")
    for key in ("site_density", "n_after", "norm", "energy"):
        if len(doc[key]) != n:
            raise SchemaError(f"{path}: '{key}' length differs from 'times'")
    widths = {len(row) for row in doc["site_density"]}
    if len(widths) != 1:
        raise SchemaError(f"{path}: ragged site_density rows")
    return doc


def read_overlap(path) -> list[dict]:
    """Overlap JSON; returns the entry list sorted by eigen_index."""
    with open(path) as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"{path}: not valid JSON ({exc})") from None
    if "entries" not in doc or not isinstance(doc["entries"], list):
        raise SchemaError(f"{path}: missing 'entries' list")
    entries = doc["entries"]
    if not entries:
        raise SchemaError(f"{path}: no eigenstate entries")
    for e in entries:
        if not {"eigen_index", "energy", "overlap", "fock_top"} <= set(e):
            raise SchemaError(f"{path}: entry missing required keys")
        for c in e["fock_top"]:
            if not {"occupation", "basis_index", "weight"} <= set(c):
                raise SchemaError(f"{path}: fock_top entry missing required keys")
    return sorted(entries, key=lambda e: e["eigen_index"])
