"""Figure builders: imbalance heatmap, trajectory overlay, overlap stems.

Inputs are read-only; builders return the matplotlib Figure (so tests can
inspect the color normalization) and ``render`` saves it to the requested
path.  The heatmap uses a diverging map centered at zero: red marks
vertical-favored transport, blue angled-favored.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np
from matplotlib.colors import TwoSlopeNorm

from .readers import SchemaError, read_overlap, read_sweep_csv, read_trajectory

KINDS = ("heatmap", "trajectory", "overlap")


@dataclass
class FigureSpec:
    inputs: list[str]
    kind: str
    out: str
    no_date: bool = False
    labels: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise SchemaError(f"unknown figure kind '{self.kind}'")
        if not self.inputs:
            raise SchemaError("at least one input file is required")


def build_heatmap(U, t, dn, labels=None):
    labels = labels or {}
    amp = float(np.abs(dn).max())
    if amp == 0.0:
        amp = 1e-12  # all-zero grid still renders, centered at zero
    norm = TwoSlopeNorm(vmin=-amp, vcenter=0.0, vmax=amp)
    fig, ax = plt.subplots(figsize=(6.0, 4.2), constrained_layout=True)
    mesh = ax.pcolormesh(U, t, dn.T, cmap="RdBu_r", norm=norm, shading="nearest")
    ax.set_xlabel(labels.get("x", "U/J"))
    ax.set_ylabel(labels.get("y", "tJ"))
    cbar = fig.colorbar(mesh, ax=ax)
    cbar.set_label(labels.get("c", "Δn"))
    return fig


def build_trajectory(docs, labels=None):
    labels = labels or {}
    fig, ax = plt.subplots(figsize=(6.0, 4.2), constrained_layout=True)
    for name, doc in docs:
        ax.plot(doc["times"], doc["n_after"], label=name, linewidth=1.2)
    ax.set_xlabel(labels.get("x", "tJ"))
    ax.set_ylabel(labels.get("y", "n_after"))
    ax.set_ylim(bottom=0.0)
    if len(docs) > 1:
        ax.legend(frameon=False)
    return fig


def build_overlap(entries, labels=None, annotate_top: int = 3):
    labels = labels or {}
    idx = np.array([e["eigen_index"] for e in entries])
    ov = np.array([e["overlap"] for e in entries])
    fig, ax = plt.subplots(figsize=(6.0, 4.2), constrained_layout=True)
    markerline, stemlines, _ = ax.stem(idx, ov)
    plt.setp(markerline, markersize=3.5)
    plt.setp(stemlines, linewidth=1.0)
    ax.set_xlabel(labels.get("x", "eigenstate index"))
    ax.set_ylabel(labels.get("y", "overlap"))
    ax.set_ylim(0.0, max(1.0, float(ov.max()) * 1.05))
    for e in sorted(entries, key=lambda e: -e["overlap"])[:annotate_top]:
        if e["fock_top"]:
            top = e["fock_top"][0]
            ax.annotate(f"|{top['occupation']}⟩ {top['weight']:.3f}",
                        (e["eigen_index"], e["overlap"]),
                        textcoords="offset points", xytext=(4, 4), fontsize=8)
    return fig


def build_figure(spec: FigureSpec):
    if spec.kind == "heatmap":
        if len(spec.inputs) != 1:
            raise SchemaError("heatmap takes exactly one CSV input")
        U, t, dn = read_sweep_csv(spec.inputs[0])
        return build_heatmap(U, t, dn, spec.labels)
    if spec.kind == "trajectory":
        docs = [(Path(p).stem, read_trajectory(p)) for p in spec.inputs]
        return build_trajectory(docs, spec.labels)
    if len(spec.inputs) != 1:
        raise SchemaError("overlap takes exactly one JSON input")
    return build_overlap(read_overlap(spec.inputs[0]), spec.labels)


def render(spec: FigureSpec) -> str:
    """Build and save the figure; returns the output path."""
    fig = build_figure(spec)
    try:
        if spec.out.endswith(".svg") and spec.no_date:
            # pin the element-id hash salt as well, or re-renders differ
            with matplotlib.rc_context({"svg.hashsalt": "quenchplots"}):
                fig.savefig(spec.out, dpi=160, metadata={"Date": None})
        else:
            fig.savefig(spec.out, dpi=160)
    finally:
        plt.close(fig)
    return spec.out
