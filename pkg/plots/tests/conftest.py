"""Hand-written sample files in the documented schemas (no simulator import)."""

import json

import pytest


@pytest.fixture
def sweep_csv(tmp_path):
    path = tmp_path / "dn.csv"
    lines = ["U,t,dn"]
    for i, u in enumerate((0.0, 0.5, 1.0)):
        for j, t in enumerate((0.0, 1.0)):
            lines.append(f"{u},{t},{(i - 1) * (j + 1) * 0.2}")
    path.write_text("\n".join(lines) + "\n")
    return path


@pytest.fixture
def trajectory_json(tmp_path):
    def make(name="traj.json", n=4, L=6, scale=1.0):
        doc = {
            "times": [0.5 * k for k in range(n)],
            "site_density": [[2.0, 2.0, 0.0, 0.0, 0.0, 0.0][:L] for _ in range(n)],
            "n_after": [scale * 0.1 * k for k in range(n)],
            "norm": [1.0] * n,
            "energy": [2.84] * n,
            "discarded_weight": 0.0,
        }
        path = tmp_path / name
        path.write_text(json.dumps(doc))
        return path

    return make


@pytest.fixture
def overlap_json(tmp_path):
    doc = {
        "entries": [
            {"eigen_index": 0, "energy": -0.3, "overlap": 0.02, "degenerate": False,
             "fock_top": []},
            {"eigen_index": 1, "energy": 0.4, "overlap": 0.89, "degenerate": False,
             "fock_top": [{"occupation": "220000", "basis_index": 6,
                           "weight": 0.476}]},
            {"eigen_index": 2, "energy": 1.1, "overlap": 0.09, "degenerate": False,
             "fock_top": [{"occupation": "130000", "basis_index": 21,
                           "weight": 0.3}]},
        ],
        "degenerate_groups": [],
    }
    path = tmp_path / "overlap.json"
    path.write_text(json.dumps(doc))
    return path
