import json

import numpy as np
import pytest

from quenchplots import (SchemaError, read_overlap, read_sweep_csv,
                         read_trajectory)


class TestSweepReader:
    def test_reads_grid(self, sweep_csv):
        U, t, dn = read_sweep_csv(sweep_csv)
        assert U.tolist() == [0.0, 0.5, 1.0]
        assert t.tolist() == [0.0, 1.0]
        assert dn.shape == (3, 2)
        assert dn[0, 1] == pytest.approx(-0.4)

    def test_rejects_bad_header(self, tmp_path):
        path = tmp_path / "x.csv"
        path.write_text("U,time,dn\n0,0,0\n")
        with pytest.raises(SchemaError, match="header"):
            read_sweep_csv(path)

    def test_rejects_empty_grid(self, tmp_path):
        path = tmp_path / "x.csv"
        path.write_text("U,t,dn\n")
        with pytest.raises(SchemaError, match="empty"):
            read_sweep_csv(path)

    def test_rejects_incomplete_grid(self, tmp_path):
        path = tmp_path / "x.csv"
        path.write_text("U,t,dn\n0,0,1\n0,1,1\n1,0,1\n")
        with pytest.raises(SchemaError, match="complete"):
            read_sweep_csv(path)

    def test_rejects_non_numeric(self, tmp_path):
        path = tmp_path / "x.csv"
        path.write_text("U,t,dn\n0,0,oops\n")
        with pytest.raises(SchemaError, match="non-numeric"):
            read_sweep_csv(path)


class TestTrajectoryReader:
    def test_reads(self, trajectory_json):
        doc = read_trajectory(trajectory_json())
        assert len(doc["times"]) == 4

    def test_missing_key(self, tmp_path):
        path = tmp_path / "t.json"
        path.write_text(json.dumps({"times": [0.0]}))
        with pytest.raises(SchemaError, match="missing keys"):
            read_trajectory(path)

    def test_length_mismatch(self, tmp_path):
        path = tmp_path / "t.json"
        path.write_text(json.dumps({
            "times": [0.0, 1.0], "site_density": [[1.0]], "n_after": [0.0, 0.0],
            "norm": [1.0, 1.0], "energy": [0.0, 0.0]}))
        with pytest.raises(SchemaError, match="length"):
            read_trajectory(path)

    def test_not_json(self, tmp_path):
        path = tmp_path / "t.json"
        path.write_text("not json at all")
        with pytest.raises(SchemaError, match="not valid JSON"):
            read_trajectory(path)


class TestOverlapReader:
    def test_reads_sorted(self, overlap_json):
        entries = read_overlap(overlap_json)
        assert [e["eigen_index"] for e in entries] == [0, 1, 2]

    def test_missing_entries(self, tmp_path):
        path = tmp_path / "o.json"
        path.write_text(json.dumps({"nothing": []}))
        with pytest.raises(SchemaError, match="entries"):
            read_overlap(path)

    def test_entry_missing_keys(self, tmp_path):
        path = tmp_path / "o.json"
        path.write_text(json.dumps({"entries": [{"eigen_index": 0}]}))
        with pytest.raises(SchemaError, match="required keys"):
            read_overlap(path)
