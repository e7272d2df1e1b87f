"""CLI plumbing: schemas, reproducibility, cache behavior, exit codes."""

import json
import os

import numpy as np
import pytest

from dunkl.cli import main


def data_section(path):
    """File content with comment-header lines stripped."""
    with open(path) as f:
        return "".join(line for line in f if not line.startswith("#"))


def json_data(path):
    with open(path) as f:
        return json.load(f)["data"]


class TestRates:
    def test_rates_json_invariants(self, tmp_path):
        out = str(tmp_path / "rates.json")
        rc = main(["rates", "--system", "A", "--n", "3", "--beta", "8",
                   "--samples", "50000", "--seed", "7", "--out", out])
        assert rc == 0
        d = json_data(out)
        lams = [e["lambda"] for e in d["entries"]]
        assert all(l > 0 for l in lams)
        assert d["total"] == sum(lams)
        assert d["total_closed_form"] == pytest.approx(8 * 3 / (4 * 7))
        assert d["system"] == "A" and d["N"] == 3

    def test_reproducible_data_sections(self, tmp_path):
        a, b = str(tmp_path / "a.json"), str(tmp_path / "b.json")
        args = ["rates", "--system", "B", "--n", "2", "--beta", "4",
                "--samples", "20000", "--seed", "3"]
        assert main(args + ["--out", a]) == 0
        assert main(args + ["--out", b]) == 0
        assert json_data(a) == json_data(b)

    def test_cache_hit_identical(self, tmp_path):
        cache = str(tmp_path / "cache")
        a, b = str(tmp_path / "a.json"), str(tmp_path / "b.json")
        args = ["rates", "--system", "A", "--n", "2", "--beta", "4",
                "--samples", "20000", "--seed", "5", "--cache-dir", cache]
        assert main(args + ["--out", a]) == 0
        assert os.listdir(cache)
        assert main(args + ["--out", b]) == 0
        assert json_data(a) == json_data(b)


class TestFreeze:
    def test_freeze_A4(self, tmp_path):
        out = str(tmp_path / "freeze.json")
        assert main(["freeze", "--system", "A", "--n", "4", "--seed", "1",
                     "--out", out]) == 0
        d = json_data(out)
        assert d["pf_spectrum"]["half_multiplicity"] == 3
        assert d["residual"] <= 1e-12
        assert d["verifications"]["exchange_dev"] <= 1e-12
        assert max(d["verifications"]["commutator_dev"]) <= 1e-10


class TestPhase:
    def test_closed_form_B(self, tmp_path):
        out = str(tmp_path / "phase.csv")
        assert main(["phase", "--system", "B", "--beta", "2", "--n-max", "20",
                     "--mode", "closed_form", "--seed", "1",
                     "--out", out]) == 0
        rows = [r.split(",") for r in
                data_section(out).strip().splitlines()[1:]]
        last = rows[-1]
        assert abs(float(last[2]) - 0.5) / 0.5 < 0.10
        assert float(last[3]) == 0.5


class TestRelax:
    def test_relax_csv_and_annotation(self, tmp_path):
        out = str(tmp_path / "relax.csv")
        assert main(["relax", "--system", "A", "--n", "2", "--beta", "4",
                     "--samples", "100000", "--replicas", "40000",
                     "--seed", "2", "--t-decades", "2", "--out", out]) == 0
        header = {}
        with open(out) as f:
            for line in f:
                if not line.startswith("#"):
                    break
                k, _, v = line[1:].partition(":")
                header[k.strip()] = v.strip()
        assert "fitted_exponent" in header
        assert -1.2 < float(header["fitted_exponent"]) < -0.3


class TestSimulate:
    def test_trajectory_schema(self, tmp_path):
        paths = str(tmp_path / "paths.csv")
        traj = str(tmp_path / "trajectory.csv")
        assert main(["simulate", "--system", "A", "--n", "5", "--beta", "8",
                     "--T", "0.2", "--dt", "0.001", "--seed", "4",
                     "--save-stride", "10",
                     "--out-paths", paths, "--out-trajectory", traj]) == 0
        lines = data_section(paths).strip().splitlines()
        assert lines[0] == "t,x_1,x_2,x_3,x_4,x_5"
        first = [float(v) for v in lines[1].split(",")]
        assert first[0] == 0.0
        tlines = data_section(traj).strip().splitlines()
        assert tlines[0] == "t,event_root_i,event_root_j,group_index"


class TestExitCodes:
    def test_missing_seed_is_config_error(self, tmp_path):
        out = str(tmp_path / "x.json")
        rc = main(["rates", "--system", "A", "--n", "2", "--beta", "4",
                   "--out", out])
        assert rc == 1

    def test_bad_config_file(self, tmp_path):
        cfg = tmp_path / "bad.json"
        cfg.write_text("not json")
        rc = main(["rates", "--config", str(cfg), "--seed", "1"])
        assert rc == 1

    def test_regime_exit(self, tmp_path):
        rc = main(["rates", "--system", "A", "--n", "2", "--beta", "1.0",
                   "--samples", "100", "--seed", "1",
                   "--out", str(tmp_path / "r.json")])
        assert rc == 2

    def test_numeric_exit(self, tmp_path):
        # a sub-2-decade window cannot support an exponent fit
        rc = main(["relax", "--system", "A", "--n", "2", "--beta", "4",
                   "--samples", "20000", "--replicas", "1000", "--seed", "1",
                   "--t-decades", "1", "--out", str(tmp_path / "r.csv")])
        assert rc == 3

    def test_config_file_with_overrides(self, tmp_path):
        cfg = tmp_path / "c.json"
        cfg.write_text(json.dumps(
            {"system": {"family": "A", "N": 2, "beta": 4.0},
             "sampling": {"nsamples": 10000}, "seed": 9}))
        out = str(tmp_path / "r.json")
        rc = main(["rates", "--config", str(cfg), "--n", "3", "--out", out])
        assert rc == 0
        assert json_data(out)["N"] == 3
