import json
import subprocess
import sys

import numpy as np
import pytest

from otreg import MonotoneMap, dataset_from_dict, map_eval
from otreg.cli import main

SCENARIO = {
    "domain": [0.0, 1.0],
    "design": {"kind": "dirac", "density": "uniform"},
    "true_map": {"family": "power", "gamma": 2.0},
    "noise": {"family": "gaussian_shift", "sigma": 0.3},
    "N": 40,
    "seed": 11,
}

RATE = {
    "domain": [0.0, 1.0],
    "noise": {"family": "gaussian_shift", "sigma": 0.3},
    "N": [16, 32, 64],
    "replicates": 4,
    "seed": 5,
    "weighting": "empirical",
}


def write_json(path, obj):
    path.write_text(json.dumps(obj), encoding="utf-8")
    return str(path)


class TestSimulate:
    def test_writes_dataset(self, tmp_path, capsys):
        cfg = write_json(tmp_path / "scenario.json", SCENARIO)
        out = str(tmp_path / "data.json")
        assert main(["simulate", "--config", cfg, "--out", out]) == 0
        assert "40 pairs" in capsys.readouterr().out
        data = dataset_from_dict(json.loads((tmp_path / "data.json").read_text()))
        assert len(data) == 40

    def test_seed_override(self, tmp_path):
        cfg = write_json(tmp_path / "scenario.json", SCENARIO)
        a, b, c = (str(tmp_path / name) for name in ("a.json", "b.json", "c.json"))
        main(["simulate", "--config", cfg, "--out", a, "--seed", "99"])
        main(["simulate", "--config", cfg, "--out", b, "--seed", "99"])
        main(["simulate", "--config", cfg, "--out", c])
        assert (tmp_path / "a.json").read_text() == (tmp_path / "b.json").read_text()
        assert (tmp_path / "a.json").read_text() != (tmp_path / "c.json").read_text()

    def test_bad_config_fails(self, tmp_path, capsys):
        cfg = write_json(tmp_path / "scenario.json", {"N": 10, "unknown_field": 1})
        out = str(tmp_path / "data.json")
        assert main(["simulate", "--config", cfg, "--out", out]) == 1
        assert capsys.readouterr().err.startswith("error:")

    def test_missing_file_fails(self, tmp_path, capsys):
        missing = str(tmp_path / "nope.json")
        assert main(["simulate", "--config", missing, "--out", missing]) == 1
        assert "error:" in capsys.readouterr().err


class TestFit:
    def test_fit_roundtrip(self, tmp_path):
        data = {
            "domain": [0.0, 1.0],
            "pairs": [{"x": 0.1, "y": 0.9}, {"x": 0.9, "y": 0.1}],
        }
        inp = write_json(tmp_path / "data.json", data)
        out = str(tmp_path / "map.json")
        assert main(["fit", "--input", inp, "--output", out]) == 0
        t = MonotoneMap.from_dict(json.loads((tmp_path / "map.json").read_text()))
        assert map_eval(t, 0.1) == 0.5
        assert map_eval(t, 0.9) == 0.5

    def test_no_clamp_keeps_raw_values(self, tmp_path):
        data = {
            "domain": [0.0, 1.0],
            "pairs": [{"x": 0.2, "y": -1.0}, {"x": 0.8, "y": 2.0}],
        }
        inp = write_json(tmp_path / "data.json", data)
        raw_path = str(tmp_path / "raw.json")
        clip_path = str(tmp_path / "clip.json")
        main(["fit", "--input", inp, "--output", raw_path, "--no-clamp"])
        main(["fit", "--input", inp, "--output", clip_path])
        raw = MonotoneMap.from_dict(json.loads((tmp_path / "raw.json").read_text()))
        clip = MonotoneMap.from_dict(json.loads((tmp_path / "clip.json").read_text()))
        np.testing.assert_array_equal(raw.ts, [-1.0, 2.0])
        np.testing.assert_array_equal(clip.ts, [0.0, 1.0])


class TestRate:
    def test_writes_csv_and_plot(self, tmp_path, capsys):
        cfg = write_json(tmp_path / "rate.json", RATE)
        out = str(tmp_path / "rates.csv")
        plot = str(tmp_path / "rates.svg")
        assert main(["rate", "--config", cfg, "--out", out, "--plot", plot]) == 0
        assert "slope" in capsys.readouterr().out
        text = (tmp_path / "rates.csv").read_text()
        assert text.startswith("N,R,mean_sq_risk,stderr\n")
        assert text.count("\n") == 8
        svg = (tmp_path / "rates.svg").read_bytes()
        assert len(svg) > 1000 and b"<svg" in svg

    def test_worker_count_reproducible(self, tmp_path):
        cfg = write_json(tmp_path / "rate.json", RATE)
        outs = []
        for workers, name in ((1, "w1.csv"), (2, "w2.csv"), (4, "w4.csv")):
            out = str(tmp_path / name)
            assert main(["rate", "--config", cfg, "--out", out, "--workers", str(workers)]) == 0
            outs.append((tmp_path / name).read_bytes())
        assert outs[0] == outs[1] == outs[2]

    def test_degenerate_footer(self, tmp_path):
        cfg_obj = dict(RATE, noise={"family": "gaussian_shift", "sigma": 0.0})
        cfg = write_json(tmp_path / "rate.json", cfg_obj)
        out = str(tmp_path / "rates.csv")
        assert main(["rate", "--config", cfg, "--out", out]) == 0
        text = (tmp_path / "rates.csv").read_text()
        assert "slope,nan" in text
        assert "degenerate,true" in text


class TestPacking:
    def test_writes_family(self, tmp_path, capsys):
        out = str(tmp_path / "family.json")
        code = main(
            ["packing", "--k", "16", "--h", "0.0625", "--seed", "7", "--out", out,
             "--max-size", "8"]
        )
        assert code == 0
        assert "maps" in capsys.readouterr().out
        obj = json.loads((tmp_path / "family.json").read_text())
        assert obj["summary"]["size"] == len(obj["maps"]) == 8
        assert obj["summary"]["min_hamming"] >= 4

    def test_oversized_step_fails(self, tmp_path, capsys):
        out = str(tmp_path / "family.json")
        assert main(["packing", "--k", "4", "--h", "0.5", "--seed", "0", "--out", out]) == 1
        assert "error:" in capsys.readouterr().err


class TestFano:
    def test_prints_value(self, capsys):
        code = main(
            ["fano", "--delta", "1", "--epsilon", "1", "--K", "1", "--c", "1"]
        )
        assert code == 0
        assert capsys.readouterr().out.strip() == "-0.8465735902799727"

    def test_kl_multiplier(self, capsys):
        code = main(
            ["fano", "--delta", "0.1", "--epsilon", "0.1", "--K", "1", "--c", "30",
             "--kl-multiplier", "1.0"]
        )
        assert code == 0
        assert capsys.readouterr().out.strip() == "0.048216142136573346"

    def test_rejects_nonpositive(self, capsys):
        code = main(["fano", "--delta", "0", "--epsilon", "1", "--K", "1", "--c", "1"])
        assert code == 1
        assert "error:" in capsys.readouterr().err


def test_unknown_command_exits_via_argparse():
    with pytest.raises(SystemExit):
        main(["frobnicate"])


def test_module_entry_point(tmp_path):
    cfg = tmp_path / "rate.json"
    cfg.write_text(json.dumps(dict(RATE, N=[8, 16], replicates=2)), encoding="utf-8")
    out = tmp_path / "rates.csv"
    proc = subprocess.run(
        [sys.executable, "-m", "otreg", "rate", "--config", str(cfg), "--out", str(out)],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0, proc.stderr
    assert out.exists()
