# -*- coding: utf-8 -*-
import csv

import numpy as np
import pytest
from numpy.testing import assert_allclose

import paths
from controllers.run_config import RunConfig
from main import main, parse_args
from services.csvio import read_sample_csv, read_segmentation_csv
from services.errors import EXIT_INFEASIBLE, EXIT_INPUT, EXIT_OK
from services.segmentation import fit_regressogram


def _write_sample(path, y):
    n = len(y)
    with path.open("w", newline="") as fh:
        fh.write("t,y\n")
        for i, v in enumerate(y, 1):
            fh.write(f"{i / n!r},{float(v)!r}\n")
    return path


def _rows(path):
    with path.open(newline="") as fh:
        return list(csv.DictReader(fh))


def test_segment_noiseless_two_levels(tmp_path):
    src = _write_sample(tmp_path / "two.csv", [0.0] * 10 + [1.0] * 10)
    out = tmp_path / "res" / "two_seg.csv"
    assert main(["segment", "--input", str(src), "--out", str(out), "--quiet"]) == EXIT_OK
    rows = _rows(out)
    assert [r["D_hat"] for r in rows] == ["2", "2"]
    assert [r["first"] for r in rows] == ["1", "11"]
    assert_allclose([float(r["mean"]) for r in rows], [0.0, 1.0])
    curves = _rows(tmp_path / "res" / "two_seg_curves.csv")
    assert {r["criterion"] for r in curves} == {"crit1:Loo", "crit2:VF5"}
    assert [r["breakpoints"] for r in curves if r["D"] == "2"] == ["11", "11"]


def test_segment_output_round_trips(tmp_path, rng):
    y = np.r_[rng.normal(0.0, 0.2, 30), rng.normal(2.0, 0.05, 30)]
    src = _write_sample(tmp_path / "in.csv", y)
    out = tmp_path / "seg.csv"
    assert main(["segment", "--input", str(src), "--out", str(out), "--crit1", "lpo:3",
                 "--crit2", "bm:thresh", "--quiet"]) == EXIT_OK
    sample = read_sample_csv(src)
    seg = read_segmentation_csv(out, sample.n)
    assert_allclose(fit_regressogram(sample, seg).levels, [float(r["mean"]) for r in _rows(out)])


def test_segment_constant_signal(tmp_path):
    src = _write_sample(tmp_path / "flat.csv", [2.5] * 16)
    out = tmp_path / "flat_seg.csv"
    assert main(["segment", "--input", str(src), "--out", str(out), "--quiet"]) == EXIT_OK
    rows = _rows(out)
    assert len(rows) == 1 and rows[0]["D_hat"] == "1"


def test_segment_malformed_csv_reports_line(tmp_path, capsys):
    src = tmp_path / "bad.csv"
    src.write_text("t,y\n0.1,1.0\n0.2,abc\n")
    assert main(["segment", "--input", str(src), "--out", str(tmp_path / "o.csv")]) == EXIT_INPUT
    err = capsys.readouterr().err
    assert "[SEG][ERROR]" in err and "line 3" in err


@pytest.mark.parametrize("text", ["x,y\n0.1,1\n0.2,2\n", "t,y\n0.2,1\n0.1,2\n", "t,y\n0.5,1,2\n"])
def test_segment_rejects_bad_files(tmp_path, text):
    src = tmp_path / "bad.csv"
    src.write_text(text)
    assert main(["segment", "--input", str(src), "--out", str(tmp_path / "o.csv"), "--quiet"]) == EXIT_INPUT


def test_segment_infeasible_dmax(tmp_path):
    src = _write_sample(tmp_path / "in.csv", np.arange(20.0))
    code = main(["segment", "--input", str(src), "--dmax", "50", "--out", str(tmp_path / "o.csv"), "--quiet"])
    assert code == EXIT_INFEASIBLE


def test_segment_rejects_simulation_only_criteria(tmp_path):
    src = _write_sample(tmp_path / "in.csv", np.arange(20.0))
    for crit in (["--crit1", "ideal"], ["--crit2", "ideal"], ["--crit2", "vf:zz"], ["--crit1", "erm,loo"]):
        code = main(["segment", "--input", str(src), "--out", str(tmp_path / "o.csv"), "--quiet"] + crit)
        assert code == EXIT_INPUT, crit


def test_simulate_is_reproducible(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for out in (a, b):
        assert main(["simulate", "--setting", "s1:pc2", "--seed", "3", "--out", str(out), "--quiet"]) == EXIT_OK
    assert a.read_bytes() == b.read_bytes()
    assert read_sample_csv(a).n == 100
    truth = _rows(tmp_path / "a_truth.csv")
    assert len(truth) == 100 and set(truth[0]) == {"t", "s", "sigma"}


def test_bench_is_reproducible_and_reports_the_oracle(tmp_path):
    outs = [tmp_path / "b1.csv", tmp_path / "b2.csv"]
    for out in outs:
        argv = ["bench", "--framework", "a", "--n", "49", "--N", "3", "--seed", "7",
                "--crit1", "lpo:1,erm", "--crit2", "vf:5", "--oracle", "--out", str(out), "--quiet"]
        assert main(argv) == EXIT_OK
    assert outs[0].read_bytes() == outs[1].read_bytes()
    rows = _rows(outs[0])
    assert [r["procedure"] for r in rows] == ["Loo x VF5", "ERM x VF5", "oracle"]
    assert float(rows[-1]["value"]) == 1.0
    assert all(r["index_kind"] == "CorRand" for r in rows)


def test_bench_needs_one_setting(tmp_path):
    assert main(["bench", "--N", "3", "--out", str(tmp_path / "o.csv"), "--quiet"]) == EXIT_INPUT
    assert main(["bench", "--setting", "s9:c", "--N", "3", "--out", str(tmp_path / "o.csv"),
                 "--quiet"]) == EXIT_INPUT


def test_riskcurve_writes_curves(tmp_path):
    out = tmp_path / "curves.csv"
    argv = ["riskcurve", "--setting", "s2:pc3", "--n", "40", "--N", "3", "--dmax", "8",
            "--crit1", "erm,lpo:1", "--crit2", "ideal", "--out", str(out), "--quiet"]
    assert main(argv) == EXIT_OK
    rows = _rows(out)
    assert list(rows[0]) == ["procedure", "curve", "D", "mean", "stderr"]
    assert {r["procedure"] for r in rows} == {"oracle", "ERM x Id", "Loo x Id"}
    assert all(float(r["mean"]) >= 0.0 for r in rows if r["curve"] == "loss")


def test_config_round_trips_through_the_parser():
    cfg = RunConfig(command="bench", setting="s3:s", n=60, N=20, crit1="erm,lpo:5",
                    crit2="bm:jump", d_max=12, overpen=1.5, seed=9, out="x.csv",
                    oracle=True, quiet=True, workers=2)
    assert parse_args(cfg.build_args()) == cfg
    assert parse_args(RunConfig().build_args()) == RunConfig()


def test_parser_errors_exit_with_input_status():
    with pytest.raises(SystemExit) as exc:
        parse_args(["segment", "--n", "many"])
    assert exc.value.code == EXIT_INPUT


def test_output_location_and_worker_knobs(tmp_path, monkeypatch):
    monkeypatch.setenv("HETSEG_HOME", str(tmp_path))
    assert paths.out_path("r.csv") == tmp_path / "out" / "r.csv"
    assert paths.out_path(str(tmp_path / "sub" / "r.csv")) == tmp_path / "sub" / "r.csv"
    monkeypatch.setenv("HETSEG_THREADS", "4")
    assert paths.worker_count() == 4
    logged = []
    monkeypatch.setenv("HETSEG_THREADS", "zero")
    assert paths.worker_count(logged.append) == 1
    assert logged and logged[0].startswith("[CLI][WARN]")


def test_segment_warns_when_threshold_calibration_falls_back(tmp_path, capsys, rng):
    src = _write_sample(tmp_path / "noise.csv", rng.standard_normal(12))
    out = tmp_path / "noise_seg.csv"
    assert main(["segment", "--input", str(src), "--out", str(out),
                 "--crit1", "erm", "--crit2", "bm"]) == EXIT_OK
    err = capsys.readouterr().err
    assert "[SEG][WARN] slope path starts at D=4 <= D_thresh=4" in err
