# -*- coding: utf-8 -*-
import csv

from scripts.table_runner import all_settings, default_procedures, main


def test_settings_and_procedures():
    assert len(all_settings()) == 15
    labels = [p.label for p in default_procedures()]
    assert labels == ["ERM x BM", "ERM x VF5", "Loo x BM", "Loo x VF5", "Lpo20 x VF5", "PML"]


def test_table_runner_writes_one_row_per_setting_and_procedure(tmp_path):
    out = tmp_path / "table.csv"
    assert main(["--out", str(out), "--settings", "s1:c,s3:pc1", "--n", "30", "--N", "2",
                 "--workers", "1", "--oracle"]) == 0
    with out.open(newline="") as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 2 * 7
    assert [r["setting"] for r in rows[::7]] == ["s1:c", "s3:pc1"]
    assert all(float(r["value"]) >= 1.0 - 1e-9 for r in rows)


def test_table_runner_rejects_unknown_settings(tmp_path):
    assert main(["--out", str(tmp_path / "t.csv"), "--settings", "s5:c", "--N", "2"]) == 2
