# -*- coding: utf-8 -*-
import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from services.benchmark import (ORACLE, check_risk_expectations, check_sigma_hat, index_kind,
                                ratio_index, risk_curves, run_benchmark)
from services.errors import DomainError
from services.segmentation import PiecewiseConstant, Segmentation
from services.select import Crit1Spec, Crit2Spec, ProcedureSpec
from services.simgen import FixedSetting, RandomFrameworkSpec, noise_level, regression_function

LOO_VF5 = ProcedureSpec(Crit1Spec("lpo", 1), Crit2Spec("vf", V=5))
ERM_BM = ProcedureSpec(Crit1Spec("erm"), Crit2Spec("bm"))
ERM_ID = ProcedureSpec(Crit1Spec("erm"), Crit2Spec("ideal"))
ID_ID = ProcedureSpec(Crit1Spec("ideal"), Crit2Spec("ideal"), d_max=20)


def test_index_kinds():
    fixed = FixedSetting("s2", "pc3")
    assert index_kind(ERM_ID, fixed) == "Cor1"
    assert index_kind(ERM_BM, fixed) == "Cor2"
    assert index_kind(LOO_VF5, fixed) == "Cor"
    assert index_kind(ORACLE, fixed) == "Cor"
    assert index_kind(LOO_VF5, RandomFrameworkSpec("A")) == "CorRand"


def test_ratio_index_of_identical_losses():
    losses = np.array([0.1, 0.3, 0.2, 0.4])
    assert ratio_index(losses, losses) == (1.0, 0.0, pytest.approx(np.std(losses, ddof=1) / 2 / 0.25))


def test_benchmark_report(tmp_path):
    setting = FixedSetting("s2", "pc3", n=40)
    report = run_benchmark([LOO_VF5, ERM_BM, ID_ID, ORACLE], setting, N=6, seed=3, workers=1)
    assert [r.procedure for r in report.rows] == ["Loo x VF5", "ERM x BM", "Id x Id", "oracle"]
    assert report.index("oracle") == 1.0
    assert report.row("oracle").stderr == 0.0
    assert_allclose(report.index("Id x Id"), 1.0, rtol=1e-9)
    assert np.all(report.losses >= report.oracle[:, None] * (1 - 1e-12))
    for row in report.rows:
        assert row.value >= 1.0 - 1e-9
        assert row.N == 6 and row.seed == 3 and row.setting == "s2:pc3"
        assert_allclose(row.value, row.mean_loss / row.mean_oracle_loss)


def test_benchmark_is_deterministic_across_worker_counts():
    setting = RandomFrameworkSpec("A", n=49)
    a = run_benchmark([LOO_VF5, ERM_BM], setting, N=5, seed=7, workers=1)
    b = run_benchmark([LOO_VF5, ERM_BM], setting, N=5, seed=7, workers=3)
    assert a.rows == b.rows
    assert np.array_equal(a.losses, b.losses)
    assert all(r.index_kind == "CorRand" for r in a.rows)


def test_benchmark_argument_checks():
    setting = FixedSetting("s1", "c", n=30)
    with pytest.raises(DomainError):
        run_benchmark([LOO_VF5], setting, N=1)
    with pytest.raises(DomainError):
        run_benchmark([LOO_VF5, LOO_VF5], setting, N=3)


def test_benchmark_logs_through_callback():
    lines = []
    run_benchmark([ORACLE], FixedSetting("s1", "c", n=30), N=2, on_log=lines.append, workers=1)
    assert lines and all(line.startswith("[BENCH]") for line in lines)


def test_risk_curves_lie_above_the_oracle():
    setting = FixedSetting("s2", "pc2", n=40)
    report = risk_curves([LOO_VF5, ERM_BM], setting, N=4, seed=1, d_max=10, workers=1)
    d_o, oracle, _ = report.curve(ORACLE)
    assert list(d_o) == list(range(1, 11))
    for label in ("Loo x VF5", "ERM x BM"):
        d, loss, se = report.curve(label)
        assert np.all(loss >= 0.0) and np.all(se >= 0.0)
        assert np.all(loss >= oracle - 1e-12)
    d, crit, _ = report.curve("ERM x BM", "crit2:BM")
    assert crit.size == 10


def test_empirical_risk_and_loss_expectations():
    n = 100
    s = PiecewiseConstant([0.305, 0.705], [0.0, 1.0, 0.4])
    sigma = PiecewiseConstant([0.505], [0.3, 0.1])
    seg = Segmentation((31, 51, 71), n)
    checks = check_risk_expectations(s, sigma, seg, N=2000, seed=9, p_values=(1, 5))
    for name in ("empirical_risk", "loss", "lpo:1", "lpo:5"):
        assert checks[name].passes(4.0), checks[name]


def test_sigma_hat_expectation_with_the_s1_artefact():
    check = check_sigma_hat(regression_function("s1"), noise_level("c"), 100, N=2000, seed=4)
    assert_allclose(check.expected, 0.0625 + 0.04)
    assert check.passes(4.0), check


def _combined_gap(report, better, worse):
    a, b = report.row(better), report.row(worse)
    return (b.value - a.value) / math.hypot(a.stderr, b.stderr)


@pytest.mark.bench
def test_heteroscedastic_table_direction():
    report = run_benchmark([LOO_VF5, ERM_BM], FixedSetting("s2", "pc3"), N=300, seed=2011)
    assert _combined_gap(report, "Loo x VF5", "ERM x BM") > 3.0


@pytest.mark.bench
def test_homoscedastic_bm_is_competitive():
    erm_vf5 = ProcedureSpec(Crit1Spec("erm"), Crit2Spec("vf", V=5))
    report = run_benchmark([ERM_BM, erm_vf5], FixedSetting("s3", "c"), N=300, seed=2011)
    assert report.index("ERM x BM") <= 1.15 * report.index("ERM x VF5")


@pytest.mark.bench
def test_heteroscedastic_loss_curves():
    erm = ProcedureSpec(Crit1Spec("erm"), Crit2Spec("ideal"))
    loo = ProcedureSpec(Crit1Spec("lpo", 1), Crit2Spec("ideal"))
    report = risk_curves([erm, loo], FixedSetting("s2", "pc3"), N=300, seed=2011)
    _, l_erm, _ = report.curve("ERM x Id")
    _, l_loo, _ = report.curve("Loo x Id")
    true_dim = regression_function("s2").jumps + 1
    assert abs(l_erm[0] - l_loo[0]) <= 0.05 * l_loo[0]
    assert np.mean(l_erm[true_dim:2 * true_dim + 5]) > np.mean(l_loo[true_dim:2 * true_dim + 5])
