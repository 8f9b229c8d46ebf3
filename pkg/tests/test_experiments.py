import math

import pytest

from irgcouple.experiments import (BudgetExceededFractionTooHigh, ConfigError, config_from_dict,
                                   emit_report, load_config, run_experiment)
from irgcouple.experiments.config import apply_overrides
from irgcouple.experiments.harness import check_certificates, fixed_counterexample, h2_witness
from irgcouple.experiments.stats import hoeffding_bound, wilson_interval
from irgcouple.properties.predictors import HypothesisViolation
from irgcouple.serialize import canonical_json, load_canonical

BUMP = {"family": "bump", "m": 0.5, "peak": 3.0, "width": 0.5}


def cfg(**kw):
    return config_from_dict(kw)


def test_config_validation():
    with pytest.raises(ConfigError):
        cfg(kind="nope", seed=1, n=[10])
    with pytest.raises(ConfigError):
        cfg(kind="counterexample", seed=None, n=[10])
    with pytest.raises(ConfigError):
        cfg(kind="counterexample", seed=1, n=[20, 10])
    with pytest.raises(ConfigError):
        cfg(kind="counterexample", seed=1, n=[10], trials=0)
    with pytest.raises(ConfigError):
        cfg(kind="coupling_validation", seed=1, n=[10])
    with pytest.raises(ConfigError):
        cfg(kind="counterexample", seed=1, n=[10], colour="red")
    with pytest.raises(ConfigError):
        config_from_dict({"kind": "counterexample", "n": [5]})


def test_overrides_and_files(tmp_path):
    p = tmp_path / "c.yaml"
    p.write_text("kind: chromatic_window\nseed: 3\nn: [50]\nkernel: {family: bump, m: 0.5, peak: 3, width: 0.5}\n"
                 "scaling: {rule: linear}\n")
    c = load_config(str(p), ["trials=4", "kernel.peak=2.5", "n=[40, 60]"])
    assert c.trials == 4 and c.kernel["peak"] == 2.5 and c.n == [40, 60]
    assert apply_overrides({}, ["a.b.c=1"]) == {"a": {"b": {"c": 1}}}
    with pytest.raises(ConfigError):
        apply_overrides({}, ["novalue"])
    with pytest.raises(ConfigError):
        load_config(str(tmp_path / "missing.yaml"))


def test_config_hash_ignores_workers():
    a = cfg(kind="counterexample", seed=1, n=[6], trials=3)
    b = cfg(kind="counterexample", seed=1, n=[6], trials=3, workers=2, output="x.json")
    assert a.config_hash() == b.config_hash()
    assert a.config_hash() != cfg(kind="counterexample", seed=2, n=[6], trials=3).config_hash()


def test_wilson_interval():
    for k, n in [(0, 10), (3, 10), (10, 10), (27, 30)]:
        lo, hi = wilson_interval(k, n)
        assert 0 <= lo <= k / n <= hi <= 1
    w100 = wilson_interval(80, 100)
    w1000 = wilson_interval(800, 1000)
    assert w1000[1] - w1000[0] < w100[1] - w100[0]
    # statsmodels as an independent reference
    from statsmodels.stats.proportion import proportion_confint
    assert wilson_interval(27, 30) == pytest.approx(proportion_confint(27, 30, method="wilson"), abs=1e-12)
    assert hoeffding_bound(0, 10) == 1.0
    assert hoeffding_bound(100, 1000) == pytest.approx(math.exp(-20))


def test_coupling_report_counts_and_workers():
    base = dict(kind="coupling_validation", seed=5, n=[30, 60], trials=7,
                kernel={"family": "block", "grid": [[0.2, 0.1], [0.1, 0.6]], "breakpoints": [0.5]})
    rep = run_experiment(cfg(**base))
    assert rep.passed and len(rep.records) == 14
    assert rep.aggregates["total_violations"] == 0
    par = run_experiment(cfg(workers=2, **base))
    assert par.to_json() == rep.to_json()


def test_chromatic_window_report():
    c = cfg(kind="chromatic_window", seed=1, n=[100, 150], trials=3, kernel=BUMP,
            scaling={"rule": "linear"}, coverage_threshold=0.5)
    rep = run_experiment(c)
    assert len(rep.records) == 6
    for rec in rep.records:
        assert set(rec["solves"]) == {"lower", "middle", "upper"}
        assert rec["sandwich_ok"] is True
    block = rep.aggregates["per_n"]["100"]
    assert block["window"]["members"] == [3, 4]
    cov = block["coverage"]["status"]
    assert cov["wilson95"][0] <= cov["coverage"] <= cov["wilson95"][1]
    assert check_certificates(c, rep.records) == []
    # csv: header plus one row per trial; plotdata: one row per n
    csv_text = emit_report(rep, fmt="csv")
    assert csv_text.count("\n") == 7 and csv_text.startswith("kind,n,trial")
    assert emit_report(rep, fmt="plotdata").count("\n") == 3


def test_chromatic_window_power_scaling_regime():
    c = cfg(kind="chromatic_window", seed=2, n=[300], trials=2, kernel={"family": "constant", "p": 1.0},
            scaling={"rule": "power", "alpha": 0.8})
    rep = run_experiment(c)
    assert rep.aggregates["regime"]["delta"] == pytest.approx(0.05)
    assert rep.aggregates["per_n"]["300"]["window"]["kind"] == "chromatic_sparse"
    with pytest.raises(ConfigError):
        run_experiment(cfg(kind="chromatic_window", seed=2, n=[30], kernel={"family": "constant", "p": 0.5}))


def test_budget_fraction_error_carries_report():
    c = cfg(kind="chromatic_window", seed=1, n=[60], trials=3, kernel={"family": "constant", "p": 30.0},
            scaling={"rule": "linear"}, node_limit=1, solve_coupled=False)
    with pytest.raises(BudgetExceededFractionTooHigh) as info:
        run_experiment(c)
    rep = info.value.report
    assert len(rep.records) == 3
    assert any(r["solves"]["middle"]["outcome"] == "lower_upper_only" for r in rep.records)


def test_quasi_window_checks_hypothesis_first():
    c = cfg(kind="quasi_clique_window", seed=1, n=[50], trials=2, kernel={"family": "constant", "p": 0.8},
            gamma=0.75)
    with pytest.raises(HypothesisViolation):
        run_experiment(c)
    with pytest.raises(ConfigError):
        run_experiment(cfg(kind="quasi_clique_window", seed=1, n=[50], kernel=BUMP, gamma=0.9,
                           scaling={"rule": "linear"}))


def test_quasi_window_report():
    c = cfg(kind="quasi_clique_window", seed=4, n=[60], trials=3, kernel={"family": "constant", "p": 0.5},
            gamma=1.0, refined_epsilon=1.0)
    rep = run_experiment(c)
    rec = rep.records[0]
    assert {"status_coarse", "status_refined"} <= set(rec)
    assert rep.aggregates["per_n"]["60"]["window"]["flags"]["gamma_one"]
    assert check_certificates(c, rep.records) == []


def test_concentration_clipping_and_tails():
    c = cfg(kind="concentration", seed=3, n=[400], trials=500, m=0.0,
            rate={"form": "table", "table": {400: 0.1}}, t_values=[0, 10])
    rep = run_experiment(c)
    blk = rep.aggregates["per_n"]["400"]
    assert blk["clipped"] and blk["expected_heavy"] == pytest.approx(40.0)
    assert blk["unclipped_formula"] == pytest.approx(80.0)
    assert blk["tails"][0]["hoeffding_bound"] == 1.0 and blk["tails"][0]["holds"]
    assert rep.passed


def test_assumption_suite_small():
    rep = run_experiment(cfg(kind="assumption_suite", seed=1, n=[5, 7], trials=6, additions=3))
    agg = rep.aggregates
    assert agg["fixtures"] == 12 and agg["additions_checked"] <= 36
    assert agg["chi_h1_violations"] == 0 and agg["omega_h1_violations"] == 0
    assert agg["omega_h2_witness"] == h2_witness() == {"gamma": 0.5, "before": 3, "after": 4,
                                                      "witness": [1, 2, 3, 4]}
    assert agg["a3_ratio_increasing"]


def test_counterexample():
    fixed = fixed_counterexample()
    assert fixed["before"] == 1.0 and fixed["after"] == 4 / 3
    rep = run_experiment(cfg(kind="counterexample", seed=2, n=[6], trials=100))
    assert rep.passed and rep.aggregates["witnesses_found"] > 0
    assert rep.aggregates["complete_graph_additions"] == 0


def test_emit_report_byte_stable(tmp_path):
    rep = run_experiment(cfg(kind="counterexample", seed=2, n=[6], trials=5))
    a = emit_report(rep, tmp_path / "a.json")
    b = emit_report(rep, tmp_path / "b.json")
    assert a == b and (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()
    assert b"\r" not in (tmp_path / "a.json").read_bytes()
    assert load_canonical(a)["environment"]["config_hash"] == rep.config_hash
    with pytest.raises(ValueError):
        emit_report(rep, fmt="xml")


def test_canonical_json():
    text = canonical_json({"b": 0.1, "a": [1, 2.5], "c": {"z": None, "y": float("nan")}})
    assert text.index('"a"') < text.index('"b"') < text.index('"c"')
    assert "0.10000000000000001" in text and text.endswith("\n")
    assert math.isnan(load_canonical(text)["c"]["y"])
