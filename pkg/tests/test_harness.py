import json
import math

import pytest

from hypermatch.errors import ConfigError
from hypermatch.harness import (
    AlgoConfig,
    TrialConfig,
    TrialReport,
    rows_to_csv,
    run_trial,
    split_seeds,
    sweep,
    sweep_grid,
    upper_bound_budget,
    write_outputs,
)
from hypermatch.model import RHO


def test_seed_split_is_stable_and_distinct():
    a, b = split_seeds(7), split_seeds(7)
    assert a == b and len({a["algorithm"], a["source"], a["trial"]}) == 3
    assert split_seeds(8) != a


def test_budget_formula():
    T, m = 4, 100
    a = 2 - 2 * math.log((math.e + 1) / 2)
    want = (15 * T ** (5 / 3) * m ** (2 / 3) + 2 * a * (2 + 0.5 * math.sqrt(T - 1)) * m) / (T * m)
    assert upper_bound_budget(T, m) == pytest.approx(want)
    assert upper_bound_budget(T, m, 0.1) > upper_bound_budget(T, m)


def test_config_errors():
    with pytest.raises(ConfigError):
        AlgoConfig("nope")
    with pytest.raises(ConfigError):
        TrialConfig("elsewhere")
    with pytest.raises(ConfigError):
        TrialConfig.from_json({"source": "gadget", "size": 3})
    with pytest.raises(ConfigError):
        run_trial(TrialConfig("file:/nonexistent.json"))


def test_report_arithmetic_roundtrip(tmp_path):
    report, art = run_trial(TrialConfig("adversary", m=5, T=3))
    assert report.ratio == report.alg_value / report.opt
    assert sum(report.phase_values.values()) == pytest.approx(report.alg_value, abs=1e-7)
    assert report.certificate["pass"] and report.extras["within_bounds"]
    write_outputs(report, art, tmp_path)
    back = TrialReport.from_dict(json.loads((tmp_path / "report.json").read_text()))
    assert back.alg_value / back.opt == back.ratio
    assert TrialConfig.from_json(back.config) == TrialConfig("adversary", m=5, T=3)
    assert {p.name for p in tmp_path.iterdir()} == {"report.json", "transcript.csv", "instance.json", "duals.json"}


def test_unrecorded_run_uses_streaming_certificate():
    report, _ = run_trial(TrialConfig("adversary", m=6, T=3, record=False))
    assert report.certificate["coverage_mode"] == "streaming" and report.certificate["pass"]
    assert report.transcript_digest.startswith("bin:")


def test_brute_force_opt_for_random_instances():
    report, _ = run_trial(TrialConfig("random", seed=4))
    assert report.opt_source == "brute_force" and report.ratio >= RHO - 1e-9


def test_rounding_and_random_algorithms():
    r, _ = run_trial(TrialConfig("adversary", m=4, T=3, algo=AlgoConfig("rounding", b=2)))
    assert r.extras["max_degree"] <= 2 and r.alg_value == int(r.alg_value)
    r, _ = run_trial(TrialConfig("random", algo=AlgoConfig("random", d=5), seed=2))
    assert r.certificate is None and r.alg_value <= r.opt


def test_sweep_orders_rows_and_parallel_agrees():
    cfgs = sweep_grid([3, 6], [2, 3], algos=("waterfill", "greedy_fractional"))
    seq = sweep(cfgs, workers=1)
    par = sweep(cfgs, workers=2)
    assert [r["index"] for r in seq] == list(range(8))
    strip = lambda rows: [{k: v for k, v in r.items() if k != "runtime"} for r in rows]  # noqa: E731
    assert strip(seq) == strip(par)
    assert rows_to_csv(seq).count("\n") == 9


@pytest.mark.slow
def test_greedy_fractional_below_waterfill_and_m_trend():
    ratios = {}
    for algo in ("waterfill", "greedy_fractional"):
        for T, m in [(4, 100), (8, 100), (16, 100), (4, 1000)]:
            ratios[(algo, T, m)] = run_trial(TrialConfig("adversary", algo=AlgoConfig(algo), m=m, T=T))[0].ratio
    for T, m in [(4, 100), (8, 100), (16, 100), (4, 1000)]:
        assert ratios[("greedy_fractional", T, m)] < ratios[("waterfill", T, m)]
    r10 = run_trial(TrialConfig("adversary", m=10, T=4))[0].ratio
    assert r10 >= ratios[("waterfill", 4, 100)] >= ratios[("waterfill", 4, 1000)]
