import json
import os

import numpy as np
import pandas as pd
import pytest

from utils.config import ANGLE_GRID, DEFAULT_TOPOLOGY, ExperimentConfig, load_config, preset_config, resolve_topology
from utils.errors import ConfigError, QSNNError
from utils.experiments import evaluate_classifier, plan_subruns, resolve_output_dir, run_experiment
from utils.network import ParameterVector, explicit_topology
from utils.tasks import WernerSetSpec, build_werner_sets, discrimination_network, helstrom_real, werner_network

FAST = {"iterations": 3, "log_every": 0}
CONFIG_DIR = os.path.join(os.path.dirname(__file__), os.pardir, "configs")


def make_config(kind, tmp_path=None, **fields):
    data = {"kind": kind, "training": dict(FAST)}
    data.update(fields)
    if tmp_path is not None:
        data["output_dir"] = str(tmp_path)
    return ExperimentConfig.from_dict(data)


# --- classifier evaluation ---
def _werner_test_set(topo, p_values):
    _, test = build_werner_sets(WernerSetSpec(test_p=tuple(p_values)), topo)
    return test


def test_evaluate_classifier_all_to_separable():
    topo = explicit_topology([4, 2], [], [(0, 4), (1, 4), (2, 4), (3, 4)])
    p_values = [0.1, 0.2, 0.5, 0.9]
    confusion, per_state = evaluate_classifier(ParameterVector([], np.ones(4)), topo,
                                               _werner_test_set(topo, p_values), p_values, 10.0)
    np.testing.assert_allclose(confusion.matrix, [[1.0, 0.0], [1.0, 0.0]], atol=1e-6)
    assert confusion.counts == (2, 2)
    assert list(per_state["predicted_label"]) == ["separable"] * 4
    np.testing.assert_allclose(confusion.matrix.sum(axis=1), [1.0, 1.0], atol=1e-9)


def test_evaluate_classifier_symmetric_network():
    edges = [(j, i) for j in range(4) for i in (4, 5)]
    topo = explicit_topology([4, 2], [], edges)
    p_values = [0.1, 0.9]
    confusion, per_state = evaluate_classifier(ParameterVector([], np.full(8, 0.7)), topo,
                                               _werner_test_set(topo, p_values), p_values, 10.0)
    np.testing.assert_allclose(per_state[["P_S", "P_E"]].to_numpy(), 0.5, atol=1e-9)
    np.testing.assert_allclose(confusion.matrix, 0.5, atol=1e-9)


# --- planning ---
def test_plan_binary_real_grid():
    runs = plan_subruns(make_config("binary_real", seeds=[0, 1]))
    assert len(runs) == 24
    assert [r.index for r in runs] == list(range(24))
    assert runs[2].task_params["theta"] == pytest.approx(np.pi / 6)
    assert runs[2].helstrom == pytest.approx(0.75)
    assert runs[2].training.seed == 0 and runs[3].training.seed == 1


def test_plan_ablation_runs_every_topology():
    config = make_config("topology_ablation", task={"task": "binary_real", "thetas": [0.5],
                                                    "topologies": [{"shape": [2, [], 2]},
                                                                   {"shape": [2, [2], 2], "variant": "b"}]})
    runs = plan_subruns(config)
    assert [r.topology_label for r in runs] == ["2-2", "2-2-2(b)"]


# --- full runs ---
def test_binary_real_run(tmp_path):
    thetas = [np.pi / 2, np.pi / 6]
    config = make_config("binary_real", tmp_path, task={"thetas": thetas})
    results = run_experiment(config)
    tables = results.tables
    assert len(tables["summary"]) == 2
    assert len(tables["trace"]) == 2 * 4
    assert len(tables["aggregate"]) == 4
    assert len(tables["parameters"]) == 2 * 13
    np.testing.assert_allclose(tables["summary"]["helstrom"], [helstrom_real(t) for t in thetas])
    assert (tables["summary"]["final_success"] <= tables["summary"]["helstrom"] + 1e-6).all()

    for name in ("trace", "summary", "aggregate", "parameters"):
        assert os.path.exists(tmp_path / f"{name}.csv")
    manifest = json.loads((tmp_path / "manifest.json").read_text())
    assert manifest["rows"]["summary"] == 2
    assert manifest["config"]["kind"] == "binary_real"
    assert manifest["seeds"] == [0]


def test_rerun_from_manifest_is_identical(tmp_path):
    first = tmp_path / "first"
    run_experiment(make_config("binary_real", first, task={"thetas": [np.pi / 3]}))
    config = load_config(str(first / "manifest.json"))
    second = tmp_path / "second"
    config.apply_overrides(out=str(second))
    run_experiment(config)
    for name in ("trace", "summary", "aggregate", "parameters"):
        assert (first / f"{name}.csv").read_bytes() == (second / f"{name}.csv").read_bytes()


def test_worker_count_does_not_change_results():
    config = make_config("binary_complex", task={"phis": [0.5, 2.0, 3.0]})
    serial = run_experiment(config, workers=1, write=False)
    threaded = run_experiment(config, workers=2, write=False)
    for name in ("trace", "summary", "parameters"):
        pd.testing.assert_frame_equal(serial.tables[name], threaded.tables[name])


def test_werner_run(tmp_path):
    config = make_config("werner_classify", tmp_path, task={"test_p": [0.1, 0.3, 0.5, 0.9]})
    tables = run_experiment(config).tables
    assert len(tables["confusion"]) == 2
    assert len(tables["per_state"]) == 4
    assert tables["summary"]["helstrom"].isna().all()
    sums = tables["confusion"][["predict_separable", "predict_entangled"]].sum(axis=1)
    np.testing.assert_allclose(sums, 1.0, atol=1e-9)
    assert (tmp_path / "confusion.csv").exists()


def test_ghz_w_run():
    tables = run_experiment(make_config("ghz_w", training={"iterations": 1, "log_every": 0}), write=False).tables
    assert len(tables["summary"]) == 1
    assert tables["summary"]["helstrom"].iloc[0] == pytest.approx(1.0)


def test_multi_state_run():
    config = make_config("multi_state", task={"m_values": [3], "families": ["real_pure"]})
    tables = run_experiment(config, write=False).tables
    assert len(tables["summary"]) == 1
    assert tables["summary"]["topology"].iloc[0] == "2-3-3"
    assert {"success_0", "success_1", "success_2"} <= set(tables["trace"].columns)


def test_binary_mixed_run():
    config = make_config("binary_mixed", task={"radii": [0.5], "pairs_per_radius": 2, "pair_seed": 7},
                         training={"iterations": 1, "log_every": 0})
    tables = run_experiment(config, write=False).tables
    assert len(tables["summary"]) == 2
    assert (tables["summary"]["helstrom"] <= 0.75 + 1e-12).all()
    assert list(tables["summary"]["radius"]) == [0.5, 0.5]


def test_ablation_run():
    config = make_config("topology_ablation",
                         task={"task": "binary_real", "thetas": [np.pi / 2],
                               "topologies": [{"shape": [2, [], 2]}, {"shape": [2, [2], 2]}]})
    tables = run_experiment(config, write=False).tables
    assert list(tables["summary"]["topology"]) == ["2-2", "2-2-2"]
    assert list(tables["summary"]["n_parameters"]) == [5, 13]


def test_resolve_output_dir(monkeypatch, tmp_path):
    monkeypatch.setenv("QSNN_RESULTS_DIR", str(tmp_path))
    config = make_config("ghz_w", name="demo")
    assert resolve_output_dir(config) == os.path.join(str(tmp_path), "demo")


def test_emit_outputs_reports_unwritable_dir(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    config = make_config("binary_real", blocker / "out", task={"thetas": [0.5]},
                         training={"iterations": 0, "log_every": 0})
    with pytest.raises(QSNNError):
        run_experiment(config)


# --- config validation ---
@pytest.mark.parametrize("data, field", [
    ({"kind": "binary_real", "task": {"thetas": []}}, "task.thetas"),
    ({"kind": "binary_mixed", "task": {"radii": [1.5]}}, "task.radii"),
    ({"kind": "binary_mixed", "task": {"pairs_per_radius": 0}}, "task.pairs_per_radius"),
    ({"kind": "multi_state", "task": {"m_values": [1]}}, "task.m_values"),
    ({"kind": "werner_classify", "task": {"test_p": [0.5, 2.0]}}, "task.test_p"),
    ({"kind": "topology_ablation", "task": {"task": "ghz_w"}}, "task.task"),
    ({"kind": "binary_real", "topology": {"shape": [2, [2], 2], "variant": "z"}}, "topology.variant"),
    ({"kind": "binary_real", "seeds": []}, "seeds"),
    ({"kind": "binary_real", "training": {"learning_rate": -1.0}}, "training.learning_rate"),
    ({"kind": "binary_real", "training": {"learning_rate": "10"}}, "training.learning_rate"),
    ({"kind": "binary_real", "training": {"log_every": None}}, "training.log_every"),
    ({"kind": "binary_real", "training": {"iterations": 2.5}}, "training.iterations"),
    ({"kind": "binary_real", "training": {"seed": True}}, "training.seed"),
    ({"kind": "binary_real", "training": {"evolution_time": float("nan")}}, "training.evolution_time"),
])
def test_config_validation_names_field(data, field):
    with pytest.raises(ConfigError) as err:
        ExperimentConfig.from_dict(data).validate()
    assert err.value.field == field
    assert field in str(err.value)


@pytest.mark.parametrize("data, field", [
    ({"kind": "quantum_chess"}, "kind"),
    ({"kind": "binary_real", "colour": "red"}, "colour"),
    ({"kind": "binary_real", "training": {"momentum": 0.9}}, "training.momentum"),
    ({"task": {}}, "kind"),
    ({"kind": "binary_real", "training": [20.0]}, "training"),
    ({"kind": "binary_real", "seeds": 3}, "seeds"),
])
def test_config_parse_errors(data, field):
    with pytest.raises(ConfigError) as err:
        ExperimentConfig.from_dict(data)
    assert err.value.field == field


def test_load_config_errors(tmp_path):
    with pytest.raises(ConfigError):
        load_config(str(tmp_path / "missing.json"))
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(ConfigError):
        load_config(str(bad))
    good = tmp_path / "good.json"
    good.write_text(json.dumps({"kind": "ghz_w"}))
    with pytest.raises(ConfigError):
        load_config(str(good), expected_kind="binary_real")


# --- presets ---
def test_default_topologies_match_task_networks():
    for kind in ("binary_real", "binary_complex", "binary_mixed"):
        assert resolve_topology(DEFAULT_TOPOLOGY[kind]) == discrimination_network("real_pure")
    assert resolve_topology(DEFAULT_TOPOLOGY["ghz_w"]) == discrimination_network("ghz_w")
    assert resolve_topology(DEFAULT_TOPOLOGY["werner_classify"]) == werner_network()


def test_hidden_layer_ablation_runs_on_complex_grid():
    config = preset_config("ablation_hidden_binary")
    assert config.task["task"] == "binary_complex"
    np.testing.assert_allclose(config.task["phis"], ANGLE_GRID)
    assert config.training.learning_rate == 20.0
    from_file = load_config(os.path.join(CONFIG_DIR, "ablation_hidden_binary.json"))
    assert from_file.task["task"] == "binary_complex"
    assert from_file.training.learning_rate == 20.0
    assert preset_config("ablation_coupling").task["task"] == "binary_real"


# --- replication of the published results (slow) ---
def _preset(name, **fields):
    config = preset_config(name)
    config.training.log_every = 0
    for key, value in fields.items():
        setattr(config, key, value)
    return config


def assert_never_beats_optimum(tables):
    trace = tables["trace"].merge(tables["summary"][["run", "helstrom"]], on="run")
    trace = trace[trace["helstrom"].notna()]
    assert (trace["avg_success"] <= trace["helstrom"] + 1e-6).all()


@pytest.mark.slow
def test_real_amplitude_discrimination_reaches_helstrom():
    tables = run_experiment(_preset("binary_real", seeds=[0, 1, 2]), write=False).tables
    summary = tables["summary"]
    assert len(summary) == 36
    assert summary["final_success"].mean() >= summary["helstrom"].mean() - 0.02
    best = summary.groupby("theta").agg(best=("final_success", "max"), helstrom=("helstrom", "first"))
    assert (best["best"] >= best["helstrom"] - 0.03).all()
    assert_never_beats_optimum(tables)


@pytest.mark.slow
def test_complex_amplitude_discrimination_near_helstrom():
    tables = run_experiment(_preset("binary_complex", seeds=[0, 1, 2]), write=False).tables
    best = tables["summary"].groupby("phi").agg(best=("final_success", "max"), helstrom=("helstrom", "first"))
    assert len(best) == 12
    assert (best["best"] >= 0.91 * best["helstrom"]).all()
    assert_never_beats_optimum(tables)


@pytest.mark.slow
def test_mixed_state_pairs_near_helstrom():
    config = _preset("binary_mixed")
    config.task.update({"radii": [0.1, 0.5, 0.9], "pairs_per_radius": 10})
    tables = run_experiment(config, write=False).tables
    per_radius = tables["summary"].groupby("radius")[["final_success", "helstrom"]].mean()
    assert len(per_radius) == 3
    assert (per_radius["final_success"] >= per_radius["helstrom"] - 0.05).all()
    assert_never_beats_optimum(tables)


@pytest.mark.slow
def test_ghz_versus_w_is_perfectly_discriminated():
    config = _preset("ghz_w")
    config.training.iterations = 50
    tables = run_experiment(config, write=False).tables
    summary = tables["summary"]
    assert summary["helstrom"].iloc[0] == pytest.approx(1.0)
    assert summary["final_success"].iloc[0] >= 0.99
    assert_never_beats_optimum(tables)


@pytest.mark.slow
def test_werner_classifier_success_beats_error():
    tables = run_experiment(_preset("werner_classify", seeds=[0, 1, 2, 3, 4]), write=False).tables
    per_state = tables["per_state"]
    assert len(per_state) == 5 * 49
    success = np.where(per_state["true_label"] == "separable", per_state["P_S"], per_state["P_E"])
    per_state = per_state.assign(correct=success > 1.0 - success)
    correct_per_seed = per_state.groupby("seed")["correct"].sum()
    assert correct_per_seed.max() == 49
    assert np.median(correct_per_seed) >= 45

    confusion = tables["confusion"].groupby("true_label")[["predict_separable", "predict_entangled"]].mean()
    assert confusion.loc["separable", "predict_separable"] == pytest.approx(0.62, abs=0.08)
    assert confusion.loc["entangled", "predict_entangled"] == pytest.approx(0.75, abs=0.08)


@pytest.mark.slow
def test_hidden_layer_ablation_gap():
    tables = run_experiment(_preset("ablation_hidden_binary"), write=False).tables
    final = tables["summary"].groupby("topology")["final_success"].mean()
    assert final["2-2-2"] - final["2-2"] >= 0.15
    assert abs(final["2-3-2"] - final["2-2-2"]) <= 0.05
    assert abs(final["2-2-2-2"] - final["2-2-2"]) <= 0.05
    assert_never_beats_optimum(tables)


@pytest.mark.slow
def test_multi_state_beats_random_guessing():
    tables = run_experiment(_preset("multi_state"), write=False).tables
    summary = tables["summary"]
    assert len(summary) == 6
    for _, row in summary.iterrows():
        assert row["final_success"] >= 1.0 / row["m"] + 0.15, (row["family"], row["m"])
    for _, frame in tables["trace"].groupby("run"):
        loss = frame.sort_values("iteration")["loss"]
        assert loss.iloc[-10:].mean() < loss.iloc[:10].mean()
