# utils/experiments.py
"""
Experiment orchestration: plan sub-runs from an ExperimentConfig, train them,
evaluate classifiers and write the result tables plus a manifest.
"""
import json
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np
import pandas as pd

from utils import ARTIFACT_NAME, __version__
from utils.config import ExperimentConfig, resolve_topology, topology_label
from utils.errors import QSNNError
from utils.helper import get_results_dir, get_worker_count, log_progress
from utils.liouvillian import assemble, evolve
from utils.tasks import (SEPARABLE, ENTANGLED, StatePairSpec, WernerSetSpec,
                         build_multi_state_set, build_training_set, build_werner_sets,
                         entanglement_label, multi_state_network, sample_bloch_pairs)
from utils.training import train

FLOAT_FORMAT = "%.12g"
HELSTROM_SLACK = 1e-6
CLASS_NAMES = (SEPARABLE, ENTANGLED)


@dataclass
class SubRun:
    index: int
    kind: str
    group: str
    topology_label: str
    topo: object
    samples: list
    training: object
    task_params: dict
    helstrom: float = float("nan")
    test_samples: list = None
    test_p: list = None

    @property
    def tag(self):
        params = " ".join(f"{k}={v:.4g}" if isinstance(v, float) else f"{k}={v}"
                          for k, v in self.task_params.items())
        return f"{self.kind} {self.topology_label} {params} seed={self.training.seed}".replace("  ", " ")


@dataclass
class SubRunResult:
    run: SubRun
    trace: object
    confusion: object = None
    per_state: pd.DataFrame = None
    elapsed: float = 0.0


@dataclass
class ConfusionMatrix:
    """Rows: true separable / entangled. Columns: predicted separable / entangled."""
    matrix: np.ndarray
    counts: tuple

    def to_frame(self):
        rows = []
        for true_idx, name in enumerate(CLASS_NAMES):
            rows.append({"true_label": name, "n_states": self.counts[true_idx],
                         "predict_separable": self.matrix[true_idx, 0],
                         "predict_entangled": self.matrix[true_idx, 1]})
        return pd.DataFrame(rows)


@dataclass
class ExperimentResults:
    config: ExperimentConfig
    results: list
    tables: dict


# --- Classifier evaluation ---
def evaluate_classifier(params, topo, test_samples, p_values, evolution_time):
    """
    Per test state, output-layer populations (raw and renormalized over the two
    output neurons), predicted class by argmax, and class-conditional means.
    """
    bundle = assemble(topo, params, evolution_time)
    s_neuron, e_neuron = topo.output_neuron(0), topo.output_neuron(1)

    rows = []
    for p, sample in zip(p_values, test_samples):
        diag = np.real(np.diag(evolve(bundle, sample.rho_in).matrix))
        raw_s, raw_e = float(diag[s_neuron]), float(diag[e_neuron])
        total = raw_s + raw_e
        p_s, p_e = (raw_s / total, raw_e / total) if total > 0 else (0.5, 0.5)
        rows.append({"p": p, "P_S": p_s, "P_E": p_e, "raw_S": raw_s, "raw_E": raw_e,
                     "output_mass": total,
                     "true_label": entanglement_label(p),
                     "predicted_label": SEPARABLE if p_s >= p_e else ENTANGLED})
    per_state = pd.DataFrame(rows)

    matrix = np.full((2, 2), np.nan)
    counts = []
    for idx, name in enumerate(CLASS_NAMES):
        subset = per_state[per_state["true_label"] == name]
        counts.append(len(subset))
        if len(subset):
            matrix[idx] = [subset["P_S"].mean(), subset["P_E"].mean()]
    return ConfusionMatrix(matrix, tuple(counts)), per_state


# --- Planning ---
def _pair_runs(config, family, values, key, topo_spec, label_prefix=None):
    topo = resolve_topology(topo_spec)
    label = label_prefix or topology_label(topo_spec, topo)
    runs = []
    for value in values:
        spec = StatePairSpec(family, (0.0,), (float(value),))
        samples = build_training_set(spec, topo)
        helstrom = spec.helstrom()
        for seed in config.seeds:
            runs.append(SubRun(0, config.kind, label, label, topo, samples,
                               replace(config.training, seed=seed), {key: float(value)}, helstrom))
    return runs


def _mixed_runs(config, topo_spec):
    topo = resolve_topology(topo_spec)
    label = topology_label(topo_spec, topo)
    runs = []
    for r_idx, r in enumerate(config.task["radii"]):
        pairs = sample_bloch_pairs(float(r), config.task["pairs_per_radius"], [config.task["pair_seed"], r_idx])
        for pair_idx, (first, second) in enumerate(pairs):
            spec = StatePairSpec("bloch_mixed", first, second)
            samples = build_training_set(spec, topo)
            helstrom = spec.helstrom()
            params = {"radius": float(r), "pair": pair_idx,
                      "theta1": float(first[0]), "phi1": float(first[1]),
                      "theta2": float(second[0]), "phi2": float(second[1])}
            for seed in config.seeds:
                runs.append(SubRun(0, config.kind, f"{label} r={float(r):g}", label, topo, samples,
                                   replace(config.training, seed=seed), dict(params), helstrom))
    return runs


def _multi_state_runs(config):
    runs = []
    for family in config.task["families"]:
        for m in config.task["m_values"]:
            topo = multi_state_network(m)
            samples = build_multi_state_set(family, m, topo)
            for seed in config.seeds:
                runs.append(SubRun(0, config.kind, f"{family} M={m}", topo.describe(), topo, samples,
                                   replace(config.training, seed=seed), {"family": family, "m": m}))
    return runs


def _ghz_w_runs(config, topo_spec):
    topo = resolve_topology(topo_spec)
    label = topology_label(topo_spec, topo)
    spec = StatePairSpec("ghz_w")
    samples = build_training_set(spec, topo)
    helstrom = spec.helstrom()
    return [SubRun(0, config.kind, label, label, topo, samples,
                   replace(config.training, seed=seed), {"pair": "ghz_vs_w"}, helstrom)
            for seed in config.seeds]


def _werner_runs(config, topo_spec):
    topo = resolve_topology(topo_spec)
    label = topology_label(topo_spec, topo)
    test_p = [float(p) for p in config.task["test_p"]]
    train_set, test_set = build_werner_sets(
        WernerSetSpec(tuple(float(p) for p in config.task["train_p"]), tuple(test_p)), topo)
    return [SubRun(0, config.kind, label, label, topo, train_set,
                   replace(config.training, seed=seed), {"n_train": len(train_set)},
                   test_samples=test_set, test_p=test_p)
            for seed in config.seeds]


def _plan_for(config, kind, topo_spec):
    if kind == "binary_real":
        return _pair_runs(config, "real_pure", config.task["thetas"], "theta", topo_spec)
    if kind == "binary_complex":
        return _pair_runs(config, "complex_pure", config.task["phis"], "phi", topo_spec)
    if kind == "binary_mixed":
        return _mixed_runs(config, topo_spec)
    if kind == "multi_state":
        return _multi_state_runs(config)
    if kind == "ghz_w":
        return _ghz_w_runs(config, topo_spec)
    if kind == "werner_classify":
        return _werner_runs(config, topo_spec)
    raise QSNNError(f"no planner for experiment kind {kind!r}")


def plan_subruns(config):
    config.validate()
    if config.kind == "topology_ablation":
        runs = []
        for spec in config.task["topologies"]:
            runs.extend(_plan_for(config, config.task["task"], spec))
    else:
        runs = _plan_for(config, config.kind, config.topology)
    for idx, run in enumerate(runs):
        run.index = idx
    return runs


# --- Execution ---
def _execute(run):
    start = time.time()
    log_progress(f"Sub-run {run.index} started: {run.tag}")
    try:
        trace = train(run.topo, run.samples, run.training, tag=f"run {run.index}")
        result = SubRunResult(run, trace)
        if run.test_samples is not None:
            result.confusion, result.per_state = evaluate_classifier(
                trace.final_params, run.topo, run.test_samples, run.test_p, run.training.evolution_time)
    except QSNNError as e:
        raise QSNNError(f"[{run.tag}] {e}") from e

    result.elapsed = time.time() - start
    final = trace.final.avg_success
    log_progress(f"Sub-run {run.index} finished in {result.elapsed:.2f} seconds: P_N={final:.6f}"
                 + ("" if np.isnan(run.helstrom) else f" P_H={run.helstrom:.6f}"))
    if not np.isnan(run.helstrom) and final > run.helstrom + HELSTROM_SLACK:
        log_progress(f"Warning: sub-run {run.index} exceeds the Helstrom bound ({final:.9f} > {run.helstrom:.9f})")
    return result


def run_experiment(config, workers=None, write=True):
    """Train every sub-run of `config`, build the result tables and (optionally) write them."""
    start = time.time()
    runs = plan_subruns(config)
    workers = workers or get_worker_count()
    log_progress(f"--- Experiment '{config.name or config.kind}' STARTING: {len(runs)} sub-runs, {workers} worker(s) ---")

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_execute, runs))
    else:
        results = [_execute(run) for run in runs]

    bundle = ExperimentResults(config, results, build_tables(results))
    if write:
        emit_outputs(bundle)
    log_progress(f"--- Experiment '{config.name or config.kind}' FINISHED in {time.time() - start:.2f} seconds ---")
    return bundle


# --- Tables ---
def _run_columns(run):
    cols = {"run": run.index, "group": run.group, "topology": run.topology_label, "seed": run.training.seed}
    cols.update(run.task_params)
    return cols


def build_tables(results):
    trace_frames, summary_rows, param_rows = [], [], []
    for res in results:
        run, trace = res.run, res.trace
        frame = trace.to_frame()
        for pos, (name, value) in enumerate(_run_columns(run).items()):
            frame.insert(pos, name, value)
        trace_frames.append(frame)

        history = [rec.avg_success for rec in trace.records]
        summary = _run_columns(run)
        summary.update({
            "n_parameters": run.topo.n_parameters,
            "iterations": run.training.iterations,
            "initial_success": history[0],
            "final_success": history[-1],
            "best_success": max(history),
            "final_loss": trace.final.loss,
            "helstrom": run.helstrom,
            "gap": run.helstrom - history[-1],
        })
        summary_rows.append(summary)

        n_h = len(run.topo.hamiltonian_edges)
        edges = list(run.topo.hamiltonian_edges) + list(run.topo.lindblad_edges)
        for k, (init, final) in enumerate(zip(trace.initial_params.concat(), trace.final_params.concat())):
            a, b = edges[k]
            param_rows.append({"run": run.index, "topology": run.topology_label, "seed": run.training.seed,
                               "index": k, "type": "h" if k < n_h else "gamma",
                               "edge": f"{a}-{b}" if k < n_h else f"{a}->{b}",
                               "initial": init, "final": final})

    trace_df = pd.concat(trace_frames, ignore_index=True)
    summary_df = pd.DataFrame(summary_rows)
    tables = {"trace": trace_df, "summary": summary_df, "parameters": pd.DataFrame(param_rows)}

    grouped = trace_df.groupby(["group", "iteration"], sort=False)
    aggregate = grouped.agg(mean_success=("avg_success", "mean"),
                            var_success=("avg_success", lambda s: float(np.var(s))),
                            mean_loss=("loss", "mean"),
                            n_runs=("run", "nunique")).reset_index()
    helstrom = summary_df.groupby("group", sort=False)["helstrom"].mean()
    aggregate["mean_helstrom"] = aggregate["group"].map(helstrom)
    tables["aggregate"] = aggregate

    classifier = [res for res in results if res.confusion is not None]
    if classifier:
        conf_frames, state_frames = [], []
        for res in classifier:
            conf = res.confusion.to_frame()
            state = res.per_state.copy()
            for frame in (conf, state):
                frame.insert(0, "seed", res.run.training.seed)
                frame.insert(0, "topology", res.run.topology_label)
                frame.insert(0, "run", res.run.index)
            conf_frames.append(conf)
            state_frames.append(state)
        tables["confusion"] = pd.concat(conf_frames, ignore_index=True)
        tables["per_state"] = pd.concat(state_frames, ignore_index=True)
    return tables


# --- Output ---
def resolve_output_dir(config):
    return config.output_dir or os.path.join(get_results_dir(), config.name or config.kind)


def emit_outputs(results, out_dir=None):
    """Write every table as CSV plus manifest.json; returns {name: path}."""
    out_dir = out_dir or resolve_output_dir(results.config)
    paths = {}
    try:
        os.makedirs(out_dir, exist_ok=True)
        for name, df in results.tables.items():
            path = os.path.join(out_dir, f"{name}.csv")
            df.to_csv(path, index=False, float_format=FLOAT_FORMAT)
            paths[name] = path

        manifest = {
            "artifact": ARTIFACT_NAME,
            "version": __version__,
            "config": results.config.to_dict(),
            "seeds": list(results.config.seeds),
            "files": {name: os.path.basename(p) for name, p in paths.items()},
            "rows": {name: int(len(df)) for name, df in results.tables.items()},
        }
        path = os.path.join(out_dir, "manifest.json")
        with open(path, "w") as f:
            json.dump(manifest, f, indent=2, sort_keys=True)
            f.write("\n")
        paths["manifest"] = path
    except OSError as e:
        raise QSNNError(f"failed writing results to {out_dir}: {e}") from e

    for name, p in paths.items():
        log_progress(f"Wrote {name}: {p}")
    return paths
