# utils/results_loader.py
import os
import json
import pandas as pd
from utils.errors import QSNNError
from utils.helper import get_results_dir, log_progress

# --- Data Caching ---
RUN_CACHE = {}  # run_dir -> (manifest mtime, loaded run)
TABLE_NAMES = ("summary", "aggregate", "trace", "parameters", "confusion", "per_state")


def list_runs(results_dir=None):
    """Return dropdown options for every directory under results_dir holding a manifest.json."""
    results_dir = results_dir or get_results_dir()
    if not os.path.isdir(results_dir):
        log_progress(f"Results directory not found: {results_dir}")
        return []

    options = []
    for entry in sorted(os.listdir(results_dir)):
        manifest_path = os.path.join(results_dir, entry, "manifest.json")
        if os.path.exists(manifest_path):
            options.append({"label": entry, "value": os.path.join(results_dir, entry)})
    return options


def load_run(run_dir, force_reload=False):
    """Load manifest and every emitted table of a run (cached until the manifest changes)."""
    manifest_path = os.path.join(run_dir, "manifest.json")
    if not os.path.exists(manifest_path):
        raise QSNNError(f"no manifest.json in {run_dir}")

    mtime = os.path.getmtime(manifest_path)
    cached = RUN_CACHE.get(run_dir)
    if cached and cached[0] == mtime and not force_reload:
        return cached[1]

    try:
        with open(manifest_path, "r") as f:
            manifest = json.load(f)
    except json.JSONDecodeError as e:
        raise QSNNError(f"{manifest_path} is not valid JSON: {e}") from e

    tables = {}
    for name in TABLE_NAMES:
        path = os.path.join(run_dir, f"{name}.csv")
        if os.path.exists(path):
            tables[name] = pd.read_csv(path)

    run = {"manifest": manifest, "tables": tables}
    RUN_CACHE[run_dir] = (mtime, run)
    log_progress(f"Loaded run {run_dir} ({', '.join(tables)})")
    return run


def table_payload(df, decimals=6):
    """DataTable `data` and `columns` for a frame, floats rounded for display."""
    if df is None or df.empty:
        return [], []
    shown = df.round(decimals)
    columns = [{"name": c, "id": c} for c in shown.columns]
    return shown.to_dict("records"), columns


def run_overview(run):
    """Key/value rows describing a run for the header card."""
    manifest = run["manifest"]
    config = manifest.get("config", {})
    training = config.get("training", {})
    summary = run["tables"].get("summary")
    rows = [
        ("Experiment", config.get("kind", "?")),
        ("Seeds", ", ".join(str(s) for s in manifest.get("seeds", []))),
        ("Learning rate", training.get("learning_rate")),
        ("Iterations", training.get("iterations")),
        ("Evolution time T", training.get("evolution_time")),
        ("Version", manifest.get("version")),
    ]
    if summary is not None and not summary.empty:
        rows.append(("Mean final P_N", round(float(summary["final_success"].mean()), 6)))
        if summary["helstrom"].notna().any():
            rows.append(("Mean Helstrom P_H", round(float(summary["helstrom"].mean()), 6)))
    return rows
