# utils/config.py
"""Experiment configs: JSON documents parsed into ExperimentConfig, plus named presets."""
import copy
import json
import os
from dataclasses import dataclass, field

import numpy as np

from utils.errors import ConfigError, QSNNError
from utils.network import VARIANTS, explicit_topology, standard_topology, topology_variant
from utils.tasks import GHZ_W_SHAPE, QUBIT_PAIR_SHAPE, WERNER_SHAPE, WERNER_TEST_P, WERNER_TRAIN_P
from utils.training import MEAN_CLASSIFICATION, WEIGHTED_DISCRIMINATION, TrainingConfig

KINDS = ("binary_real", "binary_complex", "binary_mixed", "multi_state",
         "ghz_w", "werner_classify", "topology_ablation")
ABLATION_TASKS = ("binary_real", "binary_complex", "werner_classify")

ANGLE_GRID = [k * np.pi / 6 for k in range(12)]


def _shape_spec(shape):
    n_input, hidden, n_output = shape
    return {"shape": [n_input, list(hidden), n_output]}


DEFAULT_TOPOLOGY = {
    "binary_real": _shape_spec(QUBIT_PAIR_SHAPE),
    "binary_complex": _shape_spec(QUBIT_PAIR_SHAPE),
    "binary_mixed": _shape_spec(QUBIT_PAIR_SHAPE),
    "ghz_w": _shape_spec(GHZ_W_SHAPE),
    "werner_classify": _shape_spec(WERNER_SHAPE),
}

DEFAULT_LOSS = {"multi_state": MEAN_CLASSIFICATION, "werner_classify": MEAN_CLASSIFICATION}


# --- Topology specs ---
def resolve_topology(spec):
    """Build a NetworkTopology from {"shape"}, {"shape", "variant"} or explicit edge lists."""
    if not isinstance(spec, dict):
        raise ConfigError("topology", f"must be an object, got {type(spec).__name__}")
    try:
        if "layer_sizes" in spec:
            return explicit_topology(spec["layer_sizes"], spec.get("hamiltonian_edges", []),
                                     spec.get("lindblad_edges", []))
        if "shape" not in spec:
            raise ConfigError("topology", "needs 'shape' or 'layer_sizes'")
        n_input, hidden, n_output = spec["shape"]
        variant = spec.get("variant", "a")
        if variant not in VARIANTS:
            raise ConfigError("topology.variant", f"must be one of {VARIANTS}, got {variant!r}")
        if variant == "a":
            return standard_topology(n_input, hidden, n_output)
        return topology_variant(variant, n_input, hidden, n_output)
    except ConfigError:
        raise
    except (QSNNError, TypeError, ValueError) as e:
        raise ConfigError("topology", str(e))


def topology_label(spec, topo):
    if spec.get("label"):
        return spec["label"]
    variant = spec.get("variant")
    return f"{topo.describe()}({variant})" if variant else topo.describe()


# --- Experiment config ---
@dataclass
class ExperimentConfig:
    kind: str
    name: str = ""
    topology: dict = None
    training: TrainingConfig = field(default_factory=TrainingConfig)
    task: dict = field(default_factory=dict)
    seeds: list = field(default_factory=lambda: [0])
    output_dir: str = ""

    def validate(self):
        if self.kind not in KINDS:
            raise ConfigError("kind", f"must be one of {KINDS}, got {self.kind!r}")
        if not self.seeds or not all(isinstance(s, int) and not isinstance(s, bool) for s in self.seeds):
            raise ConfigError("seeds", f"must be a non-empty list of integers, got {self.seeds!r}")
        try:
            self.training.validate()
        except ConfigError as e:
            raise ConfigError(f"training.{e.field}", e.message) from e
        if self.topology is not None:
            resolve_topology(self.topology)
        getattr(self, f"_validate_{self.kind}")()
        return self

    # --- kind-specific completeness ---
    def _require_list(self, key, allow_empty=False):
        value = self.task.get(key)
        if not isinstance(value, list) or (not value and not allow_empty):
            raise ConfigError(f"task.{key}", f"must be a non-empty list, got {value!r}")
        return value

    def _require_numbers(self, key, low=None, high=None):
        values = self._require_list(key)
        for v in values:
            if not isinstance(v, (int, float)) or isinstance(v, bool) or not np.isfinite(v):
                raise ConfigError(f"task.{key}", f"entries must be finite numbers, got {v!r}")
            if (low is not None and v < low) or (high is not None and v > high):
                raise ConfigError(f"task.{key}", f"entries must lie in [{low}, {high}], got {v}")
        return values

    def _validate_binary_real(self):
        self._require_numbers("thetas")

    def _validate_binary_complex(self):
        self._require_numbers("phis")

    def _validate_binary_mixed(self):
        self._require_numbers("radii", 0.0, 1.0)
        n_pairs = self.task.get("pairs_per_radius")
        if not isinstance(n_pairs, int) or n_pairs < 1:
            raise ConfigError("task.pairs_per_radius", f"must be a positive integer, got {n_pairs!r}")
        if not isinstance(self.task.get("pair_seed"), int):
            raise ConfigError("task.pair_seed", f"must be an integer, got {self.task.get('pair_seed')!r}")

    def _validate_multi_state(self):
        for m in self._require_list("m_values"):
            if not isinstance(m, int) or m < 2:
                raise ConfigError("task.m_values", f"entries must be integers >= 2, got {m!r}")
        for fam in self._require_list("families"):
            if fam not in ("real_pure", "complex_pure"):
                raise ConfigError("task.families", f"entries must be real_pure or complex_pure, got {fam!r}")
        if self.topology is not None:
            raise ConfigError("topology", "multi_state builds a 2-M-M network per M; leave topology unset")

    def _validate_ghz_w(self):
        pass

    def _validate_werner_classify(self):
        self._require_numbers("train_p", 0.0, 1.0)
        self._require_numbers("test_p", 0.0, 1.0)

    def _validate_topology_ablation(self):
        inner = self.task.get("task")
        if inner not in ABLATION_TASKS:
            raise ConfigError("task.task", f"must be one of {ABLATION_TASKS}, got {inner!r}")
        for spec in self._require_list("topologies"):
            resolve_topology(spec)
        # the inner task's own parameters must be complete too
        getattr(self, f"_validate_{inner}")()

    # --- (de)serialization ---
    def to_dict(self):
        return {
            "kind": self.kind,
            "name": self.name,
            "topology": copy.deepcopy(self.topology),
            "training": self.training.to_dict(),
            "task": copy.deepcopy(self.task),
            "seeds": list(self.seeds),
            "output_dir": self.output_dir,
        }

    @classmethod
    def from_dict(cls, data):
        if not isinstance(data, dict):
            raise ConfigError("<root>", "config must be a JSON object")
        if "kind" not in data:
            raise ConfigError("kind", "missing")
        kind = data["kind"]
        if kind not in KINDS:
            raise ConfigError("kind", f"must be one of {KINDS}, got {kind!r}")

        preset = default_config_dict(kind)
        unknown = set(data) - set(preset)
        if unknown:
            raise ConfigError(sorted(unknown)[0], "unknown config field")

        for key in ("training", "task"):
            if not isinstance(data.get(key, {}) or {}, dict):
                raise ConfigError(key, f"must be an object, got {data[key]!r}")
        if not isinstance(data.get("seeds", []), list):
            raise ConfigError("seeds", f"must be a non-empty list of integers, got {data['seeds']!r}")

        training = dict(preset["training"])
        training_in = data.get("training", {}) or {}
        unknown = set(training_in) - set(training)
        if unknown:
            raise ConfigError(f"training.{sorted(unknown)[0]}", "unknown training field")
        training.update(training_in)

        task = dict(preset["task"])
        task.update(data.get("task", {}) or {})

        return cls(kind=kind,
                   name=data.get("name", preset["name"]),
                   topology=data.get("topology", preset["topology"]),
                   training=TrainingConfig(**training),
                   task=task,
                   seeds=list(data.get("seeds", preset["seeds"])),
                   output_dir=data.get("output_dir", preset["output_dir"]))

    def apply_overrides(self, seed=None, out=None, iterations=None, eta=None, time=None):
        """Command-line flags override config values."""
        if seed is not None:
            self.seeds = [int(seed)]
        if out is not None:
            self.output_dir = out
        if iterations is not None:
            self.training.iterations = int(iterations)
        if eta is not None:
            self.training.learning_rate = float(eta)
        if time is not None:
            self.training.evolution_time = float(time)
        return self


# --- Presets ---
def default_config_dict(kind):
    training = TrainingConfig(loss_kind=DEFAULT_LOSS.get(kind, WEIGHTED_DISCRIMINATION)).to_dict()
    base = {"kind": kind, "name": kind, "topology": copy.deepcopy(DEFAULT_TOPOLOGY.get(kind)),
            "training": training, "task": {}, "seeds": [0], "output_dir": ""}

    if kind == "binary_real":
        base["training"]["learning_rate"] = 10.0
        base["task"] = {"thetas": list(ANGLE_GRID)}
    elif kind == "binary_complex":
        base["task"] = {"phis": list(ANGLE_GRID)}
    elif kind == "binary_mixed":
        base["task"] = {"radii": [round(0.1 * k, 10) for k in range(1, 10)],
                        "pairs_per_radius": 100, "pair_seed": 0}
    elif kind == "multi_state":
        base["task"] = {"m_values": [3, 4, 5], "families": ["real_pure", "complex_pure"]}
    elif kind == "werner_classify":
        base["task"] = {"train_p": list(WERNER_TRAIN_P), "test_p": list(WERNER_TEST_P)}
    elif kind == "topology_ablation":
        base["task"] = {"task": "binary_complex", "phis": list(ANGLE_GRID),
                        "topologies": [{"shape": [2, [], 2]}, {"shape": [2, [2], 2]},
                                       {"shape": [2, [3], 2]}, {"shape": [2, [2, 2], 2]}]}
    return base


PRESETS = {
    "ablation_hidden_binary": {
        "kind": "topology_ablation", "name": "ablation_hidden_binary",
        "training": {"learning_rate": 20.0},
        "task": {"task": "binary_complex", "phis": list(ANGLE_GRID),
                 "topologies": [{"shape": [2, [], 2]}, {"shape": [2, [2], 2]},
                                {"shape": [2, [3], 2]}, {"shape": [2, [2, 2], 2]}]},
    },
    "ablation_hidden_werner": {
        "kind": "topology_ablation", "name": "ablation_hidden_werner",
        "training": {"loss_kind": MEAN_CLASSIFICATION, "learning_rate": 20.0},
        "task": {"task": "werner_classify", "train_p": list(WERNER_TRAIN_P), "test_p": list(WERNER_TEST_P),
                 "topologies": [{"shape": [4, [], 2]}, {"shape": [4, [4], 2]},
                                {"shape": [4, [5], 2]}, {"shape": [4, [4, 4], 2]}]},
    },
    "ablation_coupling": {
        "kind": "topology_ablation", "name": "ablation_coupling",
        "training": {"learning_rate": 10.0},
        "task": {"task": "binary_real", "thetas": list(ANGLE_GRID),
                 "topologies": [{"shape": [2, [2], 2], "variant": v} for v in VARIANTS]},
    },
}


def preset_config(name):
    if name in KINDS:
        return ExperimentConfig.from_dict({"kind": name})
    if name in PRESETS:
        return ExperimentConfig.from_dict(copy.deepcopy(PRESETS[name]))
    raise ConfigError("preset", f"unknown preset {name!r}; expected one of {KINDS + tuple(PRESETS)}")


def load_config(path, expected_kind=None):
    if not os.path.exists(path):
        raise ConfigError("--config", f"file not found: {path}")
    try:
        with open(path, "r") as f:
            data = json.load(f)
    except json.JSONDecodeError as e:
        raise ConfigError("--config", f"{path} is not valid JSON: {e}")
    # manifests wrap the resolved config
    if isinstance(data, dict) and "config" in data and "kind" not in data:
        data = data["config"]
    config = ExperimentConfig.from_dict(data)
    if expected_kind and config.kind != expected_kind:
        raise ConfigError("kind", f"config describes {config.kind!r} but the command runs {expected_kind!r}")
    return config
