# utils/training.py
"""Measurement readout, loss functions and the full-batch gradient-descent loop."""
from dataclasses import dataclass, field, asdict

import numpy as np
import pandas as pd

from utils.errors import ConfigError, ContractViolation, DimensionError, QSNNError
from utils.helper import log_progress
from utils.liouvillian import DEFAULT_EVOLUTION_TIME, assemble, evolve, output_gradients
from utils.network import ParameterVector

WEIGHTED_DISCRIMINATION = "weighted_discrimination"
MEAN_CLASSIFICATION = "mean_classification"
LOSS_KINDS = (WEIGHTED_DISCRIMINATION, MEAN_CLASSIFICATION)
WEIGHT_SUM_TOL = 1e-12


@dataclass(frozen=True)
class LabeledSample:
    rho_in: object  # DensityMatrix, already encoded to the network dimension
    label: int      # global index of an output-layer neuron
    weight: float = 1.0


@dataclass
class TrainingConfig:
    learning_rate: float = 20.0
    iterations: int = 100
    evolution_time: float = DEFAULT_EVOLUTION_TIME
    seed: int = 0
    init_low: float = 0.0
    init_high: float = 1.0
    loss_kind: str = WEIGHTED_DISCRIMINATION
    log_every: int = 10

    def _require_number(self, name, integer=False):
        value = getattr(self, name)
        kind = "an integer" if integer else "a finite number"
        if isinstance(value, bool) or not isinstance(value, (int, float, np.integer, np.floating)):
            raise ConfigError(name, f"must be {kind}, got {value!r}")
        if not np.isfinite(value) or (integer and int(value) != value):
            raise ConfigError(name, f"must be {kind}, got {value!r}")
        return value

    def validate(self):
        for name in ("learning_rate", "evolution_time", "init_low", "init_high"):
            self._require_number(name)
        for name in ("iterations", "seed", "log_every"):
            self._require_number(name, integer=True)
        if not self.learning_rate > 0:
            raise ConfigError("learning_rate", f"must be > 0, got {self.learning_rate}")
        if self.iterations < 0:
            raise ConfigError("iterations", f"must be a non-negative integer, got {self.iterations}")
        if not self.evolution_time > 0:
            raise ConfigError("evolution_time", f"must be > 0, got {self.evolution_time}")
        if not self.init_low < self.init_high:
            raise ConfigError("init_low", f"must be below init_high ({self.init_low} >= {self.init_high})")
        if self.loss_kind not in LOSS_KINDS:
            raise ConfigError("loss_kind", f"must be one of {LOSS_KINDS}, got {self.loss_kind!r}")
        if self.log_every < 0:
            raise ConfigError("log_every", f"must be >= 0, got {self.log_every}")
        return self

    def to_dict(self):
        return asdict(self)


@dataclass(frozen=True)
class TraceRecord:
    iteration: int
    loss: float
    success: tuple
    avg_success: float


@dataclass
class TrainingTrace:
    initial_params: ParameterVector
    final_params: ParameterVector = None
    records: list = field(default_factory=list)

    @property
    def final(self):
        return self.records[-1]

    def to_frame(self):
        rows = []
        for rec in self.records:
            row = {"iteration": rec.iteration, "loss": rec.loss, "avg_success": rec.avg_success}
            for s, p in enumerate(rec.success):
                row[f"success_{s}"] = p
            rows.append(row)
        return pd.DataFrame(rows)


@dataclass
class Evaluation:
    outputs: list
    success: np.ndarray
    loss: float
    gradient: np.ndarray = None

    @property
    def avg_success(self):
        return 1.0 - self.loss


# --- Readout and loss ---
def success_probability(rho_out, label):
    """Tr(rho_out |l><l|), clamped to [0, 1] for reporting."""
    if not 0 <= label < rho_out.dim:
        raise ContractViolation(f"label {label} outside the {rho_out.dim}-neuron network")
    return float(np.clip(np.real(rho_out.matrix[label, label]), 0.0, 1.0))


def _raw_success(rho_out, label):
    return float(np.real(rho_out.matrix[label, label]))


def sample_weights(samples, kind):
    if not samples:
        raise QSNNError("loss needs at least one sample")
    if kind == WEIGHTED_DISCRIMINATION:
        return np.array([s.weight for s in samples], dtype=float)
    if kind == MEAN_CLASSIFICATION:
        return np.full(len(samples), 1.0 / len(samples))
    raise ConfigError("loss_kind", f"must be one of {LOSS_KINDS}, got {kind!r}")


def loss(samples, outputs, kind):
    if len(samples) != len(outputs):
        raise DimensionError(f"{len(samples)} samples but {len(outputs)} outputs")
    weights = sample_weights(samples, kind)
    success = np.array([_raw_success(rho, s.label) for s, rho in zip(samples, outputs)])
    return float(1.0 - np.dot(weights, success))


def _check_samples(topo, samples, kind=None):
    if not samples:
        raise QSNNError("training set is empty")
    if kind == WEIGHTED_DISCRIMINATION:
        total = sum(s.weight for s in samples)
        if abs(total - 1.0) > WEIGHT_SUM_TOL:
            raise ContractViolation(f"sample weights must sum to 1 for {kind}, got {total}")
    outputs = set(topo.output_neurons)
    for idx, s in enumerate(samples):
        if s.rho_in.dim != topo.N:
            raise DimensionError(f"sample {idx} has dimension {s.rho_in.dim}, network has {topo.N} neurons")
        if s.label not in outputs:
            raise ContractViolation(f"sample {idx} label {s.label} is not an output neuron {sorted(outputs)}")


def evaluate(topo, params, samples, t, kind, with_gradient=True):
    """Evolve every sample once and return outputs, success, loss and optionally dLoss/dtheta."""
    bundle = assemble(topo, params, t)
    weights = sample_weights(samples, kind)

    outputs = []
    success = np.zeros(len(samples))
    gradient = np.zeros(params.size) if with_gradient else None

    for s, sample in enumerate(samples):
        if with_gradient:
            rho_out, grads = output_gradients(bundle, sample.rho_in)
            l = sample.label
            gradient -= weights[s] * np.array([np.real(g[l, l]) for g in grads])
        else:
            rho_out = evolve(bundle, sample.rho_in)
        outputs.append(rho_out)
        success[s] = _raw_success(rho_out, sample.label)

    return Evaluation(outputs, success, float(1.0 - np.dot(weights, success)), gradient)


def loss_gradient(topo, params, samples, config):
    _check_samples(topo, samples, config.loss_kind)
    return evaluate(topo, params, samples, config.evolution_time, config.loss_kind).gradient


def gd_step(params, grad, eta):
    grad = np.asarray(grad, dtype=float).reshape(-1)
    if grad.size != params.size:
        raise DimensionError(f"gradient has {grad.size} entries, parameters have {params.size}")
    theta = params.concat() - eta * grad
    n_h = params.h.size
    return ParameterVector(theta[:n_h], theta[n_h:])


def initial_parameters(topo, config):
    rng = np.random.default_rng(config.seed)
    theta = rng.uniform(config.init_low, config.init_high, size=topo.n_parameters)
    return ParameterVector.from_flat(topo, theta)


# --- Training loop ---
def train(topo, samples, config, tag=""):
    """
    Full-batch gradient descent. Record i holds the loss of the parameters
    after i steps; the last record is the post-update evaluation.
    """
    config.validate()
    _check_samples(topo, samples, config.loss_kind)
    prefix = f"[{tag}] " if tag else ""

    params = initial_parameters(topo, config)
    trace = TrainingTrace(initial_params=params)

    def record(iteration, ev):
        trace.records.append(TraceRecord(iteration, ev.loss, tuple(float(p) for p in ev.success), ev.avg_success))

    for it in range(int(config.iterations)):
        ev = evaluate(topo, params, samples, config.evolution_time, config.loss_kind, with_gradient=True)
        record(it, ev)
        if config.log_every and it % config.log_every == 0:
            log_progress(f"{prefix}iter {it:4d}  loss={ev.loss:.6f}  P_N={ev.avg_success:.6f}")
        params = gd_step(params, ev.gradient, config.learning_rate)

    ev = evaluate(topo, params, samples, config.evolution_time, config.loss_kind, with_gradient=False)
    record(int(config.iterations), ev)
    trace.final_params = params
    if config.log_every:
        log_progress(f"{prefix}done after {config.iterations} iterations  P_N={ev.avg_success:.6f}")
    return trace
