import numpy as np
import pytest

from tests.helpers import random_input, random_params
from utils import training
from utils.errors import ConfigError, ContractViolation, DimensionError, QSNNError
from utils.network import ParameterVector, explicit_topology, standard_topology
from utils.tasks import StatePairSpec, build_training_set
from utils.tensor_core import DensityMatrix
from utils.training import (MEAN_CLASSIFICATION, WEIGHTED_DISCRIMINATION, LabeledSample, TrainingConfig,
                            gd_step, loss, loss_gradient, success_probability, train)


def basis_state(n, k):
    m = np.zeros((n, n))
    m[k, k] = 1.0
    return DensityMatrix(m)


# --- readout ---
def test_success_probability_examples():
    assert success_probability(basis_state(6, 4), 4) == 1.0
    assert success_probability(basis_state(6, 5), 4) == 0.0
    assert success_probability(DensityMatrix(np.eye(6) / 6), 2) == pytest.approx(1 / 6)


# --- loss ---
def test_loss_perfect_outputs():
    samples = [LabeledSample(basis_state(6, 0), 4, 0.5), LabeledSample(basis_state(6, 1), 5, 0.5)]
    assert loss(samples, [basis_state(6, 4), basis_state(6, 5)], WEIGHTED_DISCRIMINATION) == 0.0


def test_loss_half_right():
    samples = [LabeledSample(basis_state(6, 0), 4, 0.5), LabeledSample(basis_state(6, 1), 5, 0.5)]
    assert loss(samples, [basis_state(6, 4), basis_state(6, 4)], WEIGHTED_DISCRIMINATION) == pytest.approx(0.5)


def test_loss_mean_classification():
    outputs, samples = [], []
    for p in (0.9, 0.8, 0.7, 0.6):
        outputs.append(DensityMatrix(np.diag([0, 0, p, 1 - p])))
        samples.append(LabeledSample(basis_state(4, 0), 2, 0.0))
    assert loss(samples, outputs, MEAN_CLASSIFICATION) == pytest.approx(0.25)


def test_loss_empty():
    with pytest.raises(QSNNError):
        loss([], [], WEIGHTED_DISCRIMINATION)


# --- gradients ---
def _pair_samples(topo, theta=np.pi / 3):
    return build_training_set(StatePairSpec("real_pure", (0.0,), (theta,)), topo)


def _loss_at(topo, theta, samples, config):
    params = ParameterVector.from_flat(topo, theta)
    return training.evaluate(topo, params, samples, config.evolution_time, config.loss_kind,
                             with_gradient=False).loss


@pytest.mark.parametrize("shape", [(2, [2], 2), pytest.param((4, [4], 2), marks=pytest.mark.slow)])
def test_loss_gradient_matches_finite_differences(shape, rng):
    topo = standard_topology(*shape)
    eps = 1e-5
    config = TrainingConfig(loss_kind=MEAN_CLASSIFICATION if shape[0] == 4 else WEIGHTED_DISCRIMINATION)
    for _ in range(20):
        params = random_params(topo, rng)
        if shape[0] == 2:
            samples = [LabeledSample(random_input(topo, rng), topo.output_neuron(k), 0.5) for k in (0, 1)]
        else:
            samples = [LabeledSample(random_input(topo, rng), topo.output_neuron(k % 2), 0.25) for k in range(4)]
        grad = loss_gradient(topo, params, samples, config)
        theta = params.concat()
        fd = np.zeros_like(theta)
        for k in range(theta.size):
            step = np.zeros_like(theta)
            step[k] = eps
            fd[k] = (_loss_at(topo, theta + step, samples, config)
                     - _loss_at(topo, theta - step, samples, config)) / (2 * eps)
        assert np.max(np.abs(grad - fd)) <= 1e-5 * max(np.max(np.abs(fd)), 1e-3)


def test_loss_gradient_zero_at_origin():
    topo = standard_topology(2, [2], 2)
    params = ParameterVector(np.zeros(5), np.zeros(8))
    grad = loss_gradient(topo, params, _pair_samples(topo), TrainingConfig())
    np.testing.assert_allclose(grad, np.zeros(13), atol=1e-14)


def test_loss_gradient_formula(monkeypatch):
    topo = explicit_topology([1, 1], [], [(0, 1)])
    params = ParameterVector([], [0.3])
    sample = LabeledSample(basis_state(2, 0), 1, 1.0)
    fake_grad = np.diag([-0.1, 0.1]).astype(complex)

    def fake_output_gradients(bundle, rho_in):
        return basis_state(2, 1), [fake_grad]

    monkeypatch.setattr(training, "output_gradients", fake_output_gradients)
    grad = loss_gradient(topo, params, [sample], TrainingConfig())
    np.testing.assert_allclose(grad, [-0.1])


# --- update rule ---
def test_gd_step_examples():
    params = ParameterVector([1.0], [1.0])
    same = gd_step(params, [0.0, 0.0], 10.0)
    np.testing.assert_array_equal(same.concat(), [1.0, 1.0])
    np.testing.assert_allclose(gd_step(params, [0.1, -0.2], 10.0).concat(), [0.0, 3.0])


def test_gd_step_linearity():
    params = ParameterVector([0.3, -0.2], [0.5])
    g = np.array([0.01, 0.02, -0.03])
    twice = gd_step(gd_step(params, g, 10.0), g, 10.0)
    once = gd_step(params, 2 * g, 10.0)
    np.testing.assert_allclose(twice.concat(), once.concat(), atol=1e-15)


def test_gd_step_length_mismatch():
    with pytest.raises(DimensionError):
        gd_step(ParameterVector([1.0], [1.0]), [0.1], 1.0)


# --- config ---
@pytest.mark.parametrize("field, value", [("learning_rate", 0.0), ("iterations", -1),
                                          ("init_low", 2.0), ("loss_kind", "hinge"),
                                          ("evolution_time", 0.0), ("learning_rate", "10"),
                                          ("log_every", None), ("iterations", 2.5), ("seed", True),
                                          ("init_high", float("inf"))])
def test_training_config_validation(field, value):
    config = TrainingConfig(**{field: value})
    with pytest.raises(ConfigError) as err:
        config.validate()
    assert err.value.field == field


# --- training loop ---
def test_train_zero_iterations():
    topo = standard_topology(2, [2], 2)
    trace = train(topo, _pair_samples(topo), TrainingConfig(iterations=0, log_every=0))
    assert len(trace.records) == 1
    np.testing.assert_array_equal(trace.initial_params.concat(), trace.final_params.concat())


def test_train_initialization_range():
    topo = standard_topology(2, [2], 2)
    trace = train(topo, _pair_samples(topo), TrainingConfig(iterations=0, log_every=0, seed=5))
    theta = trace.initial_params.concat()
    assert np.all((theta >= 0.0) & (theta < 1.0))


def test_train_is_deterministic():
    topo = standard_topology(2, [2], 2)
    config = TrainingConfig(iterations=5, seed=11, log_every=0)
    a = train(topo, _pair_samples(topo), config)
    b = train(topo, _pair_samples(topo), config)
    assert a.records == b.records
    np.testing.assert_array_equal(a.final_params.concat(), b.final_params.concat())
    c = train(topo, _pair_samples(topo), TrainingConfig(iterations=5, seed=12, log_every=0))
    assert c.records != a.records


def test_train_trace_invariants():
    topo = standard_topology(2, [2], 2)
    trace = train(topo, _pair_samples(topo), TrainingConfig(iterations=10, log_every=0))
    frame = trace.to_frame()
    assert list(frame["iteration"]) == list(range(11))
    for rec in trace.records:
        assert rec.loss == pytest.approx(1 - rec.avg_success)
        assert -1e-9 <= rec.loss <= 1 + 1e-9
        assert all(-1e-9 <= p <= 1 + 1e-9 for p in rec.success)


def test_train_rejects_bad_samples():
    topo = standard_topology(2, [2], 2)
    samples = _pair_samples(topo)
    bad_label = [LabeledSample(samples[0].rho_in, 2, 1.0)]
    with pytest.raises(QSNNError):
        train(topo, bad_label, TrainingConfig(iterations=1, log_every=0))
    with pytest.raises(QSNNError):
        train(topo, [], TrainingConfig(iterations=1, log_every=0))


def test_weighted_loss_requires_unit_weight_sum():
    topo = standard_topology(2, [2], 2)
    samples = [LabeledSample(s.rho_in, s.label, 0.7) for s in _pair_samples(topo)]
    with pytest.raises(ContractViolation, match="sum to 1"):
        train(topo, samples, TrainingConfig(iterations=1, log_every=0))
    with pytest.raises(ContractViolation):
        loss_gradient(topo, ParameterVector(np.zeros(5), np.zeros(8)), samples, TrainingConfig())
    mean = TrainingConfig(iterations=1, log_every=0, loss_kind=MEAN_CLASSIFICATION)
    assert len(train(topo, samples, mean).records) == 2


@pytest.mark.slow
def test_train_orthogonal_states_converge():
    topo = standard_topology(2, [2], 2)
    samples = _pair_samples(topo, np.pi / 2)
    trace = train(topo, samples, TrainingConfig(learning_rate=10.0, iterations=100, log_every=0))
    assert trace.final.avg_success >= 0.98
    first, last = trace.to_frame()["loss"].iloc[:10].mean(), trace.to_frame()["loss"].iloc[-10:].mean()
    assert last < first
