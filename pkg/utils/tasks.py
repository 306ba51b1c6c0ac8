# utils/tasks.py
"""State families, training/test set construction and analytic oracles."""
from dataclasses import dataclass, field

import numpy as np

from utils.errors import ContractViolation, DimensionError
from utils.network import encode_input, standard_topology
from utils.tensor_core import DensityMatrix, as_matrix, kron, trace_norm_hermitian
from utils.training import LabeledSample

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
IDENTITY_2 = np.eye(2, dtype=complex)

FAMILIES = ("real_pure", "complex_pure", "bloch_mixed", "ghz_w")
SEPARABLE, ENTANGLED = "separable", "entangled"
SEPARABILITY_THRESHOLD = 1.0 / 3.0

WERNER_TRAIN_P = (0.0, 0.2, 0.4, 0.8)
WERNER_TEST_P = tuple(round(0.02 * n, 10) for n in range(1, 50))


# --- Single-qubit families ---
def pure_state_real(theta):
    return DensityMatrix.from_ket([np.cos(theta), np.sin(theta)])


def pure_state_complex(phi):
    return DensityMatrix.from_ket(np.array([1.0, np.exp(1j * phi)]) / np.sqrt(2))


def bloch_mixed_state(theta, phi, r):
    if not 0.0 <= r <= 1.0:
        raise ContractViolation(f"Bloch radius must lie in [0, 1], got {r}")
    n_vec = (np.sin(theta) * np.cos(phi), np.sin(theta) * np.sin(phi), np.cos(theta))
    rho = IDENTITY_2 / 2 + (r / 2) * (n_vec[0] * SIGMA_X + n_vec[1] * SIGMA_Y + n_vec[2] * SIGMA_Z)
    return DensityMatrix(rho)


def _check_index(m, s):
    if not 1 <= s <= m:
        raise ContractViolation(f"state index s={s} outside 1..{m}")


def multi_state_real(m, s):
    _check_index(m, s)
    angle = 2 * np.pi * s / m
    return DensityMatrix.from_ket([np.cos(angle), np.sin(angle)])


def multi_state_complex(m, s):
    _check_index(m, s)
    return DensityMatrix.from_ket(np.array([1.0, np.exp(2j * np.pi * s / m)]) / np.sqrt(2))


# --- Multi-qubit families ---
def _basis_ket(dim, *indices):
    ket = np.zeros(dim, dtype=complex)
    ket[list(indices)] = 1.0
    return ket


def ghz_state():
    # |b2 b1 b0> -> 4*b2 + 2*b1 + b0
    return DensityMatrix.from_ket(_basis_ket(8, 0b000, 0b111))


def w_state():
    return DensityMatrix.from_ket(_basis_ket(8, 0b001, 0b010, 0b100))


def _require_unitary(u, name):
    u = as_matrix(u)
    if u.shape != (2, 2) or np.max(np.abs(u @ u.conj().T - IDENTITY_2)) > 1e-10:
        raise ContractViolation(f"{name} is not a 2x2 unitary")
    return u


def werner_like(p, u1=SIGMA_Z, u2=IDENTITY_2):
    if not 0.0 <= p <= 1.0:
        raise ContractViolation(f"mixing weight p must lie in [0, 1], got {p}")
    u1 = _require_unitary(u1, "u1")
    u2 = _require_unitary(u2, "u2")
    psi_plus = _basis_ket(4, 0b01, 0b10) / np.sqrt(2)
    psi = kron(u1, u2) @ psi_plus
    rho = p * np.outer(psi, psi.conj()) + (1 - p) * np.eye(4) / 4
    return DensityMatrix(rho)


def entanglement_label(p):
    return SEPARABLE if p <= SEPARABILITY_THRESHOLD else ENTANGLED


# --- Oracles ---
def helstrom_success(rho1, rho2, w1=0.5, w2=0.5):
    """Optimal success probability 1/2 (1 + ||w2 rho2 - w1 rho1||_1)."""
    if rho1.dim != rho2.dim:
        raise DimensionError(f"states have dimensions {rho1.dim} and {rho2.dim}")
    if abs(w1 + w2 - 1.0) > 1e-12:
        raise ContractViolation(f"priors must sum to 1, got {w1} + {w2}")
    return 1.0 - 0.5 * (1.0 - trace_norm_hermitian(w2 * rho2.matrix - w1 * rho1.matrix))


def helstrom_real(theta):
    return 0.5 * (1.0 + abs(np.sin(theta)))


def helstrom_complex(phi):
    return 0.5 * (1.0 + abs(np.sin(phi / 2)))


def sample_bloch_pairs(r, n_pairs, seed):
    """Random pairs of directions on the sphere (uniform cos(theta), uniform phi)."""
    rng = np.random.default_rng(seed)
    cos_t = rng.uniform(-1.0, 1.0, size=(n_pairs, 2))
    phi = rng.uniform(0.0, 2 * np.pi, size=(n_pairs, 2))
    theta = np.arccos(cos_t)
    return [((theta[k, 0], phi[k, 0], r), (theta[k, 1], phi[k, 1], r)) for k in range(n_pairs)]


# --- Set construction ---
@dataclass
class StatePairSpec:
    family: str
    state1: tuple = ()
    state2: tuple = ()
    priors: tuple = (0.5, 0.5)

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ContractViolation(f"unknown state family {self.family!r}, expected one of {FAMILIES}")
        if abs(sum(self.priors) - 1.0) > 1e-12:
            raise ContractViolation(f"priors must sum to 1, got {self.priors}")

    def states(self):
        if self.family == "ghz_w":
            return ghz_state(), w_state()
        builder = {"real_pure": pure_state_real,
                   "complex_pure": pure_state_complex,
                   "bloch_mixed": bloch_mixed_state}[self.family]
        return builder(*self.state1), builder(*self.state2)

    def helstrom(self):
        rho1, rho2 = self.states()
        return helstrom_success(rho1, rho2, *self.priors)


@dataclass
class WernerSetSpec:
    train_p: tuple = WERNER_TRAIN_P
    test_p: tuple = WERNER_TEST_P
    u1: np.ndarray = field(default_factory=lambda: SIGMA_Z.copy())
    u2: np.ndarray = field(default_factory=lambda: IDENTITY_2.copy())

    def __post_init__(self):
        for p in tuple(self.train_p) + tuple(self.test_p):
            if not 0.0 <= p <= 1.0:
                raise ContractViolation(f"mixing weight p must lie in [0, 1], got {p}")
        _require_unitary(self.u1, "u1")
        _require_unitary(self.u2, "u2")


def _encode(rho, topo):
    if rho.dim != topo.layer_sizes[0]:
        raise DimensionError(
            f"{rho.dim}-dimensional input does not match input layer of {topo.describe()} network")
    return encode_input(rho, topo.N)


def build_training_set(spec, topo):
    """state1 -> first output neuron, state2 -> second output neuron."""
    rho1, rho2 = spec.states()
    return [LabeledSample(_encode(rho1, topo), topo.output_neuron(0), spec.priors[0]),
            LabeledSample(_encode(rho2, topo), topo.output_neuron(1), spec.priors[1])]


def build_multi_state_set(family, m, topo):
    builder = {"real_pure": multi_state_real, "complex_pure": multi_state_complex}.get(family)
    if builder is None:
        raise ContractViolation(f"multi-state family must be real_pure or complex_pure, got {family!r}")
    return [LabeledSample(_encode(builder(m, s), topo), topo.output_neuron(s - 1), 1.0 / m)
            for s in range(1, m + 1)]


def werner_class_index(p):
    return 0 if entanglement_label(p) == SEPARABLE else 1


def build_werner_sets(spec, topo):
    def build(p_values):
        return [LabeledSample(_encode(werner_like(p, spec.u1, spec.u2), topo),
                              topo.output_neuron(werner_class_index(p)),
                              1.0 / len(p_values))
                for p in p_values]
    return build(spec.train_p), build(spec.test_p)


# --- Network shapes per task ---
# (input, hidden layers, output) for standard_topology
QUBIT_PAIR_SHAPE = (2, (2,), 2)
GHZ_W_SHAPE = (8, (2,), 2)
WERNER_SHAPE = (4, (4,), 2)


def discrimination_shape(family):
    return GHZ_W_SHAPE if family == "ghz_w" else QUBIT_PAIR_SHAPE


def discrimination_network(family):
    return standard_topology(*discrimination_shape(family))


def multi_state_network(m):
    return standard_topology(2, [m], m)


def werner_network():
    return standard_topology(*WERNER_SHAPE)
