# utils/network.py
"""
QSNN topologies and trainable parameters.

Neurons are numbered layer by layer (input first, output last) and form the
basis {|i>} of the network Hilbert space. A Hamiltonian edge {i, j} contributes
h_k (|i><j| + |j><i|); a Lindblad edge j -> i contributes L_k = gamma_k |i><j|,
so the effective transfer rate is gamma_k ** 2.
"""
from dataclasses import dataclass
from itertools import combinations, product

import numpy as np

from utils.errors import ContractViolation, DimensionError
from utils.tensor_core import DensityMatrix

VARIANTS = ("a", "b", "c", "d")


@dataclass(frozen=True)
class NetworkTopology:
    layer_sizes: tuple
    hamiltonian_edges: tuple  # unordered pairs stored as (i, j) with i < j
    lindblad_edges: tuple     # (source j, target i): transfer j -> i

    def __post_init__(self):
        sizes = tuple(int(s) for s in self.layer_sizes)
        if len(sizes) < 2 or any(s < 1 for s in sizes):
            raise ContractViolation(f"need at least input and output layers of size >= 1, got {sizes}")
        n = sum(sizes)

        h_edges = []
        for i, j in self.hamiltonian_edges:
            i, j = int(i), int(j)
            if i == j:
                raise ContractViolation(f"Hamiltonian self-loop on neuron {i}")
            h_edges.append((min(i, j), max(i, j)))
        l_edges = []
        for j, i in self.lindblad_edges:
            i, j = int(i), int(j)
            if i == j:
                raise ContractViolation(f"Lindblad self-loop on neuron {i}")
            l_edges.append((j, i))

        for edge in h_edges + l_edges:
            if not all(0 <= k < n for k in edge):
                raise ContractViolation(f"edge {edge} references a neuron outside 0..{n - 1}")
        if len(set(h_edges)) != len(h_edges):
            raise ContractViolation("duplicate Hamiltonian edge")
        if len(set(l_edges)) != len(l_edges):
            raise ContractViolation("duplicate Lindblad edge")

        object.__setattr__(self, "layer_sizes", sizes)
        object.__setattr__(self, "hamiltonian_edges", tuple(h_edges))
        object.__setattr__(self, "lindblad_edges", tuple(l_edges))

    @property
    def N(self):
        return sum(self.layer_sizes)

    @property
    def n_parameters(self):
        return len(self.hamiltonian_edges) + len(self.lindblad_edges)

    def layer(self, index):
        """Neuron indices of layer `index` (negative indices count from the output)."""
        index = index % len(self.layer_sizes)
        start = sum(self.layer_sizes[:index])
        return list(range(start, start + self.layer_sizes[index]))

    @property
    def input_neurons(self):
        return self.layer(0)

    @property
    def output_neurons(self):
        return self.layer(-1)

    def output_neuron(self, k):
        outputs = self.output_neurons
        if not 0 <= k < len(outputs):
            raise ContractViolation(f"output neuron {k} out of range 0..{len(outputs) - 1}")
        return outputs[k]

    def describe(self):
        return "-".join(str(s) for s in self.layer_sizes)

    def to_dict(self):
        return {
            "layer_sizes": list(self.layer_sizes),
            "hamiltonian_edges": [list(e) for e in self.hamiltonian_edges],
            "lindblad_edges": [list(e) for e in self.lindblad_edges],
        }

    @classmethod
    def from_dict(cls, data):
        return explicit_topology(data["layer_sizes"], data["hamiltonian_edges"], data["lindblad_edges"])


@dataclass(frozen=True, eq=False)
class ParameterVector:
    h: np.ndarray
    gamma: np.ndarray

    def __post_init__(self):
        for name in ("h", "gamma"):
            arr = np.array(getattr(self, name), dtype=float).reshape(-1)
            if not np.all(np.isfinite(arr)):
                raise ContractViolation(f"parameter vector '{name}' has non-finite entries")
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def size(self):
        return self.h.size + self.gamma.size

    def concat(self):
        return np.concatenate([self.h, self.gamma])

    @classmethod
    def from_flat(cls, topo, theta):
        theta = np.asarray(theta, dtype=float).reshape(-1)
        if theta.size != topo.n_parameters:
            raise DimensionError(f"expected {topo.n_parameters} parameters, got {theta.size}")
        n_h = len(topo.hamiltonian_edges)
        return cls(theta[:n_h], theta[n_h:])

    def check_against(self, topo):
        if self.h.size != len(topo.hamiltonian_edges) or self.gamma.size != len(topo.lindblad_edges):
            raise DimensionError(
                f"parameters (|h|={self.h.size}, |gamma|={self.gamma.size}) do not match topology "
                f"{topo.describe()} (|h|={len(topo.hamiltonian_edges)}, |gamma|={len(topo.lindblad_edges)})"
            )


# --- Topology builders ---
def _adjacent_lindblad_edges(sizes):
    offsets = np.cumsum((0,) + tuple(sizes))
    edges = []
    for layer in range(len(sizes) - 1):
        sources = range(offsets[layer], offsets[layer + 1])
        targets = range(offsets[layer + 1], offsets[layer + 2])
        edges.extend((int(j), int(i)) for j, i in product(sources, targets))
    return edges


def _bipartite(first, second):
    return [(i, j) for i, j in product(first, second)]


def explicit_topology(layer_sizes, hamiltonian_edges, lindblad_edges):
    return NetworkTopology(tuple(layer_sizes),
                           tuple(tuple(e) for e in hamiltonian_edges),
                           tuple(tuple(e) for e in lindblad_edges))


def standard_topology(n_input, hidden, n_output):
    """
    Lindblad edges run from every neuron to every neuron of the next layer;
    Hamiltonian couplings join all input pairs and every input neuron to every
    neuron of the first hidden layer.
    """
    sizes = (int(n_input),) + tuple(int(h) for h in hidden) + (int(n_output),)
    inputs = list(range(sizes[0]))
    h_edges = list(combinations(inputs, 2))
    if hidden:
        first_hidden = list(range(sizes[0], sizes[0] + sizes[1]))
        h_edges += _bipartite(inputs, first_hidden)
    return NetworkTopology(sizes, tuple(h_edges), tuple(_adjacent_lindblad_edges(sizes)))


def topology_variant(name, n_input, hidden, n_output):
    """
    Coupling-placement variants for binary discrimination:
    (a) standard; (b) standard plus last-hidden/output couplings;
    (c) last-hidden/output couplings only; (d) every adjacent-layer pair
    coupled plus intra-input pairs. Lindblad edges are the same in all four.
    """
    if name not in VARIANTS:
        raise ContractViolation(f"unknown topology variant {name!r}, expected one of {VARIANTS}")
    base = standard_topology(n_input, hidden, n_output)
    if name == "a":
        return base

    last_inner = base.layer(-2)
    outputs = base.output_neurons
    to_output = _bipartite(last_inner, outputs)

    if name == "b":
        h_edges = list(base.hamiltonian_edges) + [e for e in to_output if e not in base.hamiltonian_edges]
    elif name == "c":
        h_edges = to_output
    else:
        h_edges = list(combinations(base.input_neurons, 2))
        for layer in range(len(base.layer_sizes) - 1):
            h_edges += _bipartite(base.layer(layer), base.layer(layer + 1))
    return NetworkTopology(base.layer_sizes, tuple(h_edges), base.lindblad_edges)


# --- Operator assembly ---
def hamiltonian_generators(topo):
    """mu_k = dH/dh_k = |i><j| + |j><i| for every Hamiltonian edge."""
    n = topo.N
    mats = []
    for i, j in topo.hamiltonian_edges:
        mu = np.zeros((n, n), dtype=complex)
        mu[i, j] = 1.0
        mu[j, i] = 1.0
        mats.append(mu)
    return mats


def lindblad_generators(topo):
    """nu_k = dL_k/dgamma_k = |i><j| for every edge j -> i."""
    n = topo.N
    mats = []
    for j, i in topo.lindblad_edges:
        nu = np.zeros((n, n), dtype=complex)
        nu[i, j] = 1.0
        mats.append(nu)
    return mats


def build_hamiltonian(topo, params):
    params.check_against(topo)
    H = np.zeros((topo.N, topo.N), dtype=complex)
    for (i, j), h_k in zip(topo.hamiltonian_edges, params.h):
        H[i, j] += h_k
        H[j, i] += h_k
    return H


def build_lindblad_ops(topo, params):
    params.check_against(topo)
    return [g * nu for g, nu in zip(params.gamma, lindblad_generators(topo))]


def encode_input(rho, network_dim):
    """rho_in = rho (+) 0: place the input state in the top-left block."""
    n = rho.dim
    if n > network_dim:
        raise DimensionError(f"input state of dimension {n} does not fit a {network_dim}-neuron network")
    embedded = np.zeros((network_dim, network_dim), dtype=complex)
    embedded[:n, :n] = rho.matrix
    return DensityMatrix(embedded)


def output_population(rho_out, topo):
    outputs = topo.output_neurons
    return float(np.sum(np.real(np.diag(rho_out.matrix))[outputs]))
