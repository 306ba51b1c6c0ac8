import numpy as np

from utils.network import ParameterVector, encode_input
from utils.tensor_core import DensityMatrix


def random_density(n, rng, rank=None):
    rank = rank or n
    g = rng.normal(size=(n, rank)) + 1j * rng.normal(size=(n, rank))
    rho = g @ g.conj().T
    rho = 0.5 * (rho + rho.conj().T)
    return DensityMatrix(rho / np.trace(rho).real)


def random_params(topo, rng, low=-1.0, high=1.0):
    return ParameterVector.from_flat(topo, rng.uniform(low, high, size=topo.n_parameters))


def random_input(topo, rng):
    return encode_input(random_density(topo.layer_sizes[0], rng), topo.N)


def random_unitary(n, rng):
    z = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))
