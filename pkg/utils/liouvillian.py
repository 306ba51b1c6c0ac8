# utils/liouvillian.py
"""
Vectorized Lindblad generator, state evolution and exact parameter gradients.

With row-major vectorization the master equation d|rho>/dt = L|rho> has

    L = -i (H (x) I - I (x) H^T)
        + sum_k [ L_k (x) L_k^* - 1/2 (L_k^H L_k) (x) I - 1/2 I (x) (L_k^T L_k^*) ].
"""
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from utils.errors import ContractViolation, DimensionError, IntegratorFault
from utils.network import (build_hamiltonian, build_lindblad_ops,
                           hamiltonian_generators, lindblad_generators)
from utils.tensor_core import (DensityMatrix, check_density_matrix, devectorize,
                               expm, expm_frechet, vectorize)

DEFAULT_EVOLUTION_TIME = 10.0


def commutator_superop(H):
    """Superoperator of rho -> -i [H, rho]."""
    n = H.shape[0]
    eye = np.eye(n, dtype=complex)
    return -1j * (np.kron(H, eye) - np.kron(eye, H.T))


def dissipator_superop(L):
    """Superoperator of rho -> L rho L^H - 1/2 {L^H L, rho}."""
    n = L.shape[0]
    eye = np.eye(n, dtype=complex)
    return (np.kron(L, L.conj())
            - 0.5 * np.kron(L.conj().T @ L, eye)
            - 0.5 * np.kron(eye, L.T @ L.conj()))


@dataclass(frozen=True, eq=False)
class LiouvillianBundle:
    dim: int
    l_matrix: np.ndarray
    partials: tuple
    evolution_time: float

    @cached_property
    def propagator(self):
        """expm(L T)."""
        return expm(self.l_matrix * self.evolution_time)

    @cached_property
    def frechet_blocks(self):
        """D_k = int_0^T expm(L (T - t)) dL/dtheta_k expm(L t) dt, one per parameter."""
        blocks = []
        for partial in self.partials:
            if not np.any(partial):
                blocks.append(np.zeros_like(self.l_matrix))
                continue
            _, D = expm_frechet(self.l_matrix, partial, self.evolution_time)
            blocks.append(D)
        return blocks

    def trace_functional(self):
        """Row vector r with r @ |rho> = Tr(rho)."""
        return np.eye(self.dim, dtype=complex).reshape(-1)


def assemble(topo, params, t=DEFAULT_EVOLUTION_TIME):
    if not t > 0:
        raise ContractViolation(f"evolution time must be positive, got {t}")
    params.check_against(topo)

    H = build_hamiltonian(topo, params)
    l_matrix = commutator_superop(H)
    for L in build_lindblad_ops(topo, params):
        if np.any(L):
            l_matrix = l_matrix + dissipator_superop(L)

    partials = [commutator_superop(mu) for mu in hamiltonian_generators(topo)]
    partials += [2.0 * g * dissipator_superop(nu)
                 for g, nu in zip(params.gamma, lindblad_generators(topo))]

    return LiouvillianBundle(topo.N, l_matrix, tuple(partials), float(t))


def _check_input(bundle, rho_in):
    if rho_in.dim != bundle.dim:
        raise DimensionError(f"input state has dimension {rho_in.dim}, network has {bundle.dim} neurons")


def _finish(bundle, vec_out):
    out = devectorize(vec_out, bundle.dim)
    check_density_matrix(out, error=IntegratorFault)
    return DensityMatrix(out)


def evolve(bundle, rho_in):
    _check_input(bundle, rho_in)
    return _finish(bundle, bundle.propagator @ vectorize(rho_in))


def output_gradients(bundle, rho_in):
    """Evolved state and d rho_out / d theta_k for every parameter, in (h, gamma) order."""
    _check_input(bundle, rho_in)
    v_in = vectorize(rho_in)
    rho_out = _finish(bundle, bundle.propagator @ v_in)
    grads = [devectorize(D @ v_in, bundle.dim) for D in bundle.frechet_blocks]
    return rho_out, grads
