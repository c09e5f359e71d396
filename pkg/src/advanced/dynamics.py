"""
Exact Gaussian dynamics under quadratic Hamiltonians H(z) = 1/2 z^T G z + l^T z.

For quadratic symbols the Moyal bracket of either structure reduces to its Poisson bracket,
so the flow is the linear map exp(t A) with A = F G / hbar, F being hbar*J or Omega.
"""
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from scipy.linalg import expm

from src.config import Config
from src.darboux import DarbouxMap
from src.errors import DimensionMismatch, SymmetryViolation
from src.gaussian_states import GaussianState, require_picture_pairing
from src.logger import phase_logger
from src.nc_algebra import ModePartition, Ordering, PhaseSpaceForm, convert_matrix, convert_vector, require_same_layout


@dataclass(frozen=True)
class QuadraticHamiltonian:
    """
    Quadratic Hamiltonian symbol.

    Attributes:
        G: symmetric Hessian (2n x 2n)
        linear: optional linear coefficients l (length 2n)
        ordering: coordinate layout of G and l
        partition: bipartition of the modes
    """
    G: np.ndarray
    ordering: Ordering
    partition: ModePartition
    linear: Optional[np.ndarray] = None

    def __post_init__(self):
        dim = 2 * self.partition.n_modes
        G = np.array(self.G, dtype=float)
        if G.shape != (dim, dim):
            raise DimensionMismatch(f"G must be {dim}x{dim}, got {G.shape}")
        asymmetry = float(np.max(np.abs(G - G.T)))
        if asymmetry > Config.CONSTRUCTION_TOL:
            raise SymmetryViolation(f"G is not symmetric (defect {asymmetry:.3e})")
        linear = np.zeros(dim) if self.linear is None else np.array(self.linear, dtype=float).reshape(-1)
        if linear.shape != (dim,):
            raise DimensionMismatch(f"linear term must have length {dim}, got {linear.shape}")
        G.setflags(write=False)
        linear.setflags(write=False)
        object.__setattr__(self, "G", G)
        object.__setattr__(self, "linear", linear)
        object.__setattr__(self, "ordering", Ordering(self.ordering))

    @classmethod
    def oscillator(cls, partition: ModePartition, frequency: float = 1.0,
                   ordering: Ordering = Ordering.GLOBAL_BLOCKED) -> "QuadraticHamiltonian":
        """Isotropic oscillator, G = frequency * I"""
        return cls(frequency * np.eye(2 * partition.n_modes), ordering, partition)

    def to_ordering(self, ordering: Ordering) -> "QuadraticHamiltonian":
        return QuadraticHamiltonian(
            convert_matrix(self.G, self.partition, self.ordering, ordering), ordering, self.partition,
            convert_vector(self.linear, self.partition, self.ordering, ordering),
        )

    def __call__(self, z) -> float:
        z = np.asarray(z, dtype=float)
        return 0.5 * np.einsum("...i,ij,...j->...", z, self.G, z) + z @ self.linear


def commutative_hamiltonian(H: QuadraticHamiltonian, dmap: DarbouxMap) -> QuadraticHamiltonian:
    """H~(zeta) = H(S zeta): Hessian S^T G S, linear term S^T l"""
    require_same_layout(H.ordering, H.partition, dmap.ordering, dmap.partition, "Hamiltonian and Darboux map")
    S = dmap.S
    G = S.T @ H.G @ S
    return QuadraticHamiltonian(0.5 * (G + G.T), H.ordering, H.partition, S.T @ H.linear)


def nc_hamiltonian(H_tilde: QuadraticHamiltonian, dmap: DarbouxMap) -> QuadraticHamiltonian:
    """H^NC(z) = H~(S^-1 z); for quadratic symbols this returns the original H"""
    require_same_layout(H_tilde.ordering, H_tilde.partition, dmap.ordering, dmap.partition,
                        "Hamiltonian and Darboux map")
    S_inv = dmap.S_inv
    G = S_inv.T @ H_tilde.G @ S_inv
    return QuadraticHamiltonian(0.5 * (G + G.T), H_tilde.ordering, H_tilde.partition, S_inv.T @ H_tilde.linear)


def generator(H: QuadraticHamiltonian, form: PhaseSpaceForm) -> np.ndarray:
    """A = F G / hbar, the matrix of dz/dt = A z + c"""
    require_same_layout(H.ordering, H.partition, form.ordering, form.partition, "Hamiltonian and form")
    return form.matrix @ H.G / form.hbar


def propagator(H: QuadraticHamiltonian, form: PhaseSpaceForm, t: float) -> Tuple[np.ndarray, np.ndarray]:
    """
    Flow map z(t) = M z(0) + d.

    M = exp(t A) and the drift d (variation of constants for c = F l / hbar) come out of one
    exponential of the augmented generator [[A, c], [0, 0]].
    """
    A = generator(H, form)
    dim = A.shape[0]
    if t == 0:
        return np.eye(dim), np.zeros(dim)
    augmented = np.zeros((dim + 1, dim + 1))
    augmented[:dim, :dim] = A
    augmented[:dim, dim] = form.matrix @ H.linear / form.hbar
    flow = expm(t * augmented)
    return flow[:dim, :dim], flow[:dim, dim]


def apply_flow(state: GaussianState, M: np.ndarray, drift: np.ndarray) -> GaussianState:
    cov = M @ state.cov @ M.T
    return GaussianState(M @ state.mean + drift, 0.5 * (cov + cov.T), state.picture,
                         state.ordering, state.partition, state.hbar)


def evolve(state: GaussianState, H: QuadraticHamiltonian, form: PhaseSpaceForm, t: float) -> GaussianState:
    """
    Evolve a Gaussian state for time t under H with the bracket of ``form``.

    Raises:
        PictureFormMismatch: commutative state with a deformed form or vice versa
        OrderingMismatch: state, Hamiltonian and form disagree on the coordinate layout
    """
    require_picture_pairing(state, form)
    require_same_layout(state.ordering, state.partition, H.ordering, H.partition, "state and Hamiltonian")
    M, drift = propagator(H, form, t)
    phase_logger.debug(f"evolve: t={t}, picture={state.picture.value}, role={form.role.value}")
    return apply_flow(state, M, drift)
