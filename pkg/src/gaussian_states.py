"""
Gaussian Wigner functions: states, pointwise evaluation and transport between pictures.

Covariance convention: Sigma_ij = <{dz_i, dz_j}> / 2, so the vacuum is (hbar/2) I.
"""
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Optional, Sequence, Union

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from src.config import Config
from src.darboux import DarbouxMap
from src.errors import (
    DimensionMismatch, IllConditioned, NegativeOccupation, NotPositiveDefinite,
    OrderingMismatch, PictureFormMismatch, SymmetryViolation,
)
from src.nc_algebra import (
    ModePartition, Ordering, PhaseSpaceForm, PhaseSpaceMatrix, Role,
    convert_matrix, convert_vector, is_canonical, require_same_layout,
)


class Picture(str, Enum):
    COMMUTATIVE = "commutative"        # zeta variables, [zeta_i, zeta_j] = i hbar J_ij
    NONCOMMUTATIVE = "noncommutative"  # z variables, [z_i, z_j] = i Omega_ij


@dataclass(frozen=True)
class GaussianState:
    """
    Gaussian Wigner function given by its centroid and covariance.

    Attributes:
        mean: phase-space centroid (length 2n)
        cov: symmetric positive-definite covariance (2n x 2n)
        picture: commutative (Sigma~) or noncommutative (Sigma)
        ordering: coordinate layout of mean and cov
        partition: bipartition of the modes
        hbar: Planck constant
    """
    mean: np.ndarray
    cov: np.ndarray
    picture: Picture
    ordering: Ordering
    partition: ModePartition
    hbar: float = 1.0

    def __post_init__(self):
        dim = 2 * self.partition.n_modes
        mean = np.array(self.mean, dtype=float).reshape(-1)
        cov = np.array(self.cov, dtype=float)
        if mean.shape != (dim,):
            raise DimensionMismatch(f"mean must have length {dim}, got {mean.shape}")
        if cov.shape != (dim, dim):
            raise DimensionMismatch(f"cov must be {dim}x{dim}, got {cov.shape}")
        asymmetry = float(np.max(np.abs(cov - cov.T)))
        if asymmetry > Config.CONSTRUCTION_TOL:
            raise SymmetryViolation(f"cov is not symmetric (defect {asymmetry:.3e})")
        eigenvalues = np.linalg.eigvalsh(cov)
        if eigenvalues[0] <= Config.SINGULAR_TOL * max(eigenvalues[-1], 0.0) or eigenvalues[-1] <= 0:
            raise NotPositiveDefinite(f"cov is not positive-definite (smallest eigenvalue {eigenvalues[0]:.3e})")
        if not self.hbar > 0:
            raise DimensionMismatch(f"hbar must be positive, got {self.hbar}")
        mean.setflags(write=False)
        cov.setflags(write=False)
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov", cov)
        object.__setattr__(self, "picture", Picture(self.picture))
        object.__setattr__(self, "ordering", Ordering(self.ordering))

    @property
    def n_modes(self) -> int:
        return self.partition.n_modes

    @property
    def dimension(self) -> int:
        return 2 * self.partition.n_modes

    def with_picture(self, picture: Picture) -> "GaussianState":
        """Same data read in another picture (no transport)"""
        return GaussianState(self.mean, self.cov, picture, self.ordering, self.partition, self.hbar)

    def to_ordering(self, ordering: Ordering) -> "GaussianState":
        mean = convert_vector(self.mean, self.partition, self.ordering, ordering)
        cov = convert_matrix(self.cov, self.partition, self.ordering, ordering)
        return GaussianState(mean, cov, self.picture, ordering, self.partition, self.hbar)


def _symmetrized(matrix: np.ndarray) -> np.ndarray:
    return 0.5 * (matrix + matrix.T)


def wigner_eval(state: GaussianState, point, point_ordering: Optional[Ordering] = None):
    """
    N exp(-1/2 (z - m)^T Sigma^-1 (z - m)) with N = 1 / ((2 pi)^n sqrt(det Sigma)).

    ``point`` may be one vector or a stack of vectors along the leading axes.

    Raises:
        OrderingMismatch: ``point_ordering`` given and different from the state's
        IllConditioned: condition number of Sigma above Config.COND_LIMIT
    """
    if point_ordering is not None and Ordering(point_ordering) != state.ordering:
        raise OrderingMismatch(
            f"point is {Ordering(point_ordering).value}, state is {state.ordering.value}"
        )
    points = np.asarray(point, dtype=float)
    if points.shape[-1:] != (state.dimension,):
        raise DimensionMismatch(f"points must end in dimension {state.dimension}, got {points.shape}")

    condition = np.linalg.cond(state.cov)
    if condition > Config.COND_LIMIT:
        raise IllConditioned(f"covariance condition number {condition:.3e} exceeds {Config.COND_LIMIT:.0e}")

    factor = cho_factor(state.cov, lower=True)
    log_det = 2.0 * np.sum(np.log(np.diag(factor[0])))
    deltas = points.reshape(-1, state.dimension) - state.mean
    solved = cho_solve(factor, deltas.T).T
    exponent = -0.5 * np.einsum("ij,ij->i", deltas, solved)
    log_norm = -state.n_modes * np.log(2.0 * np.pi) - 0.5 * log_det
    values = np.exp(exponent + log_norm).reshape(points.shape[:-1])
    return float(values) if values.ndim == 0 else values


def require_picture_pairing(state: GaussianState, form: PhaseSpaceForm):
    """Commutative states pair with hbar*J, noncommutative states with an Omega (omega or custom role)"""
    require_same_layout(state.ordering, state.partition, form.ordering, form.partition, "state and form")
    if state.hbar != form.hbar:
        raise PictureFormMismatch(f"state hbar {state.hbar} differs from form hbar {form.hbar}")
    if state.picture == Picture.COMMUTATIVE and not is_canonical(form):
        raise PictureFormMismatch("commutative-picture states pair only with the standard form hbar*J")
    if state.picture == Picture.NONCOMMUTATIVE and form.role not in (Role.OMEGA, Role.CUSTOM):
        raise PictureFormMismatch(f"noncommutative-picture states pair with Omega, got role {form.role.value}")


def _check_transport(state: GaussianState, dmap: DarbouxMap, expected: Picture):
    if state.picture != expected:
        raise PictureFormMismatch(f"state must be in the {expected.value} picture, got {state.picture.value}")
    if state.dimension != dmap.S.shape[0]:
        raise DimensionMismatch(f"state has dimension {state.dimension}, map has {dmap.S.shape[0]}")
    require_same_layout(state.ordering, state.partition, dmap.ordering, dmap.partition, "state and Darboux map")


def to_nc_picture(state: GaussianState, dmap: DarbouxMap) -> GaussianState:
    """Sigma = S Sigma~ S^T, z_mean = S zeta_mean"""
    _check_transport(state, dmap, Picture.COMMUTATIVE)
    S = dmap.S
    return GaussianState(
        S @ state.mean, _symmetrized(S @ state.cov @ S.T),
        Picture.NONCOMMUTATIVE, state.ordering, state.partition, state.hbar,
    )


def to_commutative_picture(state: GaussianState, dmap: DarbouxMap) -> GaussianState:
    """Sigma~ = S^-1 Sigma S^-T, zeta_mean = S^-1 z_mean"""
    _check_transport(state, dmap, Picture.NONCOMMUTATIVE)
    S_inv = dmap.S_inv
    return GaussianState(
        S_inv @ state.mean, _symmetrized(S_inv @ state.cov @ S_inv.T),
        Picture.COMMUTATIVE, state.ordering, state.partition, state.hbar,
    )


def wigner_nc_eval(state: GaussianState, dmap: DarbouxMap, point_z):
    """
    W^NC(z) = W(S^-1 z) / sqrt(det Omega), hbar = 1.

    For general hbar det Omega = hbar^(2n) (det S)^2, so the prefactor is hbar^n / sqrt(det Omega),
    which keeps W^NC normalized.
    """
    _check_transport(state, dmap, Picture.COMMUTATIVE)
    points = np.asarray(point_z, dtype=float)
    zeta = points @ dmap.S_inv.T
    det_omega = float(np.linalg.det(dmap.source_form.matrix))
    prefactor = state.hbar ** state.n_modes / np.sqrt(det_omega)
    return prefactor * wigner_eval(state, zeta)


def mirror_wigner_eval(state: GaussianState, reflection: PhaseSpaceMatrix, point):
    """W'(z) = W(D z): the Wigner function after a mirror map D (or Lambda)"""
    require_same_layout(state.ordering, state.partition, reflection.ordering, reflection.partition,
                        "state and reflection")
    points = np.asarray(point, dtype=float)
    return wigner_eval(state, points @ reflection.matrix.T)


def quadratic_expectation(state: GaussianState, G: np.ndarray) -> float:
    """<1/2 z^T G z> = 1/2 tr(G Sigma) + 1/2 m^T G m for a symmetrized quadratic observable"""
    G = np.asarray(G, dtype=float)
    if G.shape != state.cov.shape:
        raise DimensionMismatch(f"G must be {state.cov.shape}, got {G.shape}")
    return float(0.5 * np.trace(G @ state.cov) + 0.5 * state.mean @ G @ state.mean)


class WignerFunction:
    """Pointwise Wigner evaluator taking party-blocked points (x_A, p_A, x_B, p_B)"""

    def __init__(self, evaluate: Callable, n_modes: int, hbar: float,
                 ordering: Ordering, partition: ModePartition):
        self._evaluate = evaluate
        self.n_modes = n_modes
        self.hbar = hbar
        self.ordering = Ordering(ordering)
        self.partition = partition

    def __call__(self, points):
        native = convert_vector(points, self.partition, Ordering.PARTY_BLOCKED, self.ordering)
        return self._evaluate(native)


def wigner_function(state: GaussianState) -> WignerFunction:
    """The Gaussian Wigner function of ``state`` in its own variables"""
    return WignerFunction(lambda z: wigner_eval(state, z), state.n_modes, state.hbar,
                          state.ordering, state.partition)


def nc_wigner_function(state: GaussianState, dmap: DarbouxMap) -> WignerFunction:
    """W^NC of a commutative state, evaluated through the Darboux map"""
    _check_transport(state, dmap, Picture.COMMUTATIVE)
    return WignerFunction(lambda z: wigner_nc_eval(state, dmap, z), state.n_modes, state.hbar,
                          state.ordering, state.partition)


# ---------------------------------------------------------------------------
# Standard test states
# ---------------------------------------------------------------------------

def make_vacuum(n_modes: int, hbar: float = 1.0, partition: Optional[ModePartition] = None,
                picture: Picture = Picture.COMMUTATIVE) -> GaussianState:
    """(hbar/2) I, zero mean, global-blocked ordering"""
    partition = partition or ModePartition.single(n_modes)
    if partition.n_modes != n_modes:
        raise DimensionMismatch(f"Partition {partition} does not cover {n_modes} modes")
    return GaussianState(np.zeros(2 * n_modes), 0.5 * hbar * np.eye(2 * n_modes),
                         picture, Ordering.GLOBAL_BLOCKED, partition, hbar)


def make_thermal(n_modes: int, mean_occupations: Union[float, Sequence[float]], hbar: float = 1.0,
                 partition: Optional[ModePartition] = None,
                 picture: Picture = Picture.COMMUTATIVE) -> GaussianState:
    """Diag over modes of hbar (n_k + 1/2) I_2, in global-blocked ordering"""
    occupations = np.broadcast_to(np.asarray(mean_occupations, dtype=float), (n_modes,))
    if np.any(occupations < 0):
        raise NegativeOccupation(f"mean occupations must be >= 0, got {occupations.tolist()}")
    partition = partition or ModePartition.single(n_modes)
    if partition.n_modes != n_modes:
        raise DimensionMismatch(f"Partition {partition} does not cover {n_modes} modes")
    variances = hbar * (occupations + 0.5)
    cov = np.diag(np.concatenate([variances, variances]))
    return GaussianState(np.zeros(2 * n_modes), cov, picture, Ordering.GLOBAL_BLOCKED, partition, hbar)


def make_two_mode_squeezed(r: float, hbar: float = 1.0,
                           picture: Picture = Picture.COMMUTATIVE) -> GaussianState:
    """Two-mode squeezed vacuum in (x1, x2, p1, p2); mode 1 is party A, mode 2 party B"""
    c, s = np.cosh(2.0 * r), np.sinh(2.0 * r)
    cov = 0.5 * hbar * np.array([
        [c, s, 0.0, 0.0],
        [s, c, 0.0, 0.0],
        [0.0, 0.0, c, -s],
        [0.0, 0.0, -s, c],
    ])
    return GaussianState(np.zeros(4), cov, picture, Ordering.GLOBAL_BLOCKED, ModePartition(1, 1), hbar)
