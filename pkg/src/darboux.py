"""
Darboux / Seiberg-Witten maps S realizing Omega = S (hbar J) S^T
"""
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Tuple

import numpy as np
from scipy.linalg import block_diag

from src.config import Config
from src.errors import DeformationTooLarge, NonInvertible, NotDarboux, PreconditionFailed, SingularForm
from src.logger import phase_logger
from src.nc_algebra import (
    ModePartition, NCParameters, Ordering, PhaseSpaceForm,
    build_omega, convert_matrix, convert_vector, is_party_block_diagonal, party_block, standard_form,
)


class Method(str, Enum):
    PLANAR_CLOSED_FORM = "planar_closed_form"
    SYMPLECTIC_GRAM_SCHMIDT = "symplectic_gram_schmidt"
    BLOCK_DIAGONAL = "block_diagonal"
    COMPOSED = "composed"


@dataclass(frozen=True)
class PlanarSWConstants:
    """Constants nu, mu of the planar SW map together with theta, eta and hbar"""
    nu: float
    mu: float
    theta: float
    eta: float
    hbar: float = 1.0

    def __post_init__(self):
        if not (self.nu > 0 and self.mu > 0 and self.hbar > 0):
            raise PreconditionFailed("nu, mu and hbar must be positive")
        if self.consistency_defect > Config.CONSTRUCTION_TOL:
            raise PreconditionFailed(
                f"nu*mu + theta*eta/(4 nu mu hbar^2) must equal 1 (defect {self.consistency_defect:.3e})"
            )

    @property
    def consistency_defect(self) -> float:
        """|nu mu + theta eta / (4 nu mu hbar^2) - 1|; zero keeps [x_i, p_j] = i hbar delta_ij"""
        product = self.nu * self.mu
        return abs(product + self.theta * self.eta / (4.0 * product * self.hbar ** 2) - 1.0)


@dataclass(frozen=True)
class DarbouxMap:
    """
    Invertible S with certified S (hbar J) S^T = Omega, z = S zeta.

    Attributes:
        S: the map, rows/columns in the ordering of ``source_form``
        S_inv: its inverse
        source_form: the Omega it realizes
        method: how S was obtained
    """
    S: np.ndarray
    S_inv: np.ndarray
    source_form: PhaseSpaceForm
    method: Method

    def __post_init__(self):
        S = np.array(self.S, dtype=float)
        S_inv = np.array(self.S_inv, dtype=float)
        dim = self.source_form.dimension
        if S.shape != (dim, dim) or S_inv.shape != (dim, dim):
            raise NonInvertible(f"S and S_inv must be {dim}x{dim}")
        S.setflags(write=False)
        S_inv.setflags(write=False)
        object.__setattr__(self, "S", S)
        object.__setattr__(self, "S_inv", S_inv)
        object.__setattr__(self, "method", Method(self.method))

        if self.inverse_residual > Config.DERIVED_TOL:
            raise NonInvertible(f"S * S_inv deviates from identity by {self.inverse_residual:.3e}")
        if self.correspondence_residual > Config.DERIVED_TOL:
            raise NotDarboux(f"S (hbar J) S^T misses Omega by {self.correspondence_residual:.3e}")

    @property
    def standard(self) -> PhaseSpaceForm:
        """hbar*J in the ordering of the source form"""
        form = self.source_form
        return standard_form(form.partition, form.hbar, form.ordering)

    @property
    def inverse_residual(self) -> float:
        return float(np.max(np.abs(self.S @ self.S_inv - np.eye(self.S.shape[0]))))

    @property
    def correspondence_residual(self) -> float:
        image = self.S @ self.standard.matrix @ self.S.T
        return float(np.max(np.abs(image - self.source_form.matrix)))

    @property
    def determinant(self) -> float:
        return float(np.linalg.det(self.S))

    @property
    def ordering(self) -> Ordering:
        return self.source_form.ordering

    @property
    def partition(self) -> ModePartition:
        return self.source_form.partition


def planar_sw_constants(theta: float, eta: float, hbar: float = 1.0) -> PlanarSWConstants:
    """
    Symmetric (nu = mu) constants of the planar SW map.

    Substituting x_i = nu q_i - theta/(2 nu hbar) eps_ij k_j, p_i = mu k_i + eta/(2 mu hbar) eps_ij q_j
    into [x_i, p_j] = i hbar delta_ij gives lambda^2 - lambda + theta eta / (4 hbar^2) = 0 with
    lambda = nu mu. The "+" root keeps S -> I in the commutative limit.

    Raises:
        DeformationTooLarge: theta * eta >= hbar^2, no real root
    """
    if hbar <= 0:
        raise PreconditionFailed(f"hbar must be positive, got {hbar}")
    if theta * eta >= hbar ** 2:
        raise DeformationTooLarge(f"theta*eta = {theta * eta} >= hbar^2 = {hbar ** 2}; no real SW map exists")
    lam = (1.0 + np.sqrt(1.0 - theta * eta / hbar ** 2)) / 2.0
    root = float(np.sqrt(lam))
    return PlanarSWConstants(nu=root, mu=root, theta=theta, eta=eta, hbar=hbar)


def _planar_matrix(constants: PlanarSWConstants) -> np.ndarray:
    nu, mu, hbar = constants.nu, constants.mu, constants.hbar
    a = constants.theta / (2.0 * nu * hbar)
    b = constants.eta / (2.0 * mu * hbar)
    # (q1, q2, k1, k2) -> (x1, x2, p1, p2), eps_12 = 1 = -eps_21
    return np.array([
        [nu, 0.0, 0.0, -a],
        [0.0, nu, a, 0.0],
        [0.0, b, mu, 0.0],
        [-b, 0.0, 0.0, mu],
    ])


def _planar_inverse(constants: PlanarSWConstants) -> np.ndarray:
    # S = [[nu I, -a eps], [b eps, mu I]] has commuting blocks and eps^2 = -I, so AD - BC = (nu mu - a b) I
    nu, mu, hbar = constants.nu, constants.mu, constants.hbar
    a = constants.theta / (2.0 * nu * hbar)
    b = constants.eta / (2.0 * mu * hbar)
    det2 = nu * mu - a * b
    return np.array([
        [mu, 0.0, 0.0, a],
        [0.0, mu, -a, 0.0],
        [0.0, -b, nu, 0.0],
        [b, 0.0, 0.0, nu],
    ]) / det2


def commutator_table(constants: PlanarSWConstants) -> np.ndarray:
    """
    [z_i, z_j] / i for z = (x1, x2, p1, p2), expanded term by term from the SW map and the
    canonical relations [q_a, k_b] = i hbar delta_ab. Should reproduce Omega(theta, eta).
    """
    S = _planar_matrix(constants)
    table = np.zeros((4, 4))
    for i in range(4):
        for j in range(4):
            total = 0.0
            for mode in range(2):
                q, k = mode, 2 + mode
                total += constants.hbar * (S[i, q] * S[j, k] - S[i, k] * S[j, q])
            table[i, j] = total
    return table


def build_planar_S(constants: PlanarSWConstants, partition: Optional[ModePartition] = None) -> DarbouxMap:
    """Closed-form planar map in global-blocked ordering (x1, x2, p1, p2)"""
    partition = partition or ModePartition.single(2)
    params = NCParameters.planar(constants.theta, constants.eta, constants.hbar)
    omega = build_omega(params, partition, ordering=Ordering.GLOBAL_BLOCKED)
    return DarbouxMap(_planar_matrix(constants), _planar_inverse(constants), omega, Method.PLANAR_CLOSED_FORM)


def _symplectic_basis(matrix: np.ndarray, hbar: float) -> np.ndarray:
    """
    Columns [e_1..e_n, f_1..f_n] with T^T M T = hbar J (global-blocked J).

    Candidates are the standard basis vectors projected Omega-orthogonally onto the complement
    of the pairs found so far; the largest candidate wins, ties going to the lowest index.
    """
    dim = matrix.shape[0]
    n = dim // 2
    basis = np.eye(dim)
    pairs = []

    def pairing(u, v):
        return float(u @ matrix @ v)

    def project(v):
        # twice, to keep the round-off of earlier pairs out of later ones
        for _ in range(2):
            for e, f in pairs:
                v = v - (pairing(v, f) / hbar) * e + (pairing(v, e) / hbar) * f
        return v

    for step in range(n):
        projected = [project(basis[k]) for k in range(dim)]
        norms = np.array([np.linalg.norm(v) for v in projected])
        k_e = int(np.argmax(norms))
        if norms[k_e] <= Config.PIVOT_TOL:
            raise SingularForm(f"No candidate survives projection at step {step}")
        e = projected[k_e] / norms[k_e]

        pivots = np.array([pairing(e, v) for v in projected])
        k_f = int(np.argmax(np.abs(pivots)))
        if abs(pivots[k_f]) <= Config.PIVOT_TOL:
            raise SingularForm(f"Pivot search failed at step {step}; Omega is numerically degenerate")
        f = hbar * projected[k_f] / pivots[k_f]
        pairs.append((e, f))

    es = [e for e, _ in pairs]
    fs = [f for _, f in pairs]
    return np.column_stack(es + fs)


def build_general_S(omega: PhaseSpaceForm) -> DarbouxMap:
    """
    Darboux map for any skew nonsingular Omega by symplectic Gram-Schmidt.

    With T^T Omega T = hbar J the map is S = T^-T and S_inv = T^T exactly.

    Pivoting is by size, not position: each step takes the largest projected candidate
    and pairs it with the candidate of largest |pairing|, rather than the first index whose
    pivot clears Config.PIVOT_TOL. Output is still deterministic, but S can differ from a
    first-index Gram-Schmidt by a canonical transformation.
    """
    partition = omega.partition
    T_global = _symplectic_basis(np.asarray(omega.matrix), omega.hbar)
    # columns laid out so that T^T Omega T = hbar J in the form's own ordering
    T = convert_vector(T_global, partition, Ordering.GLOBAL_BLOCKED, omega.ordering)
    S_inv = T.T
    S = np.linalg.solve(T, np.eye(T.shape[0])).T
    return DarbouxMap(S, S_inv, omega, Method.SYMPLECTIC_GRAM_SCHMIDT)


def _planar_shape(form: PhaseSpaceForm) -> Optional[Tuple[float, float]]:
    """(theta, eta) when a 2-mode form is the planar [[theta eps, hbar I], [-hbar I, eta eps]]"""
    if form.n_modes != 2:
        return None
    g = convert_matrix(form.matrix, form.partition, form.ordering, Ordering.GLOBAL_BLOCKED)
    theta, eta = g[0, 1], g[2, 3]
    expected = np.block([
        [np.array([[0.0, theta], [-theta, 0.0]]), form.hbar * np.eye(2)],
        [-form.hbar * np.eye(2), np.array([[0.0, eta], [-eta, 0.0]])],
    ])
    if np.max(np.abs(g - expected)) > Config.CONSTRUCTION_TOL:
        return None
    return float(theta), float(eta)


def _single_block_map(form: PhaseSpaceForm) -> DarbouxMap:
    shape = _planar_shape(form)
    if shape is not None and shape[0] * shape[1] < form.hbar ** 2:
        planar = build_planar_S(planar_sw_constants(shape[0], shape[1], form.hbar), form.partition)
        S = convert_matrix(planar.S, form.partition, Ordering.GLOBAL_BLOCKED, form.ordering)
        S_inv = convert_matrix(planar.S_inv, form.partition, Ordering.GLOBAL_BLOCKED, form.ordering)
        return DarbouxMap(S, S_inv, form, Method.PLANAR_CLOSED_FORM)
    return build_general_S(form)


def build_darboux_map(omega: PhaseSpaceForm) -> DarbouxMap:
    """
    Deterministic Darboux map for ``omega``.

    A bipartite block-diagonal Omega gets S = Diag[S^A, S^B], each party solved on its own;
    otherwise the whole form is solved at once. Planar 2-mode blocks use the closed form.
    """
    partition = omega.partition
    if not (partition.is_bipartite and is_party_block_diagonal(omega.matrix, partition, omega.ordering)):
        dmap = _single_block_map(omega)
        phase_logger.debug(f"Darboux map via {dmap.method.value}, residual {dmap.correspondence_residual:.3e}")
        return dmap

    blocks = [_single_block_map(party_block(omega, party)) for party in ("A", "B")]
    S_party = block_diag(blocks[0].S, blocks[1].S)
    S_inv_party = block_diag(blocks[0].S_inv, blocks[1].S_inv)

    S = convert_matrix(S_party, partition, Ordering.PARTY_BLOCKED, omega.ordering)
    S_inv = convert_matrix(S_inv_party, partition, Ordering.PARTY_BLOCKED, omega.ordering)
    dmap = DarbouxMap(S, S_inv, omega, Method.BLOCK_DIAGONAL)
    phase_logger.debug(
        f"Darboux map Diag[{blocks[0].method.value}, {blocks[1].method.value}], "
        f"residual {dmap.correspondence_residual:.3e}"
    )
    return dmap


def compose_canonical(dmap: DarbouxMap, K: np.ndarray) -> DarbouxMap:
    """S K for a canonical K (K J K^T = J); an equivalent Darboux map for the same Omega"""
    K = np.asarray(K, dtype=float)
    J = standard_form(dmap.partition, 1.0, dmap.ordering).matrix
    if K.shape != J.shape:
        raise NonInvertible(f"K must be {J.shape[0]}x{J.shape[0]}, got {K.shape}")
    defect = float(np.max(np.abs(K @ J @ K.T - J)))
    if defect > Config.DERIVED_TOL:
        raise NotDarboux(f"K is not canonical: K J K^T deviates from J by {defect:.3e}")
    K_inv = -J @ K.T @ J
    return DarbouxMap(dmap.S @ K, K_inv @ dmap.S_inv, dmap.source_form, Method.COMPOSED)
