"""
Algebraic skeleton of noncommutative phase space: J, Omega, Lambda, D, Omega'
"""
from dataclasses import dataclass
from enum import Enum
from typing import Optional, TYPE_CHECKING

import numpy as np

from src.config import Config
from src.errors import (
    NotSkewSymmetric, SingularForm, PartitionMismatch, NonInvertible,
    OrderingMismatch, ShapeMismatch,
)

if TYPE_CHECKING:
    from src.darboux import DarbouxMap


class Ordering(str, Enum):
    """Coordinate layout of a phase-space vector"""
    PARTY_BLOCKED = "party_blocked"    # x_A, p_A, x_B, p_B
    GLOBAL_BLOCKED = "global_blocked"  # all x, then all p


class Role(str, Enum):
    OMEGA = "omega"
    STANDARD_J = "standard_J"
    OMEGA_PRIME = "omega_prime"
    CUSTOM = "custom"


def _frozen(array) -> np.ndarray:
    arr = np.array(array, dtype=float)
    arr.setflags(write=False)
    return arr


def skew_defect(matrix: np.ndarray) -> float:
    """Largest entry of |M + M^T|"""
    matrix = np.asarray(matrix, dtype=float)
    if matrix.size == 0:
        return 0.0
    return float(np.max(np.abs(matrix + matrix.T)))


def scaled_determinant(matrix: np.ndarray) -> float:
    """|det M| divided by (max |M_ij|)^dim; the nonsingularity measure for forms"""
    matrix = np.asarray(matrix, dtype=float)
    scale = float(np.max(np.abs(matrix)))
    if scale == 0.0:
        return 0.0
    sign, logdet = np.linalg.slogdet(matrix / scale)
    return 0.0 if sign == 0 else float(np.exp(logdet))


@dataclass(frozen=True)
class ModePartition:
    """Split of the n modes into party A (first n_A modes) and party B (the rest)"""
    n_A: int
    n_B: int = 0

    def __post_init__(self):
        if int(self.n_A) != self.n_A or self.n_A < 1:
            raise PartitionMismatch(f"n_A must be a positive integer, got {self.n_A}")
        if int(self.n_B) != self.n_B or self.n_B < 0:
            raise PartitionMismatch(f"n_B must be a non-negative integer, got {self.n_B}")

    @property
    def n_modes(self) -> int:
        return self.n_A + self.n_B

    @property
    def is_bipartite(self) -> bool:
        return self.n_B >= 1

    def require_bipartite(self):
        if not self.is_bipartite:
            raise PartitionMismatch(f"Bipartite operation needs n_B >= 1, got partition {self}")

    @classmethod
    def single(cls, n_modes: int) -> "ModePartition":
        return cls(n_modes, 0)


@dataclass(frozen=True)
class NCParameters:
    """
    Deformation data: mode count, hbar and the skew blocks Theta (positions) and Pi (momenta).
    Theta and Pi are indexed by global mode number; party A owns modes 0..n_A-1.
    """
    n_modes: int
    hbar: float = 1.0
    theta: Optional[np.ndarray] = None
    eta: Optional[np.ndarray] = None

    def __post_init__(self):
        if int(self.n_modes) != self.n_modes or self.n_modes < 1:
            raise ShapeMismatch(f"n_modes must be a positive integer, got {self.n_modes}")
        if not self.hbar > 0:
            raise ShapeMismatch(f"hbar must be positive, got {self.hbar}")
        n = self.n_modes
        for name in ("theta", "eta"):
            value = getattr(self, name)
            block = np.zeros((n, n)) if value is None else np.array(value, dtype=float)
            if block.shape != (n, n):
                raise ShapeMismatch(f"{name} must be {n}x{n}, got shape {block.shape}")
            if skew_defect(block) > Config.CONSTRUCTION_TOL:
                raise NotSkewSymmetric(f"{name} is not skew-symmetric (defect {skew_defect(block):.3e})")
            object.__setattr__(self, name, _frozen(block))

    @classmethod
    def planar_pairs(cls, n_modes: int, theta: float, eta: float, hbar: float = 1.0,
                     partition: Optional[ModePartition] = None) -> "NCParameters":
        """
        Scalar shorthand: a [[0, t], [-t, 0]] block on consecutive mode pairs.

        Without a partition the pairs are (0,1), (2,3), ... over all modes. With one, pairs are
        counted inside each party, so a party with an odd mode count leaves its last mode
        undeformed and no block ever straddles the A|B cut.
        """
        if partition is not None and partition.n_modes != n_modes:
            raise PartitionMismatch(f"partition {partition} does not cover {n_modes} modes")
        ranges = [(0, n_modes)] if partition is None else [(0, partition.n_A), (partition.n_A, n_modes)]
        big_theta = np.zeros((n_modes, n_modes))
        big_eta = np.zeros((n_modes, n_modes))
        for start, stop in ranges:
            for i in range(start, stop - 1, 2):
                big_theta[i, i + 1], big_theta[i + 1, i] = theta, -theta
                big_eta[i, i + 1], big_eta[i + 1, i] = eta, -eta
        return cls(n_modes, hbar, big_theta, big_eta)

    @classmethod
    def planar(cls, theta: float, eta: float, hbar: float = 1.0) -> "NCParameters":
        return cls.planar_pairs(2, theta, eta, hbar)

    @property
    def is_commutative(self) -> bool:
        return not (np.any(self.theta) or np.any(self.eta))

    def is_block_diagonal(self, partition: ModePartition) -> bool:
        """True when no noncommutativity couples a mode of A with a mode of B"""
        if partition.n_modes != self.n_modes:
            raise PartitionMismatch(f"Partition {partition} does not cover {self.n_modes} modes")
        a = partition.n_A
        cross = max(
            float(np.max(np.abs(self.theta[:a, a:]), initial=0.0)),
            float(np.max(np.abs(self.eta[:a, a:]), initial=0.0)),
        )
        return cross < Config.SINGULAR_TOL


# ---------------------------------------------------------------------------
# Orderings
# ---------------------------------------------------------------------------

def ordering_permutation(partition: ModePartition) -> np.ndarray:
    """Index array p with party_vector = global_vector[p]"""
    n, a = partition.n_modes, partition.n_A
    return np.concatenate([
        np.arange(0, a), n + np.arange(0, a),
        np.arange(a, n), n + np.arange(a, n),
    ]).astype(int)


def _index_map(partition: ModePartition, source: Ordering, target: Ordering) -> Optional[np.ndarray]:
    if Ordering(source) == Ordering(target):
        return None
    perm = ordering_permutation(partition)
    if Ordering(source) == Ordering.GLOBAL_BLOCKED:
        return perm
    return np.argsort(perm)


def convert_vector(vector: np.ndarray, partition: ModePartition,
                   source: Ordering, target: Ordering) -> np.ndarray:
    """Reorder a phase-space vector (or a stack of them along the last axis)"""
    vector = np.asarray(vector, dtype=float)
    index = _index_map(partition, source, target)
    return vector.copy() if index is None else vector[..., index]


def convert_matrix(matrix: np.ndarray, partition: ModePartition,
                   source: Ordering, target: Ordering) -> np.ndarray:
    """Apply the ordering permutation P as P M P^T"""
    matrix = np.asarray(matrix, dtype=float)
    index = _index_map(partition, source, target)
    return matrix.copy() if index is None else matrix[np.ix_(index, index)]


def is_party_block_diagonal(matrix: np.ndarray, partition: ModePartition, ordering: Ordering) -> bool:
    """True when the A-B cross blocks vanish (below SINGULAR_TOL)"""
    party = convert_matrix(matrix, partition, ordering, Ordering.PARTY_BLOCKED)
    split = 2 * partition.n_A
    cross = max(
        float(np.max(np.abs(party[:split, split:]), initial=0.0)),
        float(np.max(np.abs(party[split:, :split]), initial=0.0)),
    )
    return cross < Config.SINGULAR_TOL


def _standard_block(n_modes: int) -> np.ndarray:
    eye = np.eye(n_modes)
    zero = np.zeros((n_modes, n_modes))
    return np.block([[zero, eye], [-eye, zero]])


# ---------------------------------------------------------------------------
# Matrix types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PhaseSpaceMatrix:
    """A 2n x 2n real matrix tagged with its ordering and partition (Lambda, D)"""
    matrix: np.ndarray
    ordering: Ordering
    partition: ModePartition

    def __post_init__(self):
        matrix = _frozen(self.matrix)
        dim = 2 * self.partition.n_modes
        if matrix.shape != (dim, dim):
            raise ShapeMismatch(f"Expected a {dim}x{dim} matrix, got shape {matrix.shape}")
        object.__setattr__(self, "matrix", matrix)
        object.__setattr__(self, "ordering", Ordering(self.ordering))

    def to_ordering(self, ordering: Ordering) -> "PhaseSpaceMatrix":
        return PhaseSpaceMatrix(
            convert_matrix(self.matrix, self.partition, self.ordering, ordering), ordering, self.partition
        )


@dataclass(frozen=True)
class PhaseSpaceForm:
    """
    A 2n x 2n real skew nonsingular matrix encoding [z_i, z_j] = i F_ij.

    Attributes:
        matrix: the form itself
        ordering: coordinate layout of the rows/columns
        role: omega, standard_J, omega_prime or custom
        partition: bipartition of the modes
        hbar: Planck constant the form was built with
    """
    matrix: np.ndarray
    ordering: Ordering
    role: Role
    partition: ModePartition
    hbar: float = 1.0

    def __post_init__(self):
        matrix = _frozen(self.matrix)
        dim = 2 * self.partition.n_modes
        if matrix.shape != (dim, dim):
            raise ShapeMismatch(f"Form must be {dim}x{dim} for partition {self.partition}, got {matrix.shape}")
        if skew_defect(matrix) > Config.CONSTRUCTION_TOL:
            raise NotSkewSymmetric(f"Form is not skew-symmetric (defect {skew_defect(matrix):.3e})")
        if scaled_determinant(matrix) <= Config.SINGULAR_TOL:
            raise SingularForm("Form is numerically singular")
        object.__setattr__(self, "matrix", matrix)
        object.__setattr__(self, "ordering", Ordering(self.ordering))
        object.__setattr__(self, "role", Role(self.role))
        if self.role == Role.STANDARD_J:
            expected = convert_matrix(
                _standard_block(self.partition.n_modes), self.partition,
                Ordering.GLOBAL_BLOCKED, self.ordering,
            )
            if not np.array_equal(matrix, expected):
                raise ShapeMismatch("role standard_J requires the exact block form [[0, I], [-I, 0]]")

    @property
    def dimension(self) -> int:
        return self.matrix.shape[0]

    @property
    def n_modes(self) -> int:
        return self.partition.n_modes

    def to_ordering(self, ordering: Ordering) -> "PhaseSpaceForm":
        """Same form expressed in another coordinate ordering"""
        converted = convert_matrix(self.matrix, self.partition, self.ordering, ordering)
        return PhaseSpaceForm(converted, ordering, self.role, self.partition, self.hbar)


def require_same_layout(ordering_a: Ordering, partition_a: ModePartition,
                        ordering_b: Ordering, partition_b: ModePartition, what: str = "operands"):
    """Orderings and partitions of two operands must agree; no implicit conversion"""
    if partition_a != partition_b:
        raise PartitionMismatch(f"{what}: partitions differ ({partition_a} vs {partition_b})")
    if Ordering(ordering_a) != Ordering(ordering_b):
        raise OrderingMismatch(f"{what}: orderings differ ({Ordering(ordering_a).value} vs {Ordering(ordering_b).value})")


# ---------------------------------------------------------------------------
# Builders
# ---------------------------------------------------------------------------

def build_J(n_modes: int, partition: Optional[ModePartition] = None) -> PhaseSpaceForm:
    """
    Standard symplectic matrix [[0, I], [-I, 0]] in global-blocked ordering.

    Args:
        n_modes: number of modes (>= 1)
        partition: optional bipartition to tag the form with (defaults to a single party)
    """
    if int(n_modes) != n_modes or n_modes < 1:
        raise ShapeMismatch(f"n_modes must be a positive integer, got {n_modes}")
    partition = partition or ModePartition.single(n_modes)
    if partition.n_modes != n_modes:
        raise PartitionMismatch(f"Partition {partition} does not cover {n_modes} modes")
    return PhaseSpaceForm(_standard_block(n_modes), Ordering.GLOBAL_BLOCKED, Role.STANDARD_J, partition)


def standard_form(partition: ModePartition, hbar: float = 1.0,
                  ordering: Ordering = Ordering.GLOBAL_BLOCKED) -> PhaseSpaceForm:
    """hbar*J in the requested ordering; the commutative-picture form"""
    matrix = convert_matrix(hbar * _standard_block(partition.n_modes), partition,
                            Ordering.GLOBAL_BLOCKED, ordering)
    role = Role.STANDARD_J if hbar == 1.0 else Role.OMEGA
    return PhaseSpaceForm(matrix, ordering, role, partition, hbar)


def is_canonical(form: PhaseSpaceForm) -> bool:
    """True when the form equals hbar*J in its own ordering"""
    expected = convert_matrix(form.hbar * _standard_block(form.n_modes), form.partition,
                              Ordering.GLOBAL_BLOCKED, form.ordering)
    return bool(np.max(np.abs(form.matrix - expected)) <= Config.CONSTRUCTION_TOL)


def build_omega(params: NCParameters, partition: ModePartition,
                ordering: Ordering = Ordering.PARTY_BLOCKED,
                require_bipartite: bool = False) -> PhaseSpaceForm:
    """
    Assemble Omega = [[Theta, hbar I], [-hbar I, Pi]] and express it in ``ordering``.

    Block-diagonal deformation (no A-B coupling) gives role=omega, i.e. Diag[Omega^A, Omega^B]
    in party-blocked ordering. Cross-party deformation is tagged role=custom, or rejected with
    PartitionMismatch when the caller asks for the bipartite form.
    """
    if partition.n_modes != params.n_modes:
        raise PartitionMismatch(f"Partition {partition} does not cover {params.n_modes} modes")

    n, hbar = params.n_modes, params.hbar
    eye = np.eye(n)
    global_matrix = np.block([[params.theta, hbar * eye], [-hbar * eye, params.eta]])

    block_diagonal = params.is_block_diagonal(partition)
    if not block_diagonal and require_bipartite:
        raise PartitionMismatch("Cross-party noncommutativity present; bipartite Omega = Diag[Omega^A, Omega^B] unavailable")
    role = Role.OMEGA if block_diagonal else Role.CUSTOM

    matrix = convert_matrix(global_matrix, partition, Ordering.GLOBAL_BLOCKED, ordering)
    if scaled_determinant(matrix) <= Config.SINGULAR_TOL:
        raise SingularForm(f"Assembled Omega is singular for theta/eta of {n} modes")
    return PhaseSpaceForm(matrix, ordering, role, partition, hbar)


def build_lambda(partition: ModePartition, ordering: Ordering = Ordering.PARTY_BLOCKED) -> PhaseSpaceMatrix:
    """Lambda = Diag[I^A, Lambda^B] with Lambda^B = Diag[I, -I]: mirror reflection of B momenta"""
    partition.require_bipartite()
    diagonal = np.concatenate([
        np.ones(2 * partition.n_A), np.ones(partition.n_B), -np.ones(partition.n_B),
    ])
    matrix = convert_matrix(np.diag(diagonal), partition, Ordering.PARTY_BLOCKED, ordering)
    return PhaseSpaceMatrix(matrix, ordering, partition)


def party_block(form: PhaseSpaceForm, party: str) -> PhaseSpaceForm:
    """Omega^A or Omega^B of a bipartite block-diagonal form, as a single-party form"""
    if party not in ("A", "B"):
        raise ValueError(f"party must be 'A' or 'B', got {party!r}")
    partition = form.partition
    if party == "B":
        partition.require_bipartite()
    if not is_party_block_diagonal(form.matrix, partition, form.ordering):
        raise PartitionMismatch("Form couples the two parties; no party block exists")
    party_matrix = convert_matrix(form.matrix, partition, form.ordering, Ordering.PARTY_BLOCKED)
    split = 2 * partition.n_A
    block = party_matrix[:split, :split] if party == "A" else party_matrix[split:, split:]
    n_party = partition.n_A if party == "A" else partition.n_B
    role = form.role if form.role in (Role.OMEGA, Role.STANDARD_J) else Role.CUSTOM
    return PhaseSpaceForm(block, Ordering.GLOBAL_BLOCKED, role, ModePartition.single(n_party), form.hbar)


def build_omega_prime(omega: PhaseSpaceForm, partition: ModePartition) -> PhaseSpaceForm:
    """Omega' = Diag[Omega^A, -Omega^B], returned in the ordering of ``omega``"""
    if omega.partition != partition:
        raise PartitionMismatch(f"Form partition {omega.partition} differs from {partition}")
    partition.require_bipartite()
    if not is_party_block_diagonal(omega.matrix, partition, omega.ordering):
        raise PartitionMismatch("Omega' needs a bipartite block-diagonal Omega")

    party_matrix = convert_matrix(omega.matrix, partition, omega.ordering, Ordering.PARTY_BLOCKED)
    split = 2 * partition.n_A
    party_matrix[split:, split:] *= -1.0
    matrix = convert_matrix(party_matrix, partition, Ordering.PARTY_BLOCKED, omega.ordering)
    role = Role.OMEGA if omega.role == Role.OMEGA_PRIME else Role.OMEGA_PRIME
    return PhaseSpaceForm(matrix, omega.ordering, role, partition, omega.hbar)


def build_D(S: "DarbouxMap", Lambda: PhaseSpaceMatrix, partition: ModePartition) -> PhaseSpaceMatrix:
    """
    D = S Lambda S^-1 = Diag[I^A, S^B Lambda^B (S^B)^-1] for a block-diagonal Darboux map.

    The result is expressed in the ordering of ``S``.
    """
    form = S.source_form
    if form.partition != partition or Lambda.partition != partition:
        raise PartitionMismatch("Darboux map, Lambda and partition must share one bipartition")
    partition.require_bipartite()
    if not is_party_block_diagonal(S.S, partition, form.ordering):
        raise PartitionMismatch("D = Diag[I^A, S^B Lambda^B (S^B)^-1] needs a block-diagonal S")
    residual = np.max(np.abs(S.S @ S.S_inv - np.eye(S.S.shape[0])))
    if residual > Config.DERIVED_TOL:
        raise NonInvertible(f"S * S_inv deviates from identity by {residual:.3e}")

    s_party = convert_matrix(S.S, partition, form.ordering, Ordering.PARTY_BLOCKED)
    s_inv_party = convert_matrix(S.S_inv, partition, form.ordering, Ordering.PARTY_BLOCKED)
    lam_party = convert_matrix(Lambda.matrix, partition, Lambda.ordering, Ordering.PARTY_BLOCKED)
    split = 2 * partition.n_A

    d_party = np.eye(s_party.shape[0])
    d_party[split:, split:] = s_party[split:, split:] @ lam_party[split:, split:] @ s_inv_party[split:, split:]
    matrix = convert_matrix(d_party, partition, Ordering.PARTY_BLOCKED, form.ordering)
    return PhaseSpaceMatrix(matrix, form.ordering, partition)
