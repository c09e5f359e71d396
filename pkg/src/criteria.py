"""
Quantumness (RSUP) and bipartite separability (PPT) checks for Gaussian states.

Both checks reduce to one kernel: the smallest eigenvalue of the Hermitian matrix
Sigma + (i/2) F, computed through its real symmetric embedding.
"""
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from itertools import product
from typing import List, Optional, Sequence, Union

import numpy as np
from scipy.linalg import eigvalsh

from src.config import Config
from src.errors import (
    NotInvolutive, PartitionMismatch, PreconditionFailed, ShapeMismatch, SingularForm, SymmetryViolation,
)
from src.gaussian_states import GaussianState, Picture, require_picture_pairing
from src.logger import phase_logger
from src.nc_algebra import (
    ModePartition, NCParameters, PhaseSpaceForm, PhaseSpaceMatrix,
    build_omega, build_omega_prime, is_canonical, require_same_layout, skew_defect, standard_form,
)


ADMISSIBLE = "admissible"
VIOLATION = "violation"
SEPARABLE = "separable"
PPT_PASS = "ppt_pass (undetermined)"
ENTANGLED = "entangled"


@dataclass(frozen=True)
class PSDVerdict:
    """
    Outcome of a positivity test of Sigma + (i/2) F.

    Attributes:
        passes: min_eigenvalue >= -tolerance
        min_eigenvalue: the margin; negative means violation
        matrix_dim: dimension 2n of the tested Hermitian matrix
        tolerance: band below zero still counted as a pass
        label: human-readable verdict word
    """
    passes: bool
    min_eigenvalue: float
    matrix_dim: int
    tolerance: float = Config.VERDICT_TOL
    label: str = ""

    @classmethod
    def from_margin(cls, margin: float, matrix_dim: int, pass_label: str, fail_label: str) -> "PSDVerdict":
        passes = bool(margin >= -Config.VERDICT_TOL)
        return cls(passes, float(margin), int(matrix_dim), Config.VERDICT_TOL,
                   pass_label if passes else fail_label)


@dataclass(frozen=True)
class KinematicRecord:
    """
    One grid point of a kinematic entanglement scan.

    entangled is set only where the covariance is NC-admissible and fails the PPT test.
    margin is NaN and both flags are False where Omega(theta, eta) is singular.
    """
    theta: float
    eta: float
    margin: float
    entangled: bool
    nc_admissible: bool


def hermitian_psd_min_eig(A: np.ndarray, B: np.ndarray) -> float:
    """
    Smallest eigenvalue of the Hermitian matrix A + iB.

    The real embedding [[A, -B], [B, A]] has the same spectrum with doubled multiplicity,
    so the whole computation stays in real arithmetic.

    Raises:
        ShapeMismatch: A and B are not square matrices of one size
        SymmetryViolation: A is not symmetric or B is not skew
    """
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape != B.shape:
        raise ShapeMismatch(f"A and B must be square and equal in shape, got {A.shape} and {B.shape}")
    asymmetry = float(np.max(np.abs(A - A.T), initial=0.0))
    if asymmetry > Config.CONSTRUCTION_TOL:
        raise SymmetryViolation(f"A is not symmetric (defect {asymmetry:.3e})")
    if skew_defect(B) > Config.CONSTRUCTION_TOL:
        raise SymmetryViolation(f"B is not skew-symmetric (defect {skew_defect(B):.3e})")

    embedding = np.block([[A, -B], [B, A]])
    return float(eigvalsh(embedding)[0])


def _pencil_margin(state: GaussianState, form_matrix: np.ndarray) -> float:
    return hermitian_psd_min_eig(state.cov, 0.5 * form_matrix)


def rsup_check(state: GaussianState, form: PhaseSpaceForm) -> PSDVerdict:
    """Robertson-Schroedinger test Sigma + (i/2) form >= 0 in the picture the form belongs to"""
    phase_logger.log_check_attempt("rsup", picture=state.picture.value, role=form.role.value,
                                   n_modes=state.n_modes)
    if state.dimension != form.dimension:
        raise ShapeMismatch(f"state has dimension {state.dimension}, form has {form.dimension}")
    require_picture_pairing(state, form)

    margin = _pencil_margin(state, form.matrix)
    verdict = PSDVerdict.from_margin(margin, state.dimension, ADMISSIBLE, VIOLATION)
    phase_logger.log_verdict("rsup", verdict.passes, verdict.min_eigenvalue, label=verdict.label)
    return verdict


def ppt_separability_check(state: GaussianState, omega: PhaseSpaceForm,
                           partition: ModePartition) -> PSDVerdict:
    """
    PPT test Sigma + (i/2) Omega' >= 0 with Omega' = Diag[Omega^A, -Omega^B].

    A failure certifies entanglement. A pass is labeled separable only for one mode per
    party under the standard form; every other pass stays undetermined.
    """
    phase_logger.log_check_attempt("ppt", picture=state.picture.value, role=omega.role.value,
                                   n_A=partition.n_A, n_B=partition.n_B)
    if state.partition != partition:
        raise PartitionMismatch(f"state partition {state.partition} differs from {partition}")
    require_picture_pairing(state, omega)
    omega_prime = build_omega_prime(omega, partition)

    margin = _pencil_margin(state, omega_prime.matrix)
    one_by_one = partition.n_A == 1 and partition.n_B == 1
    pass_label = SEPARABLE if one_by_one and is_canonical(omega) else PPT_PASS
    verdict = PSDVerdict.from_margin(margin, state.dimension, pass_label, ENTANGLED)
    phase_logger.log_verdict("ppt", verdict.passes, verdict.min_eigenvalue, label=verdict.label)
    return verdict


def mirror_covariance(state: GaussianState, reflection: Union[PhaseSpaceMatrix, np.ndarray]) -> GaussianState:
    """
    Mirrored state with mean M m and covariance M Sigma M^T.

    Raises:
        NotInvolutive: M M deviates from the identity by more than Config.DERIVED_TOL
    """
    if isinstance(reflection, PhaseSpaceMatrix):
        require_same_layout(state.ordering, state.partition, reflection.ordering, reflection.partition,
                            "state and reflection")
        M = reflection.matrix
    else:
        M = np.asarray(reflection, dtype=float)
    if M.shape != state.cov.shape:
        raise ShapeMismatch(f"reflection must be {state.cov.shape}, got {M.shape}")

    defect = float(np.max(np.abs(M @ M - np.eye(M.shape[0]))))
    if defect > Config.DERIVED_TOL:
        raise NotInvolutive(f"M^2 deviates from the identity by {defect:.3e}")

    cov = M @ state.cov @ M.T
    return GaussianState(M @ state.mean, 0.5 * (cov + cov.T), state.picture,
                         state.ordering, state.partition, state.hbar)


def _scan_point(state: GaussianState, partition: ModePartition, theta: float, eta: float) -> KinematicRecord:
    params = NCParameters.planar_pairs(partition.n_modes, theta, eta, state.hbar, partition=partition)
    try:
        omega = build_omega(params, partition, ordering=state.ordering, require_bipartite=True)
    except SingularForm as e:
        phase_logger.warning(f"Scan point theta={theta}, eta={eta} skipped: {e}")
        return KinematicRecord(float(theta), float(eta), float("nan"), False, False)
    nc_state = state.with_picture(Picture.NONCOMMUTATIVE)
    ppt = ppt_separability_check(nc_state, omega, partition)
    admissible = rsup_check(nc_state, omega)
    # entangled only where the covariance is a state under Omega
    entangled = admissible.passes and not ppt.passes
    record = KinematicRecord(float(theta), float(eta), ppt.min_eigenvalue, entangled, admissible.passes)
    phase_logger.log_scan_point(record.theta, record.eta, record.margin, record.entangled)
    return record


def kinematic_entanglement_scan(state: GaussianState, theta_grid: Sequence[float],
                                eta_grid: Sequence[float], partition: ModePartition,
                                max_workers: Optional[int] = None) -> List[KinematicRecord]:
    """
    Reinterpret one fixed commutative covariance under Omega(theta, eta) for every grid pair.

    Records come back in grid order (theta outer, eta inner) whatever the worker count.
    The planar deformation sits on consecutive mode pairs inside each party, so it only
    acts within a party that owns at least two modes. A point is entangled when the
    covariance is NC-admissible there and fails the PPT test; singular points give a
    NaN margin instead of aborting the scan.

    Raises:
        PreconditionFailed: the state is not commutative or fails the commutative PPT test
    """
    if state.picture != Picture.COMMUTATIVE:
        raise PreconditionFailed("kinematic scan starts from a commutative-picture state")
    baseline = ppt_separability_check(state, standard_form(partition, state.hbar, state.ordering), partition)
    if not baseline.passes:
        raise PreconditionFailed(
            f"state fails the commutative PPT test (margin {baseline.min_eigenvalue:.3e}); nothing to witness"
        )

    grid = list(product([float(t) for t in theta_grid], [float(e) for e in eta_grid]))
    workers = max_workers or Config.max_workers()
    try:
        with ThreadPoolExecutor(max_workers=workers) as executor:
            records = list(executor.map(lambda pair: _scan_point(state, partition, *pair), grid))
    except Exception as e:
        phase_logger.log_error(e, {"operation": "kinematic_entanglement_scan", "grid_size": len(grid)})
        raise

    phase_logger.info(
        f"Kinematic scan finished: {len(records)} points, {sum(r.entangled for r in records)} entangled"
    )
    return records
