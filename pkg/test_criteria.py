"""
Tests for the RSUP and PPT checks and the kinematic entanglement scan
Usage: pytest test_criteria.py
"""
import numpy as np
import pytest
from numpy.testing import assert_allclose

from src.config import Config
from src.criteria import (
    ENTANGLED, PPT_PASS, SEPARABLE, PSDVerdict,
    hermitian_psd_min_eig, kinematic_entanglement_scan, mirror_covariance,
    ppt_separability_check, rsup_check,
)
from src.darboux import build_darboux_map, build_planar_S, planar_sw_constants
from src.errors import (
    NotInvolutive, PartitionMismatch, PictureFormMismatch, PreconditionFailed,
    ShapeMismatch, SymmetryViolation,
)
from src.gaussian_states import (
    GaussianState, Picture, make_thermal, make_two_mode_squeezed, make_vacuum, to_nc_picture,
)
from src.nc_algebra import (
    ModePartition, NCParameters, Ordering,
    build_D, build_lambda, build_omega, build_omega_prime, standard_form,
)


J1 = np.array([[0.0, 1.0], [-1.0, 0.0]])


def complex_min_eig(A, B):
    """Independent oracle: direct complex Hermitian eigen-decomposition"""
    return float(np.linalg.eigvalsh(np.asarray(A, dtype=complex) + 1j * np.asarray(B))[0])


def random_cov(rng, dim, low=0.05, high=1.5):
    R = rng.normal(size=(dim, dim))
    return rng.uniform(low, high) * (R @ R.T) + 1e-3 * np.eye(dim)


def correlated_thermal():
    """Sigma = I on 2+2 modes plus an x_0 x_2 correlation; passes the commutative PPT test"""
    cov = np.eye(8)
    cov[0, 2] = cov[2, 0] = 0.3
    return GaussianState(np.zeros(8), cov, Picture.COMMUTATIVE, Ordering.GLOBAL_BLOCKED, ModePartition(2, 2))


def test_kernel_two_by_two_cases():
    assert hermitian_psd_min_eig(np.eye(2), np.zeros((2, 2))) == pytest.approx(1.0, abs=1e-15)
    assert hermitian_psd_min_eig(0.5 * np.eye(2), 0.5 * J1) == pytest.approx(0.0, abs=1e-14)
    assert hermitian_psd_min_eig(0.25 * np.eye(2), 0.5 * J1) == pytest.approx(-0.25, abs=1e-14)


def test_kernel_matches_complex_oracle():
    rng = np.random.default_rng(42)
    for _ in range(50):
        A = random_cov(rng, 6)
        M = rng.normal(size=(6, 6))
        B = M - M.T
        assert hermitian_psd_min_eig(A, B) == pytest.approx(complex_min_eig(A, B), abs=1e-10)


def test_kernel_input_checks():
    with pytest.raises(ShapeMismatch):
        hermitian_psd_min_eig(np.eye(2), np.zeros((3, 3)))
    with pytest.raises(SymmetryViolation):
        hermitian_psd_min_eig([[1.0, 0.2], [0.0, 1.0]], np.zeros((2, 2)))
    with pytest.raises(SymmetryViolation):
        hermitian_psd_min_eig(np.eye(2), np.eye(2))


def test_verdict_tolerance_band():
    assert PSDVerdict.from_margin(-5e-11, 2, "yes", "no").passes
    assert not PSDVerdict.from_margin(-2e-10, 2, "yes", "no").passes


def test_vacuum_saturates_rsup():
    verdict = rsup_check(make_vacuum(1), standard_form(ModePartition.single(1)))
    assert verdict.passes
    assert abs(verdict.min_eigenvalue) <= 1e-12
    assert verdict.label == "admissible"
    assert verdict.matrix_dim == 2


def test_sub_vacuum_violates_rsup():
    state = GaussianState(np.zeros(2), 0.4 * np.eye(2), Picture.COMMUTATIVE,
                          Ordering.GLOBAL_BLOCKED, ModePartition.single(1))
    verdict = rsup_check(state, standard_form(ModePartition.single(1)))
    assert not verdict.passes
    assert verdict.min_eigenvalue == pytest.approx(-0.1, abs=1e-12)
    assert verdict.label == "violation"


def test_thermal_margin_grows_with_occupation():
    form = standard_form(ModePartition.single(1))
    margins = [rsup_check(make_thermal(1, n), form).min_eigenvalue for n in (0.1, 0.5, 1.0, 2.0)]
    assert all(m > 0 for m in margins)
    assert margins == sorted(margins)
    assert_allclose(margins, [0.1, 0.5, 1.0, 2.0], atol=1e-12)


def test_transported_vacuum_saturates_nc_rsup():
    dmap = build_planar_S(planar_sw_constants(0.2, 0.2))
    nc_vacuum = to_nc_picture(make_vacuum(2), dmap)
    verdict = rsup_check(nc_vacuum, dmap.source_form)
    assert verdict.passes
    assert abs(verdict.min_eigenvalue) <= 1e-10


def test_rsup_pairing_enforced():
    dmap = build_planar_S(planar_sw_constants(0.2, 0.2))
    with pytest.raises(PictureFormMismatch):
        rsup_check(make_vacuum(2), dmap.source_form)


def test_congruence_invariance_of_verdicts():
    rng = np.random.default_rng(42)
    disagreements, passes = 0, 0
    for _ in range(500):
        theta, eta = rng.uniform(-0.9, 0.9, size=2)
        dmap = build_planar_S(planar_sw_constants(theta, eta))
        cov = random_cov(rng, 4, 0.02, 3.0)
        state = GaussianState(np.zeros(4), cov, Picture.COMMUTATIVE, Ordering.GLOBAL_BLOCKED,
                              ModePartition.single(2))
        commutative = rsup_check(state, dmap.standard)
        deformed = rsup_check(to_nc_picture(state, dmap), dmap.source_form)
        disagreements += commutative.passes != deformed.passes
        passes += commutative.passes
    assert disagreements == 0
    assert 0 < passes < 500


def test_scaling_monotonicity():
    rng = np.random.default_rng(11)
    form = standard_form(ModePartition(1, 1))
    for _ in range(20):
        cov = random_cov(rng, 4, 0.05, 0.5)
        base = GaussianState(np.zeros(4), cov, Picture.COMMUTATIVE, Ordering.GLOBAL_BLOCKED, ModePartition(1, 1))
        scaled = GaussianState(np.zeros(4), 1.7 * cov, Picture.COMMUTATIVE, Ordering.GLOBAL_BLOCKED,
                               ModePartition(1, 1))
        assert rsup_check(scaled, form).min_eigenvalue >= rsup_check(base, form).min_eigenvalue - 1e-14


def test_product_vacuum_is_separable():
    partition = ModePartition(1, 1)
    verdict = ppt_separability_check(make_vacuum(2, partition=partition), standard_form(partition), partition)
    assert verdict.passes
    assert abs(verdict.min_eigenvalue) <= 1e-12
    assert verdict.label == SEPARABLE


def test_two_mode_squeezed_fails_ppt():
    partition = ModePartition(1, 1)
    J = standard_form(partition)
    J_prime = build_omega_prime(J, partition).matrix
    for r in (0.1, 0.25, 0.5, 1.0):
        state = make_two_mode_squeezed(r)
        verdict = ppt_separability_check(state, J, partition)
        assert not verdict.passes
        assert verdict.label == ENTANGLED
        oracle = complex_min_eig(state.cov, 0.5 * J_prime)
        assert oracle < -Config.VERDICT_TOL
        assert verdict.min_eigenvalue == pytest.approx(oracle, abs=1e-10)


def test_two_mode_squeezed_zero_is_vacuum():
    partition = ModePartition(1, 1)
    verdict = ppt_separability_check(make_two_mode_squeezed(0.0), standard_form(partition), partition)
    assert verdict.passes
    assert abs(verdict.min_eigenvalue) <= 1e-12


def test_larger_partition_pass_is_undetermined():
    partition = ModePartition(2, 2)
    verdict = ppt_separability_check(make_vacuum(4, partition=partition), standard_form(partition), partition)
    assert verdict.passes
    assert verdict.label == PPT_PASS


def test_ppt_rejects_cross_party_omega():
    partition = ModePartition(1, 1)
    omega = build_omega(NCParameters.planar(0.2, 0.2), partition, Ordering.GLOBAL_BLOCKED)
    state = make_vacuum(2, partition=partition, picture=Picture.NONCOMMUTATIVE)
    with pytest.raises(PartitionMismatch):
        ppt_separability_check(state, omega, partition)


def test_mirror_identity_and_lambda():
    state = make_two_mode_squeezed(0.5)
    assert_allclose(mirror_covariance(state, np.eye(4)).cov, state.cov, atol=0)
    Lam = build_lambda(ModePartition(1, 1), Ordering.GLOBAL_BLOCKED)
    mirrored = mirror_covariance(state, Lam).cov
    s = 0.5 * np.sinh(1.0)
    assert mirrored[2, 3] == pytest.approx(s)
    assert mirrored[0, 1] == pytest.approx(s)
    assert mirrored[3, 3] == pytest.approx(state.cov[3, 3])


def test_mirror_rejects_non_involution():
    with pytest.raises(NotInvolutive):
        mirror_covariance(make_vacuum(2), 2.0 * np.eye(4))


def test_mirror_equivalence_margins_commutative():
    rng = np.random.default_rng(42)
    for index in range(200):
        partition = ModePartition(1, 1) if index % 2 == 0 else ModePartition(1, 2)
        dim = 2 * partition.n_modes
        J = standard_form(partition)
        state = GaussianState(np.zeros(dim), random_cov(rng, dim, 0.05, 1.0), Picture.COMMUTATIVE,
                              Ordering.GLOBAL_BLOCKED, partition)
        mirrored = mirror_covariance(state, build_lambda(partition, Ordering.GLOBAL_BLOCKED))
        assert rsup_check(mirrored, J).min_eigenvalue == pytest.approx(
            ppt_separability_check(state, J, partition).min_eigenvalue, abs=1e-10)


def test_mirror_equivalence_verdicts_deformed():
    rng = np.random.default_rng(42)
    partition = ModePartition(2, 2)
    disagreements = 0
    for _ in range(50):
        theta, eta = rng.uniform(-0.8, 0.8, size=2)
        omega = build_omega(NCParameters.planar_pairs(4, theta, eta), partition, Ordering.GLOBAL_BLOCKED,
                            require_bipartite=True)
        D = build_D(build_darboux_map(omega), build_lambda(partition, Ordering.GLOBAL_BLOCKED), partition)
        state = GaussianState(np.zeros(8), random_cov(rng, 8, 0.05, 0.6), Picture.NONCOMMUTATIVE,
                              Ordering.GLOBAL_BLOCKED, partition)
        mirrored = mirror_covariance(state, D)
        disagreements += rsup_check(mirrored, omega).passes != ppt_separability_check(state, omega, partition).passes
    assert disagreements == 0


def kinematic_witness(seeds=range(40)):
    """
    Seeded search for a near-vacuum covariance with a scan point that is NC-admissible
    yet fails the PPT test. Every candidate passes both commutative checks.
    """
    partition = ModePartition(2, 2)
    grid = np.linspace(0.05, 1.5, 30).tolist()
    for seed in seeds:
        rng = np.random.default_rng(seed)
        R = rng.normal(size=(8, 8))
        cov = 0.5 * np.eye(8) + 0.05 * rng.uniform(0.2, 1.0) * (R @ R.T)
        state = GaussianState(np.zeros(8), cov, Picture.COMMUTATIVE, Ordering.GLOBAL_BLOCKED, partition)
        records = kinematic_entanglement_scan(state, grid, grid, partition)
        flipped = [r for r in records if r.entangled]
        if flipped:
            return state, records, flipped[0]
    return None


def test_kinematic_scan_flips_a_separable_state():
    witness = kinematic_witness()
    assert witness is not None
    state, records, point = witness
    partition = state.partition
    J = standard_form(partition, ordering=Ordering.GLOBAL_BLOCKED)
    assert rsup_check(state, J).passes
    assert ppt_separability_check(state, J, partition).passes

    assert point.nc_admissible
    assert point.margin < -Config.VERDICT_TOL
    assert all(r.nc_admissible for r in records if r.entangled)

    omega = build_omega(NCParameters.planar_pairs(4, point.theta, point.eta), partition,
                        Ordering.GLOBAL_BLOCKED, require_bipartite=True)
    omega_prime = build_omega_prime(omega, partition).matrix
    nc_state = state.with_picture(Picture.NONCOMMUTATIVE)
    assert not ppt_separability_check(nc_state, omega, partition).passes
    assert rsup_check(nc_state, omega).passes
    assert hermitian_psd_min_eig(state.cov, 0.5 * omega_prime) == pytest.approx(point.margin, abs=1e-12)
    assert complex_min_eig(state.cov, 0.5 * omega_prime) < 0
    assert complex_min_eig(state.cov, 0.5 * omega.matrix) >= -Config.VERDICT_TOL


def test_kinematic_scan_ignores_ppt_failures_of_inadmissible_points():
    state = correlated_thermal()
    thetas = [0.0, 0.5, 1.5, 2.5, 3.0]
    etas = [0.0, 0.25, 0.5]
    records = kinematic_entanglement_scan(state, thetas, etas, state.partition)

    assert [(r.theta, r.eta) for r in records] == [(t, e) for t in thetas for e in etas]
    assert not records[0].entangled
    for r in records:
        assert r.entangled == (r.nc_admissible and r.margin < -Config.VERDICT_TOL)
    assert any(r.margin < -Config.VERDICT_TOL and not r.nc_admissible and not r.entangled for r in records)


def test_kinematic_scan_keeps_pairs_inside_parties():
    partition = ModePartition(1, 2)
    state = make_vacuum(3, partition=partition)
    records = kinematic_entanglement_scan(state, [0.0, 0.4], [0.2], partition)
    assert [(r.theta, r.eta) for r in records] == [(0.0, 0.2), (0.4, 0.2)]
    assert not any(r.entangled for r in records)

    params = NCParameters.planar_pairs(3, 0.4, 0.2, partition=partition)
    assert_allclose(params.theta, [[0.0, 0.0, 0.0], [0.0, 0.0, 0.4], [0.0, -0.4, 0.0]])
    assert params.is_block_diagonal(partition)


def test_kinematic_scan_reports_singular_points():
    state = correlated_thermal()
    records = kinematic_entanglement_scan(state, [0.0, 1.0], [0.0, 1.0], state.partition)
    assert len(records) == 4
    singular = records[3]
    assert (singular.theta, singular.eta) == (1.0, 1.0)
    assert np.isnan(singular.margin)
    assert not singular.entangled and not singular.nc_admissible
    assert all(np.isfinite(r.margin) for r in records[:3])


def test_kinematic_scan_margins_are_lipschitz_in_theta():
    state = correlated_thermal()
    thetas = np.linspace(0.0, 0.9, 10).tolist()
    records = kinematic_entanglement_scan(state, thetas, [0.3], state.partition)
    margins = np.array([r.margin for r in records])
    slopes = np.abs(np.diff(margins)) / np.diff(thetas)
    assert np.max(slopes) <= 0.5 + 1e-9


def test_kinematic_scan_is_order_stable():
    state = correlated_thermal()
    thetas, etas = [0.0, 1.0, 2.0, 3.0], [0.0, 0.2]
    serial = kinematic_entanglement_scan(state, thetas, etas, state.partition, max_workers=1)
    parallel = kinematic_entanglement_scan(state, thetas, etas, state.partition, max_workers=4)
    assert serial == parallel


def test_kinematic_scan_precondition():
    state = make_two_mode_squeezed(0.5)
    with pytest.raises(PreconditionFailed):
        kinematic_entanglement_scan(state, [0.0], [0.0], state.partition)
    with pytest.raises(PreconditionFailed):
        kinematic_entanglement_scan(state.with_picture(Picture.NONCOMMUTATIVE), [0.0], [0.0], state.partition)


def test_verdicts_are_deterministic():
    state = make_two_mode_squeezed(0.3)
    J = standard_form(state.partition)
    first = ppt_separability_check(state, J, state.partition)
    second = ppt_separability_check(state, J, state.partition)
    assert first == second
