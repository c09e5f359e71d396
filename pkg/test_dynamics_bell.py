"""
Tests for quadratic dynamics and the Wigner-based Bell functional
Usage: pytest test_dynamics_bell.py
"""
import numpy as np
import pytest
from numpy.testing import assert_allclose

from src.advanced.bell import (
    TRAJECTORY_COLUMNS, TSIRELSON_BOUND, BellSearch,
    bell_chsh, bell_optimize, bell_values, compare_bell_trajectories, trajectory_frame,
)
from src.advanced.dynamics import (
    QuadraticHamiltonian, commutative_hamiltonian, evolve, nc_hamiltonian, propagator,
)
from src.criteria import rsup_check
from src.darboux import build_darboux_map, build_planar_S, planar_sw_constants
from src.errors import (
    BudgetExhausted, ModeCountMismatch, OrderingMismatch, PictureFormMismatch, SymmetryViolation,
)
from src.gaussian_states import (
    GaussianState, Picture, make_thermal, make_two_mode_squeezed, make_vacuum, to_nc_picture,
    wigner_function,
)
from src.nc_algebra import ModePartition, NCParameters, Ordering, build_omega, standard_form

PAIR = ModePartition(1, 1)


def tmsv_bell(r, x):
    """B at alpha1 = x, alpha2 = -x for the two-mode squeezed vacuum"""
    return 1.0 + 2.0 * np.exp(-np.cosh(2 * r) * x ** 2) - np.exp(-2.0 * np.exp(2 * r) * x ** 2)


def stable_hamiltonian(rng, partition, ordering=Ordering.GLOBAL_BLOCKED):
    dim = 2 * partition.n_modes
    R = rng.normal(size=(dim, dim))
    return QuadraticHamiltonian(0.3 * R @ R.T + np.eye(dim), ordering, partition, rng.normal(size=dim))


def planar_omega(theta, eta, partition=PAIR):
    return build_omega(NCParameters.planar(theta, eta), partition, Ordering.GLOBAL_BLOCKED)


# ---------------------------------------------------------------------------
# Dynamics
# ---------------------------------------------------------------------------

def test_hamiltonian_must_be_symmetric():
    with pytest.raises(SymmetryViolation):
        QuadraticHamiltonian([[1.0, 0.5], [0.0, 1.0]], Ordering.GLOBAL_BLOCKED, ModePartition.single(1))


def test_zero_time_leaves_state_unchanged():
    state = make_thermal(2, [0.3, 0.8], partition=PAIR)
    H = stable_hamiltonian(np.random.default_rng(1), PAIR)
    evolved = evolve(state, H, standard_form(PAIR), 0.0)
    assert np.array_equal(evolved.cov, state.cov)
    assert np.array_equal(evolved.mean, state.mean)


def test_free_oscillator_period():
    partition = ModePartition.single(1)
    state = GaussianState([1.0, 0.5], [[0.8, 0.1], [0.1, 0.6]], Picture.COMMUTATIVE,
                          Ordering.GLOBAL_BLOCKED, partition)
    H = QuadraticHamiltonian.oscillator(partition)
    evolved = evolve(state, H, standard_form(partition), 2.0 * np.pi)
    assert_allclose(evolved.mean, state.mean, atol=1e-9)
    assert_allclose(evolved.cov, state.cov, atol=1e-9)


def test_free_oscillator_quarter_period_rotates():
    partition = ModePartition.single(1)
    M, drift = propagator(QuadraticHamiltonian.oscillator(partition), standard_form(partition), np.pi / 2)
    # dx/dt = p, dp/dt = -x
    assert_allclose(M, [[0.0, 1.0], [-1.0, 0.0]], atol=1e-12)
    assert_allclose(drift, 0.0, atol=0)


def test_linear_term_drift():
    partition = ModePartition.single(1)
    H = QuadraticHamiltonian(np.zeros((2, 2)), Ordering.GLOBAL_BLOCKED, partition, [0.0, 1.0])
    M, drift = propagator(H, standard_form(partition), 3.0)
    assert_allclose(M, np.eye(2), atol=0)
    assert_allclose(drift, [3.0, 0.0], atol=1e-14)


def test_composition_law_both_flows():
    rng = np.random.default_rng(42)
    partition = ModePartition.single(2)
    omega = planar_omega(0.3, 0.4, partition)
    for form, picture in ((standard_form(partition), Picture.COMMUTATIVE), (omega, Picture.NONCOMMUTATIVE)):
        H = stable_hamiltonian(rng, partition)
        state = make_thermal(2, [0.2, 0.5], partition=partition, picture=picture)
        t1, t2 = 0.7, 1.9
        stepped = evolve(evolve(state, H, form, t1), H, form, t2)
        direct = evolve(state, H, form, t1 + t2)
        assert_allclose(stepped.mean, direct.mean, atol=1e-9)
        assert_allclose(stepped.cov, direct.cov, atol=1e-9)


def test_covariance_determinant_conserved():
    rng = np.random.default_rng(7)
    partition = ModePartition.single(2)
    omega = planar_omega(0.2, -0.5, partition)
    for form, picture in ((standard_form(partition), Picture.COMMUTATIVE), (omega, Picture.NONCOMMUTATIVE)):
        H = stable_hamiltonian(rng, partition)
        state = make_thermal(2, [0.1, 0.4], partition=partition, picture=picture)
        det0 = np.linalg.det(state.cov)
        for t in np.linspace(0.0, 4.0 * np.pi, 9):
            assert abs(np.linalg.det(evolve(state, H, form, t).cov) / det0 - 1.0) <= 1e-8


def test_quantumness_preserved_along_flow():
    rng = np.random.default_rng(3)
    dmap = build_planar_S(planar_sw_constants(0.3, 0.2))
    omega = dmap.source_form
    H = stable_hamiltonian(rng, omega.partition)
    admissible = to_nc_picture(make_vacuum(2), dmap)
    squeezed = GaussianState(np.zeros(4), 0.45 * np.eye(4), Picture.NONCOMMUTATIVE,
                             Ordering.GLOBAL_BLOCKED, omega.partition)
    for state in (admissible, squeezed):
        verdict = rsup_check(state, omega).passes
        for t in np.linspace(0.1, 3.0, 10):
            assert rsup_check(evolve(state, H, omega, t), omega).passes == verdict


def test_nc_hamiltonian_reproduces_G():
    rng = np.random.default_rng(5)
    partition = ModePartition(2, 2)
    omega = build_omega(NCParameters.planar_pairs(4, 0.3, 0.5), partition, Ordering.GLOBAL_BLOCKED)
    dmap = build_darboux_map(omega)
    H = stable_hamiltonian(rng, partition)
    H_tilde = commutative_hamiltonian(H, dmap)
    assert_allclose(H_tilde.G, dmap.S.T @ H.G @ dmap.S, atol=1e-12)
    H_nc = nc_hamiltonian(H_tilde, dmap)
    assert_allclose(H_nc.G, H.G, atol=1e-12)
    assert_allclose(H_nc.linear, H.linear, atol=1e-12)
    zeta = rng.normal(size=8)
    assert H_tilde(zeta) == pytest.approx(H(dmap.S @ zeta), rel=1e-12)


def test_evolve_checks_pairing_and_layout():
    state = make_vacuum(2, partition=PAIR)
    H = QuadraticHamiltonian.oscillator(PAIR)
    with pytest.raises(PictureFormMismatch):
        evolve(state, H, planar_omega(0.2, 0.2), 1.0)
    with pytest.raises(OrderingMismatch):
        evolve(state, H.to_ordering(Ordering.PARTY_BLOCKED), standard_form(PAIR), 1.0)


# ---------------------------------------------------------------------------
# Bell functional
# ---------------------------------------------------------------------------

def test_vacuum_at_origin_gives_two():
    evaluation = bell_chsh(wigner_function(make_vacuum(2, partition=PAIR)), 0.0, 0.0)
    assert abs(evaluation.bell_value - 2.0) <= 1e-9
    assert not evaluation.nonlocal_
    assert abs(evaluation.recombined() - evaluation.bell_value) <= 1e-14


def test_vacuum_with_hbar_still_gives_two():
    evaluation = bell_chsh(wigner_function(make_vacuum(2, hbar=2.0, partition=PAIR)), 0.0, 0.0)
    assert abs(evaluation.bell_value - 2.0) <= 1e-9


def test_two_mode_squeezed_closed_form():
    state = make_two_mode_squeezed(0.5)
    evaluation = bell_chsh(wigner_function(state), 0.4, -0.4)
    assert evaluation.bell_value == pytest.approx(tmsv_bell(0.5, 0.4), abs=1e-12)
    assert evaluation.bell_value > 2.14
    assert evaluation.nonlocal_


def test_bell_requires_two_modes():
    with pytest.raises(ModeCountMismatch):
        bell_chsh(wigner_function(make_vacuum(4, partition=ModePartition(2, 2))), 0.0, 0.0)
    with pytest.raises(ModeCountMismatch):
        bell_optimize(make_vacuum(1), standard_form(ModePartition.single(1)))


def test_vacuum_optimum_is_two():
    evaluation = bell_optimize(make_vacuum(2, partition=PAIR), standard_form(PAIR))
    assert abs(evaluation.bell_value - 2.0) <= 1e-6
    assert evaluation.bell_value <= 2.0 + 1e-9


def test_refinement_dominates_grid():
    state = make_two_mode_squeezed(0.5)
    J = standard_form(PAIR)
    grid_only = bell_optimize(state, J, BellSearch(refine=False))
    refined = bell_optimize(state, J)
    assert grid_only.bell_value > 2.0
    assert refined.bell_value >= grid_only.bell_value - 1e-12
    assert refined.bell_value <= TSIRELSON_BOUND + 1e-9
    assert refined.nonlocal_


def test_optimizer_is_deterministic():
    state = make_two_mode_squeezed(0.3)
    search = BellSearch(grid_points=7)
    first = bell_optimize(state, standard_form(PAIR), search)
    second = bell_optimize(state, standard_form(PAIR), search)
    assert first == second


def test_budget_exhaustion_flag_and_strict_mode():
    state = make_two_mode_squeezed(0.5)
    search = BellSearch(grid_points=3, max_iter=2)
    evaluation = bell_optimize(state, standard_form(PAIR), search)
    assert evaluation.budget_exhausted
    with pytest.raises(BudgetExhausted) as info:
        bell_optimize(state, standard_form(PAIR), search, strict=True)
    assert info.value.evaluation == evaluation


def test_product_states_stay_local():
    rng = np.random.default_rng(42)
    for _ in range(20):
        blocks = []
        for _party in range(2):
            s = rng.uniform(-0.8, 0.8)
            n = rng.uniform(0.0, 1.0)
            blocks.append((n + 0.5) * np.diag([np.exp(2 * s), np.exp(-2 * s)]))
        cov = np.block([[blocks[0], np.zeros((2, 2))], [np.zeros((2, 2)), blocks[1]]])
        state = GaussianState(rng.normal(scale=0.5, size=4), cov, Picture.COMMUTATIVE,
                              Ordering.PARTY_BLOCKED, PAIR)
        coords = rng.uniform(-2.0, 2.0, size=(500, 4))
        values, _ = bell_values(wigner_function(state), coords)
        assert np.max(np.abs(values)) <= 2.0 + 1e-9


def test_tsirelson_sanity():
    rng = np.random.default_rng(8)
    for r in (0.25, 0.5, 1.0, 2.0):
        values, _ = bell_values(wigner_function(make_two_mode_squeezed(r)), rng.uniform(-2, 2, size=(2000, 4)))
        assert np.max(np.abs(values)) <= TSIRELSON_BOUND + 1e-9


# ---------------------------------------------------------------------------
# Trajectories
# ---------------------------------------------------------------------------

def test_initial_rows_agree():
    rng = np.random.default_rng(42)
    state = make_two_mode_squeezed(0.5)
    H = QuadraticHamiltonian.oscillator(PAIR)
    for _ in range(50):
        theta, eta = rng.uniform(-0.9, 0.9, size=2)
        rows = compare_bell_trajectories(state, H, planar_omega(theta, eta), [0.0, 0.5],
                                         amplitudes=(0.4, -0.4))
        assert abs(rows[0].delta) <= 1e-12


def test_commutative_limit_trajectories_agree():
    state = make_two_mode_squeezed(0.5)
    H = QuadraticHamiltonian.oscillator(PAIR)
    times = np.linspace(0.0, 2.0 * np.pi, 9).tolist()
    rows = compare_bell_trajectories(state, H, planar_omega(0.0, 0.0), times, amplitudes=(0.4, -0.4))
    assert all(abs(row.delta) <= 1e-10 for row in rows)


def test_deformed_trajectory_profile():
    state = make_two_mode_squeezed(0.5)
    H = QuadraticHamiltonian.oscillator(PAIR)
    omega = planar_omega(0.2, 0.2)
    times = [k * np.pi / 16 for k in range(33)]
    rows = compare_bell_trajectories(state, H, omega, times, amplitudes=(0.4, -0.4))

    assert [row.t for row in rows] == times
    assert all(abs(row.bell_c) <= TSIRELSON_BOUND + 1e-9 for row in rows)
    assert all(abs(row.bell_nc) <= TSIRELSON_BOUND + 1e-9 for row in rows)
    assert max(abs(row.delta) for row in rows) > 0.0

    row = rows[5]
    evolved = evolve(state.with_picture(Picture.NONCOMMUTATIVE), H, omega, row.t)
    manual = bell_chsh(wigner_function(evolved), 0.4, -0.4).bell_value
    assert row.bell_nc == pytest.approx(manual, abs=1e-12)


def test_fixed_policy_optimizes_once():
    state = make_two_mode_squeezed(0.5)
    H = QuadraticHamiltonian.oscillator(PAIR)
    search = BellSearch(grid_points=5)
    rows = compare_bell_trajectories(state, H, planar_omega(0.1, 0.1), [0.0, 1.0], search=search)
    start = bell_optimize(state, standard_form(PAIR), search)
    assert rows[0].bell_c == pytest.approx(start.bell_value, abs=1e-12)


def test_reoptimize_policy():
    state = make_two_mode_squeezed(0.5)
    H = QuadraticHamiltonian.oscillator(PAIR)
    omega = planar_omega(0.2, 0.1)
    search = BellSearch(grid_points=5, refine=False)
    rows = compare_bell_trajectories(state, H, omega, [0.0, 0.8], amplitude_policy="reoptimize", search=search)
    evolved = evolve(state.with_picture(Picture.NONCOMMUTATIVE), H, omega, 0.8)
    assert rows[1].bell_nc == pytest.approx(bell_optimize(evolved, omega, search).bell_value, abs=1e-12)


def test_unknown_policy_rejected():
    with pytest.raises(ValueError):
        compare_bell_trajectories(make_two_mode_squeezed(0.5), QuadraticHamiltonian.oscillator(PAIR),
                                  planar_omega(0.1, 0.1), [0.0], amplitude_policy="sometimes")


def test_trajectory_frame_columns():
    rows = compare_bell_trajectories(make_two_mode_squeezed(0.5), QuadraticHamiltonian.oscillator(PAIR),
                                     planar_omega(0.1, 0.1), [0.0, 0.5], amplitudes=(0.4, -0.4))
    frame = trajectory_frame(rows)
    assert list(frame.columns) == TRAJECTORY_COLUMNS
    assert len(frame) == 2
