"""
Wigner-based CHSH functional for two-mode Gaussian states.

B = E(0, 0) + E(a1, 0) + E(0, a2) - E(a1, a2), with the displaced-parity correlation
E(a1, a2) = (pi hbar)^2 W(z) and z = (Re a1, Im a1, Re a2, Im a2) in party-blocked order.
The two-mode vacuum peaks at W = 1 / (pi hbar)^2, so vacuum at the origin gives E = 1 and B = 2.
"""
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from scipy.optimize import minimize

from src.advanced.dynamics import QuadraticHamiltonian, apply_flow, propagator
from src.config import Config
from src.errors import BudgetExhausted, ModeCountMismatch
from src.gaussian_states import (
    GaussianState, Picture, WignerFunction, require_picture_pairing, wigner_function,
)
from src.logger import phase_logger
from src.nc_algebra import PhaseSpaceForm, standard_form

LOCAL_BOUND = 2.0
TSIRELSON_BOUND = 2.0 * np.sqrt(2.0)

FIXED = "fixed"
REOPTIMIZE = "reoptimize"

TRAJECTORY_COLUMNS = ["t", "bell_c", "bell_nc", "delta", "nonlocal_c", "nonlocal_nc"]


def is_nonlocal(bell_value: float) -> bool:
    """|B| > 2, with the verdict tolerance so the vacuum boundary does not flip on rounding"""
    return bool(abs(bell_value) - LOCAL_BOUND > Config.VERDICT_TOL)


@dataclass(frozen=True)
class CHSHEvaluation:
    """
    One evaluation of the Bell functional.

    Attributes:
        alpha1: amplitude of mode A (x + i p_x)
        alpha2: amplitude of mode B (y + i p_y)
        w_samples: W(0,0), W(a1,0), W(0,a2), W(a1,a2)
        bell_value: B
        nonlocal_: |B| > 2
        budget_exhausted: simplex refinement hit its iteration cap
        iterations: simplex iterations spent (0 when no search ran)
    """
    alpha1: complex
    alpha2: complex
    w_samples: Tuple[float, float, float, float]
    bell_value: float
    nonlocal_: bool
    budget_exhausted: bool = False
    iterations: int = 0
    hbar: float = 1.0

    def recombined(self) -> float:
        """Bell value rebuilt from the stored samples"""
        w00, w10, w01, w11 = self.w_samples
        return parity_scale(self.hbar) * (w00 + w10 + w01 - w11)


@dataclass(frozen=True)
class BellSearch:
    """Coarse grid over [-bound, bound]^4 followed by Nelder-Mead refinement"""
    grid_points: int = Config.BELL_GRID_POINTS
    bound: float = Config.BELL_GRID_BOUND
    refine: bool = True
    xatol: float = Config.BELL_XATOL
    max_iter: int = Config.BELL_MAX_ITER


@dataclass(frozen=True)
class TrajectoryRow:
    t: float
    bell_c: float
    bell_nc: float
    delta: float
    nonlocal_c: bool
    nonlocal_nc: bool


def parity_scale(hbar: float) -> float:
    return (np.pi * hbar) ** 2


def _require_two_modes(n_modes: int):
    if n_modes != 2:
        raise ModeCountMismatch(f"Bell functional needs exactly 2 modes, got {n_modes}")


def bell_values(wigner: WignerFunction, coords: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """
    Vectorized B over amplitude coordinates of shape (m, 4).

    Returns (B of shape (m,), samples of shape (4, m)).
    """
    coords = np.atleast_2d(np.asarray(coords, dtype=float))
    zeros = np.zeros_like(coords[:, :2])
    points = np.stack([
        np.hstack([zeros, zeros]),
        np.hstack([coords[:, :2], zeros]),
        np.hstack([zeros, coords[:, 2:]]),
        coords,
    ])
    samples = np.asarray(wigner(points), dtype=float)
    values = parity_scale(wigner.hbar) * (samples[0] + samples[1] + samples[2] - samples[3])
    return values, samples


def _amplitudes_to_coords(alpha1: complex, alpha2: complex) -> np.ndarray:
    return np.array([alpha1.real, alpha1.imag, alpha2.real, alpha2.imag], dtype=float)


def bell_chsh(wigner: WignerFunction, alpha1: complex, alpha2: complex) -> CHSHEvaluation:
    """
    Bell functional at one amplitude pair.

    Raises:
        ModeCountMismatch: the Wigner function is not a two-mode one
    """
    _require_two_modes(wigner.n_modes)
    alpha1, alpha2 = complex(alpha1), complex(alpha2)
    values, samples = bell_values(wigner, _amplitudes_to_coords(alpha1, alpha2))
    bell_value = float(values[0])
    if abs(bell_value) > TSIRELSON_BOUND + Config.TSIRELSON_SLACK:
        phase_logger.warning(f"Bell value {bell_value:.12f} exceeds the Tsirelson bound; state is not admissible")
    return CHSHEvaluation(alpha1, alpha2, tuple(float(w) for w in samples[:, 0]), bell_value,
                          is_nonlocal(bell_value), hbar=wigner.hbar)


def _grid_coords(search: BellSearch) -> np.ndarray:
    axis = np.linspace(-search.bound, search.bound, search.grid_points)
    mesh = np.meshgrid(axis, axis, axis, axis, indexing="ij")
    return np.stack(mesh, axis=-1).reshape(-1, 4)


def bell_optimize(state: GaussianState, form: PhaseSpaceForm, search: Optional[BellSearch] = None,
                  strict: bool = False) -> CHSHEvaluation:
    """
    Amplitude pair maximizing |B|: coarse grid, then Nelder-Mead from the best grid point.

    The returned value is never below the grid optimum. When the simplex runs out of
    iterations the best point is returned with budget_exhausted set, or BudgetExhausted is
    raised with it attached if ``strict``.
    """
    search = search or BellSearch()
    _require_two_modes(state.n_modes)
    require_picture_pairing(state, form)
    wigner = wigner_function(state)

    grid = _grid_coords(search)
    grid_values, _ = bell_values(wigner, grid)
    best_index = int(np.argmax(np.abs(grid_values)))
    best_coords, best_value = grid[best_index], float(grid_values[best_index])

    iterations, exhausted = 0, False
    if search.refine:
        result = minimize(
            lambda c: -abs(bell_values(wigner, c)[0][0]),
            best_coords,
            method="Nelder-Mead",
            options={"xatol": search.xatol, "fatol": np.inf, "maxiter": search.max_iter},
        )
        iterations = int(result.nit)
        exhausted = iterations >= search.max_iter
        refined_value = float(bell_values(wigner, result.x)[0][0])
        if abs(refined_value) > abs(best_value):
            best_coords, best_value = np.asarray(result.x, dtype=float), refined_value

    a1 = complex(best_coords[0], best_coords[1])
    a2 = complex(best_coords[2], best_coords[3])
    best = bell_chsh(wigner, a1, a2)
    evaluation = CHSHEvaluation(best.alpha1, best.alpha2, best.w_samples, best.bell_value, best.nonlocal_,
                                exhausted, iterations, best.hbar)

    phase_logger.log_optimizer_result(evaluation.bell_value, iterations, exhausted,
                                      grid_value=float(grid_values[best_index]), picture=state.picture.value)
    if exhausted and strict:
        raise BudgetExhausted(f"Simplex refinement hit {search.max_iter} iterations", evaluation=evaluation)
    return evaluation


def _branch_value(state: GaussianState, form: PhaseSpaceForm, policy: str,
                  amplitudes: Tuple[complex, complex], search: BellSearch) -> float:
    if policy == REOPTIMIZE:
        return bell_optimize(state, form, search).bell_value
    return bell_chsh(wigner_function(state), *amplitudes).bell_value


def compare_bell_trajectories(initial: GaussianState, H: QuadraticHamiltonian, omega: PhaseSpaceForm,
                              times: Sequence[float], amplitude_policy: str = FIXED,
                              amplitudes: Optional[Tuple[complex, complex]] = None,
                              search: Optional[BellSearch] = None,
                              max_workers: Optional[int] = None) -> List[TrajectoryRow]:
    """
    B^C(t) under hbar*J against B^NC(t) under Omega, both from the same initial data.

    With the fixed policy the amplitudes are optimized once on the initial state (unless
    given) and reused at every time; ``reoptimize`` searches again per branch and time.
    """
    if amplitude_policy not in (FIXED, REOPTIMIZE):
        raise ValueError(f"amplitude_policy must be '{FIXED}' or '{REOPTIMIZE}', got {amplitude_policy!r}")
    _require_two_modes(initial.n_modes)
    search = search or BellSearch()

    j_form = standard_form(initial.partition, initial.hbar, initial.ordering)
    state_c = initial.with_picture(Picture.COMMUTATIVE)
    state_nc = initial.with_picture(Picture.NONCOMMUTATIVE)
    require_picture_pairing(state_c, j_form)
    require_picture_pairing(state_nc, omega)

    if amplitude_policy == FIXED and amplitudes is None:
        start = bell_optimize(state_c, j_form, search)
        amplitudes = (start.alpha1, start.alpha2)
    if amplitudes is not None:
        amplitudes = (complex(amplitudes[0]), complex(amplitudes[1]))

    times = [float(t) for t in times]
    flows_c = [propagator(H, j_form, t) for t in times]
    flows_nc = [propagator(H, omega, t) for t in times]

    def row(index: int) -> TrajectoryRow:
        bell_c = _branch_value(apply_flow(state_c, *flows_c[index]), j_form, amplitude_policy, amplitudes, search)
        bell_nc = _branch_value(apply_flow(state_nc, *flows_nc[index]), omega, amplitude_policy, amplitudes, search)
        phase_logger.log_trajectory_row(times[index], bell_c, bell_nc)
        return TrajectoryRow(times[index], bell_c, bell_nc, bell_nc - bell_c,
                             is_nonlocal(bell_c), is_nonlocal(bell_nc))

    try:
        with ThreadPoolExecutor(max_workers=max_workers or Config.max_workers()) as executor:
            rows = list(executor.map(row, range(len(times))))
    except Exception as e:
        phase_logger.log_error(e, {"operation": "compare_bell_trajectories", "times": len(times)})
        raise
    return rows


def trajectory_frame(rows: Sequence[TrajectoryRow]) -> pd.DataFrame:
    """Trajectory rows as a DataFrame with the fixed column order"""
    return pd.DataFrame(
        [[r.t, r.bell_c, r.bell_nc, r.delta, r.nonlocal_c, r.nonlocal_nc] for r in rows],
        columns=TRAJECTORY_COLUMNS,
    )
