"""
Scenario files: JSON ingestion and construction of the objects a command works on
"""
import hashlib
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from src.advanced.bell import BellSearch, FIXED
from src.advanced.dynamics import QuadraticHamiltonian
from src.darboux import build_darboux_map
from src.errors import PreconditionFailed, ScenarioParseError
from src.gaussian_states import (
    GaussianState, Picture, make_thermal, make_two_mode_squeezed, make_vacuum, to_nc_picture,
)
from src.logger import phase_logger
from src.nc_algebra import ModePartition, NCParameters, Ordering, PhaseSpaceForm, build_omega, standard_form
from src.validator import ScenarioValidator


def _deformation_block(value: Any, n_modes: int) -> np.ndarray:
    """Planar scalar onto consecutive mode pairs, or the matrix as given"""
    if value is None:
        return np.zeros((n_modes, n_modes))
    if isinstance(value, list):
        return np.array(value, dtype=float)
    return NCParameters.planar_pairs(n_modes, float(value), 0.0).theta


@dataclass(frozen=True)
class Scenario:
    """A validated scenario document together with its raw bytes"""
    data: Dict[str, Any]
    raw: bytes = b""

    @property
    def name(self) -> str:
        return self.data.get('name', 'scenario')

    @property
    def sha256(self) -> str:
        return hashlib.sha256(self.raw).hexdigest()

    @property
    def hbar(self) -> float:
        return float(self.data.get('hbar', 1.0))

    @property
    def n_modes(self) -> int:
        return int(self.data['modes'])

    @property
    def partition(self) -> ModePartition:
        if 'partition' in self.data:
            n_A, n_B = self.data['partition']
        elif self.data['state']['type'] == 'two_mode_squeezed':
            # the squeezed pair is one mode per party
            n_A, n_B = 1, 1
        else:
            n_A, n_B = self.n_modes, 0
        return ModePartition(n_A, n_B)

    @property
    def ordering(self) -> Ordering:
        return Ordering(self.data.get('ordering', Ordering.GLOBAL_BLOCKED.value))

    # -- algebra ---------------------------------------------------------

    def nc_parameters(self) -> NCParameters:
        n = self.n_modes
        return NCParameters(n, self.hbar, _deformation_block(self.data.get('theta'), n),
                            _deformation_block(self.data.get('eta'), n))

    def planar_values(self) -> Tuple[float, float]:
        """Scalar theta and eta when given in shorthand, else 0"""
        theta, eta = self.data.get('theta', 0.0), self.data.get('eta', 0.0)
        return (float(theta) if not isinstance(theta, list) else 0.0,
                float(eta) if not isinstance(eta, list) else 0.0)

    def omega(self, require_bipartite: bool = False) -> PhaseSpaceForm:
        return build_omega(self.nc_parameters(), self.partition, self.ordering, require_bipartite)

    def standard(self) -> PhaseSpaceForm:
        return standard_form(self.partition, self.hbar, self.ordering)

    # -- state -----------------------------------------------------------

    def picture(self) -> Picture:
        spec = self.data['state']
        if spec.get('transport', False):
            return Picture.NONCOMMUTATIVE
        if 'picture' in spec:
            return Picture(spec['picture'])
        return Picture.COMMUTATIVE if self.nc_parameters().is_commutative else Picture.NONCOMMUTATIVE

    def base_state(self) -> GaussianState:
        """The state data as given, read in the commutative picture"""
        spec = self.data['state']
        kind = spec['type']
        n, hbar, partition = self.n_modes, self.hbar, self.partition
        if kind == 'explicit':
            mean = spec.get('mean', [0.0] * 2 * n)
            return GaussianState(mean, spec['cov'], Picture.COMMUTATIVE, self.ordering, partition, hbar)
        if kind == 'vacuum':
            state = make_vacuum(n, hbar, partition)
        elif kind == 'thermal':
            state = make_thermal(n, spec['n_bar'], hbar, partition)
        else:
            state = make_two_mode_squeezed(float(spec['r']), hbar)
        return state.to_ordering(self.ordering)

    def state(self) -> GaussianState:
        """The state in the picture the scenario asks for, transported through S if requested"""
        base = self.base_state()
        if self.data['state'].get('transport', False):
            dmap = build_darboux_map(self.omega())
            phase_logger.debug(f"Transporting {self.name} with {dmap.method.value} Darboux map")
            return to_nc_picture(base, dmap)
        return base.with_picture(self.picture())

    def form_for(self, state: GaussianState, require_bipartite: bool = False) -> PhaseSpaceForm:
        """hbar*J for commutative states, Omega for noncommutative ones"""
        if state.picture == Picture.COMMUTATIVE:
            return self.standard()
        return self.omega(require_bipartite)

    # -- dynamics and Bell -------------------------------------------------

    def hamiltonian(self) -> QuadraticHamiltonian:
        spec = self.data.get('hamiltonian')
        if spec is None:
            raise PreconditionFailed("scenario has no 'hamiltonian' block")
        if 'G' in spec:
            G = spec['G']
        else:
            G = float(spec['oscillator']) * np.eye(2 * self.n_modes)
        return QuadraticHamiltonian(G, self.ordering, self.partition, spec.get('linear'))

    def times(self) -> List[float]:
        spec = self.data.get('times')
        if spec is None:
            raise PreconditionFailed("scenario has no 'times' block")
        if isinstance(spec, dict):
            return np.linspace(float(spec['start']), float(spec['stop']), int(spec['steps'])).tolist()
        return [float(t) for t in spec]

    def bell_search(self) -> BellSearch:
        return BellSearch(**self.data.get('bell', {}).get('search', {}))

    def bell_amplitudes(self) -> Optional[Tuple[complex, complex]]:
        amplitudes = self.data.get('bell', {}).get('amplitudes')
        if amplitudes is None:
            return None
        return complex(*amplitudes[0]), complex(*amplitudes[1])

    def bell_policy(self) -> str:
        return self.data.get('bell', {}).get('policy', FIXED)


def parse_scenario(raw: bytes) -> Scenario:
    """
    Decode and validate scenario bytes.

    Raises:
        ScenarioParseError: not UTF-8 JSON
        ScenarioError: every validation violation at once
    """
    try:
        data = json.loads(raw.decode('utf-8'))
    except (UnicodeDecodeError, json.JSONDecodeError) as e:
        raise ScenarioParseError(f"Scenario is not valid UTF-8 JSON: {e}") from e
    ScenarioValidator.validate_scenario(data)
    return Scenario(data, raw)


def load_scenario(path: str) -> Scenario:
    try:
        raw = Path(path).read_bytes()
    except OSError as e:
        raise ScenarioParseError(f"Cannot read scenario {path}: {e}") from e
    scenario = parse_scenario(raw)
    phase_logger.info(f"Loaded scenario '{scenario.name}' ({scenario.n_modes} modes) from {path}")
    return scenario
