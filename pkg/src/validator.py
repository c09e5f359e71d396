"""
Input validation module for scenario files
"""
from numbers import Real
from typing import Any, Dict, List, Optional, Tuple

from src.errors import ScenarioError
from src.logger import phase_logger

Violation = Tuple[str, str]


def _is_number(value: Any) -> bool:
    return isinstance(value, Real) and not isinstance(value, bool)


def _is_int(value: Any) -> bool:
    return isinstance(value, int) and not isinstance(value, bool)


def _is_vector(value: Any, length: int) -> bool:
    return isinstance(value, list) and len(value) == length and all(_is_number(v) for v in value)


def _is_matrix(value: Any, size: int) -> bool:
    return isinstance(value, list) and len(value) == size and all(_is_vector(row, size) for row in value)


class ScenarioValidator:
    """Validates scenario documents, collecting every violation before any computation"""

    VALID_STATES = ['vacuum', 'thermal', 'two_mode_squeezed', 'explicit']
    VALID_PICTURES = ['commutative', 'noncommutative']
    VALID_ORDERINGS = ['party_blocked', 'global_blocked']
    VALID_POLICIES = ['fixed', 'reoptimize']

    @staticmethod
    def _reject(violations: List[Violation], field: str, value: Any, reason: str):
        phase_logger.log_validation_error(field, value, reason)
        violations.append((field, reason))

    @staticmethod
    def validate_header(data: Dict[str, Any]) -> List[Violation]:
        """Validate hbar, modes, partition and ordering"""
        violations: List[Violation] = []
        reject = ScenarioValidator._reject

        name = data.get('name', 'scenario')
        if not isinstance(name, str):
            reject(violations, 'name', name, "Must be a string")

        hbar = data.get('hbar', 1.0)
        if not _is_number(hbar) or hbar <= 0:
            reject(violations, 'hbar', hbar, "Must be a positive number")

        modes = data.get('modes')
        if not _is_int(modes) or modes < 1:
            reject(violations, 'modes', modes, "Must be a positive integer")
            return violations

        partition = data.get('partition', [modes, 0])
        if (not isinstance(partition, list) or len(partition) != 2
                or not all(_is_int(n) and n >= 0 for n in partition)):
            reject(violations, 'partition', partition, "Must be [n_A, n_B] with non-negative integers")
        elif partition[0] < 1 or sum(partition) != modes:
            reject(violations, 'partition', partition, f"Must have n_A >= 1 and n_A + n_B = {modes}")

        ordering = data.get('ordering', 'global_blocked')
        if ordering not in ScenarioValidator.VALID_ORDERINGS:
            reject(violations, 'ordering', ordering, f"Must be one of {ScenarioValidator.VALID_ORDERINGS}")
        return violations

    @staticmethod
    def validate_deformation(data: Dict[str, Any], modes: int) -> List[Violation]:
        """theta and eta: planar scalar or an n x n matrix"""
        violations: List[Violation] = []
        for key in ('theta', 'eta'):
            if key not in data:
                continue
            value = data[key]
            if not (_is_number(value) or _is_matrix(value, modes)):
                ScenarioValidator._reject(violations, key, value, f"Must be a number or a {modes}x{modes} matrix")
        return violations

    @staticmethod
    def validate_state(state: Any, modes: int, partition: Optional[List[int]]) -> List[Violation]:
        """Validate the state constructor block"""
        violations: List[Violation] = []
        reject = ScenarioValidator._reject
        dim = 2 * modes

        if not isinstance(state, dict):
            reject(violations, 'state', state, "Is required and must be an object")
            return violations

        kind = state.get('type')
        if kind not in ScenarioValidator.VALID_STATES:
            reject(violations, 'state.type', kind, f"Must be one of {ScenarioValidator.VALID_STATES}")

        if kind == 'thermal':
            n_bar = state.get('n_bar')
            valid = (_is_number(n_bar) and n_bar >= 0) or (
                _is_vector(n_bar, modes) and all(n >= 0 for n in n_bar))
            if not valid:
                reject(violations, 'state.n_bar', n_bar, f"Must be a non-negative number or {modes} of them")
        elif kind == 'two_mode_squeezed':
            if not _is_number(state.get('r')):
                reject(violations, 'state.r', state.get('r'), "Must be a number")
            if modes != 2 or (partition is not None and partition != [1, 1]):
                reject(violations, 'state.type', kind, "Two-mode squeezed vacuum needs modes = 2 and partition [1, 1]")
        elif kind == 'explicit':
            if not _is_vector(state.get('mean', [0.0] * dim), dim):
                reject(violations, 'state.mean', state.get('mean'), f"Must be a vector of length {dim}")
            if not _is_matrix(state.get('cov'), dim):
                reject(violations, 'state.cov', state.get('cov'), f"Must be a {dim}x{dim} matrix")

        picture = state.get('picture')
        if picture is not None and picture not in ScenarioValidator.VALID_PICTURES:
            reject(violations, 'state.picture', picture, f"Must be one of {ScenarioValidator.VALID_PICTURES}")
        transport = state.get('transport', False)
        if not isinstance(transport, bool):
            reject(violations, 'state.transport', transport, "Must be true or false")
        return violations

    @staticmethod
    def validate_hamiltonian(hamiltonian: Any, modes: int) -> List[Violation]:
        """G matrix or oscillator frequency, optional linear term"""
        violations: List[Violation] = []
        reject = ScenarioValidator._reject
        dim = 2 * modes

        if not isinstance(hamiltonian, dict):
            reject(violations, 'hamiltonian', hamiltonian, "Must be an object")
            return violations
        if 'G' in hamiltonian:
            if not _is_matrix(hamiltonian['G'], dim):
                reject(violations, 'hamiltonian.G', hamiltonian['G'], f"Must be a {dim}x{dim} matrix")
        elif 'oscillator' in hamiltonian:
            if not _is_number(hamiltonian['oscillator']):
                reject(violations, 'hamiltonian.oscillator', hamiltonian['oscillator'], "Must be a number")
        else:
            reject(violations, 'hamiltonian', hamiltonian, "Needs 'G' or 'oscillator'")
        if 'linear' in hamiltonian and not _is_vector(hamiltonian['linear'], dim):
            reject(violations, 'hamiltonian.linear', hamiltonian['linear'], f"Must be a vector of length {dim}")
        return violations

    @staticmethod
    def validate_bell(bell: Any) -> List[Violation]:
        """Amplitudes, search spec and amplitude policy"""
        violations: List[Violation] = []
        reject = ScenarioValidator._reject

        if not isinstance(bell, dict):
            reject(violations, 'bell', bell, "Must be an object")
            return violations

        amplitudes = bell.get('amplitudes')
        if amplitudes is not None:
            if not (isinstance(amplitudes, list) and len(amplitudes) == 2
                    and all(_is_vector(a, 2) for a in amplitudes)):
                reject(violations, 'bell.amplitudes', amplitudes, "Must be [[re, im], [re, im]]")

        search = bell.get('search', {})
        if not isinstance(search, dict):
            reject(violations, 'bell.search', search, "Must be an object")
        else:
            unknown = sorted(set(search) - {'grid_points', 'bound', 'refine', 'xatol', 'max_iter'})
            if unknown:
                reject(violations, 'bell.search', unknown, "Unknown keys")
            if 'grid_points' in search and not (_is_int(search['grid_points']) and search['grid_points'] >= 1):
                reject(violations, 'bell.search.grid_points', search['grid_points'], "Must be a positive integer")
            if 'bound' in search and not (_is_number(search['bound']) and search['bound'] >= 0):
                reject(violations, 'bell.search.bound', search['bound'], "Must be a non-negative number")
            if 'xatol' in search and not (_is_number(search['xatol']) and search['xatol'] > 0):
                reject(violations, 'bell.search.xatol', search['xatol'], "Must be a positive number")
            if 'max_iter' in search and not (_is_int(search['max_iter']) and search['max_iter'] >= 1):
                reject(violations, 'bell.search.max_iter', search['max_iter'], "Must be a positive integer")
            if 'refine' in search and not isinstance(search['refine'], bool):
                reject(violations, 'bell.search.refine', search['refine'], "Must be true or false")

        policy = bell.get('policy', 'fixed')
        if policy not in ScenarioValidator.VALID_POLICIES:
            reject(violations, 'bell.policy', policy, f"Must be one of {ScenarioValidator.VALID_POLICIES}")
        return violations

    @staticmethod
    def validate_times(times: Any) -> List[Violation]:
        """A list of numbers or {start, stop, steps}"""
        violations: List[Violation] = []
        if isinstance(times, list):
            if not times or not all(_is_number(t) for t in times):
                ScenarioValidator._reject(violations, 'times', times, "Must be a non-empty list of numbers")
        elif isinstance(times, dict):
            if not (_is_number(times.get('start')) and _is_number(times.get('stop'))):
                ScenarioValidator._reject(violations, 'times', times, "Needs numeric 'start' and 'stop'")
            steps = times.get('steps')
            if not (_is_int(steps) and steps >= 1):
                ScenarioValidator._reject(violations, 'times.steps', steps, "Must be a positive integer")
        else:
            ScenarioValidator._reject(violations, 'times', times, "Must be a list or {start, stop, steps}")
        return violations

    @staticmethod
    def validate_scenario(data: Any) -> bool:
        """
        Validate a whole scenario document.

        Raises:
            ScenarioError: listing every violation found
        """
        if not isinstance(data, dict):
            phase_logger.log_validation_error('<root>', data, "Scenario must be a JSON object")
            raise ScenarioError([('<root>', "Scenario must be a JSON object")])

        violations = ScenarioValidator.validate_header(data)
        modes = data.get('modes')
        if _is_int(modes) and modes >= 1:
            partition = data.get('partition')
            violations += ScenarioValidator.validate_deformation(data, modes)
            violations += ScenarioValidator.validate_state(data.get('state'), modes, partition)
            if 'hamiltonian' in data:
                violations += ScenarioValidator.validate_hamiltonian(data['hamiltonian'], modes)
        if 'bell' in data:
            violations += ScenarioValidator.validate_bell(data['bell'])
        if 'times' in data:
            violations += ScenarioValidator.validate_times(data['times'])

        if violations:
            raise ScenarioError(violations)
        return True
