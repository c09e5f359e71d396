"""
Command-line front end: scenario in, deterministic CSV out.

Exit codes: 0 success or positive verdict, 3 negative verdict or --verify mismatch,
1 unreadable or malformed input, 2 any other semantic failure.
"""
import argparse
import sys
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from src.advanced.bell import bell_chsh, bell_optimize, compare_bell_trajectories, trajectory_frame
from src.config import Config
from src.criteria import kinematic_entanglement_scan, ppt_separability_check, rsup_check
from src.errors import NCPhaseError, PreconditionFailed, ScenarioError, ScenarioParseError
from src.gaussian_states import wigner_function
from src.logger import phase_logger
from src.reporting import (
    compare_tables, metadata_line, paint, print_summary, print_table, read_table, write_table,
)
from src.scenario import Scenario, load_scenario

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_SEMANTIC = 2
EXIT_NEGATIVE = 3


@dataclass
class CommandResult:
    frame: pd.DataFrame
    status: int
    summary: List[Tuple[str, object]]


def parse_range(text: Optional[str], flag: str, default: float) -> List[float]:
    """'a:b:n' -> n evenly spaced values from a to b; absent flag -> [default]"""
    if text is None:
        return [default]
    parts = text.split(":")
    try:
        start, stop, steps = float(parts[0]), float(parts[1]), int(parts[2])
        if len(parts) != 3 or steps < 0:
            raise ValueError
    except (ValueError, IndexError):
        raise ScenarioError([(flag, f"Must be start:stop:steps with steps >= 0, got {text!r}")])
    return np.linspace(start, stop, steps).tolist()


def cmd_check_quantum(scenario: Scenario, args: argparse.Namespace) -> CommandResult:
    state = scenario.state()
    form = scenario.form_for(state)
    verdict = rsup_check(state, form)
    frame = pd.DataFrame([{
        "picture": state.picture.value,
        "form": form.role.value,
        "passes": verdict.passes,
        "min_eigenvalue": verdict.min_eigenvalue,
        "label": verdict.label,
    }])
    summary = [
        ("Picture", state.picture.value),
        ("Form", form.role.value),
        ("Min eigenvalue", verdict.min_eigenvalue),
        ("Verdict", paint(verdict.label, verdict.passes)),
    ]
    return CommandResult(frame, EXIT_OK if verdict.passes else EXIT_NEGATIVE, summary)


def cmd_check_separable(scenario: Scenario, args: argparse.Namespace) -> CommandResult:
    state = scenario.state()
    form = scenario.form_for(state, require_bipartite=True)
    verdict = ppt_separability_check(state, form, scenario.partition)
    frame = pd.DataFrame([{
        "picture": state.picture.value,
        "form": form.role.value,
        "passes": verdict.passes,
        "min_eigenvalue": verdict.min_eigenvalue,
        "label": verdict.label,
    }])
    summary = [
        ("Picture", state.picture.value),
        ("Partition", f"{scenario.partition.n_A}+{scenario.partition.n_B}"),
        ("Min eigenvalue", verdict.min_eigenvalue),
        ("Verdict", paint(verdict.label, verdict.passes)),
    ]
    return CommandResult(frame, EXIT_OK if verdict.passes else EXIT_NEGATIVE, summary)


def cmd_kinematic_scan(scenario: Scenario, args: argparse.Namespace) -> CommandResult:
    theta_default, eta_default = scenario.planar_values()
    thetas = parse_range(args.theta_range, "--theta-range", theta_default)
    etas = parse_range(args.eta_range, "--eta-range", eta_default)
    if not thetas or not etas:
        raise PreconditionFailed("kinematic scan needs a non-empty theta and eta range")

    records = kinematic_entanglement_scan(scenario.base_state(), thetas, etas, scenario.partition)
    frame = pd.DataFrame(
        [[r.theta, r.eta, r.margin, r.entangled] for r in records],
        columns=["theta", "eta", "margin", "entangled"],
    )
    flipped = sum(r.entangled for r in records)
    summary = [
        ("Grid points", len(records)),
        ("Entangled", paint(str(flipped), flipped == 0)),
        ("Physically admissible", sum(r.nc_admissible for r in records)),
        ("Smallest margin", float(frame["margin"].min())),
    ]
    return CommandResult(frame, EXIT_OK, summary)


def cmd_bell(scenario: Scenario, args: argparse.Namespace) -> CommandResult:
    state = scenario.state()
    amplitudes = scenario.bell_amplitudes()
    if amplitudes is not None:
        evaluation = bell_chsh(wigner_function(state), *amplitudes)
    else:
        evaluation = bell_optimize(state, scenario.form_for(state), scenario.bell_search())
    w00, w10, w01, w11 = evaluation.w_samples
    frame = pd.DataFrame([{
        "alpha1_re": evaluation.alpha1.real,
        "alpha1_im": evaluation.alpha1.imag,
        "alpha2_re": evaluation.alpha2.real,
        "alpha2_im": evaluation.alpha2.imag,
        "w00": w00,
        "w10": w10,
        "w01": w01,
        "w11": w11,
        "bell_value": evaluation.bell_value,
        "nonlocal": evaluation.nonlocal_,
        "budget_exhausted": evaluation.budget_exhausted,
    }])
    summary = [
        ("alpha1", evaluation.alpha1),
        ("alpha2", evaluation.alpha2),
        ("B", evaluation.bell_value),
        ("Verdict", paint("nonlocal" if evaluation.nonlocal_ else "local", not evaluation.nonlocal_)),
    ]
    return CommandResult(frame, EXIT_OK, summary)


def cmd_evolve_compare(scenario: Scenario, args: argparse.Namespace) -> CommandResult:
    hamiltonian = scenario.hamiltonian()
    times = scenario.times()
    rows = compare_bell_trajectories(
        scenario.base_state(), hamiltonian, scenario.omega(), times,
        amplitude_policy=scenario.bell_policy(),
        amplitudes=scenario.bell_amplitudes(),
        search=scenario.bell_search(),
    )
    frame = trajectory_frame(rows)
    summary = [
        ("Time points", len(frame)),
        ("Max |delta|", float(frame["delta"].abs().max())),
        ("Nonlocal (C)", int(frame["nonlocal_c"].sum())),
        ("Nonlocal (NC)", int(frame["nonlocal_nc"].sum())),
    ]
    return CommandResult(frame, EXIT_OK, summary)


COMMANDS: Dict[str, Callable[[Scenario, argparse.Namespace], CommandResult]] = {
    'check-quantum': cmd_check_quantum,
    'check-separable': cmd_check_separable,
    'kinematic-scan': cmd_kinematic_scan,
    'bell': cmd_bell,
    'evolve-compare': cmd_evolve_compare,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog='ncphase',
        description='Gaussian states on noncommutative phase space - quantumness, separability and Bell tests',
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Available Commands:
  check-quantum    Robertson-Schroedinger test of the scenario state
  check-separable  PPT separability test of a bipartite scenario
  kinematic-scan   PPT margin of a fixed covariance over a (theta, eta) grid
  bell             Bell/CHSH value at given or optimized amplitudes
  evolve-compare   Bell trajectories under commutative and deformed flows

Examples:
  python main.py check-quantum --scenario vacuum.json
  python main.py check-separable --scenario tmsv.json --out tmsv.csv
  python main.py kinematic-scan --scenario thermal.json --theta-range 0:2:11 --eta-range 0:0.5:3
  python main.py bell --scenario tmsv.json
  python main.py evolve-compare --scenario tmsv.json --out trajectory.csv --verify
        """
    )
    subparsers = parser.add_subparsers(dest='command', help='Commands')

    for name, text in [
        ('check-quantum', 'Robertson-Schroedinger test'),
        ('check-separable', 'PPT separability test'),
        ('kinematic-scan', 'Kinematic entanglement scan'),
        ('bell', 'Bell/CHSH evaluation'),
        ('evolve-compare', 'Commutative vs noncommutative Bell trajectories'),
    ]:
        sub = subparsers.add_parser(name, help=text)
        sub.add_argument('--scenario', required=True, help='Scenario JSON file')
        sub.add_argument('--out', help='CSV output path (stdout when omitted)')
        sub.add_argument('--verify', action='store_true', help='Recompute and compare against --out')
        if name == 'kinematic-scan':
            sub.add_argument('--theta-range', help='start:stop:steps')
            sub.add_argument('--eta-range', help='start:stop:steps')
    return parser


def verify_output(args: argparse.Namespace, header: str, result: CommandResult) -> int:
    """Compare a stored table with the recomputation; 0 on agreement, 3 on mismatch"""
    if not args.out:
        raise PreconditionFailed("--verify needs --out pointing at a previously emitted file")
    stored_header, stored = read_table(args.out)
    mismatches = compare_tables(stored, result.frame)
    if stored_header != header:
        mismatches.insert(0, f"metadata line differs: {stored_header!r}")

    if mismatches:
        phase_logger.warning(f"Verification of {args.out} failed with {len(mismatches)} mismatches")
        for line in mismatches:
            print(f"  ❌ {line}")
        return EXIT_NEGATIVE
    print(f"✅ {args.out}: {len(stored)} rows verified")
    return EXIT_OK


def main(argv: Optional[Sequence[str]] = None) -> int:
    """CLI entry point; returns the process exit code"""
    parser = build_parser()
    args = parser.parse_args(argv)

    if not args.command:
        parser.print_help()
        return EXIT_OK

    try:
        Config.validate_config()
        scenario = load_scenario(args.scenario)
        header = metadata_line(args.command, scenario)
        result = COMMANDS[args.command](scenario, args)

        if args.verify:
            return verify_output(args, header, result)

        write_table(result.frame, header, args.out)
        if args.out:
            print_summary(f"ncphase {args.command}: {scenario.name}", result.summary)
            if len(result.frame) > 1:
                print_table("Rows", result.frame)
        return result.status

    except (ScenarioParseError, OSError, pd.errors.ParserError, pd.errors.EmptyDataError) as e:
        phase_logger.log_error(e, {"command": args.command, "scenario": args.scenario})
        print(f"❌ Error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except (NCPhaseError, ValueError) as e:
        phase_logger.log_error(e, {"command": args.command, "scenario": args.scenario})
        print(f"❌ Error: {e}", file=sys.stderr)
        return EXIT_SEMANTIC
