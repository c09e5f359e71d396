"""
Deterministic CSV tables and console summaries
"""
import sys
from typing import List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from colorama import Fore, Style
from tabulate import tabulate

from src.config import Config
from src.scenario import Scenario


def metadata_line(command: str, scenario: Scenario) -> str:
    """Run metadata for the '#' header; no timestamps so re-runs stay byte-identical"""
    return f"# ncphase {command} scenario={scenario.name} sha256={scenario.sha256}"


def render_csv(frame: pd.DataFrame, header: str) -> str:
    body = frame.to_csv(index=False, float_format=Config.FLOAT_FORMAT, lineterminator="\n")
    return header + "\n" + body


def write_table(frame: pd.DataFrame, header: str, out: Optional[str] = None) -> str:
    """Write the table to ``out``, or to stdout when no path is given"""
    text = render_csv(frame, header)
    if out:
        with open(out, "w", encoding="utf-8", newline="") as handle:
            handle.write(text)
    else:
        sys.stdout.write(text)
    return text


def read_table(path: str) -> Tuple[str, pd.DataFrame]:
    """Header line and table of a previously emitted file"""
    with open(path, "r", encoding="utf-8") as handle:
        header = handle.readline().rstrip("\n")
    return header, pd.read_csv(path, comment="#")


def compare_tables(stored: pd.DataFrame, recomputed: pd.DataFrame) -> List[str]:
    """
    Differences between a stored table and its recomputation.

    Numeric columns agree within Config.DERIVED_TOL (relative and absolute), booleans and
    strings must be equal.
    """
    if list(stored.columns) != list(recomputed.columns):
        return [f"columns differ: {list(stored.columns)} vs {list(recomputed.columns)}"]
    if len(stored) != len(recomputed):
        return [f"row count differs: {len(stored)} vs {len(recomputed)}"]

    mismatches = []
    for column in recomputed.columns:
        old, new = stored[column], recomputed[column]
        if pd.api.types.is_bool_dtype(new) or pd.api.types.is_bool_dtype(old):
            bad = old.astype(str).to_numpy() != new.astype(str).to_numpy()
        elif pd.api.types.is_numeric_dtype(new) and pd.api.types.is_numeric_dtype(old):
            bad = ~np.isclose(old.to_numpy(dtype=float), new.to_numpy(dtype=float),
                              rtol=Config.DERIVED_TOL, atol=Config.DERIVED_TOL, equal_nan=True)
        else:
            bad = old.astype(str).to_numpy() != new.astype(str).to_numpy()
        for row in np.flatnonzero(bad):
            mismatches.append(f"row {row}, {column}: stored {old.iloc[row]!r}, recomputed {new.iloc[row]!r}")
    return mismatches


def paint(word: str, good: bool) -> str:
    """Color a verdict word on a terminal; plain text otherwise"""
    if not sys.stdout.isatty():
        return word
    color = Fore.GREEN if good else Fore.RED
    return f"{color}{word}{Style.RESET_ALL}"


def print_summary(title: str, rows: Sequence[Tuple[str, object]]):
    """Display a key/value summary block"""
    print("\n" + "=" * 60)
    print(title)
    print("=" * 60)
    print(tabulate([[key, value] for key, value in rows], tablefmt="simple", floatfmt=".12g"))
    print("=" * 60)


def print_table(title: str, frame: pd.DataFrame, max_rows: int = 20):
    """Display the first rows of a result table"""
    print(f"\n{title}")
    print("-" * 60)
    print(tabulate(frame.head(max_rows), headers="keys", tablefmt="simple", showindex=False, floatfmt=".10g"))
    if len(frame) > max_rows:
        print(f"... {len(frame) - max_rows} more rows")
