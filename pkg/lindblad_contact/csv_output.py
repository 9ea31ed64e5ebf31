"""
CSV emission with a '#'-prefixed metadata block.

The metadata lines are TOML once the leading '# ' is removed, so any emitted
file can be handed back to the CLI with --config.
"""

import csv
import math
import os
from typing import Dict, Iterable, List, Optional, Sequence

import numpy as np


def format_number(value) -> str:
    """Shortest text that parses back to the same value; empty for None."""
    if value is None:
        return ''
    if isinstance(value, (bool, np.bool_)):
        return 'true' if value else 'false'
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def toml_value(value) -> str:
    if isinstance(value, str):
        escaped = value.replace('\\', '\\\\').replace('"', '\\"')
        return f'"{escaped}"'
    if isinstance(value, (list, tuple)):
        return '[' + ', '.join(toml_value(item) for item in value) + ']'
    if isinstance(value, (float, np.floating)) and math.isnan(value):
        return 'nan'
    return format_number(value)


def metadata_lines(metadata: Dict, banner: Optional[str] = None) -> List[str]:
    """'# key = value' lines; banner lines become TOML comments ('# # ...')."""
    lines = []
    if banner:
        lines.extend(f"# # {line}" for line in banner.splitlines())
    for key, value in metadata.items():
        if value is None:
            continue
        lines.append(f"# {key} = {toml_value(value)}")
    return lines


def write_csv(path: str, header: Sequence[str], rows: Iterable[Sequence],
              metadata: Dict, banner: Optional[str] = None) -> str:
    """Write metadata block, header line and rows; returns the path."""
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    with open(path, 'w', newline='', encoding='utf-8') as f:
        for line in metadata_lines(metadata, banner):
            f.write(line + '\n')
        writer = csv.writer(f, lineterminator='\n')
        writer.writerow(header)
        for row in rows:
            writer.writerow([format_number(value) for value in row])
    return path


def read_metadata_text(path: str) -> str:
    """The metadata block of an emitted CSV as TOML text."""
    if not os.path.exists(path):
        raise FileNotFoundError(f"CSV file not found: {path}")
    lines = []
    with open(path, 'r', encoding='utf-8') as f:
        for line in f:
            if line.startswith('#'):
                lines.append(line[1:].strip())
    return '\n'.join(lines) + '\n'


def read_csv(path: str):
    """Header and data rows (as strings) of an emitted CSV, metadata skipped."""
    if not os.path.exists(path):
        raise FileNotFoundError(f"CSV file not found: {path}")
    with open(path, 'r', newline='', encoding='utf-8') as f:
        data = [line for line in f if not line.startswith('#')]
    reader = csv.reader(data)
    rows = list(reader)
    if not rows:
        return [], []
    return rows[0], rows[1:]
