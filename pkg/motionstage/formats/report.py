"""Key=value reports.

One ``key=value`` line per entry, keys sorted. Floats carry 9 significant
digits, integers are written as-is, booleans as ``true``/``false`` and
lists are comma-joined. ``None`` values are left out.
"""

from pathlib import Path
from typing import Dict, Mapping

import numpy as np

from ..errors import FormatError

FLOAT_FORMAT = ".9g"


def format_value(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format(float(value), FLOAT_FORMAT)
    if isinstance(value, (list, tuple, np.ndarray)):
        return ",".join(format_value(v) for v in value)
    return str(value)


def dumps_report(record: Mapping[str, object]) -> str:
    return "".join(f"{key}={format_value(record[key])}\n" for key in sorted(record) if record[key] is not None)


def write_report(path, record: Mapping[str, object]) -> None:
    Path(path).write_text(dumps_report(record), encoding="utf-8")


def read_report(path) -> Dict[str, str]:
    """Raw string values by key."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise FormatError(f"cannot read report ({exc})", str(path)) from exc
    record: Dict[str, str] = {}
    for number, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise FormatError("expected key=value", str(path), number)
        record[key.strip()] = value.strip()
    return record
