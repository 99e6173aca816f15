"""
Atomic CSV/JSON emission with fixed 12-significant-digit numbers.
"""

import csv
import json
import logging
import os
import tempfile
from pathlib import Path
from typing import Any, Iterable, Sequence

import numpy as np

logger = logging.getLogger(__name__)


def fmt(x: Any) -> str:
    """Scientific notation with 12 significant digits; text passes through."""
    if isinstance(x, (float, int, np.floating, np.integer)) and not isinstance(x, bool):
        return f"{float(x):.11e}"
    if x is None:
        return ""
    return str(x)


def csv_text(
    columns: Sequence[str],
    rows: Iterable[Sequence[Any]],
    comments: Sequence[str] = ()
) -> str:
    """``#``-prefixed comment lines, a header row, then formatted rows."""
    lines = [f"# {c}" for c in comments]
    lines.append(",".join(columns))
    for row in rows:
        lines.append(",".join(fmt(v) for v in row))
    return "\n".join(lines) + "\n"


def _clean(value: Any) -> Any:
    if isinstance(value, dict):
        return {str(k): _clean(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_clean(v) for v in value]
    if isinstance(value, (np.floating, float)):
        value = float(value)
        return value if np.isfinite(value) else None
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, (complex, np.complexfloating)):
        value = complex(value)
        return {"re": value.real, "im": value.imag}
    return value


def json_text(payload: dict) -> str:
    return json.dumps(_clean(payload), indent=2, sort_keys=True) + "\n"


def write_atomic(path: Path, text: str) -> Path:
    """Write through a temporary file in the same directory, then rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as f:
            f.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    logger.info(f"wrote {path}")
    return path


def read_curve_csv(path: Path) -> list[tuple[float, float]]:
    """(b, best_fidelity) pairs from a curve CSV written by ``optimize``."""
    with open(path, "r", encoding="utf-8") as f:
        reader = csv.DictReader(line for line in f if not line.startswith("#"))
        return [(float(row["b"]), float(row["best_fidelity"])) for row in reader]
