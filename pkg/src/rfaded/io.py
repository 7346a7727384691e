"""CSV and JSON sidecar writers shared by the CLI and the scripts.

Floats are written with 17 significant digits so that every value
round-trips exactly through text.  A sidecar sits next to each CSV under
the same stem with a ``.json`` suffix.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from rfaded import __version__

__all__ = ["fmt", "write_csv", "write_sidecar", "read_sidecar", "sidecar_path"]


def fmt(v) -> str:
    """Round-trip text for one CSV cell; ``None`` becomes an empty cell."""
    if v is None:
        return ""
    if isinstance(v, (bool, str)):
        return str(v)
    if isinstance(v, int):
        return str(v)
    return "%.17g" % float(v)


def write_csv(path, header: Sequence[str], rows: Iterable[Sequence]) -> int:
    """Write ``rows`` under ``header``; returns the number of data rows."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    n = 0
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(v) for v in row])
            n += 1
    return n


def sidecar_path(path) -> Path:
    return Path(path).with_suffix(".json")


def write_sidecar(path, config: Mapping) -> Path:
    """Dump the flat ``config`` plus the package version beside ``path``."""
    out = sidecar_path(path)
    payload = dict(config)
    payload["version"] = __version__
    out.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    return out


def read_sidecar(path) -> dict:
    data = json.loads(Path(path).read_text())
    if not isinstance(data, dict):
        raise ValueError(f"{path}: sidecar must hold a JSON object")
    return data
