"""Report assembly, canonical serialization and schema validation."""
from __future__ import annotations

import csv
import json
import math
from importlib import resources

from .verdict import jsonable

SCHEMA_VERSION = "1"
SCHEMA_FILE = f"report-{SCHEMA_VERSION}.schema.json"
CSV_COLUMNS = ("sample_t_re", "sample_t_im", "image_re", "image_im", "generator_id")


def tool_version() -> str:
    from . import __version__
    return __version__


def new_report(command: str, config=None) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "tool": {"name": "cuspfol", "version": tool_version()},
        "command": command,
        "status": "ok",
        "config": None if config is None else config.to_json(),
    }


def _finite(value):
    # JSON has no inf/nan; keep them readable instead of emitting invalid JSON
    if isinstance(value, float) and not math.isfinite(value):
        return str(value)
    if isinstance(value, dict):
        return {k: _finite(v) for k, v in value.items()}
    if isinstance(value, list):
        return [_finite(v) for v in value]
    return value


def canonical(report: dict) -> dict:
    return _finite(jsonable(report))


def dumps(report: dict) -> str:
    """Deterministic JSON: sorted keys, fixed separators, trailing newline."""
    return json.dumps(canonical(report), sort_keys=True, indent=2, ensure_ascii=True) + "\n"


def load_schema() -> dict:
    return json.loads((resources.files("cuspfol") / "schema" / SCHEMA_FILE).read_text())


def validate(report: dict) -> None:
    """Raise ``jsonschema.ValidationError`` when the report does not match the schema."""
    import jsonschema
    jsonschema.validate(canonical(report), load_schema())


def orbit_samples(gens, radius: float = 0.05, count: int = 8) -> list:
    """Rows ``(t, h(t), generator id)`` for ``count`` points on ``|t| = radius``."""
    rows = []
    for g in gens:
        for j in range(count):
            t = radius * complex(math.cos(2 * math.pi * j / count), math.sin(2 * math.pi * j / count))
            rows.append((t, g(t), g.label))
    return rows


def write_csv(path: str, rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(CSV_COLUMNS)
        for t, img, gid in rows:
            w.writerow([repr(t.real), repr(t.imag), repr(img.real), repr(img.imag), gid])
