"""JSON-lines result records and their schema."""
from __future__ import annotations

import csv
import datetime as _dt
import io
import json
import math
from dataclasses import dataclass, field
from importlib import metadata
from typing import Any

import jsonschema
import numpy as np

SCHEMA_VERSION = "1.0"
BOUND_KINDS = ["certified_lower", "certified_upper", "two_sided", "heuristic", "monte_carlo", "exact", "check"]

RECORD_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "ResultRecord",
    "type": "object",
    "required": [
        "schema_version", "command", "params", "value", "error_bound", "bound_kind",
        "seed", "runtime_ms", "artifact_version", "timestamp",
    ],
    "additionalProperties": False,
    "properties": {
        "schema_version": {"const": SCHEMA_VERSION},
        "command": {"type": "string", "minLength": 1},
        "params": {"type": "object"},
        "value": {"type": "number"},
        "error_bound": {"type": "number", "minimum": 0},
        "bound_kind": {"enum": BOUND_KINDS},
        "seed": {"type": ["integer", "null"]},
        "runtime_ms": {"type": "integer", "minimum": 0},
        "artifact_version": {"type": "string"},
        "timestamp": {"type": "string", "format": "date-time"},
        "passed": {"type": ["boolean", "null"]},
        "details": {"type": "object"},
    },
}

_VALIDATOR = jsonschema.Draft202012Validator(RECORD_SCHEMA, format_checker=jsonschema.FormatChecker())


def artifact_version() -> str:
    try:
        return metadata.version("artifact")
    except metadata.PackageNotFoundError:
        return "0+unknown"


def to_jsonable(obj: Any) -> Any:
    """Recursively convert numpy scalars/arrays, tuples and enums to JSON types."""
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, np.generic):
        return to_jsonable(obj.item())
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    if isinstance(obj, float) and not math.isfinite(obj):
        return str(obj)
    if hasattr(obj, "value") and hasattr(obj, "name") and not isinstance(obj, (int, float, str)):
        return obj.value
    if obj is None or isinstance(obj, (bool, int, float, str)):
        return obj
    return str(obj)


@dataclass
class ResultRecord:
    command: str
    params: dict
    value: float
    error_bound: float
    bound_kind: str
    seed: int | None = None
    runtime_ms: int = 0
    artifact_version: str = field(default_factory=artifact_version)
    timestamp: str = field(default_factory=lambda: _dt.datetime.now(_dt.timezone.utc).isoformat())
    passed: bool | None = None
    details: dict = field(default_factory=dict)
    schema_version: str = SCHEMA_VERSION

    def to_dict(self) -> dict:
        out = {
            "schema_version": self.schema_version,
            "command": self.command,
            "params": to_jsonable(self.params),
            "value": float(self.value),
            "error_bound": float(self.error_bound),
            "bound_kind": str(getattr(self.bound_kind, "value", self.bound_kind)),
            "seed": None if self.seed is None else int(self.seed),
            "runtime_ms": int(self.runtime_ms),
            "artifact_version": self.artifact_version,
            "timestamp": self.timestamp,
            "passed": self.passed,
            "details": to_jsonable(self.details),
        }
        return out

    def to_json(self) -> str:
        data = self.to_dict()
        validate(data)
        return json.dumps(data, sort_keys=True, allow_nan=False)

    @classmethod
    def from_dict(cls, data: dict) -> "ResultRecord":
        validate(data)
        return cls(
            command=data["command"],
            params=data["params"],
            value=data["value"],
            error_bound=data["error_bound"],
            bound_kind=data["bound_kind"],
            seed=data["seed"],
            runtime_ms=data["runtime_ms"],
            artifact_version=data["artifact_version"],
            timestamp=data["timestamp"],
            passed=data.get("passed"),
            details=data.get("details", {}),
            schema_version=data["schema_version"],
        )

    @classmethod
    def from_json(cls, line: str) -> "ResultRecord":
        return cls.from_dict(json.loads(line))


def validate(data: dict) -> None:
    _VALIDATOR.validate(data)


CSV_FIELDS = ["command", "value", "error_bound", "bound_kind", "passed", "seed", "runtime_ms", "params"]


def csv_rows(records: list[ResultRecord]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=CSV_FIELDS)
    writer.writeheader()
    for r in records:
        d = r.to_dict()
        row = {k: d[k] for k in CSV_FIELDS if k != "params"}
        row["params"] = json.dumps(d["params"], sort_keys=True)
        row["value"] = repr(d["value"])
        row["error_bound"] = repr(d["error_bound"])
        writer.writerow(row)
    return buf.getvalue()
