"""Command reports: JSON with a fixed field order, or aligned text.

Floats are written with 17 significant digits so every double survives a
round trip through the JSON text.
"""

import json
from dataclasses import dataclass, field
from typing import Any, Dict, List

import numpy as np

__all__ = [
    "Report",
    "REPORT_SCHEMA",
    "dumps",
    "matrix_to_json",
    "signature_to_json",
    "verdict_to_json",
    "canonical_to_json",
]

_HEAD = ("command", "inputs", "config", "warnings")

REPORT_SCHEMA = {
    "$schema": "http://json-schema.org/draft-07/schema#",
    "type": "object",
    "required": list(_HEAD) + ["status"],
    "properties": {
        "command": {"type": "string"},
        "inputs": {"type": "array", "items": {"type": "string"}},
        "config": {
            "type": "object",
            "required": ["tol_spec", "tol_rank", "tol_residual", "tol_cluster", "samples", "seed"],
        },
        "warnings": {"type": "array", "items": {"type": "string"}},
        "status": {"enum": ["ok", "equivalent", "not_equivalent", "pass", "fail", "error"]},
        "error": {
            "type": "object",
            "required": ["type", "message"],
            "properties": {"type": {"type": "string"}, "message": {"type": "string"}},
        },
        "signature": {"$ref": "#/definitions/signature"},
        "signatures": {"type": "array", "items": {"$ref": "#/definitions/signature"}},
        "verdict": {"$ref": "#/definitions/verdict"},
    },
    "definitions": {
        "matrix": {"type": "array", "items": {"type": "array", "items": {"type": "number"}}},
        "signature": {
            "type": "object",
            "required": ["n0", "n_plus", "n_minus", "k_obs", "k0", "k_plus", "k_minus"],
            "additionalProperties": {"type": "integer", "minimum": 0},
        },
        "verdict": {
            "type": "object",
            "required": ["relation", "equivalent", "reason", "confidence", "witness"],
            "properties": {
                "relation": {"enum": ["linear", "topological"]},
                "equivalent": {"type": "boolean"},
                "reason": {"type": "object", "required": ["code", "message"]},
                "confidence": {
                    "type": "object",
                    "properties": {"kind": {"enum": ["deterministic", "randomized"]}},
                },
                "witness": {"anyOf": [{"type": "null"}, {"$ref": "#/definitions/matrix"}]},
                "parts": {"type": "object", "additionalProperties": {"$ref": "#/definitions/verdict"}},
            },
        },
    },
}


def _scalar(x) -> str:
    if x is None:
        return "null"
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if not np.isfinite(x):
            raise ValueError(f"cannot serialize non-finite float {x!r}")
        if x == int(x) and abs(x) < 2**53:
            return str(int(x))
        return format(x, ".17g")
    if isinstance(x, str):
        return json.dumps(x, ensure_ascii=False)
    raise TypeError(f"cannot serialize {type(x).__name__}")


def _is_flat(xs):
    return all(not isinstance(x, (list, dict)) for x in xs)


def _dump(obj, level, indent):
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {_dump(v, level + 1, indent)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if _is_flat(obj):
            return "[" + ", ".join(_scalar(x) for x in obj) + "]"
        items = [pad + _dump(v, level + 1, indent) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    return _scalar(obj)


def dumps(obj, indent: int = 2) -> str:
    """Deterministic JSON text; rows of a matrix stay on one line."""
    return _dump(obj, 0, indent) + "\n"


@dataclass
class Report:
    command: str
    inputs: List[str]
    config: Dict[str, Any]
    warnings: List[str] = field(default_factory=list)
    payload: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self):
        out = {"command": self.command, "inputs": list(self.inputs),
               "config": dict(self.config), "warnings": list(self.warnings)}
        for key, value in self.payload.items():
            if key in out:
                raise KeyError(f"payload key {key!r} clashes with a header field")
            out[key] = value
        return out

    @classmethod
    def from_dict(cls, data):
        payload = {k: v for k, v in data.items() if k not in _HEAD}
        return cls(data["command"], list(data["inputs"]), dict(data["config"]),
                   list(data["warnings"]), payload)

    def to_json(self) -> str:
        return dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "Report":
        return cls.from_dict(json.loads(text))

    def to_text(self) -> str:
        lines = []
        width = 12

        def emit(key, value, depth=0):
            prefix = "  " * depth
            if isinstance(value, dict):
                lines.append(f"{prefix}{key}:")
                for k, v in value.items():
                    emit(k, v, depth + 1)
            elif isinstance(value, list) and value and isinstance(value[0], dict):
                for i, item in enumerate(value):
                    emit(f"{key}[{i}]", item, depth)
            elif isinstance(value, list) and value and isinstance(value[0], list):
                lines.append(f"{prefix}{key}:")
                arr = np.array(value, dtype=float)
                for row in np.array2string(arr, precision=6, suppress_small=True).splitlines():
                    lines.append(f"{prefix}  {row}")
            elif isinstance(value, list):
                lines.append(f"{prefix}{key + ':':<{width}} {', '.join(map(str, value)) or '-'}")
            else:
                lines.append(f"{prefix}{key + ':':<{width}} {value}")

        for key, value in self.to_dict().items():
            emit(key, value)
        return "\n".join(lines) + "\n"


def matrix_to_json(M):
    if M is None:
        return None
    M = np.asarray(M, dtype=float)
    if M.ndim == 1:
        M = M.reshape(1, -1)
    return [[float(x) for x in row] for row in M]


def signature_to_json(sig):
    return sig.to_dict()


def verdict_to_json(v):
    out = {
        "relation": v.relation,
        "equivalent": bool(v.equivalent),
        "reason": v.reason.to_dict(),
        "confidence": v.confidence.to_dict(),
        "witness": matrix_to_json(v.witness) if v.witness is not None and v.witness.size else
        ([] if v.witness is not None else None),
    }
    if v.signatures is not None:
        out["signatures"] = [signature_to_json(s) for s in v.signatures]
    if v.parts:
        out["parts"] = {k: verdict_to_json(p) for k, p in v.parts.items()}
    return out


def canonical_to_json(cf):
    out = {
        "signature": signature_to_json(cf.signature),
        "center_is_canonical": bool(cf.center_is_canonical),
        "Nhat": matrix_to_json(cf.Nhat),
        "Khat": matrix_to_json(cf.Khat),
        "Bhat": matrix_to_json(cf.Bhat),
        "Dhat": matrix_to_json(cf.Dhat),
        "Ehat": matrix_to_json(cf.Ehat),
    }
    if cf.merged:
        out["Lhat"] = matrix_to_json(cf.Lhat)
        out["That"] = matrix_to_json(cf.That)
    out["A"] = matrix_to_json(cf.assembled_A)
    out["C"] = matrix_to_json(cf.assembled_C)
    return out
