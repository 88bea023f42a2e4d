"""JSON documents for systems, parameter sets and reports.

Wire conventions:

* complex numbers are ``[re, im]`` pairs;
* matrices are row-major nested lists of complex pairs;
* doubled matrices are ``{"r1": ..., "r2": ...}`` (upper blocks only).  On
  input a full ``2n x 2m`` nested list is also accepted and must pass the
  doubled-structure check;
* reals are written with 17 significant digits and object keys are sorted,
  so saving the same document twice yields identical bytes.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Union

import numpy as np

from .cavity import CavitySqueezerParams
from .doubled import DoubledMatrix, contract
from .errors import DimensionMismatch, InvalidParameter, IoError, MalformedInput, StructureViolation
from .perturbation import _BLOCKS as PERTURBED_BLOCKS
from .perturbation import PerturbedSystem
from .special_class import BogoliubovComponent, SpecialClassParams, validate_params
from .system import PhysicalParams, QuantumLinearSystem

SCHEMA_VERSION = 1
LOAD_TOL = 1e-10
KINDS = ("system", "physical_params", "perturbed", "special_class", "bogoliubov", "cavity_squeezer")
REPORT_KIND = "report"
VERDICTS = ("pass", "fail", "inconclusive")

Payload = Union[
    QuantumLinearSystem, PhysicalParams, PerturbedSystem, SpecialClassParams, BogoliubovComponent, CavitySqueezerParams
]


@dataclass(frozen=True)
class SystemDocument:
    kind: str
    payload: Payload
    meta: dict[str, str] = field(default_factory=dict)


@dataclass(frozen=True)
class ReportDocument:
    command: str
    inputs: str
    residuals: dict[str, float]
    verdict: str
    samples_used: list[complex] = field(default_factory=list)
    tolerance: float | None = None
    details: dict[str, Any] = field(default_factory=dict)


Document = Union[SystemDocument, ReportDocument]


# ---------------------------------------------------------------- rendering


def _render_float(x: float) -> str:
    if math.isnan(x):
        return "NaN"
    if math.isinf(x):
        return "Infinity" if x > 0 else "-Infinity"
    text = format(x, ".17g")
    if not any(c in text for c in ".en"):
        text += ".0"
    return text


def _is_flat(v: Any) -> bool:
    return not isinstance(v, (list, tuple, dict))


def _render(obj: Any, indent: int) -> str:
    pad = "  " * (indent + 1)
    end = "  " * indent
    if obj is None:
        return "null"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _render_float(float(obj))
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k), ensure_ascii=False)}: {_render(obj[k], indent + 1)}" for k in sorted(obj)]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        # complex pairs and matrix rows (lists of pairs) stay on one line
        if all(_is_flat(v) or (isinstance(v, (list, tuple)) and all(_is_flat(w) for w in v)) for v in obj):
            return "[" + ", ".join(_render(v, indent + 1) for v in obj) + "]"
        return "[\n" + ",\n".join(pad + _render(v, indent + 1) for v in obj) + "\n" + end + "]"
    raise TypeError(f"cannot render {type(obj).__name__}")


def render_json(obj: Any) -> str:
    return _render(obj, 0) + "\n"


# ----------------------------------------------------------------- encoders


def encode_complex(z: complex) -> list[float]:
    z = complex(z)
    return [z.real, z.imag]


def encode_matrix(a: np.ndarray) -> list[list[list[float]]]:
    return [[encode_complex(v) for v in row] for row in np.asarray(a)]


def encode_doubled(d: DoubledMatrix) -> dict[str, Any]:
    return {"r1": encode_matrix(d.r1), "r2": encode_matrix(d.r2)}


def encode_payload(kind: str, p: Payload) -> dict[str, Any]:
    if kind == "system":
        return {"n_modes": p.n_modes, "m_fields": p.m_fields, **{k: encode_doubled(getattr(p, k)) for k in "FGHK"}}
    if kind == "physical_params":
        return {
            "n_modes": p.n_modes,
            "m_fields": p.m_fields,
            "Theta": encode_matrix(p.Theta),
            "M": encode_doubled(p.M),
            "N": encode_doubled(p.N),
            "S": encode_matrix(p.S),
        }
    if kind == "perturbed":
        return {
            "n_slow": p.n_slow,
            "n_fast": p.n_fast,
            "m_fields": p.m_fields,
            **{k: encode_doubled(v) for k, v in p.blocks().items()},
        }
    if kind == "special_class":
        out = {"n_slow": p.n_slow, "n_fast": p.n_fast, "m_fields": p.m_fields, "S": encode_matrix(p.S)}
        out.update({k: encode_doubled(getattr(p, k)) for k in ("Ma", "Mb", "Mc", "Md", "Na", "Nb")})
        return out
    if kind == "bogoliubov":
        return {"m_fields": p.m_fields, "B": encode_doubled(p.B)}
    if kind == "cavity_squeezer":
        return {"k1": p.k1, "k2": p.k2, "gamma": p.gamma, "chi": encode_complex(p.chi)}
    raise InvalidParameter(f"unknown document kind {kind!r}")


def document_to_json(doc: Document) -> dict[str, Any]:
    if isinstance(doc, SystemDocument):
        return {
            "qsr_version": SCHEMA_VERSION,
            "kind": doc.kind,
            "payload": encode_payload(doc.kind, doc.payload),
            "meta": dict(doc.meta),
        }
    return {
        "qsr_version": SCHEMA_VERSION,
        "kind": REPORT_KIND,
        "command": doc.command,
        "inputs": doc.inputs,
        "residuals": {k: float(v) for k, v in doc.residuals.items()},
        "verdict": doc.verdict,
        "samples_used": [encode_complex(s) for s in doc.samples_used],
        "tolerance": doc.tolerance,
        "details": doc.details,
    }


def dumps_document(doc: Document) -> str:
    return render_json(document_to_json(doc))


def digest(text: str | bytes) -> str:
    data = text.encode("utf-8") if isinstance(text, str) else text
    return "sha256:" + hashlib.sha256(data).hexdigest()


def document_digest(doc: Document) -> str:
    return digest(dumps_document(doc))


# ----------------------------------------------------------------- decoders


def _require(obj: dict, key: str, where: str) -> Any:
    if not isinstance(obj, dict):
        raise MalformedInput(f"{where} must be a JSON object")
    if key not in obj:
        raise MalformedInput(f"{where} is missing field {key!r}")
    return obj[key]


def decode_complex(v: Any, where: str) -> complex:
    if isinstance(v, bool):
        raise MalformedInput(f"{where}: expected a number or [re, im], got a boolean")
    if isinstance(v, (int, float)):
        return complex(float(v), 0.0)
    if isinstance(v, (list, tuple)) and len(v) == 2 and all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in v):
        return complex(float(v[0]), float(v[1]))
    raise MalformedInput(f"{where}: expected a number or [re, im], got {v!r}")


def decode_matrix(v: Any, where: str) -> np.ndarray:
    if not isinstance(v, list) or not v or not all(isinstance(row, list) for row in v):
        raise MalformedInput(f"{where}: expected a non-empty list of rows")
    width = len(v[0])
    if width == 0 or any(len(row) != width for row in v):
        raise MalformedInput(f"{where}: rows must be non-empty and of equal length")
    arr = np.array([[decode_complex(x, where) for x in row] for row in v], dtype=np.complex128)
    if not np.all(np.isfinite(arr)):
        raise MalformedInput(f"{where}: entries must be finite")
    return arr


def decode_doubled(v: Any, name: str, half_shape: tuple[int, int] | None = None) -> DoubledMatrix:
    if isinstance(v, dict):
        d = DoubledMatrix(decode_matrix(_require(v, "r1", name), f"{name}.r1"), decode_matrix(_require(v, "r2", name), f"{name}.r2"))
    else:
        full = decode_matrix(v, name)
        if full.shape[0] % 2 or full.shape[1] % 2:
            raise DimensionMismatch(f"{name}: a full doubled matrix needs even dimensions, got {full.shape}")
        d = contract(full, LOAD_TOL, name=name)
    if half_shape is not None and (d.half_rows, d.half_cols) != half_shape:
        raise DimensionMismatch(f"{name} has half-shape {(d.half_rows, d.half_cols)}, expected {half_shape}")
    return d


def _positive_int(obj: dict, key: str, where: str) -> int:
    v = _require(obj, key, where)
    if isinstance(v, bool) or not isinstance(v, int) or v < 1:
        raise MalformedInput(f"{where}.{key} must be a positive integer, got {v!r}")
    return v


def _real(obj: dict, key: str, where: str) -> float:
    v = _require(obj, key, where)
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise MalformedInput(f"{where}.{key} must be a real number, got {v!r}")
    return float(v)


def decode_payload(kind: str, obj: Any) -> Payload:
    where = "payload"
    if kind == "system":
        n, m = _positive_int(obj, "n_modes", where), _positive_int(obj, "m_fields", where)
        shapes = {"F": (n, n), "G": (n, m), "H": (m, n), "K": (m, m)}
        return QuantumLinearSystem(**{k: decode_doubled(_require(obj, k, where), k, shapes[k]) for k in "FGHK"})
    if kind == "physical_params":
        n, m = _positive_int(obj, "n_modes", where), _positive_int(obj, "m_fields", where)
        theta = obj.get("Theta")
        p = PhysicalParams(
            M=decode_doubled(_require(obj, "M", where), "M", (n, n)),
            N=decode_doubled(_require(obj, "N", where), "N", (m, n)),
            S=decode_matrix(_require(obj, "S", where), "S"),
            Theta=None if theta is None else decode_matrix(theta, "Theta"),
        )
        p.validate(LOAD_TOL)
        return p
    if kind == "perturbed":
        n1, n2, m = (_positive_int(obj, k, where) for k in ("n_slow", "n_fast", "m_fields"))
        shapes = {
            "Fa": (n1, n1), "Fb": (n1, n2), "Fc": (n2, n1), "Fd": (n2, n2),
            "Ga": (n1, m), "Gb": (n2, m), "Ha": (m, n1), "Hb": (m, n2), "K": (m, m),
        }
        return PerturbedSystem(**{k: decode_doubled(_require(obj, k, where), k, shapes[k]) for k in PERTURBED_BLOCKS})
    if kind == "special_class":
        n1, n2, m = (_positive_int(obj, k, where) for k in ("n_slow", "n_fast", "m_fields"))
        shapes = {"Ma": (n1, n1), "Mb": (n1, n2), "Mc": (n2, n1), "Md": (n2, n2), "Na": (m, n1), "Nb": (m, n2)}
        p = SpecialClassParams(
            **{k: decode_doubled(_require(obj, k, where), k, s) for k, s in shapes.items()},
            S=decode_matrix(_require(obj, "S", where), "S"),
        )
        report = validate_params(p, LOAD_TOL)
        if not report.passed:
            name, worst = max(report.residuals.items(), key=lambda kv: kv[1])
            raise StructureViolation(f"special-class parameters fail {name} (residual {worst:.3e})", field=name, residual=worst)
        return p
    if kind == "bogoliubov":
        m = _positive_int(obj, "m_fields", where)
        return BogoliubovComponent(decode_doubled(_require(obj, "B", where), "B", (m, m)))
    if kind == "cavity_squeezer":
        return CavitySqueezerParams(
            k1=_real(obj, "k1", where),
            k2=_real(obj, "k2", where),
            gamma=_real(obj, "gamma", where),
            chi=decode_complex(obj.get("chi", 0.0), "payload.chi"),
        )
    raise MalformedInput(f"unknown document kind {kind!r}; expected one of {', '.join(KINDS + (REPORT_KIND,))}")


def document_from_json(obj: Any) -> Document:
    if not isinstance(obj, dict):
        raise MalformedInput("document must be a JSON object")
    version = obj.get("qsr_version")
    if version != SCHEMA_VERSION:
        raise MalformedInput(f"unsupported qsr_version {version!r}; expected {SCHEMA_VERSION}")
    kind = _require(obj, "kind", "document")
    if kind == REPORT_KIND:
        verdict = _require(obj, "verdict", "report")
        if verdict not in VERDICTS:
            raise MalformedInput(f"report verdict must be one of {VERDICTS}, got {verdict!r}")
        residuals = _require(obj, "residuals", "report")
        if not isinstance(residuals, dict):
            raise MalformedInput("report.residuals must be an object")
        return ReportDocument(
            command=str(_require(obj, "command", "report")),
            inputs=str(_require(obj, "inputs", "report")),
            residuals={k: _real(residuals, k, "report.residuals") for k in residuals},
            verdict=verdict,
            samples_used=[decode_complex(v, "report.samples_used") for v in obj.get("samples_used", [])],
            tolerance=obj.get("tolerance"),
            details=obj.get("details", {}),
        )
    meta = obj.get("meta", {})
    if not isinstance(meta, dict) or not all(isinstance(v, str) for v in meta.values()):
        raise MalformedInput("meta must be an object of strings")
    return SystemDocument(kind=kind, payload=decode_payload(kind, _require(obj, "payload", "document")), meta=dict(meta))


def loads_document(text: str) -> Document:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedInput(f"invalid JSON: {exc.msg} (line {exc.lineno}, column {exc.colno})", line=exc.lineno, column=exc.colno) from exc
    return document_from_json(obj)


def load_document(path: str | Path) -> Document:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise IoError(f"cannot read {path}: {exc.strerror or exc}") from exc
    except UnicodeDecodeError as exc:
        raise MalformedInput(f"{path} is not valid UTF-8") from exc
    return loads_document(text)


def save_document(doc: Document, path: str | Path) -> None:
    try:
        Path(path).write_text(dumps_document(doc), encoding="utf-8")
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc.strerror or exc}") from exc
