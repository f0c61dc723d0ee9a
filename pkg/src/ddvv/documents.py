"""JSON documents for tuples, shape operators and reports."""
from __future__ import annotations

import hashlib
import json
import math
from pathlib import Path

import numpy as np

from .geometry import ShapeOperatorSet
from .matrix_core import MatrixTuple, SymmetryClass, ValidationError


class DocumentError(ValueError):
    """Malformed or inconsistent input document."""


def tuple_document(t: MatrixTuple) -> dict:
    return {
        "kind": "tuple",
        "n": t.n,
        "m": t.m,
        "symmetry": t.symmetry.value,
        "matrices": t.mats.tolist(),
    }


def shape_document(s: ShapeOperatorSet) -> dict:
    return {
        "kind": "shape_ops",
        "n": s.n,
        "m": s.m,
        "symmetry": "symmetric",
        "c": s.c,
        "matrices": s.ops.tolist(),
    }


def parse_document(doc: dict):
    """Build a MatrixTuple or ShapeOperatorSet from a decoded document."""
    if not isinstance(doc, dict):
        raise DocumentError("document must be a JSON object")
    try:
        kind = doc["kind"]
        n, m = int(doc["n"]), int(doc["m"])
        mats = np.array(doc["matrices"], dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise DocumentError(f"bad document: {exc}") from exc
    if mats.shape != (m, n, n):
        raise DocumentError(f"declared shape (m={m}, n={n}) does not match matrices {mats.shape}")
    try:
        if kind == "tuple":
            return MatrixTuple(mats, SymmetryClass(doc.get("symmetry", "symmetric")))
        if kind == "shape_ops":
            if "c" not in doc:
                raise DocumentError("shape_ops document needs c")
            return ShapeOperatorSet(mats, float(doc["c"]))
    except ValidationError as exc:
        raise DocumentError(str(exc)) from exc
    except ValueError as exc:
        raise DocumentError(f"bad document: {exc}") from exc
    raise DocumentError(f"unknown document kind {kind!r}")


def dumps(doc: dict) -> str:
    return json.dumps(finite(doc), indent=2, sort_keys=True) + "\n"


def load(path) -> tuple[object, str]:
    """Parse a document file; returns (object, sha256 of the raw bytes)."""
    raw = Path(path).read_bytes()
    try:
        doc = json.loads(raw)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise DocumentError(f"{path}: not valid JSON ({exc})") from exc
    return parse_document(doc), hashlib.sha256(raw).hexdigest()


def save(obj, path) -> None:
    doc = tuple_document(obj) if isinstance(obj, MatrixTuple) else shape_document(obj)
    Path(path).write_text(dumps(doc))


def finite(obj):
    """Replace non-finite floats by None so every emitted number is finite."""
    if isinstance(obj, float):
        return obj if math.isfinite(obj) else None
    if isinstance(obj, dict):
        return {k: finite(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [finite(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return finite(obj.tolist())
    if isinstance(obj, np.generic):
        return finite(obj.item())
    return obj
