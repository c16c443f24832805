"""sepfactory/1 JSON interchange formats.

Matrices and states share one schema: schema_version, dims ([dim_a, dim_b]
for bipartite operators, [n] for plain square matrices), entries as nested
row-major arrays of [re, im] pairs, and an optional metadata map. Certificate
and ensemble documents add a top-level "kind". Floats are written with 17
significant digits so the decimal serialization round-trips doubles exactly;
writes are atomic (temp file then rename).
"""

from __future__ import annotations

import hashlib
import json
import os

import numpy as np

from .bipartite import BipartiteOperator
from .cholesky import CholeskyCertificate
from .decompose import ProductEnsemble, ProductTerm
from .errors import FormatError

SCHEMA_VERSION = "sepfactory/1"


def _dump(obj) -> str:
    if isinstance(obj, dict):
        inner = ", ".join(f"{json.dumps(k)}: {_dump(v)}" for k, v in obj.items())
        return "{" + inner + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ", ".join(_dump(v) for v in obj) + "]"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return format(float(obj), ".17g")
    if isinstance(obj, str):
        return json.dumps(obj)
    if obj is None:
        return "null"
    raise TypeError(f"cannot serialize {type(obj)!r}")


def _write_atomic(path: str, text: str) -> None:
    tmp = f"{path}.tmp.{os.getpid()}"
    with open(tmp, "w", encoding="utf-8") as fh:
        fh.write(text)
    os.replace(tmp, path)


def _matrix_entries(m: np.ndarray) -> list:
    return [
        [[float(z.real), float(z.imag)] for z in row]
        for row in np.asarray(m, dtype=np.complex128)
    ]


def _vector_entries(v: np.ndarray) -> list:
    return [[float(z.real), float(z.imag)] for z in np.asarray(v)]


def _parse_pair(pair, what: str) -> complex:
    if (
        not isinstance(pair, list)
        or len(pair) != 2
        or not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in pair)
    ):
        raise FormatError(f"{what}: entries must be [re, im] pairs")
    z = complex(float(pair[0]), float(pair[1]))
    if not (np.isfinite(z.real) and np.isfinite(z.imag)):
        raise FormatError(f"{what}: non-finite entry")
    return z


def _parse_matrix(data, what: str) -> np.ndarray:
    if not isinstance(data, list) or not data:
        raise FormatError(f"{what}: entries must be a nonempty nested array")
    rows = []
    width = None
    for row in data:
        if not isinstance(row, list):
            raise FormatError(f"{what}: entries must be a nested array")
        if width is None:
            width = len(row)
        elif len(row) != width:
            raise FormatError(f"{what}: ragged entry rows")
        rows.append([_parse_pair(p, what) for p in row])
    return np.array(rows, dtype=np.complex128)


def _parse_vector(data, what: str) -> np.ndarray:
    if not isinstance(data, list) or not data:
        raise FormatError(f"{what}: expected a nonempty array of [re, im] pairs")
    return np.array([_parse_pair(p, what) for p in data], dtype=np.complex128)


def _load_doc(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: invalid JSON ({exc})") from exc
    if not isinstance(doc, dict):
        raise FormatError(f"{path}: document must be a JSON object")
    if doc.get("schema_version") != SCHEMA_VERSION:
        raise FormatError(
            f"{path}: schema_version must be {SCHEMA_VERSION!r}, "
            f"got {doc.get('schema_version')!r}"
        )
    return doc


def _meta(doc) -> dict:
    meta = doc.get("metadata", {})
    if not isinstance(meta, dict):
        raise FormatError("metadata must be a map")
    return meta


def _dims(doc, count: int) -> list:
    dims = doc.get("dims")
    if (
        not isinstance(dims, list)
        or len(dims) != count
        or not all(isinstance(d, int) and d >= 1 for d in dims)
    ):
        raise FormatError(f"dims must be {count} positive integer(s), got {dims!r}")
    return dims


def save_state(path: str, rho: BipartiteOperator, metadata: dict | None = None):
    doc = {
        "schema_version": SCHEMA_VERSION,
        "dims": [rho.dim_a, rho.dim_b],
        "entries": _matrix_entries(rho.matrix),
    }
    if metadata:
        doc["metadata"] = metadata
    _write_atomic(path, _dump(doc) + "\n")


def load_state(path: str):
    doc = _load_doc(path)
    dims = _dims(doc, 2)
    m = _parse_matrix(doc.get("entries"), path)
    n = dims[0] * dims[1]
    if m.shape != (n, n):
        raise FormatError(f"{path}: entries shape {m.shape} != ({n}, {n})")
    return BipartiteOperator(dims[0], dims[1], m), _meta(doc)


def save_matrix(path: str, m: np.ndarray, metadata: dict | None = None):
    m = np.asarray(m, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise FormatError("plain matrix files hold square matrices")
    doc = {
        "schema_version": SCHEMA_VERSION,
        "dims": [m.shape[0]],
        "entries": _matrix_entries(m),
    }
    if metadata:
        doc["metadata"] = metadata
    _write_atomic(path, _dump(doc) + "\n")


def load_matrix(path: str):
    doc = _load_doc(path)
    dims = _dims(doc, 1)
    m = _parse_matrix(doc.get("entries"), path)
    if m.shape != (dims[0], dims[0]):
        raise FormatError(f"{path}: entries shape {m.shape} != dims {dims}")
    return m, _meta(doc)


def save_certificate(path: str, cert: CholeskyCertificate,
                     metadata: dict | None = None):
    doc = {
        "schema_version": SCHEMA_VERSION,
        "kind": "certificate",
        "dims": [cert.dim_a, cert.dim_b],
        "x_ops": [_matrix_entries(x) for x in cert.x_ops],
        "s_ops": [
            {"i": i, "j": j, "entries": _matrix_entries(s)}
            for (i, j), s in sorted(cert.s_ops.items())
        ],
    }
    if metadata:
        doc["metadata"] = metadata
    _write_atomic(path, _dump(doc) + "\n")


def load_certificate(path: str):
    doc = _load_doc(path)
    if doc.get("kind") != "certificate":
        raise FormatError(f"{path}: not a certificate document")
    dims = _dims(doc, 2)
    x_raw = doc.get("x_ops")
    if not isinstance(x_raw, list) or len(x_raw) != dims[0]:
        raise FormatError(f"{path}: expected {dims[0]} x_ops")
    x_ops = tuple(_parse_matrix(x, f"{path}: X_{k + 1}") for k, x in enumerate(x_raw))
    s_ops = {}
    for item in doc.get("s_ops", []):
        if not isinstance(item, dict) or not {"i", "j", "entries"} <= set(item):
            raise FormatError(f"{path}: malformed s_ops item")
        i, j = item["i"], item["j"]
        if not (isinstance(i, int) and isinstance(j, int)):
            raise FormatError(f"{path}: s_ops indices must be integers")
        s_ops[(i, j)] = _parse_matrix(item["entries"], f"{path}: S_{i}{j}")
    try:
        cert = CholeskyCertificate(dims[0], dims[1], x_ops, s_ops)
    except Exception as exc:
        raise FormatError(f"{path}: {exc}") from exc
    return cert, _meta(doc)


def save_ensemble(path: str, ens: ProductEnsemble, metadata: dict | None = None):
    doc = {
        "schema_version": SCHEMA_VERSION,
        "kind": "ensemble",
        "dims": [ens.dim_a, ens.dim_b],
        "terms": [
            {
                "weight": t.weight,
                "a": _vector_entries(t.ket_a),
                "b": _vector_entries(t.ket_b),
            }
            for t in ens.terms
        ],
    }
    if metadata:
        doc["metadata"] = metadata
    _write_atomic(path, _dump(doc) + "\n")


def load_ensemble(path: str):
    doc = _load_doc(path)
    if doc.get("kind") != "ensemble":
        raise FormatError(f"{path}: not an ensemble document")
    dims = _dims(doc, 2)
    terms = []
    raw = doc.get("terms")
    if not isinstance(raw, list):
        raise FormatError(f"{path}: terms must be an array")
    for item in raw:
        if not isinstance(item, dict) or not {"weight", "a", "b"} <= set(item):
            raise FormatError(f"{path}: malformed ensemble term")
        weight = item["weight"]
        if not isinstance(weight, (int, float)) or isinstance(weight, bool):
            raise FormatError(f"{path}: weights must be numbers")
        terms.append(
            ProductTerm(
                float(weight),
                _parse_vector(item["a"], f"{path}: a"),
                _parse_vector(item["b"], f"{path}: b"),
            )
        )
    try:
        ens = ProductEnsemble(dims[0], dims[1], tuple(terms))
    except Exception as exc:
        raise FormatError(f"{path}: {exc}") from exc
    return ens, _meta(doc)


def load_document(path: str):
    """(kind, payload, metadata) for state, matrix, certificate or ensemble."""
    doc = _load_doc(path)
    kind = doc.get("kind")
    if kind == "certificate":
        cert, meta = load_certificate(path)
        return "certificate", cert, meta
    if kind == "ensemble":
        ens, meta = load_ensemble(path)
        return "ensemble", ens, meta
    if "entries" in doc:
        dims = doc.get("dims")
        if isinstance(dims, list) and len(dims) == 2:
            rho, meta = load_state(path)
            return "state", rho, meta
        m, meta = load_matrix(path)
        return "matrix", m, meta
    raise FormatError(f"{path}: unrecognized document")


def file_digest(path: str) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        h.update(fh.read())
    return h.hexdigest()
