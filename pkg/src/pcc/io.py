"""File formats: matrix documents, inner-product documents, run reports.

Matrix documents are JSON (multiplicative or additive domain) or CSV
(multiplicative only).  JSON entries are plain numbers or ``{"log": x}``,
which decodes to e^x; the log encoding exists so matrices with huge dynamic
range can be stored exactly.  Inner-product documents and reports are
JSON only.  Emission uses ``repr`` floats (up to 17 significant digits), so
every document survives a parse/emit round trip bit-for-bit.
"""
from __future__ import annotations

import csv
import io as _io
import json
import math
from dataclasses import asdict, dataclass

import numpy as np

from .core import ADDITIVE, MULTIPLICATIVE, AdditiveMatrix, PCMatrix, make_reciprocal
from .errors import PCError
from .products import CoefficientForm, Frobenius, InnerProductSpec, TraceForm, WeightedFrobenius

PRODUCT_KINDS = ("frobenius", "weighted", "trace_form", "coefficient")


class DocumentError(PCError):
    """Malformed document; the message names the offending entry."""


def _decode_entry(value, i: int, j: int) -> float:
    if isinstance(value, bool):
        raise DocumentError(f"entry ({i},{j}) must be a number or {{\"log\": x}}, got {value!r}")
    if isinstance(value, (int, float)):
        return float(value)
    if isinstance(value, dict) and set(value) == {"log"} and isinstance(value["log"], (int, float)):
        return math.exp(float(value["log"]))
    raise DocumentError(f"entry ({i},{j}) must be a number or {{\"log\": x}}, got {value!r}")


@dataclass(frozen=True)
class MatrixDocument:
    """A parsed matrix file: domain tag plus fully decoded numeric entries."""

    domain: str
    entries: tuple
    source_format: str = "json"

    @property
    def n(self) -> int:
        return len(self.entries)

    def to_array(self) -> np.ndarray:
        return np.array([list(row) for row in self.entries], dtype=float)

    def to_matrix(self, repair_reciprocity: bool = False):
        """Build the typed matrix; optionally repair a non-reciprocal input."""
        arr = self.to_array()
        if self.domain == ADDITIVE:
            return AdditiveMatrix(arr)
        if repair_reciprocity:
            return make_reciprocal(arr)
        return PCMatrix(arr)

    def to_json_dict(self) -> dict:
        return {
            "domain": self.domain,
            "n": self.n,
            "entries": [list(row) for row in self.entries],
        }


def parse_matrix_document(text: str, source_format: str = "json") -> MatrixDocument:
    """Parse JSON or CSV text into a MatrixDocument."""
    if source_format == "csv":
        rows = []
        for line_no, row in enumerate(csv.reader(_io.StringIO(text)), start=1):
            cells = [cell.strip() for cell in row if cell.strip() != ""]
            if not cells:
                continue
            try:
                rows.append(tuple(float(cell) for cell in cells))
            except ValueError:
                raise DocumentError(f"CSV row {line_no} contains a non-numeric cell") from None
        if not rows:
            raise DocumentError("CSV document is empty")
        return MatrixDocument(MULTIPLICATIVE, tuple(rows), "csv")
    if source_format != "json":
        raise DocumentError(f"unknown matrix format {source_format!r}")
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentError(f"invalid JSON: {exc}") from None
    if not isinstance(payload, dict) or "entries" not in payload:
        raise DocumentError('matrix document must be an object with an "entries" field')
    domain = payload.get("domain", MULTIPLICATIVE)
    if domain not in (MULTIPLICATIVE, ADDITIVE):
        raise DocumentError(f"unknown domain {domain!r}")
    raw = payload["entries"]
    if not isinstance(raw, list) or not raw or not all(isinstance(r, list) for r in raw):
        raise DocumentError('"entries" must be a non-empty list of rows')
    entries = tuple(
        tuple(_decode_entry(v, i + 1, j + 1) for j, v in enumerate(row))
        for i, row in enumerate(raw)
    )
    if any(len(row) != len(entries) for row in entries):
        raise DocumentError(f"entries must form a square matrix, got {len(entries)} rows")
    declared = payload.get("n")
    if declared is not None and declared != len(entries):
        raise DocumentError(f'declared n = {declared} but entries have {len(entries)} rows')
    return MatrixDocument(domain, entries, "json")


def load_matrix_document(path: str) -> MatrixDocument:
    fmt = "csv" if str(path).lower().endswith(".csv") else "json"
    with open(path, "r", encoding="utf-8") as fh:
        return parse_matrix_document(fh.read(), fmt)


def emit_matrix_document(doc: MatrixDocument) -> str:
    return json.dumps(doc.to_json_dict()) + "\n"


def matrix_document_from_array(arr, domain: str = MULTIPLICATIVE) -> MatrixDocument:
    arr = np.asarray(arr, dtype=float)
    return MatrixDocument(domain, tuple(tuple(float(v) for v in row) for row in arr))


# --- inner-product documents -------------------------------------------------

def parse_product_document(text: str) -> tuple[InnerProductSpec, dict]:
    """Parse an inner-product JSON document.

    Returns the (unvalidated) spec together with a JSON-safe summary used in
    reports.  Kinds: frobenius | weighted (rho) | trace_form (X[], Y[]) |
    coefficient (gamma).
    """
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentError(f"invalid JSON: {exc}") from None
    if not isinstance(payload, dict) or "kind" not in payload:
        raise DocumentError('inner-product document must be an object with a "kind" field')
    kind = payload["kind"]
    if kind == "frobenius":
        return Frobenius(), {"kind": "frobenius"}
    if kind == "weighted":
        rho = payload.get("rho")
        if not isinstance(rho, list) or not rho:
            raise DocumentError('weighted product needs a non-empty "rho" array')
        return WeightedFrobenius(np.array(rho, dtype=float)), {"kind": "weighted", "rho": rho}
    if kind == "trace_form":
        xs, ys = payload.get("X"), payload.get("Y")
        if not (isinstance(xs, list) and isinstance(ys, list)) or not xs or len(xs) != len(ys):
            raise DocumentError('trace_form needs matching non-empty "X" and "Y" arrays')
        factors = tuple((np.array(x, dtype=float), np.array(y, dtype=float)) for x, y in zip(xs, ys))
        return TraceForm(factors), {"kind": "trace_form", "pairs": len(xs)}
    if kind == "coefficient":
        gamma = payload.get("gamma")
        if not isinstance(gamma, list) or not gamma:
            raise DocumentError('coefficient product needs a "gamma" matrix')
        return CoefficientForm(np.array(gamma, dtype=float)), {"kind": "coefficient"}
    raise DocumentError(f"unknown inner-product kind {kind!r}; expected one of {PRODUCT_KINDS}")


def load_product_document(path: str) -> tuple[InnerProductSpec, dict]:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_product_document(fh.read())


# --- run reports --------------------------------------------------------------

_REPORT_FIELDS = (
    "input", "inner_product", "method", "kii_before", "kii_after", "priorities",
    "coefficients", "residual_distance", "additive_projection",
    "multiplicative_projection", "solver", "triads",
)


@dataclass
class RunReport:
    """Machine-readable outcome of a CLI command; lossless under JSON."""

    input: dict
    inner_product: dict | None = None
    method: str | None = None
    kii_before: float | None = None
    kii_after: float | None = None
    priorities: dict | None = None
    coefficients: list | None = None
    residual_distance: float | None = None
    additive_projection: list | None = None
    multiplicative_projection: list | None = None
    solver: dict | None = None
    triads: list | None = None

    def to_json(self, indent: int | None = 2) -> str:
        return json.dumps(asdict(self), indent=indent) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "RunReport":
        payload = json.loads(text)
        if not isinstance(payload, dict):
            raise DocumentError("run report must be a JSON object")
        unknown = set(payload) - set(_REPORT_FIELDS)
        if unknown:
            raise DocumentError(f"run report has unknown fields {sorted(unknown)}")
        return cls(**payload)
