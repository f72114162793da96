"""Reading and writing the JSON and plain-text documents used by the CLI."""

from __future__ import annotations

import json
from pathlib import Path

from .enhance import BilinearForm, TwoLinearForm
from .errors import FormsError, ParseError
from .exactnum import QmodZ
from .fingroup import FinAbGroup
from .modp import OdqDecomposition, ReducedDecomposition


def _read(path) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc


def _json(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}") from exc


def load_form(path) -> TwoLinearForm:
    return parse_form(_read(path))


def parse_form(text: str) -> TwoLinearForm:
    """A form document: group orders plus generator values and gram matrix."""
    doc = _json(text)
    try:
        return TwoLinearForm.from_json(doc)
    except FormsError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"malformed form document: {exc!r}") from exc


def dump_form(psi: TwoLinearForm) -> str:
    return json.dumps(psi.to_json())


def parse_matrix(text: str, symmetric: bool = True) -> list[list[int]]:
    """Plain text (first line n, then n rows) or JSON nested arrays / {"matrix": ...}."""
    text = text.strip()
    if not text:
        raise ParseError("empty matrix document")
    try:
        if text[0] in "[{":
            doc = _json(text)
            rows = doc["matrix"] if isinstance(doc, dict) else doc
            rows = [[int(x) for x in row] for row in rows]
        else:
            lines = [ln.split() for ln in text.splitlines() if ln.strip()]
            n = int(lines[0][0])
            if len(lines[0]) != 1 or len(lines) != n + 1:
                raise ParseError(f"expected a size line and {n} rows")
            rows = [[int(x) for x in ln] for ln in lines[1:]]
    except (KeyError, TypeError, ValueError, IndexError) as exc:
        raise ParseError(f"malformed matrix: {exc!r}") from exc
    n = len(rows)
    if any(len(r) != n for r in rows):
        raise ParseError("matrix is not square")
    if symmetric and any(rows[i][j] != rows[j][i] for i in range(n) for j in range(i)):
        raise ParseError("matrix is not symmetric")
    return rows


def load_matrix(path, symmetric: bool = True) -> list[list[int]]:
    return parse_matrix(_read(path), symmetric=symmetric)


def format_matrix(B) -> str:
    return "\n".join([str(len(B))] + [" ".join(str(x) for x in row) for row in B]) + "\n"


def load_decomposition(path):
    return parse_decomposition(_read(path))


def parse_decomposition(text: str):
    """A ReducedDecomposition (has "r") or a psi-decomposition (layers only)."""
    doc = _json(text)
    if not isinstance(doc, dict):
        raise ParseError("decomposition must be a JSON object")
    return ReducedDecomposition.from_json(doc) if "r" in doc else OdqDecomposition.from_json(doc)


def lens_space_linking_form(m: int, q: int) -> BilinearForm:
    """The linking form of L(m, q) as fixture data: l(1, 1) = q/m on Z/m."""
    return BilinearForm(FinAbGroup([m]), [[QmodZ(q, m)]])


def form_document(orders, genvals, gram) -> dict:
    return {"group": {"orders": list(orders)},
            "genvals": [[str(QmodZ.parse(a)), str(QmodZ.parse(b))] for a, b in genvals],
            "gram": [[str(QmodZ.parse(x)) for x in row] for row in gram]}
