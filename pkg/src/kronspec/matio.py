"""Matrix file I/O: Matrix Market dense array format and a JSON schema.

Matrix Market ("mm") files use the dense ``array`` layout: a header line,
optional ``%`` comments, a "rows cols" size line, then one entry per line in
column-major order ("re" for real files, "re im" for complex ones).  Values
are written with 17 significant digits so a write/read round trip reproduces
every finite double exactly.

The JSON schema is
``{"field": "real"|"complex", "rows": n, "cols": n, "data": [[re, im], ...]}``
with ``data`` row-major.
"""

from __future__ import annotations

import json
import re
from pathlib import Path

import numpy as np

from .errors import ParseError
from .matrices import Field, Matrix

FORMATS = ("mm", "json")

_MM_HEADER = re.compile(
    r"^%%MatrixMarket\s+(?P<object>\S+)\s+(?P<layout>\S+)\s+(?P<field>\S+)\s+(?P<symmetry>\S+)\s*$",
    re.IGNORECASE,
)
_TOKEN = re.compile(r"\S+")


def write_matrix(m: Matrix, path, fmt: str = "mm") -> None:
    text = format_matrix(m, fmt)
    Path(path).write_text(text, encoding="ascii")


def read_matrix(path, fmt: str = "mm") -> Matrix:
    try:
        text = Path(path).read_text(encoding="ascii")
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror or exc}") from exc
    return parse_matrix(text, fmt)


def format_matrix(m: Matrix, fmt: str = "mm") -> str:
    if fmt == "mm":
        return _format_mm(m)
    if fmt == "json":
        return _format_json(m)
    raise ParseError(f"unknown matrix format {fmt!r}; expected one of {FORMATS}")


def parse_matrix(text: str, fmt: str = "mm") -> Matrix:
    if fmt == "mm":
        return _parse_mm(text)
    if fmt == "json":
        return _parse_json(text)
    raise ParseError(f"unknown matrix format {fmt!r}; expected one of {FORMATS}")


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def _format_mm(m: Matrix) -> str:
    lines = [f"%%MatrixMarket matrix array {m.field.value} general", f"{m.n_rows} {m.n_cols}"]
    # column-major entry order, as the array layout requires
    for j in range(m.n_cols):
        for i in range(m.n_rows):
            z = m.data[i, j]
            if m.field is Field.REAL:
                lines.append(_fmt(z.real))
            else:
                lines.append(f"{_fmt(z.real)} {_fmt(z.imag)}")
    return "\n".join(lines) + "\n"


def _tokens(line: str):
    return [(t.group(0), t.start() + 1) for t in _TOKEN.finditer(line)]


def _parse_mm(text: str) -> Matrix:
    lines = text.splitlines()
    if not lines:
        raise ParseError("empty file where a MatrixMarket header was expected", line=1, column=1)

    header = _MM_HEADER.match(lines[0])
    if header is None:
        raise ParseError("malformed MatrixMarket header", line=1, column=1)
    obj, layout, field_word, symmetry = (header.group(g).lower() for g in ("object", "layout", "field", "symmetry"))
    if obj != "matrix":
        raise ParseError(f"unsupported MatrixMarket object {obj!r}; only 'matrix'", line=1, column=lines[0].lower().find(obj) + 1)
    if layout != "array":
        raise ParseError(f"unsupported MatrixMarket layout {layout!r}; only dense 'array'", line=1, column=lines[0].lower().find(layout) + 1)
    if field_word not in ("real", "complex"):
        raise ParseError(f"unsupported MatrixMarket field {field_word!r}; only 'real' or 'complex'", line=1, column=lines[0].lower().find(field_word) + 1)
    if symmetry != "general":
        raise ParseError(f"unsupported MatrixMarket symmetry {symmetry!r}; only 'general'", line=1, column=lines[0].lower().find(symmetry) + 1)
    field = Field.REAL if field_word == "real" else Field.COMPLEX

    # skip comments/blank lines up to the size line
    idx = 1
    while idx < len(lines) and (not lines[idx].strip() or lines[idx].lstrip().startswith("%")):
        idx += 1
    if idx >= len(lines):
        raise ParseError("missing size line", line=len(lines) + 1, column=1)
    size_tokens = _tokens(lines[idx])
    if len(size_tokens) != 2:
        raise ParseError(f"size line must hold exactly two integers, got {len(size_tokens)} tokens", line=idx + 1, column=1)
    dims = []
    for tok, col in size_tokens:
        try:
            val = int(tok)
        except ValueError:
            raise ParseError(f"invalid dimension {tok!r}", line=idx + 1, column=col) from None
        if val < 1:
            raise ParseError(f"dimensions must be positive, got {val}", line=idx + 1, column=col)
        dims.append(val)
    rows, cols = dims

    expected = rows * cols
    per_entry = 1 if field is Field.REAL else 2
    values = np.zeros(expected, dtype=np.complex128)
    count = 0
    for lineno in range(idx + 1, len(lines)):
        raw = lines[lineno]
        if not raw.strip() or raw.lstrip().startswith("%"):
            continue
        if count >= expected:
            raise ParseError(
                f"too many entries: header {rows} {cols} promises {expected}", line=lineno + 1, column=1
            )
        toks = _tokens(raw)
        if len(toks) != per_entry:
            raise ParseError(
                f"expected {per_entry} value(s) per line for a {field.value} array, got {len(toks)}",
                line=lineno + 1,
                column=1,
            )
        parts = []
        for tok, col in toks:
            try:
                parts.append(float(tok))
            except ValueError:
                raise ParseError(f"invalid numeric value {tok!r}", line=lineno + 1, column=col) from None
        values[count] = parts[0] if per_entry == 1 else complex(parts[0], parts[1])
        count += 1
    if count != expected:
        raise ParseError(
            f"dimension header mismatch: header {rows} {cols} promises {expected} entries, file holds {count}",
            line=len(lines) + 1,
            column=1,
        )
    data = values.reshape((cols, rows)).T  # stored column-major
    return Matrix(data, field)


def _format_json(m: Matrix) -> str:
    payload = {
        "field": m.field.value,
        "rows": m.n_rows,
        "cols": m.n_cols,
        "data": [[z.real, z.imag] for z in m.data.ravel()],  # row-major
    }
    return json.dumps(payload, indent=2) + "\n"


def _parse_json(text: str) -> Matrix:
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}", line=exc.lineno, column=exc.colno) from None
    if not isinstance(payload, dict):
        raise ParseError("matrix JSON must be an object")
    for key in ("field", "rows", "cols", "data"):
        if key not in payload:
            raise ParseError(f"matrix JSON is missing the {key!r} key")
    field_word = payload["field"]
    if field_word not in ("real", "complex"):
        raise ParseError(f"field must be 'real' or 'complex', got {field_word!r}")
    field = Field.REAL if field_word == "real" else Field.COMPLEX
    rows, cols = payload["rows"], payload["cols"]
    if not (isinstance(rows, int) and isinstance(cols, int) and rows > 0 and cols > 0):
        raise ParseError(f"rows/cols must be positive integers, got {rows!r}, {cols!r}")
    data = payload["data"]
    if not isinstance(data, list) or len(data) != rows * cols:
        raise ParseError(
            f"dimension header mismatch: expected {rows * cols} [re, im] pairs, got {len(data) if isinstance(data, list) else type(data).__name__}"
        )
    values = np.zeros(rows * cols, dtype=np.complex128)
    for k, pair in enumerate(data):
        if not (isinstance(pair, list) and len(pair) == 2 and all(isinstance(v, (int, float)) for v in pair)):
            raise ParseError(f"data[{k}] must be a [re, im] pair of numbers, got {pair!r}")
        values[k] = complex(pair[0], pair[1])
    if field is Field.REAL and values.imag.any():
        raise ParseError("real-tagged matrix JSON carries nonzero imaginary parts")
    return Matrix(values.reshape((rows, cols)), field)
