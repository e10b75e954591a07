"""Matrix file ingestion and report emission for the command-line harness.

Supported inputs are Matrix Market (array and coordinate formats) and CSV.
The array writer emits values at 17 significant digits, which round-trips
IEEE doubles exactly; its data section is column-major, matching the
package's canonical storage order. Reports serialize to JSON (sorted keys,
so byte-identical for identical content) or flat CSV; plot data can also be
rendered as a minimal SVG.
"""

import csv
import io as _io
import json
import numpy as np

from .errors import DimensionError, ParseError
from .matkit import as_matrix, require_finite

MM_ARRAY_HEADER = "%%MatrixMarket matrix array real general"
MM_COORD_HEADER = "%%MatrixMarket matrix coordinate real general"


def _parse_float(token, path, lineno):
    try:
        return float(token)
    except ValueError:
        raise ParseError(f"invalid numeric token {token!r}", path, lineno) from None


def _parse_int(token, path, lineno):
    try:
        return int(token)
    except ValueError:
        raise ParseError(f"invalid integer token {token!r}", path, lineno) from None


def read_matrix_market(path):
    """Parse a Matrix Market file (array or coordinate, real, general)."""
    with open(path, "r", encoding="ascii") as fh:
        lines = fh.read().splitlines()
    if not lines:
        raise ParseError("empty file", path, 1)
    header = lines[0].split()
    if len(header) != 5 or not header[0].startswith("%%MatrixMarket"):
        raise ParseError(f"not a MatrixMarket header: {lines[0]!r}", path, 1)
    _, obj, fmt, field, symmetry = (tok.lower() for tok in header)
    if obj != "matrix":
        raise ParseError(f"unsupported object {obj!r}", path, 1)
    if fmt not in ("array", "coordinate"):
        raise ParseError(f"unsupported format {fmt!r}", path, 1)
    if field not in ("real", "integer"):
        raise ParseError(f"unsupported field {field!r}", path, 1)
    if symmetry != "general":
        raise ParseError(f"unsupported symmetry {symmetry!r}", path, 1)

    # Skip comments; find the size line.
    pos = 1
    while pos < len(lines) and (lines[pos].startswith("%") or not lines[pos].strip()):
        pos += 1
    if pos >= len(lines):
        raise ParseError("missing size line", path, len(lines))
    size = lines[pos].split()
    lineno = pos + 1

    if fmt == "array":
        if len(size) != 2:
            raise ParseError(f"array size line needs 'rows cols', got {lines[pos]!r}", path, lineno)
        m = _parse_int(size[0], path, lineno)
        n = _parse_int(size[1], path, lineno)
        if m < 1 or n < 1:
            raise ParseError(f"dimensions must be positive, got {m} x {n}", path, lineno)
        values = []
        for off, line in enumerate(lines[pos + 1 :], start=lineno + 1):
            stripped = line.strip()
            if not stripped or stripped.startswith("%"):
                continue
            for token in stripped.split():
                values.append(_parse_float(token, path, off))
        if len(values) != m * n:
            raise ParseError(
                f"expected {m * n} entries, found {len(values)}", path, len(lines)
            )
        a = np.asfortranarray(np.array(values).reshape((m, n), order="F"))
        return require_finite(a, "matrix")

    if len(size) != 3:
        raise ParseError(
            f"coordinate size line needs 'rows cols nnz', got {lines[pos]!r}", path, lineno
        )
    m = _parse_int(size[0], path, lineno)
    n = _parse_int(size[1], path, lineno)
    nnz = _parse_int(size[2], path, lineno)
    if m < 1 or n < 1:
        raise ParseError(f"dimensions must be positive, got {m} x {n}", path, lineno)
    a = np.zeros((m, n), order="F")
    seen = 0
    for off, line in enumerate(lines[pos + 1 :], start=lineno + 1):
        stripped = line.strip()
        if not stripped or stripped.startswith("%"):
            continue
        parts = stripped.split()
        if len(parts) != 3:
            raise ParseError(f"coordinate entry needs 'i j value', got {stripped!r}", path, off)
        i = _parse_int(parts[0], path, off)
        j = _parse_int(parts[1], path, off)
        v = _parse_float(parts[2], path, off)
        if not 1 <= i <= m or not 1 <= j <= n:
            raise ParseError(
                f"index ({i}, {j}) out of bounds for {m} x {n}", path, off
            )
        a[i - 1, j - 1] += v  # duplicates assemble additively
        seen += 1
    if seen != nnz:
        raise ParseError(f"expected {nnz} entries, found {seen}", path, len(lines))
    return require_finite(a, "matrix")


def read_csv_matrix(path, header=False):
    """Parse a dense CSV matrix; ``header=True`` skips the first row."""
    rows = []
    width = None
    with open(path, "r", encoding="utf-8", newline="") as fh:
        for lineno, record in enumerate(csv.reader(fh), start=1):
            if header and lineno == 1:
                continue
            if not record or all(not tok.strip() for tok in record):
                continue
            vals = [_parse_float(tok.strip(), path, lineno) for tok in record]
            if width is None:
                width = len(vals)
            elif len(vals) != width:
                raise ParseError(
                    f"row has {len(vals)} fields, expected {width}", path, lineno
                )
            rows.append(vals)
    if not rows:
        raise ParseError("no data rows", path, 1)
    return require_finite(np.asfortranarray(np.array(rows)), "matrix")


def read_matrix(path, fmt=None, csv_header=False):
    """Read a matrix file, sniffing the format when ``fmt`` is None.

    ``fmt`` may be "matrix-market" (either layout) or "csv"; sniffing checks
    the extension and then the first line for a MatrixMarket banner.
    """
    if fmt is None:
        lowered = str(path).lower()
        if lowered.endswith((".mtx", ".mm")):
            fmt = "matrix-market"
        elif lowered.endswith(".csv"):
            fmt = "csv"
        else:
            with open(path, "r", encoding="utf-8", errors="replace") as fh:
                first = fh.readline()
            fmt = "matrix-market" if first.startswith("%%MatrixMarket") else "csv"
    if fmt == "matrix-market":
        return read_matrix_market(path)
    if fmt == "csv":
        return read_csv_matrix(path, header=csv_header)
    raise ValueError(f"unknown matrix format {fmt!r}")


def write_matrix_market(path, a):
    """Write a dense matrix in Matrix Market array format, lossless round-trip."""
    a = as_matrix(a, "matrix")
    m, n = a.shape
    with open(path, "w", encoding="ascii") as fh:
        fh.write(MM_ARRAY_HEADER + "\n")
        fh.write(f"{m} {n}\n")
        for j in range(n):
            for i in range(m):
                fh.write(f"{a[i, j]:.17g}\n")


def report_json(report):
    """Serialize a report dict to canonical JSON text (stable byte-for-byte)."""
    return json.dumps(report, indent=2, sort_keys=True) + "\n"


def _flatten(prefix, value, row):
    if isinstance(value, dict):
        for k, v in sorted(value.items()):
            _flatten(f"{prefix}.{k}" if prefix else str(k), v, row)
    elif isinstance(value, (list, tuple)):
        row[prefix] = ";".join(str(v) for v in value)
    else:
        row[prefix] = value


def report_csv(report):
    """Flatten a report into CSV: one row per cell plus a parameter header row."""
    cells = report.get("cells", [])
    rows = []
    for cell in cells:
        row = {}
        _flatten("", cell, row)
        rows.append(row)
    if not rows:
        rows = [{}]
    fields = sorted({k for row in rows for k in row})
    buf = _io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    meta = {k: v for k, v in sorted(report.items()) if k != "cells"}
    writer.writerow(["# " + json.dumps(meta, sort_keys=True)])
    writer.writerow(fields)
    for row in rows:
        writer.writerow([row.get(f, "") for f in fields])
    return buf.getvalue()


def write_report(report, out=None, fmt="json"):
    """Render a report dict as JSON or CSV and write it to ``out`` (or return it)."""
    if fmt == "json":
        text = report_json(report)
    elif fmt == "csv":
        text = report_csv(report)
    else:
        raise ValueError(f"unknown report format {fmt!r}")
    if out is not None:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    return text


def _svg_coords(vals, lo, hi, pix0, pix1):
    span = hi - lo if hi > lo else 1.0
    return [pix0 + (v - lo) / span * (pix1 - pix0) for v in vals]


def plot_svg(series, title="", width=640, height=420):
    """Render xy-series as a minimal SVG line/scatter plot.

    ``series`` is a list of dicts with keys "name", "x", "y" and optional
    "marker" (draw points instead of a line). Enough to eyeball error curves;
    not a plotting library.
    """
    palette = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")
    xs = [v for s in series for v in s["x"]]
    ys = [v for s in series for v in s["y"]]
    if not xs:
        raise DimensionError("no data to plot")
    x_lo, x_hi = min(xs), max(xs)
    y_lo, y_hi = min(ys), max(ys)
    mleft, mright, mtop, mbot = 60, 20, 30, 40
    px = lambda v: _svg_coords([v], x_lo, x_hi, mleft, width - mright)[0]
    py = lambda v: _svg_coords([v], y_lo, y_hi, height - mbot, mtop)[0]
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<line x1="{mleft}" y1="{height - mbot}" x2="{width - mright}" '
        f'y2="{height - mbot}" stroke="black"/>',
        f'<line x1="{mleft}" y1="{mtop}" x2="{mleft}" y2="{height - mbot}" stroke="black"/>',
        f'<text x="{width / 2:.0f}" y="18" text-anchor="middle" font-size="14">{title}</text>',
        f'<text x="{mleft}" y="{height - 8}" font-size="11">{x_lo:.4g}</text>',
        f'<text x="{width - mright}" y="{height - 8}" text-anchor="end" font-size="11">{x_hi:.4g}</text>',
        f'<text x="{mleft - 5}" y="{height - mbot}" text-anchor="end" font-size="11">{y_lo:.4g}</text>',
        f'<text x="{mleft - 5}" y="{mtop + 4}" text-anchor="end" font-size="11">{y_hi:.4g}</text>',
    ]
    for idx, s in enumerate(series):
        color = palette[idx % len(palette)]
        pts = list(zip((px(v) for v in s["x"]), (py(v) for v in s["y"])))
        if s.get("marker"):
            for x, y in pts:
                parts.append(f'<circle cx="{x:.2f}" cy="{y:.2f}" r="2.5" fill="{color}"/>')
        else:
            path = " ".join(f"{x:.2f},{y:.2f}" for x, y in pts)
            parts.append(
                f'<polyline points="{path}" fill="none" stroke="{color}" stroke-width="1.5"/>'
            )
        parts.append(
            f'<text x="{width - mright - 4}" y="{mtop + 14 * (idx + 1)}" text-anchor="end" '
            f'font-size="12" fill="{color}">{s["name"]}</text>'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def plot_csv(series):
    """Flatten xy-series into long-form CSV (name, x, y)."""
    buf = _io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["series", "x", "y"])
    for s in series:
        for x, y in zip(s["x"], s["y"]):
            writer.writerow([s["name"], x, y])
    return buf.getvalue()


def write_plotdata(series, out, fmt="svg", title=""):
    """Write xy-series as an SVG plot or long-form CSV."""
    if fmt == "svg":
        text = plot_svg(series, title=title)
    elif fmt == "csv":
        text = plot_csv(series)
    else:
        raise ValueError(f"unknown plot format {fmt!r}")
    with open(out, "w", encoding="utf-8") as fh:
        fh.write(text)
    return text
