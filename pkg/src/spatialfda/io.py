"""Reading and writing the functional-data CSV format, plus small tables.

A functional-data file is plain CSV with no quoting:

    # key=value                 zero or more metadata comment lines
    t_1,t_2,...,t_D             grid points, strictly increasing
    #weights,w_1,...,w_D        optional quadrature weights row
    x_11,x_12,...,x_1D          one curve per row

The weights row is recognized by the literal first cell ``#weights``; plain
comments use ``#`` followed by a space. When the weights row is absent,
equispaced grids get trapezoid weights and anything else equal weights 1/D.
All numbers are written with ``repr``, so a write/read round trip preserves
every float bit for bit. Parse failures raise ParseError tagged with the
1-based line number.
"""

from __future__ import annotations

import numpy as np

from .errors import ParseError
from .funcspace import FunctionalSample, Grid

WEIGHTS_MARKER = "#weights"


def _fmt(x: float) -> str:
    return repr(float(x))


def _parse_row(cells: list[str], lineno: int) -> np.ndarray:
    out = np.empty(len(cells))
    for j, cell in enumerate(cells):
        try:
            out[j] = float(cell)
        except ValueError:
            raise ParseError(
                f"cell {j + 1} is not a number: {cell.strip()!r}", line=lineno
            ) from None
    return out


def _default_weights(points: np.ndarray) -> np.ndarray:
    gaps = np.diff(points)
    if np.allclose(gaps, gaps[0], rtol=1e-9, atol=0.0):
        h = float(gaps[0])
        w = np.full(points.size, h)
        w[0] = w[-1] = h / 2.0
        return w
    return np.full(points.size, 1.0 / points.size)


def read_sample(path) -> tuple[FunctionalSample, dict]:
    """Read a functional-data CSV; returns the sample and its metadata.

    Metadata is every ``# key=value`` comment line, parsed into a dict;
    comment lines without ``=`` are ignored.
    """
    metadata: dict[str, str] = {}
    points = None
    weights = None
    curves: list[np.ndarray] = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n").rstrip("\r")
            if not line.strip():
                continue
            cells = line.split(",")
            if cells[0] == WEIGHTS_MARKER:
                if points is None:
                    raise ParseError("weights row before grid row", line=lineno)
                if weights is not None:
                    raise ParseError("second weights row", line=lineno)
                if curves:
                    raise ParseError("weights row after curve rows", line=lineno)
                if len(cells) - 1 != points.size:
                    raise ParseError(
                        f"{len(cells) - 1} weights for {points.size} grid points",
                        line=lineno,
                    )
                weights = _parse_row(cells[1:], lineno)
                if np.any(weights <= 0):
                    raise ParseError("weights must be positive", line=lineno)
                continue
            if line.lstrip().startswith("#"):
                body = line.lstrip().lstrip("#").strip()
                if "=" in body:
                    key, _, value = body.partition("=")
                    metadata[key.strip()] = value.strip()
                continue
            row = _parse_row(cells, lineno)
            if points is None:
                points = row
                if points.size < 2:
                    raise ParseError("grid row needs at least 2 points", line=lineno)
                if not np.all(np.diff(points) > 0):
                    raise ParseError(
                        "grid points must be strictly increasing", line=lineno
                    )
                continue
            if row.size != points.size:
                raise ParseError(
                    f"row has {row.size} cells, expected {points.size}", line=lineno
                )
            curves.append(row)
    if points is None:
        raise ParseError("no grid row found", line=1)
    if not curves:
        raise ParseError("no curve rows found", line=1)
    if weights is None:
        weights = _default_weights(points)
    grid = Grid.custom(points, weights)
    return FunctionalSample(grid, np.vstack(curves)), metadata


def write_sample(path, sample: FunctionalSample, metadata: dict | None = None) -> None:
    """Write a functional-data CSV (grid row, weights row, one row per curve)."""
    lines = []
    for key, value in (metadata or {}).items():
        lines.append(f"# {key}={value}")
    lines.append(",".join(_fmt(t) for t in sample.grid.points))
    lines.append(WEIGHTS_MARKER + "," + ",".join(_fmt(w) for w in sample.grid.weights))
    for row in sample.values:
        lines.append(",".join(_fmt(v) for v in row))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def write_table(path, columns: list[str], rows, metadata: dict | None = None) -> None:
    """Write a small named-column CSV (depths, DD points, study medians).

    Floats are formatted with repr, everything else with str; the header
    row carries the column names.
    """
    lines = []
    for key, value in (metadata or {}).items():
        lines.append(f"# {key}={value}")
    lines.append(",".join(columns))
    for row in rows:
        cells = [_fmt(v) if isinstance(v, float) else str(v) for v in row]
        if len(cells) != len(columns):
            raise ValueError("row width does not match column count")
        lines.append(",".join(cells))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
