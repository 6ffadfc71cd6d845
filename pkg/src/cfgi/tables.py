"""CSV serialization for sweep grids, coincidence counts, image estimates,
dose maps, and phase masks.

Floats are written with repr (shortest round-trip form), so every file
re-reads to bit-identical values and repeated runs produce byte-identical
output. A divergent ratio is written as ``inf`` and parses back to the
float infinity.
"""

from __future__ import annotations

import csv
import io
from pathlib import Path
from typing import Sequence

import numpy as np

from .metrics import MetricPoint

__all__ = [
    "SWEEP_COLUMNS",
    "COUNTS_COLUMNS",
    "ESTIMATE_COLUMNS",
    "DOSE_COLUMNS",
    "sweep_rows_to_csv",
    "write_sweep_csv",
    "read_sweep_csv",
    "write_counts_csv",
    "read_counts_csv",
    "write_estimate_csv",
    "read_estimate_csv",
    "write_dose_csv",
    "read_dose_csv",
    "write_phase_csv",
    "read_phase_csv",
]

SWEEP_COLUMNS = ("M", "N", "p_int", "p_d0_err", "f", "snr_int_ratio", "visibility")
COUNTS_COLUMNS = ("x", "y", "c_d0", "c_d1", "c_dl")
ESTIMATE_COLUMNS = ("x", "y", "d")
DOSE_COLUMNS = ("x", "y", "dose")


def _fmt(value: float) -> str:
    return repr(float(value))


def sweep_rows_to_csv(points: Sequence[MetricPoint]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(SWEEP_COLUMNS)
    for p in points:
        writer.writerow([
            p.outer_cycles, p.inner_cycles, _fmt(p.p_int), _fmt(p.p_d0_err),
            _fmt(p.snr_cgi_factor), _fmt(p.snr_int_ratio), _fmt(p.visibility),
        ])
    return buf.getvalue()


def write_sweep_csv(path: str | Path, points: Sequence[MetricPoint]) -> None:
    Path(path).write_text(sweep_rows_to_csv(points), encoding="ascii")


def read_sweep_csv(path: str | Path) -> list[MetricPoint]:
    with open(path, newline="", encoding="ascii") as fh:
        reader = csv.reader(fh)
        header = tuple(next(reader))
        if header != SWEEP_COLUMNS:
            raise ValueError(f"unexpected sweep header {header!r}")
        points = []
        for row in reader:
            if not row:
                continue
            points.append(MetricPoint(
                outer_cycles=int(row[0]),
                inner_cycles=int(row[1]),
                p_int=float(row[2]),
                p_d0_err=float(row[3]),
                snr_cgi_factor=float(row[4]),
                snr_int_ratio=float(row[5]),
                visibility=float(row[6]),
            ))
    return points


def _write_grid_csv(path: str | Path, header: Sequence[str],
                    grids: Sequence[np.ndarray], fmt) -> None:
    # One row per pixel, x fastest, preceded by x,y columns.
    shape = grids[0].shape
    for g in grids:
        if g.shape != shape or g.ndim != 2:
            raise ValueError("grid shapes differ or are not 2D")
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    height, width = shape
    for y in range(height):
        for x in range(width):
            writer.writerow([x, y] + [fmt(g[y, x]) for g in grids])
    Path(path).write_text(buf.getvalue(), encoding="ascii")


def _read_grid_csv(path: str | Path, header: Sequence[str], parse) -> list[np.ndarray]:
    with open(path, newline="", encoding="ascii") as fh:
        reader = csv.reader(fh)
        got = tuple(next(reader))
        if got != tuple(header):
            raise ValueError(f"unexpected header {got!r}, expected {tuple(header)!r}")
        cells: dict[tuple[int, int], list] = {}
        for row in reader:
            if not row:
                continue
            x, y = int(row[0]), int(row[1])
            cells[(x, y)] = [parse(v) for v in row[2:]]
    if not cells:
        raise ValueError("empty grid CSV")
    width = 1 + max(x for x, _ in cells)
    height = 1 + max(y for _, y in cells)
    if len(cells) != width * height:
        raise ValueError("grid CSV does not cover a full rectangle")
    n_fields = len(header) - 2
    grids = [np.zeros((height, width)) for _ in range(n_fields)]
    for (x, y), values in cells.items():
        if len(values) != n_fields:
            raise ValueError("ragged grid CSV row")
        for g, v in zip(grids, values):
            g[y, x] = v
    return grids


def write_counts_csv(path: str | Path, c_d0: np.ndarray, c_d1: np.ndarray,
                     c_dl: np.ndarray) -> None:
    _write_grid_csv(path, COUNTS_COLUMNS, [c_d0, c_d1, c_dl], lambda v: str(int(v)))


def read_counts_csv(path: str | Path) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    g0, g1, g2 = _read_grid_csv(path, COUNTS_COLUMNS, int)
    return g0.astype(np.int64), g1.astype(np.int64), g2.astype(np.int64)


def write_estimate_csv(path: str | Path, d: np.ndarray) -> None:
    _write_grid_csv(path, ESTIMATE_COLUMNS, [d], _fmt)


def read_estimate_csv(path: str | Path) -> np.ndarray:
    return _read_grid_csv(path, ESTIMATE_COLUMNS, float)[0]


def write_dose_csv(path: str | Path, dose: np.ndarray) -> None:
    _write_grid_csv(path, DOSE_COLUMNS, [dose], _fmt)


def read_dose_csv(path: str | Path) -> np.ndarray:
    return _read_grid_csv(path, DOSE_COLUMNS, float)[0]


def write_phase_csv(path: str | Path, phase: np.ndarray) -> None:
    """Headerless grid of radians, one CSV row per pixel row."""
    arr = np.asarray(phase, dtype=float)
    if arr.ndim != 2:
        raise ValueError(f"expected a 2D phase grid, got shape {arr.shape}")
    lines = [",".join(_fmt(v) for v in row) for row in arr]
    Path(path).write_text("\n".join(lines) + "\n", encoding="ascii")


def read_phase_csv(path: str | Path) -> np.ndarray:
    rows: list[list[float]] = []
    with open(path, newline="", encoding="ascii") as fh:
        for row in csv.reader(fh):
            if not row:
                continue
            rows.append([float(v) for v in row])
    if not rows:
        raise ValueError("empty phase CSV")
    width = len(rows[0])
    if any(len(r) != width for r in rows):
        raise ValueError("ragged phase CSV")
    return np.asarray(rows, dtype=float)
