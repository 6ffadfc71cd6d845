"""Minimal PGM (P2/P5) reader and writer, maxval 255 only."""

from __future__ import annotations

from pathlib import Path

import numpy as np

__all__ = ["read_pgm", "write_pgm"]

MAXVAL = 255


def _header_tokens(data: bytes) -> tuple[list[bytes], int]:
    # Yields the first four header tokens (magic, width, height, maxval)
    # and the offset just past the single whitespace byte after maxval.
    tokens: list[bytes] = []
    i = 0
    n = len(data)
    while len(tokens) < 4:
        while i < n and data[i : i + 1].isspace():
            i += 1
        if i < n and data[i : i + 1] == b"#":
            while i < n and data[i] not in (0x0A, 0x0D):
                i += 1
            continue
        start = i
        while i < n and not data[i : i + 1].isspace():
            i += 1
        if start == i:
            raise ValueError("truncated PGM header")
        tokens.append(data[start:i])
    if i >= n:
        raise ValueError("truncated PGM header")
    return tokens, i + 1  # skip exactly one whitespace byte after maxval


def read_pgm(path: str | Path) -> np.ndarray:
    """Read a P2 or P5 PGM file into a uint8 array of shape (height, width)."""
    data = Path(path).read_bytes()
    tokens, offset = _header_tokens(data)
    magic = tokens[0]
    if magic not in (b"P2", b"P5"):
        raise ValueError(f"not a PGM file (magic {magic!r})")
    try:
        width, height, maxval = (int(tok) for tok in tokens[1:4])
    except ValueError as exc:
        raise ValueError("malformed PGM header") from exc
    if width <= 0 or height <= 0:
        raise ValueError(f"invalid PGM dimensions {width}x{height}")
    if maxval != MAXVAL:
        raise ValueError(f"unsupported PGM maxval {maxval}, expected {MAXVAL}")
    count = width * height
    if magic == b"P5":
        raster = data[offset : offset + count]
        if len(raster) < count:
            raise ValueError("PGM raster shorter than width*height")
        pixels = np.frombuffer(raster, dtype=np.uint8, count=count)
    else:
        fields = data[offset - 1 :].split()
        if len(fields) < count:
            raise ValueError("PGM raster shorter than width*height")
        values = [int(f) for f in fields[:count]]
        if any(v < 0 or v > MAXVAL for v in values):
            raise ValueError("PGM sample out of range")
        pixels = np.asarray(values, dtype=np.uint8)
    return pixels.reshape(height, width)


def write_pgm(path: str | Path, image: np.ndarray, binary: bool = True) -> None:
    """Write a 2D uint8 array as P5 (binary) or P2 (ascii) with maxval 255."""
    arr = np.asarray(image)
    if arr.ndim != 2:
        raise ValueError(f"expected a 2D array, got shape {arr.shape}")
    if arr.dtype != np.uint8:
        if not np.issubdtype(arr.dtype, np.integer):
            raise ValueError(f"expected integer samples, got dtype {arr.dtype}")
        if arr.min(initial=0) < 0 or arr.max(initial=0) > MAXVAL:
            raise ValueError("samples out of [0, 255]")
        arr = arr.astype(np.uint8)
    height, width = arr.shape
    if binary:
        header = f"P5\n{width} {height}\n{MAXVAL}\n".encode("ascii")
        Path(path).write_bytes(header + arr.tobytes())
    else:
        lines = [f"P2\n{width} {height}\n{MAXVAL}"]
        for row in arr:
            lines.append(" ".join(str(int(v)) for v in row))
        Path(path).write_text("\n".join(lines) + "\n", encoding="ascii")
