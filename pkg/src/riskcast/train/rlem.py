"""Embedding matrix files: magic ``RLEM``, u32 version, u32 rows, u32 cols,
u32 valid_rows, little-endian f32 row-major payload.

Rows at or beyond ``valid_rows`` are zero padding and are verified as such
on load.
"""

from __future__ import annotations

import struct

import numpy as np

from ..errors import FormatError

MAGIC = b"RLEM"
VERSION = 1
_HEADER = struct.Struct("<4sIIII")


def save_embedding_matrix(path, matrix, valid_rows: int, version: int = VERSION) -> None:
    m = np.ascontiguousarray(matrix, dtype="<f4")
    if m.ndim != 2:
        raise ValueError(f"expected a 2-d matrix, got shape {m.shape}")
    if not 1 <= valid_rows <= m.shape[0]:
        raise ValueError(f"valid_rows {valid_rows} outside 1..{m.shape[0]}")
    if valid_rows < m.shape[0] and np.any(m[valid_rows:] != 0.0):
        raise ValueError("padding rows must be all-zero")
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, version, m.shape[0], m.shape[1], valid_rows))
        fh.write(m.tobytes())


def load_embedding_matrix(path, expected_shape=None) -> tuple[np.ndarray, int]:
    """Returns (float32 matrix, valid row count)."""
    with open(path, "rb") as fh:
        blob = fh.read()
    if len(blob) < _HEADER.size:
        raise FormatError(f"file too short for header: {len(blob)} bytes")
    magic, version, rows, cols, valid = _HEADER.unpack_from(blob)
    if magic != MAGIC:
        raise FormatError(f"bad magic {magic!r}")
    if version != VERSION:
        raise FormatError(f"unsupported version {version}")
    if valid < 1 or valid > rows:
        raise FormatError(f"valid_rows {valid} outside 1..{rows}")
    if expected_shape is not None and (rows, cols) != tuple(expected_shape):
        raise FormatError(f"shape ({rows}, {cols}) != expected {tuple(expected_shape)}")
    payload = blob[_HEADER.size:]
    if len(payload) != 4 * rows * cols:
        raise FormatError(
            f"payload is {len(payload)} bytes, expected {4 * rows * cols}"
        )
    matrix = np.frombuffer(payload, dtype="<f4").reshape(rows, cols).copy()
    if valid < rows and np.any(matrix[valid:] != 0.0):
        raise FormatError("nonzero values in padding rows")
    return matrix, valid


def save_embedding_vector(path, vector) -> None:
    """Store a single vector as a one-row matrix."""
    v = np.asarray(vector, dtype="<f4").reshape(1, -1)
    save_embedding_matrix(path, v, 1)


def load_embedding_vector(path, expected_dim: int | None = None) -> np.ndarray:
    expected = (1, expected_dim) if expected_dim is not None else None
    matrix, _ = load_embedding_matrix(path, expected)
    if matrix.shape[0] != 1:
        raise FormatError(f"expected a one-row vector file, got {matrix.shape}")
    return matrix[0]
