"""Flat binary checkpoint format for named float64 tensors.

Layout: magic ``RLCK``, version u32, then per-tensor records of
(name length u16, UTF-8 name, rank u32, one u32 per dim, little-endian f64
payload). Round-trips are bit-exact.
"""

from __future__ import annotations

import struct

import numpy as np

from ..errors import FormatError

MAGIC = b"RLCK"
VERSION = 1


def save_checkpoint(path, params: dict, version: int = VERSION) -> None:
    """Write name -> array (or Tensor) entries in sorted name order."""
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<I", version))
        for name in sorted(params):
            arr = getattr(params[name], "data", params[name])
            # ascontiguousarray would promote 0-d scalars to 1-d
            arr = np.asarray(arr, dtype="<f8", order="C")
            encoded = name.encode("utf-8")
            fh.write(struct.pack("<H", len(encoded)))
            fh.write(encoded)
            fh.write(struct.pack("<I", arr.ndim))
            for d in arr.shape:
                fh.write(struct.pack("<I", d))
            fh.write(arr.tobytes())


def load_checkpoint(path) -> tuple[dict, int]:
    with open(path, "rb") as fh:
        blob = fh.read()
    if blob[:4] != MAGIC:
        raise FormatError(f"bad checkpoint magic {blob[:4]!r}")
    if len(blob) < 8:
        raise FormatError("truncated checkpoint header")
    (version,) = struct.unpack_from("<I", blob, 4)
    off = 8
    out: dict[str, np.ndarray] = {}
    while off < len(blob):
        try:
            (name_len,) = struct.unpack_from("<H", blob, off)
            off += 2
            name = blob[off : off + name_len].decode("utf-8")
            if len(blob) < off + name_len:
                raise struct.error("name overruns file")
            off += name_len
            (rank,) = struct.unpack_from("<I", blob, off)
            off += 4
            dims = struct.unpack_from(f"<{rank}I", blob, off)
            off += 4 * rank
            count = int(np.prod(dims, dtype=np.int64)) if rank else 1
            payload = blob[off : off + 8 * count]
            if len(payload) != 8 * count:
                raise struct.error("payload overruns file")
            off += 8 * count
        except struct.error as exc:
            raise FormatError(f"truncated checkpoint record at byte {off}") from exc
        arr = np.frombuffer(payload, dtype="<f8").astype(np.float64).reshape(dims)
        out[name] = arr
    return out, version
