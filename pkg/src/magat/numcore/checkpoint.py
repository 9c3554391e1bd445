"""Binary parameter checkpoints.

Layout (all little-endian):

    magic   4 bytes  "MGTC"
    version u16
    count   u32                       number of parameter entries
    entry   u16 name length, UTF-8 name,
            u8 rank, u32 per dimension,
            float32 values in row-major order
    meta    u32 pair count, then per pair:
            u16 key length, UTF-8 key, u32 value length, UTF-8 value

The metadata section is optional; readers treat end-of-file after the
entries as an empty map.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from .params import ParamSet
from .tensor import Tensor

MAGIC = b"MGTC"
VERSION = 1


def save_checkpoint(path: str | Path, params: ParamSet | dict,
                    meta: dict[str, str] | None = None) -> None:
    items = params.items() if isinstance(params, ParamSet) else params.items()
    path = Path(path)
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        entries = list(items)
        fh.write(struct.pack("<HI", VERSION, len(entries)))
        for name, value in entries:
            arr = np.ascontiguousarray(
                value.data if isinstance(value, Tensor) else value, dtype="<f4")
            encoded = name.encode("utf-8")
            fh.write(struct.pack("<H", len(encoded)))
            fh.write(encoded)
            fh.write(struct.pack("<B", arr.ndim))
            fh.write(struct.pack(f"<{arr.ndim}I", *arr.shape))
            fh.write(arr.tobytes())
        if meta:
            fh.write(struct.pack("<I", len(meta)))
            for key, value in meta.items():
                k = key.encode("utf-8")
                v = str(value).encode("utf-8")
                fh.write(struct.pack("<H", len(k)))
                fh.write(k)
                fh.write(struct.pack("<I", len(v)))
                fh.write(v)


def load_checkpoint(path: str | Path) -> tuple[dict[str, np.ndarray], dict[str, str]]:
    path = Path(path)
    blob = path.read_bytes()
    if blob[:4] != MAGIC:
        raise ValueError(f"{path}: not a parameter checkpoint (bad magic)")
    offset = 4
    version, count = struct.unpack_from("<HI", blob, offset)
    offset += 6
    if version != VERSION:
        raise ValueError(f"{path}: unsupported checkpoint version {version}")
    values: dict[str, np.ndarray] = {}
    for _ in range(count):
        (name_len,) = struct.unpack_from("<H", blob, offset)
        offset += 2
        name = blob[offset:offset + name_len].decode("utf-8")
        offset += name_len
        (rank,) = struct.unpack_from("<B", blob, offset)
        offset += 1
        dims = struct.unpack_from(f"<{rank}I", blob, offset)
        offset += 4 * rank
        n = int(np.prod(dims)) if rank else 1
        arr = np.frombuffer(blob, dtype="<f4", count=n, offset=offset).reshape(dims)
        offset += 4 * n
        values[name] = arr.copy()
    meta: dict[str, str] = {}
    if offset < len(blob):
        (pairs,) = struct.unpack_from("<I", blob, offset)
        offset += 4
        for _ in range(pairs):
            (klen,) = struct.unpack_from("<H", blob, offset)
            offset += 2
            key = blob[offset:offset + klen].decode("utf-8")
            offset += klen
            (vlen,) = struct.unpack_from("<I", blob, offset)
            offset += 4
            meta[key] = blob[offset:offset + vlen].decode("utf-8")
            offset += vlen
    return values, meta
