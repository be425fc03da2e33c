"""On-disk formats: binary coefficient ensembles, CSV tables, JSON reports.

All floats are written in shortest round-trip decimal (CSV/JSON) or raw
little-endian float64 (binary), so re-running with the same seed reproduces
files byte for byte.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgument

_MAGIC = b"LLRF"
_VERSION = 1
_LAW_FIELD = 32  # fixed-width ascii law id in the header


@dataclass
class EnsembleHeader:
    n_modes: int
    law: str
    seed: int


class EnsembleWriter:
    """Streams index-stamped coefficient blocks to disk.

    Layout: magic, version u32, n_modes u64, law id (32-byte padded ascii),
    seed u64; then per block an index u64 followed by the coefficients as
    interleaved re/im little-endian float64.
    """

    def __init__(self, path, n_modes: int, law: str, seed: int):
        law_bytes = law.encode("ascii")
        if len(law_bytes) > _LAW_FIELD:
            raise InvalidArgument(f"law id too long for header: {law!r}")
        self._fh = open(path, "wb")
        self._n = n_modes
        self._fh.write(_MAGIC)
        self._fh.write(struct.pack("<IQ", _VERSION, n_modes))
        self._fh.write(law_bytes.ljust(_LAW_FIELD, b"\0"))
        self._fh.write(struct.pack("<Q", seed & (2**64 - 1)))

    def append(self, index: int, coeffs: np.ndarray):
        coeffs = np.asarray(coeffs, dtype=complex)
        if coeffs.size != self._n:
            raise InvalidArgument(f"block has {coeffs.size} modes, header says {self._n}")
        self._fh.write(struct.pack("<Q", index))
        flat = np.empty(2 * self._n)
        flat[0::2] = coeffs.real
        flat[1::2] = coeffs.imag
        self._fh.write(flat.astype("<f8").tobytes())

    def close(self):
        self._fh.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


def read_ensemble(path):
    """Read the ensemble file back as ``(header, indices, coefficient matrix)``."""
    with open(path, "rb") as fh:
        if fh.read(4) != _MAGIC:
            raise InvalidArgument(f"{path} is not an ensemble record file")
        version, n_modes = struct.unpack("<IQ", fh.read(12))
        if version != _VERSION:
            raise InvalidArgument(f"unsupported ensemble version {version}")
        law = fh.read(_LAW_FIELD).rstrip(b"\0").decode("ascii")
        (seed,) = struct.unpack("<Q", fh.read(8))
        block = 8 + 16 * n_modes
        payload = fh.read()
    if len(payload) % block:
        raise InvalidArgument(f"{path} has a truncated trailing block")
    count = len(payload) // block
    indices = np.empty(count, dtype=np.uint64)
    coeffs = np.empty((count, n_modes), dtype=complex)
    for i in range(count):
        chunk = payload[i * block : (i + 1) * block]
        (indices[i],) = struct.unpack("<Q", chunk[:8])
        flat = np.frombuffer(chunk[8:], dtype="<f8")
        coeffs[i] = flat[0::2] + 1j * flat[1::2]
    return EnsembleHeader(n_modes, law, seed), indices, coeffs


def _fmt(value):
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return str(value)


def write_csv(path, header: list[str], columns: list[np.ndarray]):
    """Write columns as CSV with shortest round-trip decimals."""
    rows = zip(*columns)
    with open(path, "w", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    return obj


def write_json(path, payload: dict):
    with open(path, "w") as fh:
        json.dump(_jsonable(payload), fh, indent=2, sort_keys=True)
        fh.write("\n")
