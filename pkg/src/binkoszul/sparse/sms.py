"""SMS text format: ``nrows ncols M`` header, 1-based ``i j v`` lines, ``0 0 0`` terminator.

The modulus is not part of the format; it lives in a JSON sidecar next to
the matrix file (``<path>.json``).
"""
from __future__ import annotations

import hashlib
import json
import os
import tempfile
from pathlib import Path

import numpy as np

from ..errors import IndexOutOfRange, ParseError
from .matrix import SparseMatrix


def write_sms(M: SparseMatrix) -> bytes:
    lines = [f"{M.nrows} {M.ncols} M"]
    lines.extend(f"{r + 1} {c + 1} {v}" for r, c, v in M.triplets())
    lines.append("0 0 0")
    return ("\n".join(lines) + "\n").encode("ascii")


def read_sms(data, prime=None) -> SparseMatrix:
    if isinstance(data, bytes):
        data = data.decode("ascii")
    lines = data.splitlines()
    if not lines:
        raise ParseError("empty stream", 1)
    head = lines[0].split()
    if len(head) != 3 or not head[0].isdigit() or not head[1].isdigit():
        raise ParseError(f"bad header {lines[0]!r}", 1)
    nrows, ncols = int(head[0]), int(head[1])
    rows, cols, vals = [], [], []
    seen = set()
    terminated = False
    for lineno, line in enumerate(lines[1:], start=2):
        parts = line.split()
        if not parts:
            continue
        if terminated:
            raise ParseError("data after terminator", lineno)
        if len(parts) != 3:
            raise ParseError(f"expected 'i j v', got {line!r}", lineno)
        try:
            i, j, v = (int(x) for x in parts)
        except ValueError:
            raise ParseError(f"non-integer entry {line!r}", lineno) from None
        if i == 0 and j == 0 and v == 0:
            terminated = True
            continue
        if not (1 <= i <= nrows and 1 <= j <= ncols):
            raise IndexOutOfRange(f"entry ({i}, {j}) outside {nrows}x{ncols}", lineno)
        if (i, j) in seen:
            raise ParseError(f"duplicate entry ({i}, {j})", lineno)
        if v == 0 or (prime is not None and not 0 < v < prime):
            raise ParseError(f"value {v} outside [1, p-1]" if prime else "explicit zero value", lineno)
        seen.add((i, j))
        rows.append(i - 1)
        cols.append(j - 1)
        vals.append(v)
    if not terminated:
        raise ParseError("missing '0 0 0' terminator", len(lines) + 1)
    dtype = np.int64 if prime is not None and prime < (1 << 62) else object
    return SparseMatrix.from_triplets(nrows, ncols, rows, cols, np.array(vals, dtype=dtype), prime)


def sidecar(M: SparseMatrix, sms_bytes: bytes) -> dict:
    return {"prime": M.prime, "nrows": M.nrows, "ncols": M.ncols,
            "sha256_of_sms": hashlib.sha256(sms_bytes).hexdigest()}


def atomic_write(path, data: bytes):
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def sidecar_path(path) -> Path:
    return Path(str(path) + ".json")


def save_sms(M: SparseMatrix, path) -> dict:
    """Write matrix and sidecar atomically; returns the sidecar dict."""
    data = write_sms(M)
    meta = sidecar(M, data)
    atomic_write(path, data)
    atomic_write(sidecar_path(path), (json.dumps(meta, indent=2, sort_keys=True) + "\n").encode())
    return meta


def load_sms(path, prime=None) -> SparseMatrix:
    """Read a matrix; the prime comes from the argument or the sidecar."""
    data = Path(path).read_bytes()
    side = sidecar_path(path)
    if side.exists():
        meta = json.loads(side.read_text())
        if meta.get("sha256_of_sms") not in (None, hashlib.sha256(data).hexdigest()):
            raise ParseError(f"{path}: checksum does not match sidecar")
        if prime is None:
            prime = meta.get("prime")
    return read_sms(data, prime)
