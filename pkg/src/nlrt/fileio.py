"""Tensor files, raw image stacks and CSV output.

Tensor file layout (little-endian throughout)::

    magic    4 bytes  b"NLRT"
    version  u16      1
    dtype    u8       0 = float64, 1 = float32
    ndim     u8
    dims     ndim x u64
    payload  values in column-major order (first index fastest)
"""

import csv
import io
import math
import os
import struct
import tempfile
from pathlib import Path

import numpy as np

MAGIC = b"NLRT"
VERSION = 1
_DTYPES = {0: np.dtype("<f8"), 1: np.dtype("<f4")}
_CODES = {"f64": 0, "f32": 1}
RAW_DTYPES = {
    "f64": "<f8",
    "f32": "<f4",
    "u8": "u1",
    "u16": "<u2",
    "i16": "<i2",
    "u32": "<u4",
    "i32": "<i4",
}


class TensorFileError(ValueError):
    """Malformed or unsupported tensor file."""


def _atomic_write(path, write):
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            write(fh)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_tensor(path, t, dtype="f64"):
    t = np.asarray(t, dtype=np.float64)
    if dtype not in _CODES:
        raise TensorFileError(f"unsupported dtype {dtype!r}")
    if t.ndim > 255:
        raise TensorFileError("too many modes for the tensor file header")
    code = _CODES[dtype]
    header = MAGIC + struct.pack("<HBB", VERSION, code, t.ndim) + struct.pack(f"<{t.ndim}Q", *t.shape)
    payload = t.astype(_DTYPES[code]).tobytes(order="F")
    _atomic_write(path, lambda fh: (fh.write(header), fh.write(payload)))


def read_tensor(path):
    """Read a tensor file; float32 payloads are widened to float64."""
    data = Path(path).read_bytes()
    if len(data) < 8 or data[:4] != MAGIC:
        raise TensorFileError(f"{path}: bad magic")
    version, code, ndim = struct.unpack_from("<HBB", data, 4)
    if version != VERSION:
        raise TensorFileError(f"{path}: unsupported version {version}")
    if code not in _DTYPES:
        raise TensorFileError(f"{path}: unsupported dtype code {code}")
    head = 8 + 8 * ndim
    if ndim == 0 or len(data) < head:
        raise TensorFileError(f"{path}: truncated header")
    dims = struct.unpack_from(f"<{ndim}Q", data, 8)
    if any(d == 0 for d in dims):
        raise TensorFileError(f"{path}: zero-sized dimension in {dims}")
    dt = _DTYPES[code]
    expected = dt.itemsize * math.prod(dims)
    if len(data) - head != expected:
        raise TensorFileError(f"{path}: payload has {len(data) - head} bytes, expected {expected}")
    flat = np.frombuffer(data, dtype=dt, offset=head)
    t = flat.reshape(dims, order="F").astype(np.float64)
    if not np.all(np.isfinite(t)):
        raise TensorFileError(f"{path}: non-finite values in payload")
    return t


def import_raw(path, shape, dtype="f32", normalize=False, clamp=False):
    """Read a headerless column-major stack of ``shape`` and return a float64 tensor.

    Negative values are rejected unless ``clamp`` is set; ``normalize``
    divides by the maximum so that it becomes exactly 1.
    """
    shape = tuple(int(n) for n in shape)
    if dtype not in RAW_DTYPES:
        raise ValueError(f"unsupported raw dtype {dtype!r}; choose from {sorted(RAW_DTYPES)}")
    dt = np.dtype(RAW_DTYPES[dtype])
    data = Path(path).read_bytes()
    expected = dt.itemsize * math.prod(shape)
    if len(data) != expected:
        raise ValueError(f"{path}: size mismatch, expected {expected} bytes for {shape} {dtype}, got {len(data)}")
    t = np.frombuffer(data, dtype=dt).reshape(shape, order="F").astype(np.float64)
    if not np.all(np.isfinite(t)):
        raise ValueError(f"{path}: non-finite values")
    if t.min() < 0:
        if not clamp:
            raise ValueError(f"{path}: negative values (min {t.min()}); pass clamp to zero them")
        t = np.maximum(t, 0.0)
    if normalize:
        peak = t.max()
        if peak > 0:
            t = t / peak
    return t


def export_raw(path, t, dtype="f32"):
    if dtype not in RAW_DTYPES:
        raise ValueError(f"unsupported raw dtype {dtype!r}")
    payload = np.asarray(t).astype(RAW_DTYPES[dtype]).tobytes(order="F")
    _atomic_write(path, lambda fh: fh.write(payload))


def fmt(value):
    """CSV cell text; floats use the shortest round-trip representation."""
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if isinstance(value, np.integer):
        return str(int(value))
    return str(value)


def write_csv(path, header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(v) for v in row])
    payload = buf.getvalue().encode()
    _atomic_write(path, lambda fh: fh.write(payload))


def read_labels(path):
    """Read a ``pixel_index,class`` CSV into two integer arrays."""
    idx, cls = [], []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != ["pixel_index", "class"]:
            raise ValueError(f"{path}: expected header 'pixel_index,class'")
        for row in reader:
            if not row:
                continue
            idx.append(int(row[0]))
            cls.append(int(row[1]))
    return np.array(idx, dtype=np.int64), np.array(cls, dtype=np.int64)
