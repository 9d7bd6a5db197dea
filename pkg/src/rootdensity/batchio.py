"""Wire formats for polynomial batches and root sets.

Batch file ("CPLY"): little-endian; magic, u32 version=1, u32 degree,
u32 precision flag (0=fp32, 1=fp64), u64 count, then count records of
degree (re, im) pairs low-degree-first with the monic leading
coefficient implied.

Roots file ("CRTS"): magic, u32 version=1, u32 degree, u64 count, then
count*degree (re, im) float64 pairs in input order. The text form
writes one polynomial per line with roots as "re+imi"/"re-imi"
separated by tabs.
"""

from __future__ import annotations

import struct

import numpy as np

from .errors import BatchFormatError

BATCH_MAGIC = b"CPLY"
ROOTS_MAGIC = b"CRTS"
FORMAT_VERSION = 1

_BATCH_HEADER = struct.Struct("<4sIIIQ")
_ROOTS_HEADER = struct.Struct("<4sIIQ")

_FLAG_TO_DTYPE = {0: np.dtype(np.complex64), 1: np.dtype(np.complex128)}
_DTYPE_TO_FLAG = {v: k for k, v in _FLAG_TO_DTYPE.items()}


def write_batch(path, coeffs: np.ndarray) -> None:
    """Write a (count, degree) complex coefficient matrix as a CPLY file."""
    coeffs = np.asarray(coeffs)
    if coeffs.ndim != 2 or coeffs.shape[1] < 1:
        raise BatchFormatError("batch must be a 2-D (count, degree) array")
    if coeffs.dtype not in _DTYPE_TO_FLAG:
        coeffs = coeffs.astype(np.complex128)
    flag = _DTYPE_TO_FLAG[coeffs.dtype]
    count, degree = coeffs.shape
    with open(path, "wb") as fh:
        fh.write(_BATCH_HEADER.pack(BATCH_MAGIC, FORMAT_VERSION, degree, flag, count))
        fh.write(np.ascontiguousarray(coeffs).tobytes())


def read_batch(path) -> np.ndarray:
    """Read a CPLY file back into a (count, degree) complex matrix."""
    with open(path, "rb") as fh:
        header = fh.read(_BATCH_HEADER.size)
        if len(header) < _BATCH_HEADER.size:
            raise BatchFormatError(f"{path}: truncated header")
        magic, version, degree, flag, count = _BATCH_HEADER.unpack(header)
        if magic != BATCH_MAGIC:
            raise BatchFormatError(f"{path}: bad magic {magic!r}")
        if version != FORMAT_VERSION:
            raise BatchFormatError(f"{path}: unsupported version {version}")
        if flag not in _FLAG_TO_DTYPE:
            raise BatchFormatError(f"{path}: unknown precision flag {flag}")
        if degree < 1:
            raise BatchFormatError(f"{path}: degree must be >= 1")
        dtype = _FLAG_TO_DTYPE[flag]
        payload = fh.read()
    expected = count * degree * dtype.itemsize
    if len(payload) != expected:
        raise BatchFormatError(
            f"{path}: payload is {len(payload)} bytes, expected {expected}"
        )
    data = np.frombuffer(payload, dtype=dtype).reshape(count, degree)
    if count and not np.all(np.isfinite(data)):
        raise BatchFormatError(f"{path}: non-finite coefficients rejected at ingestion")
    return data.copy()


def write_roots(path, roots: np.ndarray) -> None:
    """Write a (count, degree) complex root matrix as a CRTS file (float64 pairs)."""
    roots = np.asarray(roots, dtype=np.complex128)
    if roots.ndim != 2 or roots.shape[1] < 1:
        raise BatchFormatError("roots must be a 2-D (count, degree) array")
    count, degree = roots.shape
    with open(path, "wb") as fh:
        fh.write(_ROOTS_HEADER.pack(ROOTS_MAGIC, FORMAT_VERSION, degree, count))
        fh.write(np.ascontiguousarray(roots).tobytes())


class RootsStreamWriter:
    """Incremental CRTS writer: append chunks, then finalize the count.

    The header is written with a zero count up front and patched on
    close, so arbitrarily large root streams never need to be held in
    memory.
    """

    def __init__(self, path, degree: int):
        if degree < 1:
            raise BatchFormatError("degree must be >= 1")
        self._fh = open(path, "wb")
        self._degree = degree
        self._count = 0
        self._fh.write(_ROOTS_HEADER.pack(ROOTS_MAGIC, FORMAT_VERSION, degree, 0))

    def append(self, roots: np.ndarray) -> None:
        roots = np.asarray(roots, dtype=np.complex128)
        if roots.ndim != 2 or roots.shape[1] != self._degree:
            raise BatchFormatError(
                f"chunk shape {roots.shape} does not match degree {self._degree}"
            )
        self._fh.write(np.ascontiguousarray(roots).tobytes())
        self._count += roots.shape[0]

    def close(self) -> int:
        self._fh.seek(0)
        self._fh.write(_ROOTS_HEADER.pack(ROOTS_MAGIC, FORMAT_VERSION,
                                          self._degree, self._count))
        self._fh.close()
        return self._count

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()
        return False


def read_roots(path) -> np.ndarray:
    with open(path, "rb") as fh:
        header = fh.read(_ROOTS_HEADER.size)
        if len(header) < _ROOTS_HEADER.size:
            raise BatchFormatError(f"{path}: truncated header")
        magic, version, degree, count = _ROOTS_HEADER.unpack(header)
        if magic != ROOTS_MAGIC:
            raise BatchFormatError(f"{path}: bad magic {magic!r}")
        if version != FORMAT_VERSION:
            raise BatchFormatError(f"{path}: unsupported version {version}")
        if degree < 1:
            raise BatchFormatError(f"{path}: degree must be >= 1")
        payload = fh.read()
    expected = count * degree * 16
    if len(payload) != expected:
        raise BatchFormatError(
            f"{path}: payload is {len(payload)} bytes, expected {expected}"
        )
    return np.frombuffer(payload, dtype=np.complex128).reshape(count, degree).copy()


def format_complex(z: complex) -> str:
    """Locale-independent "re+imi" text form, e.g. "1.5-0.25i"."""
    sign = "+" if z.imag >= 0 else "-"
    return f"{z.real:.17g}{sign}{abs(z.imag):.17g}i"


def parse_complex(text: str) -> complex:
    text = text.strip()
    if not text.endswith("i"):
        raise BatchFormatError(f"bad complex literal {text!r}")
    body = text[:-1]
    split = -1
    for k in range(len(body) - 1, 0, -1):  # skip signs inside exponents
        if body[k] in "+-" and body[k - 1] not in "eE":
            split = k
            break
    if split <= 0:
        raise BatchFormatError(f"bad complex literal {text!r}")
    try:
        re_part = float(body[:split])
        im_part = float(body[split:])
    except ValueError as exc:
        raise BatchFormatError(f"bad complex literal {text!r}") from exc
    return complex(re_part, im_part)


def write_roots_text(path, roots: np.ndarray) -> None:
    """One polynomial per line, tab-separated "re+imi" roots."""
    roots = np.asarray(roots, dtype=np.complex128)
    with open(path, "w") as fh:
        for row in roots:
            fh.write("\t".join(format_complex(z) for z in row) + "\n")


def read_roots_text(path) -> np.ndarray:
    rows = []
    with open(path) as fh:
        for line in fh:
            line = line.rstrip("\n")
            if not line:
                continue
            rows.append([parse_complex(tok) for tok in line.split("\t")])
    if not rows:
        return np.zeros((0, 0), dtype=np.complex128)
    degree = len(rows[0])
    if any(len(r) != degree for r in rows):
        raise BatchFormatError(f"{path}: ragged root rows")
    return np.array(rows, dtype=np.complex128)
