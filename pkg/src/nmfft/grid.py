"""N x N complex64 grids with in-memory and file-backed storage.

File layout: raw little-endian float32 pairs (re, im), row-major, no header.
The side length travels out of band; :func:`write_descriptor` drops a small
``key=value`` sidecar next to generated grids so tools can recover it.
"""

from __future__ import annotations

import os
import threading
from pathlib import Path

import numpy as np

from .fft import FFTLengthError, is_power_of_two

SAMPLE_BYTES = 8
FILE_DTYPE = np.dtype("<c8")
DESCRIPTOR_SUFFIX = ".meta"

__all__ = [
    "ComplexGrid",
    "FileGrid",
    "GridError",
    "MemoryGrid",
    "SAMPLE_BYTES",
    "random_grid",
    "read_descriptor",
    "write_descriptor",
]


class GridError(ValueError):
    """Bad grid geometry, out-of-range block access or storage failure."""


def _check_side(n: int) -> int:
    if not is_power_of_two(n):
        raise FFTLengthError(f"grid side {n} is not a power of two")
    return int(n)


class ComplexGrid:
    """Row-major complex64 grid addressed in row blocks and square tiles.

    Subclasses provide the storage; every access is bounds-checked and counted
    in ``bytes_read`` / ``bytes_written``.
    """

    backend = "abstract"

    def __init__(self, n: int):
        self.n = _check_side(n)
        self.bytes_read = 0
        self.bytes_written = 0
        self._count_lock = threading.Lock()

    @property
    def nbytes(self) -> int:
        return SAMPLE_BYTES * self.n * self.n

    def _check_region(self, row: int, col: int, nrows: int, ncols: int) -> None:
        if nrows < 1 or ncols < 1:
            raise GridError("empty region")
        if row < 0 or col < 0 or row + nrows > self.n or col + ncols > self.n:
            raise GridError(
                f"region rows {row}:{row + nrows} cols {col}:{col + ncols} "
                f"outside {self.n}x{self.n} grid"
            )

    def _count(self, nread: int = 0, nwritten: int = 0) -> None:
        with self._count_lock:
            self.bytes_read += nread
            self.bytes_written += nwritten

    def read_rows(self, row: int, nrows: int, out: np.ndarray | None = None) -> np.ndarray:
        """Read ``nrows`` full rows starting at ``row`` into a (nrows, n) array."""
        self._check_region(row, 0, nrows, self.n)
        if out is None:
            out = np.empty((nrows, self.n), dtype=np.complex64)
        self._read_rows(row, nrows, out)
        self._count(nread=out.nbytes)
        return out

    def write_rows(self, row: int, data: np.ndarray) -> None:
        data = np.ascontiguousarray(data, dtype=np.complex64)
        self._check_region(row, 0, data.shape[0], self.n)
        if data.shape[1] != self.n:
            raise GridError(f"row length {data.shape[1]} != {self.n}")
        self._write_tile(row, 0, data)
        self._count(nwritten=data.nbytes)

    def write_tile(self, row: int, col: int, tile: np.ndarray) -> None:
        """Write a 2D tile with its top-left corner at (row, col)."""
        tile = np.ascontiguousarray(tile, dtype=np.complex64)
        self._check_region(row, col, tile.shape[0], tile.shape[1])
        self._write_tile(row, col, tile)
        self._count(nwritten=tile.nbytes)

    def write_block_transposed(self, col: int, block: np.ndarray, k: int) -> None:
        """Scatter a (k, n) row block into columns ``col:col+k`` as k x k tiles."""
        if block.shape != (k, self.n):
            raise GridError(f"block shape {block.shape} != ({k}, {self.n})")
        self._check_region(0, col, self.n, k)
        for r0 in range(0, self.n, k):
            self._write_tile(r0, col, block[:, r0:r0 + k].T)
        self._count(nwritten=block.nbytes)

    def to_array(self) -> np.ndarray:
        out = np.empty((self.n, self.n), dtype=np.complex64)
        self._read_rows(0, self.n, out)
        return out

    def reset_counters(self) -> None:
        self.bytes_read = self.bytes_written = 0

    def _read_rows(self, row, nrows, out):  # pragma: no cover - abstract
        raise NotImplementedError

    def _write_tile(self, row, col, tile):  # pragma: no cover - abstract
        raise NotImplementedError


class MemoryGrid(ComplexGrid):
    backend = "mem"

    def __init__(self, data: np.ndarray):
        data = np.asarray(data)
        if data.ndim != 2 or data.shape[0] != data.shape[1]:
            raise GridError(f"grid must be square, got shape {data.shape}")
        super().__init__(data.shape[0])
        self.data = np.ascontiguousarray(data, dtype=np.complex64)

    @classmethod
    def empty(cls, n: int) -> "MemoryGrid":
        return cls(np.zeros((_check_side(n), n), dtype=np.complex64))

    def _read_rows(self, row, nrows, out):
        out[...] = self.data[row:row + nrows]

    def _write_tile(self, row, col, tile):
        self.data[row:row + tile.shape[0], col:col + tile.shape[1]] = tile

    def write_block_transposed(self, col: int, block: np.ndarray, k: int) -> None:
        if block.shape != (k, self.n):
            raise GridError(f"block shape {block.shape} != ({k}, {self.n})")
        self._check_region(0, col, self.n, k)
        # all n/k tiles of the stripe in one vectorized scatter
        self.data[:, col:col + k] = block.T
        self._count(nwritten=block.nbytes)

    def to_array(self) -> np.ndarray:
        return self.data.copy()


class FileGrid(ComplexGrid):
    """Grid stored in a raw c64le file, accessed with positional reads/writes.

    Positional I/O keeps concurrent block pipelines safe on one descriptor.
    Call :meth:`close` (or use as a context manager) when done.
    """

    backend = "file"

    def __init__(self, path: str | os.PathLike, n: int, mode: str = "r+"):
        super().__init__(n)
        self.path = Path(path)
        flags = os.O_RDWR if mode == "r+" else os.O_RDONLY
        try:
            self._fd = os.open(self.path, flags)
        except OSError as exc:
            raise GridError(f"cannot open grid file {self.path}: {exc}") from exc
        size = os.fstat(self._fd).st_size
        if size != self.nbytes:
            os.close(self._fd)
            raise GridError(
                f"{self.path} holds {size} bytes, expected {self.nbytes} for n={n}"
            )

    @classmethod
    def create(cls, path: str | os.PathLike, n: int, data: np.ndarray | None = None,
               descriptor: bool = False) -> "FileGrid":
        """Create (or truncate) a grid file of exactly 8 n^2 bytes."""
        n = _check_side(n)
        path = Path(path)
        with open(path, "wb") as fh:
            if data is None:
                fh.truncate(SAMPLE_BYTES * n * n)
            else:
                arr = np.asarray(data)
                if arr.shape != (n, n):
                    raise GridError(f"data shape {arr.shape} != ({n}, {n})")
                fh.write(np.ascontiguousarray(arr, dtype=FILE_DTYPE).tobytes())
        if descriptor:
            write_descriptor(path, n)
        return cls(path, n)

    @classmethod
    def open(cls, path: str | os.PathLike, n: int | None = None) -> "FileGrid":
        """Open an existing grid; ``n`` defaults to the sidecar descriptor."""
        if n is None:
            n = read_descriptor(path)["n"]
        return cls(path, n)

    def _read_rows(self, row, nrows, out):
        nb = nrows * self.n * SAMPLE_BYTES
        buf = os.pread(self._fd, nb, row * self.n * SAMPLE_BYTES)
        if len(buf) != nb:
            raise GridError(f"short read at row {row} of {self.path}")
        out[...] = np.frombuffer(buf, dtype=FILE_DTYPE).reshape(nrows, self.n)

    def _write_tile(self, row, col, tile):
        nrows, ncols = tile.shape
        if ncols == self.n:
            self._pwrite(tile.astype(FILE_DTYPE, copy=False).tobytes(),
                         row * self.n * SAMPLE_BYTES)
            return
        payload = memoryview(tile.astype(FILE_DTYPE, copy=False).tobytes())
        step = ncols * SAMPLE_BYTES
        offset = (row * self.n + col) * SAMPLE_BYTES
        stride = self.n * SAMPLE_BYTES
        for i in range(nrows):
            self._pwrite(payload[i * step:(i + 1) * step], offset + i * stride)

    def write_block_transposed(self, col: int, block: np.ndarray, k: int) -> None:
        if block.shape != (k, self.n):
            raise GridError(f"block shape {block.shape} != ({k}, {self.n})")
        self._check_region(0, col, self.n, k)
        fd, n = self._fd, self.n
        step = k * SAMPLE_BYTES
        stride = n * SAMPLE_BYTES
        offset = col * SAMPLE_BYTES
        for r0 in range(0, n, k):
            # one k x k tile staged at a time
            tile = memoryview(block[:, r0:r0 + k].T.astype(FILE_DTYPE).tobytes())
            for i in range(k):
                if os.pwrite(fd, tile[i * step:(i + 1) * step], offset) != step:
                    raise GridError(f"short write at offset {offset} of {self.path}")
                offset += stride
        self._count(nwritten=block.nbytes)

    def _pwrite(self, payload: bytes, offset: int) -> None:
        written = os.pwrite(self._fd, payload, offset)
        if written != len(payload):
            raise GridError(f"short write at offset {offset} of {self.path}")

    def close(self) -> None:
        if self._fd >= 0:
            os.close(self._fd)
            self._fd = -1

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()

    def __del__(self):
        try:
            self.close()
        except Exception:
            pass


def write_descriptor(path: str | os.PathLike, n: int) -> Path:
    meta = Path(str(path) + DESCRIPTOR_SUFFIX)
    meta.write_text(f"n={n}\nelement=c64le\n")
    return meta


def read_descriptor(path: str | os.PathLike) -> dict:
    meta = Path(str(path) + DESCRIPTOR_SUFFIX)
    try:
        text = meta.read_text()
    except OSError as exc:
        raise GridError(f"no descriptor for {path}; pass the side length explicitly") from exc
    fields = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise GridError(f"{meta}:{lineno}: expected key=value")
        fields[key.strip()] = value.strip()
    if fields.get("element") != "c64le":
        raise GridError(f"{meta}: unsupported element {fields.get('element')!r}")
    try:
        fields["n"] = _check_side(int(fields["n"]))
    except (KeyError, ValueError) as exc:
        raise GridError(f"{meta}: bad or missing n") from exc
    return fields


def random_grid(n: int, seed: int | None = None) -> np.ndarray:
    """Complex64 grid with standard-normal real and imaginary parts."""
    rng = np.random.default_rng(seed)
    n = _check_side(n)
    return (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))).astype(np.complex64)
