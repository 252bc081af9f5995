"""Streaming 2D FFT: row FFTs with the transpose folded into write-back.

Each pass reads ``k`` consecutive rows, transforms them, and writes the
result back as ``n/k`` tiles of ``k x k`` so that the destination holds the
transpose.  Two passes give the full 2D transform in the input orientation.
In file-backed mode the passes ping-pong between the source, a scratch file
and the destination, so no full-size copy of the grid is ever held in RAM.
"""

from __future__ import annotations

import os
import tempfile
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .fft import Direction, fft1d
from .grid import SAMPLE_BYTES, ComplexGrid, FileGrid, GridError, MemoryGrid

__all__ = [
    "PassTrace",
    "StreamTrace",
    "TileParams",
    "TilingError",
    "fft2d_reference",
    "fft2d_streamed",
    "transpose_blocked",
]


class TilingError(ValueError):
    """Block size incompatible with the access width or the grid side."""


@dataclass(frozen=True)
class TileParams:
    """Rows per block, derived from how many samples fit in one memory access.

    The default is 4 samples of 8 bytes in a 256-bit (32 byte) access.
    """

    k: int = 4
    access_width_bytes: int | None = None
    sample_bytes: int = SAMPLE_BYTES

    def __post_init__(self):
        if self.access_width_bytes is None:
            object.__setattr__(self, "access_width_bytes", self.k * self.sample_bytes)
        if self.k < 1 or self.sample_bytes < 1:
            raise TilingError("k and sample_bytes must be positive")
        if self.access_width_bytes % self.sample_bytes:
            raise TilingError(
                f"access width {self.access_width_bytes} B is not a multiple of "
                f"{self.sample_bytes} B samples"
            )
        if self.access_width_bytes // self.sample_bytes != self.k:
            raise TilingError(
                f"k={self.k} but {self.access_width_bytes} B access holds "
                f"{self.access_width_bytes // self.sample_bytes} samples"
            )

    @classmethod
    def from_access_width(cls, access_width_bits: int, sample_bytes: int = SAMPLE_BYTES) -> "TileParams":
        if access_width_bits % 8:
            raise TilingError("access width must be a whole number of bytes")
        width = access_width_bits // 8
        if width % sample_bytes:
            raise TilingError(f"{width} B access does not hold whole {sample_bytes} B samples")
        return cls(k=width // sample_bytes, access_width_bytes=width, sample_bytes=sample_bytes)

    def check(self, n: int) -> None:
        if n % self.k:
            raise TilingError(f"k={self.k} does not divide n={n}")


@dataclass
class PassTrace:
    bytes_read: int = 0
    bytes_written: int = 0
    blocks: int = 0
    # orientation of the data in the destination relative to the input
    transposed: bool = False


@dataclass
class StreamTrace:
    n: int
    k: int
    passes: list[PassTrace] = field(default_factory=list)
    peak_buffer_bytes: int = 0

    @property
    def total_bytes(self) -> int:
        return sum(p.bytes_read + p.bytes_written for p in self.passes)

    @property
    def blocks(self) -> int:
        return sum(p.blocks for p in self.passes)

    @property
    def transposed(self) -> bool:
        """Net orientation of the output (False means same as the input)."""
        flip = False
        for p in self.passes:
            flip ^= p.transposed
        return flip


class _BufferMeter:
    """Tracks live staging-buffer bytes across block pipelines."""

    def __init__(self):
        self._lock = threading.Lock()
        self.live = 0
        self.peak = 0

    def acquire(self, nbytes: int) -> None:
        with self._lock:
            self.live += nbytes
            self.peak = max(self.peak, self.live)

    def release(self, nbytes: int) -> None:
        with self._lock:
            self.live -= nbytes


def _as_grid(g) -> ComplexGrid:
    if isinstance(g, ComplexGrid):
        return g
    return MemoryGrid(np.asarray(g))


def fft2d_reference(g, direction: Direction = "forward") -> MemoryGrid:
    """Plain row-column 2D FFT with an explicit in-memory transpose."""
    src = _as_grid(g)
    if not isinstance(src, MemoryGrid):
        raise GridError("fft2d_reference works on in-memory grids only")
    a = fft1d(src.data, direction)
    a = np.ascontiguousarray(a.T)
    a = fft1d(a, direction)
    return MemoryGrid(np.ascontiguousarray(a.T))


def _stream_pass(src: ComplexGrid, dst: ComplexGrid, t: TileParams, direction,
                 threads: int, meter: _BufferMeter, transform: bool = True) -> PassTrace:
    n, k = src.n, t.k
    nblocks = n // k
    read0, written0 = src.bytes_read, dst.bytes_written

    def run(worker: int) -> None:
        # round-robin block ownership; every block writes a disjoint column stripe
        block_bytes = k * n * SAMPLE_BYTES
        meter.acquire(block_bytes)
        buf = np.empty((k, n), dtype=np.complex64)
        try:
            for b in range(worker, nblocks, threads):
                r0 = b * k
                src.read_rows(r0, k, out=buf)
                if transform:
                    buf[...] = fft1d(buf, direction)
                meter.acquire(k * k * SAMPLE_BYTES)
                try:
                    dst.write_block_transposed(r0, buf, k)
                finally:
                    meter.release(k * k * SAMPLE_BYTES)
        finally:
            meter.release(block_bytes)

    if threads == 1:
        run(0)
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            for fut in [pool.submit(run, w) for w in range(threads)]:
                fut.result()
    return PassTrace(
        bytes_read=src.bytes_read - read0,
        bytes_written=dst.bytes_written - written0,
        blocks=nblocks,
        transposed=True,
    )


def _scratch_like(g: ComplexGrid, tag: str) -> ComplexGrid:
    if isinstance(g, FileGrid):
        fd, name = tempfile.mkstemp(prefix=f"{g.path.stem}.{tag}.", suffix=".c64", dir=g.path.parent)
        os.close(fd)
        return FileGrid.create(name, g.n)
    return MemoryGrid.empty(g.n)


def fft2d_streamed(g, t: TileParams | None = None, direction: Direction = "forward",
                   trace: bool = True, out: ComplexGrid | str | os.PathLike | None = None,
                   threads: int = 1):
    """Two-pass streamed 2D FFT.

    Returns ``(result_grid, trace)``; ``trace`` is None when disabled.  For a
    file-backed input the result is a new file (``out`` path, or a sibling of
    the input named ``<stem>.<direction>.c64``); the input is left untouched.
    """
    src = _as_grid(g)
    t = t or TileParams()
    t.check(src.n)
    if threads < 1:
        raise ValueError("threads must be >= 1")

    if isinstance(out, ComplexGrid):
        dst = out
        if dst.n != src.n:
            raise GridError(f"output side {dst.n} != {src.n}")
    elif isinstance(src, FileGrid):
        path = Path(out) if out is not None else src.path.with_name(f"{src.path.stem}.{direction}.c64")
        if path.resolve() == src.path.resolve():
            raise GridError("output would overwrite the input grid")
        dst = FileGrid.create(path, src.n, descriptor=True)
    else:
        dst = MemoryGrid.empty(src.n)

    meter = _BufferMeter()
    scratch = _scratch_like(src, "pass1")
    try:
        p1 = _stream_pass(src, scratch, t, direction, threads, meter)
        p2 = _stream_pass(scratch, dst, t, direction, threads, meter)
    finally:
        if isinstance(scratch, FileGrid):
            scratch.close()
            scratch.path.unlink(missing_ok=True)
    if not trace:
        return dst, None
    return dst, StreamTrace(n=src.n, k=t.k, passes=[p1, p2], peak_buffer_bytes=meter.peak)


def transpose_blocked(g, t: TileParams | None = None, out: ComplexGrid | None = None) -> ComplexGrid:
    """Full transpose through k x k tile buffers: out[i, j] = in[j, i]."""
    src = _as_grid(g)
    t = t or TileParams()
    t.check(src.n)
    if out is None:
        out = _scratch_like(src, "T") if isinstance(src, FileGrid) else MemoryGrid.empty(src.n)
    _stream_pass(src, out, t, "forward", 1, _BufferMeter(), transform=False)
    return out
