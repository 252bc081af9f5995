"""
Streaming a 2D FFT through a file with an on-the-fly transpose
===============================================================

A 2D FFT is two sweeps of 1D FFTs: one over rows, one over columns.  Column
access is hostile to DRAM (and to files), so the streamed algorithm only ever
reads *rows*.  Each pass reads a block of ``k`` rows, transforms them, and
writes the result back transposed as ``k x k`` tiles.  After two passes the
grid is back in row-major order and fully transformed.
"""

import tempfile
from pathlib import Path

import numpy as np

from nmfft import FileGrid, MemoryGrid, TileParams, fft2d_reference, fft2d_streamed, random_grid

n = 256
data = random_grid(n, seed=7)

# An in-memory run first.  ``k`` comes from the memory access width: a 256-bit
# access holds four complex64 samples, so tiles are 4 x 4.
tile = TileParams.from_access_width(256)
print("rows per block:", tile.k)

out, trace = fft2d_streamed(MemoryGrid(data), tile)
ref = fft2d_reference(MemoryGrid(data))
err = np.linalg.norm(out.data - ref.data) / np.linalg.norm(ref.data)
print(f"relative error vs row-column reference: {err:.2e}")

# The trace counts every byte that crossed the grid interface: one read and
# one write of the full grid per pass, i.e. 32 n^2 bytes in total.
print("bytes moved:", trace.total_bytes, "=", 32 * n * n)
print("peak staging buffer (bytes):", trace.peak_buffer_bytes)

# The same thing out of core.  FileGrid keeps nothing resident; rows and tiles
# are read and written with positional I/O, so the grid can be larger than RAM.
with tempfile.TemporaryDirectory() as tmp:
    src = FileGrid.create(Path(tmp) / "grid.c64", n, data, descriptor=True)
    result, ftrace = fft2d_streamed(src, tile, threads=2)
    print("file result:", result.path.name, "identical:", np.array_equal(result.to_array(), out.data))
    result.close()
    src.close()

# The inverse brings the original grid back (1/n^2 normalization on inverse).
back, _ = fft2d_streamed(out, tile, direction="inverse")
print("round trip max error:", float(np.abs(back.data - data).max()))
