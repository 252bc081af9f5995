"""Streamed 2D FFT with blocked on-the-fly transpose, plus performance models
for near-memory FFT offload: bandwidth-bound time estimates, transfer/compute
pipelining, rooflines, and POWER9 CPI breakdowns."""

__version__ = "0.1.0"

from .cpi import PmuSample, Thresholds, classify_boundness, cpi_breakdown
from .fft import dft_oracle, fft1d, flop_count_fft
from .grid import ComplexGrid, FileGrid, MemoryGrid, random_grid
from .ingest import load_spec, parse_counter_dump
from .nmc import (
    NmcConfig,
    estimate_fft2d_time,
    min_accelerators,
    simulate_pipeline,
)
from .projection import amdahl_projection, speedup
from .report import emit_report
from .roofline import (
    MachineSpec,
    attained_perf,
    fft2d_ai,
    peak_flops_cpu,
    roofline_classify,
)
from .stream2d import (
    StreamTrace,
    TileParams,
    fft2d_reference,
    fft2d_streamed,
    transpose_blocked,
)
