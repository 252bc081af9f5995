"""Roofline ceilings, arithmetic intensity of the 2D FFT, and bound classification."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

from .fft import FFTLengthError, is_power_of_two
from .grid import SAMPLE_BYTES
from .nmc import GIB

__all__ = [
    "MachineSpec",
    "MachineSpecError",
    "RooflinePoint",
    "attained_perf",
    "fft2d_ai",
    "peak_flops_cpu",
    "roofline_classify",
]

Bound = Literal["memory", "compute"]


class MachineSpecError(ValueError):
    pass


@dataclass(frozen=True)
class MachineSpec:
    """Platform ceilings.

    ``peak_bw`` is in decimal GB/s.  CPU peaks follow
    freq_ghz * ops_per_core * cores * sockets / 1000 (TFLOP/s); accelerators
    that do not fit that formula set ``peak_flops_override`` in TFLOP/s.
    """

    name: str
    peak_bw: float
    freq_ghz: float | None = None
    ops_per_core: int | None = None
    cores: int | None = None
    sockets: int | None = None
    peak_flops_override: float | None = None

    def __post_init__(self):
        if not (self.peak_bw and self.peak_bw > 0):
            raise MachineSpecError(f"{self.name}: peak_bw must be positive")
        if self.peak_flops_override is not None:
            if not self.peak_flops_override > 0:
                raise MachineSpecError(f"{self.name}: peak_flops_override must be positive")
        else:
            peak_flops_cpu(self)  # validates the formula fields

    @property
    def peak_tflops(self) -> float:
        if self.peak_flops_override is not None:
            return self.peak_flops_override
        return peak_flops_cpu(self)

    @property
    def peak_bw_tbytes(self) -> float:
        return self.peak_bw / 1000.0

    @property
    def ridge(self) -> float:
        """Arithmetic intensity (flop/byte) where the two ceilings meet."""
        return self.peak_tflops / self.peak_bw_tbytes

    def ceiling(self, ai: float) -> float:
        """Attainable TFLOP/s at intensity ``ai``."""
        return min(self.peak_tflops, ai * self.peak_bw_tbytes)


def peak_flops_cpu(spec: MachineSpec) -> float:
    fields = ("freq_ghz", "ops_per_core", "cores", "sockets")
    missing = [f for f in fields if getattr(spec, f) is None]
    if missing:
        raise MachineSpecError(f"{spec.name}: missing {', '.join(missing)}")
    for f in fields:
        if not getattr(spec, f) > 0:
            raise MachineSpecError(f"{spec.name}: {f} must be positive")
    return spec.freq_ghz * spec.ops_per_core * spec.cores * spec.sockets / 1000.0


@dataclass(frozen=True)
class RooflinePoint:
    kernel: str
    ai: float
    perf: float  # TFLOP/s
    bound: Bound
    ceiling: float  # attainable TFLOP/s at this ai


def roofline_classify(kernel: str, ai: float, perf: float, spec: MachineSpec) -> RooflinePoint:
    """Memory-bound left of the ridge, compute-bound at or right of it."""
    if not ai > 0:
        raise ValueError(f"arithmetic intensity must be positive, got {ai}")
    if perf < 0:
        raise ValueError(f"performance must be non-negative, got {perf}")
    bound: Bound = "memory" if ai < spec.ridge else "compute"
    return RooflinePoint(kernel, ai, perf, bound, spec.ceiling(ai))


def fft2d_ai(n: int, convention: Literal["canonical", "gib"] = "canonical") -> float:
    """Arithmetic intensity of a 2D FFT: 10 n^2 log2 n flops over 8 n^2 bytes.

    ``"gib"`` multiplies by 2**30/1e9: flops per 1e9 over bytes per GiB, the
    unit mix under which the Access Processor FFT points are usually plotted.
    """
    if not is_power_of_two(n):
        raise FFTLengthError(f"grid side {n} is not a power of two")
    ai = 10.0 * math.log2(n) / SAMPLE_BYTES
    if convention == "canonical":
        return ai
    if convention == "gib":
        return ai * GIB / 1e9
    raise ValueError(f"unknown convention {convention!r}")


def attained_perf(n: int, time_s: float) -> float:
    """TFLOP/s achieved by a 2D FFT of side ``n`` finishing in ``time_s``."""
    if not is_power_of_two(n):
        raise FFTLengthError(f"grid side {n} is not a power of two")
    if not time_s > 0:
        raise ValueError(f"time must be positive, got {time_s}")
    return 10.0 * n * n * math.log2(n) / time_s / 1e12
