"""Radix-2 complex FFT kernels and a brute-force DFT oracle.

Conventions follow FFTW: the forward transform is unnormalized and the
inverse carries the 1/n factor.  Inputs and outputs are complex64; twiddles
and intermediate butterflies are evaluated in double precision.
"""

from __future__ import annotations

from functools import lru_cache
from typing import Literal

import numpy as np

Direction = Literal["forward", "inverse"]

__all__ = [
    "FFTDomainError",
    "FFTLengthError",
    "dft_oracle",
    "fft1d",
    "flop_count_fft",
    "is_power_of_two",
]


class FFTLengthError(ValueError):
    """Transform length is not supported (not a power of two, or < 1)."""


class FFTDomainError(ValueError):
    """Input contains NaN or Inf."""


def is_power_of_two(n: int) -> bool:
    return isinstance(n, (int, np.integer)) and n >= 1 and (n & (n - 1)) == 0


def _sign(direction: str) -> float:
    if direction in ("forward", "fwd"):
        return -1.0
    if direction in ("inverse", "inv"):
        return 1.0
    raise ValueError(f"unknown direction {direction!r}")


def _check_finite(x: np.ndarray) -> None:
    if not np.all(np.isfinite(x)):
        raise FFTDomainError("input contains non-finite values")


@lru_cache(maxsize=None)
def _bitrev(n: int) -> np.ndarray:
    bits = n.bit_length() - 1
    idx = np.arange(n)
    rev = np.zeros(n, dtype=np.intp)
    for b in range(bits):
        rev |= ((idx >> b) & 1) << (bits - 1 - b)
    rev.setflags(write=False)
    return rev


@lru_cache(maxsize=None)
def _twiddles(n: int, sign: float) -> tuple[np.ndarray, ...]:
    # one table per stage: exp(sign*2*pi*i*j/m) for j < m/2, m = 2, 4, ..., n
    tables = []
    m = 2
    while m <= n:
        w = np.exp(sign * 2j * np.pi * np.arange(m // 2) / m)
        w.setflags(write=False)
        tables.append(w)
        m <<= 1
    return tuple(tables)


def fft1d(x, direction: Direction = "forward") -> np.ndarray:
    """1D FFT along the last axis.

    ``x`` may be a vector or a stack of rows (any leading shape); every row is
    transformed independently.  Iterative decimation-in-time: bit-reversal
    permutation followed by log2(n) butterfly stages.
    """
    a = np.asarray(x)
    if a.ndim == 0:
        raise FFTLengthError("fft1d needs at least one axis")
    n = a.shape[-1]
    if not is_power_of_two(n):
        raise FFTLengthError(f"length {n} is not a power of two")
    _check_finite(a)
    sign = _sign(direction)

    lead = a.shape[:-1]
    work = a.reshape(-1, n).astype(np.complex128)[:, _bitrev(n)]
    for w in _twiddles(n, sign):
        half = w.shape[0]
        v = work.reshape(work.shape[0], -1, 2, half)
        top = v[:, :, 0, :]
        bot = v[:, :, 1, :] * w
        v[:, :, 1, :] = top - bot
        v[:, :, 0, :] = top + bot
    if sign > 0:
        work /= n
    return work.reshape(*lead, n).astype(np.complex64)


def dft_oracle(x, direction: Direction = "forward") -> np.ndarray:
    """Direct O(n^2) DFT with double-precision accumulation, any length >= 1."""
    a = np.asarray(x, dtype=np.complex128)
    if a.ndim != 1:
        raise ValueError("dft_oracle takes a single vector")
    n = a.shape[0]
    if n < 1:
        raise FFTLengthError("length must be >= 1")
    _check_finite(a)
    sign = _sign(direction)
    k = np.arange(n)
    out = np.empty(n, dtype=np.complex128)
    # row chunks cap the kernel matrix at 2**20 entries
    step = max(1, (1 << 20) // n)
    for r0 in range(0, n, step):
        # reduce kn mod n before scaling so large n keeps the phase exact
        phase = np.outer(k[r0:r0 + step], k) % n
        out[r0:r0 + step] = np.exp(sign * 2j * np.pi * phase / n) @ a
    if sign > 0:
        out /= n
    return out


def flop_count_fft(n: int) -> float:
    """Nominal flop count of one complex FFT of ``n`` points: 5 n log2 n."""
    if not is_power_of_two(n):
        raise FFTLengthError(f"length {n} is not a power of two")
    return 5.0 * n * (n.bit_length() - 1)
