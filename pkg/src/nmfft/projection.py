"""Speedup and Amdahl bottleneck projections."""

from __future__ import annotations

from collections.abc import Mapping

__all__ = ["amdahl_projection", "speedup"]


def speedup(t_baseline: float, t_target: float) -> float:
    if not (t_baseline > 0 and t_target > 0):
        raise ValueError("times must be positive")
    return t_baseline / t_target


def amdahl_projection(kernel_times: Mapping[str, float], accelerated: str,
                      new_time: float) -> tuple[float, float]:
    """Share (percent) of ``accelerated`` in the total, and the overall speedup
    when its time is replaced by ``new_time``."""
    if accelerated not in kernel_times:
        raise KeyError(f"unknown kernel {accelerated!r}")
    if any(not t > 0 for t in kernel_times.values()):
        raise ValueError("kernel times must be positive")
    if new_time < 0:
        raise ValueError("new_time must be non-negative")
    total = sum(kernel_times.values())
    old = kernel_times[accelerated]
    return 100.0 * old / total, total / (total - old + new_time)
