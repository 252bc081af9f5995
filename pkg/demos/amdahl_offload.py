"""
What does offloading the FFT buy the whole imaging pipeline?
============================================================

Speeding up one kernel only helps in proportion to its share of the run.
Here a gridding / FFT / degridding workload has the FFT at 47% of the time.
We offload it to a near-memory accelerator and apply Amdahl accounting.
"""

import math

from nmfft import amdahl_projection, estimate_fft2d_time, load_spec, speedup

n = 16384
flops = 10 * n * n * math.log2(n)

# Host FFT at ~10 GFLOP/s versus the HBM2-attached accelerator model.
t_host = flops / 0.00998e12
t_nmc = estimate_fft2d_time(n, load_spec().nmc("32 HBM2 channels")).time_s
print(f"host {t_host:.2f} s, near-memory {t_nmc:.3f} s, FFT speedup {speedup(t_host, t_nmc):.0f}x")

# Illustrative kernel times (seconds) with the FFT at 47% of the total.
times = {"gridder": 31.8, "fft": 47.0, "degridder": 21.2}
share, overall = amdahl_projection(times, "fft", times["fft"] / speedup(t_host, t_nmc))
print(f"FFT share {share:.0f}% -> overall speedup {overall:.2f}x")

# Even an infinitely fast FFT cannot beat 1 / (1 - 0.47).
_, limit = amdahl_projection(times, "fft", 0.0)
print(f"upper bound {limit:.3f}x")
