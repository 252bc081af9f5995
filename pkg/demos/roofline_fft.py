"""
Placing the 2D FFT on a roofline
================================

A roofline caps attainable performance by either peak compute or
bandwidth x arithmetic intensity.  Kernels left of the ridge point are
memory-bound.  Counted ideally, the 2D FFT does 10 n^2 log2 n flops over
32 n^2 bytes.  On a real CPU the caches refetch data, so the measured
intensity is lower than that and falls left of the ridge.
"""

import csv
from importlib.resources import files

from nmfft import attained_perf, estimate_fft2d_time, fft2d_ai, load_spec, roofline_classify
from nmfft.report import emit_report

spec = load_spec()
p9 = spec.machine("Power9")
print(f"{p9.name}: peak {p9.peak_tflops:.4f} TFLOP/s, {p9.peak_bw:.0f} GB/s, ridge {p9.ridge:.2f} flop/byte")

# Measured points ship as CSV: kernel, arithmetic intensity, TFLOP/s.
rows = csv.DictReader(files("nmfft").joinpath("data/roofline_power9.csv").read_text().splitlines())
for r in rows:
    pt = roofline_classify(r["kernel"], float(r["ai"]), float(r["perf_tflops"]), p9)
    print(f"  {pt.kernel:14s} ai={pt.ai:7.2f}  {pt.bound:14s} "
          f"{pt.perf:.4f} of {pt.ceiling:.3f} TFLOP/s")

# The ideal intensity, for comparison, is already past the ridge:
print("ideal 2D FFT intensity:", [round(fft2d_ai(n), 2) for n in (4096, 8192, 16384)])

# The near-memory accelerator against its own roofline.  Its model counts
# GiB, so the plotted convention scales flop/byte by 2^30/1e9.
ap = spec.machine("AD9H7")
cfg = spec.nmc(spec.memory_configs[ap.name])
points = []
for n in (4096, 8192, 16384, 32768):
    t = estimate_fft2d_time(n, cfg).time_s
    points.append(roofline_classify(f"fft2d-{n}", fft2d_ai(n, "gib"), attained_perf(n, t), ap))
print(emit_report(points, "table", kind="roofline").decode())

# A deterministic SVG of the same points, ready to embed.
svg = emit_report(points, "svg", kind="roofline", machine=ap)
print(svg[:120].decode(), "...")
