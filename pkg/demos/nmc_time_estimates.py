"""
How long does a near-memory 2D FFT take?
=========================================

When the FFT engines sit next to memory, the streamed 2D FFT is limited by
bandwidth, not by arithmetic.  The time is the bytes moved divided by the
aggregate bandwidth, provided enough accelerators keep up with the data.
"""

from nmfft import estimate_fft2d_time, load_spec, min_accelerators
from nmfft.report import emit_report, format_seconds

spec = load_spec()
sizes = [4096, 8192, 16384, 32768]

# The bundled spec lists four memory configurations: one or two DDR4 DIMMs,
# and one or all 32 channels of an HBM2 stack.
for cfg in spec.nmc_configs:
    print(f"{cfg.name:18s} {cfg.aggregate_bw:6.0f} GiB/s")

# Two passes each read and write the whole grid of complex64 samples, so
# 32 n^2 bytes travel.  Times are shown to two significant digits.
print()
print("n      " + "  ".join(f"{c.name:>16s}" for c in spec.nmc_configs))
for n in sizes:
    cells = [format_seconds(estimate_fft2d_time(n, c).time_s) for c in spec.nmc_configs]
    print(f"{n:<6d} " + "  ".join(f"{x:>16s}" for x in cells))

# How many engines does it take before compute hides behind the traffic?
print()
for cfg in spec.nmc_configs:
    print(cfg.name, [min_accelerators(n, cfg) for n in sizes])

# The same table as CSV, e.g. for a spreadsheet.
reports = [estimate_fft2d_time(n, c) for n in sizes for c in spec.nmc_configs]
print(emit_report(reports, "csv", kind="estimates").decode()[:300])
