"""
Is a kernel memory- or compute-bound? Ask the counters
======================================================

POWER9 exposes a CPI stack: run cycles split into completion, stall and
no-slot cycles, and stalls split further into LSU, execution and so on.
Expressed as a share of run cycles, the split says where time goes.  A large
load/store stall share marks a memory-bound kernel; a high completion share
marks a compute-bound one.
"""

from importlib.resources import files

from nmfft import classify_boundness, cpi_breakdown, parse_counter_dump
from nmfft.cpi import CMPL, STALL, STALL_EXEC, STALL_LSU

# A counter dump is plain CSV: kernel,counter,value.
text = files("nmfft").joinpath("data/idg_counters.csv").read_text()
print(text.splitlines()[0], "...")

samples = parse_counter_dump(text)
print(f"{'kernel':14s} {'CMPL':>6s} {'STALL':>6s} {'LSU':>6s} {'EXEC':>6s}  class")
for s in samples:
    pct = cpi_breakdown(s)
    print(f"{s.kernel:14s} {pct[CMPL]:6.1f} {pct[STALL]:6.1f} {pct[STALL_LSU]:6.1f} "
          f"{pct[STALL_EXEC]:6.1f}  {classify_boundness(pct)}")

# The FFT's LSU share grows with grid size as the working set falls out of
# cache; the gridder kernels stay arithmetic-heavy.
