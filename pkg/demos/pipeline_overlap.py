"""
Watching compute hide behind memory traffic
===========================================

The closed-form estimate assumes transfers and FFTs overlap perfectly.  The
event-driven simulator checks that: blocks are read over shared channels,
their row FFTs run on a pool of accelerators, and results are written back.
With too few accelerators the run is compute-bound.  From the minimum count
onwards it settles on the bandwidth time, up to fill and drain at the ends of
each pass.
"""

from dataclasses import replace

from nmfft import estimate_fft2d_time, load_spec, min_accelerators, simulate_pipeline

spec = load_spec()
n = 4096

for name in ("1 DDR4 DIMM", "32 HBM2 channels"):
    cfg = spec.nmc(name)
    m = min_accelerators(n, cfg)
    bw_time = estimate_fft2d_time(n, cfg).bandwidth_time_s
    print(f"{name}: bandwidth time {bw_time * 1e3:.3f} ms, min accelerators {m}")
    for a in sorted({1, max(1, m // 4), max(1, m // 2), m, 2 * m}):
        sim = simulate_pipeline(n, replace(cfg, accelerators=a))
        print(f"  a={a:4d}  makespan {sim.time_s * 1e3:8.3f} ms  "
              f"x{sim.time_s / bw_time:6.3f} of bandwidth time  (engaged {sim.engaged})")

# Adding accelerators never makes the simulated run slower.  Greedy schedules
# can misbehave by a hair when one more slot reshuffles transfers, so the
# simulator is free to leave extra slots idle.  ``engaged`` reports how many
# it actually used.
