"""Command-line entry point: ``nmfft <command> [options]``."""

from __future__ import annotations

import argparse
import sys
import tempfile
from dataclasses import replace
from importlib import resources
from pathlib import Path

import numpy as np

from . import __version__
from .cpi import Thresholds, classify_boundness, cpi_breakdown
from .fft import is_power_of_two
from .grid import FileGrid, MemoryGrid, random_grid, write_descriptor
from .ingest import SPEC_ENV, load_spec, parse_counter_dump
from .nmc import estimate_fft2d_time, simulate_pipeline
from .projection import amdahl_projection
from .report import CpiRow, emit_report, format_seconds, round_sig
from .roofline import attained_perf, fft2d_ai, roofline_classify
from .stream2d import TileParams, fft2d_reference, fft2d_streamed

DEFAULT_SIZES = "4k,8k,16k,32k"
VERIFY_TOL = 1e-4


def parse_size(text: str) -> int:
    """'4k' -> 4096, '64' -> 64; the result must be a power of two."""
    t = text.strip().lower()
    try:
        n = int(t[:-1]) * 1024 if t.endswith("k") else int(t)
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad size {text!r}") from None
    if not is_power_of_two(n):
        raise argparse.ArgumentTypeError(f"size {text!r} is not a power of two")
    return n


def parse_sizes(text: str) -> list[int]:
    return [parse_size(s) for s in text.split(",") if s.strip()]


def _emit(data: bytes, out: str | None) -> None:
    if out:
        Path(out).write_bytes(data)
    else:
        sys.stdout.write(data.decode())


def _bundled(name: str) -> Path:
    return Path(str(resources.files("nmfft") / "data" / name))


def _read_input(path: str) -> str:
    p = Path(path)
    if not p.exists() and _bundled(path).exists():
        p = _bundled(path)
    return p.read_text(encoding="utf-8")


# -- commands -----------------------------------------------------------------

def cmd_fft2d(args) -> int:
    direction = "forward" if args.direction == "fwd" else "inverse"
    tile = TileParams(k=args.k)
    workdir = None
    if args.input:
        grid = FileGrid.open(args.input, args.size)
        if args.backend == "mem":
            grid = MemoryGrid(grid.to_array())
    else:
        if args.size is None:
            raise ValueError("--size is required without --in")
        data = random_grid(args.size, args.seed)
        if args.backend == "file":
            workdir = tempfile.TemporaryDirectory(prefix="nmfft-")
            grid = FileGrid.create(Path(workdir.name) / "input.c64", args.size, data, descriptor=True)
        else:
            grid = MemoryGrid(data)
    try:
        if args.backend == "file":
            out = args.out or (Path(workdir.name) / "output.c64" if workdir else None)
            result, trace = fft2d_streamed(grid, tile, direction, out=out, threads=args.threads)
        else:
            result, trace = fft2d_streamed(grid, tile, direction, threads=args.threads)
            if args.out:
                FileGrid.create(args.out, result.n, result.data, descriptor=True).close()
        print(f"n={trace.n} k={trace.k} backend={args.backend} direction={direction} "
              f"blocks={trace.blocks} bytes={trace.total_bytes} "
              f"peak_buffer={trace.peak_buffer_bytes}")
        status = 0
        if args.verify:
            ref = fft2d_reference(MemoryGrid(grid.to_array()), direction).data
            got = result.to_array()
            scale = np.abs(ref).max() or 1.0
            err = float(np.abs(got - ref).max() / scale)
            ok = err <= VERIFY_TOL
            print(f"max rel err {err:.3e} {'<=' if ok else '>'} {VERIFY_TOL:.0e}")
            status = 0 if ok else 1
        return status
    finally:
        for g in (grid, locals().get("result")):
            if isinstance(g, FileGrid):
                g.close()
        if workdir:
            workdir.cleanup()


def _configs(spec, names: str):
    if names == "all":
        return list(spec.nmc_configs)
    return [spec.nmc(name.strip()) for name in names.split(",") if name.strip()]


def cmd_estimate(args) -> int:
    spec = load_spec(args.spec)
    configs = _configs(spec, args.configs)
    results = [estimate_fft2d_time(n, c) for n in args.sizes for c in configs]
    _emit(emit_report(results, args.format, kind="estimates",
                      bandwidths={c.name: c.aggregate_bw for c in configs}), args.out)
    return 0


def cmd_pipeline(args) -> int:
    spec = load_spec(args.spec)
    cfg = spec.nmc(args.config)
    if args.accelerators is not None:
        cfg = replace(cfg, accelerators=args.accelerators)
    tile = TileParams(k=args.k) if args.k else None
    sim = simulate_pipeline(args.size, cfg, tile)
    closed = estimate_fft2d_time(args.size, cfg)
    ratio = sim.time_s / closed.time_s
    if args.format == "csv":
        _emit(emit_report([sim], "csv", kind="estimates"), args.out)
    else:
        _emit((f"config={cfg.name} n={args.size} blocks={sim.blocks} "
               f"accelerators={sim.accelerators} engaged={sim.engaged} "
               f"(min {sim.min_accelerators_for_overlap})\n"
               f"makespan {sim.time_s:.6g} s  closed form {closed.time_s:.6g} s  "
               f"ratio {ratio:.4f}  bottleneck {closed.bottleneck}\n").encode(), args.out)
    return 0


def _read_points(text: str):
    import csv
    import io
    reader = csv.DictReader(io.StringIO(text))
    missing = {"kernel", "ai", "perf_tflops"} - set(reader.fieldnames or ())
    if missing:
        raise ValueError(f"points CSV lacks columns {sorted(missing)}")
    points = []
    for row in reader:
        try:
            points.append((row["kernel"], float(row["ai"]), float(row["perf_tflops"])))
        except ValueError:
            raise ValueError(f"line {reader.line_num}: bad number") from None
    return points


def cmd_roofline(args) -> int:
    spec = load_spec(args.spec)
    machine = spec.machine(args.machine)
    if args.input:
        raw = _read_points(_read_input(args.input))
    else:
        cfg_name = args.config or spec.memory_configs.get(machine.name)
        if cfg_name is None:
            raise ValueError(f"{machine.name} has no memory_config; pass --config or --in")
        cfg = spec.nmc(cfg_name)
        raw = []
        for n in args.sizes:
            t = estimate_fft2d_time(n, cfg).time_s
            if not args.exact_times:
                t = round_sig(t, 2)
            raw.append((f"fft-{n // 1024}k" if n >= 1024 else f"fft-{n}",
                        fft2d_ai(n, args.ai_convention), attained_perf(n, t)))
    points = [roofline_classify(k, ai, perf, machine) for k, ai, perf in raw]
    _emit(emit_report(points, args.format, kind="roofline", machine=machine), args.out)
    return 0


def cmd_cpi(args) -> int:
    samples = parse_counter_dump(_read_input(args.input))
    th = Thresholds(args.lsu_min, args.lsu_over_exec, args.cmpl_min)
    rows = []
    for s in samples:
        pct = cpi_breakdown(s)
        verdict = classify_boundness(pct, th)
        rows += [CpiRow(s.kernel, c, p, verdict) for c, p in pct.items()]
    _emit(emit_report(rows, args.format, kind="cpi"), args.out)
    return 0


def cmd_amdahl(args) -> int:
    times = {}
    for item in args.times.split(","):
        name, sep, value = item.partition("=")
        if not sep:
            raise ValueError(f"expected kernel=seconds, got {item!r}")
        times[name.strip()] = float(value)
    if args.new_time is not None:
        new = args.new_time
    elif args.speedup is not None:
        if args.accelerate not in times:
            raise KeyError(f"unknown kernel {args.accelerate!r}")
        new = times[args.accelerate] / args.speedup
    else:
        new = 0.0
    share, overall = amdahl_projection(times, args.accelerate, new)
    print(f"{args.accelerate} share {share:.1f}%  new time {format_seconds(new) if new else 0} s  "
          f"overall speedup {overall:.4f}")
    return 0


def cmd_gen_grid(args) -> int:
    n = args.size
    if args.pattern == "random":
        data = random_grid(n, args.seed)
    elif args.pattern == "impulse":
        data = np.zeros((n, n), np.complex64)
        data[0, 0] = 1
    else:
        # asymmetric marker: value encodes its own coordinates
        i, j = np.indices((n, n))
        data = (i + 1j * j).astype(np.complex64)
    FileGrid.create(args.out, n, data, descriptor=True).close()
    print(f"wrote {args.out} ({8 * n * n} bytes) and {args.out}.meta")
    return 0


# -- parser ---------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="nmfft",
        description="Streamed 2D FFT and near-memory performance modeling toolkit.",
        epilog=f"Set ${SPEC_ENV} to use a different machine/NMC spec file.",
    )
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True, metavar="command")

    def add(name, func, help_, desc):
        sp = sub.add_parser(name, help=help_, description=desc)
        sp.set_defaults(func=func)
        return sp

    def spec_opt(sp):
        sp.add_argument("--spec", help=f"machine/NMC spec file (default: ${SPEC_ENV} or bundled)")

    def out_opts(sp, formats, default):
        sp.add_argument("--format", choices=formats, default=default)
        sp.add_argument("--out", help="write output here instead of stdout")

    sp = add("fft2d", cmd_fft2d, "run/verify the streamed 2D FFT",
             "Two passes of row FFTs with the transpose folded into k x k tile "
             "write-back, as done by the Access Processor design. "
             "--verify compares with a plain row-column FFT.")
    sp.add_argument("--size", type=parse_size)
    sp.add_argument("--in", dest="input", help="raw c64le grid file (side from --size or .meta)")
    sp.add_argument("--k", type=int, default=4, help="rows per block (default 4: 256-bit access)")
    sp.add_argument("--backend", choices=("mem", "file"), default="mem")
    sp.add_argument("--direction", choices=("fwd", "inv"), default="fwd")
    sp.add_argument("--verify", action="store_true")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--threads", type=int, default=1)
    sp.add_argument("--out", help="write the result grid (raw c64le + .meta)")

    sp = add("estimate", cmd_estimate, "Access Processor execution-time table",
             "Bandwidth-bound time of one 2D FFT (32 n^2 bytes over the aggregate "
             "GiB/s), matching the reference Access Processor estimates for "
             "DDR4 DIMM and HBM2 channel configurations.")
    sp.add_argument("--sizes", type=parse_sizes, default=parse_sizes(DEFAULT_SIZES))
    sp.add_argument("--configs", default="all", help="comma-separated config names, or 'all'")
    spec_opt(sp)
    out_opts(sp, ("table", "csv"), "table")

    sp = add("pipeline", cmd_pipeline, "transfer/compute overlap simulation",
             "Event-driven read -> 1D FFT -> write pipeline over k-row blocks, "
             "checking that enough accelerators hide compute behind memory traffic.")
    sp.add_argument("--size", type=parse_size, default=4096)
    sp.add_argument("--config", default="1 DDR4 DIMM")
    sp.add_argument("--accelerators", type=int)
    sp.add_argument("--k", type=int)
    spec_opt(sp)
    out_opts(sp, ("text", "csv"), "text")

    sp = add("roofline", cmd_roofline, "roofline points and ceilings",
             "Classify kernels against a machine's roofline. Without --in, the "
             "2D FFT points come from the NMC time model of the machine's memory "
             "config (times rounded to 2 significant digits unless --exact-times).")
    sp.add_argument("--machine", default="AD9H7")
    sp.add_argument("--in", dest="input", help="CSV kernel,ai,perf_tflops of measured points")
    sp.add_argument("--config", help="NMC config for model points")
    sp.add_argument("--sizes", type=parse_sizes, default=parse_sizes(DEFAULT_SIZES))
    sp.add_argument("--ai-convention", choices=("gib", "canonical"), default="gib",
                    help="'gib' scales flop/byte by 2^30/1e9 (traffic counted in GiB, flops in 1e9)")
    sp.add_argument("--exact-times", action="store_true")
    spec_opt(sp)
    out_opts(sp, ("csv", "svg", "table"), "table")

    sp = add("cpi", cmd_cpi, "CPI breakdown and boundness classification",
             "POWER9 CPI breakdown (percent of PM_RUN_CYC) from a kernel,counter,value "
             "dump, with memory/compute classification from LSU and completion shares. "
             "Bundled dumps: microbench_counters.csv, idg_counters.csv.")
    sp.add_argument("--in", dest="input", required=True)
    th = Thresholds()
    sp.add_argument("--lsu-min", type=float, default=th.lsu_min)
    sp.add_argument("--lsu-over-exec", type=float, default=th.lsu_over_exec)
    sp.add_argument("--cmpl-min", type=float, default=th.cmpl_min)
    out_opts(sp, ("table", "csv"), "table")

    sp = add("amdahl", cmd_amdahl, "bottleneck share and overall speedup",
             "Share of one kernel in the IDG run time and the overall speedup when "
             "it is offloaded (Amdahl accounting).")
    sp.add_argument("--times", required=True, help="kernel=seconds,...")
    sp.add_argument("--accelerate", default="fft")
    g = sp.add_mutually_exclusive_group()
    g.add_argument("--new-time", type=float)
    g.add_argument("--speedup", type=float)

    sp = add("gen-grid", cmd_gen_grid, "synthesize a test grid file",
             "Write an n x n raw c64le grid plus a key=value .meta sidecar.")
    sp.add_argument("--size", type=parse_size, required=True)
    sp.add_argument("--pattern", choices=("random", "impulse", "marked"), default="random")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out", required=True)
    return p


def run(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, KeyError, OSError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"nmfft {args.command}: error: {msg}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run())
