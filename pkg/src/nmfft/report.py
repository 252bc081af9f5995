"""Deterministic CSV / SVG / text-table rendering of model and analysis results.

Seconds are printed to two significant digits (round half up), TFLOP/s and
arithmetic intensities to four decimals, percentages to whole numbers in
tables and two decimals in CSV.
"""

from __future__ import annotations

import csv
import io
import math
from collections.abc import Sequence
from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal

from .cpi import PmuSample
from .nmc import EstimateReport
from .roofline import MachineSpec, RooflinePoint

__all__ = [
    "CpiRow",
    "ReportError",
    "emit_report",
    "format_seconds",
    "round_sig",
    "size_label",
]

FORMATS = ("csv", "svg", "table")


class ReportError(ValueError):
    pass


@dataclass(frozen=True)
class CpiRow:
    kernel: str
    counter: str
    percent: float
    classification: str = ""


def _sig_decimal(x: float, digits: int) -> Decimal:
    d = Decimal(repr(float(x)))
    if d == 0:
        return d
    exp = d.adjusted() - digits + 1
    return d.quantize(Decimal(1).scaleb(exp), rounding=ROUND_HALF_UP)


def round_sig(x: float, digits: int = 2) -> float:
    """Round half up to ``digits`` significant digits (decimal, not binary)."""
    return float(_sig_decimal(x, digits))


def format_seconds(x: float, digits: int = 2) -> str:
    d = _sig_decimal(x, digits)
    # a half-up carry can add a digit (0.0995 -> 0.10); requantize
    d = _sig_decimal(float(d), digits)
    return f"{d:f}"


def size_label(n: int) -> str:
    return f"{n // 1024}k" if n >= 1024 and n % 1024 == 0 else str(n)


def _csv(header: Sequence[str], rows) -> bytes:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue().encode()


def _text_table(rows: list[list[str]]) -> bytes:
    widths = [max(len(r[i]) for r in rows) for i in range(len(rows[0]))]
    lines = []
    for j, r in enumerate(rows):
        lines.append(" | ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip())
        if j == 0:
            lines.append("-+-".join("-" * w for w in widths))
    return ("\n".join(lines) + "\n").encode()


# -- estimates --------------------------------------------------------------

def _estimates(results: Sequence[EstimateReport], fmt: str, bandwidths: dict | None) -> bytes:
    if fmt == "csv":
        return _csv(
            ["n", "config", "total_bytes", "time_s", "bottleneck", "accelerators",
             "min_accelerators"],
            [[r.n, r.config, r.total_bytes, format_seconds(r.time_s), r.bottleneck,
              r.accelerators, r.min_accelerators_for_overlap] for r in results],
        )
    if fmt == "table":
        configs = list(dict.fromkeys(r.config for r in results))
        sizes = sorted({r.n for r in results})
        cell = {(r.n, r.config): r for r in results}
        rows = [["Size", *configs]]
        if bandwidths:
            rows.append(["", *(f"{bandwidths[c]:g} GB/s" for c in configs)])
        for n in sizes:
            rows.append([size_label(n), *(
                f"{format_seconds(cell[n, c].time_s)} s" if (n, c) in cell else "-"
                for c in configs)])
        return _text_table(rows)
    raise ReportError(f"format {fmt!r} not supported for execution-time estimates")


# -- roofline ---------------------------------------------------------------

def _roofline(points: Sequence[RooflinePoint], fmt: str, machine: MachineSpec | None) -> bytes:
    if fmt == "csv":
        return _csv(["kernel", "ai", "perf_tflops", "bound"],
                    [[p.kernel, f"{p.ai:.4f}", f"{p.perf:.4f}", p.bound] for p in points])
    if fmt == "table":
        rows = [["kernel", "ai", "perf_tflops", "ceiling_tflops", "bound"]]
        rows += [[p.kernel, f"{p.ai:.4f}", f"{p.perf:.4f}", f"{p.ceiling:.4f}", p.bound]
                 for p in points]
        return _text_table(rows)
    if fmt == "svg":
        if machine is None:
            raise ReportError("SVG roofline needs the machine ceilings")
        return _roofline_svg(points, machine)
    raise ReportError(f"unsupported format {fmt!r}")


def _roofline_svg(points: Sequence[RooflinePoint], m: MachineSpec) -> bytes:
    width, height, pad = 640, 420, 60
    ai_lo, ai_hi = 1e-2, 1e3
    perf_hi = 10 ** math.ceil(math.log10(m.peak_tflops * 2))
    perf_lo = perf_hi / 1e5
    for p in points:
        if p.perf > 0:
            perf_lo = min(perf_lo, 10 ** math.floor(math.log10(p.perf)))

    def sx(ai):
        return pad + (math.log10(ai) - math.log10(ai_lo)) / (math.log10(ai_hi) - math.log10(ai_lo)) * (width - 2 * pad)

    def sy(perf):
        perf = max(perf, perf_lo)
        return height - pad - (math.log10(perf) - math.log10(perf_lo)) / (math.log10(perf_hi) - math.log10(perf_lo)) * (height - 2 * pad)

    ridge = m.ridge
    knee_lo = max(ai_lo, perf_lo / m.peak_bw_tbytes)
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<title>Roofline {m.name}</title>',
        f'<rect x="{pad}" y="{pad}" width="{width - 2 * pad}" height="{height - 2 * pad}" '
        'fill="none" stroke="#888"/>',
        f'<polyline fill="none" stroke="blue" stroke-width="2" points="'
        f'{sx(knee_lo):.2f},{sy(knee_lo * m.peak_bw_tbytes):.2f} '
        f'{sx(ridge):.2f},{sy(m.peak_tflops):.2f} {sx(ai_hi):.2f},{sy(m.peak_tflops):.2f}"/>',
        f'<line x1="{sx(ridge):.2f}" y1="{sy(perf_lo):.2f}" x2="{sx(ridge):.2f}" '
        f'y2="{sy(m.peak_tflops):.2f}" stroke="blue" stroke-dasharray="4 3"/>',
        f'<text x="{sx(ridge) + 4:.2f}" y="{sy(m.peak_tflops) - 6:.2f}" font-size="11">'
        f'{m.name}: {m.peak_tflops:.4f} TFLOP/s, {m.peak_bw:g} GB/s, ridge {ridge:.4f}</text>',
    ]
    for p in points:
        colour = "red" if p.bound == "memory" else "green"
        out.append(
            f'<circle cx="{sx(p.ai):.2f}" cy="{sy(p.perf):.2f}" r="4" fill="{colour}">'
            f'<title>{p.kernel} ({p.ai:.4f}, {p.perf:.4f}) {p.bound}</title></circle>'
        )
    out += [
        f'<text x="{width / 2:.0f}" y="{height - 15}" font-size="12" text-anchor="middle">'
        'Arithmetic intensity (flop/byte, log)</text>',
        f'<text x="15" y="{height / 2:.0f}" font-size="12" transform="rotate(-90 15 {height / 2:.0f})" '
        'text-anchor="middle">TFLOP/s (log)</text>',
        "</svg>",
    ]
    return ("\n".join(out) + "\n").encode()


# -- cpi / counters -----------------------------------------------------------

def _cpi(rows: Sequence[CpiRow], fmt: str) -> bytes:
    if fmt == "csv":
        return _csv(["kernel", "counter", "percent"],
                    [[r.kernel, r.counter, f"{r.percent:.2f}"] for r in rows])
    if fmt == "table":
        counters = list(dict.fromkeys(r.counter for r in rows))
        kernels = list(dict.fromkeys(r.kernel for r in rows))
        cell = {(r.kernel, r.counter): r.percent for r in rows}
        verdict = {r.kernel: r.classification for r in rows}
        table = [["kernel", *counters, "class"]]
        for k in kernels:
            table.append([k, *(f"{cell[k, c]:.0f}" if (k, c) in cell else "-" for c in counters),
                          verdict[k]])
        return _text_table(table)
    raise ReportError(f"format {fmt!r} not supported for CPI breakdowns")


def _counters(samples: Sequence[PmuSample], fmt: str) -> bytes:
    if fmt != "csv":
        raise ReportError(f"format {fmt!r} not supported for counter dumps")
    return _csv(["kernel", "counter", "value"],
                [[s.kernel, c, v] for s in samples for c, v in s.counters.items()])


_KINDS = {
    EstimateReport: "estimates",
    RooflinePoint: "roofline",
    CpiRow: "cpi",
    PmuSample: "counters",
}


def emit_report(results: Sequence, format: str = "csv", *, kind: str | None = None,
                machine: MachineSpec | None = None, bandwidths: dict | None = None) -> bytes:
    """Render ``results`` (all of one type) as bytes.

    ``kind`` is inferred from the first element; pass it for empty inputs.
    ``machine`` supplies ceilings for SVG rooflines; ``bandwidths`` maps NMC
    config names to the GB/s label row of the execution-time table.
    """
    if format == "text-table":
        format = "table"
    if format not in FORMATS:
        raise ReportError(f"unsupported format {format!r}")
    results = list(results)
    if results:
        inferred = _KINDS.get(type(results[0]))
        if inferred is None:
            raise ReportError(f"cannot render {type(results[0]).__name__}")
        if any(type(r) is not type(results[0]) for r in results):
            raise ReportError("results must all have the same type")
        kind = inferred if kind is None else kind
    if kind == "estimates":
        if not results and format == "table":
            raise ReportError("nothing to tabulate")
        return _estimates(results, format, bandwidths)
    if kind == "roofline":
        return _roofline(results, format, machine)
    if kind == "cpi":
        return _cpi(results, format) if results or format == "csv" else b""
    if kind == "counters":
        return _counters(results, format)
    raise ReportError("empty results need an explicit kind")
