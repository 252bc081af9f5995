"""Counter dumps and machine/NMC spec files.

Counter dump: UTF-8 CSV with header ``kernel,counter,value``; one row per
(kernel, counter), integer values.  Spec file: TOML with ``[[machines]]`` and
``[[nmc_configs]]`` arrays of tables (see ``data/default_spec.toml``).
"""

from __future__ import annotations

import csv
import io
import os
import sys
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .cpi import COUNTERS, RUN_CYC, CpiValidationError, PmuSample
from .nmc import NmcConfig, NmcConfigError
from .roofline import MachineSpec, MachineSpecError

SPEC_ENV = "NMFFT_SPEC"
DUMP_HEADER = ["kernel", "counter", "value"]

__all__ = [
    "DUMP_HEADER",
    "ParseError",
    "SPEC_ENV",
    "SpecError",
    "SpecFile",
    "default_spec_path",
    "load_spec",
    "parse_counter_dump",
]


class ParseError(ValueError):
    def __init__(self, msg: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {msg}" if line is not None else msg)


class SpecError(ValueError):
    pass


def parse_counter_dump(text: str) -> list[PmuSample]:
    """Parse a counter dump into one validated :class:`PmuSample` per kernel."""
    if not text.strip():
        return []
    reader = csv.reader(io.StringIO(text))
    header = next(reader)
    if [h.strip() for h in header] != DUMP_HEADER:
        raise ParseError(f"expected header {','.join(DUMP_HEADER)}, got {','.join(header)}", 1)
    samples: dict[str, PmuSample] = {}
    for row in reader:
        line = reader.line_num
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != 3:
            raise ParseError(f"expected 3 fields, got {len(row)}", line)
        kernel, counter, raw = (c.strip() for c in row)
        if not kernel:
            raise ParseError("empty kernel label", line)
        if counter not in COUNTERS:
            raise ParseError(f"unknown counter {counter!r}", line)
        if not raw.isdigit():
            raise ParseError(f"value {raw!r} is not a non-negative integer", line)
        sample = samples.setdefault(kernel, PmuSample(kernel))
        if counter in sample.counters:
            raise ParseError(f"duplicate {counter} for kernel {kernel!r}", line)
        sample.counters[counter] = int(raw)
    for sample in samples.values():
        if RUN_CYC not in sample.counters:
            raise ParseError(f"kernel {sample.kernel!r} has no {RUN_CYC} record")
        try:
            sample.validate()
        except CpiValidationError as exc:
            raise ParseError(str(exc)) from exc
    return list(samples.values())


@dataclass
class SpecFile:
    machines: list[MachineSpec] = field(default_factory=list)
    nmc_configs: list[NmcConfig] = field(default_factory=list)
    # machine name -> name of the NMC memory config feeding it
    memory_configs: dict[str, str] = field(default_factory=dict)

    def machine(self, name: str) -> MachineSpec:
        for m in self.machines:
            if m.name == name:
                return m
        raise KeyError(f"no machine named {name!r}")

    def nmc(self, name: str) -> NmcConfig:
        for c in self.nmc_configs:
            if c.name == name:
                return c
        raise KeyError(f"no NMC config named {name!r}")


_MACHINE_FIELDS = {
    "name": str,
    "peak_bw": float,
    "freq_ghz": float,
    "ops_per_core": int,
    "cores": int,
    "sockets": int,
    "peak_flops_override": float,
    "memory_config": str,
}
_NMC_FIELDS = {
    "name": str,
    "channels": int,
    "bw_per_channel": float,
    "memory_kind": str,
    "access_width_bytes": int,
    "accelerators": int,
    "accel_rate": float,
}
_FORMULA = ("freq_ghz", "ops_per_core", "cores", "sockets")


def _typed(path: str, value, kind):
    if isinstance(value, bool):
        raise SpecError(f"{path}: expected {kind.__name__}, got bool")
    if kind is float and isinstance(value, int):
        value = float(value)
    if not isinstance(value, kind):
        raise SpecError(f"{path}: expected {kind.__name__}, got {type(value).__name__}")
    if kind in (int, float) and not value > 0:
        raise SpecError(f"{path}: must be positive")
    return value


def _table(path: str, entry, schema: dict, required: tuple) -> dict:
    if not isinstance(entry, dict):
        raise SpecError(f"{path}: expected a table")
    unknown = sorted(set(entry) - set(schema))
    if unknown:
        raise SpecError(f"{path}.{unknown[0]}: unknown key")
    for key in required:
        if key not in entry:
            raise SpecError(f"{path}.{key}: missing field {key}")
    return {k: _typed(f"{path}.{k}", v, schema[k]) for k, v in entry.items()}


def _parse_spec(doc: dict) -> SpecFile:
    unknown = sorted(set(doc) - {"machines", "nmc_configs"})
    if unknown:
        raise SpecError(f"{unknown[0]}: unknown top-level key")
    spec = SpecFile()
    for i, entry in enumerate(doc.get("machines", [])):
        path = f"machines[{i}]"
        fields = _table(path, entry, _MACHINE_FIELDS, ("name", "peak_bw"))
        if "peak_flops_override" not in fields:
            for key in _FORMULA:
                if key not in fields:
                    raise SpecError(f"{path}.{key}: missing field {key} ({fields['name']})")
        memory = fields.pop("memory_config", None)
        try:
            machine = MachineSpec(**fields)
        except MachineSpecError as exc:
            raise SpecError(f"{path}: {exc}") from exc
        if any(m.name == machine.name for m in spec.machines):
            raise SpecError(f"{path}.name: duplicate machine name {machine.name!r}")
        spec.machines.append(machine)
        if memory is not None:
            spec.memory_configs[machine.name] = memory
    for i, entry in enumerate(doc.get("nmc_configs", [])):
        path = f"nmc_configs[{i}]"
        fields = _table(path, entry, _NMC_FIELDS, ("name", "channels", "bw_per_channel"))
        try:
            cfg = NmcConfig(**fields)
        except NmcConfigError as exc:
            raise SpecError(f"{path}: {exc}") from exc
        if any(c.name == cfg.name for c in spec.nmc_configs):
            raise SpecError(f"{path}.name: duplicate NMC config name {cfg.name!r}")
        spec.nmc_configs.append(cfg)
    nmc_names = {c.name for c in spec.nmc_configs}
    for machine, memory in spec.memory_configs.items():
        if memory not in nmc_names:
            raise SpecError(f"machines ({machine}).memory_config: no NMC config {memory!r}")
    return spec


def default_spec_path() -> Path:
    env = os.environ.get(SPEC_ENV)
    if env:
        return Path(env)
    return Path(str(resources.files("nmfft") / "data" / "default_spec.toml"))


def load_spec(file: str | os.PathLike | None = None) -> SpecFile:
    """Load and validate a spec file; ``None`` loads the default (or $NMFFT_SPEC)."""
    path = Path(file) if file is not None else default_spec_path()
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise SpecError(f"cannot read spec file {path}: {exc}") from exc
    try:
        doc = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise SpecError(f"{path}: {exc}") from exc
    return _parse_spec(doc)
