import numpy as np
import pytest

from nmfft.cli import build_parser, parse_size, run
from nmfft.grid import FileGrid, read_descriptor


def call(capsys, *argv):
    code = run(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_parse_size():
    assert parse_size("4k") == 4096
    assert parse_size("64") == 64
    with pytest.raises(Exception):
        parse_size("3k")


def test_estimate_table(capsys):
    code, out, _ = call(capsys, "estimate", "--sizes", "4k,8k,16k,32k", "--configs", "all")
    assert code == 0
    rows = {line.split("|")[0].strip(): [c.strip() for c in line.split("|")[1:]]
            for line in out.splitlines()[3:]}
    assert rows["4k"] == ["0.033 s", "0.017 s", "0.050 s", "0.0016 s"]
    assert rows["32k"] == ["2.1 s", "1.1 s", "3.2 s", "0.10 s"]


def test_estimate_csv_to_file(tmp_path, capsys):
    out = tmp_path / "t.csv"
    code, _, _ = call(capsys, "estimate", "--sizes", "4k", "--configs", "32 HBM2 channels",
                      "--format", "csv", "--out", str(out))
    assert code == 0
    assert out.read_text().splitlines()[1].startswith("4096,32 HBM2 channels,536870912,0.0016,")


def test_fft2d_verify(capsys):
    code, out, _ = call(capsys, "fft2d", "--size", "64", "--k", "4", "--verify", "--seed", "7")
    assert code == 0
    assert "max rel err" in out and "<= 1e-04" in out
    assert "bytes=131072" in out


def test_fft2d_file_backend_deterministic(tmp_path, capsys):
    a, b = tmp_path / "a.c64", tmp_path / "b.c64"
    for path in (a, b):
        code, _, _ = call(capsys, "fft2d", "--size", "32", "--backend", "file", "--seed", "3",
                          "--out", str(path), "--verify")
        assert code == 0
    assert a.read_bytes() == b.read_bytes()
    assert read_descriptor(a)["n"] == 32


def test_gen_grid_then_fft2d_inverse(tmp_path, capsys):
    g = tmp_path / "g.c64"
    assert call(capsys, "gen-grid", "--size", "16", "--pattern", "marked", "--out", str(g))[0] == 0
    assert g.stat().st_size == 8 * 16 * 16
    f = tmp_path / "f.c64"
    assert call(capsys, "fft2d", "--in", str(g), "--backend", "file", "--out", str(f))[0] == 0
    i = tmp_path / "i.c64"
    code, out, _ = call(capsys, "fft2d", "--in", str(f), "--direction", "inv", "--out", str(i),
                        "--verify")
    assert code == 0
    with FileGrid.open(g) as orig, FileGrid.open(i) as back:
        assert np.abs(back.to_array() - orig.to_array()).max() < 1e-3


def test_cpi_microbench(capsys):
    code, out, _ = call(capsys, "cpi", "--in", "microbench_counters.csv")
    assert code == 0
    verdicts = {line.split("|")[0].strip(): line.split("|")[-1].strip()
                for line in out.splitlines()[2:]}
    assert verdicts == {"mac": "compute_bound", "sgemm": "compute_bound",
                        "stream-add": "memory_bound"}


def test_cpi_bad_dump(tmp_path, capsys):
    f = tmp_path / "d.csv"
    f.write_text("kernel,counter,value\nk,PM_RUN_CYC,abc\n")
    code, _, err = call(capsys, "cpi", "--in", str(f))
    assert code == 1
    assert "line 2" in err and len(err.strip().splitlines()) == 1


def test_roofline_model_points(capsys):
    code, out, _ = call(capsys, "roofline", "--machine", "AD9H7", "--format", "csv")
    assert code == 0
    assert out.splitlines()[1] == "fft-4k,16.1061,1.2583,compute"


def test_roofline_measured_svg(tmp_path, capsys):
    svg = tmp_path / "p9.svg"
    code, _, _ = call(capsys, "roofline", "--machine", "Power9", "--in", "roofline_power9.csv",
                      "--format", "svg", "--out", str(svg))
    assert code == 0
    assert svg.read_text().startswith("<svg")


def test_pipeline(capsys):
    code, out, _ = call(capsys, "pipeline", "--size", "1k", "--config", "2 DDR4 DIMM")
    assert code == 0 and "ratio" in out


def test_amdahl(capsys):
    code, out, _ = call(capsys, "amdahl", "--times", "fft=47,gridder=30,degridder=23",
                        "--accelerate", "fft")
    assert code == 0 and "share 47.0%" in out and "1.8868" in out


def test_unknown_config_is_module_error(capsys):
    code, _, err = call(capsys, "pipeline", "--config", "nope")
    assert code == 1 and "nope" in err


def test_usage_errors_exit_2(capsys):
    with pytest.raises(SystemExit) as e:
        run(["frobnicate"])
    assert e.value.code == 2
    with pytest.raises(SystemExit) as e:
        run(["estimate", "--bogus"])
    assert e.value.code == 2


def test_every_command_has_help():
    parser = build_parser()
    sub = next(a for a in parser._actions if a.dest == "command")
    assert set(sub.choices) == {"fft2d", "estimate", "pipeline", "roofline", "cpi", "amdahl",
                                "gen-grid"}
    for name, sp in sub.choices.items():
        assert sp.description and len(sp.format_help()) > 100, name
