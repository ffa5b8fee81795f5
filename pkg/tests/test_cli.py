"""Command-line surface and SVG rendering."""
import json
import os

import pytest

from teleport_lab import svgplot
from teleport_lab.cli import _parse_delays, _parse_hops, main
from teleport_lab.harness import ExperimentSpec, ResultRow, read_csv_rows
from teleport_lab.svgplot import Series, plot_results, render_chart


# --- argument helpers -------------------------------------------------------------


def test_parse_hops_forms():
    assert _parse_hops("1..5") == (1, 2, 3, 4, 5)
    assert _parse_hops("1..9..2") == (1, 3, 5, 7, 9)
    assert _parse_hops("2,4,8") == (2, 4, 8)


def test_parse_delays_forms():
    assert _parse_delays("0:1:0.5") == [0.0, 0.5, 1.0]
    assert _parse_delays("0,2.5") == [0.0, 2.5]


# --- full pipeline ----------------------------------------------------------------


@pytest.fixture(scope="module")
def workdir(tmp_path_factory):
    return tmp_path_factory.mktemp("cli")


def test_gen_device_and_find_paths(workdir, capsys):
    dev = workdir / "dev.json"
    assert main(["gen-device", "--topology", "line:7", "--seed", "4",
                 "--out", str(dev)]) == 0
    assert main(["find-paths", "--device", str(dev), "--protocol", "neg",
                 "-n", "3", "-m", "2", "--out", str(workdir / "paths.json")]) == 0
    out = capsys.readouterr().out
    assert "product=" in out
    listing = json.loads((workdir / "paths.json").read_text())
    assert len(listing["paths"]) == 2
    assert listing["complete"]


def test_find_paths_warns_when_too_few(workdir, capsys):
    dev = workdir / "dev.json"
    code = main(["find-paths", "--device", str(dev), "--protocol", "gate_fid",
                 "-n", "7", "-m", "10"])
    captured = capsys.readouterr()
    assert code == 0
    assert "warning" in captured.err


def test_gen_device_is_deterministic(workdir):
    a = workdir / "a.json"
    b = workdir / "b.json"
    main(["gen-device", "--topology", "line:5", "--seed", "9", "--out", str(a)])
    main(["gen-device", "--topology", "line:5", "--seed", "9", "--out", str(b)])
    assert a.read_bytes() == b.read_bytes()


def test_run_and_plot_pipeline(workdir):
    dev = workdir / "dev.json"
    csv = workdir / "rows.csv"
    assert main(["run", "--device", str(dev), "--protocol", "neg",
                 "--mode", "postselect,swap", "--hops", "1..2", "--paths", "1",
                 "--trials", "1", "--shots", "256", "--qrem", "both",
                 "--seed", "21", "--out", str(csv)]) == 0
    rows = read_csv_rows(str(csv))
    assert rows
    plots = workdir / "plots"
    assert main(["plot", "--csv", str(csv), "--out-dir", str(plots)]) == 0
    names = sorted(os.listdir(plots))
    assert any(n.startswith("negativity_modes") for n in names)
    content = (plots / names[0]).read_text()
    assert content.startswith("<?xml")
    assert "</svg>" in content


def test_run_with_spec_file(workdir):
    dev = workdir / "dev.json"
    spec = ExperimentSpec(hops=(1,), protocols=("neg",), modes=("swap",),
                          paths_per_hop=1, trials=1, shots=128, qrem="off", seed=3)
    spec_file = workdir / "spec.json"
    spec_file.write_text(spec.to_json())
    out = workdir / "spec_rows.csv"
    assert main(["run", "--device", str(dev), "--spec", str(spec_file),
                 "--out", str(out)]) == 0
    rows = read_csv_rows(str(out))
    assert {r.mode for r in rows} == {"swap"}


def test_run_is_byte_deterministic(workdir):
    dev = workdir / "dev.json"
    a = workdir / "det_a.csv"
    b = workdir / "det_b.csv"
    args = ["run", "--device", str(dev), "--protocol", "neg", "--mode", "swap",
            "--hops", "1", "--paths", "1", "--trials", "1", "--shots", "128",
            "--qrem", "on", "--seed", "5"]
    assert main(args + ["--out", str(a)]) == 0
    assert main(args + ["--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_decay_command(workdir, capsys):
    out = workdir / "decay.csv"
    svg = workdir / "decay.svg"
    assert main(["decay", "--delays", "0:4:0.5", "--out", str(out),
                 "--plot", str(svg)]) == 0
    printed = capsys.readouterr().out
    assert "crossing window" in printed
    assert svg.read_text().startswith("<?xml")
    lines = out.read_text().splitlines()
    assert lines[0] == "# teleport-lab decay v1"
    assert len(lines) == 2 + 9


def test_schema_error_exits_nonzero(workdir, capsys):
    bad = workdir / "bad.json"
    bad.write_text("{\"qubits\": 3}")
    assert main(["find-paths", "--device", str(bad), "-n", "3"]) == 2
    assert "error" in capsys.readouterr().err


def test_missing_device_file_exits_nonzero(workdir, capsys):
    assert main(["find-paths", "--device", str(workdir / "nope.json"), "-n", "3"]) == 2


# --- svg rendering -----------------------------------------------------------------


def test_render_chart_is_deterministic():
    series = [Series(name="a", points=[(1, 0.5, 0.01), (2, 0.4, 0.02)], color="#112233"),
              Series(name="b", points=[(1, 0.3, 0.0)], band=[(1, 0.2, 0.4)],
                     color="#445566", dashed=True)]
    one = render_chart(series, "t", "x", "y")
    two = render_chart(series, "t", "x", "y")
    assert one == two
    assert "polygon" in one  # shaded band
    assert "stroke-dasharray" in one
    assert one.count("<polyline") == 2


def test_render_chart_empty_series():
    svg = render_chart([], "empty", "x", "y")
    assert svg.startswith("<?xml")
    assert "</svg>" in svg


def test_plot_results_two_modes_have_distinct_colors(tmp_path):
    rows = []
    for mode in ("postselect", "swap"):
        for hops in (1, 2, 3):
            for trial in (0, 1):
                rows.append(ResultRow(mode, "neg", hops, "0-1-2", trial, "on", "",
                                      0.4 - 0.05 * hops + 0.01 * trial, 0.9, 64, 1))
    written = plot_results(rows, str(tmp_path))
    name = "negativity_modes_qrem-on.svg"
    assert name in written
    content = (tmp_path / name).read_text()
    assert svgplot.PALETTE[0] in content and svgplot.PALETTE[1] in content
    assert "polygon" in content
    assert "postselect" in content and "swap" in content


def test_plot_results_empty_rows(tmp_path):
    assert plot_results([], str(tmp_path)) == []
