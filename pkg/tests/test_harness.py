"""Sweep orchestration, mitigation pipelines, CSV and decay experiment."""
import numpy as np
import pytest

from teleport_lab import harness, protocols
from teleport_lab.channels import NoiseModel, confusion_matrix
from teleport_lab.harness import (ExperimentSpec, ResultRow,
                                  aggregate_by_hops, crossing_time, exact_decay_negativity,
                                  mitigated_category_distributions,
                                  mitigated_pair_distributions, path_noise_model,
                                  plan_cells, read_csv_rows, rows_to_csv, run_decay_experiment,
                                  run_experiment, write_csv)
from teleport_lab.metrics import negativity
from teleport_lab.pathfinder import synthesize_device
from teleport_lab.protocols import PathSpec
from teleport_lab.tomography import BASIS_PAIRS, reconstruct

NOISELESS_OVERRIDES = {
    "one_qubit_depol": 0.0,
    "two_qubit_depol_per_edge": None,
    "readout": [],
    "dynamic_correction_latency_us": 0.0,
}


def small_device(n=6, seed=2):
    return synthesize_device(f"line:{n}", seed=seed)


# --- spec -----------------------------------------------------------------------


def test_spec_validation():
    with pytest.raises(ValueError, match="hop"):
        ExperimentSpec(hops=(0,))
    with pytest.raises(ValueError, match="qrem"):
        ExperimentSpec(qrem="sometimes")
    with pytest.raises(ValueError, match="protocol"):
        ExperimentSpec(protocols=("negativity",))
    with pytest.raises(ValueError, match="mode"):
        ExperimentSpec(modes=("teleport",))


def test_spec_json_roundtrip():
    spec = ExperimentSpec(hops=(1, 3), protocols=("neg",), modes=("swap",), shots=128,
                          seed=7, noise_overrides={"two_qubit_depol": 0.01})
    again = ExperimentSpec.from_json(spec.to_json())
    assert again.hops == (1, 3)
    assert tuple(again.modes) == ("swap",)
    assert again.noise_overrides == {"two_qubit_depol": 0.01}


def test_qrem_flags():
    assert ExperimentSpec(qrem="on").qrem_flags == (True,)
    assert ExperimentSpec(qrem="both").qrem_flags == (False, True)


# --- noise model construction -----------------------------------------------------


def test_path_noise_model_positions_follow_path():
    device = small_device()
    path = PathSpec((3, 2, 1))
    noise = path_noise_model(device, path)
    assert noise.two_qubit_depol_per_edge == [device.edge(3, 2).gate_error,
                                              device.edge(2, 1).gate_error]
    expected = confusion_matrix(device.qubit(3).readout_err_0to1,
                                device.qubit(3).readout_err_1to0)
    assert np.allclose(noise.qubit_confusion(0), expected)
    assert noise.t1_per_qubit_us == [device.qubit(q).t1_us for q in (3, 2, 1)]


def test_path_noise_model_overrides():
    device = small_device()
    noise = path_noise_model(device, PathSpec((0, 1, 2)), NOISELESS_OVERRIDES)
    assert noise.one_qubit_depol == 0.0
    assert noise.edge_depol(0) == 0.0
    assert np.allclose(noise.qubit_confusion(1), np.eye(2))


# --- mitigation pipelines ----------------------------------------------------------


def test_pair_pipeline_matches_exact_distribution():
    noise = NoiseModel(dynamic_correction_latency_us=0.0)
    rng = np.random.default_rng(4)
    result = protocols.run_teleportation(4, "dynamic", noise, 8192, rng)
    probs = mitigated_pair_distributions(result, qrem=False,
                                         calibration=[np.eye(2)] * 4)
    rho = reconstruct(probs)
    assert negativity(rho) > 0.47


def test_category_pipeline_matches_manual_recomputation():
    noise = NoiseModel(dynamic_correction_latency_us=0.0)
    rng = np.random.default_rng(8)
    result = protocols.run_teleportation(4, "postselect", noise, 2048, rng)
    cats = mitigated_category_distributions(result, qrem=False,
                                            calibration=[np.eye(2)] * 4)
    raw = result.categorize()
    total = 9 * 2048
    for config, tset in raw.items():
        assert abs(cats[config]["weight"] - tset.total_shots() / total) < 1e-12
        freqs = tset.frequencies()
        for pair in BASIS_PAIRS:
            assert np.allclose(cats[config]["probs_by_basis"][pair], freqs[pair], atol=1e-12)


def test_category_pipeline_qrem_recovers_flipped_categories():
    # heavy intermediate readout error scrambles the categorisation; the
    # full-path correction restores most of the per-category negativity
    flipper = confusion_matrix(0.25, 0.25)
    noise = NoiseModel(dynamic_correction_latency_us=0.0,
                       readout=[np.eye(2), flipper, np.eye(2), np.eye(2)])
    rng = np.random.default_rng(12)
    result = protocols.run_teleportation(4, "postselect", noise, 20_000, rng)
    calibration = [np.eye(2), flipper, np.eye(2), np.eye(2)]
    raw = mitigated_category_distributions(result, qrem=False, calibration=calibration)
    fixed = mitigated_category_distributions(result, qrem=True, calibration=calibration)
    config = (0, 0)
    n_raw = negativity(reconstruct(raw[config]["probs_by_basis"]))
    n_fixed = negativity(reconstruct(fixed[config]["probs_by_basis"]))
    assert n_fixed > n_raw + 0.1
    assert n_fixed > 0.42


# --- sweep --------------------------------------------------------------------------


def test_plan_cells_grid_and_seeds():
    device = small_device()
    spec = ExperimentSpec(hops=(1, 2), protocols=("neg",), modes=("swap", "postselect"),
                          paths_per_hop=2, trials=2, shots=64, seed=3)
    cells = plan_cells(device, spec)
    assert len(cells) == 2 * 2 * 2 * 2
    assert len({c.seed for c in cells}) == len(cells)
    again = plan_cells(device, spec)
    assert cells == again


def test_noiseless_sweep_hits_ideal_negativity():
    device = small_device()
    spec = ExperimentSpec(hops=(1, 2), protocols=("neg",),
                          modes=("dynamic", "postselect", "swap"), paths_per_hop=1,
                          trials=1, shots=4096, qrem="off",
                          noise_overrides=NOISELESS_OVERRIDES, seed=11)
    rows = run_experiment(device, spec)
    assert rows
    for row in rows:
        assert row.negativity is not None
        assert abs(row.negativity - 0.5) < 0.02
        assert row.fidelity > 0.95


def test_absent_configurations_not_reported_at_one_hop():
    device = small_device()
    spec = ExperimentSpec(hops=(1,), protocols=("neg",), modes=("postselect",),
                          paths_per_hop=1, trials=1, shots=256, qrem="off", seed=5)
    rows = run_experiment(device, spec)
    configs = {row.configuration for row in rows}
    assert configs == {"00", "10"}


def test_failed_cells_are_skipped(monkeypatch, caplog):
    device = small_device()
    spec = ExperimentSpec(hops=(1,), protocols=("neg",), modes=("swap", "postselect"),
                          paths_per_hop=1, trials=1, shots=64, qrem="off", seed=5)

    real = harness._cell_rows

    def flaky(dev, sp, cell):
        if cell.mode == "swap":
            raise RuntimeError("boom")
        return real(dev, sp, cell)

    monkeypatch.setattr(harness, "_cell_rows", flaky)
    rows = run_experiment(device, spec)
    assert rows
    assert all(row.mode == "postselect" for row in rows)


def test_parallel_run_matches_serial(monkeypatch):
    device = small_device()
    spec = ExperimentSpec(hops=(1,), protocols=("neg",), modes=("swap",),
                          paths_per_hop=2, trials=1, shots=256, qrem="off", seed=9)
    serial = rows_to_csv(run_experiment(device, spec))
    monkeypatch.setenv("TELEPORT_LAB_THREADS", "2")
    parallel = rows_to_csv(run_experiment(device, spec))
    assert serial == parallel


# --- CSV -----------------------------------------------------------------------------


def test_csv_roundtrip(tmp_path):
    rows = [ResultRow("swap", "neg", 2, "0-1-2-3", 0, "on", "", 0.43215, 0.91, 512, 77),
            ResultRow("postselect", "neg", 1, "0-1-2", 1, "off", "10", None, None, 0, 78)]
    f = tmp_path / "rows.csv"
    write_csv(rows, str(f))
    text = f.read_text()
    assert text.startswith("# teleport-lab results v1\n")
    back = read_csv_rows(str(f))
    assert back == rows


def test_csv_skips_malformed_rows(tmp_path, caplog):
    f = tmp_path / "rows.csv"
    f.write_text("# teleport-lab results v1\n"
                 + ",".join(harness.CSV_COLUMNS) + "\n"
                 + "swap,neg,2,0-1,0,on,,0.4,0.9,16,1\n"
                 + "swap,neg,not-a-number,0-1,0,on,,0.4,0.9,16,1\n"
                 + "too,few,fields\n")
    rows = read_csv_rows(str(f))
    assert len(rows) == 1


def test_identical_seed_gives_identical_csv():
    device = small_device()
    spec = ExperimentSpec(hops=(1,), protocols=("neg",), modes=("postselect",),
                          paths_per_hop=1, trials=1, shots=512, qrem="both", seed=123)
    a = rows_to_csv(run_experiment(device, spec))
    b = rows_to_csv(run_experiment(device, spec))
    assert a == b
    spec2 = ExperimentSpec(hops=(1,), protocols=("neg",), modes=("postselect",),
                           paths_per_hop=1, trials=1, shots=512, qrem="both", seed=124)
    c = rows_to_csv(run_experiment(device, spec2))
    assert a != c


# --- aggregation ----------------------------------------------------------------------


def test_aggregate_matches_manual_recomputation(rng):
    rows = []
    for hops in (1, 2, 3):
        for trial in range(6):
            rows.append(ResultRow("swap", "neg", hops, "p", trial, "on", "",
                                  float(rng.uniform(0.1, 0.5)), 0.9, 16, 1))
    agg = aggregate_by_hops(rows)
    assert [a.hops for a in agg] == [1, 2, 3]
    for point in agg:
        vals = [r.negativity for r in rows if r.hops == point.hops]
        assert abs(point.mean - np.mean(vals)) < 1e-12
        assert abs(point.stderr - np.std(vals, ddof=1) / np.sqrt(len(vals))) < 1e-12
        assert point.low == min(vals) and point.high == max(vals)
        assert point.count == len(vals)


def test_aggregate_skips_missing_values():
    rows = [ResultRow("swap", "neg", 1, "p", 0, "on", "", None, None, 0, 1),
            ResultRow("swap", "neg", 1, "p", 1, "on", "", 0.4, 0.9, 16, 1)]
    agg = aggregate_by_hops(rows)
    assert agg[0].count == 1


# --- decay -----------------------------------------------------------------------------


def test_crossing_time_interpolates():
    assert crossing_time([0, 1, 2], [0.5, 0.4, 0.3], 0.45) == pytest.approx(0.5)
    assert crossing_time([0, 1], [0.5, 0.5], 0.6) is None
    assert crossing_time([0, 1], [0.5, 0.5], 0.5) == 0.0


def test_exact_decay_monotone_and_window():
    noise = NoiseModel(one_qubit_depol=harness.DEFAULT_ONE_QUBIT_DEPOL,
                       two_qubit_depol=0.0075,
                       readout=[confusion_matrix(0.013, 0.018)] * 2)
    delays = list(np.linspace(0.0, 5.0, 21))
    result = run_decay_experiment(delays, noise, shots=0)
    diffs = np.diff(result.negativities)
    assert np.all(diffs <= 1e-12)
    assert result.crossing_window_us is not None
    assert 1.5 <= result.crossing_window_us <= 2.5


def test_sampled_decay_tracks_exact():
    noise = NoiseModel(two_qubit_depol=0.005, readout=[confusion_matrix(0.01, 0.02)] * 2)
    delays = [0.0, 2.0]
    exact = run_decay_experiment(delays, noise, shots=0)
    sampled = run_decay_experiment(delays, noise, shots=4096, seed=3)
    for e, s in zip(exact.negativities, sampled.negativities):
        assert abs(e - s) < 0.03


def test_qrem_off_decay_is_lower():
    noise = NoiseModel(readout=[confusion_matrix(0.05, 0.08)] * 2)
    with_qrem = exact_decay_negativity(0.5, noise, qrem=True)
    without = exact_decay_negativity(0.5, noise, qrem=False)
    assert with_qrem > without + 0.02
