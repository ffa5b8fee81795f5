"""Command-line entry points for the teleportation workbench."""
from __future__ import annotations

import argparse
import json
import logging
import sys

from . import harness, pathfinder, svgplot
from .channels import NoiseModel, confusion_matrix
from .harness import ExperimentSpec

log = logging.getLogger("teleport_lab")

DEFAULT_READOUT_01 = 0.013
DEFAULT_READOUT_10 = 0.018


def _parse_hops(text: str) -> tuple[int, ...]:
    """Accept 'A..B', 'A..B..STEP' or a comma list."""
    if ".." in text:
        parts = [int(p) for p in text.split("..")]
        if len(parts) == 2:
            lo, hi, step = parts[0], parts[1], 1
        elif len(parts) == 3:
            lo, hi, step = parts
        else:
            raise argparse.ArgumentTypeError(f"bad hops range {text!r}")
        return tuple(range(lo, hi + 1, step))
    return tuple(int(p) for p in text.split(","))


def _parse_delays(text: str) -> list[float]:
    """Accept 'LO:HI:STEP' or a comma list, in microseconds."""
    if ":" in text:
        lo, hi, step = (float(p) for p in text.split(":"))
        out = []
        t = lo
        while t <= hi + 1e-9:
            out.append(round(t, 9))
            t += step
        return out
    return [float(p) for p in text.split(",")]


def _csv_list(text: str) -> tuple[str, ...]:
    return tuple(p.strip() for p in text.split(",") if p.strip())


def cmd_gen_device(args) -> int:
    device = pathfinder.synthesize_device(
        topology=args.topology, seed=args.seed,
        gate_error_mean=args.gate_error_mean, gate_error_sd=args.gate_error_sd,
        readout_mean=args.readout_mean, readout_sd=args.readout_sd,
        undefined_edges=args.undefined_edges)
    pathfinder.save_device(device, args.out)
    print(f"wrote {args.out}: {len(device.qubits)} qubits, {len(device.edges)} edges")
    return 0


def cmd_find_paths(args) -> int:
    device = pathfinder.ingest_device(args.device)
    graph = pathfinder.edge_weights(device, args.protocol)
    result = pathfinder.find_best_paths(graph, args.qubits, args.paths, args.protocol)
    if not result.complete:
        print(f"warning: only {len(result.paths)} path(s) of {args.qubits} qubits exist",
              file=sys.stderr)
    for rank, p in enumerate(result.paths, start=1):
        labels = "-".join(str(q) for q in p.qubits)
        print(f"{rank:2d}  product={p.weight_product:.6f}  {labels}")
    if args.out:
        payload = {"protocol": args.protocol, "qubits": args.qubits, "paths": [
            {"rank": i + 1, "qubits": list(p.qubits), "weight_product": p.weight_product}
            for i, p in enumerate(result.paths)],
            "complete": result.complete}
        with open(args.out, "w") as fh:
            json.dump(payload, fh, indent=1, sort_keys=True)
            fh.write("\n")
    return 0


def _spec_from_args(args) -> ExperimentSpec:
    if args.spec:
        with open(args.spec) as fh:
            spec = ExperimentSpec.from_json(fh.read())
        if args.seed is not None:
            spec.seed = args.seed
        return spec
    overrides = json.loads(args.noise_overrides) if args.noise_overrides else {}
    return ExperimentSpec(
        hops=args.hops, protocols=_csv_list(args.protocol), modes=_csv_list(args.mode),
        paths_per_hop=args.paths, trials=args.trials, shots=args.shots, qrem=args.qrem,
        noise_overrides=overrides, simplified_correction=args.simplified_correction,
        seed=args.seed if args.seed is not None else 0)


def cmd_run(args) -> int:
    device = pathfinder.ingest_device(args.device)
    spec = _spec_from_args(args)
    rows = harness.run_experiment(device, spec)
    harness.write_csv(rows, args.out)
    print(f"wrote {args.out}: {len(rows)} rows")
    return 0


def _decay_noise(args) -> NoiseModel:
    if args.device:
        device = pathfinder.ingest_device(args.device)
        graph = pathfinder.edge_weights(device, "gate_fid")
        best = pathfinder.find_best_paths(graph, 2, 1, "gate_fid")
        if not best.paths:
            raise SystemExit("device has no usable edge for the decay experiment")
        pair = best.paths[0].qubits
        return harness.path_noise_model(device, harness.PathSpec(pair))
    readout = [confusion_matrix(DEFAULT_READOUT_01, DEFAULT_READOUT_10)] * 2
    return NoiseModel(one_qubit_depol=harness.DEFAULT_ONE_QUBIT_DEPOL,
                      two_qubit_depol=0.0075, readout=readout)


def cmd_decay(args) -> int:
    noise = _decay_noise(args)
    delays = _parse_delays(args.delays)
    result = harness.run_decay_experiment(delays, noise, shots=args.shots,
                                          seed=args.seed or 0, qrem=args.qrem == "on")
    lines = ["# teleport-lab decay v1", "delay_us,negativity,shots,seed"]
    for t, v in zip(result.delays_us, result.negativities):
        lines.append(f"{t:.12g},{v:.12g},{args.shots},{args.seed or 0}")
    with open(args.out, "w") as fh:
        fh.write("\n".join(lines) + "\n")
    window = result.crossing_window_us
    print(f"wrote {args.out}: {len(delays)} delay points")
    if window is not None:
        print(f"negativity {harness.DECAY_LEVEL_START} -> {harness.DECAY_LEVEL_END} "
              f"crossing window: {window:.3f} us "
              f"(levels at {result.crossing_start:.3f} / {result.crossing_end:.3f} us)")
    else:
        print("decay curve does not bracket the reference negativity levels")
    if args.plot:
        svgplot.plot_decay(result.delays_us, result.negativities, args.plot)
        print(f"wrote {args.plot}")
    return 0


def cmd_plot(args) -> int:
    rows = harness.read_csv_rows(args.csv)
    written = svgplot.plot_results(rows, args.out_dir)
    for name in written:
        print(f"wrote {args.out_dir}/{name}")
    if not written:
        print("no plottable rows found", file=sys.stderr)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="teleport-lab",
                                     description="Teleportation transport benchmarks "
                                                 "on simulated qubit paths")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-device", help="synthesize a calibration file")
    p.add_argument("--topology", default="heavy-hex-127",
                   help="heavy-hex-127, line:N or ring:N")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--gate-error-mean", type=float, default=0.0075)
    p.add_argument("--gate-error-sd", type=float, default=0.003)
    p.add_argument("--readout-mean", type=float, default=DEFAULT_READOUT_01)
    p.add_argument("--readout-sd", type=float, default=0.005)
    p.add_argument("--undefined-edges", type=int, default=0,
                   help="number of edges stored with the undefined-calibration value 1.0")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen_device)

    p = sub.add_parser("find-paths", help="rank transport paths on a device")
    p.add_argument("--device", required=True)
    p.add_argument("--protocol", default="neg", choices=pathfinder.PROTOCOLS)
    p.add_argument("--qubits", "-n", type=int, required=True, help="path length in qubits")
    p.add_argument("--paths", "-m", type=int, default=4)
    p.add_argument("--out", help="optional JSON listing")
    p.set_defaults(func=cmd_find_paths)

    p = sub.add_parser("run", help="run a transport sweep and write CSV rows")
    p.add_argument("--device", required=True)
    p.add_argument("--spec", help="JSON ExperimentSpec file (flags below are ignored)")
    p.add_argument("--protocol", default="neg,neg_qrem,gate_fid")
    p.add_argument("--mode", default="dynamic,postselect,swap")
    p.add_argument("--hops", type=_parse_hops, default=tuple(range(1, 20)),
                   help="A..B, A..B..STEP or comma list")
    p.add_argument("--paths", type=int, default=4)
    p.add_argument("--trials", type=int, default=4)
    p.add_argument("--shots", type=int, default=4096)
    p.add_argument("--qrem", default="both", choices=("on", "off", "both"))
    p.add_argument("--noise-overrides", help="JSON object of NoiseModel overrides")
    p.add_argument("--simplified-correction", action="store_true")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("decay", help="idling pair negativity versus delay")
    p.add_argument("--device", help="optional calibration file; default fitted noise")
    p.add_argument("--delays", default="0:6:0.25", help="LO:HI:STEP in us, or comma list")
    p.add_argument("--shots", type=int, default=0, help="0 = exact channel")
    p.add_argument("--qrem", default="on", choices=("on", "off"))
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--plot", help="optional SVG path")
    p.set_defaults(func=cmd_decay)

    p = sub.add_parser("plot", help="render SVG charts from a results CSV")
    p.add_argument("--csv", required=True)
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_plot)
    return parser


def main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (pathfinder.DeviceSchemaError, FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
