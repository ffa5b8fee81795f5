#!/usr/bin/env python3
"""Full transport comparison on a synthetic heavy-hex device.

Generates a 127-qubit calibration, sweeps hops x modes x weighting
protocols, and renders the summary charts. Expect roughly an hour at the
default settings; pass --quick for a desk-scale smoke run.
"""
import argparse
import os

from teleport_lab import harness, pathfinder, svgplot


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out-dir", default="sweep_out")
    parser.add_argument("--seed", type=int, default=2024)
    parser.add_argument("--quick", action="store_true",
                        help="reduced hops/shots for a fast smoke run")
    args = parser.parse_args()

    os.makedirs(args.out_dir, exist_ok=True)
    device = pathfinder.synthesize_device("heavy-hex-127", seed=args.seed)
    device_file = os.path.join(args.out_dir, "device.json")
    pathfinder.save_device(device, device_file)

    if args.quick:
        spec = harness.ExperimentSpec(hops=(1, 3, 5), protocols=("neg",),
                                      paths_per_hop=2, trials=2, shots=1024,
                                      seed=args.seed)
    else:
        spec = harness.ExperimentSpec(hops=tuple(range(1, 20)), seed=args.seed)
    rows = harness.run_experiment(device, spec)
    csv_path = os.path.join(args.out_dir, "results.csv")
    harness.write_csv(rows, csv_path)
    print(f"wrote {csv_path} ({len(rows)} rows)")
    for name in svgplot.plot_results(rows, args.out_dir):
        print(f"wrote {os.path.join(args.out_dir, name)}")


if __name__ == "__main__":
    main()
