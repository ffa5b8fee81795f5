#!/usr/bin/env python3
"""Idle-decay curve of the two-qubit graph state under the fitted noise model.

Prints the 0.474 -> 0.376 crossing window used to calibrate the dynamic
correction latency.
"""
import argparse

import numpy as np

from teleport_lab import harness, svgplot
from teleport_lab.channels import NoiseModel, confusion_matrix
from teleport_lab.cli import DEFAULT_READOUT_01, DEFAULT_READOUT_10


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--shots", type=int, default=0, help="0 = exact channel")
    parser.add_argument("--max-delay", type=float, default=6.0)
    parser.add_argument("--steps", type=int, default=25)
    parser.add_argument("--out", default="decay.svg")
    args = parser.parse_args()

    noise = NoiseModel(one_qubit_depol=harness.DEFAULT_ONE_QUBIT_DEPOL,
                       two_qubit_depol=0.0075,
                       readout=[confusion_matrix(DEFAULT_READOUT_01, DEFAULT_READOUT_10)] * 2)
    delays = list(np.linspace(0.0, args.max_delay, args.steps))
    result = harness.run_decay_experiment(delays, noise, shots=args.shots)
    for t, v in zip(result.delays_us, result.negativities):
        print(f"t = {t:6.3f} us   negativity = {v:.4f}")
    if result.crossing_window_us is not None:
        print(f"crossing window {harness.DECAY_LEVEL_START} -> {harness.DECAY_LEVEL_END}: "
              f"{result.crossing_window_us:.3f} us")
    svgplot.plot_decay(result.delays_us, result.negativities, args.out)
    print(f"wrote {args.out}")


if __name__ == "__main__":
    main()
