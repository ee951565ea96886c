#!/usr/bin/env python3
"""Plot the CSV artifacts written by the lorentz-encode CLI.

Kept out of the package on purpose: the pipelines stay matplotlib-free and
these figures are reproducible from the files alone.

  python scripts/plot_outputs.py encoding out_dir/ [--save fig.png]
  python scripts/plot_outputs.py fit fit_dir/ [--save fig.png]
  python scripts/plot_outputs.py sweep sweep_dir/ [--save fig.png]
"""

import argparse
import csv
import sys
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt


def read_csv(path):
    with open(path) as fh:
        rows = list(csv.reader(fh))
    header = rows[0]
    cols = {name: [float(r[i]) for r in rows[1:]] for i, name in enumerate(header)}
    return cols


def plot_encoding(out_dir, ax):
    target = read_csv(out_dir / "target_amplitudes.csv")
    encoded = read_csv(out_dir / "encoded_amplitudes.csv")
    ax.plot(target["index"], target["probability"], "o-", label="target |amplitude|^2")
    ax.plot(encoded["index"], encoded["probability"], "x--", label="encoded |amplitude|^2")
    ax.set_xlabel("grid index j")
    ax.set_ylabel("probability")
    ax.legend()


def plot_fit(out_dir, ax):
    data = read_csv(out_dir / "fitted_vs_target.csv")
    ax.plot(data["index"], data["target"], "ko-", label="target")
    ax.plot(data["index"], data["fitted"], "r--", label="fitted mixture")
    for name in sorted(k for k in data if k.startswith("term_")):
        ax.plot(data["index"], data[name], ":", alpha=0.7, label=name)
    ax.set_xlabel("grid index j")
    ax.set_ylabel("amplitude")
    ax.legend()


def plot_sweep(out_dir, ax):
    data = read_csv(out_dir / "qara_sweep.csv")
    ratios = sorted(set(data["delta_ratio"]))
    for r in ratios:
        sel = [i for i, x in enumerate(data["delta_ratio"]) if x == r]
        w = [data["w"][i] for i in sel]
        ax.loglog(w, [data["wf_qara"][i] for i in sel], "o", label=f"reduce+amplify, dw/w={r}")
        ax.loglog(w, [data["wf_qaa"][i] for i in sel], "x", alpha=0.5, label=f"amplify only, dw/w={r}")
        ax.axhline(data["eps_qara"][sel[0]], color="gray", lw=0.8)
    ax.set_xlabel("true success weight w")
    ax.set_ylabel("failure weight")
    ax.legend(fontsize=7)


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("kind", choices=["encoding", "fit", "sweep"])
    parser.add_argument("out_dir", type=Path)
    parser.add_argument("--save", type=Path, default=None)
    args = parser.parse_args(argv)

    fig, ax = plt.subplots(figsize=(7, 4.5))
    {"encoding": plot_encoding, "fit": plot_fit, "sweep": plot_sweep}[args.kind](args.out_dir, ax)
    fig.tight_layout()
    target = args.save or (args.out_dir / f"{args.kind}.png")
    fig.savefig(target, dpi=150)
    print(f"wrote {target}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
