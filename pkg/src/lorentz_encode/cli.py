"""Command-line front end: encode | fit | qara-sweep | metrics.

Each subcommand reads a JSON config, writes CSV/JSON artifacts into ``--out``,
and is fully deterministic given the config (seeds live in the config; the
``--seed`` flag overrides).  Files are written atomically (temp file + rename)
with 17-significant-digit floats so outputs round-trip and diff cleanly.
Failures produce a machine-readable JSON error on stderr and a nonzero exit.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
from pathlib import Path
from typing import Optional

import numpy as np

from . import circuits, fitter, qara
from .locfuncs import LCSpec, LorentzianSpec, lc_target_state, lorentzian_vector, normalize_lc
from .statevector import fidelity


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def _write_atomic(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _write_csv(path: Path, header: list[str], rows: list[list]) -> None:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_fmt(v) if isinstance(v, float) else str(v) for v in row))
    _write_atomic(path, "\n".join(lines) + "\n")


def _write_json(path: Path, obj) -> None:
    _write_atomic(path, json.dumps(obj, indent=2, sort_keys=True) + "\n")


def _parse_coeff(c) -> complex:
    if isinstance(c, (int, float)):
        return complex(c)
    if isinstance(c, list) and len(c) == 2:
        return complex(c[0], c[1])
    raise ValueError(f"coefficient must be a number or [re, im] pair, got {c!r}")


def load_lcspec(config: dict, dim_override: Optional[int] = None) -> LCSpec:
    """Build a normalized LCSpec from the encode-config JSON."""
    n_q = int(config["n_q"])
    dim = int(dim_override or config.get("dim", 1))
    terms = []
    for t in config["terms"]:
        a, k_c = t["a"], t["k_c"]
        if dim == 1 and not isinstance(a, list):
            a, k_c = [a], [k_c]
        if len(a) != dim or len(k_c) != dim:
            raise ValueError(f"term {t!r} does not carry {dim} axes")
        terms.append(
            tuple(LorentzianSpec(float(a[mu]), int(k_c[mu]), n_q) for mu in range(dim))
        )
    coeffs = tuple(_parse_coeff(c) for c in config["coeffs"])
    return normalize_lc(LCSpec(n_q=n_q, terms=tuple(terms), coeffs=coeffs, dim=dim))


def _state_rows(state) -> list[list]:
    amps = state.amplitudes
    probs = np.abs(amps) ** 2
    return [[j, float(amps[j].real), float(amps[j].imag), float(probs[j])] for j in range(amps.size)]


def cmd_encode(config: dict, out: Path, args) -> int:
    lc = load_lcspec(config, args.dim)
    plan = None
    if args.deterministic:
        plan = qara.plan_for_lc(lc)
        circ = circuits.c_lc_deterministic(lc, plan, qft_dagger=args.qft_dagger)
    elif lc.dim > 1:
        circ = circuits.c_lc_product(lc, qft_dagger=args.qft_dagger)
    elif lc.is_complex:
        circ = circuits.c_lc_complex(lc, qft_dagger=args.qft_dagger)
    else:
        circ = circuits.c_lc_lorentzian(lc, qft_dagger=args.qft_dagger)

    target = lc_target_state(lc)
    prob, data_state = circuits.run_encoding(circ)
    fid = fidelity(data_state, target)
    m = circuits.metrics(circ)

    _write_csv(out / "target_amplitudes.csv", ["index", "re", "im", "probability"], _state_rows(target))
    _write_csv(out / "encoded_amplitudes.csv", ["index", "re", "im", "probability"], _state_rows(data_state))
    _write_json(
        out / "summary.json",
        {
            "w_analytic": 1.0 / lc.lam**2,
            "w_simulated": prob,
            "fidelity": fid,
            "m_opt": None if plan is None else plan.m_opt,
            "theta_ar_opt": None if plan is None else plan.theta_ar_opt,
            "depth": m.depth,
            "gate_counts": {"n_1q": m.n_1q, "n_cx": m.n_cx, "n_mcu": m.n_mcu, "n_qft": m.n_qft},
            "deterministic": bool(args.deterministic),
            "dim": lc.dim,
            "n_loc": lc.n_loc,
            "n_q": lc.n_q,
            "qft_dagger": bool(args.qft_dagger),
        },
    )
    return 0


def cmd_fit(config: dict, out: Path, args) -> int:
    target_path = Path(config["target"])
    if target_path.suffix.lower() == ".json":
        target = fitter.load_target_json(target_path)
    else:
        target = fitter.load_target_csv(target_path)
    fc = fitter.FitConfig(
        n_loc=int(config["n_loc"]),
        beta=float(config.get("beta", 200.0)),
        n_metropolis=int(config.get("n_metropolis", 400)),
        n_rate_iters=int(config.get("n_rate_iters", 3)),
        seed=int(args.seed if args.seed is not None else config.get("seed", 1)),
        k_c_init=config.get("k_c_init"),
        a_init=config.get("a_init"),
    )
    result = fitter.fit(target, fc)

    fitted = np.zeros(target.n_points)
    contribs = []
    for d, a, k in zip(result.d, result.a, result.k_c):
        c = d * np.roll(lorentzian_vector(target.n_q, a), int(k))
        contribs.append(c)
        fitted += c
    header = ["index", "target", "fitted"] + [f"term_{l}" for l in range(fc.n_loc)]
    rows = [
        [j, float(target.samples[j]), float(fitted[j])] + [float(c[j]) for c in contribs]
        for j in range(target.n_points)
    ]
    _write_csv(out / "fitted_vs_target.csv", header, rows)
    _write_json(
        out / "fit_result.json",
        {
            "d": [float(x) for x in result.d],
            "a": [float(x) for x in result.a],
            "k_c": [int(x) for x in result.k_c],
            "F": result.F,
            "seed": result.seed,
            "trace_length": len(result.trace),
            "selection": result.selection,
        },
    )
    return 0


def cmd_qara_sweep(config: dict, out: Path, args) -> int:
    ratios = config.get("delta_ratios", [0.01, 0.04, 0.1])
    if "w_grid" in config:
        w_grid = [float(w) for w in config["w_grid"]]
    else:
        n_w = int(config.get("n_w", 50))
        w_min = float(config.get("w_min", 1e-4))
        w_max = float(config.get("w_max", 0.5))
        if n_w < 1 or not 0 < w_min <= w_max <= 1:
            raise ValueError("invalid sweep grid bounds")
        w_grid = list(np.geomspace(w_min, w_max, n_w))
    if not ratios or not w_grid:
        raise ValueError("sweep grids must be non-empty")
    rows = qara.sweep_fig1c([float(r) for r in ratios], w_grid)
    _write_csv(
        out / "qara_sweep.csv",
        ["w", "delta_ratio", "wf_qara", "wf_qaa", "eps_qara"],
        [[r.w, r.delta_ratio, r.wf_qara, r.wf_qaa, r.eps_qara] for r in rows],
    )
    return 0


def _representative_lc(n_q: int, n_loc: int) -> LCSpec:
    # spread the centers and stagger the rates so no pair degenerates
    n = 1 << n_q
    params = [(0.4 + 0.2 * l, (1 + l * max(1, n // n_loc)) % n) for l in range(n_loc)]
    return normalize_lc(LCSpec.one_d(n_q, params, [1.0] * n_loc))


def cmd_metrics(config: dict, out: Path, args) -> int:
    builder = config["builder"]
    rows = []
    if builder in ("u_shift", "u_slater", "u_lorentzian"):
        for n_q in config.get("n_q_values", [2, 4, 8, 16]):
            n_q = int(n_q)
            if builder == "u_shift":
                circ = circuits.u_shift(int(config.get("k", 1)), n_q)
            elif builder == "u_slater":
                circ = circuits.u_slater(float(config.get("a", 0.5)), n_q)
            else:
                circ = circuits.u_lorentzian(float(config.get("a", 0.5)), n_q)
            m = circuits.metrics(circ)
            rows.append([n_q, 1, m.depth, m.n_cx, m.n_mcu])
    elif builder == "c_lc":
        n_q = int(config.get("n_q", 4))
        for n_loc in config.get("n_loc_values", [2, 4, 8]):
            lc = _representative_lc(n_q, int(n_loc))
            m = circuits.metrics(circuits.c_lc_lorentzian(lc))
            rows.append([n_q, int(n_loc), m.depth, m.n_cx, m.n_mcu])
    else:
        raise ValueError(f"unknown builder {builder!r}")
    _write_csv(out / "metrics.csv", ["n_q", "n_loc", "depth", "cx_count", "mcu_count"], rows)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="lorentz-encode",
        description="Encode Lorentzian mixtures on simulated qubits, fit targets, sweep error models, count resources.",
    )
    sub = p.add_subparsers(dest="command", required=True)
    for name, fn in [
        ("encode", cmd_encode),
        ("fit", cmd_fit),
        ("qara-sweep", cmd_qara_sweep),
        ("metrics", cmd_metrics),
    ]:
        sp = sub.add_parser(name)
        sp.add_argument("--config", required=True, help="path to the JSON config")
        sp.add_argument("--out", required=True, help="output directory")
        sp.add_argument("--seed", type=int, default=None, help="override the config seed")
        sp.add_argument("--deterministic", action="store_true", help="use the determinized encoder")
        sp.add_argument("--dim", type=int, choices=(1, 2, 3), default=None)
        sp.add_argument("--qft-dagger", dest="qft_dagger", action="store_true")
        sp.set_defaults(func=fn)
    return p


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = json.loads(Path(args.config).read_text())
        return args.func(config, Path(args.out), args)
    except Exception as exc:  # validation and IO failures become JSON on stderr
        print(json.dumps({"error": str(exc), "command": args.command}), file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
