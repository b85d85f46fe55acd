"""Command-line front end.

Every subcommand writes CSV files plus a ``manifest.json`` into ``--out``.
Exit status 2 means bad arguments, 1 means an I/O failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__, kernels
from .experiment import (
    DEFAULT_ETAS,
    ExperimentConfig,
    classical_baseline,
    eta_scan,
    layer_scan,
    optimize_initial_coin,
    run_walk,
    target_curve,
)
from .graph import GluedTreesSpec, build_glued_trees, export_edge_list
from .walk import InitialCondition, default_initial_condition, hadamard_line_walk


def fmt_prob(x: float) -> str:
    """Shortest round-trip float in scientific notation."""
    return np.format_float_scientific(float(x), unique=True, trim="0")


def fmt_eta(x: float) -> str:
    return repr(float(x))


def _positive_int(text):
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {value}")
    return value


def _nonneg_int(text):
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if value < 0:
        raise argparse.ArgumentTypeError(f"must be >= 0, got {value}")
    return value


def _eta_list(text):
    try:
        etas = [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad eta list {text!r}") from None
    if not etas:
        raise argparse.ArgumentTypeError("eta list is empty")
    for eta in etas:
        if not 0.0 <= eta <= 1.0:
            raise argparse.ArgumentTypeError(f"eta {eta} out of range [0, 1]")
    return tuple(etas)


def _int_list(text):
    try:
        values = [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad integer list {text!r}") from None
    if not values or min(values) < 0:
        raise argparse.ArgumentTypeError(f"need non-negative integers, got {text!r}")
    return values


def _coin(text):
    try:
        amps = [complex(x.replace(" ", "")) for x in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad coin amplitudes {text!r}") from None
    norm = sum(abs(a) ** 2 for a in amps)
    if abs(norm - 1) > 1e-6:
        raise argparse.ArgumentTypeError(f"coin amplitudes have squared norm {norm:.6g}, need 1")
    return [a / math.sqrt(norm) for a in amps]


def _write_csv(path: Path, header, rows):
    with open(path, "w", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def _write_manifest(out: Path, args, started: float, outputs):
    config = {k: v for k, v in vars(args).items() if k != "func"}
    manifest = {
        "command": args.command,
        "config": json.loads(json.dumps(config, default=str)),
        "version": __version__,
        "backend": kernels.BACKEND,
        "duration_seconds": round(time.perf_counter() - started, 3),
        "outputs": [str(p) for p in outputs],
    }
    path = out / "manifest.json"
    path.write_text(json.dumps(manifest, indent=2) + "\n")
    return path


def cmd_build_graph(args):
    spec = GluedTreesSpec(args.layers, "random" if args.gluing == "random" else "alternating", args.seed)
    text = export_edge_list(build_glued_trees(spec))
    if args.out == "-":
        sys.stdout.write(text)
    else:
        Path(args.out).write_text(text)
    print(f"{spec.num_vertices} vertices, target {spec.target}", file=sys.stderr if args.out == "-" else sys.stdout)
    return []


def _initial(args):
    if args.coin is None:
        return default_initial_condition()
    return InitialCondition(0, args.coin)


def cmd_run(args):
    spec = GluedTreesSpec(args.layers)
    config = ExperimentConfig(spec, args.steps, args.eta, _initial(args))
    trace = run_walk(config)
    order = sorted(range(len(config.etas)), key=lambda i: -config.etas[i])
    trace_rows = []
    target_rows = []
    for i in order:
        eta = fmt_eta(config.etas[i])
        table = trace.probabilities[i]
        for t in range(table.shape[0]):
            trace_rows.extend((eta, t, v, fmt_prob(p)) for v, p in enumerate(table[t]))
            target_rows.append((eta, t, fmt_prob(table[t, spec.target])))
    out = args.out
    _write_csv(out / "trace.csv", ("eta", "step", "vertex", "probability"), trace_rows)
    _write_csv(out / "target.csv", ("eta", "step", "probability"), target_rows)
    return [out / "trace.csv", out / "target.csv"]


def cmd_scan(args):
    out = args.out
    if args.mode == "eta":
        spec = GluedTreesSpec(args.layers)
        steps = args.steps or [13, 14, 15, 16, 17, 22]
        scan = eta_scan(spec, steps, args.eta, _initial(args))
        rows = [
            (t, fmt_eta(eta), fmt_prob(p))
            for t in sorted(scan)
            for eta, p in zip(args.eta, scan[t])
        ]
        _write_csv(out / "eta_scan.csv", ("step", "eta", "probability"), rows)
        return [out / "eta_scan.csv"]
    if args.min_layers > args.max_layers:
        raise argparse.ArgumentTypeError("--min-layers exceeds --max-layers")
    result = layer_scan(range(args.min_layers, args.max_layers + 1), args.eta)
    rows = [(fmt_eta(r.eta), r.n, r.peak_step, fmt_prob(r.peak_probability)) for r in result]
    _write_csv(out / "layer_scan.csv", ("eta", "n", "peak_step", "peak_probability"), rows)
    return [out / "layer_scan.csv"]


def cmd_optimize_coin(args):
    best = optimize_initial_coin(GluedTreesSpec(args.layers), args.steps)
    rows = [(repr(best.alpha), repr(best.beta), best.peak_step, fmt_prob(best.peak_probability))]
    _write_csv(args.out / "coin.csv", ("alpha", "beta", "peak_step", "peak_probability"), rows)
    print(f"beta = {best.beta:.3f}, alpha = {best.alpha:.6f}, peak {best.peak_probability:.6f} at step {best.peak_step}")
    return [args.out / "coin.csv"]


def cmd_line_walk(args):
    init = InitialCondition(0, args.coin) if args.coin else InitialCondition(0, [1 / math.sqrt(2), 1j / math.sqrt(2)])
    probs = hadamard_line_walk(args.steps, init)
    rows = [(x - args.steps, fmt_prob(p)) for x, p in enumerate(probs) if p > 0]
    _write_csv(args.out / "line_walk.csv", ("position", "probability"), rows)
    return [args.out / "line_walk.csv"]


def cmd_classical(args):
    history = classical_baseline(GluedTreesSpec(args.layers), args.steps)
    rows = [(t, v, fmt_prob(p)) for t in range(history.shape[0]) for v, p in enumerate(history[t])]
    _write_csv(args.out / "classical.csv", ("step", "vertex", "probability"), rows)
    return [args.out / "classical.csv"]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gluewalk", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = sub.add_parser("build-graph", help="write a glued-trees edge list")
    p.add_argument("--layers", type=_positive_int, required=True)
    p.add_argument("--gluing", choices=("alt", "random"), default="alt")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", default="-", help="output path, '-' for stdout")
    p.set_defaults(func=cmd_build_graph)

    def with_out(p):
        p.add_argument("--out", type=Path, default=Path("."), help="output directory")
        return p

    p = with_out(sub.add_parser("run", help="probability traces for a list of eta"))
    p.add_argument("--layers", type=_positive_int, default=6)
    p.add_argument("--steps", type=_positive_int, default=25)
    p.add_argument("--eta", type=_eta_list, default=DEFAULT_ETAS, help="comma-separated, e.g. 1.0,0.9")
    p.add_argument("--coin", type=_coin, default=None, help='initial coin amplitudes, e.g. "0.431,0.638,0.638"')
    p.set_defaults(func=cmd_run)

    p = with_out(sub.add_parser("scan", help="target probability versus eta or tree depth"))
    p.add_argument("--mode", choices=("eta", "layers"), required=True)
    p.add_argument("--layers", type=_positive_int, default=6)
    p.add_argument("--steps", type=_int_list, default=None, help="steps of interest (eta mode)")
    p.add_argument("--eta", type=_eta_list, default=DEFAULT_ETAS)
    p.add_argument("--coin", type=_coin, default=None)
    p.add_argument("--min-layers", type=_positive_int, default=4)
    p.add_argument("--max-layers", type=_positive_int, default=8)
    p.set_defaults(func=cmd_scan)

    p = with_out(sub.add_parser("optimize-coin", help="best symmetric initial coin for the ideal walk"))
    p.add_argument("--layers", type=_positive_int, default=6)
    p.add_argument("--steps", type=_positive_int, default=25)
    p.set_defaults(func=cmd_optimize_coin)

    p = with_out(sub.add_parser("line-walk", help="Hadamard walk on the line"))
    p.add_argument("--steps", type=_nonneg_int, default=100)
    p.add_argument("--coin", type=_coin, default=None, help="default (|0> + i|1>)/sqrt(2)")
    p.set_defaults(func=cmd_line_walk)

    p = with_out(sub.add_parser("classical", help="classical random walk distribution"))
    p.add_argument("--layers", type=_positive_int, default=6)
    p.add_argument("--steps", type=_nonneg_int, default=25)
    p.set_defaults(func=cmd_classical)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    kernels.set_threads()
    started = time.perf_counter()
    try:
        if args.command != "build-graph":
            args.out.mkdir(parents=True, exist_ok=True)
        outputs = args.func(args)
        if args.command != "build-graph":
            _write_manifest(args.out, args, started, outputs)
    except (argparse.ArgumentTypeError, ValueError) as exc:
        parser.error(str(exc))
    except MemoryError as exc:
        print(f"gluewalk: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"gluewalk: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
