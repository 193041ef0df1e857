"""Command-line entry point.

One executable with subcommands: trace (build and export a pattern model),
estimate (grid-less angle from a phase vector or snapshot file), baseline
(grid-search references), opcount (cost models), simulate (Monte Carlo
sweeps) and presets (list bundled scenarios). Angles cross this boundary
in degrees; the library itself works in radians. Exit codes: 0 success,
1 usage error, 2 runtime or validation error.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

import numpy as np

from . import harness
from .baselines import GridSpec, estimate_mle, estimate_music, op_count
from .geometry import make_geometry, make_pairs
from .pdp import estimate_pdp
from .signal import measure_wpd
from .wpdp import (
    detect_ambiguity,
    export_segments_csv,
    load_model,
    save_model,
    trace_wpdp,
)

OUTPUT_DIR_ENV = "PDP_OUTPUT_DIR"
SNAPSHOT_FORMAT = "snapshot/1"


class _Parser(argparse.ArgumentParser):
    """argparse with usage errors mapped to exit code 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _out_path(path: str) -> str:
    """Resolve an output path, honoring the output-directory override."""
    base = os.environ.get(OUTPUT_DIR_ENV)
    if base and not os.path.isabs(path):
        return os.path.join(base, path)
    return path


def _parse_float_list(text: str, name: str) -> list[float]:
    try:
        return [float(tok) for tok in text.split(",") if tok.strip() != ""]
    except ValueError:
        raise ValueError(f"{name} must be a comma-separated list of numbers, got {text!r}")


def _load_geometry(spec: str):
    """Geometry from an inline comma list or a JSON file with 'positions'."""
    try:
        positions = [float(tok) for tok in spec.split(",")]
    except ValueError:
        positions = None
    if positions is not None:
        return make_geometry(positions)
    with open(spec, "r", encoding="utf-8") as fh:
        payload = json.load(fh)
    return make_geometry(payload["positions"])


def _parse_pairs(text: str):
    if text in ("all", "adjacent"):
        return text
    pairs = []
    for tok in text.split(","):
        parts = tok.split("-")
        if len(parts) != 2:
            raise ValueError(f"pair {tok!r} must look like 'u-v' (0-based indices)")
        pairs.append((int(parts[0]), int(parts[1])))
    return pairs


def _load_snapshot(path: str) -> np.ndarray:
    with open(path, "r", encoding="utf-8") as fh:
        payload = json.load(fh)
    if payload.get("format") != SNAPSHOT_FORMAT:
        raise ValueError(f"unsupported snapshot format (expected {SNAPSHOT_FORMAT!r})")
    re = np.asarray(payload["x_real"], dtype=float)
    im = np.asarray(payload["x_imag"], dtype=float)
    if re.shape != im.shape:
        raise ValueError("x_real and x_imag lengths differ")
    return re + 1j * im


def _parse_grid(text: str | None) -> GridSpec:
    if text is None:
        return GridSpec()
    vals = _parse_float_list(text, "--grid")
    if len(vals) != 5:
        raise ValueError("--grid needs 5 numbers: lo,hi,coarse_step,fine_halfwidth,fine_step (deg)")
    return GridSpec(*vals)


def _print_estimate(est) -> None:
    line = f"theta_deg={est.theta_deg!r}"
    if est.line_index is not None:
        line += f" line={est.line_index} residual={est.residual!r}"
    line += f" clamped={est.clamped}"
    print(line)


def _cmd_trace(args) -> int:
    g = _load_geometry(args.geometry)
    ps = make_pairs(g, _parse_pairs(args.pairs))
    bounds = _parse_float_list(args.range_deg, "--range-deg")
    if len(bounds) != 2:
        raise ValueError("--range-deg needs two numbers: lo,hi (degrees)")
    model = trace_wpdp(ps, (math.radians(bounds[0]), math.radians(bounds[1])))
    print(f"K={model.k}")
    report = detect_ambiguity(model, tol=1e-9)
    if report.collisions:
        print(f"warning: {len(report.collisions)} near-coincident projection points", file=sys.stderr)
    if args.out:
        path = _out_path(args.out)
        save_model(model, path)
        print(f"model written to {path}", file=sys.stderr)
    if args.export_csv:
        path = _out_path(args.export_csv)
        export_segments_csv(model, path)
        print(f"segments written to {path}", file=sys.stderr)
    return 0


def _cmd_estimate(args) -> int:
    model = load_model(args.model)
    if args.psi is not None:
        psi = np.asarray(_parse_float_list(args.psi, "--psi"), dtype=float)
    else:
        x = _load_snapshot(args.snapshot)
        psi = measure_wpd(x, model.pair_set)
    _print_estimate(estimate_pdp(psi, model))
    return 0


def _cmd_baseline(args) -> int:
    if args.model:
        g = load_model(args.model).pair_set.geometry
    elif args.geometry:
        g = _load_geometry(args.geometry)
    else:
        raise ValueError("baseline needs --model or --geometry")
    x = _load_snapshot(args.snapshot)
    grid = _parse_grid(args.grid)
    if args.method == "mle":
        est = estimate_mle(x, g, grid)
    else:
        est = estimate_music(x, g, grid, num_sources=args.num_sources)
    _print_estimate(est)
    return 0


def _cmd_opcount(args) -> int:
    count = op_count(
        args.method,
        n=args.n,
        k=args.k,
        k_c=args.kc,
        k_f=args.kf,
        k_i=args.ki,
        n_v=args.nv,
    )
    print(count)
    return 0


def _cmd_simulate(args) -> int:
    if args.config:
        cfg = harness.load_config(args.config)
    elif args.preset:
        if args.preset not in harness.PRESETS:
            raise ValueError(
                f"unknown preset {args.preset!r}; available: {', '.join(sorted(harness.PRESETS))}"
            )
        cfg = harness.PRESETS[args.preset]
    else:
        raise ValueError("simulate needs --preset or --config")
    overrides = {}
    if args.trials is not None:
        overrides["trials"] = args.trials
    if args.seed is not None:
        overrides["master_seed"] = args.seed
    if args.snr is not None:
        overrides["snr_db"] = tuple(_parse_float_list(args.snr, "--snr"))
    if args.estimators is not None:
        overrides["estimators"] = tuple(args.estimators.split(","))
    if overrides:
        cfg = harness.ScenarioConfig(
            **{
                **{f: getattr(cfg, f) for f in cfg.__dataclass_fields__},
                **overrides,
            }
        )
    result = harness.run_scenario(cfg, workers=args.workers, collect_timing=args.timing)
    text = harness.summary_csv(result)
    if args.out:
        path = _out_path(args.out)
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
        print(f"results written to {path}", file=sys.stderr)
    else:
        sys.stdout.write(text)
    return 0


def _cmd_presets(args) -> int:
    if args.action != "list":
        raise ValueError(f"unknown presets action {args.action!r}")
    for name, cfg in harness.PRESETS.items():
        print(f"{name}: positions={list(cfg.positions)}")
    return 0


def build_parser() -> _Parser:
    parser = _Parser(prog="pdp", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("trace", help="build a pattern model for an array layout")
    p.add_argument("--geometry", required=True, help="comma list (half-wavelength units) or JSON file")
    p.add_argument("--pairs", default="all", help="all | adjacent | explicit 'u-v,u-v' (0-based)")
    p.add_argument("--range-deg", default="-90,90", help="traced angle range, degrees")
    p.add_argument("--out", help="write the model JSON here")
    p.add_argument("--export-csv", help="write per-segment rows for plotting")
    p.set_defaults(func=_cmd_trace)

    p = sub.add_parser("estimate", help="grid-less angle estimate from a traced model")
    p.add_argument("--model", required=True, help="model file written by trace")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--psi", help="comma list of wrapped phase differences (radians)")
    src.add_argument("--snapshot", help="snapshot JSON file")
    p.set_defaults(func=_cmd_estimate)

    p = sub.add_parser("baseline", help="grid-search reference estimators")
    p.add_argument("--method", required=True, choices=("mle", "music"))
    p.add_argument("--model", help="take the array layout from this model file")
    p.add_argument("--geometry", help="comma list or JSON file")
    p.add_argument("--snapshot", required=True, help="snapshot JSON file")
    p.add_argument("--grid", help="lo,hi,coarse_step,fine_halfwidth,fine_step (deg)")
    p.add_argument("--num-sources", type=int, default=1)
    p.set_defaults(func=_cmd_baseline)

    p = sub.add_parser("opcount", help="online multiplication count of a method")
    p.add_argument(
        "--method",
        required=True,
        choices=("pdp", "two-step", "2q-order", "em-esprit", "music", "mle"),
    )
    p.add_argument("--n", type=int, help="antenna count")
    p.add_argument("--k", type=int, help="traced line count (pdp)")
    p.add_argument("--kc", type=int, help="coarse grid points")
    p.add_argument("--kf", type=int, help="fine grid points")
    p.add_argument("--ki", type=int, help="iteration count (em-esprit)")
    p.add_argument("--nv", type=int, help="virtual array size (em-esprit)")
    p.set_defaults(func=_cmd_opcount)

    p = sub.add_parser("simulate", help="Monte Carlo RMSE-vs-SNR sweep, CSV output")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--preset", help="bundled scenario name (see presets list)")
    src.add_argument("--config", help="scenario JSON file")
    p.add_argument("--trials", type=int, help="override trials per SNR point")
    p.add_argument("--seed", type=int, help="override master seed")
    p.add_argument("--snr", help="override SNR list, comma dB values")
    p.add_argument("--estimators", help="override estimator list, e.g. pdp,mle")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--timing", action="store_true", help="collect wall-clock runtimes (breaks byte reproducibility)")
    p.add_argument("--out", help="write CSV here instead of stdout")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("presets", help="inspect bundled scenarios")
    p.add_argument("action", choices=("list",))
    p.set_defaults(func=_cmd_presets)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 1
    try:
        return args.func(args)
    except (ValueError, OSError, KeyError, RuntimeError) as exc:
        print(f"pdp: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
