"""Command-line interface.

Exit codes: 0 success, 2 usage error, 3 domain validation failure, 4 I/O failure.
Summaries are printed as single-line ``key=value`` pairs.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .dataset import (
    OUTPUT_DIR_ENV,
    DatasetConfig,
    default_output_dir,
    generate_dataset,
    load_dataset,
    trajectory_rng,
    write_dataset,
)
from .dynamics import Trajectory, conservation_drift, propagate_arrays
from .exceptions import RigidSpinError
from .identification import IdentConfig, ObservationSet, identify_inertia, normalize_trace
from .inertia import PRESET_ALIASES, PRESETS, check_inertia, classify_equilibria, get_preset, principal_decomposition
from .so3 import random_quaternion, random_unit_vector
from .velocity import estimate_body_angular_velocity

EXIT_OK, EXIT_USAGE, EXIT_DOMAIN, EXIT_IO = 0, 2, 3, 4


class UsageError(Exception):
    pass


def _vec(text, n, name):
    try:
        vals = [float(x) for x in text.split(",")]
    except ValueError:
        raise UsageError(f"{name}: expected {n} comma-separated numbers, got {text!r}") from None
    if len(vals) != n:
        raise UsageError(f"{name}: expected {n} comma-separated numbers, got {len(vals)}")
    return np.array(vals)


def _fmt(v):
    return ",".join(f"{x:.10g}" for x in np.ravel(v))


def load_inertia(source: str) -> np.ndarray:
    """Preset name/alias, or a JSON file ``{"J": [[...], [...], [...]]}``; validated SPD."""
    key = source.lower()
    if key in PRESET_ALIASES or source.upper() in PRESETS:
        J = get_preset(source)
    else:
        path = Path(source)
        if not path.exists():
            raise UsageError(f"--inertia: {source!r} is neither a preset nor an existing file")
        with open(path, encoding="utf-8") as fh:
            try:
                J = np.asarray(json.load(fh)["J"], dtype=float)
            except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
                raise RigidSpinError(f"{path}: expected JSON object with key 'J' ({exc})") from None
    return check_inertia(J)


def cmd_simulate(args) -> int:
    J = load_inertia(args.inertia)
    rng = trajectory_rng(args.seed, 0)
    q0 = random_quaternion(rng) if args.q0 == "random" else _vec(args.q0, 4, "--q0")
    if abs(np.linalg.norm(q0) - 1.0) > 1e-6:
        raise RigidSpinError("--q0 must be a unit quaternion (x,y,z,w)")
    q0 = q0 / np.linalg.norm(q0)
    if args.pi0.startswith("random"):
        _, _, norm = args.pi0.partition(":")
        try:
            norm = float(norm) if norm else 50.0
        except ValueError:
            raise UsageError(f"--pi0: bad norm in {args.pi0!r}") from None
        pi0 = norm * random_unit_vector(rng)
    else:
        pi0 = _vec(args.pi0, 3, "--pi0")
    if args.steps < 0:
        raise UsageError("--steps must be non-negative")
    if not args.dt > 0:
        raise UsageError("--dt must be positive")

    q, pi = propagate_arrays(q0[None], pi0[None], J, args.dt, args.steps)
    out = Path(args.out) if args.out else default_output_dir("simulate")
    config = {"command": "simulate", "inertia": args.inertia, "q0": q0.tolist(),
              "pi0": pi0.tolist(), "dt": args.dt, "steps": args.steps, "seed": args.seed}
    write_dataset(out, J, args.dt, q, pi, config, force=args.force)
    energy, casimir = conservation_drift(Trajectory(args.dt, q, pi), J)
    print(f"energy_drift={energy:.3e} casimir_drift={casimir:.3e} steps={args.steps} "
          f"final_q={_fmt(q[-1, 0])} final_pi={_fmt(pi[-1, 0])} out={out}")
    return EXIT_OK


def cmd_generate(args) -> int:
    J = load_inertia(args.preset)
    inertia = args.preset if args.preset.upper() in PRESETS or args.preset.lower() in PRESET_ALIASES else J
    cfg = DatasetConfig(inertia=inertia, num_trajectories=args.n, steps=args.steps, dt=args.dt,
                        pi_norm=args.pi_norm, seed=args.seed)
    out = Path(args.out) if args.out else default_output_dir("dataset")
    manifest = generate_dataset(cfg, out, force=args.force)
    cons = manifest["conservation"]
    print(f"manifest={out / 'manifest.json'} records={out / manifest['records_file']} "
          f"trajectories={manifest['num_trajectories']} "
          f"records_count={manifest['num_trajectories'] * (manifest['steps'] + 1)} "
          f"energy_drift={cons['max_energy_drift']:.3e} casimir_drift={cons['max_casimir_drift']:.3e}")
    return EXIT_OK


def cmd_estimate(args) -> int:
    ds = load_dataset(args.input)
    n, length = ds.R.shape[0], ds.R.shape[1]
    if not 0 <= args.traj < n:
        raise UsageError(f"--traj must be in [0, {n - 1}]")
    if not 0 <= args.step < length - 1:
        raise UsageError(f"--step must be in [0, {length - 2}] (needs a following frame)")
    est = estimate_body_angular_velocity(ds.R[args.traj, args.step], ds.R[args.traj, args.step + 1], ds.dt)
    line = f"omega={_fmt(est.omega)} branch={est.branch}"
    truth = ds.omega[args.traj, args.step]
    dev = float(np.linalg.norm(est.omega - truth))
    scale = float(np.linalg.norm(truth))
    line += f" deviation={dev:.6e}"
    if scale > 0:
        line += f" relative_deviation={dev / scale:.6e}"
    print(line)
    return EXIT_OK


def cmd_identify(args) -> int:
    ds = load_dataset(args.input)
    if args.stride < 1:
        raise UsageError("--stride must be at least 1")
    obs = ObservationSet(ds.dt * args.stride, [R[::args.stride] for R in ds.R])
    cfg = IdentConfig(learning_rate=args.lr, iterations=args.iters, lambda_R=args.lambda_r,
                      lambda_Pi=args.lambda_pi, normalization=args.normalization, seed=args.seed,
                      sequence_length=args.sequence_length or None)
    result = identify_inertia(obs, cfg)
    doc = result.to_dict()
    line = (f"loss={result.loss:.6e} iterations={result.n_iter} converged={str(result.converged).lower()} "
            f"J_normalized={_fmt(result.J_normalized)}")
    if ds.inertia is not None:
        truth = normalize_trace(ds.inertia)
        err = float(np.linalg.norm(normalize_trace(result.J) - truth) / np.linalg.norm(truth))
        doc["normalized_error"] = err
        line += f" normalized_error={err:.6e}"
    out = Path(args.out) if args.out else default_output_dir("identify") / "result.json"
    out.parent.mkdir(parents=True, exist_ok=True)
    with open(out, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")
    print(line + f" out={out}")
    return EXIT_OK


def cmd_classify(args) -> int:
    J = load_inertia(args.inertia)
    moments, axes = principal_decomposition(J)
    print(f"moments={_fmt(moments)}")
    report = classify_equilibria(J)
    for i, (axis, label) in enumerate(zip(report.principal_axes, report.axis_labels), start=1):
        print(f"axis{i}={_fmt(axis)} moment={report.principal_moments[i - 1]:.10g} label={label}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="rigidspin",
        description="Free rigid-body rotation: simulation, datasets, velocity estimation, "
        "inertia identification.",
        epilog=f"Default output directory comes from ${OUTPUT_DIR_ENV} (else ./rigidspin-output).",
    )
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("simulate", help="integrate a single trajectory")
    s.add_argument("--inertia", required=True, help="preset (J0..J5 or alias) or JSON file")
    s.add_argument("--q0", default="random", help="x,y,z,w or 'random'")
    s.add_argument("--pi0", default="random:50", help="a,b,c or 'random:NORM' (use --pi0=-1,0,0 for negatives)")
    s.add_argument("--dt", type=float, default=1e-3)
    s.add_argument("--steps", type=int, default=100)
    s.add_argument("--out")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--force", action="store_true", help="overwrite an existing output")
    s.set_defaults(func=cmd_simulate)

    g = sub.add_parser("generate-dataset", help="generate a seeded trajectory dataset")
    g.add_argument("--preset", required=True, help="preset (J0..J5 or alias) or JSON file")
    g.add_argument("--n", type=int, default=1000)
    g.add_argument("--steps", type=int, default=100)
    g.add_argument("--dt", type=float, default=1e-3)
    g.add_argument("--pi-norm", type=float, default=50.0)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out")
    g.add_argument("--force", action="store_true")
    g.set_defaults(func=cmd_generate)

    e = sub.add_parser("estimate-velocity", help="body angular velocity between two recorded frames")
    e.add_argument("--in", dest="input", required=True, help="dataset directory or manifest")
    e.add_argument("--traj", type=int, default=0)
    e.add_argument("--step", type=int, default=0)
    e.set_defaults(func=cmd_estimate)

    i = sub.add_parser("identify-inertia", help="identify J from the dataset's rotations")
    i.add_argument("--in", dest="input", required=True)
    i.add_argument("--lr", type=float, default=1e-3)
    i.add_argument("--iters", type=int, default=1000)
    i.add_argument("--lambda-r", type=float, default=1.0)
    i.add_argument("--lambda-pi", type=float, default=1.0)
    i.add_argument("--normalization", choices=["trace", "none"], default="trace")
    i.add_argument("--sequence-length", type=int, default=10, help="window length; 0 for whole sequences")
    i.add_argument("--stride", type=int, default=1)
    i.add_argument("--seed", type=int, default=0)
    i.add_argument("--out")
    i.set_defaults(func=cmd_identify)

    c = sub.add_parser("classify-stability", help="principal axes and spin stability")
    c.add_argument("--inertia", required=True)
    c.set_defaults(func=cmd_classify)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except KeyError as exc:
        print(f"error: {exc.args[0]}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:  # includes RigidSpinError
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
