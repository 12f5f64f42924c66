"""Command-line entry point: ``tvlevelset <subcommand> ...``.

Exit codes: 0 success, 1 validation or input error, 2 some sweep cells failed.
"""

import argparse
import json
import logging
import os
import sys

import numpy as np

from . import harness
from .core import LevelSpec, extract_level_set
from .pgm import PGMError, load_image, save_image, save_mask
from .phantom import default_phantom_spec, load_phantom_spec, render_phantom
from .risk import empirical_risk, excess_risk, threshold_baseline
from .sensing import (
    estimate_lipschitz,
    generate_gaussian_operator,
    load_measurements,
    load_operator,
    measure,
    proxy_observations,
    save_measurements,
    save_operator,
)
from .solver import NumericalFailure, SolverConfig, solve

EXIT_OK, EXIT_INVALID, EXIT_PARTIAL = 0, 1, 2


def _floats(text):
    return [float(v) for v in text.split(",") if v.strip()]


def _load_truth(args):
    if args.image:
        return load_image(args.image)
    spec = load_phantom_spec(args.spec) if getattr(args, "spec", None) else default_phantom_spec()
    return render_phantom(spec)


def _shape(args, p):
    if args.rows and args.cols:
        return args.rows, args.cols
    side = int(round(np.sqrt(p)))
    if side * side != p:
        raise ValueError(f"p={p} is not square; pass --rows and --cols")
    return side, side


def _emit(obj):
    print(json.dumps(obj, indent=2, sort_keys=True))


def cmd_phantom(args):
    spec = load_phantom_spec(args.spec) if args.spec else default_phantom_spec()
    img = render_phantom(spec)
    save_image(img, args.out)
    if args.mask_out:
        save_mask(extract_level_set(img, args.gamma), args.mask_out)
    _emit({"out": args.out, "rows": spec.rows, "cols": spec.cols})


def cmd_sense(args):
    x = _load_truth(args)
    p = x.size
    k = args.k if args.k else max(1, int(round(args.k_frac * p)))
    if not 1 <= k <= p:
        raise ValueError(f"k must lie in [1, {p}], got {k}")
    noise_seed = args.noise_seed if args.noise_seed is not None else args.seed + 1
    op = generate_gaussian_operator(k, p, args.seed)
    meas = measure(op, x.reshape(-1), args.sigma, noise_seed)
    os.makedirs(args.out_dir, exist_ok=True)
    save_operator(op, os.path.join(args.out_dir, "operator.bin"))
    save_measurements(meas, os.path.join(args.out_dir, "measurements.bin"))
    _emit({"k": k, "p": p, "rows": x.shape[0], "cols": x.shape[1], "sigma": args.sigma,
           "seed": args.seed, "noise_seed": noise_seed})


def cmd_solve(args):
    op = load_operator(args.operator)
    meas = load_measurements(args.measurements)
    shape = _shape(args, op.p)
    level = LevelSpec.for_level(args.gamma, lower=args.lower, upper=args.upper)
    cfg = SolverConfig(alpha=args.alpha, level=level, max_iters=args.max_iters,
                       rel_tol=args.rel_tol, flavor=args.tv)
    estimate_lipschitz(op)
    res = solve(op, meas, cfg, shape)
    if args.out:
        save_image(res.estimate, args.out)
    if args.npy_out:
        np.save(args.npy_out, res.estimate)
    if args.mask_out:
        save_mask(extract_level_set(res.estimate, args.gamma), args.mask_out)
    _emit({"iterations": res.iterations, "converged": res.converged,
           "final_rel_change": res.final_rel_change,
           "objective": float(res.objective_trace[-1])})


def cmd_baseline(args):
    op = load_operator(args.operator)
    meas = load_measurements(args.measurements)
    shape = _shape(args, op.p)
    z = proxy_observations(op, meas).reshape(shape)
    mask = threshold_baseline(z, args.gamma)
    save_mask(mask, args.out)
    _emit({"out": args.out, "members": int(mask.sum())})


def cmd_evaluate(args):
    truth = _load_truth(args)
    mask = load_image(args.mask) >= 128
    if mask.shape != truth.shape:
        raise ValueError(f"mask shape {mask.shape} differs from truth shape {truth.shape}")
    _emit({
        "excess_risk": excess_risk(truth, args.gamma, mask),
        "empirical_risk": empirical_risk(truth, args.gamma, mask),
        "sym_diff_size": int((extract_level_set(truth, args.gamma) ^ mask).sum()),
    })


def cmd_sweep(args):
    if args.manifest:
        grid = harness.grid_from_manifest(args.manifest)
    else:
        if args.image:
            source = args.image
        elif args.spec:
            source = load_phantom_spec(args.spec)
        else:
            source = default_phantom_spec()
        methods = [m.strip() for m in args.methods.split(",") if m.strip()]
        alphas = _floats(args.alphas) if args.alphas else harness.default_alpha_grid()
        grid = harness.ExperimentGrid.from_fractions(
            source, args.gamma, _floats(args.k_fracs), _floats(args.sigmas),
            alpha_grid=alphas, base_seed=args.seed, methods=methods,
            lower=args.lower, upper=args.upper, replicates=args.replicates, flavor=args.tv,
            max_iters=args.max_iters, rel_tol=args.rel_tol,
            record_wall_time=args.record_wall_time,
        )
    results = harness.run_grid(grid, args.out)
    failed = [r for r in results if r.failed]
    for r in results:
        status = "FAILED" if r.failed else f"excess_risk={r.excess_risk:.6g}"
        alpha = "" if r.best_alpha is None else f" alpha={r.best_alpha:.4g}"
        print(f"k={r.k} sigma={r.sigma:g} {r.method}{alpha} {status}")
    return EXIT_PARTIAL if failed else EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(prog="tvlevelset", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_truth(sp):
        sp.add_argument("--image", help="PGM image (default: benchmark phantom)")
        sp.add_argument("--spec", help="phantom spec JSON")

    def add_shape(sp):
        sp.add_argument("--rows", type=int)
        sp.add_argument("--cols", type=int)

    sp = sub.add_parser("phantom", help="render a phantom to PGM")
    sp.add_argument("--spec", help="phantom spec JSON (default: benchmark phantom)")
    sp.add_argument("--out", required=True)
    sp.add_argument("--mask-out", help="also write the gamma level set")
    sp.add_argument("--gamma", type=float, default=70.0)
    sp.set_defaults(func=cmd_phantom)

    sp = sub.add_parser("sense", help="draw a Gaussian operator and measurements")
    add_truth(sp)
    sp.add_argument("--k", type=int)
    sp.add_argument("--k-frac", type=float, default=0.5)
    sp.add_argument("--sigma", type=float, default=0.0)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--noise-seed", type=int)
    sp.add_argument("--out-dir", required=True)
    sp.set_defaults(func=cmd_sense)

    sp = sub.add_parser("solve", help="box-constrained TV reconstruction")
    sp.add_argument("--operator", required=True)
    sp.add_argument("--measurements", required=True)
    add_shape(sp)
    sp.add_argument("--alpha", type=float, required=True)
    sp.add_argument("--gamma", type=float, required=True)
    sp.add_argument("--lower", type=float, help="default: gamma - 5")
    sp.add_argument("--upper", type=float, default=255.0)
    sp.add_argument("--max-iters", type=int, default=500)
    sp.add_argument("--rel-tol", type=float, default=1e-4)
    sp.add_argument("--tv", choices=["iso", "aniso"], default="iso")
    sp.add_argument("--out", help="estimate as PGM")
    sp.add_argument("--npy-out", help="estimate as .npy (full precision)")
    sp.add_argument("--mask-out", help="thresholded estimate as PGM")
    sp.set_defaults(func=cmd_solve)

    sp = sub.add_parser("baseline", help="threshold the proxy A^T y")
    sp.add_argument("--operator", required=True)
    sp.add_argument("--measurements", required=True)
    add_shape(sp)
    sp.add_argument("--gamma", type=float, required=True)
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=cmd_baseline)

    sp = sub.add_parser("evaluate", help="risk of a mask against the truth")
    add_truth(sp)
    sp.add_argument("--mask", required=True, help="mask PGM (members >= 128)")
    sp.add_argument("--gamma", type=float, required=True)
    sp.set_defaults(func=cmd_evaluate)

    sp = sub.add_parser("sweep", help="full (k, sigma) grid with clairvoyant alpha")
    add_truth(sp)
    sp.add_argument("--manifest", help="rerun exactly the grid recorded in a manifest")
    sp.add_argument("--k-fracs", default="1,0.5,0.25")
    sp.add_argument("--sigmas", default="0,10")
    sp.add_argument("--alphas", help="comma-separated, ascending (default: 12 log-spaced in [1e-3, 1e2])")
    sp.add_argument("--gamma", type=float, default=70.0)
    sp.add_argument("--lower", type=float, help="default: gamma - 5")
    sp.add_argument("--upper", type=float, default=255.0)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--methods", default="tv,proxy-threshold")
    sp.add_argument("--replicates", type=int, default=1)
    sp.add_argument("--tv", choices=["iso", "aniso"], default="iso")
    sp.add_argument("--max-iters", type=int, default=500)
    sp.add_argument("--rel-tol", type=float, default=1e-4)
    sp.add_argument("--record-wall-time", action="store_true",
                    help="put measured times in results.csv (breaks byte-identical reruns)")
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        code = args.func(args)
    except (ValueError, PGMError, FileNotFoundError, NumericalFailure) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    return EXIT_OK if code is None else code


if __name__ == "__main__":
    sys.exit(main())
