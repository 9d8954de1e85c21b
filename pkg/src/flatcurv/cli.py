"""Command line surface.

Subcommands: generate, curvature, beta, jflat, separate, plane, verify.
Global flags may appear after the subcommand: --seed, --mc-samples,
--exact-budget, --lambda, --out, --format, --config. A config file holds
flat key=value lines mirroring the long flag names; explicit flags win.

Exit codes: 0 success, 2 invalid input, 3 budget or separation failure.
"""

import argparse
import json
import sys

import numpy as np

from ._kernels import backend_name
from .datasets import FAMILIES, GeneratorSpec, generate
from .errors import (
    BudgetExceededError,
    InvalidInputError,
    SelectionError,
    SeparationError,
)
from .integrals import (
    DEFAULT_BUDGET,
    EXACT,
    MonteCarlo,
    ball_curvature_sq,
    leger_integral,
    local_curvature_sq,
    psin_power_integral,
)
from .measure import Ball, farthest_point_indices, load_dataset, save_csv
from .planefit import beta_p, jones_flatness
from .planeselect import select_plane
from .separation import find_separated_balls
from .simplex import CURVATURE_KINDS, CurvatureSpec, Simplex, curvature
from .verify import SUITES, VerifyConfig, verify_suite

SCHEMA_VERSION = 1

_GLOBAL_DEFAULTS = {
    "seed": 0,
    "mc_samples": 200_000,
    "exact_budget": DEFAULT_BUDGET,
    "lam": None,
    "out": None,
    "format": "json",
}


def _parse_point(text):
    try:
        return np.array([float(v) for v in text.split(",")], dtype=np.float64)
    except ValueError:
        raise InvalidInputError(f"field 'center': cannot parse point {text!r}") from None


def _parse_ball(text):
    if ":" not in text:
        raise InvalidInputError(f"field 'ball': expected 'c0,c1,...:radius', got {text!r}")
    coords, radius = text.rsplit(":", 1)
    try:
        r = float(radius)
    except ValueError:
        raise InvalidInputError(f"field 'ball': bad radius {radius!r}") from None
    return Ball(_parse_point(coords), r)


def _parse_simplex(text):
    rows = [r for r in text.split(";") if r.strip()]
    return Simplex(np.array([[float(v) for v in r.split(",")] for r in rows]))


def _load_config(path):
    values = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            for sep in ("=", ":"):
                if sep in line:
                    key, val = line.split(sep, 1)
                    break
            else:
                raise InvalidInputError(f"field 'config' line {lineno}: expected key=value")
            values[key.strip().replace("-", "_")] = val.strip()
    return values


def _add_global_flags(p):
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--mc-samples", dest="mc_samples", type=int, default=None)
    p.add_argument("--exact-budget", dest="exact_budget", type=int, default=None)
    p.add_argument("--lambda", dest="lam", type=float, default=None)
    p.add_argument("--out", default=None)
    p.add_argument("--format", choices=("json", "csv"), default=None)
    p.add_argument("--config", default=None)


def _build_parser():
    top = argparse.ArgumentParser(prog="flatcurv", description=__doc__)
    sub = top.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="emit a generator dataset as CSV")
    p.add_argument("--family", choices=FAMILIES, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--count", type=int, default=None)
    p.add_argument("--level", type=int, default=None)
    p.add_argument("--sigma", type=float, default=0.0)
    _add_global_flags(p)

    p = sub.add_parser("curvature", help="discrete kernel or curvature integrals")
    p.add_argument("--kind", choices=CURVATURE_KINDS, default="mt")
    p.add_argument("--d", type=int, default=None)
    p.add_argument("--dataset", default=None)
    p.add_argument("--simplex", default=None, help="'x0,y0;x1,y1;...' kernel evaluation")
    p.add_argument("--ball", default=None, help="'c0,c1,...:radius' ball integral")
    p.add_argument("--local", action="store_true", help="edge floor lambda*t instead of W domain")
    p.add_argument("--power", type=float, default=2.0)
    p.add_argument("--exact", action="store_true")
    p.add_argument("--mc", action="store_true")
    _add_global_flags(p)

    p = sub.add_parser("beta", help="beta_p numbers on a ball or a default grid")
    p.add_argument("--dataset", required=True)
    p.add_argument("--d", type=int, default=None)
    p.add_argument("--p", type=float, default=2.0)
    p.add_argument("--center", default=None)
    p.add_argument("--scale", type=float, default=None)
    p.add_argument("--grid", action="store_true")
    p.add_argument("--n-centers", dest="n_centers", type=int, default=8)
    p.add_argument("--n-scales", dest="n_scales", type=int, default=4)
    _add_global_flags(p)

    p = sub.add_parser("jflat", help="multiscale flatness of a ball")
    p.add_argument("--dataset", required=True)
    p.add_argument("--d", type=int, default=None)
    p.add_argument("--p", type=float, default=2.0)
    p.add_argument("--flavor", choices=("J", "J_tilde"), default="J")
    p.add_argument("--center", required=True)
    p.add_argument("--scale", type=float, required=True)
    p.add_argument("--levels", type=int, default=None)
    _add_global_flags(p)

    p = sub.add_parser("separate", help="find d-separated balls at (center, scale)")
    p.add_argument("--dataset", required=True)
    p.add_argument("--d", type=int, default=None)
    p.add_argument("--center", required=True)
    p.add_argument("--scale", type=float, required=True)
    p.add_argument("--sample-budget", dest="sample_budget", type=int, default=10_000)
    _add_global_flags(p)

    p = sub.add_parser("plane", help="curvature-guided plane selection vs exact PCA")
    p.add_argument("--dataset", required=True)
    p.add_argument("--d", type=int, default=None)
    p.add_argument("--center", required=True)
    p.add_argument("--scale", type=float, required=True)
    p.add_argument("--candidates", type=int, default=64)
    p.add_argument("--scores", action="store_true", help="include the per-candidate table")
    _add_global_flags(p)

    p = sub.add_parser("verify", help="run an inequality suite, emit a report")
    p.add_argument("--suite", choices=SUITES, required=True)
    p.add_argument("--dataset", required=True)
    p.add_argument("--d", type=int, default=None)
    p.add_argument("--n-centers", dest="n_centers", type=int, default=16)
    p.add_argument("--n-scales", dest="n_scales", type=int, default=5)
    p.add_argument("--levels", type=int, default=4)
    p.add_argument("--p", type=float, default=3.0)
    _add_global_flags(p)

    return top


def _resolve_globals(args):
    config = _load_config(args.config) if getattr(args, "config", None) else {}
    out = {}
    for key, default in _GLOBAL_DEFAULTS.items():
        val = getattr(args, key, None)
        if val is None and key in config:
            raw = config[key]
            if key in ("seed", "mc_samples", "exact_budget"):
                val = int(raw)
            elif key == "lam":
                val = float(raw)
            else:
                val = raw
        out[key] = default if val is None else val
    if out["format"] not in ("json", "csv"):
        raise InvalidInputError(f"field 'format': must be json or csv, got {out['format']!r}")
    return out


def _emit(text, out_path):
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text)
            if not text.endswith("\n"):
                fh.write("\n")
    else:
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")


def _emit_json(payload, out_path):
    payload = {"schema_version": SCHEMA_VERSION, **payload}
    _emit(json.dumps(payload, sort_keys=True, indent=2), out_path)


def _need_dataset(args, g):
    d = getattr(args, "d", None)
    return load_dataset(args.dataset, d=d)


def _cmd_generate(args, g):
    spec = GeneratorSpec(
        family=args.family,
        d=args.d,
        n=args.n,
        count=args.count,
        level=args.level,
        noise_sigma=args.sigma,
        seed=g["seed"],
    )
    mu = generate(spec)
    out = g["out"] or f"{args.family}.csv"
    save_csv(mu, out)
    sys.stdout.write(f"wrote {mu.count} points to {out}\n")
    return 0


def _pick_mode(args, g):
    if args.exact and args.mc:
        raise InvalidInputError("field 'mode': --exact and --mc are mutually exclusive")
    if args.mc:
        return MonteCarlo(g["mc_samples"], seed=g["seed"])
    return EXACT  # default and --exact


def _cmd_curvature(args, g):
    if args.simplex is None and args.dataset is None:
        raise InvalidInputError("field 'dataset': needed unless --simplex is given")
    if args.simplex is not None:
        if args.d is None:
            raise InvalidInputError("field 'd': required with --simplex")
        spec = CurvatureSpec(args.kind, d=args.d, power=args.power)
        val = curvature(_parse_simplex(args.simplex), spec)
        _emit_json({"command": "curvature", "kind": args.kind, "value": val}, g["out"])
        return 0
    mu = _need_dataset(args, g)
    d = mu.d
    spec = CurvatureSpec(args.kind, d=d, power=args.power)
    if args.ball is None:
        raise InvalidInputError("field 'ball': required for integrals")
    ball = _parse_ball(args.ball)
    mode = _pick_mode(args, g)
    if args.local:
        if g["lam"] is None:
            raise InvalidInputError("field 'lambda': required with --local")
        res = local_curvature_sq(
            mu, ball.center, ball.radius, g["lam"], spec, mode=mode, budget=g["exact_budget"]
        )
        domain = {"domain": "edge_floor", "lambda": g["lam"]}
    else:
        res = ball_curvature_sq(
            mu, ball, lam=g["lam"], spec=spec, mode=mode, budget=g["exact_budget"]
        )
        domain = {"domain": "well_scaled" if g["lam"] is not None else "full", "lambda": g["lam"]}
    payload = {
        "command": "curvature",
        "kind": args.kind,
        "d": d,
        "ball": {"center": ball.center.tolist(), "radius": ball.radius},
        "mode": "exact" if mode == EXACT else {"mc_samples": mode.n_samples, "seed": mode.seed},
        **domain,
        **res.to_dict(),
    }
    _emit_json(payload, g["out"])
    return 0


def _beta_record(res):
    return {
        "center": np.asarray(res.ball.center).tolist(),
        "t": res.ball.radius,
        "p": res.p,
        "beta": res.beta,
        "mass": res.mass,
    }


def _cmd_beta(args, g):
    mu = _need_dataset(args, g)
    records = []
    if args.grid:
        diam = mu.support_diameter()
        centers = mu.points[farthest_point_indices(mu.points, args.n_centers)]
        scales = [diam / 2.0**j for j in range(1, args.n_scales + 1)]
        for x in centers:
            for t in scales:
                records.append(_beta_record(beta_p(mu, x, t, args.p)))
    else:
        if args.center is None or args.scale is None:
            raise InvalidInputError("field 'center'/'scale': required without --grid")
        records.append(_beta_record(beta_p(mu, _parse_point(args.center), args.scale, args.p)))
    if g["format"] == "csv":
        lines = ["center;t;p;beta;mass"]
        for r in records:
            lines.append(
                ";".join(
                    [",".join(f"{v:.17g}" for v in r["center"])]
                    + [f"{r[k]:.17g}" for k in ("t", "p", "beta", "mass")]
                )
            )
        _emit("\n".join(lines), g["out"])
    else:
        _emit_json({"command": "beta", "records": records}, g["out"])
    return 0


def _cmd_jflat(args, g):
    mu = _need_dataset(args, g)
    ball = Ball(_parse_point(args.center), args.scale)
    res = jones_flatness(mu, ball, p=args.p, flavor=args.flavor, levels=args.levels)
    if g["format"] == "csv":
        lines = ["center;t;beta"]
        for center, t, beta in res.per_scale:
            lines.append(";".join([",".join(f"{v:.17g}" for v in center), f"{t:.17g}", f"{beta:.17g}"]))
        _emit("\n".join(lines), g["out"])
    else:
        _emit_json(
            {
                "command": "jflat",
                "flavor": args.flavor,
                "p": args.p,
                "value": res.value,
                "scales": list(res.scale_grid),
                "ball": {"center": ball.center.tolist(), "radius": ball.radius},
                "levels": len(res.scale_grid),
            },
            g["out"],
        )
    return 0


def _cmd_separate(args, g):
    mu = _need_dataset(args, g)
    sep = find_separated_balls(
        mu, _parse_point(args.center), args.scale, sample_budget=args.sample_budget, seed=g["seed"]
    )
    _emit_json({"command": "separate", **sep.to_dict()}, g["out"])
    return 0


def _cmd_plane(args, g):
    mu = _need_dataset(args, g)
    mc = MonteCarlo(g["mc_samples"], seed=g["seed"]) if g["mc_samples"] else None
    sel = select_plane(
        mu,
        _parse_point(args.center),
        args.scale,
        lambda0=g["lam"],
        n_candidates=args.candidates,
        mc=mc,
        seed=g["seed"],
        keep_scores=args.scores,
    )
    _emit_json({"command": "plane", **sel.to_dict(include_scores=args.scores)}, g["out"])
    return 0


def _cmd_verify(args, g):
    mu = _need_dataset(args, g)
    config = VerifyConfig(
        seed=g["seed"],
        mc_samples=g["mc_samples"],
        exact_budget=g["exact_budget"],
        lam=g["lam"] if g["lam"] is not None else 0.25,
        n_centers=args.n_centers,
        n_scales=args.n_scales,
        levels=args.levels,
        p=args.p,
    )
    report = verify_suite(args.suite, mu, config)
    text = report.to_json() if g["format"] == "json" else report.to_csv()
    _emit(text, g["out"])
    return 0


_COMMANDS = {
    "generate": _cmd_generate,
    "curvature": _cmd_curvature,
    "beta": _cmd_beta,
    "jflat": _cmd_jflat,
    "separate": _cmd_separate,
    "plane": _cmd_plane,
    "verify": _cmd_verify,
}


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        g = _resolve_globals(args)
        return _COMMANDS[args.command](args, g)
    except InvalidInputError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2
    except (BudgetExceededError, SeparationError, SelectionError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 3
    except FileNotFoundError as exc:
        sys.stderr.write(f"error: field 'dataset': {exc}\n")
        return 2


def entrypoint():
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
