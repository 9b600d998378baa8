"""Command line front end.

Subcommands:
  diagram    full pipeline from a JSON config, artifacts written to --out
  solve      single Newton solve from a named seed, profile to stdout
  shoot      shooting-oracle census of positive solutions at one lambda
  eig        first discrete eigenvalues of the uniform second-difference matrix
  sweep-eps  diagrams over an eps grid plus the peak recombination report
  sweep-h    secondary bifurcation value lambda_b over an h grid
"""

import argparse
import json
import sys

import numpy as np

from .continuation import continue_branch, initial_tangent, make_point
from .corrector import AugmentedState, newton_fixed_lambda
from .diagram import (RunConfig, _fmt, _json_dumps, run_diagram,
                      run_epsilon_sweep, write_bundle)
from .discretize import principal_eigenvalue, toeplitz_eigenvalue
from .seeding import PeakMask, peak_pattern_seed, sine_seed, well_bump_seed
from .shooting import shoot_count

__all__ = ["main", "build_parser"]


def _load_config(path: str | None) -> RunConfig:
    if path is None:
        return RunConfig()
    with open(path) as fh:
        return RunConfig.from_dict(json.load(fh))


def _add_weight_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--kappa", type=int, default=1)
    p.add_argument("--h", type=float, default=0.1)
    p.add_argument("--eps", type=float, default=0.0)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="bvpcont",
        description="Bifurcation diagrams of positive solutions of "
                    "-u'' = lam*u + a(x)*u^3 on (0,1)")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("diagram", help="run the full diagram pipeline")
    p.add_argument("--config", help="JSON run configuration")
    p.add_argument("--out", required=True, help="output directory")

    p = sub.add_parser("solve", help="one Newton solve from a named seed")
    _add_weight_args(p)
    p.add_argument("--lambda", dest="lam", type=float, required=True)
    p.add_argument("--n", type=int, default=500, help="interior mesh points")
    p.add_argument("--seed", default="sine",
                   help='"sine", a mask bit string like "101", or "wells"')
    p.add_argument("--amplitude", type=float, default=1.0,
                   help="sine seed amplitude")

    p = sub.add_parser("shoot", help="oracle census at one lambda")
    _add_weight_args(p)
    p.add_argument("--lambda", dest="lam", type=float, required=True)
    p.add_argument("--grid-size", type=int, default=200)

    p = sub.add_parser("eig", help="uniform-mesh discrete eigenvalue")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, default=1)

    p = sub.add_parser("sweep-eps", help="eps sweep with recombination report")
    p.add_argument("--config", help="JSON base configuration")
    p.add_argument("--eps-values", required=True,
                   help="comma separated eps list, e.g. 0.50,0.51")
    p.add_argument("--out", help="directory for per-eps bundles")

    p = sub.add_parser("sweep-h", help="lambda_b over an h grid (kappa=1)")
    p.add_argument("--h-values", required=True,
                   help="comma separated h list, e.g. 0.05,0.1,0.3")
    p.add_argument("--n", type=int, default=500)
    p.add_argument("--lambda-min", type=float, default=-100.0)
    return ap


def _cmd_diagram(args) -> int:
    cfg = _load_config(args.config)
    bundle = run_diagram(cfg)
    write_bundle(bundle, args.out)
    prov = bundle.provenance
    print(f"branches: {len(bundle.branches)}  events: {len(bundle.events)}  "
          f"wall: {prov['wall_time_s']:.2f}s")
    for msg in prov["failures"]:
        print(f"warning: {msg}", file=sys.stderr)
    return 0 if not prov["failures"] else 1


def _cmd_solve(args) -> int:
    cfg = RunConfig(kappa=args.kappa, h=args.h, eps=args.eps, mesh_n=args.n)
    w, m = cfg.build()
    if args.seed == "sine":
        u0 = sine_seed(m, args.amplitude)
    elif args.seed == "wells":
        u0 = well_bump_seed(w, m, args.lam)
    else:
        bits = tuple(c == "1" for c in args.seed)
        u0 = peak_pattern_seed(w, m, PeakMask(bits), args.lam)
    u = newton_fixed_lambda(w, m, args.lam, u0)
    p = make_point(w, m, args.lam, u)
    print(f"# lambda = {_fmt(p.lam)}  l2_norm = {_fmt(p.l2norm)}")
    u_full = np.concatenate([[0.0], u, [0.0]])
    for x, v in zip(m.nodes, u_full):
        print(f"{_fmt(x)} {_fmt(v)}")
    return 0


def _cmd_shoot(args) -> int:
    cfg = RunConfig(kappa=args.kappa, h=args.h, eps=args.eps)
    w, _ = cfg.build()
    count, roots = shoot_count(w, args.lam, grid_size=args.grid_size)
    print(f"count: {count}")
    for r in roots:
        print(f"v0 = {_fmt(r)}")
    return 0


def _cmd_eig(args) -> int:
    val = toeplitz_eigenvalue(args.n, args.k)
    print(_fmt(val))
    return 0


def _cmd_sweep_eps(args) -> int:
    base = _load_config(args.config)
    eps_values = [float(s) for s in args.eps_values.split(",")]
    bundles, report = run_epsilon_sweep(base, eps_values)
    if args.out:
        for eps, bundle in zip(eps_values, bundles):
            if bundle is not None:
                write_bundle(bundle, f"{args.out}/eps_{eps:g}")
    print(_json_dumps(report))
    return 0


def _cmd_sweep_h(args) -> int:
    # For each h, follow the main branch and report the first located
    # bifurcation value lambda_b (see bifurcation.locate_bifurcation).
    from .bifurcation import locate_bifurcation
    from .diagram import _det_signs

    h_values = [float(s) for s in args.h_values.split(",")]
    out = []
    for h in h_values:
        cfg = RunConfig(kappa=1, h=h, mesh_n=args.n,
                        lambda_min=args.lambda_min)
        w, m = cfg.build()
        lam1 = principal_eigenvalue(m)
        amp_lam = lam1 - 0.1
        from .diagram import onset_amplitude
        u0 = newton_fixed_lambda(w, m, amp_lam,
                                 sine_seed(m, onset_amplitude(w, m, amp_lam,
                                                               lam1)))
        start = make_point(w, m, amp_lam, u0, tag="branch_start")
        t0 = initial_tangent(w, m, AugmentedState(amp_lam, u0),
                             direction_hint=-1.0)
        branch = continue_branch(w, m, start, t0, cfg.continuation())
        signs = _det_signs(w, m, branch)
        lam_b = None
        for i in range(len(signs) - 1):
            if signs[i] != 0 and signs[i + 1] != 0 and signs[i] != signs[i + 1]:
                ev = locate_bifurcation(w, m, branch, (i, i + 1))
                if ev.kind == "pitchfork":
                    lam_b = ev.lambda_b
                    break
        out.append({"h": h, "lambda_b": lam_b})
        print(f"h = {h:g}  lambda_b = "
              f"{'not found' if lam_b is None else _fmt(lam_b)}")
    return 0 if all(e["lambda_b"] is not None for e in out) else 1


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    handlers = {
        "diagram": _cmd_diagram,
        "solve": _cmd_solve,
        "shoot": _cmd_shoot,
        "eig": _cmd_eig,
        "sweep-eps": _cmd_sweep_eps,
        "sweep-h": _cmd_sweep_h,
    }
    return handlers[args.command](args)


if __name__ == "__main__":
    raise SystemExit(main())
