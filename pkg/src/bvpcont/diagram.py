"""Run orchestration: configs, the full diagram pipeline, and artifact output.

A run builds the weight and mesh, follows the main branch from just below the
first discrete eigenvalue, switches at detected bifurcations, sweeps peak
masks for isolas, and packages everything as a DiagramBundle that can be
written out as JSON/CSV/SVG.  Everything is deterministic: fixed seeds, fixed
sweep order, stable sort keys before emission.
"""

import json
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .bifurcation import (BracketError, det_sign, locate_bifurcation,
                          switch_branch)
from .continuation import (Branch, ContinuationConfig, SolutionPoint,
                           continue_branch, fold_points, initial_tangent,
                           make_point)
from .corrector import (AugmentedState, NewtonError, SingularSystemError,
                        Tangent, newton_fixed_lambda)
from .discretize import principal_eigenvalue, residual
from .mesh import Mesh, build_refined_mesh, build_uniform_mesh
from .seeding import (PeakMask, deepen_solution, enumerate_peak_masks,
                      find_new_solution, peak_pattern, peak_pattern_seed,
                      sine_seed, well_bump_seed, well_edge_seed)
from .weight import Weight, build_weight, eval_weight

__all__ = [
    "RunConfig",
    "BranchRecord",
    "DiagramBundle",
    "run_diagram",
    "run_epsilon_sweep",
    "deep_census",
    "onset_amplitude",
    "trace_to_fold",
    "emit_svg",
    "write_bundle",
]

_ISOLA_GRID = (-50.0, -100.0, -200.0, -500.0, -1000.0, -2000.0, -3000.0)


@dataclass
class RunConfig:
    """Fully resolved run configuration; every field has a default."""

    kappa: int = 1
    h: float = 0.1
    eps: float = 0.0
    centers: tuple[float, ...] | None = None
    mesh_kind: str = "uniform"  # uniform | refined
    mesh_n: int = 500
    coarse_dx: float = 0.01
    fine_dx: float = 0.002
    pad: float | None = None
    ds: float = 3.0
    ds_min: float = 0.01
    lambda_min: float = -3000.0
    norm_max: float = 1e4
    max_steps: int = 20000
    newton_tol: float = 1e-4
    max_newton_iters: int = 25
    isola_grid: tuple[float, ...] = _ISOLA_GRID
    probe_lambda: float = -700.0
    profile_stride: int = 0  # 0: only tagged points and branch endpoints

    @classmethod
    def from_dict(cls, d: dict) -> "RunConfig":
        d = dict(d)
        mesh = d.pop("mesh", None)
        cont = d.pop("continuation", None)
        kw = {}
        for k, v in d.items():
            if k not in cls.__dataclass_fields__:
                raise ValueError(f"unknown config key: {k}")
            kw[k] = v
        if mesh is not None:
            kw["mesh_kind"] = mesh.get("kind", "uniform")
            for k in ("n", "coarse_dx", "fine_dx", "pad"):
                if k in mesh:
                    kw["mesh_n" if k == "n" else k] = mesh[k]
        if cont is not None:
            for k in ("ds", "ds_min", "lambda_min", "norm_max", "max_steps",
                      "newton_tol", "max_newton_iters"):
                if k in cont:
                    kw[k] = cont[k]
        cfg = cls(**kw)
        if cfg.centers is not None:
            cfg.centers = tuple(float(c) for c in cfg.centers)
        cfg.isola_grid = tuple(float(v) for v in cfg.isola_grid)
        return cfg

    def resolved(self) -> dict:
        d = asdict(self)
        d["centers"] = None if self.centers is None else list(self.centers)
        d["isola_grid"] = list(self.isola_grid)
        return d

    def continuation(self) -> ContinuationConfig:
        return ContinuationConfig(
            ds=self.ds, ds_min=self.ds_min, lambda_min=self.lambda_min,
            norm_max=self.norm_max, max_steps=self.max_steps,
            newton_tol=self.newton_tol, max_newton_iters=self.max_newton_iters,
        )

    def build(self) -> tuple[Weight, Mesh]:
        w = build_weight(self.kappa, self.h, self.eps, centers=self.centers)
        if self.mesh_kind == "uniform":
            m = build_uniform_mesh(self.mesh_n)
        elif self.mesh_kind == "refined":
            m = build_refined_mesh(w, self.coarse_dx, self.fine_dx, pad=self.pad)
        else:
            raise ValueError(f"unknown mesh kind: {self.mesh_kind}")
        return w, m


@dataclass
class BranchRecord:
    branch_id: str
    role: str  # main | switched | isola
    branch: Branch


@dataclass
class DiagramBundle:
    config: dict
    branches: list[BranchRecord] = field(default_factory=list)
    events: list[dict] = field(default_factory=list)
    provenance: dict = field(default_factory=dict)

    def branch_by_role(self, role: str) -> list[BranchRecord]:
        return [r for r in self.branches if r.role == role]


def _classify_symmetry(u: np.ndarray) -> str:
    scale = 1.0 + float(np.abs(u).max())
    if np.max(np.abs(u - u[::-1])) < 1e-6 * scale:
        return "symmetric"
    n = len(u)
    left = float(u[: n // 2].sum())
    right = float(u[-(n // 2):].sum())
    return "asymmetric_left" if left > right else "asymmetric_right"


def onset_amplitude(w: Weight, m: Mesh, lam: float, lam1: float) -> float:
    """Galerkin balance of the sine mode: (lam1 - lam)*<phi^2> = A^2*<a*phi^4>."""
    x = m.interior
    dx = np.diff(m.nodes)[:-1]
    phi = np.sin(np.pi * x)
    a = eval_weight(w, x)
    s2 = float(np.sum(dx * phi**2))
    s4 = float(np.sum(dx * a * phi**4))
    if s4 <= 0 or lam1 <= lam:
        return 0.05
    return float(np.sqrt((lam1 - lam) * s2 / s4))


def _trace_both(w: Weight, m: Mesh, start: SolutionPoint,
                cfg: ContinuationConfig) -> Branch:
    """Continue from start toward both increasing and decreasing lam, merged.

    Isolas and switched branches pass through the seed point in both
    directions; the merged branch runs from the deep end of one sheet, through
    the seed and any folds, to the deep end of the other.
    """
    y = AugmentedState(start.lam, start.u.copy())
    t_up = initial_tangent(w, m, y, direction_hint=+1.0)
    b_up = continue_branch(w, m, start, t_up, cfg)
    t_dn = Tangent(-t_up.du, -t_up.dlam)
    b_dn = continue_branch(w, m, start, t_dn, cfg)
    if "closed loop" in b_up.diagnostics:
        return b_up
    merged = Branch(symmetry="unknown")
    merged.points = b_dn.points[:0:-1] + b_up.points
    merged.tangents = [Tangent(-t.du, -t.dlam) for t in b_dn.tangents[:0:-1]]
    merged.tangents += b_up.tangents
    merged.diagnostics = [f"down: {d}" for d in b_dn.diagnostics]
    merged.diagnostics += [f"up: {d}" for d in b_up.diagnostics]
    return merged


def trace_to_fold(w: Weight, m: Mesh, start: SolutionPoint,
                  cfg: ContinuationConfig, overshoot: float = 50.0):
    """Follow a branch toward increasing lam until it rounds its fold.

    Returns (branch, lam_t or None).  The continuation is stopped once lam
    drops overshoot below the start again, so only the neighborhood of the
    turning point is traced.
    """
    local = ContinuationConfig(
        ds=cfg.ds, ds_min=cfg.ds_min,
        lambda_min=start.lam - overshoot, norm_max=cfg.norm_max,
        max_steps=cfg.max_steps, newton_tol=cfg.newton_tol,
        max_newton_iters=cfg.max_newton_iters,
    )
    y = AugmentedState(start.lam, start.u.copy())
    t0 = initial_tangent(w, m, y, direction_hint=+1.0)
    b = continue_branch(w, m, start, t0, local)
    folds = fold_points(b)
    if not folds:
        return b, None
    lam_t = max(lam for _, lam in folds)
    return b, lam_t


def _det_signs(w: Weight, m: Mesh, b: Branch) -> list[int]:
    from .discretize import jacobian
    return [det_sign(jacobian(w, m, p.lam, p.u))[0] for p in b.points]


def _event_dict(branch_id: str, index: int, kind: str, lam: float,
                norm: float) -> dict:
    return {"branch_id": branch_id, "index": int(index), "kind": kind,
            "lambda": float(lam), "norm": float(norm)}


def _represented_masks(w: Weight, m: Mesh,
                       records: list[BranchRecord]) -> set[tuple[bool, ...]]:
    out = set()
    for rec in records:
        pts = rec.branch.points
        if not pts:
            continue
        # Both ends of a merged isola trace are deep sheets with possibly
        # different peak patterns; register them all.
        for p in (pts[0], pts[-1], min(pts, key=lambda q: q.lam)):
            bits = peak_pattern(w, m, p.u)
            if any(bits):
                out.add(bits)
    return out


def run_diagram(config) -> DiagramBundle:
    """Full pipeline: main branch, bifurcations, isola sweep, bundle assembly.

    Stage failures are recorded in provenance and do not abort the run; the
    bundle always contains whatever was computed.
    """
    cfg = config if isinstance(config, RunConfig) else RunConfig.from_dict(config)
    t_wall = time.perf_counter()
    w, m = cfg.build()
    cont = cfg.continuation()
    bundle = DiagramBundle(config=cfg.resolved())
    failures: list[str] = []
    records = bundle.branches

    lam1 = principal_eigenvalue(m)
    lam_start = lam1 - 0.1

    # Stage 1-2: main branch from the near-onset sine seed, downward.
    main = None
    try:
        amp = onset_amplitude(w, m, lam_start, lam1)
        u0 = newton_fixed_lambda(w, m, lam_start, sine_seed(m, amp),
                                 tol=cfg.newton_tol,
                                 max_iters=cfg.max_newton_iters)
        start = make_point(w, m, lam_start, u0, tag="branch_start")
        t0 = initial_tangent(w, m, AugmentedState(lam_start, u0),
                             direction_hint=-1.0)
        main = continue_branch(w, m, start, t0, cont)
        main.symmetry = _classify_symmetry(main.points[-1].u)
        records.append(BranchRecord("main", "main", main))
    except (NewtonError, SingularSystemError, ValueError) as exc:
        failures.append(f"main branch: {exc}")

    # Stage 3: locate det-sign changes on the main branch, switch at pitchforks.
    n_switched = 0
    if main is not None:
        signs = _det_signs(w, m, main)
        for i in range(len(signs) - 1):
            if signs[i] == 0 or signs[i + 1] == 0 or signs[i] == signs[i + 1]:
                continue
            try:
                ev = locate_bifurcation(w, m, main, (i, i + 1),
                                        newton_tol=cfg.newton_tol)
            except (BracketError, NewtonError, SingularSystemError) as exc:
                failures.append(f"locate at index {i}: {exc}")
                continue
            host = main.points[i]
            bundle.events.append(_event_dict("main", i, ev.kind, ev.lambda_b,
                                             host.l2norm))
            main.events.append((i, ev))
            if ev.kind != "pitchfork":
                continue
            try:
                pair = switch_branch(w, m, ev, AugmentedState(host.lam, host.u),
                                     newton_tol=cfg.newton_tol)
            except (NewtonError, SingularSystemError) as exc:
                failures.append(f"switch at lam={ev.lambda_b:.6g}: {exc}")
                continue
            for y in pair:
                child_start = make_point(w, m, y.lam, y.u, tag="branch_start")
                try:
                    tc = initial_tangent(w, m, y, direction_hint=-1.0)
                    child = continue_branch(w, m, child_start, tc, cont)
                except (NewtonError, SingularSystemError) as exc:
                    failures.append(f"child at lam={y.lam:.6g}: {exc}")
                    continue
                child.symmetry = _classify_symmetry(child.points[-1].u)
                records.append(
                    BranchRecord(f"switched_{n_switched}", "switched", child))
                n_switched += 1

    # Stage 4: isola sweep over unrepresented masks, fixed order.
    n_isola = 0
    masks = enumerate_peak_masks(cfg.kappa)
    well_patterns = []
    if cfg.eps > 0:
        from itertools import product as _product
        for bits in _product((False, True), repeat=cfg.kappa):
            if any(bits):
                well_patterns.append(bits)

    def attempt(seed_fn, label):
        nonlocal n_isola
        known = [r.branch for r in records]
        for lam_try in cfg.isola_grid:
            if lam_try < cfg.lambda_min:
                continue
            try:
                seed = seed_fn(lam_try)
            except ValueError:
                continue
            pt = find_new_solution(w, m, lam_try, seed, known,
                                   newton_tol=cfg.newton_tol)
            if pt is None:
                continue
            try:
                iso = _trace_both(w, m, pt, cont)
            except (NewtonError, SingularSystemError) as exc:
                failures.append(f"isola trace {label}: {exc}")
                return
            iso.symmetry = _classify_symmetry(pt.u)
            records.append(BranchRecord(f"isola_{n_isola}", "isola", iso))
            n_isola += 1
            return

    for mask in masks:
        if mask.bits in _represented_masks(w, m, records):
            continue
        attempt(lambda lam, mk=mask: peak_pattern_seed(w, m, mk, lam),
                f"mask {mask}")
    for wells in well_patterns:
        attempt(lambda lam, ws=wells: well_bump_seed(w, m, lam, wells=ws),
                f"wells {wells}")
    for wells in well_patterns:
        attempt(lambda lam, ws=wells: well_edge_seed(w, m, lam, wells=ws),
                f"well edges {wells}")

    # Fold events from every branch.
    for rec in records:
        for idx, lam_f in fold_points(rec.branch):
            bundle.events.append(_event_dict(rec.branch_id, idx, "fold", lam_f,
                                             rec.branch.points[idx].l2norm))

    # Post hoc validation with a freshly built discretization.
    w2, m2 = cfg.build()
    res_max = 0.0
    for rec in records:
        for p in rec.branch.points:
            res_max = max(res_max,
                          float(np.linalg.norm(residual(w2, m2, p.lam, p.u))))
            if p.lam >= lam1:
                failures.append(
                    f"{rec.branch_id}: stored point at lam={p.lam:.6g} >= "
                    f"first eigenvalue {lam1:.6g}")
    if res_max >= cfg.newton_tol:
        failures.append(f"residual revalidation: max ||F|| = {res_max:.3e}")

    bundle.events.sort(key=lambda e: (e["branch_id"], e["index"], e["kind"]))
    bundle.provenance = {
        "mesh": {"kind": cfg.mesh_kind, "n_interior": m.n_interior,
                 "min_dx": float(np.diff(m.nodes).min()),
                 "max_dx": float(np.diff(m.nodes).max())},
        "tolerances": {"newton_tol": cfg.newton_tol, "ds": cfg.ds,
                       "ds_min": cfg.ds_min},
        "first_eigenvalue": float(lam1),
        "wall_time_s": time.perf_counter() - t_wall,
        "step_counts": {r.branch_id: len(r.branch.points) for r in records},
        "residual_max": res_max,
        "failures": failures,
    }
    return bundle


def deep_census(config) -> dict[str, tuple[float, np.ndarray, str]]:
    """Distinct peak patterns realized at the lambda floor of a diagram run.

    Runs the full diagram, takes the endpoint and deepest profile of every
    branch, and carries profiles that stalled short of lambda_min the rest of
    the way by natural lambda stepping.  Continuation near the floor can stall
    on folds created by the discrete lattice (peak-translation modes become
    exponentially soft), so the direct stepping fallback is what guarantees
    each sheet is sampled at depth.  Returns {pattern: (lam, u, branch_id)}
    keyed by the 0/1 string of occupied vanishing intervals.
    """
    cfg = config if isinstance(config, RunConfig) else RunConfig.from_dict(config)
    w, m = cfg.build()
    bundle = run_diagram(cfg)
    floor = cfg.lambda_min
    out: dict[str, tuple[float, np.ndarray, str]] = {}
    for rec in bundle.branches:
        pts = rec.branch.points
        if not pts:
            continue
        deepest = min(pts, key=lambda p: p.lam)
        for p in {id(q): q for q in (pts[0], pts[-1], deepest)}.values():
            lam, u = p.lam, p.u
            if floor * 0.997 < lam <= floor / 3.0:
                try:
                    u = deepen_solution(w, m, u, lam, floor,
                                        newton_tol=cfg.newton_tol)
                    lam = floor
                except (NewtonError, SingularSystemError):
                    continue
            if lam >= floor * 0.997:
                continue
            pat = "".join("1" if b else "0" for b in peak_pattern(w, m, u))
            if "1" in pat and pat not in out:
                out[pat] = (float(lam), u, rec.branch_id)
    return out


def _count_peaks(u: np.ndarray) -> int:
    from .seeding import peak_indices
    return len(peak_indices(u))


def _nearest_point(b: Branch, lam: float) -> SolutionPoint | None:
    if not b.points:
        return None
    return min(b.points, key=lambda p: abs(p.lam - lam))


def run_epsilon_sweep(base_config, eps_values):
    """One diagram per eps plus a peak-count recombination report.

    The report records, at the probe lam, the peak count of the symmetric
    main-branch solution and of the (symmetric) isola solution for each eps.
    Per-eps failures are isolated into the report entry.
    """
    base = (base_config if isinstance(base_config, RunConfig)
            else RunConfig.from_dict(base_config))
    bundles = []
    report = []
    for eps in eps_values:
        if not 0.0 <= eps <= 1.0:
            raise ValueError(f"eps = {eps} outside [0, 1]")
        cfg = RunConfig.from_dict({**base.resolved(), "eps": float(eps)})
        entry = {"eps": float(eps), "main_peaks": None, "isola_peaks": None,
                 "error": None}
        try:
            bundle = run_diagram(cfg)
        except Exception as exc:  # per-eps isolation
            entry["error"] = str(exc)
            bundles.append(None)
            report.append(entry)
            continue
        bundles.append(bundle)
        mains = bundle.branch_by_role("main")
        if mains:
            p = _nearest_point(mains[0].branch, cfg.probe_lambda)
            if p is not None:
                entry["main_peaks"] = _count_peaks(p.u)
        isolas = [r for r in bundle.branch_by_role("isola")
                  if r.branch.symmetry == "symmetric"] or bundle.branch_by_role("isola")
        if isolas:
            p = _nearest_point(isolas[0].branch, cfg.probe_lambda)
            if p is not None:
                entry["isola_peaks"] = _count_peaks(p.u)
        report.append(entry)
    return bundles, report


# ---------------------------------------------------------------------------
# Output artifacts.

_ISOLA_COLORS = ("#1f77b4", "#2ca02c", "#9467bd", "#8c564b", "#e377c2",
                 "#17becf", "#bcbd22")


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def emit_svg(bundle: DiagramBundle, axes_config: dict | None = None) -> str:
    """Deterministic (lam, l2 norm) diagram as an SVG document string.

    One polyline per branch: main black, switched red, isolas cycling through
    a fixed palette; filled circles at bifurcation and fold events.
    """
    width, height = 640, 480
    ml, mr, mt, mb = 60, 20, 20, 45
    axes = axes_config or {}
    lams, norms = [], []
    for rec in bundle.branches:
        lams.extend(p.lam for p in rec.branch.points)
        norms.extend(p.l2norm for p in rec.branch.points)
    if lams:
        lam_lo, lam_hi = min(lams), max(lams)
        n_lo, n_hi = min(norms), max(norms)
    else:
        lam_lo, lam_hi, n_lo, n_hi = -10.0, 10.0, 0.0, 1.0
    lam_lo = axes.get("lambda_min", lam_lo - 0.05 * (lam_hi - lam_lo + 1e-9))
    lam_hi = axes.get("lambda_max", lam_hi + 0.05 * (lam_hi - lam_lo + 1e-9))
    n_lo = axes.get("norm_min", 0.0)
    n_hi = axes.get("norm_max", n_hi + 0.05 * (n_hi - n_lo + 1e-9))
    if lam_hi <= lam_lo:
        lam_hi = lam_lo + 1.0
    if n_hi <= n_lo:
        n_hi = n_lo + 1.0

    def sx(lam):
        return ml + (lam - lam_lo) / (lam_hi - lam_lo) * (width - ml - mr)

    def sy(nv):
        return height - mb - (nv - n_lo) / (n_hi - n_lo) * (height - mt - mb)

    lines = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" '
        f'height="{height}" viewBox="0 0 {width} {height}">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
        f'<line x1="{ml}" y1="{height - mb}" x2="{width - mr}" '
        f'y2="{height - mb}" stroke="black"/>',
        f'<line x1="{ml}" y1="{mt}" x2="{ml}" y2="{height - mb}" '
        f'stroke="black"/>',
        f'<text x="{(ml + width - mr) // 2}" y="{height - 10}" '
        f'font-size="14" text-anchor="middle">lambda</text>',
        f'<text x="15" y="{(mt + height - mb) // 2}" font-size="14" '
        f'text-anchor="middle" transform="rotate(-90 15 '
        f'{(mt + height - mb) // 2})">L2 norm</text>',
        f'<text x="{ml}" y="{height - mb + 16}" font-size="11" '
        f'text-anchor="middle">{_fmt(lam_lo)}</text>',
        f'<text x="{width - mr}" y="{height - mb + 16}" font-size="11" '
        f'text-anchor="middle">{_fmt(lam_hi)}</text>',
        f'<text x="{ml - 4}" y="{mt + 4}" font-size="11" '
        f'text-anchor="end">{_fmt(n_hi)}</text>',
    ]
    n_isola = 0
    for rec in sorted(bundle.branches, key=lambda r: r.branch_id):
        if rec.role == "main":
            color = "black"
        elif rec.role == "switched":
            color = "red"
        else:
            color = _ISOLA_COLORS[n_isola % len(_ISOLA_COLORS)]
            n_isola += 1
        pts = " ".join(f"{sx(p.lam):.3f},{sy(p.l2norm):.3f}"
                       for p in rec.branch.points)
        lines.append(f'<polyline points="{pts}" fill="none" '
                     f'stroke="{color}" stroke-width="1.5">'
                     f'<title>{rec.branch_id}</title></polyline>')
    for e in bundle.events:
        lines.append(f'<circle cx="{sx(e["lambda"]):.3f}" '
                     f'cy="{sy(e["norm"]):.3f}" r="4" fill="black">'
                     f'<title>{e["kind"]} at lambda={_fmt(e["lambda"])}'
                     f'</title></circle>')
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


def _json_dumps(obj, indent=0) -> str:
    """JSON with floats rendered at 17 significant digits."""
    pad = "  " * indent
    pad1 = "  " * (indent + 1)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f'{pad1}{json.dumps(str(k))}: {_json_dumps(v, indent + 1)}'
                 for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + f"\n{pad}}}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = [f"{pad1}{_json_dumps(v, indent + 1)}" for v in obj]
        return "[\n" + ",\n".join(items) + f"\n{pad}]"
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, float):
        if not np.isfinite(obj):
            return json.dumps(None)
        return _fmt(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, np.floating):
        return _fmt(float(obj))
    return json.dumps(obj)


def write_bundle(bundle: DiagramBundle, outdir) -> None:
    """Write bundle.json, branches.csv, events.jsonl, diagram.svg, profiles/.

    Profiles are written for tagged points and branch endpoints; a positive
    profile_stride in the config additionally writes every stride-th point.
    """
    out = Path(outdir)
    out.mkdir(parents=True, exist_ok=True)
    stride = int(bundle.config.get("profile_stride", 0))

    doc = {
        "config": bundle.config,
        "provenance": bundle.provenance,
        "events": bundle.events,
        "branches": [
            {
                "branch_id": rec.branch_id,
                "role": rec.role,
                "symmetry": rec.branch.symmetry,
                "n_points": len(rec.branch.points),
                "lambda_range": ([min(p.lam for p in rec.branch.points),
                                  max(p.lam for p in rec.branch.points)]
                                 if rec.branch.points else None),
                "diagnostics": rec.branch.diagnostics,
            }
            for rec in bundle.branches
        ],
    }
    (out / "bundle.json").write_text(_json_dumps(doc) + "\n")

    rows = ["branch_id,point_index,lambda,l2_norm,tag"]
    for rec in bundle.branches:
        for i, p in enumerate(rec.branch.points):
            rows.append(f"{rec.branch_id},{i},{_fmt(p.lam)},"
                        f"{_fmt(p.l2norm)},{p.tag}")
    (out / "branches.csv").write_text("\n".join(rows) + "\n")

    with open(out / "events.jsonl", "w") as fh:
        for e in bundle.events:
            fh.write(_json_dumps(e).replace("\n", " ") + "\n")

    (out / "diagram.svg").write_text(emit_svg(bundle))

    pdir = out / "profiles"
    pdir.mkdir(exist_ok=True)
    cfg = RunConfig.from_dict(
        {k: v for k, v in bundle.config.items()})
    _, m = cfg.build()
    for rec in bundle.branches:
        n = len(rec.branch.points)
        for i, p in enumerate(rec.branch.points):
            keep = (p.tag != "regular" or i == 0 or i == n - 1
                    or (stride > 0 and i % stride == 0))
            if not keep:
                continue
            u_full = np.concatenate([[0.0], p.u, [0.0]])
            body = "\n".join(f"{_fmt(x)} {_fmt(u)}"
                             for x, u in zip(m.nodes, u_full))
            (pdir / f"{rec.branch_id}_{i}.txt").write_text(body + "\n")
