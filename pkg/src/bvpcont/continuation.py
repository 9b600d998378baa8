"""Pseudo-arclength path following: tangents, predictor-corrector, branches.

Branches are followed with an Euler predictor of fixed step ds (default 3)
and the bordered Newton corrector; the step is halved on corrector failure
and restored after a run of successes.  A branch terminates on a parameter
or norm bound, step-count or step-underflow, departure from the positive
cone, or on closing back onto its own start.
"""

from dataclasses import dataclass, field

import numpy as np

from .corrector import (AugmentedState, NewtonError, SingularSystemError,
                        Tangent, bordered_solve, newton_augmented,
                        solve_tridiag)
from .discretize import discrete_l2_norm, jacobian, residual
from .mesh import Mesh
from .weight import Weight

__all__ = [
    "SolutionPoint",
    "Branch",
    "ContinuationConfig",
    "initial_tangent",
    "update_tangent",
    "continue_branch",
    "fold_points",
]


@dataclass
class SolutionPoint:
    """Converged pair (lam, u) with its discrete L2 norm."""

    lam: float
    u: np.ndarray
    l2norm: float
    tag: str = "regular"  # regular | fold | bifurcation | branch_start


@dataclass
class Branch:
    """Ordered solution points along one continuation path."""

    points: list[SolutionPoint] = field(default_factory=list)
    events: list = field(default_factory=list)
    symmetry: str = "unknown"  # symmetric | asymmetric_left | asymmetric_right | unknown
    tangents: list[Tangent] = field(default_factory=list)
    diagnostics: list[str] = field(default_factory=list)

    def lambdas(self) -> np.ndarray:
        return np.array([p.lam for p in self.points])

    def norms(self) -> np.ndarray:
        return np.array([p.l2norm for p in self.points])


@dataclass
class ContinuationConfig:
    ds: float = 3.0
    ds_min: float = 0.01
    lambda_min: float = -3000.0
    norm_max: float = 1e4
    max_steps: int = 20000
    newton_tol: float = 1e-4
    max_newton_iters: int = 25

    def __post_init__(self):
        if self.ds_min > self.ds:
            raise ValueError("ds_min must not exceed ds")


def make_point(w: Weight, m: Mesh, lam: float, u: np.ndarray,
               tag: str = "regular") -> SolutionPoint:
    return SolutionPoint(lam=float(lam), u=np.asarray(u, dtype=float),
                         l2norm=discrete_l2_norm(m, u), tag=tag)


def _fix_sign(t: Tangent, direction_hint: float) -> Tangent:
    if abs(t.dlam) > 1e-10 and direction_hint != 0:
        if t.dlam * direction_hint < 0:
            return Tangent(-t.du, -t.dlam)
        return t
    nz = np.nonzero(t.du)[0]
    if len(nz) and t.du[nz[0]] < 0:
        return Tangent(-t.du, -t.dlam)
    return t


def initial_tangent(w: Weight, m: Mesh, y: AugmentedState,
                    direction_hint: float = -1.0) -> Tangent:
    """Unit null vector of the N x (N+1) Jacobian [J | dF/dlam] at y.

    At a regular point du solves J du = u (dF/dlam = -u); near a fold the
    tridiagonal solve degenerates and the tangent is recovered from the
    bordered system instead.
    """
    J = jacobian(w, m, y.lam, y.u)
    try:
        du = solve_tridiag(J, y.u)
        t = Tangent(du, 1.0).normalized()
        if np.all(np.isfinite(t.du)):
            return _fix_sign(t, direction_hint)
    except SingularSystemError:
        pass
    # Fold-adjacent fallback: border with a lam-direction probe row.
    probe = Tangent(np.zeros_like(y.u), 1.0)
    rhs = np.zeros(len(y.u) + 1)
    rhs[-1] = 1.0
    sol = bordered_solve(J, -y.u, probe, rhs)
    t = Tangent(sol[:-1], sol[-1]).normalized()
    return _fix_sign(t, direction_hint)


def update_tangent(w: Weight, m: Mesh, y: AugmentedState, t_old: Tangent) -> Tangent:
    """New unit tangent at y oriented along t_old (positive inner product)."""
    J = jacobian(w, m, y.lam, y.u)
    rhs = np.zeros(len(y.u) + 1)
    rhs[-1] = 1.0
    sol = bordered_solve(J, -y.u, t_old, rhs)
    t = Tangent(sol[:-1], sol[-1]).normalized()
    if t.dot(t_old) < 0:
        t = Tangent(-t.du, -t.dlam)
    return t


def continue_branch(w: Weight, m: Mesh, start: SolutionPoint, t0: Tangent,
                    cfg: ContinuationConfig) -> Branch:
    """Follow a branch from a converged start point along tangent t0."""
    branch = Branch(points=[start], tangents=[t0.normalized()])
    y = AugmentedState(start.lam, start.u.copy())
    t = branch.tangents[0]
    ds = cfg.ds
    successes = 0
    while len(branch.points) < cfg.max_steps:
        y_pred = AugmentedState(y.lam + ds * t.dlam, y.u + ds * t.du)
        try:
            y_new = newton_augmented(w, m, y_pred, y, t, ds,
                                     tol=cfg.newton_tol,
                                     max_iters=cfg.max_newton_iters)
        except (NewtonError, SingularSystemError):
            successes = 0
            ds *= 0.5
            if ds < cfg.ds_min:
                branch.diagnostics.append(
                    f"stall: step underflow below {cfg.ds_min} at lam = {y.lam:.6g}"
                )
                return branch
            continue

        if y_new.u.min() < -1e-8:
            branch.diagnostics.append(
                f"left positive cone at lam = {y_new.lam:.6g}"
            )
            return branch

        point = make_point(w, m, y_new.lam, y_new.u)
        try:
            t_new = update_tangent(w, m, y_new, t)
        except SingularSystemError:
            branch.diagnostics.append(
                f"singular bordered matrix at lam = {y_new.lam:.6g}"
            )
            return branch
        branch.points.append(point)
        branch.tangents.append(t_new)
        y, t = y_new, t_new

        if point.lam < cfg.lambda_min:
            branch.diagnostics.append("reached lambda_min")
            return branch
        if point.l2norm > cfg.norm_max:
            branch.diagnostics.append("reached norm_max")
            return branch
        # Closed-loop detection: back at the start in the (lam, norm) plane
        # with matching direction.
        if len(branch.points) > 10:
            p0 = branch.points[0]
            gap = np.hypot(point.lam - p0.lam, point.l2norm - p0.l2norm)
            if gap < 1e-3 and t_new.dot(branch.tangents[0]) > 0:
                branch.diagnostics.append("closed loop")
                return branch

        successes += 1
        if successes >= 5 and ds < cfg.ds:
            ds = min(2.0 * ds, cfg.ds)
            successes = 0
    branch.diagnostics.append("reached max_steps")
    return branch


def _arclengths(points: list[SolutionPoint]) -> np.ndarray:
    s = [0.0]
    for a, b in zip(points, points[1:]):
        s.append(s[-1] + float(np.hypot(np.linalg.norm(b.u - a.u), b.lam - a.lam)))
    return np.array(s)


def fold_points(b: Branch) -> list[tuple[int, float]]:
    """Indices and refined lam values where dlam changes sign along the branch.

    Each detected fold is refined by a local quadratic fit of lam against
    arclength through the three surrounding points.
    """
    pts = b.points
    if len(pts) < 3:
        return []
    lam = np.array([p.lam for p in pts])
    s = _arclengths(pts)
    dlam = np.diff(lam)
    folds = []
    for j in range(len(dlam) - 1):
        if dlam[j] == 0.0 or dlam[j] * dlam[j + 1] >= 0.0:
            continue
        i = j + 1  # vertex-adjacent point
        ss = s[i - 1:i + 2] - s[i]
        ll = lam[i - 1:i + 2]
        coef = np.polyfit(ss, ll, 2)
        if coef[0] != 0.0:
            s_star = -coef[1] / (2.0 * coef[0])
            lam_star = float(np.polyval(coef, s_star))
        else:
            lam_star = float(ll[1])
        folds.append((i, lam_star))
    return folds
