"""Phase-plane shooting oracle, independent of the finite-difference path.

The boundary value problem is recast as the initial value problem
u' = v, v' = -lam*u - a(x)*u^3 from (u, v)(0) = (0, v0) and positive
solutions are counted as roots of the boundary miss function M(v0) = u(1; v0),
accepted only when the shot stayed positive on (0, 1).  On every subinterval
where a is constant the flow is Hamiltonian with energy
v^2/2 + lam*u^2/2 + a*u^4/4, which gives a per-piece conservation check on
the integrator.
"""

from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad, solve_ivp

from .mesh import Mesh
from .weight import Weight, eval_weight

__all__ = [
    "Trajectory",
    "BlowUpError",
    "potential_energy",
    "integrate_ivp",
    "shoot_count",
    "time_map",
    "check_decay_identity",
]

_BLOWUP = 1e8


class BlowUpError(RuntimeError):
    """Trajectory exceeded the blow-up guard before reaching x = 1."""


@dataclass
class Trajectory:
    """Samples of one shot, with piecewise-constant-coefficient breakpoints."""

    x: np.ndarray
    u: np.ndarray
    v: np.ndarray
    v0: float
    lam: float
    first_zero: float | None  # x of the first descending zero crossing of u
    piece_energy_drift: list[float]  # relative drift per constant-a piece

    def at(self, xq) -> np.ndarray:
        """Interpolated u at query abscissae."""
        return np.interp(xq, self.x, self.u)

    @property
    def stayed_positive(self) -> bool:
        return self.first_zero is None or self.first_zero >= 1.0 - 1e-9


def potential_energy(lam: float, a_val: float, u: float) -> float:
    """lam*u^2/2 + a_val*u^4/4."""
    return lam * u**2 / 2.0 + a_val * u**4 / 4.0


def _pieces(w: Weight) -> list[tuple[float, float, float]]:
    """(x_lo, x_hi, a) for each maximal constant-coefficient piece."""
    edges = [0.0] + list(w.edges) + [1.0]
    return [(lo, hi, eval_weight(w, 0.5 * (lo + hi)))
            for lo, hi in zip(edges, edges[1:])]


def _shoot(w: Weight, lam: float, v0: float, step_tol: float,
           stop_on_crossing: bool) -> Trajectory:
    xs = [np.array([0.0])]
    us = [np.array([0.0])]
    vs = [np.array([v0])]
    drift = []
    state = np.array([0.0, v0])
    first_zero = None
    for lo, hi, a in _pieces(w):
        def rhs(x, y, a=a):
            return [y[1], -lam * y[0] - a * y[0] ** 3]

        def cross_zero(x, y):
            return y[0] + 1e-14
        cross_zero.terminal = stop_on_crossing
        cross_zero.direction = -1.0

        def blow_up(x, y):
            return abs(y[0]) - _BLOWUP
        blow_up.terminal = True
        blow_up.direction = 1.0

        sol = solve_ivp(rhs, (lo, hi), state, method="RK45",
                        rtol=step_tol, atol=step_tol * 1e-2,
                        events=[cross_zero, blow_up])
        xs.append(sol.t[1:])
        us.append(sol.y[0][1:])
        vs.append(sol.y[1][1:])
        e0 = state[1] ** 2 / 2.0 + potential_energy(lam, a, state[0])
        e1 = sol.y[1][-1] ** 2 / 2.0 + potential_energy(lam, a, sol.y[0][-1])
        drift.append(abs(e1 - e0) / max(abs(e0), abs(e1), 1.0))
        state = np.array([sol.y[0][-1], sol.y[1][-1]])
        if first_zero is None and len(sol.t_events[0]):
            crossings = sol.t_events[0][sol.t_events[0] > 1e-12]
            if len(crossings):
                first_zero = float(crossings[0])
        if len(sol.t_events[1]):
            raise BlowUpError(
                f"|u| exceeded {_BLOWUP:g} at x = {sol.t_events[1][0]:.6g}"
            )
        if sol.status == 1 and stop_on_crossing and first_zero is not None:
            break
    return Trajectory(x=np.concatenate(xs), u=np.concatenate(us),
                      v=np.concatenate(vs), v0=float(v0), lam=float(lam),
                      first_zero=first_zero, piece_energy_drift=drift)


def integrate_ivp(w: Weight, lam: float, v0: float,
                  step_tol: float = 1e-10) -> Trajectory:
    """Adaptive RK45 shot from (0, v0); steps never straddle a coefficient jump.

    Integration stops early when u crosses zero from above (the shot left the
    positive cone), recording the crossing location; |u| > 1e8 raises
    BlowUpError.
    """
    if v0 <= 0:
        raise ValueError("positive solutions leave the origin with v0 > 0")
    if step_tol <= 0:
        raise ValueError("step_tol must be positive")
    return _shoot(w, lam, v0, step_tol, stop_on_crossing=True)


def _miss(w: Weight, lam: float, v0: float, step_tol: float):
    """Signed boundary miss, cheap to evaluate.

    Returns first_zero - 1 < 0 when the shot leaves the positive cone before
    x = 1 (integration stops at the crossing), u(1) >= 0 otherwise.  The two
    pieces join continuously through zero exactly at slopes v0 whose shot
    satisfies u(1) = 0 with u > 0 inside, which are the positive solutions.
    Blow-up before a crossing means u escaped upward, a large positive miss.
    """
    try:
        traj = _shoot(w, lam, v0, step_tol, stop_on_crossing=True)
    except BlowUpError:
        return _BLOWUP
    if traj.first_zero is not None and traj.first_zero < 1.0:
        return traj.first_zero - 1.0
    return float(traj.u[-1])


def shoot_count(w: Weight, lam: float, v0_max: float | None = None,
                grid_size: int = 200, step_tol: float = 1e-8,
                refine_tol: float = 1e-10):
    """Count positive solutions by scanning the initial slope.

    Scans v0 over a log-spaced grid in (0, v0_max], brackets sign changes of
    the boundary miss u(1; v0), refines each bracket by bisection, and keeps
    the roots whose shot stayed positive on (0, 1).  Returns
    (count, sorted v0 roots).
    """
    if grid_size < 100:
        raise ValueError("grid_size must be at least 100")
    if v0_max is None:
        # Homoclinic slope scale is (-2*lam)^(3/2); factor 2 covers the
        # exterior trajectories that boundary shots ride on.
        v0_max = 2.0 * max(-2.0 * lam, np.pi**2) ** 1.5
    grid = np.geomspace(v0_max * 1e-6, v0_max, grid_size)
    vals = [_miss(w, lam, v, step_tol) for v in grid]

    roots = []
    for va, fa, vb, fb in zip(grid, vals, grid[1:], vals[1:]):
        if fa * fb >= 0.0:
            continue
        lo, hi, flo = va, vb, fa
        while hi - lo > refine_tol * max(1.0, hi):
            mid = 0.5 * (lo + hi)
            fm = _miss(w, lam, mid, step_tol)
            if fm == 0.0 or flo * fm < 0.0:
                hi = mid
            else:
                lo, flo = mid, fm
        root = 0.5 * (lo + hi)
        traj = _shoot(w, lam, root, step_tol, stop_on_crossing=True)
        if traj.first_zero is None or traj.first_zero > 1.0 - 1e-4:
            roots.append(root)

    roots = sorted(roots)
    merged = []
    for r in roots:
        if merged and abs(r - merged[-1]) < 1e-8 * max(1.0, r):
            continue  # two roots shared a grid cell: grid too coarse
        merged.append(r)
    return len(merged), merged


def time_map(u0: float, lam: float) -> float:
    """Travel time from (0, v0) to the maximal amplitude (u0, 0).

    T = integral_0^{pi/2} dphi / sqrt(lam + u0^2*(1 + sin(phi)^2)/2)
    after theta = sin(phi); requires the exterior condition u0^2 > -2*lam.
    """
    if lam >= 0:
        raise ValueError("time map defined for lam < 0")
    if u0**2 <= -2.0 * lam:
        raise ValueError(f"u0 = {u0} not an exterior amplitude for lam = {lam}")

    def integrand(phi):
        return 1.0 / np.sqrt(lam + 0.5 * u0**2 * (1.0 + np.sin(phi) ** 2))

    val, _ = quad(integrand, 0.0, np.pi / 2.0, epsabs=1e-13, epsrel=1e-12)
    return float(val)


def check_decay_identity(w: Weight, m: Mesh, u: np.ndarray, lam: float,
                         interval_index: int, residual_norm: float | None = None,
                         newton_tol: float = 1e-4) -> float:
    """Relative mismatch of the weighted-average identity on one vanishing interval.

    With phi(x) = sin(pi*(x - alpha)/h) on (alpha, beta) where the weight
    vanishes, any solution satisfies

        int_alpha^beta u*phi = (u(beta)*phi'(beta) - u(alpha)*phi'(alpha))
                               / (lam - (pi/h)^2),

    so the mismatch measures quadrature plus discretization error only.
    """
    if w.eps != 0.0:
        raise ValueError("identity check requires a vanishing (eps = 0) weight")
    if residual_norm is not None and residual_norm > 10 * newton_tol:
        raise ValueError("input does not solve the problem to tolerance")
    alpha, beta = w.intervals[interval_index]
    h = beta - alpha
    x_full = m.nodes
    u_full = np.concatenate([[0.0], np.asarray(u, dtype=float), [0.0]])

    inner = (x_full > alpha) & (x_full < beta)
    xq = np.concatenate([[alpha], x_full[inner], [beta]])
    uq = np.interp(xq, x_full, u_full)
    phi = np.sin(np.pi * (xq - alpha) / h)
    lhs = np.trapezoid(uq * phi, xq)

    dphi = np.pi / h
    u_a = float(np.interp(alpha, x_full, u_full))
    u_b = float(np.interp(beta, x_full, u_full))
    rhs = (u_b * (-dphi) - u_a * dphi) / (lam - (np.pi / h) ** 2)
    return abs(lhs - rhs) / (abs(rhs) + 1e-12)
