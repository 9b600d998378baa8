"""Detection, localization and branch switching at simple bifurcation points.

Simple branch points on a followed path are flagged by a sign change of the
determinant of the fixed-parameter tridiagonal Jacobian, localized by
bisection in arclength (each trial point corrected on the branch), and passed
through by perturbing the host solution along the computed null vector.
"""

from dataclasses import dataclass

import numpy as np

from .continuation import Branch
from .corrector import (AugmentedState, NewtonError, SingularSystemError,
                        newton_augmented, newton_fixed_lambda, solve_tridiag)
from .discretize import BandedJacobian, jacobian
from .mesh import Mesh
from .weight import Weight

__all__ = [
    "BifurcationEvent",
    "BracketError",
    "det_sign",
    "null_vector",
    "locate_bifurcation",
    "switch_branch",
]

_ZERO_DET_TOL = 1e-10


class BracketError(ValueError):
    """Bisection bracket endpoints carry the same determinant sign."""


@dataclass
class BifurcationEvent:
    lambda_b: float
    kind: str  # pitchfork | fold | unclassified
    null_vector: np.ndarray
    branch_index: int


def det_sign(J: BandedJacobian) -> tuple[int, float]:
    """Sign and log-magnitude of det(J) via the tridiagonal recurrence.

    The three-term recurrence is rescaled every step to avoid overflow; a
    final normalized value below 1e-10 is reported as sign 0.
    """
    d, sub, sup = J.diag, J.sub, J.sup
    prev, cur = 1.0, d[0]
    logmag = 0.0
    for i in range(1, J.n):
        nxt = d[i] * cur - sub[i - 1] * sup[i - 1] * prev
        prev, cur = cur, nxt
        scale = max(abs(cur), abs(prev))
        if scale > 0.0:
            cur /= scale
            prev /= scale
            logmag += np.log(scale)
    if abs(cur) < _ZERO_DET_TOL:
        return 0, -np.inf if cur == 0.0 else logmag + np.log(abs(cur))
    return (1 if cur > 0 else -1), logmag + np.log(abs(cur))


def null_vector(J: BandedJacobian, iters: int = 12) -> np.ndarray:
    """Unit approximate null vector of a (near-)singular J by inverse iteration."""
    shift = 1e-12 * float(np.abs(J.diag).max() + 1.0)
    Js = BandedJacobian(J.sub, J.diag + shift, J.sup)
    v = np.ones(J.n)
    v[::2] += 0.5  # break accidental orthogonality to the target mode
    v /= np.linalg.norm(v)
    for _ in range(iters):
        try:
            v = solve_tridiag(Js, v)
        except SingularSystemError:
            Js = BandedJacobian(J.sub, Js.diag + 10 * shift, J.sup)
            continue
        v /= np.linalg.norm(v)
    if v[np.argmax(np.abs(v))] < 0:
        v = -v
    return v


def _corrected_state(w, m, branch: Branch, idx: int, s: float, tol: float):
    """Point on the branch at arclength offset s from stored point idx."""
    base = branch.points[idx]
    t = branch.tangents[idx]
    y_prev = AugmentedState(base.lam, base.u.copy())
    if s == 0.0:
        return y_prev
    y_pred = AugmentedState(base.lam + s * t.dlam, base.u + s * t.du)
    return newton_augmented(w, m, y_pred, y_prev, t, s, tol=tol)


def locate_bifurcation(w: Weight, m: Mesh, branch: Branch,
                       bracket: tuple[int, int], tol: float = 1e-4,
                       newton_tol: float = 1e-4) -> BifurcationEvent:
    """Bisect in arclength between two branch indices with opposite det signs."""
    ia, ib = bracket
    pa, pb = branch.points[ia], branch.points[ib]
    sign_a, _ = det_sign(jacobian(w, m, pa.lam, pa.u))
    sign_b, _ = det_sign(jacobian(w, m, pb.lam, pb.u))
    if sign_a == sign_b or sign_a == 0 and sign_b == 0:
        raise BracketError(f"no sign change between indices {ia} and {ib}")

    s_hi = float(np.hypot(np.linalg.norm(pb.u - pa.u), pb.lam - pa.lam))
    lo, hi = 0.0, s_hi
    lam_lo, lam_hi = pa.lam, pb.lam
    y_mid = AugmentedState(pa.lam, pa.u.copy())
    while abs(lam_hi - lam_lo) > tol:
        s_mid = 0.5 * (lo + hi)
        y_mid = _corrected_state(w, m, branch, ia, s_mid, newton_tol)
        sign_mid, _ = det_sign(jacobian(w, m, y_mid.lam, y_mid.u))
        if sign_mid == sign_a:
            lo, lam_lo = s_mid, y_mid.lam
        else:
            hi, lam_hi = s_mid, y_mid.lam

    lam_b = 0.5 * (lam_lo + lam_hi)
    y_mid = _corrected_state(w, m, branch, ia, 0.5 * (lo + hi), newton_tol)
    v = null_vector(jacobian(w, m, y_mid.lam, y_mid.u))

    antisym = np.linalg.norm(v[::-1] + v) < 1e-6 * np.linalg.norm(v) * len(v)
    if (pa.lam - lam_b) * (pb.lam - lam_b) > 0:
        kind = "fold"  # lam does not cross lam_b monotonically
    elif antisym:
        kind = "pitchfork"
    else:
        kind = "unclassified"
    return BifurcationEvent(lambda_b=float(lam_b), kind=kind, null_vector=v,
                            branch_index=ia)


def switch_branch(w: Weight, m: Mesh, ev: BifurcationEvent, host,
                  amplitude: float | None = None, newton_tol: float = 1e-4,
                  max_retries: int = 3):
    """Two corrected states off the host branch at lam just below lambda_b.

    Predictors are host.u +/- amplitude * null_vector at
    lam = lambda_b - amplitude/10, each corrected by fixed-lam Newton.  If
    both predictors collapse back onto the host branch the amplitude is
    doubled, up to three times.
    """
    if amplitude is None:
        amplitude = 0.01 * (1.0 + np.linalg.norm(host.u))
    for _ in range(max_retries + 1):
        delta = amplitude / 10.0
        lam = ev.lambda_b - delta
        u_host = newton_fixed_lambda(w, m, lam, host.u, tol=newton_tol)
        states = []
        fell_back = 0
        for sgn in (+1.0, -1.0):
            u_pred = host.u + sgn * amplitude * ev.null_vector
            try:
                u_corr = newton_fixed_lambda(w, m, lam, u_pred, tol=newton_tol)
            except (NewtonError, SingularSystemError):
                u_corr = None
            if u_corr is None:
                fell_back += 1
                states.append(None)
                continue
            if np.max(np.abs(u_corr - u_host)) < 1e-6 * (1.0 + np.abs(u_host).max()):
                fell_back += 1
                states.append(None)
            else:
                states.append(AugmentedState(lam, u_corr))
        if fell_back < 2 and all(s is not None for s in states):
            return states[0], states[1]
        amplitude *= 2.0
    raise NewtonError("branch switching failed: predictors collapse onto host")
