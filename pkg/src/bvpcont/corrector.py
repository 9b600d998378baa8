"""Newton correctors: fixed-parameter solves and the arclength-augmented system.

The augmented unknown is y = (u, lam).  During continuation the corrector
solves

    F(lam, u) = 0,
    t_du . (u - u_prev) + t_dlam * (lam - lam_prev) - ds = 0,

whose (N+1)x(N+1) Jacobian is the tridiagonal Jacobian of F bordered by the
column dF/dlam = -u and the tangent row.  Folds in lam are regular points of
this system, provided the linear solver tolerates a singular tridiagonal block.
"""

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .discretize import BandedJacobian, jacobian, residual
from .mesh import Mesh
from .weight import Weight

__all__ = [
    "AugmentedState",
    "Tangent",
    "NewtonError",
    "SingularSystemError",
    "solve_tridiag",
    "newton_fixed_lambda",
    "augmented_residual",
    "bordered_solve",
    "newton_augmented",
]

DEFAULT_TOL = 1e-4
DEFAULT_MAX_ITERS = 25
_DIVERGENCE_FACTOR = 1e6


class NewtonError(RuntimeError):
    """Newton iteration failed to converge."""


class SingularSystemError(RuntimeError):
    """Linear system singular beyond what bordering can regularize."""


@dataclass
class AugmentedState:
    """Continuation unknown (u, lam)."""

    lam: float
    u: np.ndarray

    def copy(self) -> "AugmentedState":
        return AugmentedState(self.lam, self.u.copy())


@dataclass
class Tangent:
    """Unit direction (du, dlam) along a branch."""

    du: np.ndarray
    dlam: float

    def norm(self) -> float:
        return float(np.sqrt(np.dot(self.du, self.du) + self.dlam**2))

    def normalized(self) -> "Tangent":
        n = self.norm()
        return Tangent(self.du / n, self.dlam / n)

    def dot(self, other: "Tangent") -> float:
        return float(np.dot(self.du, other.du) + self.dlam * other.dlam)


def _banded(J: BandedJacobian) -> np.ndarray:
    ab = np.zeros((3, J.n))
    ab[0, 1:] = J.sup
    ab[1, :] = J.diag
    ab[2, :-1] = J.sub
    return ab


def solve_tridiag(J: BandedJacobian, b: np.ndarray) -> np.ndarray:
    """Solve J x = b by banded LU with partial pivoting."""
    try:
        x = scipy.linalg.solve_banded((1, 1), _banded(J), b)
    except scipy.linalg.LinAlgError as exc:
        raise SingularSystemError("singular tridiagonal system") from exc
    if not np.all(np.isfinite(x)):
        raise SingularSystemError("tridiagonal solve produced non-finite values")
    return x


def newton_fixed_lambda(w: Weight, m: Mesh, lam: float, u0: np.ndarray,
                        tol: float = DEFAULT_TOL,
                        max_iters: int = DEFAULT_MAX_ITERS) -> np.ndarray:
    """Newton's method on F(lam, .) = 0 at fixed lam.

    Returns u with ||F(lam, u)||_2 < tol.  Raises NewtonError on divergence
    or iteration exhaustion, SingularSystemError near a singular Jacobian.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    u = np.asarray(u0, dtype=float).copy()
    r = residual(w, m, lam, u)
    rnorm0 = max(np.linalg.norm(r), 1e-300)
    for _ in range(max_iters):
        rnorm = np.linalg.norm(r)
        if rnorm < tol:
            return u
        if rnorm > _DIVERGENCE_FACTOR * rnorm0:
            raise NewtonError(f"residual diverged to {rnorm:.3e}")
        J = jacobian(w, m, lam, u)
        u -= solve_tridiag(J, r)
        r = residual(w, m, lam, u)
    if np.linalg.norm(r) < tol:
        return u
    raise NewtonError(
        f"no convergence after {max_iters} iterations (||F|| = {np.linalg.norm(r):.3e})"
    )


def augmented_residual(w: Weight, m: Mesh, y: AugmentedState,
                       y_prev: AugmentedState, t: Tangent, ds: float) -> np.ndarray:
    """[F(lam, u); t . (y - y_prev) - ds], length N+1."""
    if y.u.shape != y_prev.u.shape or y.u.shape != t.du.shape:
        raise ValueError("dimension mismatch in augmented residual")
    f = residual(w, m, y.lam, y.u)
    g = np.dot(t.du, y.u - y_prev.u) + t.dlam * (y.lam - y_prev.lam) - ds
    return np.concatenate([f, [g]])


def bordered_solve(J: BandedJacobian, b_col: np.ndarray, t: Tangent,
                   rhs: np.ndarray) -> np.ndarray:
    """Solve [[J, b_col], [t.du, t.dlam]] x = rhs.

    Block elimination with two tridiagonal solves and a scalar Schur
    complement; falls back to a dense factorization of the assembled system
    when J is (near-)singular, which happens exactly at fold points.
    """
    n = J.n
    if len(b_col) != n or len(rhs) != n + 1 or len(t.du) != n:
        raise ValueError("dimension mismatch in bordered solve")
    r, rho = rhs[:n], rhs[n]
    try:
        z = solve_tridiag(J, r)
        wcol = solve_tridiag(J, b_col)
        schur = t.dlam - np.dot(t.du, wcol)
        if abs(schur) < 1e-12 * (abs(t.dlam) + np.linalg.norm(t.du) + 1.0):
            raise SingularSystemError("degenerate Schur complement")
        xi = (rho - np.dot(t.du, z)) / schur
        x = z - xi * wcol
        sol = np.concatenate([x, [xi]])
        # Residual check: block elimination is unreliable when J has a
        # near-zero pivot even if the bordered matrix is well conditioned.
        res = np.concatenate([
            J.matvec(x) + b_col * xi - r,
            [np.dot(t.du, x) + t.dlam * xi - rho],
        ])
        scale = np.linalg.norm(rhs) + np.linalg.norm(sol) * (
            np.abs(J.diag).max() + 1.0
        )
        if np.linalg.norm(res) <= 1e-10 * scale:
            return sol
    except SingularSystemError:
        pass

    full = np.zeros((n + 1, n + 1))
    full[:n, :n] = J.dense()
    full[:n, n] = b_col
    full[n, :n] = t.du
    full[n, n] = t.dlam
    try:
        sol = scipy.linalg.solve(full, rhs)
    except scipy.linalg.LinAlgError as exc:
        raise SingularSystemError("singular bordered matrix") from exc
    if not np.all(np.isfinite(sol)):
        raise SingularSystemError("bordered solve produced non-finite values")
    return sol


def newton_augmented(w: Weight, m: Mesh, y0: AugmentedState,
                     y_prev: AugmentedState, t: Tangent, ds: float,
                     tol: float = DEFAULT_TOL,
                     max_iters: int = DEFAULT_MAX_ITERS) -> AugmentedState:
    """Newton's method on the arclength-augmented system, starting at y0."""
    y = y0.copy()
    r = augmented_residual(w, m, y, y_prev, t, ds)
    rnorm0 = max(np.linalg.norm(r), 1e-300)
    for _ in range(max_iters):
        rnorm = np.linalg.norm(r)
        if rnorm < tol:
            return y
        if rnorm > _DIVERGENCE_FACTOR * rnorm0:
            raise NewtonError(f"augmented residual diverged to {rnorm:.3e}")
        J = jacobian(w, m, y.lam, y.u)
        delta = bordered_solve(J, -y.u, t, r)
        y.u -= delta[:-1]
        y.lam -= delta[-1]
        r = augmented_residual(w, m, y, y_prev, t, ds)
    if np.linalg.norm(r) < tol:
        return y
    raise NewtonError(
        f"augmented Newton: no convergence after {max_iters} iterations"
    )
