"""Finite-difference residual and Jacobian on (possibly non-uniform) meshes.

The boundary value problem is

    -u'' = lam*u + a(x)*u^3  on (0,1),   u(0) = u(1) = 0,

discretized with the 3-point second-difference stencil

    L[u]_i = 2*u_{i-1}/(h_i*(h_i+h_{i+1})) - 2*u_i/(h_i*h_{i+1})
             + 2*u_{i+1}/(h_{i+1}*(h_i+h_{i+1})),     h_i = x_i - x_{i-1},

which is the standard centered choice, second order on smooth meshes.  The
residual component i is  -L[u]_i - lam*u_i - a(x_i)*u_i^3  with u_0 = u_{N+1} = 0.
"""

from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .mesh import Mesh, mesh_spacings
from .weight import Weight, eval_weight

__all__ = [
    "BandedJacobian",
    "MeshMismatchError",
    "residual",
    "jacobian",
    "stencil_coefficients",
    "node_weights",
    "discrete_l2_norm",
    "toeplitz_eigenvalue",
    "principal_eigenvalue",
]


class MeshMismatchError(ValueError):
    """Profile length does not match the mesh's interior node count."""


@dataclass
class BandedJacobian:
    """Tridiagonal matrix: sub (len N-1), diag (len N), sup (len N-1)."""

    sub: np.ndarray
    diag: np.ndarray
    sup: np.ndarray

    @property
    def n(self) -> int:
        return len(self.diag)

    def matvec(self, v: np.ndarray) -> np.ndarray:
        out = self.diag * v
        out[:-1] += self.sup * v[1:]
        out[1:] += self.sub * v[:-1]
        return out

    def dense(self) -> np.ndarray:
        a = np.diag(self.diag)
        a += np.diag(self.sub, -1)
        a += np.diag(self.sup, 1)
        return a


def _check(m: Mesh, u: np.ndarray) -> np.ndarray:
    u = np.asarray(u, dtype=float)
    if u.shape != (m.n_interior,):
        raise MeshMismatchError(
            f"profile length {u.shape} does not match {m.n_interior} interior nodes"
        )
    return u


def stencil_coefficients(m: Mesh):
    """(c_minus, c_center, c_plus) of the second-difference operator L.

    L[u]_i = c_minus_i*u_{i-1} - c_center_i*u_i + c_plus_i*u_{i+1}.
    """
    h = mesh_spacings(m)
    hl, hr = h[:-1], h[1:]
    c_minus = 2.0 / (hl * (hl + hr))
    c_plus = 2.0 / (hr * (hl + hr))
    c_center = 2.0 / (hl * hr)
    return c_minus, c_center, c_plus


def node_weights(w: Weight, m: Mesh) -> np.ndarray:
    """Coefficient a(x_i) at the interior nodes."""
    return np.asarray(eval_weight(w, m.interior), dtype=float)


def _apply_l(m: Mesh, u: np.ndarray) -> np.ndarray:
    c_minus, c_center, c_plus = stencil_coefficients(m)
    out = -c_center * u
    out[1:] += c_minus[1:] * u[:-1]
    out[:-1] += c_plus[:-1] * u[1:]
    return out


def residual(w: Weight, m: Mesh, lam: float, u: np.ndarray) -> np.ndarray:
    """-L[u] - lam*u - a(x)*u^3 at the interior nodes."""
    u = _check(m, u)
    a = node_weights(w, m)
    return -_apply_l(m, u) - lam * u - a * u**3


def jacobian(w: Weight, m: Mesh, lam: float, u: np.ndarray) -> BandedJacobian:
    """Exact derivative of residual with respect to u."""
    u = _check(m, u)
    a = node_weights(w, m)
    c_minus, c_center, c_plus = stencil_coefficients(m)
    return BandedJacobian(
        sub=-c_minus[1:],
        diag=c_center - lam - 3.0 * a * u**2,
        sup=-c_plus[:-1],
    )


def discrete_l2_norm(m: Mesh, u: np.ndarray) -> float:
    """( sum_{i=1}^{N} (x_i - x_{i-1}) u_i^2 )^{1/2}.

    The sum runs over the interior nodes with left-cell widths, so the last
    cell (x_N, x_{N+1}) carries no weight; the asymmetry is O(dx) and the
    formula is exactly reflection-invariant for symmetric u on a symmetric
    mesh because the spacings are palindromic.
    """
    u = _check(m, u)
    h = mesh_spacings(m)[:-1]
    return float(np.sqrt(np.sum(h * u**2)))


def toeplitz_eigenvalue(n: int, k: int) -> float:
    """k-th eigenvalue of the uniform discrete -d^2/dx^2 with N interior nodes:

        2*(N+1)^2 * (1 + cos((N+1-k)*pi/(N+1))),

    which converges to (k*pi)^2 as N grows.
    """
    if not 1 <= k <= n:
        raise IndexError(f"eigenvalue index k = {k} outside 1..{n}")
    return 2.0 * (n + 1) ** 2 * (1.0 + np.cos((n + 1 - k) * np.pi / (n + 1)))


def principal_eigenvalue(m: Mesh) -> float:
    """Smallest eigenvalue of the discrete -d^2/dx^2 on an arbitrary mesh.

    The operator is similar to a symmetric tridiagonal matrix via the
    diagonal scaling with cell-average weights, so a symmetric eigensolver
    applies.
    """
    h = mesh_spacings(m)
    hl, hr = h[:-1], h[1:]
    diag = 2.0 / (hl * hr)
    wcell = 0.5 * (hl + hr)
    off = -1.0 / (hr[:-1] * np.sqrt(wcell[:-1] * wcell[1:]))
    vals = eigh_tridiagonal(diag, off, select="i", select_range=(0, 0),
                            eigvals_only=True)
    return float(vals[0])
