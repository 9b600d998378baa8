import numpy as np
import pytest

from bvpcont.corrector import (AugmentedState, NewtonError,
                               SingularSystemError, Tangent,
                               augmented_residual, bordered_solve,
                               newton_augmented, newton_fixed_lambda,
                               solve_tridiag)
from bvpcont.discretize import BandedJacobian, jacobian, residual
from bvpcont.mesh import build_uniform_mesh
from bvpcont.seeding import deepen_solution, sine_seed, well_bump_seed
from bvpcont.weight import build_weight


def test_trivial_root_in_one_step():
    w = build_weight(1, 0.1, 0.0)
    m = build_uniform_mesh(50)
    u = newton_fixed_lambda(w, m, 5.0, np.zeros(50))
    assert np.array_equal(u, np.zeros(50))


def test_converges_from_sine_seed():
    w = build_weight(1, 0.1, 1.0)  # a == 1
    m = build_uniform_mesh(500)
    u = newton_fixed_lambda(w, m, 9.0, 0.5 * np.sin(np.pi * m.interior))
    assert u.min() > 0
    assert np.linalg.norm(residual(w, m, 9.0, u)) < 1e-4


def test_quadratic_convergence_of_increments():
    w = build_weight(1, 0.1, 1.0)
    m = build_uniform_mesh(300)
    lam = -20.0
    u = newton_fixed_lambda(w, m, lam, sine_seed(m, 6.0), tol=1e-8)
    # restart from a perturbed iterate and track the Newton increments
    rng = np.random.default_rng(1)
    v = u * (1.0 + 0.05 * rng.uniform(-1, 1, size=len(u)))
    steps = []
    for _ in range(8):
        delta = solve_tridiag(jacobian(w, m, lam, v), residual(w, m, lam, v))
        v -= delta
        steps.append(np.linalg.norm(delta))
        if steps[-1] < 1e-7:  # below this the rounding floor takes over
            break
    # quadratic: each increment is at most C * previous^2 over the tail
    tail = [s for s in steps if s > 1e-7][-3:]
    assert len(tail) >= 2
    for a, b in zip(tail, tail[1:]):
        assert b <= 10.0 * a**2


def test_symmetry_preserved_by_iteration():
    w = build_weight(2, 0.15, 0.0)
    m = build_uniform_mesh(301)
    u = newton_fixed_lambda(w, m, 8.0, sine_seed(m, 0.8), tol=1e-8)
    assert np.max(np.abs(u - u[::-1])) < 1e-10 * (1 + np.abs(u).max())


def test_divergence_and_exhaustion_raise():
    w = build_weight(1, 0.1, 1.0)
    m = build_uniform_mesh(100)
    with pytest.raises(NewtonError):
        newton_fixed_lambda(w, m, -500.0, 1e6 * np.ones(100), max_iters=3)


def test_isola_solution_at_minus_1200():
    # the eps = 0.30 isola exists only below its top fold near -1111.65; a
    # well-centered bump seed at -1200 lands in its Newton basin, and the
    # solution carries down to -1300 by natural stepping
    w = build_weight(1, 0.1, 0.3)
    m = build_uniform_mesh(500)
    u = newton_fixed_lambda(w, m, -1200.0, well_bump_seed(w, m, -1200.0))
    assert u.min() > -1e-8
    assert np.abs(u).max() > 1.0
    assert np.linalg.norm(residual(w, m, -1200.0, u)) < 1e-4
    u = deepen_solution(w, m, u, -1200.0, -1300.0)
    assert np.linalg.norm(residual(w, m, -1300.0, u)) < 1e-4


def test_augmented_residual_trivial_cases():
    w = build_weight(1, 0.1, 0.0)
    m = build_uniform_mesh(40)
    n = 40
    rng = np.random.default_rng(5)
    u = rng.normal(size=n)
    y = AugmentedState(-3.0, u.copy())
    du = rng.normal(size=n)
    t = Tangent(du, 0.7).normalized()
    r = augmented_residual(w, m, y, AugmentedState(-3.0, u.copy()), t, 0.0)
    assert r[-1] == 0.0
    assert np.array_equal(r[:-1], residual(w, m, -3.0, u))
    # Euler predictor satisfies the linearized constraint exactly
    ds = 2.5
    y2 = AugmentedState(y.lam + ds * t.dlam, y.u + ds * t.du)
    r2 = augmented_residual(w, m, y2, y, t, ds)
    assert abs(r2[-1]) < 1e-12


def test_augmented_jacobian_matches_finite_differences():
    w = build_weight(1, 0.2, 0.0)
    m = build_uniform_mesh(25)
    n = 25
    rng = np.random.default_rng(11)
    u = rng.uniform(0.2, 1.0, size=n)
    lam = -4.0
    y_prev = AugmentedState(lam - 0.5, u - 0.01)
    t = Tangent(rng.normal(size=n), 0.3).normalized()
    ds = 1.0

    J = jacobian(w, m, lam, u)
    bordered = np.zeros((n + 1, n + 1))
    bordered[:n, :n] = J.dense()
    bordered[:n, n] = -u
    bordered[n, :n] = t.du
    bordered[n, n] = t.dlam

    step = 1e-6
    fd = np.zeros((n + 1, n + 1))
    for j in range(n + 1):
        yp = AugmentedState(lam, u.copy())
        ym = AugmentedState(lam, u.copy())
        if j < n:
            yp.u[j] += step
            ym.u[j] -= step
        else:
            yp.lam += step
            ym.lam -= step
        fd[:, j] = (augmented_residual(w, m, yp, y_prev, t, ds)
                    - augmented_residual(w, m, ym, y_prev, t, ds)) / (2 * step)
    scale = np.abs(bordered).max()
    assert np.max(np.abs(fd - bordered)) <= 1e-6 * scale


def test_bordered_solve_decoupled():
    n = 12
    J = BandedJacobian(sub=np.zeros(n - 1), diag=2.0 * np.ones(n),
                       sup=np.zeros(n - 1))
    t = Tangent(np.zeros(n), 1.0)
    rhs = np.zeros(n + 1)
    rhs[-1] = 1.0
    x = bordered_solve(J, np.zeros(n), t, rhs)
    assert np.allclose(x, rhs, rtol=0, atol=1e-15)


def test_bordered_solve_matches_dense():
    rng = np.random.default_rng(2)
    for n in (10, 50, 100):
        J = BandedJacobian(sub=rng.normal(size=n - 1),
                           diag=rng.normal(size=n) + 4.0,
                           sup=rng.normal(size=n - 1))
        b_col = rng.normal(size=n)
        t = Tangent(rng.normal(size=n), rng.normal()).normalized()
        rhs = rng.normal(size=n + 1)
        x = bordered_solve(J, b_col, t, rhs)
        full = np.zeros((n + 1, n + 1))
        full[:n, :n] = J.dense()
        full[:n, n] = b_col
        full[n, :n] = t.du
        full[n, n] = t.dlam
        ref = np.linalg.solve(full, rhs)
        assert np.linalg.norm(x - ref) <= 1e-10 * max(np.linalg.norm(ref), 1.0)


def test_bordered_solve_regularizes_singular_block():
    # J with an exactly zero eigenvalue; the bordered matrix stays regular
    rng = np.random.default_rng(4)
    n = 30
    J = BandedJacobian(sub=-np.ones(n - 1), diag=2.0 * np.ones(n),
                       sup=-np.ones(n - 1))
    k = np.arange(1, n + 1)
    lam1 = 2.0 * (1.0 - np.cos(np.pi / (n + 1)))
    J.diag -= lam1  # singular to rounding
    mode = np.sin(np.pi * k / (n + 1))
    t = Tangent(mode / np.linalg.norm(mode), 0.5).normalized()
    rhs = rng.normal(size=n + 1)
    x = bordered_solve(J, mode, t, rhs)
    res = np.concatenate([J.matvec(x[:-1]) + mode * x[-1],
                          [t.du @ x[:-1] + t.dlam * x[-1]]]) - rhs
    assert np.linalg.norm(res) <= 1e-8 * max(np.linalg.norm(rhs), 1.0)


def test_solve_tridiag_singular_raises():
    n = 5
    J = BandedJacobian(sub=np.zeros(n - 1), diag=np.zeros(n),
                       sup=np.zeros(n - 1))
    with pytest.raises(SingularSystemError):
        solve_tridiag(J, np.ones(n))


def test_newton_augmented_follows_constraint():
    w = build_weight(1, 0.1, 1.0)
    m = build_uniform_mesh(200)
    lam = 5.0
    u = newton_fixed_lambda(w, m, lam, sine_seed(m, 2.0), tol=1e-8)
    y_prev = AugmentedState(lam, u)
    J = jacobian(w, m, lam, u)
    du = solve_tridiag(J, u)
    t = Tangent(du, 1.0).normalized()
    if t.dlam > 0:
        t = Tangent(-t.du, -t.dlam)
    ds = 1.0
    y_pred = AugmentedState(lam + ds * t.dlam, u + ds * t.du)
    y = newton_augmented(w, m, y_pred, y_prev, t, ds)
    r = augmented_residual(w, m, y, y_prev, t, ds)
    assert np.linalg.norm(r) < 1e-4
    assert y.lam < lam
