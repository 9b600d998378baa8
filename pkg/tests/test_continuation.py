import time

import numpy as np
import pytest

from bvpcont.continuation import (ContinuationConfig, continue_branch,
                                  fold_points, initial_tangent, make_point,
                                  update_tangent)
from bvpcont.corrector import AugmentedState, Tangent, newton_fixed_lambda
from bvpcont.discretize import principal_eigenvalue, residual
from bvpcont.mesh import build_uniform_mesh
from bvpcont.seeding import sine_seed, well_bump_seed
from bvpcont.weight import build_weight


def onset_solution(w, m, offset=0.1):
    from bvpcont.diagram import onset_amplitude
    lam1 = principal_eigenvalue(m)
    lam = lam1 - offset
    u = newton_fixed_lambda(w, m, lam,
                            sine_seed(m, onset_amplitude(w, m, lam, lam1)))
    return lam, u


def test_config_validation():
    with pytest.raises(ValueError):
        ContinuationConfig(ds=1.0, ds_min=2.0)


def test_initial_tangent_subcritical_onset():
    w = build_weight(1, 0.1, 1.0)  # a == 1
    m = build_uniform_mesh(200)
    lam, u = onset_solution(w, m)
    t = initial_tangent(w, m, AugmentedState(lam, u), direction_hint=-1.0)
    assert t.dlam < 0
    assert abs(t.norm() - 1.0) < 1e-12
    mode = np.sin(np.pi * m.interior)
    mode /= np.linalg.norm(mode)
    du = t.du / np.linalg.norm(t.du)
    assert min(np.linalg.norm(du - mode), np.linalg.norm(du + mode)) < 1e-2


def test_tangent_is_nullvector_of_extended_jacobian():
    from bvpcont.discretize import jacobian
    w = build_weight(1, 0.3, 0.0)
    m = build_uniform_mesh(150)
    lam, u = onset_solution(w, m)
    t = initial_tangent(w, m, AugmentedState(lam, u))
    J = jacobian(w, m, lam, u)
    image = J.matvec(t.du) + (-u) * t.dlam
    assert np.linalg.norm(image) < 1e-8 * (1 + np.abs(J.diag).max())


def test_main_branch_square_root_onset():
    # autonomous case: norm ~ C * sqrt(pi^2 - lam); fit exponent 0.5 +- 0.05
    w = build_weight(1, 0.1, 1.0)
    m = build_uniform_mesh(300)
    lam1 = principal_eigenvalue(m)
    lam, u = onset_solution(w, m)
    start = make_point(w, m, lam, u, tag="branch_start")
    t0 = initial_tangent(w, m, AugmentedState(lam, u), direction_hint=-1.0)
    cfg = ContinuationConfig(lambda_min=-100.0)
    b = continue_branch(w, m, start, t0, cfg)
    assert "reached lambda_min" in b.diagnostics
    lams, norms = b.lambdas(), b.norms()
    sel = (lams >= -20.0) & (lams <= lam1)
    slope = np.polyfit(np.log(lam1 - lams[sel]), np.log(norms[sel]), 1)[0]
    assert abs(slope - 0.5) < 0.05
    # far from onset the growth is slower than the square root
    deep = lams <= -20.0
    deep_slope = np.polyfit(np.log(lam1 - lams[deep]),
                            np.log(norms[deep]), 1)[0]
    assert deep_slope < slope
    # monotone: no folds on the autonomous branch
    assert fold_points(b) == []
    # norm grows as lam decreases
    assert np.all(np.diff(norms) > 0) == np.all(np.diff(lams) < 0)


def test_every_point_revalidates_and_tangents_cohere():
    w = build_weight(1, 0.5, 0.0)
    m = build_uniform_mesh(200)
    lam, u = onset_solution(w, m)
    start = make_point(w, m, lam, u, tag="branch_start")
    t0 = initial_tangent(w, m, AugmentedState(lam, u), direction_hint=-1.0)
    b = continue_branch(w, m, start, t0, ContinuationConfig(lambda_min=-40.0))
    for p in b.points:
        assert np.linalg.norm(residual(w, m, p.lam, p.u)) < 1e-4
    for ta, tb in zip(b.tangents, b.tangents[1:]):
        assert ta.dot(tb) > 0


def test_runtime_h_half_to_minus_100():
    w = build_weight(1, 0.5, 0.0)
    m = build_uniform_mesh(500)
    lam, u = onset_solution(w, m)
    start = make_point(w, m, lam, u, tag="branch_start")
    t0 = initial_tangent(w, m, AugmentedState(lam, u), direction_hint=-1.0)
    t_wall = time.perf_counter()
    b = continue_branch(w, m, start, t0, ContinuationConfig(lambda_min=-100.0))
    assert time.perf_counter() - t_wall < 60.0
    assert b.points[-1].lam < -100.0


def test_isola_top_fold_matches():
    # eps = 0.30 detached component: the fold at its largest lam sits near
    # -1111.65; seed below the fold and trace through it
    from bvpcont.diagram import trace_to_fold
    w = build_weight(1, 0.1, 0.3)
    m = build_uniform_mesh(500)
    lam0 = -1200.0
    u = newton_fixed_lambda(w, m, lam0, well_bump_seed(w, m, lam0))
    start = make_point(w, m, lam0, u, tag="branch_start")
    b, lam_t = trace_to_fold(w, m, start, ContinuationConfig())
    assert lam_t is not None
    assert abs(lam_t - (-1111.65254)) / 1111.65254 < 0.01
    # the component is detached: every point stays well below the onset
    assert b.lambdas().max() < -1000.0
    assert len(fold_points(b)) >= 1


def test_reflection_equivariance_of_continuation():
    # start from an asymmetric solution; the mirrored start must produce the
    # mirrored branch point for point
    from bvpcont.seeding import PeakMask, peak_pattern_seed
    w = build_weight(1, 0.1, 0.0)
    m = build_uniform_mesh(200)
    lam0 = -50.0
    seed = peak_pattern_seed(w, m, PeakMask((True, False)), lam0)
    u = newton_fixed_lambda(w, m, lam0, seed)
    cfg = ContinuationConfig(lambda_min=-110.0, max_steps=30)
    s1 = make_point(w, m, lam0, u, tag="branch_start")
    t1 = initial_tangent(w, m, AugmentedState(lam0, u), direction_hint=-1.0)
    b1 = continue_branch(w, m, s1, t1, cfg)
    s2 = make_point(w, m, lam0, u[::-1], tag="branch_start")
    t2 = Tangent(t1.du[::-1], t1.dlam)
    b2 = continue_branch(w, m, s2, t2, cfg)
    assert len(b1.points) == len(b2.points)
    for p, q in zip(b1.points, b2.points):
        assert abs(p.lam - q.lam) < 1e-9 * (1 + abs(p.lam))
        assert np.max(np.abs(p.u[::-1] - q.u)) < 1e-9 * (1 + np.abs(p.u).max())


def test_update_tangent_orientation():
    w = build_weight(1, 0.1, 1.0)
    m = build_uniform_mesh(100)
    lam, u = onset_solution(w, m)
    t = initial_tangent(w, m, AugmentedState(lam, u), direction_hint=-1.0)
    t2 = update_tangent(w, m, AugmentedState(lam, u), t)
    assert t2.dot(t) > 0
    assert abs(t2.norm() - 1.0) < 1e-12


def test_fold_points_requires_three_points():
    from bvpcont.continuation import Branch
    b = Branch()
    assert fold_points(b) == []
