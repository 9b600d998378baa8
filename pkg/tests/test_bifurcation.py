import numpy as np
import pytest

from bvpcont.bifurcation import (BracketError, det_sign, locate_bifurcation,
                                 null_vector, switch_branch)
from bvpcont.continuation import (ContinuationConfig, continue_branch,
                                  initial_tangent, make_point)
from bvpcont.corrector import AugmentedState, NewtonError, newton_fixed_lambda
from bvpcont.discretize import (discrete_l2_norm, jacobian,
                                principal_eigenvalue, toeplitz_eigenvalue)
from bvpcont.mesh import build_uniform_mesh
from bvpcont.seeding import sine_seed
from bvpcont.weight import build_weight


def main_branch(h, n=500, lambda_min=-20.0):
    from bvpcont.diagram import onset_amplitude
    w = build_weight(1, h, 0.0)
    m = build_uniform_mesh(n)
    lam1 = principal_eigenvalue(m)
    lam = lam1 - 0.1
    u = newton_fixed_lambda(w, m, lam,
                            sine_seed(m, onset_amplitude(w, m, lam, lam1)))
    start = make_point(w, m, lam, u, tag="branch_start")
    t0 = initial_tangent(w, m, AugmentedState(lam, u), direction_hint=-1.0)
    b = continue_branch(w, m, start, t0,
                        ContinuationConfig(lambda_min=lambda_min))
    return w, m, b


def det_sign_changes(w, m, b):
    signs = [det_sign(jacobian(w, m, p.lam, p.u))[0] for p in b.points]
    return [(i, i + 1) for i in range(len(signs) - 1)
            if signs[i] != 0 and signs[i + 1] != 0
            and signs[i] != signs[i + 1]]


def test_det_sign_positive_definite():
    w = build_weight(1, 0.1, 1.0)
    m = build_uniform_mesh(10)
    sign, logmag = det_sign(jacobian(w, m, 0.0, np.zeros(10)))
    assert sign == 1
    assert np.isfinite(logmag)


def test_det_sign_flips_at_discrete_eigenvalues():
    w = build_weight(1, 0.1, 1.0)
    n = 100
    m = build_uniform_mesh(n)
    u = np.zeros(n)
    for k in range(1, 6):
        lam_k = toeplitz_eigenvalue(n, k)
        below, _ = det_sign(jacobian(w, m, lam_k - 0.5, u))
        above, _ = det_sign(jacobian(w, m, lam_k + 0.5, u))
        assert below != above
        assert below != 0 and above != 0


def test_null_vector_of_singular_laplacian():
    w = build_weight(1, 0.1, 1.0)
    n = 80
    m = build_uniform_mesh(n)
    J = jacobian(w, m, toeplitz_eigenvalue(n, 2), np.zeros(n))
    v = null_vector(J)
    mode = np.sin(2 * np.pi * m.interior)
    mode /= np.linalg.norm(mode)
    assert abs(abs(np.dot(v, mode)) - 1.0) < 1e-6


def test_bracket_error_on_same_sign():
    w, m, b = main_branch(0.5, n=200, lambda_min=-5.0)
    with pytest.raises(BracketError):
        locate_bifurcation(w, m, b, (0, 1))


def test_locate_pitchfork_h005():
    w, m, b = main_branch(0.05)
    brackets = det_sign_changes(w, m, b)
    assert len(brackets) == 1
    lo, hi = brackets[0]
    assert b.points[hi].lam < -12.40637 < b.points[lo].lam
    ev = locate_bifurcation(w, m, b, brackets[0])
    assert ev.kind == "pitchfork"
    assert abs(ev.lambda_b - (-12.40637)) < 5e-2
    # pitchfork on the symmetric branch: antisymmetric null vector
    v = ev.null_vector
    assert np.linalg.norm(v[::-1] + v) < 1e-6 * len(v)


def test_locate_pitchfork_h08_positive():
    w, m, b = main_branch(0.8, lambda_min=0.0)
    brackets = det_sign_changes(w, m, b)
    assert len(brackets) >= 1
    ev = locate_bifurcation(w, m, b, brackets[0])
    assert abs(ev.lambda_b - 8.21472) < 5e-2


def test_switch_branch_produces_reflection_pair():
    w, m, b = main_branch(0.05)
    ev = locate_bifurcation(w, m, b, det_sign_changes(w, m, b)[0])
    host = b.points[ev.branch_index]
    ya, yb = switch_branch(w, m, ev, AugmentedState(host.lam, host.u))
    assert ya.lam == yb.lam < ev.lambda_b
    # mutual reflections with equal discrete norm
    scale = 1.0 + np.abs(ya.u).max()
    assert np.max(np.abs(ya.u[::-1] - yb.u)) < 1e-6 * scale
    assert discrete_l2_norm(m, ya.u) == pytest.approx(
        discrete_l2_norm(m, yb.u), rel=1e-9)
    # genuinely off the host branch and asymmetric
    assert np.max(np.abs(ya.u - ya.u[::-1])) > 1e-4 * scale


def test_switch_branch_zero_amplitude_collapses():
    w, m, b = main_branch(0.05)
    ev = locate_bifurcation(w, m, b, det_sign_changes(w, m, b)[0])
    host = b.points[ev.branch_index]
    with pytest.raises(NewtonError):
        switch_branch(w, m, ev, AugmentedState(host.lam, host.u),
                      amplitude=0.0)


def test_lambda_b_increasing_in_h():
    # recompute a sub-grid of the tabulated h values; lambda_b is increasing
    vals = []
    for h in (0.1, 0.3, 0.5):
        w, m, b = main_branch(h, lambda_min=-10.0)
        ev = locate_bifurcation(w, m, b, det_sign_changes(w, m, b)[0])
        vals.append(ev.lambda_b)
    assert vals[0] < vals[1] < vals[2]
    assert vals[0] < 0 < vals[1]  # the h0 sign transition
