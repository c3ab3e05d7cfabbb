import numpy as np
import pytest

from oracles import classical_pick, classical_theta
from wickring.interpolation import (
    InterpolationProblem,
    NotSchur,
    ProblemError,
    SchurParameter,
    build_pick,
    build_theta,
    check_theta_identity,
    classical_solve,
    j_defect_min_eig,
    random_problem,
    solve,
    verify_solution,
)
from wickring.matrix import NotStrictlyPositive, RingMatrix
from wickring.projection import CLASSICAL, project
from wickring.rational import RingPoly, RingRational
from wickring.ring import TruncationContext, norm_dual


@pytest.fixture
def problem(ctx, rng):
    return random_problem(rng, 3, ctx)


def parameters(ctx, rng):
    yield SchurParameter.of(ctx, 0)
    for c in (0.5, -0.3j):
        yield SchurParameter.of(ctx, ctx.random(rng, 0.05, constant=c))
    for c0, c1 in ((0.2, 0.5), (-0.1j, 0.4 + 0.2j)):
        yield SchurParameter.of(ctx, [ctx.random(rng, 0.05, constant=c0), ctx.random(rng, 0.05, constant=c1)])


def test_trivial_classical_theta():
    ctx = CLASSICAL
    prob = InterpolationProblem([ctx.const(0)], [ctx.const(0)])
    theta = build_theta(prob)
    for lam0 in (0.0, 0.3, -0.7j, 0.5 + 0.5j):
        np.testing.assert_allclose(theta.projected_value(lam0), np.diag([lam0, 1]), atol=1e-12)
    sol = solve(prob, SchurParameter.of(ctx, 0.25))
    for lam0 in (0.1, 0.9j):
        assert sol.f.eval_projected(lam0)[0, 0] == pytest.approx(0.25 * lam0, abs=1e-12)


def test_pick_matrix_projects_to_classical(problem):
    P = build_pick(problem)
    a0 = [x.constant for x in problem.points]
    b0 = [x.constant for x in problem.targets]
    np.testing.assert_allclose(P.at_origin(), classical_pick(a0, b0), atol=1e-14)
    assert (P - P.H).max_abs() < 1e-13


def test_theta_projects_to_classical(problem):
    theta = build_theta(problem)
    a0 = [x.constant for x in problem.points]
    b0 = [x.constant for x in problem.targets]
    for lam0 in (0.0, 0.4, 0.2 - 0.6j):
        np.testing.assert_allclose(theta.projected_value(lam0), classical_theta(a0, b0, lam0), atol=1e-10)


def test_theta_identity_at_nodes(problem):
    assert check_theta_identity(problem, build_theta(problem)) <= 1e-8


def test_forward_direction(ctx, rng, problem):
    for g in parameters(ctx, rng):
        sol = solve(problem, g)
        report = verify_solution(problem, sol.f, sol.u, sol.v, parameter=g)
        assert report.max_residual <= 1e-8
        assert report.max_homogeneous <= 1e-8
        assert report.passed


def test_perturbed_candidate_fails(ctx, problem):
    sol = solve(problem)
    bad_num = sol.u.num + sol.u.den * 0.1
    bad = RingRational(bad_num, sol.v.num)
    report = verify_solution(problem, bad)
    assert report.max_residual > 1e-3
    assert not report.residual_pass


def test_distinct_parameters_give_distinct_solutions(ctx, rng, problem):
    sols = [solve(problem, g).f for g in parameters(ctx, rng)]
    probe = 0.3 + 0.1j
    vals = [s.eval_projected(probe)[0, 0] for s in sols]
    for i in range(len(vals)):
        for j in range(i + 1, len(vals)):
            assert abs(vals[i] - vals[j]) > 1e-6


def test_classical_consistency(ctx, rng, problem):
    g = SchurParameter.of(ctx, [ctx.random(rng, 0.1, constant=0.3), ctx.const(0.2j)])
    f = solve(problem, g).f
    fc = classical_solve(problem, g).f
    assert fc.context == CLASSICAL
    pts = 0.9 * np.sqrt(rng.random(40)) * np.exp(2j * np.pi * rng.random(40))
    np.testing.assert_allclose(project(f).eval_projected(pts), fc.eval_projected(pts), atol=1e-9)


def test_theta_is_j_contractive_and_j_unitary_on_circle(problem):
    theta = build_theta(problem)
    for lam0 in (0.0, 0.5, 0.8j, -0.6 - 0.3j):
        assert j_defect_min_eig(theta, lam0) >= -1e-10
    J = np.diag([1.0, -1.0])
    for t in np.linspace(0, 2 * np.pi, 9):
        T = theta.projected_value(np.exp(1j * t))
        np.testing.assert_allclose(J - T @ J @ T.conj().T, 0, atol=1e-9)


def test_indefinite_pick_is_unsolvable():
    ctx = TruncationContext(1, 2)
    prob = InterpolationProblem([ctx.const(0), ctx.const(0.1)], [ctx.const(0.9), ctx.const(-0.9)])
    with pytest.raises(NotStrictlyPositive):
        build_theta(prob)


def test_problem_validation(ctx):
    z1 = ctx.var(1)
    with pytest.raises(ProblemError):
        InterpolationProblem([ctx.const(0.2), ctx.const(0.2) + z1], [ctx.zero(), ctx.zero()])
    with pytest.raises(ProblemError):
        InterpolationProblem([ctx.const(1.0)], [ctx.zero()])
    with pytest.raises(ProblemError):
        InterpolationProblem([ctx.zero()], [ctx.const(1.5)])
    with pytest.raises(ProblemError):
        InterpolationProblem([], [])


def test_schur_parameter_rejects_non_contractive(ctx):
    with pytest.raises(NotSchur):
        SchurParameter.of(ctx, 1.0)
    with pytest.raises(NotSchur):
        SchurParameter.of(ctx, [0.5, 0.6])
    g = SchurParameter.of(ctx, ctx.const(0.5) + 10 * ctx.var(1))
    assert g.projected().g.origin_coeffs()[0, 0, 0] == 0.5
    with pytest.raises(ValueError):
        SchurParameter(RingPoly(ctx, [RingMatrix.identity(ctx, 2) * 0.1]))


def test_solution_value_structure(ctx, problem):
    """The central solution's values at the nodes recover the targets in every coefficient."""
    f = solve(problem).f
    for a, b in zip(problem.points, problem.targets):
        assert norm_dual(f(a)[0, 0] - b, 1) <= 1e-10


def test_report_flattening(problem):
    sol = solve(problem)
    flat = verify_solution(problem, sol.f, sol.u, sol.v, parameter=sol.parameter).to_flat()
    for key in ("max_residual", "max_homogeneous", "schur_max", "schur_pass", "passed", "residual_1", "pick_eig_1"):
        assert key in flat
    assert flat["passed"] is True
