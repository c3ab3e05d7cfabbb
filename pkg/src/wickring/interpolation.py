"""Nevanlinna-Pick interpolation with data in the truncated ring.

Given points ``a_i`` and targets ``b_i`` whose constant terms lie in the open
unit disk, the solutions are ``f = (a g + b)(c g + d)^-1`` where::

    Theta(lambda) = [[a, b], [c, d]]
                  = I - (1 - lambda) C (I - lambda A)^-1 P^-1 (I - A)^-* C^* J

with ``A = diag(a_i^*)``, ``C = [[1, ..., 1], [b_1^*, ..., b_n^*]]``,
``J = diag(1, -1)`` and the Pick matrix ``P_ij = (1 - b_i b_j^*)(1 - a_i a_j^*)^-1``.
Every step uses ring arithmetic only, so ``(1, -b_i) Theta(a_i) = 0`` holds
in the ring exactly as it does over the complex numbers.

Theta is stored over the common denominator ``det(I - lambda A)``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .matrix import (
    EPS_PD,
    NotStrictlyPositive,
    RingMatrix,
    adjoint,
    mat_invert,
    strict_positive_factor,
)
from .projection import CLASSICAL, project
from .rational import (
    RingPoly,
    RingRational,
    eval_rational_ring,
    poly_mul,
    poly_scale_identity,
    resolvent_parts,
)
from .ring import (
    ContextMismatch,
    DomainError,
    RingElement,
    RingError,
    TruncationContext,
    invert,
    norm_dual,
)

K_REPORT = 4
RESIDUAL_TOL = 1e-8
SCHUR_GRID = 200
SCHUR_RADIUS = 0.95
EPS_SCHUR = 1e-3
DISTINCT_TOL = 1e-12


class ProblemError(RingError):
    """Interpolation data violate the problem's standing assumptions."""


class NotSchur(RingError):
    """Parameter fails the sampled strict-contractivity test."""


@dataclass(frozen=True)
class InterpolationProblem:
    points: tuple[RingElement, ...]
    targets: tuple[RingElement, ...]

    def __post_init__(self):
        object.__setattr__(self, "points", tuple(self.points))
        object.__setattr__(self, "targets", tuple(self.targets))
        if not self.points or len(self.points) != len(self.targets):
            raise ProblemError("need the same positive number of points and targets")
        ctx = self.points[0].context
        if any(x.context != ctx for x in self.points + self.targets):
            raise ContextMismatch("all interpolation data must share a context")
        for name, seq in (("point", self.points), ("target", self.targets)):
            for i, x in enumerate(seq):
                if not abs(x.constant) < 1:
                    raise ProblemError(f"{name} {i + 1} has |r(0)| = {abs(x.constant):.6g} >= 1")
        a0 = [x.constant for x in self.points]
        for i, j in itertools.combinations(range(len(a0)), 2):
            if abs(a0[i] - a0[j]) <= DISTINCT_TOL:
                raise ProblemError(f"points {i + 1} and {j + 1} have coincident constant terms")

    @property
    def context(self) -> TruncationContext:
        return self.points[0].context

    @property
    def n(self) -> int:
        return len(self.points)

    def projected(self) -> InterpolationProblem:
        return InterpolationProblem(tuple(map(project, self.points)), tuple(map(project, self.targets)))


def build_pick(prob: InterpolationProblem) -> RingMatrix:
    n = prob.n
    a, b = prob.points, prob.targets
    entries = [
        [(1 - b[i] * b[j].conjugate()) * invert(1 - a[i] * a[j].conjugate()) for j in range(n)]
        for i in range(n)
    ]
    return RingMatrix(prob.context, entries)


def build_data(prob: InterpolationProblem) -> tuple[RingMatrix, RingMatrix, RingMatrix]:
    ctx = prob.context
    A = RingMatrix.diag([x.conjugate() for x in prob.points])
    C = RingMatrix(ctx, [[ctx.one()] * prob.n, [x.conjugate() for x in prob.targets]])
    J = RingMatrix.constant(ctx, np.diag([1.0, -1.0]))
    return A, C, J


def pick_spectrum(prob: InterpolationProblem) -> np.ndarray:
    P0 = build_pick(prob.projected()).at_origin()
    return np.linalg.eigvalsh(0.5 * (P0 + P0.conj().T))


@dataclass(frozen=True)
class ThetaMatrix:
    rational: RingRational
    pick: RingMatrix

    @property
    def context(self) -> TruncationContext:
        return self.rational.context

    @property
    def num(self) -> RingPoly:
        return self.rational.num

    @property
    def den(self) -> RingPoly:
        return self.rational.den

    def block(self, name: str) -> RingRational:
        i, j = {"a": (0, 0), "b": (0, 1), "c": (1, 0), "d": (1, 1)}[name]
        return self.rational.entry(i, j)

    def __call__(self, x) -> RingMatrix:
        return self.rational(x)

    def projected_value(self, lam0) -> np.ndarray:
        return self.rational.eval_projected(lam0)


def build_theta(prob: InterpolationProblem, eps_pd: float = EPS_PD) -> ThetaMatrix:
    """Theta over the common denominator ``det(I - lambda A)``.

    Raises :class:`~wickring.matrix.NotStrictlyPositive` when ``P(0)`` is not
    positive definite, i.e. when the ring Pick matrix has no invertible
    factorization ``G G*``.
    """
    ctx = prob.context
    P = build_pick(prob)
    strict_positive_factor(P, eps_pd)
    A, C, J = build_data(prob)
    eye_n = RingMatrix.identity(ctx, prob.n)
    K = mat_invert(P) @ mat_invert(adjoint(eye_n - A)) @ adjoint(C) @ J
    det, adj = resolvent_parts(A)
    one_minus_lam = RingPoly(ctx, [1, -1])
    correction = poly_mul(one_minus_lam, poly_mul(poly_mul(RingPoly(ctx, [C]), adj), RingPoly(ctx, [K])))
    num = poly_scale_identity(det, 2) - correction
    return ThetaMatrix(RingRational(num, det), P)


def _row_times(row: Sequence[RingElement], M: RingMatrix) -> list[RingElement]:
    return [sum((row[k] * M[k, j] for k in range(M.rows)), M.context.zero()) for j in range(M.cols)]


def check_theta_identity(prob: InterpolationProblem, theta: ThetaMatrix, k_report: float = K_REPORT) -> float:
    """Largest dual norm of ``(1, -b_i) Theta(a_i)`` over all points and components."""
    worst = 0.0
    for a, b in zip(prob.points, prob.targets):
        vec = _row_times([a.context.one(), -b], theta(a))
        worst = max(worst, *(norm_dual(x, k_report) for x in vec))
    return worst


def _as_poly(ctx: TruncationContext, g) -> RingPoly:
    if isinstance(g, RingPoly):
        return g
    if isinstance(g, (list, tuple)):
        return RingPoly(ctx, list(g))
    return RingPoly(ctx, [g])


def grid_max_modulus(F, grid: int = SCHUR_GRID, radius: float = SCHUR_RADIUS) -> float:
    """Max of the projected modulus on ``grid`` points of the circle ``|lambda| = radius``.

    For functions analytic in the disk the maximum modulus principle makes the
    circle the binding part of the closed disk of that radius.
    """
    pts = radius * np.exp(2j * np.pi * np.arange(grid) / grid)
    if isinstance(F, RingPoly):
        vals = np.polynomial.polynomial.polyval(pts, F.origin_coeffs()[:, 0, 0])
    else:
        den = np.polynomial.polynomial.polyval(pts, F.den.origin_coeffs()[:, 0, 0])
        if np.any(den == 0):
            return float("inf")
        vals = np.polynomial.polynomial.polyval(pts, F.num.origin_coeffs()[:, 0, 0]) / den
    return float(np.abs(vals).max())


@dataclass(frozen=True)
class SchurParameter:
    """Scalar ring polynomial ``g`` whose projection is strictly contractive on a sampled circle."""

    g: RingPoly
    grid: int = SCHUR_GRID
    radius: float = SCHUR_RADIUS
    eps_schur: float = EPS_SCHUR

    def __post_init__(self):
        if not self.g.is_scalar:
            raise ValueError("Schur parameter must be scalar")
        peak = grid_max_modulus(self.g, self.grid, self.radius)
        if peak > 1 - self.eps_schur:
            raise NotSchur(f"projected parameter reaches modulus {peak:.6g} > 1 - {self.eps_schur:g}")

    @classmethod
    def of(cls, ctx: TruncationContext, g=0, **kw) -> SchurParameter:
        """Accepts a number, a ring element, a list of coefficients, or a RingPoly."""
        return cls(_as_poly(ctx, g), **kw)

    @property
    def context(self) -> TruncationContext:
        return self.g.context

    def projected(self) -> SchurParameter:
        return SchurParameter(project(self.g), self.grid, self.radius, self.eps_schur)


def lft_apply(theta: ThetaMatrix, g: SchurParameter) -> tuple[RingRational, RingRational, RingRational]:
    """``u = a g + b``, ``v = c g + d`` and ``f = u v^-1``."""
    if g.context != theta.context:
        raise ContextMismatch("parameter lives in a different context")
    N = theta.num
    u_num = N.entry(0, 0) * g.g + N.entry(0, 1)
    v_num = N.entry(1, 0) * g.g + N.entry(1, 1)
    if not np.any(v_num.origin_coeffs()):
        raise DomainError("projected denominator c g + d vanishes identically")
    u = RingRational(u_num, theta.den)
    v = RingRational(v_num, theta.den)
    return u, v, RingRational(u_num, v_num)


@dataclass(frozen=True)
class LevelledNorm:
    level: float
    value: float


@dataclass
class SolutionReport:
    k_report: float
    tol: float
    residuals: list[LevelledNorm]
    homogeneous: list[LevelledNorm]
    pick_spectrum: list[float]
    schur_max: float
    schur_margin_required: float
    parameter: list[list[float]] = field(default_factory=list)

    @property
    def max_residual(self) -> float:
        return max(r.value for r in self.residuals)

    @property
    def max_homogeneous(self) -> float:
        return max(r.value for r in self.homogeneous)

    @property
    def residual_pass(self) -> bool:
        return self.max_residual <= self.tol

    @property
    def homogeneous_pass(self) -> bool:
        return self.max_homogeneous <= self.tol

    @property
    def schur_pass(self) -> bool:
        return 1 - self.schur_max >= self.schur_margin_required

    @property
    def passed(self) -> bool:
        return self.residual_pass and self.homogeneous_pass and self.schur_pass

    def to_flat(self) -> dict[str, float | bool]:
        out: dict[str, float | bool] = {"k_report": float(self.k_report), "tol": self.tol}
        for i, (r, h) in enumerate(zip(self.residuals, self.homogeneous), start=1):
            out[f"residual_{i}"] = r.value
            out[f"homogeneous_{i}"] = h.value
        for i, ev in enumerate(self.pick_spectrum, start=1):
            out[f"pick_eig_{i}"] = ev
        for i, (re, im) in enumerate(self.parameter):
            out[f"param_{i}_re"] = re
            out[f"param_{i}_im"] = im
        out.update(
            max_residual=self.max_residual,
            max_homogeneous=self.max_homogeneous,
            schur_max=self.schur_max,
            schur_margin=1 - self.schur_max,
            residual_pass=self.residual_pass,
            homogeneous_pass=self.homogeneous_pass,
            schur_pass=self.schur_pass,
            passed=self.passed,
        )
        return out


def _homogeneous_pair(f: RingRational):
    ctx = f.context
    one = RingPoly(ctx, [1])
    return RingRational(f.num, one), RingRational(f.den, one)


def verify_solution(
    prob: InterpolationProblem,
    f: RingRational,
    u: RingRational | None = None,
    v: RingRational | None = None,
    k_report: float = K_REPORT,
    tol: float = RESIDUAL_TOL,
    grid: int = SCHUR_GRID,
    radius: float = SCHUR_RADIUS,
    eps_schur: float = EPS_SCHUR,
    parameter: SchurParameter | None = None,
) -> SolutionReport:
    """Residuals ``f(a_i) - b_i`` and ``u(a_i) - b_i v(a_i)`` plus classical checks.

    Without ``u, v`` the homogeneous residual uses ``f``'s own numerator and
    denominator.
    """
    if f.context != prob.context:
        raise ContextMismatch("candidate lives in a different context")
    if f.shape != (1, 1):
        raise ValueError("candidate solution must be scalar")
    if u is None or v is None:
        u, v = _homogeneous_pair(f)
    residuals, homogeneous = [], []
    for a, b in zip(prob.points, prob.targets):
        fa = eval_rational_ring(f, a)[0, 0]
        residuals.append(LevelledNorm(k_report, norm_dual(fa - b, k_report)))
        ua = eval_rational_ring(u, a)[0, 0]
        va = eval_rational_ring(v, a)[0, 0]
        homogeneous.append(LevelledNorm(k_report, norm_dual(ua - b * va, k_report)))
    param = []
    if parameter is not None:
        param = [[c.real, c.imag] for c in parameter.g.origin_coeffs()[:, 0, 0]]
    return SolutionReport(
        k_report=k_report,
        tol=tol,
        residuals=residuals,
        homogeneous=homogeneous,
        pick_spectrum=[float(x) for x in pick_spectrum(prob)],
        schur_max=grid_max_modulus(f, grid, radius),
        schur_margin_required=eps_schur / 2,
        parameter=param,
    )


@dataclass
class Solution:
    theta: ThetaMatrix
    parameter: SchurParameter
    u: RingRational
    v: RingRational
    f: RingRational


def solve(prob: InterpolationProblem, g: SchurParameter | None = None, eps_pd: float = EPS_PD) -> Solution:
    """Theta for ``prob`` and the solution for parameter ``g`` (central solution by default)."""
    if g is None:
        g = SchurParameter.of(prob.context, 0)
    theta = build_theta(prob, eps_pd)
    u, v, f = lft_apply(theta, g)
    return Solution(theta, g, u, v, f)


def classical_solve(prob: InterpolationProblem, sigma: SchurParameter | None = None) -> Solution:
    """The same pipeline over the complex numbers (context ``(0, 0)``) on projected data."""
    cprob = prob.projected() if prob.context != CLASSICAL else prob
    if sigma is not None and sigma.context != CLASSICAL:
        sigma = sigma.projected()
    return solve(cprob, sigma)


def random_problem(
    rng: np.random.Generator, n: int, ctx: TruncationContext, spread: float = 0.2, min_pick_eig: float = 1e-3
) -> InterpolationProblem:
    """Random solvable data: ``b_i(0) = s(a_i(0))`` for a strictly contractive quadratic ``s``.

    Non-constant coefficients are uniform in the disk of radius ``spread``.
    """
    while True:
        a0 = 0.7 * np.sqrt(rng.random(n)) * np.exp(2j * np.pi * rng.random(n))
        s = (rng.normal(size=3) + 1j * rng.normal(size=3)) / np.sqrt(2)
        s *= 0.8 / max(1.0, np.abs(s).sum())
        b0 = np.polynomial.polynomial.polyval(a0, s)
        try:
            prob = InterpolationProblem(
                [ctx.random(rng, spread, constant=x) for x in a0],
                [ctx.random(rng, spread, constant=x) for x in b0],
            )
        except ProblemError:
            continue
        if pick_spectrum(prob).min() > min_pick_eig:
            return prob


def j_defect_min_eig(theta: ThetaMatrix, lam0: complex) -> float:
    """Smallest eigenvalue of ``J - Theta(lam0) J Theta(lam0)^*`` for the projected Theta."""
    T = theta.projected_value(lam0)
    J = np.diag([1.0, -1.0])
    M = J - T @ J @ T.conj().T
    return float(np.linalg.eigvalsh(0.5 * (M + M.conj().T)).min())


__all__ = [
    "InterpolationProblem",
    "LevelledNorm",
    "NotSchur",
    "NotStrictlyPositive",
    "ProblemError",
    "SchurParameter",
    "Solution",
    "SolutionReport",
    "ThetaMatrix",
    "build_data",
    "build_pick",
    "build_theta",
    "check_theta_identity",
    "classical_solve",
    "grid_max_modulus",
    "j_defect_min_eig",
    "lft_apply",
    "pick_spectrum",
    "solve",
    "random_problem",
    "verify_solution",
]
