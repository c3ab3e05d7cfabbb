"""Polynomials and rational functions of a complex variable with ring coefficients.

``RingPoly`` holds matrix coefficients ``p_0, ..., p_D`` (a scalar polynomial
is the 1x1 case). ``RingRational`` is a pair ``num / den`` with a scalar
denominator; no cancellation is ever attempted.

Evaluation at a ring point ``r`` substitutes ``lambda -> r`` with Wick
powers. Because ``r - r(0)`` is nilpotent in the truncation this agrees
exactly with the Taylor expansion of the function around ``r(0)``, which
``eval_via_contour`` reproduces independently by quadrature.
"""

from __future__ import annotations

import numbers
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .matrix import RingMatrix, _matwick, faddeev_leverrier
from .ring import (
    EPS_INV,
    ContextMismatch,
    DomainError,
    RingElement,
    TruncationContext,
    invert_arrays,
    wick_arrays,
)


def _as_block(ctx: TruncationContext, c) -> np.ndarray:
    if isinstance(c, RingMatrix):
        if c.context != ctx:
            raise ContextMismatch("coefficient lives in a different context")
        return c.array
    if isinstance(c, RingElement):
        if c.context != ctx:
            raise ContextMismatch("coefficient lives in a different context")
        return c.array[None, None, :]
    if isinstance(c, numbers.Number):
        out = np.zeros((1, 1, ctx.size), dtype=complex)
        out[0, 0, 0] = c
        return out
    raise TypeError(f"cannot use {type(c).__name__} as a polynomial coefficient")


class RingPoly:
    """Polynomial ``sum_k p_k lambda^k`` with ``RingMatrix`` coefficients of a common shape."""

    __slots__ = ("context", "_c")
    __array_ufunc__ = None

    def __init__(self, context: TruncationContext, coeffs: Sequence):
        if not len(coeffs):
            coeffs = [0]
        blocks = [_as_block(context, c) for c in coeffs]
        if len({b.shape for b in blocks}) != 1:
            raise ValueError("polynomial coefficients must share one shape")
        self.context = context
        self._c = _trim(np.stack(blocks))

    @classmethod
    def _raw(cls, context: TruncationContext, arr: np.ndarray) -> RingPoly:
        obj = cls.__new__(cls)
        obj.context = context
        obj._c = _trim(np.array(arr, dtype=complex))
        return obj

    @property
    def array(self) -> np.ndarray:
        return self._c

    @property
    def degree(self) -> int:
        return self._c.shape[0] - 1

    @property
    def shape(self) -> tuple[int, int]:
        return self._c.shape[1:3]

    @property
    def is_scalar(self) -> bool:
        return self.shape == (1, 1)

    def coeff(self, k: int) -> RingMatrix:
        if k > self.degree:
            return RingMatrix.zeros(self.context, *self.shape)
        return RingMatrix._raw(self.context, self._c[k])

    @property
    def coeffs(self) -> list[RingMatrix]:
        return [RingMatrix._raw(self.context, c) for c in self._c]

    def origin_coeffs(self) -> np.ndarray:
        """Coefficients of the projected complex polynomial, shape ``(D+1, rows, cols)``."""
        return self._c[..., 0].copy()

    def entry(self, i: int, j: int) -> RingPoly:
        return RingPoly._raw(self.context, self._c[:, i : i + 1, j : j + 1])

    def __add__(self, other):
        return poly_add(self, _coerce_poly(self.context, other))

    __radd__ = __add__

    def __neg__(self):
        return RingPoly._raw(self.context, -self._c)

    def __sub__(self, other):
        return poly_add(self, -_coerce_poly(self.context, other))

    def __rsub__(self, other):
        return poly_add(_coerce_poly(self.context, other), -self)

    def __mul__(self, other):
        if isinstance(other, numbers.Number):
            return RingPoly._raw(self.context, self._c * complex(other))
        return poly_mul(self, _coerce_poly(self.context, other))

    def __rmul__(self, other):
        if isinstance(other, numbers.Number):
            return RingPoly._raw(self.context, self._c * complex(other))
        return poly_mul(_coerce_poly(self.context, other), self)

    def __call__(self, x):
        if isinstance(x, RingElement):
            return poly_eval_ring(self, x)
        return poly_eval_complex(self, x)

    def __repr__(self):
        return f"RingPoly(degree={self.degree}, shape={self.shape}, context={self.context})"


def _trim(arr: np.ndarray) -> np.ndarray:
    k = arr.shape[0]
    while k > 1 and not arr[k - 1].any():
        k -= 1
    arr = arr[:k].copy()
    arr.flags.writeable = False
    return arr


def _coerce_poly(ctx: TruncationContext, x) -> RingPoly:
    if isinstance(x, RingPoly):
        if x.context != ctx:
            raise ContextMismatch("polynomials live in different contexts")
        return x
    return RingPoly(ctx, [x])


def lam(ctx: TruncationContext) -> RingPoly:
    """The scalar polynomial ``lambda``."""
    return RingPoly(ctx, [0, 1])


def poly_add(p: RingPoly, q: RingPoly) -> RingPoly:
    if p.context != q.context:
        raise ContextMismatch("polynomials live in different contexts")
    if p.shape != q.shape:
        if q.is_scalar and _is_square(p):
            q = poly_scale_identity(q, p.shape[0])
        elif p.is_scalar and _is_square(q):
            p = poly_scale_identity(p, q.shape[0])
        else:
            raise ValueError(f"shape mismatch {p.shape} vs {q.shape}")
    n = max(p.degree, q.degree) + 1
    out = np.zeros((n,) + p.array.shape[1:], dtype=complex)
    out[: p.degree + 1] += p.array
    out[: q.degree + 1] += q.array
    return RingPoly._raw(p.context, out)


def _is_square(p: RingPoly) -> bool:
    return p.shape[0] == p.shape[1]


def poly_scale_identity(p: RingPoly, n: int) -> RingPoly:
    """Scalar polynomial ``p`` times the ``n x n`` identity."""
    out = np.zeros((p.degree + 1, n, n, p.context.size), dtype=complex)
    out[:, np.arange(n), np.arange(n)] = p.array[:, 0, 0][:, None, :]
    return RingPoly._raw(p.context, out)


def poly_mul(p: RingPoly, q: RingPoly) -> RingPoly:
    """Cauchy product in lambda; coefficient products are matrix Wick products.

    A 1x1 factor multiplies a non-conformable partner entrywise.
    """
    if p.context != q.context:
        raise ContextMismatch("polynomials live in different contexts")
    ctx = p.context
    if p.shape[1] == q.shape[0]:
        shape = (p.shape[0], q.shape[1])
        prod = lambda a, b: _matwick(ctx, a, b)  # noqa: E731
    elif p.is_scalar or q.is_scalar:
        shape = q.shape if p.is_scalar else p.shape
        prod = lambda a, b: wick_arrays(ctx, a, b)  # noqa: E731
    else:
        raise ValueError(f"cannot multiply polynomials of shapes {p.shape} and {q.shape}")
    out = np.zeros((p.degree + q.degree + 1,) + shape + (ctx.size,), dtype=complex)
    for i in range(p.degree + 1):
        for j in range(q.degree + 1):
            out[i + j] += prod(p.array[i], q.array[j])
    return RingPoly._raw(ctx, out)


def poly_scale(p: RingPoly, s) -> RingPoly:
    """Multiply every coefficient by a complex number or ring element."""
    if isinstance(s, numbers.Number):
        return p * s
    return poly_mul(RingPoly(p.context, [s]), p)


def poly_eval_complex(p: RingPoly, lam0) -> RingMatrix | np.ndarray:
    """Horner evaluation at a complex number; an array of points gives a stacked block."""
    pts = np.asarray(lam0, dtype=complex)
    acc = np.broadcast_to(p.array[-1], pts.shape + p.array.shape[1:]).copy()
    for k in range(p.degree - 1, -1, -1):
        acc = acc * pts[..., None, None, None] + p.array[k]
    if pts.ndim == 0:
        return RingMatrix._raw(p.context, acc)
    return acc


def poly_eval_ring(p: RingPoly, r: RingElement) -> RingMatrix:
    """Substitute ``lambda -> r`` using Wick products."""
    if r.context != p.context:
        raise ContextMismatch("evaluation point lives in a different context")
    acc = p.array[-1]
    for k in range(p.degree - 1, -1, -1):
        acc = wick_arrays(p.context, acc, r.array) + p.array[k]
    return RingMatrix._raw(p.context, acc)


@dataclass(frozen=True)
class RingRational:
    """``num(lambda) * den(lambda)^-1`` with a scalar ring-polynomial denominator."""

    num: RingPoly
    den: RingPoly

    def __post_init__(self):
        if self.num.context != self.den.context:
            raise ContextMismatch("numerator and denominator live in different contexts")
        if not self.den.is_scalar:
            raise ValueError("denominator must be a scalar polynomial")
        if not np.any(self.den.origin_coeffs()):
            raise DomainError("projected denominator vanishes identically")

    @property
    def context(self) -> TruncationContext:
        return self.num.context

    @property
    def shape(self) -> tuple[int, int]:
        return self.num.shape

    def __call__(self, x):
        if isinstance(x, RingElement):
            return eval_rational_ring(self, x)
        return eval_rational_complex(self, x)

    def entry(self, i: int, j: int) -> RingRational:
        return RingRational(self.num.entry(i, j), self.den)

    def projected_poles(self) -> np.ndarray:
        """Roots of the projected denominator (candidate poles of the projection)."""
        c = self.den.origin_coeffs()[:, 0, 0]
        nz = np.flatnonzero(c)
        c = c[: nz[-1] + 1]
        return np.roots(c[::-1]) if len(c) > 1 else np.array([], dtype=complex)

    def eval_projected(self, lam0) -> np.ndarray:
        """Classical value of the projected rational function; accepts arrays of points."""
        pts = np.asarray(lam0, dtype=complex)
        num = np.polynomial.polynomial.polyval(pts, self.num.origin_coeffs())
        den = np.polynomial.polynomial.polyval(pts, self.den.origin_coeffs()[:, 0, 0])
        return np.moveaxis(num / den, (0, 1), (-2, -1))

    def taylor(self, order: int) -> list[RingMatrix]:
        return rational_taylor(self, order)

    def __repr__(self):
        return (
            f"RingRational(shape={self.shape}, num_degree={self.num.degree}, "
            f"den_degree={self.den.degree}, context={self.context})"
        )


def _den_values(F: RingRational, pts: np.ndarray, eps: float) -> np.ndarray:
    vals = poly_eval_complex(F.den, pts)
    vals = vals.array if isinstance(vals, RingMatrix) else vals
    vals = vals[..., 0, 0, :]
    if np.any(np.abs(vals[..., 0]) <= eps):
        raise DomainError("projected denominator vanishes at the evaluation point")
    return vals


def eval_rational_complex(F: RingRational, lam0: complex, eps: float = EPS_INV) -> RingMatrix:
    den = _den_values(F, np.asarray(lam0, dtype=complex), eps)
    num = poly_eval_complex(F.num, lam0)
    inv = invert_arrays(F.context, den, eps)
    return num * RingElement._raw(F.context, inv)


def eval_rational_ring(F: RingRational, r: RingElement, eps: float = EPS_INV) -> RingMatrix:
    """Value at a ring point whose constant term lies off the projected poles."""
    den = poly_eval_ring(F.den, r)[0, 0]
    if abs(den.constant) <= eps:
        raise DomainError(f"r(0) = {r.constant} is a zero of the projected denominator")
    num = poly_eval_ring(F.num, r)
    return num * RingElement._raw(F.context, invert_arrays(F.context, den.array, eps))


def default_contour_radius(F: RingRational, center: complex) -> float:
    poles = F.projected_poles()
    if len(poles) == 0:
        return 1.0
    return 0.5 * float(np.abs(poles - center).min())


def eval_via_contour(
    F: RingRational,
    r: RingElement,
    radius: float | None = None,
    nodes: int = 512,
    eps: float = EPS_INV,
) -> RingMatrix:
    """Cauchy integral ``(2 pi i)^-1 \\oint F(zeta) (zeta - r)^-1 d zeta`` by the trapezoid rule.

    The circle is centred at ``r(0)``; the default radius is half the distance
    to the nearest projected pole.
    """
    if nodes < 64:
        raise ValueError("use at least 64 quadrature nodes")
    if r.context != F.context:
        raise ContextMismatch("evaluation point lives in a different context")
    ctx = F.context
    center = r.constant
    if radius is None:
        radius = default_contour_radius(F, center)
    if radius <= 0:
        raise ValueError("contour radius must be positive")
    theta = 2 * np.pi * np.arange(nodes) / nodes
    step = radius * np.exp(1j * theta)
    zeta = center + step
    den = _den_values(F, zeta, eps)
    values = wick_arrays(ctx, poly_eval_complex(F.num, zeta), invert_arrays(ctx, den, eps)[:, None, None, :])
    shifted = -np.broadcast_to(r.array, (nodes, ctx.size)).copy()
    shifted[:, 0] += zeta
    kernel = invert_arrays(ctx, shifted, eps)
    integrand = wick_arrays(ctx, values, kernel[:, None, None, :])
    total = np.tensordot(step, integrand, axes=(0, 0)) / nodes
    return RingMatrix._raw(ctx, total)


def rational_taylor(F: RingRational, order: int) -> list[RingMatrix]:
    """Taylor coefficients at ``lambda = 0`` by series division ``num / den``."""
    ctx = F.context
    den = F.den.array[:, 0, 0, :]
    inv0 = invert_arrays(ctx, den[0])
    out = []
    for k in range(order + 1):
        acc = F.num.array[k].copy() if k <= F.num.degree else np.zeros(F.num.array.shape[1:], dtype=complex)
        for j in range(1, min(k, F.den.degree) + 1):
            acc -= wick_arrays(ctx, out[k - j], den[j])
        out.append(wick_arrays(ctx, acc, inv0))
    return [RingMatrix._raw(ctx, c) for c in out]


def resolvent_parts(A: RingMatrix) -> tuple[RingPoly, RingPoly]:
    """``det(I - lambda A)`` and ``adj(I - lambda A)`` as polynomials in lambda."""
    coeffs, mats = faddeev_leverrier(A)
    ctx = A.context
    det = RingPoly(ctx, coeffs)
    adj = RingPoly(ctx, mats)
    return det, adj


@dataclass(frozen=True)
class Realization:
    """State-space data with transfer function ``D + lambda C (I - lambda A)^-1 B``."""

    A: RingMatrix
    B: RingMatrix
    C: RingMatrix
    D: RingMatrix

    def __post_init__(self):
        ctxs = {m.context for m in (self.A, self.B, self.C, self.D)}
        if len(ctxs) != 1:
            raise ContextMismatch("realization matrices must share a context")
        n = self.A.rows
        if self.A.cols != n or self.B.rows != n or self.C.cols != n:
            raise ValueError("inconsistent state dimension")
        if self.C.rows != self.D.rows or self.B.cols != self.D.cols:
            raise ValueError("inconsistent input/output dimensions")

    @property
    def context(self) -> TruncationContext:
        return self.A.context


def realization_taylor(R: Realization, order: int) -> list[RingMatrix]:
    """``[D, CB, CAB, ..., C A^(order-1) B]``."""
    out = [R.D]
    X = R.B
    for _ in range(order):
        out.append(R.C @ X)
        X = R.A @ X
    return out


def realization_to_rational(R: Realization) -> RingRational:
    det, adj = resolvent_parts(R.A)
    ctx = R.context
    num = poly_mul(det, RingPoly(ctx, [R.D])) + lam(ctx) * poly_mul(
        poly_mul(RingPoly(ctx, [R.C]), adj), RingPoly(ctx, [R.B])
    )
    return RingRational(num, det)


def blaschke_factor(r: RingElement, variant: str = "disk") -> RingRational:
    """``(lambda - r)(1 - lambda r*)^-1`` (disk) or ``(lambda - r)(lambda - r*)^-1`` (halfline)."""
    ctx = r.context
    num = RingPoly(ctx, [-r, 1])
    if variant == "disk":
        den = RingPoly(ctx, [1, -r.conjugate()])
    elif variant == "halfline":
        den = RingPoly(ctx, [-r.conjugate(), 1])
    else:
        raise ValueError(f"unknown Blaschke variant {variant!r}")
    return RingRational(num, den)


def wick_convolve(h: Sequence[RingElement], u: Sequence[RingElement]) -> list[RingElement]:
    """Causal output ``y_n = sum_k h_(n-k) u_k`` of length ``len(h) + len(u) - 1``."""
    if not h or not u:
        return []
    ctx = h[0].context
    if any(x.context != ctx for x in list(h) + list(u)):
        raise ContextMismatch("sequences must share a context")
    H = np.stack([x.array for x in h])
    U = np.stack([x.array for x in u])
    out = np.zeros((len(h) + len(u) - 1, ctx.size), dtype=complex)
    for k in range(len(u)):
        out[k : k + len(h)] += wick_arrays(ctx, H, U[k])
    return [RingElement._raw(ctx, y) for y in out]
