"""Matrices over the truncated ring.

A :class:`RingMatrix` stores a ``(rows, cols, N)`` coefficient block, i.e. one
complex matrix per admitted multi-index. Matrix products use the Wick product
entrywise, so ``A(0)`` (the constant block) multiplies like an ordinary
complex matrix.
"""

from __future__ import annotations

import numbers
from typing import Sequence

import numpy as np

from .ring import (
    EPS_INV,
    ContextMismatch,
    DomainError,
    NotInvertible,
    RingElement,
    RingError,
    TruncationContext,
    sqrt1p_taylor,
)

EPS_PD = 1e-10
HERMITIAN_TOL = 1e-10


class NotStrictlyPositive(RingError):
    """Raised when the constant block of a Hermitian ring matrix is not positive definite."""


class RingMatrix:
    __slots__ = ("context", "_c")
    __array_ufunc__ = None

    def __init__(self, context: TruncationContext, entries: Sequence[Sequence]):
        rows = len(entries)
        cols = len(entries[0]) if rows else 0
        if rows == 0 or cols == 0:
            raise ValueError("RingMatrix needs at least one row and one column")
        arr = np.zeros((rows, cols, context.size), dtype=complex)
        for i, row in enumerate(entries):
            if len(row) != cols:
                raise ValueError("ragged matrix entries")
            for j, x in enumerate(row):
                if isinstance(x, RingElement):
                    if x.context != context:
                        raise ContextMismatch(f"entry ({i},{j}) lives in {x.context}, expected {context}")
                    arr[i, j] = x.array
                else:
                    arr[i, j, 0] = complex(x)
        self.context = context
        arr.flags.writeable = False
        self._c = arr

    @classmethod
    def _raw(cls, context: TruncationContext, arr: np.ndarray) -> RingMatrix:
        obj = cls.__new__(cls)
        obj.context = context
        arr = np.array(arr, dtype=complex)
        if arr.ndim != 3 or arr.shape[2] != context.size:
            raise ValueError(f"bad coefficient block shape {arr.shape}")
        arr.flags.writeable = False
        obj._c = arr
        return obj

    @classmethod
    def identity(cls, context: TruncationContext, n: int) -> RingMatrix:
        return cls.constant(context, np.eye(n))

    @classmethod
    def zeros(cls, context: TruncationContext, rows: int, cols: int) -> RingMatrix:
        return cls._raw(context, np.zeros((rows, cols, context.size)))

    @classmethod
    def constant(cls, context: TruncationContext, values) -> RingMatrix:
        values = np.atleast_2d(np.asarray(values, dtype=complex))
        arr = np.zeros(values.shape + (context.size,), dtype=complex)
        arr[..., 0] = values
        return cls._raw(context, arr)

    @classmethod
    def diag(cls, elements: Sequence[RingElement]) -> RingMatrix:
        ctx = elements[0].context
        n = len(elements)
        arr = np.zeros((n, n, ctx.size), dtype=complex)
        for i, x in enumerate(elements):
            if x.context != ctx:
                raise ContextMismatch("diagonal entries must share a context")
            arr[i, i] = x.array
        return cls._raw(ctx, arr)

    @property
    def array(self) -> np.ndarray:
        return self._c

    @property
    def shape(self) -> tuple[int, int]:
        return self._c.shape[:2]

    @property
    def rows(self) -> int:
        return self._c.shape[0]

    @property
    def cols(self) -> int:
        return self._c.shape[1]

    def __getitem__(self, ij) -> RingElement:
        i, j = ij
        return RingElement._raw(self.context, self._c[i, j])

    def entries(self) -> list[list[RingElement]]:
        return [[self[i, j] for j in range(self.cols)] for i in range(self.rows)]

    def at_origin(self) -> np.ndarray:
        """The complex matrix ``M(0)``."""
        return self._c[..., 0].copy()

    def _check(self, other: RingMatrix):
        if other.context != self.context:
            raise ContextMismatch(f"contexts differ: {self.context} vs {other.context}")

    def __add__(self, other):
        if not isinstance(other, RingMatrix):
            return NotImplemented
        self._check(other)
        if other.shape != self.shape:
            raise ValueError(f"shape mismatch {self.shape} vs {other.shape}")
        return RingMatrix._raw(self.context, self._c + other._c)

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return RingMatrix._raw(self.context, -self._c)

    def __mul__(self, other):
        """Scale by a complex number or (entrywise Wick) by a ring element."""
        if isinstance(other, numbers.Number):
            return RingMatrix._raw(self.context, self._c * complex(other))
        if isinstance(other, RingElement):
            if other.context != self.context:
                raise ContextMismatch("scalar lives in a different context")
            return RingMatrix._raw(self.context, self.context.tables.gather(
                self._c[..., self.context.tables.I] * other.array[self.context.tables.J]))
        return NotImplemented

    __rmul__ = __mul__

    def __matmul__(self, other):
        if not isinstance(other, RingMatrix):
            return NotImplemented
        return mat_mul(self, other)

    def adjoint(self) -> RingMatrix:
        return adjoint(self)

    @property
    def H(self) -> RingMatrix:
        return adjoint(self)

    def __eq__(self, other):
        if not isinstance(other, RingMatrix):
            return NotImplemented
        return self.context == other.context and np.array_equal(self._c, other._c)

    __hash__ = None

    def allclose(self, other: RingMatrix, atol: float = 1e-10, rtol: float = 1e-10) -> bool:
        self._check(other)
        return self.shape == other.shape and bool(np.allclose(self._c, other._c, atol=atol, rtol=rtol))

    def max_abs(self) -> float:
        return float(np.abs(self._c).max())

    def __repr__(self):
        return f"RingMatrix({self.rows}x{self.cols}, context={self.context}, M(0)={self.at_origin().tolist()})"


def _matwick(ctx: TruncationContext, A: np.ndarray, B: np.ndarray) -> np.ndarray:
    t = ctx.tables
    return t.gather(np.einsum("...ijp,...jkp->...ikp", A[..., t.I], B[..., t.J]))


def mat_mul(A: RingMatrix, B: RingMatrix) -> RingMatrix:
    if A.context != B.context:
        raise ContextMismatch(f"contexts differ: {A.context} vs {B.context}")
    if A.cols != B.rows:
        raise ValueError(f"cannot multiply {A.shape} by {B.shape}")
    return RingMatrix._raw(A.context, _matwick(A.context, A.array, B.array))


def adjoint(A: RingMatrix) -> RingMatrix:
    """Transpose with every coefficient conjugated; ``adjoint(A)(0) = A(0)^*``."""
    return RingMatrix._raw(A.context, np.conj(np.swapaxes(A.array, 0, 1)))


def mat_norm_dual(A: RingMatrix, k: float) -> float:
    """Largest entrywise dual norm."""
    w = A.context.tables.weights(-k)
    return float(np.sqrt(np.max(np.sum(np.abs(A.array) ** 2 * w, axis=-1))))


def _eye(ctx: TruncationContext, n: int) -> np.ndarray:
    out = np.zeros((n, n, ctx.size), dtype=complex)
    out[np.arange(n), np.arange(n), 0] = 1.0
    return out


def _const_left(M0: np.ndarray, A: np.ndarray) -> np.ndarray:
    return np.einsum("ij,jkp->ikp", M0, A)


def mat_invert(A: RingMatrix, eps: float = EPS_INV) -> RingMatrix:
    """Inverse as ``(sum_n (-E)^n) A(0)^-1`` with ``E = A(0)^-1 A - I``."""
    n, m = A.shape
    if n != m:
        raise ValueError("only square matrices can be inverted")
    A0 = A.at_origin()
    if abs(np.linalg.det(A0)) <= eps:
        raise NotInvertible("constant block is singular (det A(0) = 0); matrix is not invertible")
    A0inv = np.linalg.inv(A0)
    ctx = A.context
    eye = _eye(ctx, n)
    E = _const_left(A0inv, A.array) - eye
    S = eye
    for _ in range(ctx.degree_cap):
        S = eye - _matwick(ctx, E, S)
    return RingMatrix._raw(ctx, np.einsum("ijp,jk->ikp", S, A0inv))


def faddeev_leverrier(A: RingMatrix) -> tuple[list[RingElement], list[RingMatrix]]:
    """Characteristic coefficients and the adjugate sequence of a square ring matrix.

    Returns ``c = [1, c_1, ..., c_n]`` with ``det(sI - A) = sum c_k s^(n-k)``
    and ``N = [N_1, ..., N_n]`` with ``adj(sI - A) = sum N_k s^(n-k)``. Only
    ring operations and division by the integers ``1..n`` are used.
    """
    n, m = A.shape
    if n != m:
        raise ValueError("Faddeev-LeVerrier needs a square matrix")
    ctx = A.context
    eye = _eye(ctx, n)
    Nk = eye
    coeffs = [ctx.one()]
    mats = []
    for k in range(1, n + 1):
        if k > 1:
            Nk = _matwick(ctx, A.array, Nk)
            Nk[np.arange(n), np.arange(n)] += coeffs[-1].array
        mats.append(RingMatrix._raw(ctx, Nk))
        trace = np.trace(_matwick(ctx, A.array, Nk), axis1=0, axis2=1)
        coeffs.append(RingElement._raw(ctx, -trace / k))
    return coeffs, mats


def mat_det(A: RingMatrix) -> RingElement:
    coeffs, _ = faddeev_leverrier(A)
    n = A.rows
    return coeffs[n] * (-1) ** n


def mat_adjugate(A: RingMatrix) -> RingMatrix:
    _, mats = faddeev_leverrier(A)
    n = A.rows
    return mats[n - 1] * (-1) ** (n - 1)


def mat_apply_entire(taylor: Sequence[complex], E: RingMatrix, eps: float = EPS_INV) -> RingMatrix:
    """``sum_p c_p E^p`` for a square ``E`` with ``E(0) = 0``."""
    n, m = E.shape
    if n != m:
        raise ValueError("need a square matrix")
    ctx = E.context
    d = ctx.degree_cap
    if len(taylor) < d + 1:
        raise ValueError(f"need at least {d + 1} Taylor coefficients, got {len(taylor)}")
    if np.abs(E.at_origin()).max() > eps:
        raise DomainError("matrix functional calculus needs E(0) = 0")
    eye = _eye(ctx, n)
    S = complex(taylor[d]) * eye
    for p in range(d - 1, -1, -1):
        S = _matwick(ctx, E.array, S) + complex(taylor[p]) * eye
    return RingMatrix._raw(ctx, S)


def is_hermitian(A: RingMatrix, tol: float = HERMITIAN_TOL) -> bool:
    if A.rows != A.cols:
        return False
    scale = max(1.0, A.max_abs())
    return bool(np.abs(A.array - adjoint(A).array).max() <= tol * scale)


def min_eigenvalue(A: RingMatrix) -> float:
    """Smallest eigenvalue of the Hermitian part of ``A(0)``."""
    A0 = A.at_origin()
    return float(np.linalg.eigvalsh(0.5 * (A0 + A0.conj().T)).min())


def strict_positive_factor(A: RingMatrix, eps_pd: float = EPS_PD) -> RingMatrix:
    """Invertible ``G`` with ``A = G G*``.

    Exists exactly when ``A(0)`` is positive definite. With ``S0 = sqrt(A(0))``
    and ``E = S0^-1 (A - A(0)) S0^-1`` (Hermitian, zero constant block), the
    factor is ``G = S0 (I + E)^(1/2)``; since ``(I + E)^(1/2)`` is Hermitian,
    ``G G* = S0 (I + E) S0 = A``.
    """
    if not is_hermitian(A):
        raise RingError("matrix is not Hermitian (adjoint(A) != A)")
    A0 = A.at_origin()
    A0 = 0.5 * (A0 + A0.conj().T)
    w, V = np.linalg.eigh(A0)
    if w.min() <= eps_pd:
        raise NotStrictlyPositive(
            f"A(0) is not positive definite (min eigenvalue {w.min():.6g} <= {eps_pd:g}); "
            "a Hermitian ring matrix factors as G G* with G invertible only when A(0) > 0"
        )
    S0 = (V * np.sqrt(w)) @ V.conj().T
    S0inv = (V / np.sqrt(w)) @ V.conj().T
    ctx = A.context
    rest = A.array.copy()
    rest[..., 0] = 0.0
    E = np.einsum("ij,jkp,kl->ilp", S0inv, rest, S0inv)
    root = mat_apply_entire(sqrt1p_taylor(ctx.degree_cap), RingMatrix._raw(ctx, E))
    return RingMatrix._raw(ctx, _const_left(S0, root.array))
