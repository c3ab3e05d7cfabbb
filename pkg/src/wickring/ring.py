"""
Truncated arithmetic in the ring of power series in countably many variables.

An element ``r(z) = sum_alpha r_alpha z^alpha`` is stored relative to a
:class:`TruncationContext` ``(m, d)``: only the variables ``z_1..z_m`` and
monomials of total degree ``<= d`` are kept. The quotient obtained this way
is again a commutative ring, and every element with vanishing constant term
is nilpotent in it, so inverses and entire functions of such elements are
finite sums.

The Wick product of two elements is the ordinary (Cauchy) product of their
power series; degrees above the cap are dropped::

    >>> ctx = TruncationContext(2, 2)
    >>> z1 = ctx.var(1)
    >>> (1 + z1) * (1 - z1)
    RingElement(m=2, d=2, {(): 1, z1^2: -1})

Internally the coefficients live in a dense vector over the graded-lex
enumeration of admitted multi-indices; the public view (:attr:`RingElement.coeffs`)
is the sparse map with zeros removed.
"""

from __future__ import annotations

import functools
import itertools
import math
import numbers
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np
from scipy import special

EPS_INV = 1e-12
DEFAULT_TOL = 1e-10


class RingError(ValueError):
    """Base class for errors raised by ring computations."""


class ContextMismatch(RingError):
    pass


class NotInvertible(RingError):
    pass


class DivergenceError(RingError):
    pass


class DomainError(RingError):
    pass


@dataclass(frozen=True)
class MultiIndex:
    """Finitely supported exponent sequence, stored as sorted ``(var, exp)`` pairs.

    Variables are numbered from 1. Use :meth:`from_pairs` to build one from
    unsorted or non-canonical input.
    """

    entries: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        prev = 0
        for var, exp in self.entries:
            if not (isinstance(var, numbers.Integral) and isinstance(exp, numbers.Integral)):
                raise TypeError("multi-index entries must be integers")
            if var <= prev:
                raise ValueError(f"variable indices must be strictly increasing and >= 1: {self.entries}")
            if exp < 1:
                raise ValueError(f"stored exponents must be >= 1: {self.entries}")
            prev = var

    @classmethod
    def from_pairs(cls, pairs: Iterable[Sequence[int]]) -> MultiIndex:
        acc: dict[int, int] = {}
        for var, exp in pairs:
            var, exp = int(var), int(exp)
            if var < 1 or exp < 0:
                raise ValueError(f"invalid multi-index pair ({var}, {exp})")
            acc[var] = acc.get(var, 0) + exp
        return cls(tuple(sorted((v, e) for v, e in acc.items() if e)))

    @classmethod
    def from_exponents(cls, exps: Sequence[int]) -> MultiIndex:
        return cls(tuple((j + 1, int(e)) for j, e in enumerate(exps) if e))

    @property
    def degree(self) -> int:
        return sum(e for _, e in self.entries)

    @property
    def factorial(self) -> int:
        return math.prod(math.factorial(e) for _, e in self.entries)

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(v for v, _ in self.entries)

    def exponents(self, m: int) -> tuple[int, ...]:
        out = [0] * m
        for var, exp in self.entries:
            if var > m:
                raise ValueError(f"{self} uses variable z{var} outside 1..{m}")
            out[var - 1] = exp
        return tuple(out)

    def __add__(self, other: MultiIndex) -> MultiIndex:
        return MultiIndex.from_pairs(self.entries + other.entries)

    def __len__(self):
        return len(self.entries)

    def __str__(self):
        if not self.entries:
            return "()"
        return " ".join(f"z{v}" if e == 1 else f"z{v}^{e}" for v, e in self.entries)


def mi_weight(alpha: MultiIndex, q: float) -> float:
    """``prod_j (2j)^(q * alpha_j)``; overflows to ``inf`` instead of raising."""
    out = 1.0
    for var, exp in alpha.entries:
        try:
            out *= math.pow(2.0 * var, q * exp)
        except OverflowError:
            return math.inf
    return out


class _Tables:
    """Enumeration and product tables for one ``(m, d)`` pair."""

    def __init__(self, m: int, d: int):
        exps = [(0,) * m]
        for deg in range(1, d + 1):
            for combo in itertools.combinations_with_replacement(range(m), deg):
                e = [0] * m
                for v in combo:
                    e[v] += 1
                exps.append(tuple(e))
        self.exps = np.array(exps, dtype=np.int64).reshape(len(exps), m)
        self.basis = tuple(MultiIndex.from_exponents(e) for e in exps)
        self.position = {alpha: i for i, alpha in enumerate(self.basis)}
        self.size = len(self.basis)
        self.degrees = self.exps.sum(axis=1)
        self.factorials = np.array([a.factorial for a in self.basis], dtype=float)

        # Mixed-radix codes: an exponent sum with total degree <= d never carries.
        radix = (d + 1) ** np.arange(m, dtype=np.int64)
        codes = self.exps @ radix
        order = np.argsort(codes)
        ii, jj = np.nonzero(self.degrees[:, None] + self.degrees[None, :] <= d)
        kk = order[np.searchsorted(codes, codes[ii] + codes[jj], sorter=order)]
        self.I, self.J, self.K = ii, jj, kk
        self.pairs = len(ii)
        if self.pairs * self.size <= 4_000_000:
            scatter = np.zeros((self.pairs, self.size))
            scatter[np.arange(self.pairs), kk] = 1.0
            self.scatter = scatter
        else:
            self.scatter = None

    def weights(self, q: float) -> np.ndarray:
        base = 2.0 * np.arange(1, self.exps.shape[1] + 1)
        with np.errstate(over="ignore"):
            return np.prod(base[None, :] ** (q * self.exps), axis=1)

    def gather(self, products: np.ndarray) -> np.ndarray:
        """Sum pair products ``(..., P)`` into coefficients ``(..., N)``."""
        if self.scatter is not None:
            return products @ self.scatter
        out = np.zeros(products.shape[:-1] + (self.size,), dtype=complex)
        np.add.at(np.moveaxis(out, -1, 0), self.K, np.moveaxis(products, -1, 0))
        return out


@functools.lru_cache(maxsize=None)
def _tables(m: int, d: int) -> _Tables:
    return _Tables(m, d)


@dataclass(frozen=True)
class TruncationContext:
    """The finite quotient: variables ``z_1..z_m``, total degree ``<= d``.

    ``m = 0`` collapses the ring to the complex numbers, which is how the
    classical (projected) computations are run.
    """

    num_vars: int
    degree_cap: int

    def __post_init__(self):
        if self.num_vars < 0 or self.degree_cap < 0:
            raise ValueError("num_vars and degree_cap must be non-negative")

    @property
    def tables(self) -> _Tables:
        return _tables(self.num_vars, self.degree_cap)

    @property
    def basis(self) -> tuple[MultiIndex, ...]:
        return self.tables.basis

    @property
    def size(self) -> int:
        return self.tables.size

    def admits(self, alpha: MultiIndex) -> bool:
        return alpha in self.tables.position

    def position(self, alpha: MultiIndex) -> int:
        try:
            return self.tables.position[alpha]
        except KeyError:
            raise ValueError(f"multi-index {alpha} not admitted by {self}") from None

    def zero(self) -> RingElement:
        return RingElement._raw(self, np.zeros(self.size, dtype=complex))

    def one(self) -> RingElement:
        return self.const(1.0)

    def const(self, c: complex) -> RingElement:
        arr = np.zeros(self.size, dtype=complex)
        arr[0] = c
        return RingElement._raw(self, arr)

    def var(self, j: int, coeff: complex = 1.0) -> RingElement:
        return RingElement(self, {MultiIndex(((j, 1),)): coeff})

    def random(self, rng: np.random.Generator, scale: float = 1.0, constant: complex | None = None) -> RingElement:
        """Element with uniform complex coefficients of modulus ``<= scale``."""
        arr = scale * np.sqrt(rng.random(self.size)) * np.exp(2j * np.pi * rng.random(self.size))
        if constant is not None:
            arr[0] = constant
        return RingElement._raw(self, arr)

    def __str__(self):
        return f"(m={self.num_vars}, d={self.degree_cap})"


def _onehot(ctx: TruncationContext) -> np.ndarray:
    arr = np.zeros(ctx.size, dtype=complex)
    arr[0] = 1.0
    return arr


def wick_arrays(ctx: TruncationContext, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Truncated Wick product of coefficient arrays broadcast over leading axes."""
    t = ctx.tables
    return t.gather(a[..., t.I] * b[..., t.J])


def invert_arrays(ctx: TruncationContext, a: np.ndarray, eps: float = EPS_INV) -> np.ndarray:
    """Batched inverse; every constant term must exceed ``eps`` in modulus."""
    c0 = a[..., 0]
    if np.any(np.abs(c0) <= eps):
        raise NotInvertible("constant term is (numerically) zero; element has no inverse")
    one = _onehot(ctx)
    e = a / c0[..., None] - one
    s = np.broadcast_to(one, a.shape).copy()
    for _ in range(ctx.degree_cap):
        s = one - wick_arrays(ctx, e, s)
    return s / c0[..., None]


class RingElement:
    """Immutable truncated power series with complex coefficients.

    ``coeffs`` may be a mapping from :class:`MultiIndex` (or a sequence of
    ``(var, exp)`` pairs) to complex numbers.
    """

    __slots__ = ("context", "_c")
    __array_ufunc__ = None

    def __init__(self, context: TruncationContext, coeffs: Mapping | None = None):
        arr = np.zeros(context.size, dtype=complex)
        for key, val in (coeffs or {}).items():
            alpha = key if isinstance(key, MultiIndex) else MultiIndex.from_pairs(key)
            arr[context.position(alpha)] += complex(val)
        self.context = context
        arr.flags.writeable = False
        self._c = arr

    @classmethod
    def _raw(cls, context: TruncationContext, arr: np.ndarray) -> RingElement:
        obj = cls.__new__(cls)
        obj.context = context
        arr = np.array(arr, dtype=complex)
        arr.flags.writeable = False
        obj._c = arr
        return obj

    @property
    def array(self) -> np.ndarray:
        """Dense coefficient vector in the context's graded-lex order (read-only)."""
        return self._c

    @property
    def coeffs(self) -> dict[MultiIndex, complex]:
        basis = self.context.basis
        return {basis[i]: complex(self._c[i]) for i in np.flatnonzero(self._c)}

    @property
    def constant(self) -> complex:
        return complex(self._c[0])

    def __getitem__(self, alpha) -> complex:
        if not isinstance(alpha, MultiIndex):
            alpha = MultiIndex.from_pairs(alpha)
        if not self.context.admits(alpha):
            return 0j
        return complex(self._c[self.context.position(alpha)])

    def _coerce(self, other) -> RingElement:
        if isinstance(other, RingElement):
            if other.context != self.context:
                raise ContextMismatch(f"contexts differ: {self.context} vs {other.context}")
            return other
        if isinstance(other, numbers.Number):
            return self.context.const(complex(other))
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return RingElement._raw(self.context, self._c + other._c)

    __radd__ = __add__

    def __neg__(self):
        return RingElement._raw(self.context, -self._c)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return RingElement._raw(self.context, self._c - other._c)

    def __rsub__(self, other):
        return -(self - other)

    def __mul__(self, other):
        if isinstance(other, numbers.Number):
            return RingElement._raw(self.context, self._c * complex(other))
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return RingElement._raw(self.context, wick_arrays(self.context, self._c, other._c))

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, numbers.Number):
            return RingElement._raw(self.context, self._c / complex(other))
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self * invert(other)

    def __rtruediv__(self, other):
        return invert(self) * other

    def __pow__(self, n: int):
        return wick_pow(self, n)

    def conjugate(self) -> RingElement:
        return RingElement._raw(self.context, self._c.conj())

    def __eq__(self, other):
        if not isinstance(other, RingElement):
            return NotImplemented
        return self.context == other.context and np.array_equal(self._c, other._c)

    __hash__ = None

    def allclose(self, other, atol: float = DEFAULT_TOL, rtol: float = DEFAULT_TOL) -> bool:
        other = self._coerce(other)
        return bool(np.allclose(self._c, other._c, atol=atol, rtol=rtol))

    def max_abs(self) -> float:
        return float(np.abs(self._c).max())

    def __repr__(self):
        terms = ", ".join(f"{alpha}: {_fmt(c)}" for alpha, c in self.coeffs.items())
        return f"RingElement(m={self.context.num_vars}, d={self.context.degree_cap}, {{{terms}}})"


def _fmt(c: complex) -> str:
    if c.imag == 0:
        x = c.real
        return str(int(x)) if x == int(x) else repr(x)
    return repr(c)


def _check_same(F: RingElement, G: RingElement):
    if F.context != G.context:
        raise ContextMismatch(f"contexts differ: {F.context} vs {G.context}")


def linear_combine(a: complex, F: RingElement, b: complex, G: RingElement) -> RingElement:
    _check_same(F, G)
    return RingElement._raw(F.context, a * F.array + b * G.array)


def wick_mul(F: RingElement, G: RingElement) -> RingElement:
    _check_same(F, G)
    return RingElement._raw(F.context, wick_arrays(F.context, F.array, G.array))


def conjugate(F: RingElement) -> RingElement:
    return F.conjugate()


def eval_origin(F: RingElement) -> complex:
    """The constant-term homomorphism ``r -> r(0)``."""
    return F.constant


def norm_dual(F: RingElement, k: float) -> float:
    """``(sum |f_alpha|^2 (2N)^(-k alpha))^(1/2)``."""
    w = F.context.tables.weights(-k)
    return float(np.sqrt(np.sum(np.abs(F.array) ** 2 * w)))


def norm_test(F: RingElement, k: float) -> float:
    """``(sum (alpha!)^2 |f_alpha|^2 (2N)^(k alpha))^(1/2)``."""
    t = F.context.tables
    with np.errstate(over="ignore", invalid="ignore"):
        return float(np.sqrt(np.sum(t.factorials**2 * np.abs(F.array) ** 2 * t.weights(k))))


_VAGE_SPLIT = 64


def vage_constant(q: float) -> float:
    """``A(q) = (sum over all multi-indices of (2N)^(-q alpha))^(1/2)``, for ``q > 1``.

    The sum factors as ``prod_j (1 - (2j)^-q)^-1``. Factors ``j <= 64`` are
    multiplied directly; the log of the remaining tail equals
    ``sum_k 2^(-qk) zeta(qk, 65) / k`` (Hurwitz zeta), which converges
    geometrically with ratio below ``128^-q``.
    """
    q = float(q)
    if not q > 1:
        raise DivergenceError(f"A(q) diverges for q <= 1 (got q={q})")
    if math.isinf(q):
        return 1.0
    j = np.arange(1, _VAGE_SPLIT + 1, dtype=float)
    log_sum = float(-np.sum(np.log1p(-((2 * j) ** -q))))
    k = 1
    while True:
        term = 2.0 ** (-q * k) * float(special.zeta(q * k, _VAGE_SPLIT + 1)) / k
        log_sum += term
        if term < 1e-18 * max(log_sum, 1e-300) or term == 0.0:
            break
        k += 1
    return math.exp(0.5 * log_sum)


def invert(F: RingElement, eps: float = EPS_INV) -> RingElement:
    """Inverse via the finite Neumann series of ``c0^-1 F - 1``."""
    return RingElement._raw(F.context, invert_arrays(F.context, F.array, eps))


def wick_pow(F: RingElement, n: int) -> RingElement:
    if n < 0:
        raise ValueError("use invert() for negative powers")
    ctx = F.context
    result = _onehot(ctx)
    base = F.array
    while n:
        if n & 1:
            result = wick_arrays(ctx, result, base)
        n >>= 1
        if n:
            base = wick_arrays(ctx, base, base)
    return RingElement._raw(ctx, result)


def apply_entire(taylor: Sequence[complex], F: RingElement, eps: float = EPS_INV) -> RingElement:
    """``sum_p c_p F^p`` for ``F`` with zero constant term.

    ``F`` is nilpotent of order ``<= d + 1``, so only ``c_0..c_d`` matter and
    the result is exact in the truncation.
    """
    d = F.context.degree_cap
    if len(taylor) < d + 1:
        raise ValueError(f"need at least {d + 1} Taylor coefficients, got {len(taylor)}")
    if abs(F.constant) > eps:
        raise DomainError("entire-function calculus needs an element with zero constant term")
    ctx = F.context
    one = _onehot(ctx)
    acc = complex(taylor[d]) * one
    for p in range(d - 1, -1, -1):
        acc = wick_arrays(ctx, F.array, acc) + complex(taylor[p]) * one
    return RingElement._raw(ctx, acc)


def exp_taylor(n: int, scale: complex = 1.0) -> list[complex]:
    """First ``n + 1`` Taylor coefficients of ``exp(scale * x)``."""
    return [scale**p / math.factorial(p) for p in range(n + 1)]


def sqrt1p_taylor(n: int) -> list[float]:
    """First ``n + 1`` Taylor coefficients of ``(1 + x)^(1/2)``."""
    return [float(special.binom(0.5, p)) for p in range(n + 1)]


def taylor_product(f: Sequence[complex], g: Sequence[complex]) -> list[complex]:
    """Taylor coefficients of ``f * g``, truncated to the shorter length."""
    n = min(len(f), len(g))
    return [sum(f[i] * g[p - i] for i in range(p + 1)) for p in range(n)]
