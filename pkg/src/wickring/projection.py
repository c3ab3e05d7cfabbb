"""Evaluation at the origin lifted to every ring-valued object.

``project`` maps an object over a context ``(m, d)`` to the same kind of
object over the classical context ``(0, 0)``, where the ring is just the
complex numbers.
"""

from __future__ import annotations

from functools import singledispatch

from .matrix import RingMatrix
from .rational import Realization, RingPoly, RingRational
from .ring import RingElement, TruncationContext

CLASSICAL = TruncationContext(0, 0)


@singledispatch
def project(obj):
    raise TypeError(f"cannot project {type(obj).__name__}")


@project.register
def _(obj: RingElement) -> RingElement:
    return RingElement._raw(CLASSICAL, obj.array[:1])


@project.register
def _(obj: RingMatrix) -> RingMatrix:
    return RingMatrix._raw(CLASSICAL, obj.array[..., :1])


@project.register
def _(obj: RingPoly) -> RingPoly:
    return RingPoly._raw(CLASSICAL, obj.array[..., :1])


@project.register
def _(obj: RingRational) -> RingRational:
    return RingRational(project(obj.num), project(obj.den))


@project.register
def _(obj: Realization) -> Realization:
    return Realization(project(obj.A), project(obj.B), project(obj.C), project(obj.D))

