"""Nevanlinna-Pick interpolation over a truncated ring of power series in countably many variables."""

__version__ = "0.1.0"

from .interpolation import (  # noqa: E402
    InterpolationProblem,
    SchurParameter,
    build_pick,
    build_theta,
    check_theta_identity,
    classical_solve,
    lft_apply,
    solve,
    verify_solution,
)
from .matrix import RingMatrix, mat_invert, strict_positive_factor  # noqa: E402
from .projection import project  # noqa: E402
from .rational import Realization, RingPoly, RingRational  # noqa: E402
from .ring import (  # noqa: E402
    MultiIndex,
    RingElement,
    TruncationContext,
    apply_entire,
    invert,
    norm_dual,
    norm_test,
    vage_constant,
)

__all__ = [
    "InterpolationProblem",
    "MultiIndex",
    "Realization",
    "RingElement",
    "RingMatrix",
    "RingPoly",
    "RingRational",
    "SchurParameter",
    "TruncationContext",
    "apply_entire",
    "build_pick",
    "build_theta",
    "check_theta_identity",
    "classical_solve",
    "invert",
    "lft_apply",
    "mat_invert",
    "norm_dual",
    "norm_test",
    "project",
    "solve",
    "strict_positive_factor",
    "vage_constant",
    "verify_solution",
]
