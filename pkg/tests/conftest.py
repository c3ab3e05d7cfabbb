import numpy as np
import pytest
from hypothesis import strategies as st
from hypothesis.extra import numpy as hnp

from wickring.matrix import RingMatrix
from wickring.rational import RingPoly, RingRational
from wickring.ring import RingElement, TruncationContext

DESK = TruncationContext(3, 4)

_RESULTS = []


def elements(ctx=DESK, max_magnitude=2.0):
    coeff = st.complex_numbers(max_magnitude=max_magnitude, allow_nan=False, allow_infinity=False)
    return hnp.arrays(np.complex128, ctx.size, elements=coeff).map(lambda a: RingElement._raw(ctx, a))


def random_poly(ctx, rng, degree, shape=(1, 1), scale=0.5):
    return RingPoly(
        ctx,
        [
            RingMatrix(ctx, [[ctx.random(rng, scale) for _ in range(shape[1])] for _ in range(shape[0])])
            for _ in range(degree + 1)
        ],
    )


def random_rational(ctx, rng, shape=(1, 1)):
    """Projected poles kept outside the disk of radius 2."""
    num = random_poly(ctx, rng, 2, shape)
    roots = 2.5 * np.exp(2j * np.pi * rng.random(2))
    c = np.poly(roots)[::-1] / np.prod(-roots)
    den = RingPoly(ctx, [ctx.random(rng, 0.05, constant=ck) for ck in c])
    return RingRational(num, den)


def random_point(ctx, rng, radius=0.6):
    return ctx.random(rng, 0.3, constant=radius * np.sqrt(rng.random()) * np.exp(2j * np.pi * rng.random()))


@pytest.fixture
def ctx():
    return DESK


@pytest.fixture
def rng():
    return np.random.default_rng(20111205)


@pytest.fixture
def criterion():
    """Record one acceptance line: ``criterion(tag, text, ok, detail)``; asserts ``ok``."""

    def record(tag, text, ok, detail=""):
        _RESULTS.append((tag, text, bool(ok), detail))
        assert ok, f"{tag} {text}: {detail}"

    return record


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for tag, text, ok, detail in _RESULTS:
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {tag:5s} {text}  {detail}")
