import random
from fractions import Fraction

import pytest

ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def record(n: int, ok: bool, detail: str) -> None:
    """Store one acceptance line; printed again in the terminal summary."""
    ACCEPTANCE[n] = (bool(ok), detail)
    print(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}")


def random_lipschitz(rng: random.Random, m: int, d: int = 2, q: int = 4) -> list[Fraction]:
    """Non-decreasing values at ``0..m`` with increments in ``{0, 1/q, .., d}``."""
    v = [Fraction(0)]
    for _ in range(m):
        v.append(v[-1] + Fraction(rng.randint(0, d * q), q))
    return v


def random_branching(rng: random.Random, m: int, t: Fraction, q: int = 8) -> list[Fraction]:
    """2-Lipschitz non-decreasing values with ``f(0) = 0`` and ``f(m) = t m``."""
    total = int(t * m * q)
    inc = [0] * m
    slots = list(range(m))
    for _ in range(total):
        j = rng.choice(slots)
        inc[j] += 1
        if inc[j] == 2 * q:
            slots.remove(j)
    if rng.random() < 0.3:
        inc.sort(reverse=rng.random() < 0.5)
    v = [Fraction(0)]
    for x in inc:
        v.append(v[-1] + Fraction(x, q))
    return v


@pytest.fixture
def rng():
    return random.Random(20240601)
