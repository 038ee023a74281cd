"""Exact exponent bookkeeping for the Furstenberg and projection lower bounds.

Exponents are measured in powers of ``Delta**-1`` (so a count ``Delta**-x``
is recorded as ``x``) and the final answers are divided by ``m`` to become
powers of ``delta**-1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .decomposition import (
    affine_majorant,
    as_function,
    classify,
    decompose,
    default_tau,
)

__all__ = [
    "furstenberg_exponent",
    "ParameterBudget",
    "BookkeepingResult",
    "projection_bookkeeping",
    "katz_tao_bookkeeping",
    "ProductBound",
    "product_exponent",
]


def furstenberg_exponent(s, t) -> Fraction:
    """``min(t, (s + t)/2, 1)``."""
    s, t = Fraction(s), Fraction(t)
    if not (0 < s <= 1 and 0 <= t <= 2):
        raise ValueError("need s in (0, 1] and t in [0, 2]")
    return min(t, (s + t) / 2, Fraction(1))


@dataclass(frozen=True)
class ParameterBudget:
    s: Fraction
    t: Fraction
    u: Fraction
    zeta: Fraction
    omega: Fraction
    eta: Fraction
    xi: Fraction
    eps: Fraction
    eps_F: Fraction

    @classmethod
    def make(cls, s, t, u, zeta, eta, xi, eps, eps_F) -> "ParameterBudget":
        s, t, u, zeta = (Fraction(v) for v in (s, t, u, zeta))
        omega = t / 2 + s * u / 2 - zeta
        return cls(s, t, u, zeta, omega, *(Fraction(v) for v in (eta, xi, eps, eps_F)))

    @classmethod
    def default(cls, s, t, u, zeta) -> "ParameterBudget":
        """Parameters comfortably inside every constraint (halfway to each bound)."""
        s, t, u, zeta = (Fraction(v) for v in (s, t, u, zeta))
        omega = t / 2 + s * u / 2 - zeta
        eta = xi = omega / 16
        eps_F = Fraction(1, 2)
        tau = default_tau(2, xi)
        eps = min(omega / (2 * s + 4), tau * eps_F / 2) / 2
        return cls(s, t, u, zeta, omega, eta, xi, eps, eps_F)

    def violations(self, tau=None) -> list[str]:
        tau = default_tau(2, self.xi) if tau is None else Fraction(tau)
        out = []
        if not 0 < self.s <= 1:
            out.append("s must lie in (0, 1]")
        if not 0 <= self.t <= 2:
            out.append("t must lie in [0, 2]")
        if self.omega != self.t / 2 + self.s * self.u / 2 - self.zeta:
            out.append("omega must equal t/2 + s u/2 - zeta")
        if not self.omega > 0:
            out.append("omega must be positive")
        if not 0 < self.eta < self.omega / 8:
            out.append("need 0 < eta < omega/8")
        if not 0 < self.xi < self.omega / 8:
            out.append("need 0 < xi < omega/8")
        if not 0 < self.eps < min(self.omega / (2 * self.s + 4), tau * self.eps_F / 2):
            out.append("need 0 < eps < min(omega/(2s+4), tau eps_F/2)")
        return out

    def check(self, tau=None) -> None:
        bad = self.violations(tau)
        if bad:
            raise ValueError("parameter budget violated: " + "; ".join(bad))


@dataclass
class BookkeepingResult:
    exponent: Fraction
    target: Fraction
    holds: bool
    case: str = ""
    chain_value: Fraction | None = None
    trace: list[tuple[str, Fraction]] = field(default_factory=list)

    def trace_dict(self) -> dict[str, str]:
        return {k: str(v) for k, v in self.trace}


def _sum_over(dec, idx, weight) -> Fraction:
    ln = dec.lengths
    return sum((ln[j] * weight(dec.slopes[j]) for j in idx), Fraction(0))


def projection_bookkeeping(beta, budget: ParameterBudget) -> BookkeepingResult:
    """Replay the exponent chain of the minimal non-concentration Furstenberg bound.

    Every inequality of the chain is checked exactly on the given branching
    function; a failed step raises ``AssertionError`` naming it. Returns
    ``Lambda = t/2 + s(u - eps)/2 - 2 eta - 3 xi/2`` with the trace.
    """
    b = budget
    tau = default_tau(2, b.xi)
    b.check(tau)
    f = as_function(beta)
    m = f.m
    s, t, u, eta, xi, eps = b.s, b.t, b.u, b.eta, b.xi, b.eps
    if f.values[0] != 0 or not f.is_lipschitz(2):
        raise ValueError("beta must start at 0 and be non-decreasing and 2-Lipschitz")
    if f(m) != t * m:
        raise ValueError("beta(m) must equal t m")
    A = (1 - t / 2) * m
    if f(A) < (u - eps) * m:
        raise ValueError("beta((1 - t/2) m) >= (u - eps) m fails")

    dec = decompose(f, 2, xi, tau)
    F = affine_majorant(dec, f)
    cls = classify(dec, s, t, eta)
    A1, A2 = cls.A1, cls.A2
    trace: list[tuple[str, Fraction]] = [("A1", A1), ("A2", A2), ("A", A)]

    def step(name: str, ok: bool, value) -> None:
        trace.append((name, Fraction(value)))
        if not ok:
            raise AssertionError(f"bookkeeping step failed: {name}")

    step("majorant within xi m", F.ok, F.error)
    E1 = _sum_over(dec, cls.I1_big, lambda tj: tj - eta)
    E2 = _sum_over(dec, cls.I2, lambda tj: (tj + s) / 2 - eta)
    E3 = _sum_over(dec, cls.I3, lambda tj: 1 - eta)
    step("I1 bound E1 >= F(A1) - 2 eta A1", E1 >= F(A1) - 2 * eta * A1, E1)
    step("E1 >= beta(A1) - xi m - 2 eta A1", E1 >= f(A1) - xi * m - 2 * eta * A1, E1)
    step(
        "I2 bound",
        E2 == (F(A2) - F(A1)) / 2 + s * (A2 - A1) / 2 - eta * (A2 - A1),
        E2,
    )
    step("I3 bound", E3 == (m - A2) * (1 - eta), E3)
    E = E1 + E2 + E3
    bracket = f(A1) / 2 + s * (A2 - A1) / 2 + (m - A2) - (f(m) - f(A2)) / 2
    G = t * m / 2 + bracket
    step("E >= G - 3 xi m/2 - 2 eta m", E >= G - 3 * xi * m / 2 - 2 * eta * m, E)

    need = s * (u - eps) * m / 2
    if A1 >= A:
        case = "A1 >= A"
        step("beta(A1)/2 >= beta(A)/2 >= s(u - eps)m/2", f(A1) / 2 >= need, f(A1) / 2)
    elif A2 <= A:
        case = "A2 <= A"
        step("tail term >= beta(A)/2", (m - A2) - (f(m) - f(A2)) / 2 >= f(A) / 2, bracket)
    else:
        case = "A1 < A < A2"
        pi1 = f(A1) / 2
        pi2 = s * (A - A1) / 2
        pi3 = s * (A2 - A) / 2
        pi4 = -(A2 - A) + f(A2) / 2
        trace += [("Pi1", pi1), ("Pi2", pi2), ("Pi3", pi3), ("Pi4", pi4)]
        step("Pi1+Pi2+Pi3+Pi4 == bracket", pi1 + pi2 + pi3 + pi4 == bracket, bracket)
    step("bracket >= s(u - eps) m/2", bracket >= need, bracket)

    lam = t / 2 + s * (u - eps) / 2 - 2 * eta - 3 * xi / 2
    step("E/m >= Lambda", E / m >= lam, E / m)
    step("Lambda > zeta", lam > b.zeta, lam)
    return BookkeepingResult(lam, b.zeta, True, case, E / m, trace)


def katz_tao_bookkeeping(beta, s, t, xi=Fraction(1, 100)) -> BookkeepingResult:
    """Exponent of ``|P|_{Delta^a} * |P|_{Delta^a -> delta}**(1/2 + s/(2t))``.

    Returned in units of ``log2 |P| / T``; the target is
    ``(s + t)/(2t) * beta(m)``, i.e. ``|P|**((s + t)/(2t))``.
    """
    s, t = Fraction(s), Fraction(t)
    if not 0 < s <= t <= 2:
        raise ValueError("need 0 < s <= t <= 2")
    f = as_function(beta)
    if f.values[0] != 0 or not f.is_lipschitz(2):
        raise ValueError("beta must start at 0 and be non-decreasing and 2-Lipschitz")
    if any(v1 - v0 > t for v0, v1 in zip(f.values, f.values[1:])):
        raise ValueError("increments above t contradict the Katz-Tao bound")
    dec = decompose(f, 2, xi)
    if any(tj > t for tj in dec.slopes):
        raise ValueError("a slope exceeds t")
    cls = classify(dec, s, t, 0)
    a = cls.split_point
    coarse = f(a)
    fine = f(f.m) - f(a)
    X = coarse + (Fraction(1, 2) + s / (2 * t)) * fine
    target = (s + t) / (2 * t) * f(f.m)
    trace = [("split_point", a), ("coarse", coarse), ("fine", fine), ("X", X)]
    return BookkeepingResult(X, target, X >= target, "", X, trace)


@dataclass
class ProductBound:
    log2_bound: Fraction | float
    theta: Fraction
    branch: str
    log2_trivial: Fraction | float
    la: Fraction | float
    lb: Fraction | float
    s: Fraction
    alpha: Fraction
    beta: Fraction

    def general(self, theta) -> Fraction | float:
        """The bound for any admissible ``theta``; raises outside the constraint."""
        return general_product_exponent(self.s, self.alpha, self.beta, self.la, self.lb, theta)


def _log2_size(x):
    if isinstance(x, int) and x > 0 and x & (x - 1) == 0:
        return Fraction(x.bit_length() - 1)
    return math.log2(x)


def general_product_exponent(s, alpha, beta, la, lb, theta):
    """``(la + lb)/2 + lb s/(2 beta) + theta (la s/(2 alpha) - lb s/(2 beta))``."""
    s, alpha, beta, theta = (Fraction(v) for v in (s, alpha, beta, theta))
    la, lb = (v if isinstance(v, float) else Fraction(v) for v in (la, lb))
    if not 0 <= theta <= 1 or max(theta * s / alpha, (1 - theta) * s / beta) > 1:
        raise ValueError("theta violates max(theta s/alpha, (1-theta) s/beta) <= 1")
    return (la + lb) / 2 + lb * s / (2 * beta) + theta * (la * s / (2 * alpha) - lb * s / (2 * beta))


def product_exponent(s, alpha, beta_exp, sizeA, sizeB, log_sizes: bool = False) -> ProductBound:
    """log2 of the projection lower bound for ``A x B``, ``theta = min(1, alpha/s)``.

    Sizes are cardinalities unless ``log_sizes`` is set, in which case they
    are already ``log2``. Powers of two stay exact.
    """
    s, alpha, beta = (Fraction(v) for v in (s, alpha, beta_exp))
    if not s <= alpha + beta <= 2 - s:
        raise ValueError("need alpha + beta in [s, 2 - s]")
    la = Fraction(sizeA) if log_sizes else _log2_size(sizeA)
    lb = Fraction(sizeB) if log_sizes else _log2_size(sizeB)
    if beta * la < alpha * lb:
        raise ValueError("need |A|**beta >= |B|**alpha")
    if alpha <= s:
        theta = alpha / s
        bound = la + lb * (beta + s - alpha) / (2 * beta)
        branch = "alpha <= s"
    else:
        theta = Fraction(1)
        bound = la * (alpha + s) / (2 * alpha) + lb / 2
        branch = "alpha > s"
    return ProductBound(bound, theta, branch, max(la, lb), la, lb, s, alpha, beta)
