"""Sharpness examples with re-verified non-concentration and projection claims.

Every example carries a list of check specifications. ``verify`` evaluates
them from the stored sets alone, so a manifest written to disk can be
re-checked without re-running the construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from ..dyadic import DyadicSet, neighborhood, refine, resolve_level, scale_set
from ..exact import PowerValue, floor_root_pow2
from ..statistics import (
    check_single_scale_nonconcentration,
    frostman_constant,
    katz_tao_constant,
)
from ..tubes import projection_profile
from .progressions import abc_ratio_construction, ap_set, farey_slopes

__all__ = [
    "DEFAULT_CAPS",
    "Claim",
    "SharpExample",
    "evaluate_check",
    "standard_sharp_example",
    "minimal_nonconc_example",
    "katz_tao_sharp_example",
    "product_example_small_alpha",
    "product_example_large_alpha",
    "CONSTRUCTIONS",
]

DEFAULT_CAPS = {
    "frostman": Fraction(16),
    "katz_tao": Fraction(16),
    "projection": Fraction(16),
    "cardinality": Fraction(4),
}


@dataclass
class Claim:
    name: str
    passed: bool
    measured: str
    bound: str

    def to_json(self) -> dict:
        return {"name": self.name, "passed": self.passed, "measured": self.measured, "bound": self.bound}


def _product(A: DyadicSet, B: DyadicSet) -> DyadicSet:
    if A.level != B.level:
        raise ValueError("factors must share a level")
    x = np.repeat(A.cells[:, 0], len(B))
    y = np.tile(B.cells[:, 0], len(A))
    return DyadicSet(np.stack([x, y], axis=1), A.level, 2)


def _min_separation(S: DyadicSet) -> int:
    """Least sup-norm index distance between two distinct cells (``-1`` for fewer than two)."""
    c = S.cells
    if len(c) < 2:
        return -1
    if S.dim == 1:
        return int(np.diff(c[:, 0]).min())
    best = None
    for i in range(len(c) - 1):
        d = np.abs(c[i + 1 :] - c[i]).max(axis=1).min()
        best = d if best is None else min(best, d)
    return int(best)


def evaluate_check(check: dict, sets: dict[str, DyadicSet]) -> Claim:
    """Evaluate one check specification against named sets."""
    kind = check["kind"]
    name = check.get("name", kind)
    S = sets[check["set"]]
    cap = Fraction(check.get("cap", 1))
    if kind in ("frostman", "katz_tao"):
        fn = frostman_constant if kind == "frostman" else katz_tao_constant
        rep = fn(S, Fraction(check["s"]))
        return Claim(name, rep.holds(cap), repr(rep.best_constant), str(cap))
    if kind == "cardinality":
        # |S| within a factor ``cap`` of 2**target_log2
        target = PowerValue(1, Fraction(check["target_log2"]))
        n = PowerValue(len(S))
        ok = n <= target * cap and n * cap >= target
        return Claim(name, ok, str(len(S)), f"2**({check['target_log2']}) within x{cap}")
    if kind == "exact_cardinality":
        return Claim(name, len(S) == int(check["value"]), str(len(S)), str(check["value"]))
    if kind == "separation":
        # least distance >= 2**-sep_level, in units of the set's scale
        d = _min_separation(S)
        need = PowerValue(1, S.level - Fraction(check["sep_log2"]))
        ok = d < 0 or PowerValue(d) >= need
        return Claim(name, ok, f"{d} cells", f">= {need!r} cells")
    if kind == "single_scale":
        ok, cell, cnt = check_single_scale_nonconcentration(S, Fraction(check["u"]))
        return Claim(name, ok, f"{cnt} in {cell}", f"delta**{check['u']} |P|")
    if kind == "projection":
        slopes = sets[check["slopes"]]
        prof = projection_profile(S, slopes, check.get("level"))
        i = int(np.argmax(prof))
        bound = PowerValue(cap, Fraction(check["bound_log2"]))
        ok = PowerValue(int(prof[i])) <= bound
        return Claim(name, ok, f"{int(prof[i])} at slope cell {int(slopes.cells[i, 0])}", repr(bound))
    raise ValueError(f"unknown check kind {kind!r}")


@dataclass
class SharpExample:
    construction: str
    parameters: dict[str, str]
    sets: dict[str, DyadicSet]
    snapped_scales: dict[str, int]
    claimed_exponent: Fraction
    checks: list[dict]
    claims: list[Claim] = field(default_factory=list)
    notes: dict = field(default_factory=dict)

    @property
    def P(self) -> DyadicSet:
        return self.sets["P"]

    @property
    def theta(self) -> DyadicSet:
        return self.sets["theta"]

    @property
    def factors(self) -> tuple[DyadicSet, DyadicSet]:
        return self.sets["A"], self.sets["B"]

    def verify(self) -> list[Claim]:
        self.claims = [evaluate_check(c, self.sets) for c in self.checks]
        return self.claims

    @property
    def ok(self) -> bool:
        return bool(self.claims) and all(c.passed for c in self.claims)

    def max_projection(self) -> tuple[int, int]:
        """``(max count, slope cell index)`` over the slope set at the set's own scale."""
        prof = projection_profile(self.P, self.theta)
        i = int(np.argmax(prof))
        return int(prof[i]), int(self.theta.cells[i, 0])

    def manifest(self) -> dict:
        return {
            "construction": self.construction,
            "parameters": dict(self.parameters),
            "snapped_scales": {k: -v for k, v in self.snapped_scales.items()},
            "claimed_exponent": str(self.claimed_exponent),
            "checks": [{k: str(v) for k, v in c.items()} for c in self.checks],
            "verified_caps": [c.to_json() for c in self.claims],
            "notes": {k: str(v) for k, v in self.notes.items()},
        }


def _level(scale) -> int:
    return resolve_level(scale)


def _snap(k: int, e: Fraction) -> int:
    """Level of ``(2**-k)**e`` rounded to the finer dyadic scale."""
    return math.ceil(k * e)


def _check_st(s: Fraction, t: Fraction) -> None:
    if not 0 < s <= 1:
        raise ValueError("need s in (0, 1]")
    if not s <= t <= 2 - s:
        raise ValueError("need t in [s, 2 - s]")


def _log2_pow2(n: int, what: str) -> int:
    if n < 1 or n & (n - 1):
        raise ValueError(f"{what} must be a power of two")
    return n.bit_length() - 1


def standard_sharp_example(rho, s, t, caps=None, strict: bool = False) -> SharpExample:
    """Grid ``A x A`` with AP gap ``rho**(t/2)`` and Farey slopes of order ``rho**(-s/2)``."""
    s, t = Fraction(s), Fraction(t)
    _check_st(s, t)
    caps = {**DEFAULT_CAPS, **(caps or {})}
    k = _level(rho)
    g = _snap(k, t / 2)
    if strict and k * t / 2 != g:
        step = (t / 2).denominator
        near = [k - k % step, k - k % step + step]
        raise ValueError(f"rho**(t/2) is not dyadic at rho = 2**-{k}; nearest representable rho: "
                         + " or ".join(f"2**-{n}" for n in near if n >= 0))
    A = ap_set(Fraction(1, 1 << g), k)
    P = _product(A, A)
    Q = floor_root_pow2(k * s / 2)
    theta = farey_slopes(Q, k)
    checks = [
        {"name": "A Frostman (rho, t/2)", "kind": "frostman", "set": "A", "s": t / 2, "cap": caps["frostman"]},
        {"name": "A Katz-Tao (rho, t/2)", "kind": "katz_tao", "set": "A", "s": t / 2, "cap": caps["katz_tao"]},
        {"name": "theta Frostman (rho, s)", "kind": "frostman", "set": "theta", "s": s, "cap": caps["frostman"]},
        {"name": "theta Katz-Tao (rho, s)", "kind": "katz_tao", "set": "theta", "s": s, "cap": caps["katz_tao"]},
        {"name": "|A| ~ rho**(-t/2)", "kind": "cardinality", "set": "A", "target_log2": k * t / 2,
         "cap": caps["cardinality"]},
        {"name": "|theta| ~ rho**(-s)", "kind": "cardinality", "set": "theta", "target_log2": k * s,
         "cap": 2 * caps["cardinality"]},
        {"name": "P separated by the AP gap", "kind": "separation", "set": "P", "sep_log2": g},
        {"name": "P separated by rho**(t/2)/2", "kind": "separation", "set": "P", "sep_log2": k * t / 2 + 1},
        {"name": "projection <= C rho**(-(s+t)/2)", "kind": "projection", "set": "P", "slopes": "theta",
         "bound_log2": k * (s + t) / 2, "cap": caps["projection"]},
    ]
    ex = SharpExample(
        construction="standard",
        parameters={"rho": f"2**-{k}", "s": str(s), "t": str(t)},
        sets={"A": A, "B": A, "P": P, "theta": theta},
        snapped_scales={"rho": k, "gap": g},
        claimed_exponent=(s + t) / 2,
        checks=checks,
        notes={"Q": Q},
    )
    ex.verify()
    return ex


def minimal_nonconc_example(delta, s, t, u, caps=None) -> SharpExample:
    """``rho``-scaled standard example at ``Delta ~ delta**u`` with ``Delta``-cells of slopes refined."""
    s, t, u = Fraction(s), Fraction(t), Fraction(u)
    if not 0 < s <= 1 or not 0 <= t <= 2:
        raise ValueError("need s in (0, 1] and t in [0, 2]")
    if not 0 < u <= min(t, 2 - t):
        raise ValueError("need u in (0, min(t, 2 - t)]")
    caps = {**DEFAULT_CAPS, **(caps or {})}
    k = _level(delta)
    kD = _snap(k, u)
    kr = _snap(k, 1 - t / 2 - u / 2)
    if kD + kr > k:
        raise ValueError(f"snapped scales Delta = 2**-{kD}, rho = 2**-{kr} overshoot delta = 2**-{k}")
    base = standard_sharp_example(kD, s, 1, caps)
    P0 = refine(scale_set(base.P, Fraction(1, 1 << kr)), k)
    # each Delta-cell of slopes becomes a left-aligned AP of about (Delta/delta)**s cells
    gl = _snap(1, kD + (k - kD) * s)
    offs = np.arange(0, 1 << (k - kD), 1 << (k - gl), dtype=np.int64)
    theta = DyadicSet(((base.theta.cells[:, :1] << (k - kD)) + offs[None, :]).reshape(-1), k, 1)
    target = t / 2 + s * u / 2
    checks = [
        {"name": "|P0| ~ delta**-t", "kind": "cardinality", "set": "P", "target_log2": k * t,
         "cap": caps["cardinality"]},
        {"name": "single-scale non-concentration", "kind": "single_scale", "set": "P", "u": u},
        {"name": "theta Frostman (delta, s)", "kind": "frostman", "set": "theta", "s": s, "cap": caps["frostman"]},
        {"name": "P1 Frostman (Delta, 1)", "kind": "frostman", "set": "P1", "s": 1, "cap": caps["frostman"]},
        {"name": "projection <= C delta**-(t/2 + su/2)", "kind": "projection", "set": "P", "slopes": "theta",
         "bound_log2": k * target, "cap": caps["projection"]},
    ]
    ex = SharpExample(
        construction="minimal_nonconc",
        parameters={"delta": f"2**-{k}", "s": str(s), "t": str(t), "u": str(u)},
        sets={"P": P0, "theta": theta, "P1": base.P, "theta1": base.theta},
        snapped_scales={"delta": k, "Delta": kD, "rho": kr, "theta_gap": gl},
        claimed_exponent=target,
        checks=checks,
    )
    ex.verify()
    return ex


def katz_tao_sharp_example(delta, rho, s, t, caps=None) -> SharpExample:
    """Standard example at ``rho`` shrunk by ``delta/rho``; slopes fattened to the ``rho``-neighbourhood."""
    s, t = Fraction(s), Fraction(t)
    _check_st(s, t)
    caps = {**DEFAULT_CAPS, **(caps or {})}
    kd, kr = _level(delta), _level(rho)
    if kr > kd:
        raise ValueError("need delta <= rho")
    base = standard_sharp_example(kr, s, t, caps)
    P = scale_set(base.P, Fraction(1, 1 << (kd - kr)))
    A = scale_set(base.sets["A"], Fraction(1, 1 << (kd - kr)))
    theta = neighborhood(refine(base.theta, kd), kr)
    logP = Fraction(2 * base.snapped_scales["gap"])
    checks = [
        {"name": "P Katz-Tao (delta, t)", "kind": "katz_tao", "set": "P", "s": t, "cap": caps["katz_tao"]},
        {"name": "|P| ~ rho**-t", "kind": "cardinality", "set": "P", "target_log2": kr * t,
         "cap": caps["cardinality"]},
        {"name": "theta Frostman (delta, s)", "kind": "frostman", "set": "theta", "s": s, "cap": caps["frostman"]},
        {"name": "projection <= C |P|**((s+t)/(2t))", "kind": "projection", "set": "P", "slopes": "theta",
         "bound_log2": logP * (s + t) / (2 * t), "cap": caps["projection"]},
    ]
    ex = SharpExample(
        construction="katz_tao",
        parameters={"delta": f"2**-{kd}", "rho": f"2**-{kr}", "s": str(s), "t": str(t)},
        sets={"A": A, "B": A, "P": P, "theta": theta},
        snapped_scales={"delta": kd, "rho": kr, "gap": base.snapped_scales["gap"] + kd - kr},
        claimed_exponent=(s + t) / (2 * t),
        checks=checks,
        notes={"log2_P": logP},
    )
    ex.verify()
    return ex


def product_example_small_alpha(delta, s, alpha, sizeA: int, sizeB: int, caps=None) -> SharpExample:
    """``N`` translates of the symmetric example: ``A0 = D + B0`` against ``B0``."""
    s, alpha = Fraction(s), Fraction(alpha)
    caps = {**DEFAULT_CAPS, **(caps or {})}
    k = _level(delta)
    la, lb = _log2_pow2(sizeA, "sizeA"), _log2_pow2(sizeB, "sizeB")
    if not alpha <= s:
        raise ValueError("need alpha <= s")
    if not s <= 2 * alpha <= 2 - s:
        raise ValueError("the symmetric example needs 2 alpha in [s, 2 - s]")
    if sizeA < sizeB:
        raise ValueError("need sizeA >= sizeB")
    if la > alpha * k:
        raise ValueError(f"need sizeA <= delta**-alpha = 2**{alpha * k}")
    kr = _snap(1, lb / alpha)
    kl = k - kr
    if kl < 0:
        raise ValueError("sizeB**(1/alpha) exceeds 1/delta")
    N = sizeA // sizeB
    if (N.bit_length() - 1) > alpha * kl:
        raise ValueError("N exceeds ell**-alpha")
    sym = katz_tao_sharp_example(k, kr, s, 2 * alpha, caps)
    B0 = sym.sets["A"]
    D = np.arange(N, dtype=np.int64) * ((1 << k) // N)
    A0 = DyadicSet((D[:, None] + B0.cells[None, :, 0]).reshape(-1), k, 1)
    P = _product(A0, B0)
    checks = [
        {"name": "|A0| = N |B0|", "kind": "exact_cardinality", "set": "A", "value": N * len(B0)},
        {"name": "|B0| = sizeB", "kind": "exact_cardinality", "set": "B", "value": sizeB},
        {"name": "A0 Katz-Tao (delta, alpha)", "kind": "katz_tao", "set": "A", "s": alpha, "cap": caps["katz_tao"]},
        {"name": "B0 Katz-Tao (delta, alpha)", "kind": "katz_tao", "set": "B", "s": alpha, "cap": caps["katz_tao"]},
        {"name": "theta Frostman (delta, s)", "kind": "frostman", "set": "theta", "s": s, "cap": caps["frostman"]},
        {"name": "projection <= C |A| |B|**(s/(2 alpha))", "kind": "projection", "set": "P", "slopes": "theta",
         "bound_log2": la + lb * s / (2 * alpha), "cap": caps["projection"]},
    ]
    ex = SharpExample(
        construction="product_small_alpha",
        parameters={"delta": f"2**-{k}", "s": str(s), "alpha": str(alpha), "sizeA": str(sizeA),
                    "sizeB": str(sizeB)},
        sets={"A": A0, "B": B0, "P": P, "theta": sym.theta},
        snapped_scales={"delta": k, "ell": kl, "rho0": kr},
        claimed_exponent=la + lb * s / (2 * alpha),
        checks=checks,
        notes={"N": N},
    )
    ex.verify()
    return ex


def product_example_large_alpha(delta, s, alpha, sizeA: int, sizeB: int, caps=None) -> SharpExample:
    """Rescaled ABC witness: ``|A + cB|_delta`` small for every ``c`` in a Frostman slope set."""
    s, alpha = Fraction(s), Fraction(alpha)
    caps = {**DEFAULT_CAPS, **(caps or {})}
    k = _level(delta)
    la, lb = _log2_pow2(sizeA, "sizeA"), _log2_pow2(sizeB, "sizeB")
    if not 0 < s <= alpha <= 1:
        raise ValueError("need 0 < s <= alpha <= 1")
    if sizeB > sizeA:
        raise ValueError("need sizeB <= sizeA")
    if alpha * lb < (s - alpha) * la:
        raise ValueError("need sizeB**alpha >= sizeA**(s - alpha)")
    C_target = floor_root_pow2(la * s / alpha)
    scale_exp = math.floor(la / alpha)
    kD = k - scale_exp
    if kD < 0:
        raise ValueError(f"need sizeA <= delta**-alpha = 2**{alpha * k}")
    w = abc_ratio_construction(sizeA, sizeB, C_target)
    # A = Delta A0 with A0 = {0..sizeA}/sizeA
    unit = 1 << (scale_exp - la)
    A = DyadicSet(np.arange(sizeA + 1, dtype=np.int64) * unit, k, 1)
    B = DyadicSet(np.array([int(b * sizeA) for b in w.B], dtype=np.int64) * unit, k, 1)
    sep = Fraction(1, C_target)
    C0, last = [], None
    for c in w.C:
        if last is None or c - last >= sep:
            C0.append(c)
            last = c
    kc = _snap(1, la / alpha)
    C0_cells = DyadicSet([(c.numerator << k) // c.denominator for c in C0], k, 1)
    theta = neighborhood(C0_cells, min(kc, k))
    P = _product(A, B)
    bound = la * (Fraction(1, 2) + s / (2 * alpha)) + Fraction(lb, 2)
    checks = [
        {"name": "A Katz-Tao (delta, alpha)", "kind": "katz_tao", "set": "A", "s": alpha, "cap": caps["katz_tao"]},
        {"name": "B Katz-Tao (delta, alpha)", "kind": "katz_tao", "set": "B", "s": alpha, "cap": caps["katz_tao"]},
        {"name": "C Frostman (delta, s)", "kind": "frostman", "set": "theta", "s": s, "cap": caps["frostman"]},
        {"name": "projection <= K |A|**(1/2 + s/(2 alpha)) |B|**(1/2)", "kind": "projection", "set": "P",
         "slopes": "theta", "bound_log2": bound, "cap": caps["projection"]},
    ]
    ex = SharpExample(
        construction="product_large_alpha",
        parameters={"delta": f"2**-{k}", "s": str(s), "alpha": str(alpha), "sizeA": str(sizeA),
                    "sizeB": str(sizeB)},
        sets={"A": A, "B": B, "P": P, "theta": theta},
        snapped_scales={"delta": k, "Delta": kD, "C_radius": kc},
        claimed_exponent=bound,
        checks=checks,
        notes={"C_target": C_target, "C0_size": len(C0), "abc_K": w.K},
    )
    ex.verify()
    return ex


CONSTRUCTIONS = {
    "standard": standard_sharp_example,
    "minimal_nonconc": minimal_nonconc_example,
    "katz_tao": katz_tao_sharp_example,
    "product_small_alpha": product_example_small_alpha,
    "product_large_alpha": product_example_large_alpha,
}
