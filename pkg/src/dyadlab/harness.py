"""Command-line orchestration: construct, measure, decompose, verify, sweep, selftest.

Scale parameters (``rho``, ``delta``) take a level ``8``, a power ``2**-8`` or
a fraction ``1/256``. Exit status is 0 on success, 1 when a cap or
certificate fails, 2 on a usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import re
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from .constructions import CONSTRUCTIONS, SharpExample, evaluate_check
from .dyadic import DyadicSet, read_set, write_set
from .multiscale import (
    DecompositionError,
    affine_majorant,
    branching_function,
    decompose,
    read_branching,
)
from .tubes import build_configuration, measure_incidences, projection_profile, read_tubes, write_tubes

__all__ = ["ExponentReport", "parse_value", "run_sweep", "main"]

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

_POW = re.compile(r"^2\*\*-?\(?-(\d+)\)?$|^2\*\*-(\d+)$")


class UsageError(Exception):
    pass


def parse_value(text: str):
    """``2**-8`` -> level 8, integers stay integers, anything else becomes a Fraction."""
    text = text.strip()
    m = _POW.match(text)
    if m:
        return int(m.group(1) or m.group(2))
    try:
        v = Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"cannot parse value {text!r}") from exc
    return int(v) if v.denominator == 1 else v


def _params(pairs) -> dict:
    out = {}
    for p in pairs or []:
        if "=" not in p:
            raise UsageError(f"parameter {p!r} is not key=value")
        k, v = p.split("=", 1)
        out[k.strip()] = parse_value(v)
    return out


def _caps(pairs) -> dict:
    caps = {k: Fraction(v) for k, v in _params(pairs).items()}
    if any(v <= 0 for v in caps.values()):
        raise UsageError("caps must be positive")
    return caps


def _build(name: str, params: dict, caps: dict) -> SharpExample:
    if name not in CONSTRUCTIONS:
        raise UsageError(f"unknown construction {name!r}; choose from {sorted(CONSTRUCTIONS)}")
    try:
        return CONSTRUCTIONS[name](**params, caps=caps)
    except TypeError as exc:
        raise UsageError(str(exc)) from exc


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True)


def _write_example(ex: SharpExample, out: Path) -> None:
    out.mkdir(parents=True, exist_ok=True)
    for name, S in ex.sets.items():
        with open(out / f"{name}.set", "w") as fh:
            write_set(S, fh)
    (out / "manifest.json").write_text(_dump(ex.manifest()) + "\n")


def _failures(claims) -> list:
    return [c for c in claims if not c.passed]


def cmd_construct(args) -> int:
    ex = _build(args.name, _params(args.param), _caps(args.cap))
    if args.out:
        _write_example(ex, Path(args.out))
    print(_dump(ex.manifest()))
    bad = _failures(ex.claims)
    for c in bad:
        print(f"FAILED {c.name}: measured {c.measured}, bound {c.bound}", file=sys.stderr)
    return EXIT_FAIL if bad else EXIT_OK


def cmd_verify(args) -> int:
    path = Path(args.manifest)
    man = json.loads(path.read_text())
    sets = {}
    for f in sorted(path.parent.glob("*.set")):
        with open(f) as fh:
            sets[f.stem] = read_set(fh)
    claims = []
    for check in man["checks"]:
        check = {k: (parse_value(v) if k in ("level",) else v) for k, v in check.items()}
        claims.append(evaluate_check(check, sets))
    stored = {c["name"]: c["passed"] for c in man.get("verified_caps", [])}
    report = []
    ok = True
    for c in claims:
        agrees = stored.get(c.name) == c.passed
        ok &= c.passed and agrees
        report.append({**c.to_json(), "matches_manifest": agrees})
    print(_dump({"construction": man["construction"], "claims": report, "passed": ok}))
    for r in report:
        if not (r["passed"] and r["matches_manifest"]):
            print(f"FAILED {r['name']}: measured {r['measured']}, bound {r['bound']}", file=sys.stderr)
    return EXIT_OK if ok else EXIT_FAIL


def _read_set_file(p) -> DyadicSet:
    with open(p) as fh:
        return read_set(fh)


def cmd_measure(args) -> int:
    P = _read_set_file(args.points)
    out: dict = {"n_points": len(P), "level": P.level}
    if args.tubes:
        with open(args.tubes) as fh:
            tubes = read_tubes(fh)
        stats = measure_incidences(P, tubes)
        stats["histogram"] = {str(k): v for k, v in stats["histogram"].items()}
        stats["ratio"] = None if stats["ratio"] is None else str(stats["ratio"])
        out["incidences"] = stats
    if args.slopes:
        theta = _read_set_file(args.slopes)
        prof = projection_profile(P, theta, args.level)
        i = int(np.argmax(prof))
        out["projection"] = {"max": int(prof[i]), "argmax_cell": int(theta.cells[i, 0]),
                             "min": int(prof.min()), "n_slopes": len(theta)}
        if args.configuration:
            cfg = build_configuration(P, theta, Fraction(args.s))
            out["configuration"] = cfg.to_json()
            if args.write_tubes:
                with open(args.write_tubes, "w") as fh:
                    write_tubes(cfg.tubes, cfg.level, fh)
    if not (args.tubes or args.slopes):
        raise UsageError("measure needs --tubes and/or --slopes")
    print(_dump(out))
    return EXIT_OK


def cmd_decompose(args) -> int:
    if args.branching:
        with open(args.branching) as fh:
            f = read_branching(fh)
    elif args.points:
        if args.T is None or args.m is None:
            raise UsageError("--points needs --T and --m")
        f = branching_function(_read_set_file(args.points), args.T, args.m)
    else:
        raise UsageError("decompose needs --branching or --points")
    xi = Fraction(args.xi)
    tau = None if args.tau is None else Fraction(args.tau)
    try:
        dec = decompose(f, Fraction(args.d), xi, tau)
    except DecompositionError as exc:
        print(_dump({**exc.best.to_json(), "failures": exc.best.failures}))
        return EXIT_FAIL
    F = affine_majorant(dec, f)
    doc = dec.to_json()
    doc["majorant_ok"] = F.ok
    print(_dump(doc))
    return EXIT_OK if dec.certified and F.ok else EXIT_FAIL


@dataclass
class ExponentReport:
    construction: str
    vary: str
    values: list
    sizes: list[int]
    measured: list[int]
    predicted: Fraction
    tolerance: float
    caps_ok: list[bool]
    slope: float = float("nan")
    intercept: float = float("nan")
    notes: dict = field(default_factory=dict)

    @property
    def gap(self) -> float:
        return abs(self.slope - float(self.predicted))

    @property
    def passed(self) -> bool:
        return self.gap <= self.tolerance and all(self.caps_ok)

    def to_json(self) -> dict:
        return {
            "construction": self.construction,
            "vary": self.vary,
            "rows": [
                {"value": str(v), "size": n, "max_projection": y, "caps_ok": ok}
                for v, n, y, ok in zip(self.values, self.sizes, self.measured, self.caps_ok)
            ],
            "slope": self.slope,
            "intercept": self.intercept,
            "predicted": str(self.predicted),
            "gap": self.gap,
            "tolerance": self.tolerance,
            "passed": self.passed,
        }

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["value", "size", "max_projection", "log2_size", "log2_max_projection", "caps_ok"])
        for v, n, y, ok in zip(self.values, self.sizes, self.measured, self.caps_ok):
            w.writerow([v, n, y, f"{math.log2(n):.6f}", f"{math.log2(y):.6f}", int(ok)])
        return buf.getvalue()


def run_sweep(name: str, fixed: dict, vary: str, values, predicted, tolerance=0.1, caps=None) -> ExponentReport:
    """Build the construction for each value, then fit ``log2 max projection`` against ``log2 |P|``."""
    sizes, measured, oks = [], [], []
    for v in values:
        ex = _build(name, {**fixed, vary: v}, caps or {})
        sizes.append(len(ex.P))
        measured.append(ex.max_projection()[0])
        oks.append(ex.ok)
    rep = ExponentReport(name, vary, list(values), sizes, measured, Fraction(predicted), float(tolerance), oks)
    x = np.log2(np.array(sizes, dtype=float))
    y = np.log2(np.array(measured, dtype=float))
    if len(set(sizes)) >= 2:
        rep.slope, rep.intercept = (float(c) for c in np.polyfit(x, y, 1))
    return rep


def cmd_sweep(args) -> int:
    if "=" not in args.vary:
        raise UsageError("--vary must be name=v1,v2,...")
    key, vals = args.vary.split("=", 1)
    values = [parse_value(v) for v in vals.split(",") if v.strip()]
    rep = run_sweep(args.name, _params(args.param), key.strip(), values, Fraction(args.predicted),
                    float(args.tolerance), _caps(args.cap))
    if args.csv:
        Path(args.csv).write_text(rep.to_csv())
    print(_dump(rep.to_json()))
    return EXIT_OK if rep.passed else EXIT_FAIL


def cmd_selftest(args) -> int:
    """Quick end-to-end checks on tiny instances."""
    from .constructions import dirichlet_approx, farey_fractions
    from .dyadic import covering_number
    from .multiscale import furstenberg_exponent

    rng = np.random.default_rng(args.seed)
    results = []

    def check(name, ok):
        results.append((name, bool(ok)))

    S = DyadicSet([0, 4, 8, 12], 4, 1)
    check("covering number", covering_number(S, Fraction(1, 4)) == 4)
    check("furstenberg exponent", furstenberg_exponent(Fraction(1, 2), 1) == Fraction(3, 4))
    check("farey order 3", len(farey_fractions(3)) == 5)
    ex = CONSTRUCTIONS["standard"](6, Fraction(1, 2), 1)
    check("standard example caps", ex.ok)
    for _ in range(20):
        n = int(rng.integers(1, 30))
        divs = [d for d in range(1, n + 1) if n % d == 0]
        m = int(rng.choice(divs))
        x = Fraction(int(rng.integers(0, 1000)), 999)
        a, b = dirichlet_approx(m, n, x)
        check("dirichlet", abs(x - Fraction(a, b)) <= Fraction(m, abs(b) * n))
    vals = [Fraction(0)]
    for _ in range(30):
        vals.append(vals[-1] + Fraction(int(rng.integers(0, 9)), 4))
    check("decomposition", decompose(vals, 2, Fraction(1, 10)).certified)
    ok = all(r for _, r in results)
    print(_dump({"checks": [{"name": n, "passed": r} for n, r in results], "passed": ok}))
    return EXIT_OK if ok else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="dyadlab", description=__doc__.splitlines()[0])
    ap.add_argument("--config", help="JSON file whose keys provide defaults for the subcommand's flags")
    sub = ap.add_subparsers(dest="command", required=True)

    c = sub.add_parser("construct", help="build a sharpness example and write set files plus a manifest")
    c.add_argument("--name", required=False, help=f"one of {sorted(CONSTRUCTIONS)}")
    c.add_argument("--param", action="append", help="key=value construction parameter")
    c.add_argument("--cap", action="append", help="kind=value cap override")
    c.add_argument("--out", help="output directory")
    c.set_defaults(func=cmd_construct)

    m = sub.add_parser("measure", help="incidence and projection statistics")
    m.add_argument("--points", required=False, help="2-D set file")
    m.add_argument("--tubes", help="tube file")
    m.add_argument("--slopes", help="1-D slope set file")
    m.add_argument("--level", type=int, help="coarser level for projection counts")
    m.add_argument("--configuration", action="store_true", help="also assemble the nice configuration")
    m.add_argument("--s", default="1/2", help="Frostman exponent of the slope set")
    m.add_argument("--write-tubes", help="write the configuration's tubes here")
    m.set_defaults(func=cmd_measure)

    d = sub.add_parser("decompose", help="certified superlinear decomposition")
    d.add_argument("--branching", help="branching-function file")
    d.add_argument("--points", help="set file to take the branching function of")
    d.add_argument("--T", type=int)
    d.add_argument("--m", type=int)
    d.add_argument("--xi", default="1/10")
    d.add_argument("--tau")
    d.add_argument("--d", default="2")
    d.set_defaults(func=cmd_decompose)

    v = sub.add_parser("verify", help="re-check every claim stored in a manifest")
    v.add_argument("--manifest", required=False)
    v.set_defaults(func=cmd_verify)

    w = sub.add_parser("sweep", help="log-log exponent fit across a parameter list")
    w.add_argument("--name", required=False)
    w.add_argument("--param", action="append")
    w.add_argument("--vary", required=False, help="name=v1,v2,...")
    w.add_argument("--predicted", default="3/4")
    w.add_argument("--tolerance", default="0.1")
    w.add_argument("--cap", action="append")
    w.add_argument("--csv", help="write a plot-ready CSV here")
    w.set_defaults(func=cmd_sweep)

    t = sub.add_parser("selftest", help="tiny end-to-end checks")
    t.add_argument("--seed", type=int, default=0)
    t.set_defaults(func=cmd_selftest)
    return ap


_REQUIRED = {"construct": ["name"], "verify": ["manifest"], "sweep": ["name", "vary"], "measure": ["points"]}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if args.config:
            cfg = json.loads(Path(args.config).read_text())
            for key, val in cfg.items():
                key = key.replace("-", "_")
                if getattr(args, key, None) in (None, [], False):
                    setattr(args, key, val)
        missing = [k for k in _REQUIRED.get(args.command, []) if not getattr(args, k, None)]
        if missing:
            raise UsageError(f"missing required option(s): {', '.join('--' + k for k in missing)}")
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
