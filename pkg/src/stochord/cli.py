"""Command-line front end.

Every command takes a scenario: either a JSON file following ``SCENARIO_SCHEMA``
or the name of a built-in fixture (CE31, CE32, CE33, EX34, EX52).

Exit codes: 0 success, 1 check or verdict failure, 2 input error.
"""

from __future__ import annotations

import argparse
import io
import json
import math
import sys
import time
import warnings
from pathlib import Path
from typing import Optional

import jsonschema
import numpy as np

from ._grid import GridSpec
from .baseline import HAZARD_CONDITIONS, make_baseline, make_psi
from .majorization import RELATIONS, ParamMatrix, TTransform, in_class, matrix_in_class
from .portfolio import Portfolio, ks_distance, max_cdf, max_rhr, sample_max
from .theorems import (COUNTEREXAMPLES, FIXTURE_IDS, THEOREM_IDS, Scenario, ScenarioShapeError,
                       fixture, get_theorem, run_counterexample, sweep, thread_count,
                       verify_scenario)
from .theorems.scenario import condition

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2
CSV_HEADER = ("t", "F_u", "F_v", "diff", "rhr_u", "rhr_v")
KS_TOL = 0.005

# ------------------------------------------------------------------ schema

_NUMBER_LIST = {"type": "array", "items": {"type": "number"}, "minItems": 1}
_VECTOR_NAME = {"type": "string",
                "pattern": r"^[uv]\.(alpha|lambda|theta|inv_theta|p|psi_p)$"}


def _params(props, required=None):
    return {"type": "object", "properties": props, "required": list(required or props),
            "additionalProperties": False}


def _family(name, params):
    return {"if": {"properties": {"family": {"const": name}}},
            "then": {"properties": {"params": params}}}


_NUM = {"type": "number"}

_BASELINE = {
    "type": "object",
    "properties": {
        "family": {"enum": ["GLFR", "MOEQL", "BurrPower", "LomaxPower", "Custom"]},
        "params": {"type": "object"},
    },
    "required": ["family", "params"],
    "additionalProperties": False,
    "allOf": [
        _family("GLFR", _params({"a": _NUM, "b": _NUM, "d": _NUM})),
        _family("MOEQL", _params({"a": _NUM, "b": _NUM, "d": _NUM,
                                  "printed_form": {"type": "boolean"}}, ["a", "b", "d"])),
        _family("BurrPower", _params({"c": _NUM, "k": _NUM})),
        _family("LomaxPower", _params({"c": _NUM, "k": _NUM})),
        _family("Custom", _params({"name": {"const": "exp-mixture"},
                                   "weights": _NUMBER_LIST, "rates": _NUMBER_LIST})),
    ],
}

_PSI = {
    "type": "object",
    "properties": {
        "family": {"enum": ["Power", "Exp", "NegExp", "NegLog", "OneMinusPower"]},
        "params": {"type": "object"},
    },
    "required": ["family"],
    "additionalProperties": False,
    "allOf": [
        _family("Power", _params({"k": _NUM})),
        _family("Exp", _params({"c": _NUM})),
        _family("NegExp", _params({})),
        _family("NegLog", _params({})),
        _family("OneMinusPower", _params({"k": _NUM})),
    ],
}

_PORTFOLIO = _params({"alpha": _NUMBER_LIST, "lambda": _NUMBER_LIST,
                      "theta": _NUMBER_LIST, "p": _NUMBER_LIST})

_CHECK = {
    "oneOf": [
        {"enum": [f"C{i}" for i in range(1, 11)]},
        _params({"relation": {"enum": sorted(RELATIONS)}, "x": _VECTOR_NAME, "y": _VECTOR_NAME}),
        _params({"matrix": {"type": "array", "items": _VECTOR_NAME, "minItems": 2, "maxItems": 2},
                 "class": {"enum": ["Mn", "Qn"]}}),
        _params({"vector": _VECTOR_NAME, "class": {"enum": ["Dplus", "Eplus"]}}),
    ]
}

SCENARIO_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "stochord scenario",
    "type": "object",
    "properties": {
        "id": {"type": "string"},
        "theorem": {"type": "string"},
        "k": {"type": "integer", "minimum": 1},
        "baseline": _BASELINE,
        "psi": _PSI,
        "portfolio_u": _PORTFOLIO,
        "portfolio_v": _PORTFOLIO,
        "transforms": {"type": "array", "items": _params(
            {"w": {"type": "number", "minimum": 0, "maximum": 1},
             "i": {"type": "integer", "minimum": 0}, "j": {"type": "integer", "minimum": 0}})},
        "grid": _params({"t_min": _NUM, "t_max": _NUM, "points": {"type": "integer", "minimum": 2},
                         "spacing": {"enum": ["linear", "log"]}}, ["t_min", "t_max"]),
        "checks": {"type": "array", "items": _CHECK},
    },
    "required": ["baseline", "portfolio_u", "portfolio_v"],
    "additionalProperties": False,
}


class InputError(Exception):
    """Malformed scenario input; the message carries a line or field locator."""


def _path_text(path) -> str:
    out = ""
    for part in path:
        out += f"[{part}]" if isinstance(part, int) else (f".{part}" if out else str(part))
    return out or "<root>"


def _line_of(text: str, path) -> Optional[int]:
    """Best-effort line of the deepest named key on ``path``."""
    keys = [p for p in path if isinstance(p, str)]
    if not keys:
        return None
    pos = 0
    for key in keys:
        found = text.find(f'"{key}"', pos)
        if found < 0:
            break
        pos = found
    return text.count("\n", 0, pos) + 1 if pos else None


def validate_document(doc, text: str = "") -> None:
    validator = jsonschema.Draft202012Validator(SCENARIO_SCHEMA)
    errors = sorted(validator.iter_errors(doc), key=lambda e: (len(e.absolute_path), e.message))
    if not errors:
        return
    err = max(errors, key=lambda e: len(e.absolute_path))
    if err.context:
        err = max(err.context, key=lambda e: len(e.absolute_path))
    where = _path_text(err.absolute_path)
    line = _line_of(text, err.absolute_path)
    loc = f"field {where}" + (f" (line {line})" if line else "")
    raise InputError(f"{loc}: {err.message}")


# ------------------------------------------------------- dict conversions

def _portfolio_dict(pf: Portfolio) -> dict:
    return {"alpha": pf.alpha.tolist(), "lambda": pf.lam.tolist(),
            "theta": pf.theta.tolist(), "p": pf.p.tolist()}


def scenario_to_dict(s: Scenario, checks=None) -> dict:
    """JSON-ready document that ``scenario_from_dict`` maps back to ``s``."""
    base = s.baseline
    params = dict(base.params)
    if getattr(base, "printed_form", True) is False:
        params["printed_form"] = False
    doc = {"id": s.id, "theorem": s.theorem,
           "baseline": {"family": base.family.value, "params": params}}
    if s.psi is not None:
        doc["psi"] = {"family": s.psi.family.value, "params": s.psi.params}
    doc["portfolio_u"] = _portfolio_dict(s.portfolio_u)
    doc["portfolio_v"] = _portfolio_dict(s.portfolio_v)
    if s.k is not None:
        doc["k"] = s.k
    if s.transforms:
        doc["transforms"] = [{"w": t.w, "i": t.i, "j": t.j} for t in s.transforms]
    if s.grid is not None:
        g = s.grid
        doc["grid"] = {"t_min": g.t_min, "t_max": g.t_max, "points": g.points,
                       "spacing": g.spacing.value}
    if checks:
        doc["checks"] = list(checks)
    return doc


def _build(section: str, fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except (TypeError, ValueError, KeyError) as exc:
        raise InputError(f"field {section}: {exc}") from None


def scenario_from_dict(doc: dict, text: str = "") -> Scenario:
    """Validate ``doc`` against the strict schema and build the Scenario."""
    validate_document(doc, text)
    b = doc["baseline"]
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", UserWarning)
        baseline = _build("baseline", make_baseline, b["family"], b["params"])
    psi = None
    if "psi" in doc:
        psi = _build("psi", make_psi, doc["psi"]["family"], doc["psi"].get("params"))
    pfs = []
    for side in ("portfolio_u", "portfolio_v"):
        d = doc[side]
        pfs.append(_build(side, Portfolio, baseline, d["alpha"], d["lambda"], d["theta"], d["p"]))
    n = pfs[0].n
    transforms = tuple(_build(f"transforms[{m}]", TTransform, t["w"], t["i"], t["j"], n)
                       for m, t in enumerate(doc.get("transforms", ())))
    grid = None
    if "grid" in doc:
        g = doc["grid"]
        grid = _build("grid", GridSpec, g["t_min"], g["t_max"], g.get("points", 2000),
                      g.get("spacing", "log"))
    theorem = doc.get("theorem", "")
    if theorem:
        _build("theorem", get_theorem, theorem)
    return _build("portfolio_v", Scenario, doc.get("id", "scenario"), theorem, baseline,
                  pfs[0], pfs[1], psi, transforms, grid, doc.get("k"))


def load_document(source: str) -> tuple[dict, str]:
    """Read a scenario document from a path or a built-in fixture name."""
    path = Path(source)
    if not path.exists() and source in FIXTURE_IDS:
        doc = scenario_to_dict(fixture(source))
        return doc, json.dumps(doc, indent=2)
    try:
        text = path.read_text()
    except OSError as exc:
        raise InputError(f"cannot read {source}: {exc.strerror or exc}") from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    return doc, text


def load_scenario(source: str) -> tuple[Scenario, list]:
    if not Path(source).exists() and source in FIXTURE_IDS:
        return fixture(source), []
    doc, text = load_document(source)
    s = scenario_from_dict(doc, text)
    return s, list(doc.get("checks", ()))


# ------------------------------------------------------------------ output

def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def write_csv(stream, columns) -> None:
    """Header plus one row per abscissa, 17 significant digits, '\\n' endings."""
    stream.write(",".join(CSV_HEADER) + "\n")
    for row in zip(*columns):
        stream.write(",".join(_fmt(v) for v in row) + "\n")


def _emit(out: Optional[str], columns) -> None:
    if out in (None, "-"):
        write_csv(sys.stdout, columns)
        return
    buf = io.StringIO()
    write_csv(buf, columns)
    with open(out, "w", newline="") as fh:
        fh.write(buf.getvalue())


def _rhr_or_nan(pf: Portfolio, t: np.ndarray) -> np.ndarray:
    out = np.full(t.shape, np.nan)
    inside = t > pf.lam.max()
    if np.any(inside):
        with np.errstate(all="ignore"):
            out[inside] = max_rhr(pf, t[inside])
    return out


def curve_columns(s: Scenario, t: Optional[np.ndarray] = None):
    t = s.evaluation_grid() if t is None else np.asarray(t, dtype=float)
    fu, fv = max_cdf(s.portfolio_u, t), max_cdf(s.portfolio_v, t)
    return t, fu, fv, fu - fv, _rhr_or_nan(s.portfolio_u, t), _rhr_or_nan(s.portfolio_v, t)


def _info(args, text: str) -> None:
    # summaries go to stderr when the CSV occupies stdout
    stream = sys.stderr if getattr(args, "out", None) in (None, "-") else sys.stdout
    print(text, file=stream)


# ---------------------------------------------------------------- commands

def cmd_check_conditions(args) -> int:
    s, checks = load_scenario(args.scenario)
    wanted = [c for c in checks if isinstance(c, str)]
    if not wanted:
        wanted = list(HAZARD_CONDITIONS) + (["C9", "C10"] if s.psi is not None else [])
    lo, hi = s.argument_window()
    print(f"conditions for {s.id} on baseline arguments [{lo:.6g}, {hi:.6g}]")
    ok = True
    for c in wanted:
        if c in ("C9", "C10") and s.psi is None:
            raise InputError(f"field checks: {c} needs a psi section")
        res = condition(c)(s)
        ok &= res.passed
        detail = f"  {res.detail}" if res.detail else ""
        print(f"  {c:<4} {'satisfied' if res.passed else 'violated':<10}{detail}")
    return EXIT_OK if ok else EXIT_FAIL


def _vector(s: Scenario, name: str) -> np.ndarray:
    try:
        return s.vector(name)
    except ScenarioShapeError as exc:
        raise InputError(f"field checks: {name}: {exc}") from None


def _default_relations(s: Scenario):
    keys = ["alpha", "lambda", "theta", "inv_theta", "p"] + (["psi_p"] if s.psi else [])
    for key in keys:
        for name in sorted(RELATIONS):
            yield {"relation": name, "x": f"v.{key}", "y": f"u.{key}"}
            yield {"relation": name, "x": f"u.{key}", "y": f"v.{key}"}


def cmd_check_major(args) -> int:
    s, checks = load_scenario(args.scenario)
    requested = [c for c in checks if isinstance(c, dict)]
    rows = requested or list(_default_relations(s))
    print(f"{'check':<44} result")
    ok = True
    for c in rows:
        if "relation" in c:
            x, y = _vector(s, c["x"]), _vector(s, c["y"])
            try:
                value = RELATIONS[c["relation"]](x, y)
            except ValueError as exc:
                value, note = False, f" ({exc})"
            else:
                note = ""
            label = f"{c['relation']}({c['x']}, {c['y']})"
        elif "matrix" in c:
            rows_ = [_vector(s, r) for r in c["matrix"]]
            value, note = matrix_in_class(ParamMatrix.from_rows(*rows_), c["class"]), ""
            label = f"[{', '.join(c['matrix'])}] in {c['class']}"
        else:
            value, note = in_class(_vector(s, c["vector"]), c["class"]), ""
            label = f"{c['vector']} in {c['class']}"
        ok &= bool(value)
        print(f"{label:<44} {'true' if value else 'false'}{note}")
    if not requested:
        return EXIT_OK
    return EXIT_OK if ok else EXIT_FAIL


def cmd_eval(args) -> int:
    s, _ = load_scenario(args.scenario)
    _emit(args.out, curve_columns(s))
    return EXIT_OK


def cmd_verify_theorem(args) -> int:
    s, _ = load_scenario(args.scenario)
    tid = args.theorem or s.theorem
    if not tid:
        raise InputError("field theorem: give --theorem or a 'theorem' key in the scenario")
    try:
        get_theorem(tid)
        report = verify_scenario(s, tid)
    except KeyError as exc:
        raise InputError(f"field theorem: {exc.args[0]}") from None
    except ScenarioShapeError as exc:
        raise InputError(f"scenario shape: {exc}") from None
    if args.json:
        print(json.dumps(report.to_dict(), indent=2))
    else:
        print("\n".join(report.lines()))
    return EXIT_OK if report.consistent else EXIT_FAIL


def cmd_counterexample(args) -> int:
    t0 = time.perf_counter()
    res = run_counterexample(args.id)
    _emit(args.out, (res.t, res.F_u, res.F_v, res.difference, res.rhr_u, res.rhr_v))
    kind = "rhr_u - rhr_v" if args.id == "CE33" else "F_u - F_v"
    lines = [f"{args.id}: diff column is {kind}; applicable={res.report.applicable}, "
             f"consistent={res.report.consistent}"]
    for c in res.signs:
        lines.append(f"  diff({c.t:g}) = {c.value:.10e}  expected {'+' if c.expected > 0 else '-'}"
                     f"  {'ok' if c.ok else 'MISMATCH'}")
    lines.append(f"  {time.perf_counter() - t0:.3f}s")
    _info(args, "\n".join(lines))
    return EXIT_OK if res.signs_ok else EXIT_FAIL


def cmd_simulate(args) -> int:
    s, _ = load_scenario(args.scenario)
    if args.samples < 1:
        raise InputError("--samples must be positive")
    tol = args.tol if args.tol is not None else max(KS_TOL, 1.95 / math.sqrt(args.samples))
    sides = {"u": [s.portfolio_u], "v": [s.portfolio_v], "both": [s.portfolio_u, s.portfolio_v]}
    ok = True
    for name, pf in zip(("u", "v") if args.portfolio == "both" else (args.portfolio,),
                        sides[args.portfolio]):
        seed = args.seed if name == "u" else args.seed + 1
        d = ks_distance(pf, sample_max(pf, seed, args.samples))
        ok &= d <= tol
        print(f"portfolio_{name}: KS distance {d:.6g} over {args.samples} samples "
              f"(seed {seed}, tolerance {tol:.4g}) {'ok' if d <= tol else 'EXCEEDED'}")
    return EXIT_OK if ok else EXIT_FAIL


def cmd_sweep_theorem(args) -> int:
    try:
        get_theorem(args.theorem)
    except KeyError as exc:
        raise InputError(f"theorem: {exc.args[0]}") from None
    if args.seeds < 1:
        raise InputError("--seeds must be positive")
    res = sweep(args.theorem, args.seeds, args.start, args.workers or thread_count())
    print(res.summary())
    if res.inconsistent:
        print("inconsistent seeds: " + " ".join(map(str, res.inconsistent)))
    if res.hierarchy_violations:
        print("rh-without-st seeds: " + " ".join(map(str, res.hierarchy_violations)))
    return EXIT_OK if res.ok else EXIT_FAIL


def cmd_list(args) -> int:
    for tid in THEOREM_IDS:
        spec = get_theorem(tid)
        alias = f" (variant of {spec.alias_of})" if spec.alias_of else ""
        print(f"{tid:<28} {spec.conclusion:<12} {spec.description}{alias}")
    print("fixtures: " + " ".join(FIXTURE_IDS))
    return EXIT_OK


def cmd_export(args) -> int:
    doc = scenario_to_dict(fixture(args.id))
    text = json.dumps(doc, indent=2) + "\n"
    if args.out in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(args.out).write_text(text)
    return EXIT_OK


# ------------------------------------------------------------------ parser

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="stochord",
        description="Order comparisons of largest claims from two heterogeneous portfolios.")
    sub = parser.add_subparsers(dest="command", required=True)

    def scenario_cmd(name, fn, help_text):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("scenario", help="scenario JSON file or fixture name (" +
                       ", ".join(FIXTURE_IDS) + ")")
        p.set_defaults(func=fn)
        return p

    scenario_cmd("check-conditions", cmd_check_conditions,
                 "check C1-C10 on the scenario's baseline and psi")
    scenario_cmd("check-major", cmd_check_major, "print a table of majorization relations")
    p = scenario_cmd("eval", cmd_eval, "write t,F_u,F_v,diff,rhr_u,rhr_v over the grid")
    p.add_argument("--out", help="CSV path (default stdout)")
    p = scenario_cmd("verify-theorem", cmd_verify_theorem,
                     "check a theorem's hypotheses and its conclusion")
    p.add_argument("--theorem", help="theorem id (default: the scenario's own)")
    p.add_argument("--json", action="store_true", help="print the report as JSON")
    p = scenario_cmd("simulate", cmd_simulate, "Monte Carlo KS check of the largest-claim CDF")
    p.add_argument("--samples", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--portfolio", choices=("u", "v", "both"), default="both")
    p.add_argument("--tol", type=float, default=None,
                   help="KS tolerance (default max(0.005, 1.95/sqrt(samples)))")

    p = sub.add_parser("counterexample", help="curve data for a built-in counterexample")
    p.add_argument("id", choices=COUNTEREXAMPLES)
    p.add_argument("--out", help="CSV path (default stdout)")
    p.set_defaults(func=cmd_counterexample)

    p = sub.add_parser("sweep-theorem", help="verify generated scenarios for one theorem")
    p.add_argument("theorem")
    p.add_argument("--seeds", type=int, default=100)
    p.add_argument("--start", type=int, default=0)
    p.add_argument("--workers", type=int, default=None,
                   help="worker processes (default STOCHORD_THREADS or 1)")
    p.set_defaults(func=cmd_sweep_theorem)

    p = sub.add_parser("list", help="list theorem ids and fixtures")
    p.set_defaults(func=cmd_list)

    p = sub.add_parser("export-fixture", help="write a built-in fixture as scenario JSON")
    p.add_argument("id", choices=FIXTURE_IDS)
    p.add_argument("--out", help="JSON path (default stdout)")
    p.set_defaults(func=cmd_export)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_INPUT
    try:
        return args.func(args)
    except InputError as exc:
        print(f"stochord: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
