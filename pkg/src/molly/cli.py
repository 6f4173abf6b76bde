"""Command-line front end: `molly run` evaluates a scenario file, `molly verify` runs fixture suites."""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Mapping

from . import __version__
from . import np as npm
from .corpus import (
    monotone_instances,
    negative_instances,
    random_series,
    rng_for,
    twist_instances,
)
from .errors import ComputationError, DivisorObstruction, MollyError, ValidationError
from .ffield import AdditivePolynomial, check_prime, ext_build
from .lrr import LRR, branch_algebraicity_check, extend_recurrence, extract_rlrr, telescope_identity
from .mollify import NegativeCertificate, divisor_chain_mollify, mollify_minimal, mollify_monomial
from .perfring import PuiseuxPoly
from .polygon import POS_INF, Polygon, complete_valuation_polygon, npinf_polygon, num
from .series import FiberSeries, as_twist, full_section, lambda_decompose
from .valuation import INF, ToricValuation, val, value_window

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_VALIDATION = 2
EXIT_COMPUTATION = 3

POLYGON_OPS = {"npinf_polygon", "complete_valuation_polygon"}


# --- scenario ---

def _rational(x, what: str) -> Fraction:
    if isinstance(x, bool) or not isinstance(x, (int, str)):
        raise ValidationError(f"{what} must be an integer or an 'a/b' string, got {x!r}")
    try:
        return Fraction(x)
    except (ValueError, ZeroDivisionError) as exc:
        raise ValidationError(f"{what}: cannot parse {x!r}") from exc


def _names(data: Mapping, key: str) -> list[str]:
    names = data.get(key, [])
    if not isinstance(names, list) or not all(isinstance(n, str) for n in names):
        raise ValidationError(f"'{key}' must be a list of names")
    if len(set(names)) != len(names):
        raise ValidationError(f"'{key}' contains duplicate names")
    return names


@dataclass
class Scenario:
    id: str
    p: int
    base_vars: list
    fiber_vars: list
    bound: int
    series: FiberSeries | None
    valuations: dict
    tasks: list
    expect: dict = field(default_factory=dict)

    @property
    def e(self) -> int:
        return len(self.base_vars)

    @property
    def d(self) -> int:
        return len(self.fiber_vars)

    @classmethod
    def from_json(cls, data) -> "Scenario":
        if not isinstance(data, Mapping):
            raise ValidationError("scenario must be a JSON object")
        p = check_prime(data.get("p"))
        base, fiber = _names(data, "base_vars"), _names(data, "fiber_vars")
        bound = data.get("bound", 0)
        if isinstance(bound, bool) or not isinstance(bound, int) or bound < 0:
            raise ValidationError("'bound' must be a nonnegative integer")
        series = None
        if data.get("series") is not None:
            series = FiberSeries.from_json(data["series"], p, len(base), len(fiber), bound)
        vals = data.get("valuations", {})
        if not isinstance(vals, Mapping):
            raise ValidationError("'valuations' must map names to weight vectors")
        valuations = {}
        for name, w in vals.items():
            if not isinstance(w, list) or len(w) != len(base):
                raise ValidationError(f"valuation {name!r} needs {len(base)} weights")
            valuations[name] = ToricValuation([_rational(x, f"weight of {name}") for x in w])
        tasks = data.get("tasks", [])
        if not isinstance(tasks, list) or not all(isinstance(t, Mapping) and isinstance(t.get("op"), str) for t in tasks):
            raise ValidationError("'tasks' must be a list of objects with an 'op'")
        for i, t in enumerate(tasks):
            if t["op"] not in OPS:
                raise ValidationError(f"task {i}: unknown op {t['op']!r}")
            ref = t.get("valuation")
            if ref is not None and ref not in valuations:
                raise ValidationError(f"task {i}: unknown valuation {ref!r}")
        expect = data.get("expect", {})
        if not isinstance(expect, Mapping):
            raise ValidationError("'expect' must be an object")
        sid = data.get("id", "scenario")
        if not isinstance(sid, str):
            raise ValidationError("'id' must be a string")
        return cls(sid, p, base, fiber, bound, series, valuations, [dict(t) for t in tasks], dict(expect))

    def to_json(self) -> dict:
        out = {
            "id": self.id,
            "p": self.p,
            "base_vars": list(self.base_vars),
            "fiber_vars": list(self.fiber_vars),
            "bound": self.bound,
            "series": self.series.to_json() if self.series is not None else None,
            "valuations": {k: v.to_json() for k, v in sorted(self.valuations.items())},
            "tasks": self.tasks,
        }
        if self.expect:
            out["expect"] = self.expect
        return out


def load_scenario(path) -> Scenario:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ValidationError(f"cannot read scenario: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"invalid JSON: {exc}") from exc
    return Scenario.from_json(data)


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


# --- tasks ---

@dataclass(frozen=True)
class Options:
    strict: bool = False
    seed: int = 0


def _need_series(sc: Scenario) -> FiberSeries:
    if sc.series is None:
        raise ValidationError("this task needs a 'series'")
    return sc.series


def _valuation(sc: Scenario, task: Mapping) -> ToricValuation:
    name = task.get("valuation")
    if name is None:
        if len(sc.valuations) != 1:
            raise ValidationError("task must name a 'valuation'")
        name = next(iter(sc.valuations))
    return sc.valuations[name]


def _with_floats(d: dict, keys) -> dict:
    for k in keys:
        d[k + "_float"] = float(Fraction(d[k]))
    return d


def _report_json(rep) -> dict:
    if isinstance(rep, NegativeCertificate):
        return {"case": "NegativeCertificate", "certificate": rep.to_json(), "bound": num(rep.bound)}
    return _with_floats(rep.to_json(), ("initial_np", "final_np", "npinf"))


def _op_np(sc, task, opt):
    return {"value": num(npm.np(_need_series(sc), _valuation(sc, task)))}


def _op_npinf(sc, task, opt):
    h, v = _need_series(sc), _valuation(sc, task)
    branches = [
        {"n": list(n), "value": num(x)}
        for n, x in npm.branch_values(h, v).items()
    ]
    return {"value": num(npm.npinf(h, v)), "branches": branches}


def _op_weak(sc, task, opt):
    h, v = _need_series(sc), _valuation(sc, task)
    return {"weakly_admissible": npm.is_weakly_admissible(h, v), "np": num(npm.np(h, v)), "npinf": num(npm.npinf(h, v))}


def _op_symbol(sc, task, opt):
    sym = npm.symbol(_need_series(sc), _valuation(sc, task))
    return {
        "level": num(sym.level),
        "separable": npm.is_separable_symbol(sym),
        "terms": [{"index": list(k), "coeff": sym.terms[k].to_json()} for k in sym.support()],
    }


def _op_mollify(sc, task, opt):
    return _report_json(mollify_minimal(_need_series(sc), _valuation(sc, task)))


def _op_mollify_monomial(sc, task, opt):
    return _report_json(mollify_monomial(_need_series(sc), _valuation(sc, task)))


def _op_divisor_chain(sc, task, opt):
    order = task.get("order")
    if order is not None and (not isinstance(order, list) or not all(isinstance(i, int) for i in order)):
        raise ValidationError("'order' must be a list of coordinate positions")
    return divisor_chain_mollify(_need_series(sc), order).to_json()


def _op_twist(sc, task, opt):
    h = _need_series(sc)
    g = FiberSeries.from_json(task.get("g"), sc.p, sc.e, sc.d, int(task.get("bound", sc.bound)))
    out = as_twist(h, g, strict=opt.strict)
    res = {"series": out.to_json()}
    if sc.valuations:
        v = _valuation(sc, task)
        res.update(np=num(npm.np(out, v)), npinf=num(npm.npinf(out, v)))
    return res


def _interval(task) -> tuple:
    lo, hi = task.get("interval", ["0", "inf"])
    return _rational(lo, "interval start"), POS_INF if hi == "inf" else _rational(hi, "interval end")


def _op_npinf_polygon(sc, task, opt):
    U0 = [_rational(x, "U0") for x in task.get("U0", [])]
    direction = [_rational(x, "direction") for x in task.get("direction", [])]
    return {"polygon": npinf_polygon(_need_series(sc), U0, direction, _interval(task)).to_json()}


def _op_cvp(sc, task, opt):
    vals = [INF if x == "inf" else _rational(x, "value") for x in task.get("values", [])]
    return {"polygon": complete_valuation_polygon(vals).to_json()}


def _op_value_window(sc, task, opt):
    v = _valuation(sc, task)
    pi = _need_series(sc).pi if "pi" not in task else PuiseuxPoly.from_json(task["pi"], sc.p, sc.e)
    if "generators" in task:
        gens = [PuiseuxPoly.from_json(g, sc.p, sc.e) for g in task["generators"]]
    else:
        gens = [PuiseuxPoly.var(sc.p, sc.e, i) for i in range(sc.e)]
    depth = task.get("depth", 0)
    if isinstance(depth, bool) or not isinstance(depth, int):
        raise ValidationError("'depth' must be an integer")
    return {"values": [num(x) for x in value_window(v, pi, gens, depth)]}


def _op_lambda(sc, task, opt):
    h = _need_series(sc)
    out = []
    for b in lambda_decompose(h):
        entry = {"n": list(b.n), "length": len(b), "section": full_section(h, b.n).to_json()}
        if sc.valuations:
            x = val(_valuation(sc, task), full_section(h, b.n))
            entry["value"] = num(x)
        out.append(entry)
    return {"branches": out}


def _op_branch_check(sc, task, opt):
    h = _need_series(sc)
    checks = [{"n": list(b.n), "ok": branch_algebraicity_check(h, b.n)} for b in lambda_decompose(h)]
    return {"branches": checks, "ok": all(c["ok"] for c in checks)}


def _check_twist(seed, count):
    bad = []
    for i, (h, g, v) in enumerate(twist_instances(seed, count)):
        t = as_twist(h, g, strict=True)
        if not (npm.npinf(t, v) == npm.npinf(h, v) and npm.np(h, v) <= npm.npinf(h, v) <= 0):
            bad.append(i)
    return bad


def _check_separability(seed, count):
    bad = []
    for i, (h, v) in enumerate(negative_instances(seed, count)):
        if npm.is_separable_symbol(npm.symbol(h, v)) != npm.is_weakly_admissible(h, v):
            bad.append(i)
    return bad


def _check_mollify(seed, count):
    bad = []
    for i, (h, v) in enumerate(negative_instances(seed, count, integral=True)):
        rep = mollify_minimal(h, v)
        tr = list(rep.trace)
        ok = all(a < b for a, b in zip(tr, tr[1:])) and rep.final_np == npm.npinf(h, v)
        ok = ok and mollify_minimal(rep.series, v).steps == 0
        if not ok:
            bad.append(i)
    return bad


def _check_monotone(seed, count):
    return [i for i, (h, v, w, _) in enumerate(monotone_instances(seed, count)) if npm.npinf(h, w) < npm.npinf(h, v)]


def _check_branches(seed, count):
    rng = rng_for(seed, "branches")
    bad = []
    for i in range(count):
        p = rng.choice((2, 3, 5))
        h = random_series(rng, p, rng.randint(1, 3), rng.randint(1, 2), rng.randint(p, 18))
        if not all(branch_algebraicity_check(h, b.n) for b in lambda_decompose(h)):
            bad.append(i)
    return bad


PROPERTIES = {
    "twist_invariance": _check_twist,
    "separability": _check_separability,
    "mollify_contract": _check_mollify,
    "monotonicity": _check_monotone,
    "branch_identity": _check_branches,
}


def _op_random_check(sc, task, opt):
    prop = task.get("property")
    if prop not in PROPERTIES:
        raise ValidationError(f"unknown property {prop!r}; choose from {sorted(PROPERTIES)}")
    count = task.get("count", 50)
    if isinstance(count, bool) or not isinstance(count, int) or count < 0:
        raise ValidationError("'count' must be a nonnegative integer")
    bad = PROPERTIES[prop](opt.seed, count)
    return {"property": prop, "count": count, "seed": opt.seed, "passed": count - len(bad), "failures": bad}


OPS = {
    "np": _op_np,
    "npinf": _op_npinf,
    "weakly_admissible": _op_weak,
    "symbol": _op_symbol,
    "mollify": _op_mollify,
    "mollify_monomial": _op_mollify_monomial,
    "divisor_chain": _op_divisor_chain,
    "twist": _op_twist,
    "npinf_polygon": _op_npinf_polygon,
    "complete_valuation_polygon": _op_cvp,
    "value_window": _op_value_window,
    "lambda_decompose": _op_lambda,
    "branch_check": _op_branch_check,
    "random_check": _op_random_check,
}


def _error(exc: Exception) -> tuple[int, dict]:
    err = {"type": type(exc).__name__, "message": str(exc)}
    if isinstance(exc, DivisorObstruction):
        err["index"] = exc.index
        err["certificate"] = exc.certificate.to_json()
    if isinstance(exc, ComputationError):
        return EXIT_COMPUTATION, err
    return EXIT_VALIDATION, err


def run_task(args) -> tuple[int, dict]:
    """Worker entry point; takes plain data so it can cross process boundaries."""
    scenario_json, index, opt = args
    sc = Scenario.from_json(scenario_json)
    task = sc.tasks[index]
    base = {"task": index, "op": task["op"]}
    try:
        return EXIT_OK, {**base, "result": OPS[task["op"]](sc, task, opt)}
    except MollyError as exc:
        code, err = _error(exc)
    except (KeyError, TypeError, ValueError, AttributeError) as exc:
        code, err = EXIT_VALIDATION, {"type": "MalformedTask", "message": f"{type(exc).__name__}: {exc}"}
    return code, {**base, "error": err}


def evaluate(sc: Scenario, opt: Options = Options(), jobs: int = 1) -> tuple[int, dict]:
    payload = sc.to_json()
    work = [(payload, i, opt) for i in range(len(sc.tasks))]
    if jobs > 1 and len(work) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            outcomes = list(pool.map(run_task, work))
    else:
        outcomes = [run_task(w) for w in work]
    code = max((c for c, _ in outcomes), default=EXIT_OK)
    warnings = []
    if sc.series is not None and sc.series.coeff((0,) * sc.d):
        warnings.append("series has a nonzero constant term; it is ignored by np and npinf")
    status = {EXIT_OK: "ok", EXIT_VALIDATION: "validation_error", EXIT_COMPUTATION: "computation_error"}[code]
    envelope = {
        "tool": "molly",
        "version": __version__,
        "scenario": sc.id,
        "status": status,
        "results": [r for _, r in outcomes],
        "warnings": warnings,
    }
    return code, envelope


def _failure_envelope(exc: Exception) -> tuple[int, dict]:
    code, err = _error(exc)
    return code, {"tool": "molly", "version": __version__, "status": "validation_error", "error": err, "results": []}


# --- output ---

def _polygons(envelope: dict) -> list[tuple[int, Polygon]]:
    out = []
    for r in envelope.get("results", []):
        if r["op"] in POLYGON_OPS and "result" in r:
            out.append((r["task"], Polygon.from_json(r["result"]["polygon"])))
    return out


def render(envelope: dict, fmt: str) -> str:
    if fmt == "json":
        return dumps(envelope)
    polys = _polygons(envelope)
    if not polys:
        raise ValidationError(f"format {fmt} needs at least one polygon task")
    if fmt == "csv":
        return "".join(f"# task {i}\n{poly.to_csv()}" for i, poly in polys)
    if len(polys) == 1:
        i, poly = polys[0]
        return poly.to_svg(title=f"task {i}")
    # stack several polygons vertically
    height = 320
    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="480" height="{height * len(polys)}">']
    for j, (i, poly) in enumerate(polys):
        inner = poly.to_svg(title=f"task {i}").replace("<svg ", f'<svg y="{j * height}" ', 1)
        parts.append(inner.rstrip("\n"))
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def plot_polygon(result, svg_path) -> Path:
    """Write the SVG of a Polygon or of a polygon task result."""
    if isinstance(result, Mapping):
        result = result.get("result", result)
        result = result.get("polygon", result)
        result = Polygon.from_json(result)
    path = Path(svg_path)
    path.write_text(result.to_svg())
    return path


def _write(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_run(args) -> int:
    opt = Options(strict=args.strict_truncation, seed=_seed(args))
    try:
        sc = load_scenario(args.scenario)
    except MollyError as exc:
        code, env = _failure_envelope(exc)
        print(f"error: {exc}", file=sys.stderr)
        _write(dumps(env), args.output)
        return code
    code, env = evaluate(sc, opt, args.jobs)
    try:
        text = render(env, args.format)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    _write(text, args.output)
    for r in env["results"]:
        if "error" in r:
            print(f"error: task {r['task']} ({r['op']}): {r['error']['message']}", file=sys.stderr)
    return code


# --- verify ---

def _elem(K, x):
    if isinstance(x, bool) or not isinstance(x, int) or not 0 <= x < K.p**K.m:
        raise ValidationError(f"field element must be an integer code in [0, {K.p ** K.m}), got {x!r}")
    return K.elem(x)


def verify_telescope(data: Mapping) -> dict:
    K = ext_build(check_prime(data["p"]), int(data.get("m", 1)))
    d = AdditivePolynomial([_elem(K, x) for x in data["d"]], K)
    length = int(data.get("length", 12))
    seq = extend_recurrence(d, [_elem(K, x) for x in data["init"]], length, LRR)
    top = int(data.get("max_index", 10))
    fails = []
    for n in range(top):
        for n2 in range(n + 1, top + 1):
            if not telescope_identity(d, seq, n, n2).equal:
                fails.append([n, n2])
    return {"ok": not fails, "pairs": top * (top + 1) // 2, "failures": fails}


def _poly_in(x, p: int, e: int):
    return PuiseuxPoly.from_json(x, p, e)


def verify_relation(data: Mapping) -> dict:
    p = check_prime(data["p"])
    e = int(data.get("e", 0))
    b = [_poly_in(c, p, e) for c in data["b"]]
    bs = [[_poly_in(c, p, e) for c in bi] for bi in data["bs"]]
    f = [(int(i), _poly_in(c, p, e)) for i, c in data["f"]]
    res = extract_rlrr(p, b, bs, f)
    out = {
        "c": [c.to_json() for c in res.c],
        "N": res.N,
        "degenerate": res.degenerate,
        "tail_verified": res.tail_verified,
        "tail_length": res.tail_length,
    }
    ok = res.tail_verified
    exp = data.get("expect", {})
    if "N" in exp:
        ok = ok and exp["N"] == res.N
    if "c" in exp:
        ok = ok and [_poly_in(c, p, e) for c in exp["c"]] == list(res.c)
    if "degenerate" in exp:
        ok = ok and exp["degenerate"] == res.degenerate
    out["ok"] = ok
    return out


def _lookup(obj, path: str):
    for part in path.split("."):
        obj = obj[int(part)] if isinstance(obj, list) else obj[part]
    return obj


def verify_scenario(data: Mapping, opt: Options) -> dict:
    sc = Scenario.from_json(data)
    code1, env1 = evaluate(sc, opt)
    code2, env2 = evaluate(Scenario.from_json(data), opt)
    deterministic = dumps(env1) == dumps(env2)
    roundtrip = sc.to_json() == data
    mismatches = []
    for path, want in sorted(sc.expect.items()):
        try:
            got = _lookup(env1, path)
        except (KeyError, IndexError, ValueError, TypeError):
            got = None
        if got != want:
            mismatches.append({"path": path, "expected": want, "got": got})
    ok = deterministic and roundtrip and not mismatches
    return {"ok": ok, "deterministic": deterministic, "roundtrip": roundtrip, "exit_code": code1, "mismatches": mismatches}


def verify_dir(path, opt: Options = Options()) -> tuple[int, list[dict]]:
    root = Path(path)
    if not root.is_dir():
        raise ValidationError(f"not a directory: {path}")
    report = []
    for fx in sorted(root.glob("*.json")):
        entry = {"fixture": fx.name}
        try:
            data = json.loads(fx.read_text())
            kind = data.get("kind", "scenario") if isinstance(data, Mapping) else None
            if kind == "telescope":
                entry.update(verify_telescope(data))
            elif kind == "relation":
                entry.update(verify_relation(data))
            elif kind == "scenario":
                entry.update(verify_scenario(data, opt))
            else:
                raise ValidationError(f"unknown fixture kind {kind!r}")
            entry["kind"] = kind
        except (MollyError, KeyError, TypeError, ValueError) as exc:
            entry.update(ok=False, error=f"{type(exc).__name__}: {exc}")
        report.append(entry)
    code = EXIT_OK if all(r["ok"] for r in report) else EXIT_FAIL
    return code, report


def cmd_verify(args) -> int:
    try:
        code, report = verify_dir(args.fixtures, Options(seed=_seed(args)))
    except MollyError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    for r in report:
        print(json.dumps(r, sort_keys=True))
    passed = sum(r["ok"] for r in report)
    print(f"{passed}/{len(report)} fixtures passed", file=sys.stderr)
    return code


def _seed(args) -> int:
    env = os.environ.get("MOLLY_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError:
            print(f"warning: ignoring non-integer MOLLY_SEED={env!r}", file=sys.stderr)
    return args.seed


def fixtures_dir() -> Path:
    return Path(__file__).parent / "fixtures"


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="molly", description=__doc__)
    ap.add_argument("--version", action="version", version=f"molly {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="evaluate a scenario file")
    run.add_argument("scenario")
    run.add_argument("-o", "--output", help="output file (default stdout)")
    run.add_argument("--format", choices=("json", "csv", "svg"), default="json")
    run.add_argument("--strict-truncation", action="store_true", help="fail when a twist leaves the box")
    run.add_argument("--jobs", type=int, default=1)
    run.add_argument("--seed", type=int, default=0)
    run.set_defaults(func=cmd_run)
    ver = sub.add_parser("verify", help="run the identity suites of a fixture directory")
    ver.add_argument("fixtures", nargs="?", default=str(fixtures_dir()))
    ver.add_argument("--seed", type=int, default=0)
    ver.set_defaults(func=cmd_verify)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
