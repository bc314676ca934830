"""Scenario runner.

A scenario is an INI file::

    [monoid]
    kind = generators | product_one | example43 | remark313
    units = 2            ; generators: invariant factors of F^x (empty: trivial)
    primes = 2           ; generators: number of primes, or their labels
    generators = 1 1; 2 1; 0 2 @ 1
                         ; exponent vectors, optional "@ unit" coordinates
    group = symmetric 3  ; product_one
    chain = 2 2 > 2 > 1  ; example43: invariant factors of G_0 > ... > G_n

    [analyses]
    run = seminormal, class_semigroup

    [parameters]
    alpha_cap = 8
    box_cap = 6
    length_cap = 4

The report is printed as delimited text (``--format text``) or as JSON lines
(``--format records``).  ``--figures DIR`` also writes a Cayley table heatmap
and a lengths plot.  The exit code is 0 iff every analysis completed.
"""

from __future__ import annotations

import argparse
import configparser
import json
import os
import sys
import time
from dataclasses import dataclass, field

from . import __version__
from .abelian import TRIVIAL, FiniteAbelianGroup
from .cmonoid import (
    DEFAULT_ALPHA_CAP,
    CMonoidPresentation,
    class_group_of_completion,
    class_semigroup,
    from_generators,
    is_seminormal,
    seminormal_bruteforce,
    verify_theorem11,
)
from .criterion import build_transfer, half_factorial_by_criterion, verify_transfer_axioms
from .errors import CMonoidError, MissingField, ParseError, ScenarioError, UnknownGroupName
from .factorial import Ambient, FactorialElement
from .gallery import Example43Spec, build_example43, build_remark313
from .lengths import box_lengths, default_box_cap, delta_set, half_factorial_bruteforce
from .productone import bg_presentation, group_by_name

SCHEMA = "cmonoids-report/1"
ANALYSES = (
    "class_semigroup",
    "seminormal",
    "seminormal_bruteforce",
    "half_factorial_criterion",
    "half_factorial_bruteforce",
    "class_group_completion",
    "transfer_check",
    "theorem11_check",
)
KINDS = ("generators", "product_one", "example43", "remark313")
TRANSFER_SAMPLES = 500


@dataclass
class Scenario:
    kind: str
    monoid: dict
    analyses: tuple[str, ...]
    alpha_cap: int = DEFAULT_ALPHA_CAP
    box_cap: int | None = None
    length_cap: int | None = None


def _line_of(text: str, section: str, key: str | None = None) -> int | None:
    current = None
    for no, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if line.startswith("[") and line.endswith("]"):
            current = line[1:-1].strip()
            if key is None and current == section:
                return no
        elif current == section and key is not None:
            name = line.split("=", 1)[0].split(":", 1)[0].strip()
            if name == key:
                return no
    return None


def _ints(text: str, what: str, line) -> tuple[int, ...]:
    try:
        return tuple(int(t) for t in text.replace(",", " ").split())
    except ValueError:
        raise ParseError(f"{what}: expected integers, got {text!r}", line) from None


def _group_of(factors: tuple[int, ...], line) -> FiniteAbelianGroup:
    factors = tuple(f for f in factors if f != 1)
    try:
        return FiniteAbelianGroup.from_cyclic_factors(factors) if factors else TRIVIAL
    except ValueError as exc:
        raise ParseError(str(exc), line) from None


def parse_scenario(text: str) -> Scenario:
    cp = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    try:
        cp.read_string(text)
    except configparser.ParsingError as exc:
        line = exc.errors[0][0] if getattr(exc, "errors", None) else None
        raise ParseError(f"malformed scenario: {exc.message.splitlines()[0]}", line) from None
    except configparser.Error as exc:
        raise ParseError(f"malformed scenario: {exc}", getattr(exc, "lineno", None)) from None
    for sec in ("monoid", "analyses"):
        if not cp.has_section(sec):
            raise MissingField(f"missing section [{sec}]", None)
    m = cp["monoid"]
    if "kind" not in m:
        raise MissingField("[monoid] needs a kind", _line_of(text, "monoid"))
    kind = m["kind"].strip()
    if kind not in KINDS:
        raise ParseError(f"unknown monoid kind {kind!r}; expected one of {', '.join(KINDS)}", _line_of(text, "monoid", "kind"))
    monoid: dict = {}
    need = {"generators": ("primes", "generators"), "product_one": ("group",), "example43": ("chain",), "remark313": ()}[kind]
    for key in need:
        if key not in m or not m[key].strip():
            raise MissingField(f"[monoid] kind {kind} needs {key}", _line_of(text, "monoid"))
    if kind == "generators":
        line = _line_of(text, "monoid", "units")
        monoid["units"] = _group_of(_ints(m.get("units", ""), "units", line), line)
        p = m["primes"].split()
        if len(p) == 1 and p[0].isdigit():
            p = [f"p{i + 1}" for i in range(int(p[0]))]
        monoid["primes"] = tuple(p)
        gens = []
        gline = _line_of(text, "monoid", "generators")
        for chunk in m["generators"].split(";"):
            if not chunk.strip():
                continue
            exps, _, unit = chunk.partition("@")
            e = _ints(exps, "generator exponents", gline)
            if len(e) != len(p) or any(x < 0 for x in e):
                raise ParseError(f"generator {chunk.strip()!r} needs {len(p)} non-negative exponents", gline)
            u = _ints(unit, "generator unit", gline) if unit.strip() else None
            if u is not None and len(u) != monoid["units"].rank:
                raise ParseError(f"generator unit {unit.strip()!r} needs {monoid['units'].rank} coordinates", gline)
            gens.append((e, u))
        if not gens:
            raise MissingField("[monoid] generators is empty", gline)
        monoid["generators"] = gens
    elif kind == "product_one":
        line = _line_of(text, "monoid", "group")
        name, *args = m["group"].split()
        try:
            args = [int(a) for a in args]
        except ValueError:
            raise ParseError(f"group arguments must be integers: {m['group']!r}", line) from None
        try:
            group_by_name(name, *args)
        except KeyError:
            raise UnknownGroupName(f"unknown group {name!r}", line) from None
        except (TypeError, ValueError) as exc:
            raise ParseError(f"bad group {m['group']!r}: {exc}", line) from None
        monoid["group"] = (name, tuple(args))
    elif kind == "example43":
        line = _line_of(text, "monoid", "chain")
        parts = [s.strip() for s in m["chain"].split(">")]
        groups = [TRIVIAL if s in ("1", "trivial", "") else _group_of(_ints(s, "chain", line), line) for s in parts]
        monoid["chain"] = groups
    run = cp["analyses"].get("run", "")
    names = tuple(dict.fromkeys(s.strip() for s in run.replace("\n", ",").split(",") if s.strip()))
    aline = _line_of(text, "analyses", "run") or _line_of(text, "analyses")
    if not names:
        raise MissingField("[analyses] run lists no analysis", aline)
    for a in names:
        if a not in ANALYSES:
            raise ParseError(f"unknown analysis {a!r}", aline)
    params = {}
    if cp.has_section("parameters"):
        for key, val in cp["parameters"].items():
            line = _line_of(text, "parameters", key)
            if key not in ("alpha_cap", "box_cap", "length_cap"):
                raise ParseError(f"unknown parameter {key!r}", line)
            vals = _ints(val, key, line)
            if len(vals) != 1 or vals[0] < 1:
                raise ParseError(f"{key} must be one positive integer", line)
            params[key] = vals[0]
    return Scenario(kind, monoid, names, **params)


def build_monoid(s: Scenario) -> CMonoidPresentation:
    if s.kind == "remark313":
        return build_remark313()
    if s.kind == "product_one":
        name, args = s.monoid["group"]
        return bg_presentation(group_by_name(name, *args), alpha_cap=s.alpha_cap)
    if s.kind == "example43":
        return build_example43(Example43Spec(s.monoid["chain"])).presentation
    amb = Ambient(s.monoid["units"], s.monoid["primes"])
    gens = [FactorialElement(amb, u if u is not None else amb.units.zero(), e) for e, u in s.monoid["generators"]]
    return from_generators(amb, gens, alpha_cap=s.alpha_cap, name="generators")


# -- running -----------------------------------------------------------------


@dataclass
class Report:
    records: list = field(default_factory=list)
    completed: bool = True

    def add(self, **rec) -> dict:
        rec = {"schema": SCHEMA, **rec}
        self.records.append(rec)
        return rec


def _fmt_set(xs) -> str:
    return "{" + ", ".join(map(str, sorted(xs))) + "}"


def _analysis(H: CMonoidPresentation, name: str, s: Scenario, box_cap: int, seed: int) -> dict:
    cs = class_semigroup(H)
    if name == "class_semigroup":
        return {
            "classes": cs.n,
            "representatives": [str(r) for r in cs.representatives],
            "C_H": sorted(cs.C_H),
            "C_units": sorted(cs.C_units),
            "C_star": sorted(cs.C_star),
            "table": cs.carrier.table.tolist(),
        }
    if name == "seminormal":
        sn = is_seminormal(H, cs)
        out = {"verdict": sn.seminormal, "idempotents": len(sn.decomposition.idempotents)}
        if sn.witness is not None:
            out["witness"] = cs.label(sn.witness)
        return out
    if name == "seminormal_bruteforce":
        x = seminormal_bruteforce(H)
        return {"verdict": x is None, "witness": None if x is None else str(x)}
    if name == "class_group_completion":
        return {"group": str(class_group_of_completion(H))}
    if name == "theorem11_check":
        r = verify_theorem11(H, cs)
        return {
            "verdict": r.passed,
            "classes_idempotent": r.classes_idempotent,
            "constituent": str(r.constituent),
            "completion": str(r.completion),
        }
    if name == "half_factorial_bruteforce":
        v = half_factorial_bruteforce(H, box_cap)
        out = {"verdict": v.half_factorial, "box_cap": box_cap, "label": v.label, "delta": sorted(v.delta)}
        if v.witness is not None:
            out["witness"] = str(v.witness)
            out["witness_lengths"] = list(v.witness_lengths)
        return out
    if name == "half_factorial_criterion":
        sn = is_seminormal(H, cs)
        reason = None
        if not sn.seminormal:
            reason = "not seminormal"
        else:
            rep = half_factorial_by_criterion(H, cs)
            if rep.applicable:
                return {
                    "verdict": rep.half_factorial,
                    "status": "applicable",
                    "properties": {p.name: {"passed": p.passed, "witness": p.witness, "detail": p.detail} for p in rep.properties},
                }
            reason = "some class of C* contains no prime"
        v = half_factorial_bruteforce(H, box_cap)
        return {"verdict": v.half_factorial, "status": "inapplicable", "reason": reason, "fallback": v.label}
    if name == "transfer_check":
        sn = is_seminormal(H, cs)
        if not sn.seminormal:
            return {"status": "inapplicable", "reason": "not seminormal"}
        rep = half_factorial_by_criterion(H, cs)
        if not rep.hypothesis:
            return {"status": "inapplicable", "reason": "some class of C* contains no prime"}
        ctx = rep.context
        per_k = []
        for k in range(ctx.n + 1):
            if not ctx.in_CH[k]:
                continue
            theta = build_transfer(H, ctx, k)
            tr = verify_transfer_axioms(theta, box_cap, samples=TRANSFER_SAMPLES, seed=seed)
            per_k.append({
                "k": k, "codomain": str(theta.group), "passed": tr.passed, "checked": tr.checked,
                "T1": tr.t1_surjective and tr.t1_units, "T2": tr.t2, "lengths": tr.lengths,
                "counterexamples": list(tr.counterexamples[:3]),
            })
        return {"verdict": all(r["passed"] for r in per_k), "box_cap": box_cap, "per_k": per_k}
    raise ValueError(name)


def run_scenario(s: Scenario, *, box_cap: int | None = None, alpha_cap: int | None = None, seed: int = 0,
                 figures: str | None = None, timing: bool = False) -> Report:
    if alpha_cap is not None:
        s.alpha_cap = alpha_cap
    rep = Report()
    t0 = time.perf_counter()
    try:
        H = build_monoid(s)
    except CMonoidError as exc:
        rep.add(type="error", stage="build", error=type(exc).__name__, message=str(exc))
        rep.completed = False
        return rep
    cap = box_cap or s.box_cap or default_box_cap(H)
    head = {"type": "monoid", "kind": s.kind, "name": H.name, "units": str(H.units), "primes": H.d,
            "alpha": H.alpha, "backend": H.backend, "box_cap": cap, "version": __version__}
    if timing:
        head["seconds"] = round(time.perf_counter() - t0, 4)
    rep.add(**head)
    for name in s.analyses:
        t = time.perf_counter()
        try:
            res = _analysis(H, name, s, cap, seed)
            rec = {"type": "analysis", "analysis": name, "completed": True, **res}
        except CMonoidError as exc:
            rec = {"type": "analysis", "analysis": name, "completed": False, "error": type(exc).__name__, "message": str(exc)}
            rep.completed = False
        if timing:
            rec["seconds"] = round(time.perf_counter() - t, 4)
        rep.add(**rec)
    if s.length_cap or figures:
        lcap = min(s.length_cap or cap, cap)
        for (u, e), L in box_lengths(H, lcap).items():
            if any(e):
                rep.add(type="lengths", element=str(H.element(u, e)), L=list(L), delta=sorted(delta_set(L)))
    if figures:
        from .plotting import cayley_heatmap, lengths_plot

        stem = (H.name or s.kind).replace(" ", "_").replace("/", "")
        stem = "".join(c for c in stem if c.isalnum() or c in "_-.") or s.kind
        p1 = cayley_heatmap(class_semigroup(H), os.path.join(figures, f"{stem}_cayley.png"))
        p2 = lengths_plot(H, min(s.length_cap or cap, cap), os.path.join(figures, f"{stem}_lengths.png"))
        rep.add(type="figure", figure="cayley_heatmap", path=p1)
        rep.add(type="figure", figure="lengths", path=p2)
    rep.add(type="summary", completed=rep.completed, analyses=len(s.analyses))
    return rep


# -- rendering -----------------------------------------------------------------


def render_records(rep: Report) -> str:
    return "".join(json.dumps(r, sort_keys=True) + "\n" for r in rep.records)


def render_text(rep: Report) -> str:
    out = []
    for r in rep.records:
        kind = r["type"]
        if kind == "monoid":
            out.append("=== monoid ===")
            for key in ("kind", "name", "units", "primes", "alpha", "backend", "box_cap", "seconds"):
                if key in r:
                    out.append(f"{key}: {r[key]}")
        elif kind == "analysis":
            out.append(f"=== {r['analysis']} ===")
            if not r["completed"]:
                out.append(f"error: {r['error']}: {r['message']}")
                continue
            if r["analysis"] == "class_semigroup":
                out.append(f"classes: {r['classes']}")
                for i, rep_ in enumerate(r["representatives"]):
                    tags = [t for t, key in (("H", "C_H"), ("unit", "C_units"), ("*", "C_star")) if i in r[key]]
                    out.append(f"  {i}: [{rep_}] {' '.join(tags)}".rstrip())
                out.append("table:")
                out += ["  " + " ".join(f"{v:>2}" for v in row) for row in r["table"]]
                continue
            for key, val in r.items():
                if key in ("schema", "type", "analysis", "completed"):
                    continue
                if key == "properties":
                    for pname, p in val.items():
                        mark = "pass" if p["passed"] else "FAIL"
                        wit = f" (witness {p['witness']})" if p["witness"] else ""
                        out.append(f"  {pname}: {mark}{wit} {p['detail']}".rstrip())
                elif key == "per_k":
                    for row in val:
                        out.append(f"  k={row['k']}: {'pass' if row['passed'] else 'FAIL'} codomain B({row['codomain']}), "
                                   f"{row['checked']} elements, T1 {row['T1']}, T2 {row['T2']}, lengths {row['lengths']}")
                elif isinstance(val, list):
                    out.append(f"{key}: {_fmt_set(val) if key == 'delta' else val}")
                else:
                    out.append(f"{key}: {val}")
        elif kind == "lengths":
            if not out or not out[-1].startswith(("L(", "=== lengths")):
                out.append("=== lengths ===")
            out.append(f"L({r['element']}) = {_fmt_set(r['L'])}, delta = {_fmt_set(r['delta'])}")
        elif kind == "figure":
            out.append(f"=== figure {r['figure']} ===")
            out.append(f"path: {r['path']}")
        elif kind == "summary":
            out.append("=== summary ===")
            out.append(f"completed: {r['completed']}")
        elif kind == "error":
            out.append(f"=== error ({r['stage']}) ===")
            out.append(f"{r['error']}: {r['message']}")
    return "\n".join(out) + "\n"


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(prog="cmonoids", description="Run analyses of C-monoids described by a scenario file.")
    ap.add_argument("--scenario", required=True, help="path to the scenario file")
    ap.add_argument("--format", choices=("text", "records"), default="text")
    ap.add_argument("--box-cap", type=int, help="total degree of the element box")
    ap.add_argument("--alpha-cap", type=int, help="largest alpha tried when certifying")
    ap.add_argument("--seed", type=int, default=0, help="seed for sampled transfer checks")
    ap.add_argument("--figures", metavar="DIR", help="write PNG figures into DIR")
    ap.add_argument("--timing", action="store_true", help="include wall-clock timings (breaks byte-identical output)")
    args = ap.parse_args(argv)
    for flag in ("box_cap", "alpha_cap"):
        v = getattr(args, flag)
        if v is not None and v < 1:
            ap.error(f"--{flag.replace('_', '-')} must be positive")
    try:
        with open(args.scenario, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        print(f"cmonoids: cannot read scenario: {exc}", file=sys.stderr)
        return 2
    try:
        s = parse_scenario(text)
    except ScenarioError as exc:
        print(f"{args.scenario}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    rep = run_scenario(s, box_cap=args.box_cap, alpha_cap=args.alpha_cap, seed=args.seed,
                       figures=args.figures, timing=args.timing)
    sys.stdout.write(render_records(rep) if args.format == "records" else render_text(rep))
    return 0 if rep.completed else 1


if __name__ == "__main__":
    sys.exit(main())
