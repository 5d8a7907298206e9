"""Batch command-line front end.

Subcommands: check, translate, simplify, herbrandize, obligation, eval,
demo, corpus.  Text output is deterministic (no timings); JSON output adds
machine-readable fields including runtime_ms for demo reports.  Exit codes:
0 ok, 1 violation or failed check, 2 usage or parse error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import library
from .casestudies import DEMOS, BarViolated, CaseStudyError
from .formula import Formula
from .herbrand import (
    HerbrandError,
    Obligation,
    collapse_witnesses,
    extraction_obligation,
    herbrandise_pointwise,
    implication_to_normal_form,
)
from .sst import NormalForm, NotANormalForm, RewriteTrace, fixed_point_check, shape_split, simplify, translate
from .syntax import FormulaSyntaxError, TypeAnnotationMissing, parse_term, print_formula, print_type
from .typesys import DEFAULT_FUEL, Closure, Native, SeqValue, TermError, Value, evaluate, infer_type


def _fuel(args) -> int:
    if getattr(args, "fuel", None):
        return args.fuel
    env = os.environ.get("NSF_FUEL")
    return int(env) if env else DEFAULT_FUEL


def _binders(tup) -> str:
    return ", ".join(f"{v.name}:{print_type(v.type)}" for v in tup)


def _nf_lines(nf: NormalForm) -> list[str]:
    return [
        f"normal form: {print_formula(nf.render())}",
        f"  universal:   {_binders(nf.univ)}",
        f"  existential: {_binders(nf.exist)}",
        f"  parameters:  {_binders(nf.params)}",
        f"  matrix:      {print_formula(nf.matrix)}",
    ]


def _nf_json(nf: NormalForm) -> dict:
    return {
        "rendering": print_formula(nf.render()),
        "universal": [{"name": v.name, "type": print_type(v.type)} for v in nf.univ],
        "existential": [{"name": v.name, "type": print_type(v.type)} for v in nf.exist],
        "parameters": [{"name": v.name, "type": print_type(v.type)} for v in nf.params],
        "matrix": print_formula(nf.matrix),
    }


def _trace_lines(trace: RewriteTrace) -> list[str]:
    out = []
    for i, step in enumerate(trace, start=1):
        out.append(f"  [{i}] {step.rule}:")
        out.append(f"        {print_formula(step.before)}")
        out.append(f"    ==> {print_formula(step.after)}")
    return out


def _trace_json(trace: RewriteTrace) -> list[dict]:
    return [
        {"rule": s.rule, "before": print_formula(s.before), "after": print_formula(s.after)}
        for s in trace
    ]


def _obligation_lines(ob: Obligation) -> list[str]:
    lines = [
        f"obligation {ob.name}: {print_formula(ob.render())}",
        f"  inputs:  {_binders(ob.inputs)}",
        f"  outputs: {_binders(ob.outputs)}",
        f"  holes:   {_binders(ob.hole_vars())}",
    ]
    for component, why in ob.collapsed:
        lines.append(f"  collapsed {component}: {why}")
    return lines


def _obligation_json(ob: Obligation) -> dict:
    return {
        "name": ob.name,
        "inputs": [{"name": v.name, "type": print_type(v.type)} for v in ob.inputs],
        "outputs": [{"name": v.name, "type": print_type(v.type)} for v in ob.outputs],
        "hole": ob.hole,
        "holes": [{"name": v.name, "type": print_type(v.type)} for v in ob.hole_vars()],
        "matrix": print_formula(ob.matrix),
        "rendering": print_formula(ob.render()),
        "collapsed": [{"component": c, "justification": j} for c, j in ob.collapsed],
    }


def _named_formula(path: str, name: str) -> Formula:
    entries = library.load_file(path)
    if name not in entries:
        raise KeyError(f"no formula named {name!r} in {path} (has: {', '.join(entries)})")
    return entries[name]


def _to_nf(f: Formula) -> NormalForm:
    try:
        return shape_split(f)
    except NotANormalForm:
        nf, _ = translate(f)
        nf, _ = simplify(nf)
        return nf


def _print_value(v: Value) -> str:
    if isinstance(v, int):
        return str(v)
    if isinstance(v, SeqValue):
        return "<" + ", ".join(_print_value(x) for x in v.items) + ">"
    if isinstance(v, (Closure, Native)):
        return "<fun>"
    return repr(v)


# ---------------------------------------------------------------------------
# Subcommands


def cmd_check(args) -> int:
    failures = 0
    for path in args.files:
        try:
            text = library.resolve(path).read_text()
        except FileNotFoundError:
            print(f"{path}: error: no such file")
            failures += 1
            continue
        if not text.strip():
            print(f"{path}: warning: empty file")
            continue
        try:
            entries = library.load_file(path)
        except (FormulaSyntaxError, TypeAnnotationMissing, TermError) as exc:
            print(f"{path}: error: {exc}")
            failures += 1
            continue
        print(f"{path}: ok ({len(entries)} formulas)")
    return 1 if failures else 0


def cmd_translate(args) -> int:
    f = _named_formula(args.file, args.name)
    nf, trace = translate(f)
    nf, steps = simplify(nf)
    trace.extend(steps.steps)
    if args.json:
        doc = {"name": args.name, **_nf_json(nf)}
        if args.trace:
            doc["trace"] = _trace_json(trace)
        print(json.dumps(doc, indent=2, sort_keys=True))
        return 0
    print(f"formula {args.name}")
    for line in _nf_lines(nf):
        print(line)
    if args.trace:
        print("trace:")
        for line in _trace_lines(trace):
            print(line)
    return 0


def cmd_simplify(args) -> int:
    f = _named_formula(args.file, args.name)
    nf = shape_split(f)
    nf, trace = simplify(nf)
    if args.json:
        doc = {"name": args.name, **_nf_json(nf)}
        if args.trace:
            doc["trace"] = _trace_json(trace)
        print(json.dumps(doc, indent=2, sort_keys=True))
        return 0
    print(f"formula {args.name}")
    for line in _nf_lines(nf):
        print(line)
    if args.trace:
        print("trace:")
        for line in _trace_lines(trace):
            print(line)
    return 0


def _parse_slots(specs: list[str]) -> dict[str, int | str]:
    partition: dict[str, int | str] = {}
    for spec in specs:
        if "=" not in spec:
            raise ValueError(f"bad slot {spec!r}; use VAR=N")
        var, slot = spec.split("=", 1)
        partition[var.strip()] = "o" if slot.strip() == "o" else int(slot)
    return partition


def cmd_herbrandize(args) -> int:
    entries = library.load_file(args.file)
    ante_names = [n.strip() for n in args.ante.split(",")]
    missing = [n for n in ante_names + [args.cons] if n not in entries]
    if missing:
        # Names not in the given file may still come from the shipped corpus.
        shipped = library.load_all()
        for name in missing:
            if name not in shipped:
                raise KeyError(f"no formula named {name!r} in {args.file} or the corpus")
            entries[name] = shipped[name]
    ante = [_to_nf(entries[n]) for n in ante_names]
    cons = _to_nf(entries[args.cons])
    witnesses = list(args.witness or [])

    effective = implication_to_normal_form(ante, cons, drop_st=True, witness_names=list(witnesses))
    ob = extraction_obligation(effective, args.hole, name=args.cons)
    doc: dict = {}
    lines: list[str] = []
    lines.append("effective form (relativization dropped in the hypothesis):")
    lines.extend("  " + line for line in _nf_lines(effective))
    lines.extend(_obligation_lines(ob))
    doc["effective"] = _nf_json(effective)
    doc["obligation"] = _obligation_json(ob)

    if args.collapse:
        collapsed = collapse_witnesses(ob, args.collapse, args.value_hole)
        lines.extend(_obligation_lines(collapsed))
        doc["collapsed"] = _obligation_json(collapsed)

    if args.pointwise:
        pointwise = implication_to_normal_form(
            ante, cons, drop_st=False, witness_names=list(witnesses)
        )
        lines.append("pointwise form (antecedent universals become outputs):")
        lines.extend("  " + line for line in _nf_lines(pointwise))
        partition = _parse_slots(args.slot or [])
        for v in pointwise.exist:
            partition.setdefault(v.name, "o")
        her, holes = herbrandise_pointwise(pointwise, partition)
        lines.append(f"pointwise witness formula: {print_formula(her)}")
        lines.append("  holes: " + ", ".join(f"{k}->{v}" for k, v in sorted(holes.items())))
        doc["pointwise"] = _nf_json(pointwise)
        doc["her"] = {
            "rendering": print_formula(her),
            "holes": {k: v for k, v in sorted(holes.items())},
            "partition": {k: str(v) for k, v in sorted(partition.items(), key=lambda kv: kv[0])},
        }

    if args.json:
        print(json.dumps(doc, indent=2, sort_keys=True))
    else:
        for line in lines:
            print(line)
    return 0


def cmd_obligation(args) -> int:
    f = _named_formula(args.file, args.name)
    nf = _to_nf(f)
    ob = extraction_obligation(nf, args.hole, name=args.name)
    if args.collapse:
        ob = collapse_witnesses(ob, args.collapse, args.value_hole)
    if args.json:
        print(json.dumps(_obligation_json(ob), indent=2, sort_keys=True))
    else:
        for line in _obligation_lines(ob):
            print(line)
    return 0


def cmd_eval(args) -> int:
    text = library.resolve(args.termfile).read_text()
    term = parse_term(text)
    ty = infer_type(term)
    value = evaluate(term, fuel=_fuel(args))
    print(f"type:  {print_type(ty)}")
    print(f"value: {_print_value(value)}")
    return 0


def cmd_demo(args) -> int:
    if args.name not in DEMOS:
        raise KeyError(f"unknown demo {args.name!r}; one of {', '.join(sorted(DEMOS))}")
    runner = DEMOS[args.name]
    kwargs = {}
    if args.depth is not None:
        kwargs["depth"] = args.depth
    try:
        report = runner(**kwargs)
    except BarViolated as exc:
        if args.json:
            print(json.dumps({"case": args.name, "error": str(exc)}, indent=2, sort_keys=True))
        else:
            print(f"demo {args.name}: bar violated: {exc}")
        return 1
    if args.json:
        print(json.dumps(report, indent=2, sort_keys=True))
    else:
        status = "PASS" if report["passed"] else "FAIL"
        print(
            f"demo {report['case']}: depth={report['depth']} "
            f"instances={report['instances']} violations={report['violations']} {status}"
        )
        if report["note"]:
            print(f"  note: {report['note']}")
    return 0 if report["passed"] else 1


def cmd_corpus(args) -> int:
    results = []
    violations = 0
    for fname in library.CORPUS_FILES:
        entries = library.load_file(fname)
        for name, f in entries.items():
            try:
                nf = shape_split(f)
            except NotANormalForm:
                nf, _ = translate(f)
                nf, _ = simplify(nf)
                results.append({"file": fname, "name": name, "kind": "translated", "ok": True})
                continue
            ok = fixed_point_check(f)
            if not ok:
                violations += 1
            results.append({"file": fname, "name": name, "kind": "normal form", "ok": ok})
    if args.json:
        print(json.dumps({"results": results, "violations": violations}, indent=2, sort_keys=True))
    else:
        for r in results:
            status = "ok" if r["ok"] else "FIXED-POINT FAILURE"
            print(f"{r['file']:>16} {r['name']:<20} {r['kind']:<12} {status}")
        print(f"corpus: {len(results)} formulas, {violations} violations")
    return 1 if violations else 0


# ---------------------------------------------------------------------------
# Argument parsing


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nsf",
        description="Normal-form engine for standardness-relativized arithmetic",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="parse and typecheck formula files")
    p.add_argument("files", nargs="+")
    p.set_defaults(func=cmd_check)

    for cmd, func in (("translate", cmd_translate), ("simplify", cmd_simplify)):
        p = sub.add_parser(cmd, help=f"{cmd} a named formula")
        p.add_argument("file")
        p.add_argument("name")
        p.add_argument("--trace", action="store_true")
        p.add_argument("--json", action="store_true")
        p.set_defaults(func=func)

    p = sub.add_parser("herbrandize", help="normal form and obligations of an implication")
    p.add_argument("file")
    p.add_argument("ante", help="antecedent name, or comma-separated conjunct names")
    p.add_argument("cons")
    p.add_argument("--pointwise", action="store_true")
    p.add_argument("--witness", action="append", help="name for a skolemized witness functional")
    p.add_argument("--slot", action="append", help="VAR=N slot assignment for the pointwise form")
    p.add_argument("--collapse", help="output component to replace by a max-value hole")
    p.add_argument("--hole", default="t")
    p.add_argument("--value-hole", dest="value_hole", default="s")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_herbrandize)

    p = sub.add_parser("obligation", help="term-extraction obligation of a named formula")
    p.add_argument("file")
    p.add_argument("name")
    p.add_argument("--collapse")
    p.add_argument("--hole", default="t")
    p.add_argument("--value-hole", dest="value_hole", default="s")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_obligation)

    p = sub.add_parser("eval", help="evaluate a closed term file")
    p.add_argument("termfile")
    p.add_argument("--fuel", type=int)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("demo", help="run a case-study suite")
    p.add_argument("name")
    p.add_argument("--depth", type=int)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_demo)

    p = sub.add_parser("corpus", help="check the shipped corpus end to end")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_corpus)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (FormulaSyntaxError, TypeAnnotationMissing, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (KeyError, ValueError, TermError, NotANormalForm, HerbrandError, CaseStudyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
