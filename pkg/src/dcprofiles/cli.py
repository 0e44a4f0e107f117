"""Command-line interface: ``dcprof encode|validate|convert|reason|roundtrip|check``.

Exit codes: 0 success, 1 a check failed (violations, non-membership,
non-subsumption), 2 usage or I/O error. Results go to stdout, diagnostics
to stderr; ``--json`` prints one machine-readable report.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Optional

from .compare import kb_equal_modulo_renaming
from .dl import Profile, VocabularyError, check_profile
from .encode import EncodingError, InvalidModel, UnsupportedFeature, encode, encode_dcs
from .io import ModelIOError, dumps_model, read_model, write_model
from .kbtext import KBSyntaxError, axiom_text, read_kb, serialize_kb_text
from .model import Family, validate_model
from .reasoner import (
    FALSE, TRUE, UNKNOWN, BudgetExceeded, ModelFinder, classify, default_bound, structure,
)
from .render import RenderError, render_model
from .semantics import InterpretationError, format_interpretation, is_model, parse_interpretation

OK, FAILED, USAGE = 0, 1, 2


class _Usage(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse exits with 2 already; keep stderr format
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(USAGE)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="dcprof", description="Conceptual models and their DC profile knowledge bases.")
    p.add_argument("--json", action="store_true", help="print a machine-readable report")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    e = sub.add_parser("encode", help="encode a model (or a directory of models) into a kb")
    e.add_argument("input")
    e.add_argument("--profile", required=True, choices=[x.value for x in Profile])
    e.add_argument("-o", "--output")
    e.add_argument("--jobs", type=int, default=1)

    v = sub.add_parser("validate", help="validate a model or check a kb against a profile")
    g = v.add_mutually_exclusive_group(required=True)
    g.add_argument("--model")
    g.add_argument("--kb")
    v.add_argument("--profile", choices=[x.value for x in Profile])
    v.add_argument("--jobs", type=int, default=1)

    c = sub.add_parser("convert", help="encode to dcs and render in another family")
    c.add_argument("input")
    c.add_argument("--to", required=True, choices=[f.value for f in Family])
    c.add_argument("-o", "--output")

    r = sub.add_parser("reason", help="subsumption or classification over concept names")
    g = r.add_mutually_exclusive_group(required=True)
    g.add_argument("--subsumes", nargs=2, metavar=("SUB", "SUPER"))
    g.add_argument("--classify", action="store_true")
    r.add_argument("--kb", required=True)
    r.add_argument("--bound", type=int)

    t = sub.add_parser("roundtrip", help="model -> dcs -> family -> dcs, compared up to renaming")
    t.add_argument("input")
    t.add_argument("--via", default="dcs", choices=["dcs"])
    t.add_argument("--to", required=True, choices=[f.value for f in Family])

    k = sub.add_parser("check", help="check an interpretation against a kb")
    k.add_argument("--kb", required=True)
    k.add_argument("--interp", required=True)
    return p


# -- commands ----------------------------------------------------------------


def _report(args, results, violations=(), bound=None) -> dict:
    inputs = [x for x in (getattr(args, "input", None), getattr(args, "model", None),
                          getattr(args, "kb", None), getattr(args, "interp", None)) if x]
    out = {"command": args.command, "inputs": inputs, "results": list(results),
           "violations": [str(v) for v in violations]}
    if bound is not None:
        out["bound"] = bound
    return out


def _diagnose(args, err, violations) -> None:
    if not args.json:
        for v in violations:
            err.write(f"{v}\n")


def _inputs(path: str, suffix: str) -> list[Path]:
    p = Path(path)
    if p.is_dir():
        return sorted(x for x in p.iterdir() if x.name.endswith(suffix))
    if not p.exists():
        raise _Usage(f"no such file: {path}")
    return [p]


def _encode_one(path: Path, profile: str):
    try:
        kb = encode(read_model(path), profile)
        return path, serialize_kb_text(kb), []
    except InvalidModel as e:
        return path, None, [f"{path}: {v}" for v in e.violations]
    except UnsupportedFeature as e:
        return path, None, [f"{path}: {e}"]


def cmd_encode(args, out, err):
    files = _inputs(args.input, ".json")
    with ThreadPoolExecutor(max_workers=max(1, args.jobs)) as pool:
        done = list(pool.map(lambda f: _encode_one(f, args.profile), files))
    violations = [v for _, _, vs in done for v in vs]
    _diagnose(args, err, violations)
    results = []
    batch = Path(args.input).is_dir()
    for path, text, _ in done:
        if text is None:
            continue
        if args.output:
            target = Path(args.output) / (path.stem.replace(".cm", "") + ".kb") if batch else Path(args.output)
            if batch:
                target.parent.mkdir(parents=True, exist_ok=True)
            target.write_text(text, encoding="utf-8", newline="\n")
            results.append({"input": str(path), "output": str(target)})
        else:
            results.append({"input": str(path), "kb": text})
            if not args.json:
                out.write(text)
    return (FAILED if violations else OK), _report(args, results, violations)


def _validate_one(path: Path):
    return path, [f"{path}: {v}" for v in validate_model(read_model(path))]


def cmd_validate(args, out, err):
    if args.model:
        files = _inputs(args.model, ".json")
        with ThreadPoolExecutor(max_workers=max(1, args.jobs)) as pool:
            done = list(pool.map(_validate_one, files))
        violations = [v for _, vs in done for v in vs]
        _diagnose(args, err, violations)
        results = [{"input": str(p), "valid": not vs} for p, vs in done]
        if not args.json:
            for r in results:
                out.write(f"{r['input']}: {'valid' if r['valid'] else 'invalid'}\n")
        return (FAILED if violations else OK), _report(args, results, violations)
    kb = read_kb(args.kb)
    profile = Profile(args.profile) if args.profile else None
    rep = check_profile(kb, profile)
    for f in rep.lint:
        err.write(f"warning: {f}\n")
    _diagnose(args, err, rep.violations)
    result = {"profile": rep.profile.value, "member": rep.member, "lint": [str(f) for f in rep.lint]}
    if not args.json:
        out.write(f"{'member' if rep.member else 'not a member'} of {rep.profile.value}\n")
    return (OK if rep.member else FAILED), _report(args, [result], rep.violations)


def cmd_convert(args, out, err):
    model = read_model(args.input)
    rendered = render_model(encode_dcs(model), args.to)
    text = dumps_model(rendered)
    if args.output:
        write_model(rendered, args.output)
    elif not args.json:
        out.write(text)
    return OK, _report(args, [{"family": args.to, "output": args.output or "-"}])


def cmd_reason(args, out, err):
    kb = read_kb(args.kb)
    bound = args.bound if args.bound is not None else default_bound(kb)
    if bound < 1:
        raise _Usage("--bound must be at least 1")
    if args.classify:
        res = classify(kb, bound)
        results = [{"sub": a, "super": b, "status": s} for (a, b), s in sorted(res.status.items())
                   if a != b]
        if not args.json:
            out.write(f"bound {bound}\n")
            for a, b in sorted(res.order):
                if a != b:
                    out.write(f"{a} <= {b}\n")
            for cls in res.equivalence_classes:
                if len(cls) > 1:
                    out.write("equivalent " + " ".join(cls) + "\n")
            for a, b in res.unknown:
                out.write(f"unknown-at-bound {a} <= {b}\n")
        return OK, _report(args, results, bound=bound)
    a, b = args.subsumes
    for n in (a, b):
        if n not in kb.vocabulary.concepts:
            raise _Usage(f"{n} is not a concept of {args.kb}")
    result = {"sub": a, "super": b}
    if structure(kb).subsumes(a, b):
        status = TRUE
    else:
        with ModelFinder(kb, bound) as mf:
            cm = mf.countermodel(a, b)
        status = FALSE if cm else UNKNOWN
        if cm:
            result["countermodel"] = format_interpretation(cm.interp)
            result["witness"] = cm.witness
    result["status"] = status
    if not args.json:
        out.write(f"{status}\n")
        if status != TRUE:
            out.write(f"bound {bound}\n")
        if "countermodel" in result:
            out.write(f"witness {result['witness']}\n{result['countermodel']}")
    return (OK if status == TRUE else FAILED), _report(args, [result], bound=bound)


def cmd_roundtrip(args, out, err):
    model = read_model(args.input)
    kb1 = encode_dcs(model)
    kb2 = encode_dcs(render_model(kb1, args.to))
    mapping = kb_equal_modulo_renaming(kb1, kb2)
    result = {"equal": mapping is not None, "mapping": mapping or {}}
    violations = []
    if mapping is None:
        a = {axiom_text(x) for x in kb1.axioms}
        b = {axiom_text(x) for x in kb2.axioms}
        violations = [f"- {x}" for x in sorted(a - b)] + [f"+ {x}" for x in sorted(b - a)]
        if not violations:
            violations = ["vocabularies or side conditions differ"]
    if not args.json:
        if mapping is not None:
            out.write("equal up to renaming\n")
            for k, v in mapping.items():
                if k != v:
                    out.write(f"  {k} -> {v}\n")
        else:
            out.write("different\n")
            for v in violations:
                out.write(v + "\n")
    return (OK if mapping is not None else FAILED), _report(args, [result], violations)


def cmd_check(args, out, err):
    kb = read_kb(args.kb)
    interp = parse_interpretation(Path(args.interp).read_text(encoding="utf-8"))
    res = is_model(interp, kb)
    if not args.json:
        out.write("model\n" if res.ok else "not a model\n")
        for f in res.failures:
            out.write(f"  {f}\n")
    return (OK if res.ok else FAILED), _report(args, [{"model": res.ok}], res.failures)


COMMANDS = {"encode": cmd_encode, "validate": cmd_validate, "convert": cmd_convert,
            "reason": cmd_reason, "roundtrip": cmd_roundtrip, "check": cmd_check}


def main(argv: Optional[list[str]] = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        code, report = COMMANDS[args.command](args, out, err)
    except (_Usage, ModelIOError, KBSyntaxError, VocabularyError, OSError) as e:
        print(f"error: {e}", file=err)
        return USAGE
    except (InvalidModel, UnsupportedFeature, EncodingError, RenderError,
            InterpretationError, BudgetExceeded) as e:
        print(f"error: {e}", file=err)
        return FAILED
    if args.json:
        out.write(json.dumps(report, indent=2, sort_keys=True) + "\n")
    return code


if __name__ == "__main__":
    raise SystemExit(main())
