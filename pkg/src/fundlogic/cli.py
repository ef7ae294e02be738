"""Command-line front end.

Exit codes: 0 for an affirmative answer or success, 1 for a negative
answer, 2 for usage or input errors.  Every command accepts ``--json``.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Callable, Sequence

from . import algebra, decide as dec, enumeration, fitch, frames, represent, syntax, translate

__all__ = ["main", "run", "build_parser", "CorpusEntry", "load_corpus", "default_corpus", "parse_corpus_line"]

LOGICS = ("F", "O", "J", "C")


class UsageError(Exception):
    """Bad input; reported on stderr with exit code 2."""


@dataclass(frozen=True)
class CorpusEntry:
    logic: str
    premise: syntax.Formula
    conclusion: syntax.Formula
    expected: bool
    text: str

    @property
    def query(self) -> str:
        return f"{syntax.render(self.premise)} |- {syntax.render(self.conclusion)}"


def default_corpus() -> Path:
    return Path(str(resources.files("fundlogic") / "data" / "verdicts.txt"))


def parse_corpus_line(line: str) -> CorpusEntry | None:
    """``"F: p |- ~~p : yes"``; blank and ``#`` lines give None."""
    text = line.strip()
    if not text or text.startswith("#"):
        return None
    try:
        logic, rest = text.split(":", 1)
        query, verdict = rest.rsplit(":", 1)
        lhs, rhs = query.split("|-")
    except ValueError:
        raise UsageError(f"malformed corpus line: {text!r}") from None
    logic, verdict = logic.strip().upper(), verdict.strip().lower()
    if logic not in LOGICS or verdict not in ("yes", "no"):
        raise UsageError(f"malformed corpus line: {text!r}")
    try:
        phi, psi = syntax.parse(lhs, syntax.PROPOSITIONAL), syntax.parse(rhs, syntax.PROPOSITIONAL)
    except ValueError as e:
        raise UsageError(f"corpus line {text!r}: {e}") from None
    return CorpusEntry(logic, phi, psi, verdict == "yes", text)


def load_corpus(path: str | Path | None = None) -> list[CorpusEntry]:
    """Entries from a verdict file, or from every ``*.txt`` in a directory."""
    path = default_corpus() if path is None else Path(path)
    files = sorted(path.glob("*.txt")) if path.is_dir() else [path]
    if not files:
        raise UsageError(f"no corpus files in {path}")
    out = []
    for f in files:
        for line in f.read_text(encoding="utf-8").splitlines():
            e = parse_corpus_line(line)
            if e is not None:
                out.append(e)
    return out


# ---------------------------------------------------------------------------
# Helpers
# ---------------------------------------------------------------------------

def _emit(args, obj, text: str | Callable[[], str]) -> None:
    if args.json:
        print(json.dumps(obj, indent=2))
    else:
        print(text() if callable(text) else text)


def _table(header: Sequence[str], rows: Sequence[Sequence]) -> str:
    cells = [list(map(str, header))] + [[str(c) for c in r] for r in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(header))]
    numeric = [all(r[i].isdigit() for r in cells[1:]) for i in range(len(header))]
    lines = ["  ".join(c.rjust(w) if num else c.ljust(w) for c, w, num in zip(r, widths, numeric)).rstrip()
             for r in cells]
    lines.insert(1, "  ".join("-" * w for w in widths))
    return "\n".join(lines)


def _formula(text: str, profile=syntax.FULL) -> syntax.Formula:
    try:
        return syntax.parse(text, profile)
    except ValueError as e:
        raise UsageError(f"cannot parse {text!r}: {e}") from None


def _read_json(path: str) -> dict:
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as e:
        raise UsageError(f"cannot read {path}: {e.strerror}") from None
    except json.JSONDecodeError as e:
        raise UsageError(f"{path} is not valid JSON: {e}") from None


def _frame(path: str) -> frames.Frame:
    try:
        return frames.Frame.from_json(_read_json(path))
    except (KeyError, ValueError, TypeError) as e:
        raise UsageError(f"{path} is not a frame: {e}") from None


def _algebra(path: str) -> algebra.Algebra:
    try:
        return algebra.Algebra.from_json(_read_json(path))
    except (KeyError, ValueError, TypeError) as e:
        raise UsageError(f"{path} is not an algebra: {e}") from None


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def cmd_parse(args) -> int:
    f = _formula(args.formula)
    _emit(args, {"formula": syntax.render(f), "ast": repr(f)}, lambda: f"{syntax.render(f)}\n{f!r}")
    return 0


def cmd_check_proof(args) -> int:
    try:
        text = Path(args.file).read_text(encoding="utf-8") if args.file != "-" else sys.stdin.read()
        p = fitch.parse_proof(text)
    except OSError as e:
        raise UsageError(f"cannot read {args.file}: {e.strerror}") from None
    except ValueError as e:
        raise UsageError(str(e)) from None
    mode = args.logic + ("Q" if args.first_order and not args.logic.endswith("Q") else "")
    try:
        concl = fitch.check_proof(p, mode)
    except fitch.ProofError as e:
        _emit(args, {"valid": False, "line": e.line, "error": e.message}, f"invalid: {e}")
        return 1
    shown = syntax.render(concl) if concl is not None else None
    obj = {"valid": True, "assumption": syntax.render(p.assumption), "conclusion": shown}
    _emit(args, obj, f"valid: {obj['assumption']} |- {shown}")
    return 0


def cmd_decide(args) -> int:
    phi, psi = _formula(args.premise), _formula(args.conclusion)
    try:
        t = time.perf_counter()
        ok = dec.decide(phi, psi, args.logic)
        elapsed = time.perf_counter() - t
    except dec.DecideError as e:
        raise UsageError(str(e)) from None
    trace = None
    if args.trace:
        if args.logic in ("F", "O"):
            universe = syntax.subformulas(phi) | syntax.subformulas(psi)
            trace = sorted(str(s) for s in dec.saturate(universe, 1 if args.logic == "F" else 2))
        else:
            trace = [f"no saturation trace for {args.logic}"]
    verdict = "derivable" if ok else "not derivable"
    obj = {"logic": args.logic, "premise": syntax.render(phi), "conclusion": syntax.render(psi),
           "derivable": ok}
    if trace is not None:
        obj["trace"] = trace

    def text():
        lines = [verdict]
        if trace is not None:
            lines += trace
        return "\n".join(lines)

    _emit(args, obj, text)
    if args.verbose:
        print(f"decided in {elapsed * 1000:.2f} ms", file=sys.stderr)
    return 0 if ok else 1


def cmd_countermodel(args) -> int:
    phi, psi = _formula(args.premise), _formula(args.conclusion)
    try:
        c = dec.countermodel(phi, psi, args.max_size, args.kind)
    except dec.DecideError as e:
        raise UsageError(str(e)) from None
    if c is None:
        _emit(args, {"found": False}, f"no countermodel with at most {args.max_size} elements")
        return 1
    obj = {"found": True, **c.to_json()}

    def text():
        if c.kind == "algebra":
            L = c.algebra.lattice
            lines = [f"algebra with {c.size} elements", f"covers: {L.covers()}",
                     f"neg: {list(c.algebra.neg)}", f"valuation: {c.valuation}"]
        else:
            F = c.model.frame
            lines = [f"frame with {c.size} states, fails at {F.label(c.state)}",
                     json.dumps(c.model.to_json())]
        return "\n".join(lines)

    _emit(args, obj, text)
    return 0


_LATTICE_CLASSES = {
    "lattices": lambda L: True,
    "distributive": lambda L: L.is_distributive,
    "pseudocomplemented": lambda L: L.is_pseudocomplemented,
}


def cmd_enumerate(args) -> int:
    if args.cls in _LATTICE_CLASSES:
        keep = _LATTICE_CLASSES[args.cls]
        items = [algebra.Algebra(L) for L in enumeration.enumerate_lattices(args.size) if keep(L)]
    else:
        items = list(enumeration.enumerate_expansions(args.size, args.cls))
    if args.count_only:
        _emit(args, {"class": args.cls, "size": args.size, "count": len(items)}, str(len(items)))
    else:
        _emit(args, [A.to_json() for A in items], lambda: "\n".join(json.dumps(A.to_json()) for A in items))
    return 0


def cmd_fixpoints(args) -> int:
    F = _frame(args.frame)
    fixes = sorted(frames.fixpoints(F), key=lambda A: (bin(A).count("1"), A))
    obj = [F.members(A) for A in fixes]
    _emit(args, obj, lambda: "\n".join("{" + ", ".join(m) + "}" for m in obj))
    return 0


def cmd_model_check(args) -> int:
    try:
        M = frames.Model.from_json(_read_json(args.model))
    except frames.NotAFixpoint as e:
        raise UsageError(str(e)) from None
    except (KeyError, ValueError, TypeError) as e:
        raise UsageError(f"{args.model} is not a model: {e}") from None
    f = _formula(args.formula)
    try:
        ext = frames.extension(M, f)
    except frames.UninterpretedError as e:
        raise UsageError(str(e.args[0])) from None
    F = M.frame
    states = F.members(ext)
    if args.state is None:
        _emit(args, {"formula": syntax.render(f), "forcing": states}, "{" + ", ".join(states) + "}")
        return 0
    if args.state not in [F.label(x) for x in F.states]:
        raise UsageError(f"no state {args.state!r}")
    yes = args.state in states
    _emit(args, {"formula": syntax.render(f), "state": args.state, "forces": yes},
          f"{args.state} {'forces' if yes else 'does not force'} {syntax.render(f)}")
    return 0 if yes else 1


def cmd_check_frame(args) -> int:
    F = _frame(args.frame)
    if args.condition:
        try:
            yes = frames.frame_condition(F, args.condition)
        except ValueError as e:
            raise UsageError(str(e)) from None
        _emit(args, {args.condition: yes}, f"{args.condition}: {'yes' if yes else 'no'}")
        return 0 if yes else 1
    res = {k: frames.frame_condition(F, k) for k in frames.FRAME_CONDITIONS}
    _emit(args, res, lambda: _table(["condition", "holds"], [(k, "yes" if v else "no") for k, v in res.items()]))
    return 0


_CONSTRUCTIONS = ("negthm1", "negthm2", "negthm3", "negthm4", "antitone", "fi", "fi-imp",
                  "combimp", "combimpneg", "impthm1", "impthm2", "impthm3", "impthm4", "impthm5")


def _build(construction: str, A: algebra.Algebra, dense: str) -> represent.Representation:
    L = A.lattice
    V, Lam = represent.dense_sets(L, dense)

    def need(what):
        if getattr(A, what) is None:
            raise UsageError(f"construction {construction} needs a '{what}' table")
        return getattr(A, what)

    if construction.startswith("negthm"):
        cls = ("pre", "proto", "ultraweak", "weak")[int(construction[-1]) - 1]
        return represent.frame_from_negation(L, need("neg"), cls, V, Lam)
    if construction == "antitone":
        return represent.frame_from_antitone(L, need("neg"), Lam)
    if construction == "fi":
        return represent.filter_ideal(L, negation=need("neg"))
    if construction == "fi-imp":
        return represent.filter_ideal(L, implication=need("imp"))
    if construction == "combimp":
        return represent.frame_from_preconditional(L, need("imp"))
    if construction == "combimpneg":
        return represent.two_relation(L, need("imp"), need("neg"))
    return represent.frame_from_preimplication(L, need("imp"), int(construction[-1]), V, Lam)


def cmd_represent(args) -> int:
    A = _algebra(args.algebra)
    try:
        rep = _build(args.construction, A, args.dense)
    except represent.RepresentationError as e:
        raise UsageError(str(e)) from None
    report = represent.verify_embedding(rep)
    obj = {**rep.to_json(), "ok": report.ok, "failures": report.failures}
    L, F = rep.lattice, rep.frame

    def text():
        rows = [(L.label(a), "{" + ", ".join(F.members(rep.images[a])) + "}") for a in L.elements]
        lines = [json.dumps(F.to_json()), _table(["element", "image"], rows)]
        lines.append("embedding: ok" if report.ok else "embedding: FAILED\n" + "\n".join(report.failures))
        return "\n".join(lines)

    _emit(args, obj, text)
    return 0 if report.ok else 1


def cmd_classify(args) -> int:
    A = _algebra(args.algebra)
    L = A.lattice
    obj = {"size": L.n, "distributive": L.is_distributive, "pseudocomplemented": L.is_pseudocomplemented}
    if A.neg is not None:
        obj["negation"] = [c for c in algebra.NEGATION_CLASSES if c in algebra.classify_negation(L, A.neg)]
    if A.imp is not None:
        got = algebra.classify_implication(L, A.imp)
        obj["implication"] = [c for c in algebra.IMPLICATION_CLASSES if c in got]

    def text():
        rows = [(k, ", ".join(v) if isinstance(v, list) else ("yes" if v is True else "no" if v is False else v))
                for k, v in obj.items()]
        return _table(["property", "value"], rows)

    _emit(args, obj, text)
    return 0


def cmd_translate(args) -> int:
    f = _formula(args.formula)
    try:
        if args.which == "g":
            out = syntax.render(translate.g_translate(f))
        else:
            out = translate.render_modal(translate.TRANSLATIONS[args.which](f))
    except translate.TranslationError as e:
        raise UsageError(str(e)) from None
    _emit(args, {"which": args.which, "input": syntax.render(f), "output": out}, out)
    return 0


def cmd_correspond(args) -> int:
    try:
        reports = frames.correspondence_test(args.which, args.max_size, jobs=args.jobs)
    except ValueError as e:
        raise UsageError(str(e)) from None
    rows = [(r.key, r.condition, r.property, r.frames, r.holding, r.violations) for r in reports.values()]
    obj = [dict(zip(("key", "condition", "property", "frames", "holding", "violations"), r)) for r in rows]
    _emit(args, obj, lambda: _table(["key", "condition", "property", "frames", "holding", "violations"], rows))
    return 0 if all(r.ok for r in reports.values()) else 1


def census_table(lo: int, hi: int, jobs: int = 1) -> dict[int, dict[str, int]]:
    return enumeration.census(range(lo, hi + 1), jobs=jobs)


def _figure_note(path) -> None:
    print(f"figure written to {path}", file=sys.stderr)


def cmd_reproduce(args) -> int:
    from . import report

    if args.what == "figure-counts":
        if args.min < 1 or args.max < args.min:
            raise UsageError("need 1 <= --min <= --max")
        table = census_table(args.min, args.max, args.jobs)
        sizes = sorted(table)
        rows = [[row.title] + [table[n][row.key] for n in sizes] for row in enumeration.CENSUS_ROWS]
        obj = {row.key: {str(n): table[n][row.key] for n in sizes} for row in enumeration.CENSUS_ROWS}
        _emit(args, obj, lambda: _table(["n"] + [str(n) for n in sizes], rows))
        if not args.no_figure:
            _figure_note(report.census_figure(table, args.figure or "figure-counts.png"))
        return 0

    entries = load_corpus(args.corpus)
    results = []
    for e in entries:
        got = dec.decide(e.premise, e.conclusion, e.logic)
        results.append({"logic": e.logic, "query": e.query, "expected": e.expected, "got": got,
                        "ok": got == e.expected})
    yn = {True: "yes", False: "no"}
    rows = [(r["logic"], r["query"], yn[r["expected"]], yn[r["got"]], "ok" if r["ok"] else "MISMATCH")
            for r in results]
    bad = sum(not r["ok"] for r in results)

    def text():
        return _table(["logic", "entailment", "expected", "got", "status"], rows) + \
            f"\n{len(results) - bad}/{len(results)} verdicts match"

    _emit(args, results, text)
    if not args.no_figure:
        _figure_note(report.verdicts_figure(results, args.figure or "verdicts.png"))
    return 0 if bad == 0 else 1


# ---------------------------------------------------------------------------
# Argument parsing
# ---------------------------------------------------------------------------

def _positive(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", default=argparse.SUPPRESS,
                        help="structured output")
    common.add_argument("--jobs", type=_positive, default=argparse.SUPPRESS,
                        help="worker processes (default: available CPUs)")

    p = argparse.ArgumentParser(prog="fundlogic", description=__doc__.splitlines()[0], parents=[common])
    p.set_defaults(json=False, jobs=os.cpu_count() or 1)
    sub = p.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def add(name, fn, help_):
        sp = sub.add_parser(name, help=help_, parents=[common])
        sp.set_defaults(func=fn)
        return sp

    sp = add("parse", cmd_parse, "parse and pretty-print a formula")
    sp.add_argument("formula")

    sp = add("check-proof", cmd_check_proof, "check a Fitch proof file ('-' for stdin)")
    sp.add_argument("--logic", default="F", choices=[m + q for m in LOGICS for q in ("", "Q")])
    sp.add_argument("--first-order", action="store_true", help="enable the quantifier rules")
    sp.add_argument("file")

    sp = add("decide", cmd_decide, "decide premise |- conclusion")
    sp.add_argument("--logic", default="F", choices=LOGICS)
    sp.add_argument("--trace", action="store_true", help="dump the saturated sequent set")
    sp.add_argument("-v", "--verbose", action="store_true", help="report timing on stderr")
    sp.add_argument("premise")
    sp.add_argument("conclusion")

    sp = add("countermodel", cmd_countermodel, "search for a countermodel in F")
    sp.add_argument("--kind", default="algebra", choices=("algebra", "frame"))
    sp.add_argument("--max-size", type=_positive, default=5)
    sp.add_argument("premise")
    sp.add_argument("conclusion")

    sp = add("enumerate", cmd_enumerate, "enumerate lattices or algebras up to isomorphism")
    sp.add_argument("--class", dest="cls", required=True,
                    choices=tuple(_LATTICE_CLASSES) + algebra.NEGATION_CLASSES)
    sp.add_argument("--size", type=_positive, required=True)
    sp.add_argument("--count-only", action="store_true")

    sp = add("fixpoints", cmd_fixpoints, "list the fixpoints of a frame")
    sp.add_argument("frame")

    sp = add("model-check", cmd_model_check, "states of a model forcing a formula")
    sp.add_argument("--state", help="exit 0/1 according to whether this state forces the formula")
    sp.add_argument("model")
    sp.add_argument("formula")

    sp = add("check-frame", cmd_check_frame, "test frame conditions")
    sp.add_argument("--condition", choices=tuple(frames.FRAME_CONDITIONS))
    sp.add_argument("frame")

    sp = add("represent", cmd_represent, "build a frame representing an algebra")
    sp.add_argument("--construction", required=True, choices=_CONSTRUCTIONS)
    sp.add_argument("--algebra", required=True)
    sp.add_argument("--dense", default="all", choices=("all", "irreducible"))

    sp = add("classify", cmd_classify, "classify the operations of an algebra")
    sp.add_argument("--algebra", required=True)

    sp = add("translate", cmd_translate, "apply the g, t or m translation")
    sp.add_argument("--which", required=True, choices=("g", "t", "m"))
    sp.add_argument("formula")

    sp = add("correspond", cmd_correspond, "check frame correspondences on all small frames")
    sp.add_argument("--which", default="all", choices=("all",) + tuple(frames.CORRESPONDENCES))
    sp.add_argument("--max-size", type=_positive, default=4)

    sp = add("reproduce", cmd_reproduce, "regenerate the census table or the verdict corpus")
    sp.add_argument("what", choices=("figure-counts", "verdicts"))
    sp.add_argument("--min", type=_positive, default=2, help="smallest lattice size (figure-counts)")
    sp.add_argument("--max", type=_positive, default=7, help="largest lattice size (figure-counts)")
    sp.add_argument("--corpus", help="verdict file or directory of *.txt files (verdicts)")
    sp.add_argument("--figure", metavar="PNG",
                    help="figure file (default: figure-counts.png or verdicts.png)")
    sp.add_argument("--no-figure", action="store_true", help="skip rendering the figure")
    return p


def run(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        return args.func(args)
    except UsageError as e:
        print(f"fundlogic: error: {e}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run())
