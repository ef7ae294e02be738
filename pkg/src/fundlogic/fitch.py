"""Fitch-style proofs: data structures, checker, text format, and constructions.

A proof is a sequence whose first entry is a formula (its assumption) and
whose later entries are justified formulas or nested proofs.  Citations are
0-based indices into the node that contains the citing line.

Modes: ``F`` has introduction and elimination rules only, ``O`` adds
reductio, ``J`` adds reiteration, ``C`` adds both.  Any mode can be marked
first-order to enable the quantifier rules.

Besides the standard rules there is ``rep``, which repeats a formula of the
same node.  It is derivable (conjoin the formula with itself, then eliminate)
and only exists so that proofs can be written the short way.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterator, Union

from .syntax import (
    FULL, And, Exists, Forall, Formula, Neg, Or, all_vars, free_vars, parse, render,
    substitutable, substitute,
)

__all__ = [
    "Rule", "Justification", "Line", "Sub", "ProofNode", "Logic", "Mode", "ProofError",
    "check_proof", "is_proof", "conclusion", "assumption",
    "glue", "pair", "cases", "contrapose", "dni", "ConstructionError",
    "parse_proof", "format_proof", "ProofFormatError", "line_count",
]


class Rule(str, Enum):
    HYP = "hyp"
    AND_I = "andI"
    AND_E = "andE"
    OR_I = "orI"
    OR_E = "orE"
    NEG_I = "negI"
    NEG_E = "negE"
    REIT = "reit"
    RAA = "raa"
    REP = "rep"
    FORALL_I = "forallI"
    FORALL_E = "forallE"
    EXISTS_I = "existsI"
    EXISTS_E = "existsE"


# number of cited lines and cited subproofs for each rule
_ARITY: dict[Rule, tuple[int, int]] = {
    Rule.HYP: (0, 0),
    Rule.AND_I: (2, 0),
    Rule.AND_E: (1, 0),
    Rule.OR_I: (1, 0),
    Rule.OR_E: (1, 2),
    Rule.NEG_I: (1, 1),
    Rule.NEG_E: (2, 0),
    Rule.REIT: (0, 0),
    Rule.RAA: (1, 1),
    Rule.REP: (1, 0),
    Rule.FORALL_I: (1, 0),
    Rule.FORALL_E: (1, 0),
    Rule.EXISTS_I: (1, 0),
    Rule.EXISTS_E: (1, 1),
}
_QUANT_RULES = {Rule.FORALL_I, Rule.FORALL_E, Rule.EXISTS_I, Rule.EXISTS_E}


@dataclass(frozen=True)
class Justification:
    rule: Rule
    cites: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "rule", Rule(self.rule))
        object.__setattr__(self, "cites", tuple(self.cites))


HYP = Justification(Rule.HYP)


@dataclass(frozen=True)
class Line:
    formula: Formula
    just: Justification = HYP


@dataclass(frozen=True)
class Sub:
    proof: "ProofNode"


Entry = Union[Line, Sub]


@dataclass(frozen=True)
class ProofNode:
    entries: tuple[Entry, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "entries", tuple(self.entries))
        if not self.entries or not isinstance(self.entries[0], Line):
            raise ValueError("a proof must start with a formula")

    @property
    def assumption(self) -> Formula:
        return self.entries[0].formula

    @property
    def conclusion(self) -> Formula | None:
        last = self.entries[-1]
        return last.formula if isinstance(last, Line) else None

    def __len__(self) -> int:
        return len(self.entries)


def assumption(p: ProofNode) -> Formula:
    return p.assumption


def conclusion(p: ProofNode) -> Formula | None:
    """Last entry if it is a formula, else None."""
    return p.conclusion


class Logic(str, Enum):
    F = "F"
    O = "O"  # noqa: E741
    J = "J"
    C = "C"

    @property
    def reiteration(self) -> bool:
        return self in (Logic.J, Logic.C)

    @property
    def reductio(self) -> bool:
        return self in (Logic.O, Logic.C)


@dataclass(frozen=True)
class Mode:
    logic: Logic = Logic.F
    first_order: bool = False

    @classmethod
    def of(cls, mode: "Mode | Logic | str") -> "Mode":
        if isinstance(mode, Mode):
            return mode
        if isinstance(mode, str) and mode.upper().endswith("Q"):
            return cls(Logic(mode.upper()[:-1]), True)
        return cls(Logic(mode))


class ProofError(Exception):
    """First violation found; ``path`` indexes entries from the root."""

    def __init__(self, path: tuple[int, ...], line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.path = path
        self.line = line
        self.message = message


# ---------------------------------------------------------------------------
# Checker
# ---------------------------------------------------------------------------

@dataclass
class _Ctx:
    mode: Mode
    next_line: int = 1


def _fail(path, line, msg):
    raise ProofError(tuple(path), line, msg)


def _line_at(node: ProofNode, idx: int, k: int, path, ln) -> Formula:
    if not 0 <= idx < k:
        _fail(path, ln, f"citation {idx} does not point to an earlier entry")
    e = node.entries[idx]
    if not isinstance(e, Line):
        _fail(path, ln, f"citation {idx} is a subproof, expected a formula")
    return e.formula


def _sub_at(node: ProofNode, idx: int, k: int, path, ln) -> ProofNode:
    if not 0 <= idx < k:
        _fail(path, ln, f"citation {idx} does not point to an earlier entry")
    e = node.entries[idx]
    if not isinstance(e, Sub):
        _fail(path, ln, f"citation {idx} is a formula, expected a subproof")
    return e.proof


def _check_node(node: ProofNode, reiterables: frozenset, ctx: _Ctx, path: list[int]) -> None:
    mode = ctx.mode
    seen: list[Formula] = []  # formula entries so far in this node
    for k, entry in enumerate(node.entries):
        here = path + [k]
        if isinstance(entry, Sub):
            inner = reiterables | frozenset(seen) if mode.logic.reiteration else frozenset()
            _check_node(entry.proof, inner, ctx, here)
            continue
        ln = ctx.next_line
        ctx.next_line += 1
        phi, rule, cites = entry.formula, entry.just.rule, entry.just.cites
        if k == 0:
            if rule is not Rule.HYP:
                _fail(here, ln, "the first entry of a proof must be its assumption (hyp)")
            seen.append(phi)
            continue
        if rule is Rule.HYP:
            _fail(here, ln, "hyp is only allowed as the first entry of a proof")
        if rule in _QUANT_RULES and not mode.first_order:
            _fail(here, ln, f"{rule.value} needs a first-order mode")
        if rule is Rule.REIT and not mode.logic.reiteration:
            _fail(here, ln, f"reiteration is not allowed in {mode.logic.value}")
        if rule is Rule.RAA and not mode.logic.reductio:
            _fail(here, ln, f"reductio is not allowed in {mode.logic.value}")
        n_lines, n_subs = _ARITY[rule]
        if len(cites) != n_lines + n_subs:
            _fail(here, ln, f"{rule.value} takes {n_lines + n_subs} citation(s), got {len(cites)}")
        _check_rule(node, k, phi, rule, cites, reiterables, seen, here, ln, mode)
        seen.append(phi)


def _check_rule(node, k, phi, rule, cites, reiterables, seen, path, ln, mode):  # noqa: C901
    def line(i):
        return _line_at(node, i, k, path, ln)

    def sub(i):
        return _sub_at(node, i, k, path, ln)

    if rule is Rule.AND_I:
        a, b = line(cites[0]), line(cites[1])
        if phi != And(a, b):
            _fail(path, ln, f"andI from {render(a)} and {render(b)} gives {render(And(a, b))}")
    elif rule is Rule.AND_E:
        a = line(cites[0])
        if not (isinstance(a, And) and phi in (a.left, a.right)):
            _fail(path, ln, f"andE: {render(phi)} is not a conjunct of {render(a)}")
    elif rule is Rule.OR_I:
        a = line(cites[0])
        if not (isinstance(phi, Or) and a in (phi.left, phi.right)):
            _fail(path, ln, f"orI: {render(a)} is not a disjunct of {render(phi)}")
    elif rule is Rule.OR_E:
        d = line(cites[0])
        if not isinstance(d, Or):
            _fail(path, ln, f"orE: {render(d)} is not a disjunction")
        if (cites[1], cites[2]) != (k - 2, k - 1):
            _fail(path, ln, "orE: the two subproofs must immediately precede the conclusion")
        s1, s2 = sub(cites[1]), sub(cites[2])
        if s1.assumption != d.left or s2.assumption != d.right:
            _fail(path, ln, "orE: subproofs must assume the two disjuncts in order")
        if s1.conclusion != phi or s2.conclusion != phi:
            _fail(path, ln, f"orE: both subproofs must end with {render(phi)}")
    elif rule in (Rule.NEG_I, Rule.RAA):
        i, s = cites
        if s != k - 1:
            _fail(path, ln, f"{rule.value}: the subproof must immediately precede the conclusion")
        psi = line(i)
        if i >= s:
            _fail(path, ln, f"{rule.value}: the cited formula must come before the subproof")
        sp = sub(s)
        if sp.conclusion != Neg(psi):
            _fail(path, ln, f"{rule.value}: subproof must end with {render(Neg(psi))}")
        if rule is Rule.NEG_I:
            if phi != Neg(sp.assumption):
                _fail(path, ln, f"negI: conclusion must be {render(Neg(sp.assumption))}")
        else:
            if Neg(phi) != sp.assumption:
                _fail(path, ln, f"raa: subproof must assume {render(Neg(phi))}")
    elif rule is Rule.NEG_E:
        a, b = line(cites[0]), line(cites[1])
        if b != Neg(a) and a != Neg(b):
            _fail(path, ln, "negE needs a formula and its negation")
    elif rule is Rule.REIT:
        if phi not in reiterables:
            _fail(path, ln, f"reit: {render(phi)} is not available from an enclosing proof")
    elif rule is Rule.REP:
        if line(cites[0]) != phi:
            _fail(path, ln, "rep must repeat the cited formula")
    elif rule is Rule.FORALL_I:
        a = line(cites[0])
        if not (isinstance(phi, Forall) and phi.body == a):
            _fail(path, ln, f"forallI: conclusion must quantify {render(a)}")
        v = phi.var
        if v in free_vars(node.assumption):
            _fail(path, ln, f"forallI: {v} is free in the assumption")
        if any(v in free_vars(r) for r in reiterables):
            _fail(path, ln, f"forallI: {v} is free in a reiterable formula")
    elif rule is Rule.FORALL_E:
        a = line(cites[0])
        if not isinstance(a, Forall):
            _fail(path, ln, f"forallE: {render(a)} is not universally quantified")
        if not _instance_of(a.var, a.body, phi):
            _fail(path, ln, f"forallE: {render(phi)} is not a substitution instance of {render(a)}")
    elif rule is Rule.EXISTS_I:
        a = line(cites[0])
        if not isinstance(phi, Exists):
            _fail(path, ln, "existsI: conclusion must be existentially quantified")
        if not _instance_of(phi.var, phi.body, a):
            _fail(path, ln, f"existsI: {render(a)} is not a substitution instance of {render(phi)}")
    elif rule is Rule.EXISTS_E:
        i, s = cites
        if s != k - 1:
            _fail(path, ln, "existsE: the subproof must immediately precede the conclusion")
        a = line(i)
        if not isinstance(a, Exists):
            _fail(path, ln, f"existsE: {render(a)} is not existentially quantified")
        sp = sub(s)
        if sp.assumption != a.body or sp.conclusion != phi:
            _fail(path, ln, "existsE: subproof must assume the body and end with the conclusion")
        if a.var in free_vars(phi):
            _fail(path, ln, f"existsE: {a.var} is free in the conclusion")
        # With reiteration the subproof can import outside formulas, so the
        # witness variable must not be free in any of them either.
        visible = reiterables | frozenset(seen) if mode.logic.reiteration else ()
        if any(a.var in free_vars(r) for r in visible):
            _fail(path, ln, f"existsE: {a.var} is free in a formula the subproof may reiterate")
    else:  # pragma: no cover
        _fail(path, ln, f"unknown rule {rule}")


def _instance_of(v: str, body: Formula, target: Formula) -> bool:
    """Is ``target`` equal to ``body`` with some substitutable ``u`` for ``v``?"""
    for u in sorted({v} | all_vars(target)):
        if substitutable(body, v, u) and substitute(body, v, u) == target:
            return True
    return False


def check_proof(p: ProofNode, mode: "Mode | Logic | str" = "F") -> Formula | None:
    """Check ``p`` under ``mode``; return its conclusion or raise ProofError."""
    _check_node(p, frozenset(), _Ctx(Mode.of(mode)), [])
    return p.conclusion


def is_proof(p: ProofNode, mode: "Mode | Logic | str" = "F") -> bool:
    try:
        check_proof(p, mode)
    except ProofError:
        return False
    return True


def line_count(p: ProofNode) -> int:
    return sum(line_count(e.proof) if isinstance(e, Sub) else 1 for e in p.entries)


# ---------------------------------------------------------------------------
# Constructions
# ---------------------------------------------------------------------------

class ConstructionError(ValueError):
    """Inputs do not fit the requested construction."""


def _remap(entry: Entry, mapping) -> Entry:
    if isinstance(entry, Sub):
        return entry
    j = entry.just
    return Line(entry.formula, Justification(j.rule, tuple(mapping(c) for c in j.cites)))


def dni(phi: Formula) -> ProofNode:
    """Proof of ``~~phi`` from ``phi``."""
    inner = ProofNode((Line(Neg(phi)), Line(Neg(phi), Justification(Rule.REP, (0,)))))
    return ProofNode((Line(phi), Sub(inner), Line(Neg(Neg(phi)), Justification(Rule.NEG_I, (0, 1)))))


def glue(p1: ProofNode, p2: ProofNode) -> ProofNode:
    """Chain a proof of a |- b with a proof of b |- c."""
    if p1.conclusion is None or p1.conclusion != p2.assumption:
        raise ConstructionError("conclusion of the first proof must be the assumption of the second")
    off = len(p1) - 1
    tail = tuple(_remap(e, lambda c: c + off) for e in p2.entries[1:])
    return ProofNode(p1.entries + tail)


def pair(p1: ProofNode, p2: ProofNode) -> ProofNode:
    """From proofs of a |- b and a |- c build a proof of a |- b & c."""
    if p1.assumption != p2.assumption:
        raise ConstructionError("both proofs must share their assumption")
    b, c = p1.conclusion, p2.conclusion
    if b is None or c is None:
        raise ConstructionError("both proofs must end with a formula")
    off = len(p1) - 1
    tail = tuple(_remap(e, lambda i: 0 if i == 0 else i + off) for e in p2.entries[1:])
    entries = p1.entries + tail
    last_b, last_c = len(p1) - 1, len(entries) - 1
    if len(p2) == 1:
        last_c = 0
    return ProofNode(entries + (Line(And(b, c), Justification(Rule.AND_I, (last_b, last_c))),))


def cases(disj: Formula, p1: ProofNode, p2: ProofNode) -> ProofNode:
    """From proofs of a |- c and b |- c build a proof of a | b |- c."""
    if not isinstance(disj, Or) or (p1.assumption, p2.assumption) != (disj.left, disj.right):
        raise ConstructionError("subproofs must assume the two disjuncts")
    if p1.conclusion is None or p1.conclusion != p2.conclusion:
        raise ConstructionError("both proofs must end with the same formula")
    return ProofNode((Line(disj), Sub(p1), Sub(p2),
                      Line(p1.conclusion, Justification(Rule.OR_E, (0, 1, 2)))))


def contrapose(p: ProofNode) -> ProofNode:
    """From a proof of a |- b build a proof of ~b |- ~a."""
    psi = p.conclusion
    if psi is None:
        raise ConstructionError("the proof must end with a formula")
    n = len(p)
    dn = ProofNode((Line(Neg(psi)), Line(Neg(psi), Justification(Rule.REP, (0,)))))
    inner = ProofNode(p.entries + (Sub(dn), Line(Neg(Neg(psi)), Justification(Rule.NEG_I, (n - 1, n)))))
    return ProofNode((Line(Neg(psi)), Sub(inner),
                      Line(Neg(p.assumption), Justification(Rule.NEG_I, (0, 1)))))


# ---------------------------------------------------------------------------
# Text format
# ---------------------------------------------------------------------------
#
#   p & (q | r)   ; hyp
#   p             ; andE 1
#     q           ; hyp
#     p           ; reit 2
#
# Indentation gives nesting; a ``hyp`` at the current depth (after the first
# line of a block) opens a sibling subproof.  Citations are global 1-based
# line numbers; ``a-b`` names the subproof spanning lines a to b.

class ProofFormatError(ValueError):
    def __init__(self, lineno: int, message: str):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


_RULES_BY_NAME = {r.value.lower(): r for r in Rule}
_CITE = re.compile(r"^\s*(\d+)\s*(?:-\s*(\d+))?\s*$")


@dataclass
class _Block:
    indent: int
    entries: list = field(default_factory=list)
    first: int = 0  # global number of the first line
    last: int = 0  # global number of the last line (including nested)
    # global line number -> local index, for Line entries
    local: dict = field(default_factory=dict)
    # (first, last) -> local index, for Sub entries
    spans: dict = field(default_factory=dict)
    parent: "_Block | None" = None
    # pending raw citations per local index, resolved when the block closes
    raw: dict = field(default_factory=dict)


def parse_proof(text: str) -> ProofNode:
    """Parse the indented text format into a ProofNode."""
    rows = []
    for no, raw in enumerate(text.splitlines(), 1):
        body = raw.split("#", 1)[0].rstrip()
        if not body.strip():
            continue
        indent = len(body) - len(body.lstrip(" \t"))
        if ";" not in body:
            raise ProofFormatError(no, "expected '<formula> ; <rule> [citations]'")
        ftxt, jtxt = body.strip().rsplit(";", 1)
        parts = jtxt.strip().split(None, 1)
        if not parts:
            raise ProofFormatError(no, "missing rule name")
        rule = _RULES_BY_NAME.get(parts[0].lower())
        if rule is None:
            raise ProofFormatError(no, f"unknown rule {parts[0]!r}")
        cites = []
        if len(parts) > 1:
            for c in parts[1].split(","):
                m = _CITE.match(c)
                if not m:
                    raise ProofFormatError(no, f"bad citation {c.strip()!r}")
                a = int(m.group(1))
                cites.append((a, int(m.group(2))) if m.group(2) else a)
        try:
            f = parse(ftxt, FULL)
        except ValueError as exc:
            raise ProofFormatError(no, str(exc)) from None
        rows.append((no, indent, f, rule, cites))
    if not rows:
        raise ProofFormatError(0, "empty proof")

    root: _Block | None = None
    cur: _Block | None = None
    for gl, (no, indent, f, rule, cites) in enumerate(rows, 1):
        if cur is None:
            if rule is not Rule.HYP:
                raise ProofFormatError(no, "a proof must begin with hyp")
            root = cur = _Block(indent, first=gl)
        elif indent > cur.indent or (indent == cur.indent and rule is Rule.HYP and cur.parent is not None):
            if rule is not Rule.HYP:
                raise ProofFormatError(no, "a subproof must begin with hyp")
            if indent == cur.indent:
                cur = _close(cur, no)
            cur = _Block(indent, first=gl, parent=cur)
        else:
            while indent < cur.indent:
                cur = _close(cur, no)
            if indent != cur.indent:
                raise ProofFormatError(no, "inconsistent indentation")
            if rule is Rule.HYP:
                raise ProofFormatError(no, "hyp must open a subproof")
        cur.local[gl] = len(cur.entries)
        cur.raw[len(cur.entries)] = (no, gl, rule, cites)
        cur.entries.append(f)
        b = cur
        while b is not None:
            b.last = gl
            b = b.parent
    while cur.parent is not None:
        cur = _close(cur, rows[-1][0])
    return _finish(cur, rows[-1][0])


def _close(block: _Block, no: int) -> _Block:
    node = _finish(block, no)
    parent = block.parent
    parent.spans[(block.first, block.last)] = len(parent.entries)
    parent.entries.append(node)
    return parent


def _visible(block: _Block, gl: int) -> Formula | None:
    """Formula on global line ``gl`` if it lies in an enclosing block."""
    b = block.parent
    while b is not None:
        if gl in b.local:
            e = b.entries[b.local[gl]]
            return e if not isinstance(e, ProofNode) else None
        b = b.parent
    return None


def _finish(block: _Block, no: int) -> ProofNode:
    out: list[Entry] = []
    for idx, item in enumerate(block.entries):
        if isinstance(item, ProofNode):
            out.append(Sub(item))
            continue
        lno, gl, rule, cites = block.raw[idx]
        if rule is Rule.REIT:
            for c in cites:
                if isinstance(c, tuple) or c >= gl or _visible(block, c) != item:
                    raise ProofFormatError(lno, f"reit citation {c} is not an earlier visible line "
                                                "with the same formula")
            out.append(Line(item, Justification(rule)))
            continue
        lines, subs = [], []
        for c in cites:
            if isinstance(c, tuple):
                if c not in block.spans:
                    raise ProofFormatError(lno, f"{c[0]}-{c[1]} is not a subproof of this block")
                subs.append(block.spans[c])
            else:
                if c not in block.local:
                    raise ProofFormatError(lno, f"line {c} is not in this block")
                lines.append(block.local[c])
        out.append(Line(item, Justification(rule, tuple(lines + subs))))
    return ProofNode(tuple(out))


def _format(p: ProofNode, depth: int, start: int, out: list[str]) -> int:
    """Append lines for ``p``; return the next free global line number."""
    gl = start
    firsts: list[int] = []  # global number (or span) per local index
    for e in p.entries:
        if isinstance(e, Sub):
            s = gl
            gl = _format(e.proof, depth + 1, gl, out)
            firsts.append((s, gl - 1))
            continue
        j = e.just
        cites = []
        for c in j.cites:
            ref = firsts[c] if 0 <= c < len(firsts) else None
            if ref is None:
                cites.append(str(c))
            elif isinstance(ref, tuple):
                cites.append(f"{ref[0]}-{ref[1]}")
            else:
                cites.append(str(ref))
        tail = f" {', '.join(cites)}" if cites else ""
        out.append(f"{'  ' * depth}{render(e.formula)} ; {j.rule.value}{tail}")
        firsts.append(gl)
        gl += 1
    return gl


def format_proof(p: ProofNode) -> str:
    """Render ``p`` in the text format read by :func:`parse_proof`."""
    out: list[str] = []
    _format(p, 0, 1, out)
    return "\n".join(out) + "\n"


def iter_lines(p: ProofNode) -> Iterator[tuple[int, Line]]:
    """Yield (depth, line) in reading order."""
    def go(node: ProofNode, d: int):
        for e in node.entries:
            if isinstance(e, Sub):
                yield from go(e.proof, d + 1)
            else:
                yield d, e
    yield from go(p, 0)


def proof(*entries) -> ProofNode:
    """Shorthand builder: formulas become hyp lines, ProofNodes become subproofs."""
    out = []
    for e in entries:
        if isinstance(e, ProofNode):
            out.append(Sub(e))
        elif isinstance(e, (Line, Sub)):
            out.append(e)
        else:
            out.append(Line(e))
    return ProofNode(tuple(out))
