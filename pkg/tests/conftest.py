from __future__ import annotations

import random
from pathlib import Path

import pytest

from fundlogic.cli import load_corpus, run
from fundlogic.syntax import And, Neg, Or, PropAtom

DATA = Path(__file__).parent / "data"

# (criterion number, title, passed, detail), filled by test_acceptance
ACCEPTANCE: list[tuple[int, str, bool, str]] = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n, title, ok, detail in sorted(ACCEPTANCE):
        terminalreporter.write_line(f"criterion {n:2d} {'PASS' if ok else 'FAIL'}  {title}: {detail}")


@pytest.fixture(scope="session")
def corpus():
    return load_corpus()


@pytest.fixture
def cli(capsys):
    """Run the CLI in-process; returns (exit code, stdout, stderr)."""

    def call(*argv):
        code = run([str(a) for a in argv])
        out = capsys.readouterr()
        return code, out.out, out.err

    return call


def random_formula(rng: random.Random, depth: int, atoms=("p", "q"), ops=("~", "&", "|")):
    """A random formula of depth at most ``depth``."""
    if depth == 0 or rng.random() < 0.25:
        return PropAtom(rng.choice(atoms))
    op = rng.choice(ops)
    if op == "~":
        return Neg(random_formula(rng, depth - 1, atoms, ops))
    cls = And if op == "&" else Or
    return cls(random_formula(rng, depth - 1, atoms, ops), random_formula(rng, depth - 1, atoms, ops))


def pointwise_force(F, V, x, f, g=None, domain=0, preds=None):
    """Forcing clause by clause, state by state; independent of ``frames.extension``.

    ``F.opens(a, b)`` is ``a <| b``.  ``V`` maps atoms to state sets,
    ``preds`` maps (name, args) to state sets.
    """
    from fundlogic.syntax import RESERVED_ATOM, And, Exists, Forall, Neg, Or, PredAtom, PropAtom

    g = g or {}
    below = [[y for y in F.states if F.opens(y, z)] for z in F.states]
    above = [[y for y in F.states if F.opens(z, y)] for z in F.states]

    def fc(z, h, g):
        if isinstance(h, PropAtom):
            if h.name == RESERVED_ATOM and h.name not in V:
                return not below[z]
            return bool((V[h.name] >> z) & 1)
        if isinstance(h, PredAtom):
            return bool((preds[(h.name, tuple(g[v] for v in h.args))] >> z) & 1)
        if isinstance(h, Neg):
            return all(not fc(y, h.body, g) for y in below[z])
        if isinstance(h, And):
            return fc(z, h.left, g) and fc(z, h.right, g)
        if isinstance(h, Or):
            return all(any(fc(w, h.left, g) or fc(w, h.right, g) for w in above[y]) for y in below[z])
        if isinstance(h, Forall):
            return all(fc(z, h.body, {**g, h.var: d}) for d in range(domain))
        if isinstance(h, Exists):
            return all(any(fc(w, h.body, {**g, h.var: d}) for w in above[y] for d in range(domain))
                       for y in below[z])
        raise TypeError(h)

    return fc(x, f, g)


def random_frame(rng: random.Random, n: int, reflexive: bool = True, density: float = 0.4):
    from fundlogic.frames import Frame

    pairs = [(x, y) for x in range(n) for y in range(n) if x != y and rng.random() < density]
    return Frame.from_pairs(n, pairs, reflexive=reflexive)
