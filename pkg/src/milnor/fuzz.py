"""Seeded invariance campaigns over moves, tree surgeries and self-crossing changes.

Every iteration draws its own generator from ``(seed, iteration)``, so any
single iteration can be replayed without running the ones before it.  A
violation carries everything needed for that replay.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Callable

from milnor.arrows import Tail, WTree, random_wk_tree, surgery_with_trees
from milnor.engine import mu_table, r_of
from milnor.fixtures import braid_closure
from milnor.gauss import (
    BasedDiagram,
    MoveSpec,
    apply_move,
    random_diagram,
    random_moves,
    serialize_gauss,
)

__all__ = [
    "Violation",
    "iteration_rng",
    "corpus_diagram",
    "check_moves",
    "check_wk",
    "check_homotopy",
    "CHECKS",
    "run_check",
    "tree_to_json",
    "self_crossings",
]


@dataclass
class Violation:
    check: str
    iteration: int
    seed: int
    diagram: str
    trace: list = field(default_factory=list)
    seq: tuple = ()
    before: object = None
    after: object = None

    def to_json(self) -> dict:
        return {
            "check": self.check,
            "iteration": self.iteration,
            "seed": self.seed,
            "diagram": self.diagram,
            "trace": self.trace,
            "I": list(self.seq),
            "before": self.before,
            "after": self.after,
        }


def iteration_rng(seed: int, i: int) -> random.Random:
    return random.Random(f"milnor:{seed}:{i}")


def corpus_diagram(rng: random.Random, max_n: int = 3, max_crossings: int = 8) -> BasedDiagram:
    """Half random Gauss codes, half closures of random 3-strand braids (these carry R3 sites)."""
    if max_n >= 3 and rng.random() < 0.5:
        word = [rng.choice((1, 2, -1, -2)) for _ in range(rng.randint(0, max_crossings))]
        return braid_closure(word, 3)
    n = rng.randint(1, max_n)
    return random_diagram(n, rng.randint(0, max_crossings), rng)


def _first_difference(a: BasedDiagram, b: BasedDiagram, max_len: int, keep, value) -> tuple | None:
    for ra, rb in zip(mu_table(a, max_len), mu_table(b, max_len)):
        if keep(ra.seq) and value(ra) != value(rb):
            return ra.seq, value(ra), value(rb)
    return None


def _mu(r):
    return r.mu


def _residue(r):
    return [r.delta, r.mubar]


def _node_json(node) -> dict:
    if isinstance(node, Tail):
        return {"tail": [node.end.comp + 1, str(node.end.pos)], "twist": node.twist}
    return {"left": _node_json(node.left), "right": _node_json(node.right), "twist": node.twist}


def tree_to_json(t: WTree) -> dict:
    return {"head": [t.head.comp + 1, str(t.head.pos)], "root": _node_json(t.root)}


def check_moves(
    iters: int, seed: int, max_len: int = 4, max_moves: int = 30, rebase: bool | None = None
) -> list[Violation]:
    """Moves keep every mu; base-point changes followed by moves keep (Delta, mu-bar).

    ``rebase=None`` moves the base points in a random half of the iterations.
    """
    out = []
    fixed = rebase
    for it in range(iters):
        rng = iteration_rng(seed, it)
        d = corpus_diagram(rng)
        count = rng.randint(1, max_moves)
        move_seed = rng.randrange(2**32)
        coin = rng.random() < 0.5
        rebase = coin if fixed is None else fixed
        start = d
        pre: list[MoveSpec] = []
        if rebase:
            for i, comp in enumerate(d.components):
                if comp:
                    m = MoveSpec.make("rebase", component=i, steps=rng.randrange(len(comp)))
                    pre.append(m)
                    start = apply_move(start, m)
        moved, trace = random_moves(start, count, move_seed)
        diff = _first_difference(
            d, moved, max_len, lambda s: True, _residue if rebase else _mu
        )
        if diff:
            out.append(
                Violation(
                    "moves", it, seed, serialize_gauss(d), [m.to_json() for m in pre + trace], *diff
                )
            )
    return out


def check_wk(iters: int, seed: int, k: int | None = None, self_only: bool = False, max_len: int = 5) -> list[Violation]:
    """Surgery along one W_k-tree keeps mu of length <= k (self trees: mu with r(I) <= k)."""
    out = []
    name = "selfwk" if self_only else "wk"
    for it in range(iters):
        rng = iteration_rng(seed, it)
        d = corpus_diagram(rng, max_crossings=6)
        deg = k if k is not None else rng.choice((1, 2, 3) if self_only else (2, 3, 4))
        tree = random_wk_tree(d, deg, self_only, rng.randrange(2**32))
        after = surgery_with_trees(d, [tree])
        if self_only:
            length = max_len
            keep = lambda s: r_of(s) <= deg  # noqa: E731
        else:
            length = deg
            keep = lambda s: True  # noqa: E731
        diff = _first_difference(d, after, length, keep, _mu)
        if diff:
            out.append(Violation(name, it, seed, serialize_gauss(d), [tree_to_json(tree)], *diff))
    return out


def self_crossings(d: BasedDiagram) -> list[int]:
    where = d.locate()
    return [c for c, w in sorted(where.items()) if w["over"][0] == w["under"][0]]


def check_homotopy(iters: int, seed: int) -> list[Violation]:
    """Changing a self-crossing keeps every mu with no repeated index."""
    out = []
    for it in range(iters):
        rng = iteration_rng(seed, it)
        d = corpus_diagram(rng, max_crossings=10)
        selfs = self_crossings(d)
        if not selfs:
            m = MoveSpec.make("R1-insert", component=0, slot=0, order="OU", sign=1)
            d = apply_move(d, m)
            selfs = self_crossings(d)
        m = MoveSpec.make("crossing-change", crossing=rng.choice(selfs))
        after = apply_move(d, m)
        diff = _first_difference(d, after, max(d.n, 2), lambda s: r_of(s) == 1, _mu)
        if diff:
            out.append(Violation("homotopy", it, seed, serialize_gauss(d), [m.to_json()], *diff))
    return out


CHECKS: dict[str, Callable[..., list[Violation]]] = {
    "moves": lambda iters, seed, k: check_moves(iters, seed),
    "wk": lambda iters, seed, k: check_wk(iters, seed, k),
    "selfwk": lambda iters, seed, k: check_wk(iters, seed, k, self_only=True),
    "homotopy": lambda iters, seed, k: check_homotopy(iters, seed),
}


def run_check(check: str, iters: int, seed: int, k: int | None = None) -> list[Violation]:
    if check not in CHECKS:
        raise ValueError(f"unknown check {check!r}; expected one of {sorted(CHECKS)}")
    if iters < 1:
        raise ValueError("iters must be positive")
    if k is not None and k < 1:
        raise ValueError("k must be positive")
    return CHECKS[check](iters, seed, k)
