"""W-arrows, W-trees, their expansion and surgery.

Ends sit on components of a crossing-free based diagram at rational
positions; the base point precedes every position.  Heads are taken on the
right-hand side, so an arrow carries only a twist parity: surgery along an
arrow is one classical crossing, over at the tail and under at the head,
signed +1 without a twist and -1 with one.
"""

from __future__ import annotations

import random
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from milnor.gauss import BasedDiagram, Event
from milnor.words import FreeWord, commutator

__all__ = [
    "ArrowError",
    "End",
    "Arrow",
    "ArrowPresentation",
    "Tail",
    "Join",
    "WTree",
    "from_diagram",
    "surgery",
    "expand_tree",
    "tree_word",
    "arrow_count",
    "l_words",
    "random_wk_tree",
    "comb_tree",
    "surgery_with_trees",
    "parse_arrows",
    "serialize_arrows",
]


class ArrowError(ValueError):
    pass


@dataclass(frozen=True, order=True)
class End:
    comp: int  # 0-based
    pos: Fraction

    def __post_init__(self):
        object.__setattr__(self, "pos", Fraction(self.pos))
        if self.pos <= 0:
            raise ArrowError(f"position {self.pos} does not lie after the base point")


@dataclass(frozen=True)
class Arrow:
    tail: End
    head: End
    twist: int = 0

    def __post_init__(self):
        object.__setattr__(self, "twist", self.twist % 2)

    @property
    def sign(self) -> int:
        return -1 if self.twist else 1


@dataclass(frozen=True)
class ArrowPresentation:
    n: int
    arrows: tuple[Arrow, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "arrows", tuple(self.arrows))
        if self.n < 1:
            raise ArrowError("need at least one component")
        for a in self.arrows:
            for e in (a.tail, a.head):
                if not 0 <= e.comp < self.n:
                    raise ArrowError(f"end on component {e.comp + 1} outside 1..{self.n}")

    def __add__(self, other: "ArrowPresentation") -> "ArrowPresentation":
        if self.n != other.n:
            raise ArrowError("presentations live on different numbers of components")
        return ArrowPresentation(self.n, self.arrows + other.arrows)

    def is_ascending(self) -> bool:
        """From every base point all tails come before all heads."""
        for i in range(self.n):
            tails = [a.tail.pos for a in self.arrows if a.tail.comp == i]
            heads = [a.head.pos for a in self.arrows if a.head.comp == i]
            if tails and heads and max(tails) > min(heads):
                return False
        return True


def from_diagram(d: BasedDiagram) -> ArrowPresentation:
    """One arrow per crossing; the k-th event of a component sits at position k + 1."""
    ends: dict[int, dict[bool, End]] = {}
    for i, comp in enumerate(d.components):
        for k, e in enumerate(comp):
            ends.setdefault(e.crossing, {})[e.over] = End(i, Fraction(k + 1))
    arrows = []
    for c in sorted(ends):
        arrows.append(Arrow(ends[c][True], ends[c][False], 0 if d.sign(c) > 0 else 1))
    return ArrowPresentation(d.n, tuple(arrows))


def surgery(p: ArrowPresentation) -> BasedDiagram:
    """Turn every arrow into a crossing and read off the Gauss code."""
    slots: list[list[tuple[Fraction, Event]]] = [[] for _ in range(p.n)]
    for c, a in enumerate(p.arrows, 1):
        slots[a.tail.comp].append((a.tail.pos, Event(c, True, a.sign)))
        slots[a.head.comp].append((a.head.pos, Event(c, False, a.sign)))
    comps = []
    for i, row in enumerate(slots):
        row.sort(key=lambda t: t[0])
        for (p1, _), (p2, _) in zip(row, row[1:]):
            if p1 == p2:
                raise ArrowError(f"two arrow ends coincide at {i + 1}@{p1}")
        comps.append(tuple(e for _, e in row))
    return BasedDiagram(tuple(comps)).normalized()


# -- W-trees -----------------------------------------------------------------


@dataclass(frozen=True)
class Tail:
    end: End
    twist: int = 0


@dataclass(frozen=True)
class Join:
    left: "Node"
    right: "Node"
    twist: int = 0


Node = Union[Tail, Join]


@dataclass(frozen=True)
class WTree:
    """A rooted binary tree of tails feeding one head.

    The twist stored on a node belongs to the edge leaving it towards the head.
    """

    head: End
    root: Node

    def tails(self) -> list[Tail]:
        out: list[Tail] = []

        def walk(node):
            if isinstance(node, Tail):
                out.append(node)
            elif isinstance(node, Join):
                walk(node.left)
                walk(node.right)
            else:
                raise ArrowError(f"malformed tree node {node!r}")

        walk(self.root)
        return out

    @property
    def degree(self) -> int:
        return len(self.tails())

    def ends(self) -> list[End]:
        return [t.end for t in self.tails()] + [self.head]


def tree_word(node: Node) -> FreeWord:
    """Insertion word at the head; letters are the tail ends themselves.

    ``W(Join(L, R)) = [W(L), W(R)]`` with ``[x, y] = x y^-1 x^-1 y``; an odd
    twist inverts the word of the subtree below it.
    """
    if isinstance(node, Tail):
        w = FreeWord([(node.end, 1)])
    elif isinstance(node, Join):
        w = commutator(tree_word(node.left), tree_word(node.right))
    else:
        raise ArrowError(f"malformed tree node {node!r}")
    return w.inverse() if node.twist % 2 else w


def arrow_count(k: int) -> int:
    """Arrows produced by expanding a comb tree of degree k."""
    return 1 if k == 1 else 2 * arrow_count(k - 1) + 2


def _spread(ends: list[End]) -> Fraction:
    gaps = [Fraction(1, 8)]
    by_comp: dict[int, list[Fraction]] = {}
    for e in ends:
        by_comp.setdefault(e.comp, []).append(e.pos)
    for ps in by_comp.values():
        ps.sort()
        gaps += [b - a for a, b in zip(ps, ps[1:]) if b > a]
    return min(gaps) / 2


def expand_tree(t: WTree) -> list[Arrow]:
    """Replace a tree by arrows realising its insertion word.

    Heads are stacked at the head position in word order; each tail end gets
    one copy per occurrence of its letter, stacked just after its position.
    """
    ends = t.ends()
    if len(set(ends)) != len(ends):
        raise ArrowError("tree ends must occupy distinct positions")
    word = tree_word(t.root)
    step = _spread(ends) / (len(word) + 1)
    used: dict[End, int] = {}
    arrows = []
    for k, (end, exp) in enumerate(word):
        used[end] = used.get(end, 0) + 1
        tail = End(end.comp, end.pos + used[end] * step)
        head = End(t.head.comp, t.head.pos + (k + 1) * step)
        arrows.append(Arrow(tail, head, 0 if exp > 0 else 1))
    return arrows


def l_words(p: ArrowPresentation) -> list[FreeWord]:
    """Per component, the tail labels met at its heads: ``alpha_c`` or its inverse when twisted."""
    if not p.is_ascending():
        raise ArrowError("presentation is not ascending")
    out = []
    for i in range(p.n):
        heads = sorted((a.head.pos, a) for a in p.arrows if a.head.comp == i)
        out.append(FreeWord((a.tail.comp + 1, a.sign) for _, a in heads))
    return out


def comb_tree(head: End, tails: list[End], twists: list[int] | None = None) -> WTree:
    """``[t_1, [t_2, [..., t_k]]]``; ``twists`` gives one parity per edge, tails first then joins."""
    k = len(tails)
    if k < 1:
        raise ArrowError("a tree needs at least one tail")
    twists = list(twists) if twists is not None else [0] * (2 * k - 1)
    if len(twists) != 2 * k - 1:
        raise ArrowError(f"a degree {k} tree has {2 * k - 1} edges")
    node: Node = Tail(tails[-1], twists[k - 1])
    for j in range(k - 2, -1, -1):
        node = Join(Tail(tails[j], twists[j]), node, twists[k + j])
    return WTree(head, node)


def random_wk_tree(d: BasedDiagram, k: int, self_only: bool, seed) -> WTree:
    """Comb tree of degree k with ends at random gaps between the events of d.

    The gap before event s of a component is the open interval (s, s + 1)
    in the coordinates of :func:`from_diagram`.
    """
    if k < 1:
        raise ValueError("degree must be at least 1")
    rng = random.Random(seed)
    if self_only:
        c = rng.randrange(d.n)
        comps = [c] * (k + 1)
    else:
        comps = [rng.randrange(d.n) for _ in range(k + 1)]
    slots = [rng.randint(0, len(d.components[c])) for c in comps]
    groups: dict[tuple[int, int], list[int]] = {}
    for idx, key in enumerate(zip(comps, slots)):
        groups.setdefault(key, []).append(idx)
    ends: list[End | None] = [None] * (k + 1)
    for (c, s), members in groups.items():
        rng.shuffle(members)
        for rank, idx in enumerate(members, 1):
            ends[idx] = End(c, s + Fraction(1, 4) + Fraction(rank, 4 * (len(members) + 1)))
    twists = [rng.randrange(2) for _ in range(2 * k - 1)]
    return comb_tree(ends[-1], ends[:-1], twists)


def surgery_with_trees(d: BasedDiagram, trees: list[WTree]) -> BasedDiagram:
    """Surgery along ``from_diagram(d)`` together with the expansions of ``trees``."""
    arrows = list(from_diagram(d).arrows)
    for t in trees:
        arrows += expand_tree(t)
    return surgery(ArrowPresentation(d.n, tuple(arrows)))


# -- text format ---------------------------------------------------------------

_HEADER = re.compile(r"^components\s+(\d+)$")
_ARROW = re.compile(r"^arrow\s+(\d+)@(\S+)\s*->\s*(\d+)@(\S+)\s+twists\s+(\d+)$")


def parse_arrows(text: str) -> ArrowPresentation:
    n = None
    arrows = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if n is None:
            m = _HEADER.match(line)
            if not m:
                raise ArrowError(f"line {lineno}: expected 'components <n>' header")
            n = int(m.group(1))
            continue
        m = _ARROW.match(line)
        if not m:
            raise ArrowError(f"line {lineno}: cannot parse {raw!r}")
        try:
            tp, hp = Fraction(m.group(2)), Fraction(m.group(4))
        except ValueError:
            raise ArrowError(f"line {lineno}: bad position") from None
        tc, hc = int(m.group(1)), int(m.group(3))
        if not (1 <= tc <= n and 1 <= hc <= n):
            raise ArrowError(f"line {lineno}: component outside 1..{n}")
        arrows.append(Arrow(End(tc - 1, tp), End(hc - 1, hp), int(m.group(5))))
    if n is None:
        raise ArrowError("missing 'components <n>' header")
    return ArrowPresentation(n, tuple(arrows))


def serialize_arrows(p: ArrowPresentation) -> str:
    lines = [f"components {p.n}"]
    for a in p.arrows:
        lines.append(
            f"arrow {a.tail.comp + 1}@{a.tail.pos} -> {a.head.comp + 1}@{a.head.pos} twists {a.twist}"
        )
    return "\n".join(lines) + "\n"
