"""Named example diagrams and a braid-closure generator."""

from __future__ import annotations

from typing import Sequence

from milnor.gauss import BasedDiagram, Event, parse_gauss_code

__all__ = ["braid_closure", "FIXTURES", "fixture"]


def braid_closure(word: Sequence[int], strands: int) -> BasedDiagram:
    """Gauss code of the closure of a braid word.

    Letter ``i`` means the strand at position ``i`` passes over the one at
    ``i + 1`` (sign +1); letter ``-i`` means the strand at ``i + 1`` passes
    over the one at ``i`` (sign -1).  Strands swap positions either way.
    Base points sit at the top of the braid; components are numbered by
    their smallest top position.
    """
    for g in word:
        if g == 0 or abs(g) >= strands:
            raise ValueError(f"generator {g} invalid for {strands} strands")
    done = set()
    comps = []
    for start in range(1, strands + 1):
        if start in done:
            continue
        events = []
        pos = start
        while True:
            done.add(pos)
            for t, g in enumerate(word, 1):
                i = abs(g)
                if pos not in (i, i + 1):
                    continue
                left = pos == i
                over = left if g > 0 else not left
                events.append(Event(t, over, 1 if g > 0 else -1))
                pos = i + 1 if left else i
            if pos == start:
                break
        comps.append(tuple(events))
    return BasedDiagram(tuple(comps)).normalized()


def _rebased(d: BasedDiagram, steps: Sequence[int]) -> BasedDiagram:
    comps = [c[s:] + c[:s] for c, s in zip(d.components, steps)]
    return BasedDiagram(tuple(comps)).normalized()


_TEXT = {
    "kink": "component 1: O1+ U1+\n",
    "hopf": "component 1: U1+ O2+\ncomponent 2: O1+ U2+\n",
    "double_clasp": "component 1: U1+ O2+ U3+ O4+\ncomponent 2: O1+ U2+ O3+ U4+\n",
}


def _build(name: str) -> BasedDiagram:
    if name.startswith("trivial"):
        return BasedDiagram.trivial(int(name[len("trivial") :] or 1))
    if name in _TEXT:
        return parse_gauss_code(_TEXT[name])
    if name == "borromean":
        return braid_closure([1, -2] * 3, 3)
    if name == "chain12":
        # Based at the braid top the arc dependencies are acyclic and the Chen
        # words stabilise; moving the base points makes them grow with q.
        return _rebased(braid_closure([1, -2] * 6, 3), (5, 3, 1))
    if name == "whitehead":
        return braid_closure([1, 1, -2, 1, -2], 3)
    if name == "figure_eight":
        return braid_closure([1, -2] * 2, 3)
    if name == "knot6":
        return braid_closure([1, 1, 1, -2, 1, -2], 3)
    raise KeyError(name)


FIXTURES = (
    "trivial1",
    "trivial2",
    "trivial3",
    "kink",
    "hopf",
    "double_clasp",
    "whitehead",
    "borromean",
    "figure_eight",
    "knot6",
    "chain12",
)


def fixture(name: str) -> BasedDiagram:
    return _build(name)
