"""Based welded diagrams as signed Gauss codes.

Each component is the list of crossing events met when walking from its
base point along the orientation.  Virtual crossings are never stored: a
based diagram up to virtual moves is exactly this combinatorial datum.
"""

from __future__ import annotations

import random
import re
from dataclasses import dataclass, field
from itertools import permutations
from typing import Iterable, NamedTuple

__all__ = [
    "Event",
    "BasedDiagram",
    "ArcTable",
    "MoveSpec",
    "GaussCodeError",
    "MoveNotApplicable",
    "BasePointError",
    "parse_gauss_code",
    "serialize_gauss",
    "normalize_gauss",
    "arc_table",
    "apply_move",
    "random_moves",
    "random_diagram",
    "applicable_sites",
    "MOVE_KINDS",
    "FUZZ_KINDS",
]


class GaussCodeError(ValueError):
    pass


class MoveNotApplicable(ValueError):
    pass


class BasePointError(MoveNotApplicable):
    pass


class Event(NamedTuple):
    crossing: int
    over: bool
    sign: int

    def token(self) -> str:
        return f"{'O' if self.over else 'U'}{self.crossing}{'+' if self.sign > 0 else '-'}"


Location = tuple[int, int]  # (component, index), both 0-based internally


@dataclass(frozen=True)
class BasedDiagram:
    components: tuple[tuple[Event, ...], ...]

    def __post_init__(self):
        comps = tuple(tuple(Event(*e) for e in comp) for comp in self.components)
        object.__setattr__(self, "components", comps)
        _validate(comps)

    @property
    def n(self) -> int:
        return len(self.components)

    def crossing_ids(self) -> list[int]:
        return sorted({e.crossing for comp in self.components for e in comp})

    def locate(self) -> dict[int, dict[str, Location]]:
        """crossing id -> {'over': (comp, idx), 'under': (comp, idx)}."""
        out: dict[int, dict[str, Location]] = {}
        for i, comp in enumerate(self.components):
            for k, e in enumerate(comp):
                out.setdefault(e.crossing, {})["over" if e.over else "under"] = (i, k)
        return out

    def sign(self, crossing: int) -> int:
        for comp in self.components:
            for e in comp:
                if e.crossing == crossing:
                    return e.sign
        raise KeyError(crossing)

    def num_crossings(self) -> int:
        return sum(len(c) for c in self.components) // 2

    def normalized(self) -> "BasedDiagram":
        """Crossings renumbered 1, 2, ... by first appearance."""
        relabel: dict[int, int] = {}
        for comp in self.components:
            for e in comp:
                relabel.setdefault(e.crossing, len(relabel) + 1)
        return BasedDiagram(
            tuple(tuple(Event(relabel[e.crossing], e.over, e.sign) for e in comp) for comp in self.components)
        )

    def to_gauss(self) -> str:
        return serialize_gauss(self)

    @classmethod
    def trivial(cls, n: int) -> "BasedDiagram":
        return cls(tuple(() for _ in range(n)))

    def __str__(self) -> str:
        return serialize_gauss(self).strip().replace("\n", " / ")


def _validate(comps: tuple[tuple[Event, ...], ...]) -> None:
    seen: dict[int, list[Event]] = {}
    for comp in comps:
        for e in comp:
            if not isinstance(e.crossing, int) or e.crossing < 1:
                raise GaussCodeError(f"crossing ids must be positive integers, got {e.crossing!r}")
            if e.sign not in (1, -1):
                raise GaussCodeError(f"crossing {e.crossing}: sign must be +1 or -1")
            seen.setdefault(e.crossing, []).append(e)
    problems = []
    for c, evs in sorted(seen.items()):
        roles = sorted(e.over for e in evs)
        if len(evs) == 1:
            missing = "under" if evs[0].over else "over"
            problems.append(f"crossing {c} lacks an {missing} event")
        elif len(evs) > 2 or roles != [False, True]:
            role = "over" if roles.count(True) > 1 else "under"
            problems.append(f"crossing {c} has a duplicate {role} event")
        elif evs[0].sign != evs[1].sign:
            problems.append(f"crossing {c}: over and under events disagree on the sign")
    if problems:
        raise GaussCodeError("; ".join(problems))


# -- text format -----------------------------------------------------------

_LINE = re.compile(r"^component\s+(\d+)\s*:(.*)$")
_TOKEN = re.compile(r"^([OU])(\d+)([+-])$")


def parse_gauss_code(text: str) -> BasedDiagram:
    """Parse ``.gauss`` text: one ``component <i>: O1+ U2- ...`` line per component."""
    found: dict[int, tuple[Event, ...]] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        m = _LINE.match(line)
        if not m:
            raise GaussCodeError(f"line {lineno}: expected 'component <i>: tokens', got {raw!r}")
        idx = int(m.group(1))
        if idx in found:
            raise GaussCodeError(f"line {lineno}: component {idx} given twice")
        events = []
        for tok in m.group(2).split():
            t = _TOKEN.match(tok)
            if not t:
                raise GaussCodeError(f"line {lineno}: bad token {tok!r}")
            events.append(Event(int(t.group(2)), t.group(1) == "O", 1 if t.group(3) == "+" else -1))
        found[idx] = tuple(events)
    if not found:
        raise GaussCodeError("no components")
    if sorted(found) != list(range(1, len(found) + 1)):
        raise GaussCodeError(f"components must be numbered 1..{len(found)}, got {sorted(found)}")
    return BasedDiagram(tuple(found[i] for i in range(1, len(found) + 1)))


def serialize_gauss(d: BasedDiagram) -> str:
    lines = []
    for i, comp in enumerate(d.components, 1):
        toks = " ".join(e.token() for e in comp)
        lines.append(f"component {i}: {toks}".rstrip())
    return "\n".join(lines) + "\n"


def normalize_gauss(text: str) -> str:
    return serialize_gauss(parse_gauss_code(text).normalized())


# -- arcs --------------------------------------------------------------------

Arc = tuple[int, int]  # (component, arc index), 0-based component


@dataclass(frozen=True)
class ArcTable:
    """Arcs a_i0 .. a_ir_i per component with over-arcs, signs and framing.

    ``over_arc[i][j-1]`` and ``sign[i][j-1]`` describe the crossing that ends
    arc ``a_i(j-1)``.  ``writhe[i]`` sums the signs whose over-arc lies on
    component i.
    """

    r: tuple[int, ...]
    over_arc: tuple[tuple[Arc, ...], ...]
    sign: tuple[tuple[int, ...], ...]
    writhe: tuple[int, ...]
    event_arc: tuple[tuple[int, ...], ...] = field(repr=False)

    @property
    def n(self) -> int:
        return len(self.r)

    def arcs(self) -> list[Arc]:
        return [(i, j) for i in range(self.n) for j in range(self.r[i] + 1)]


def arc_table(d: BasedDiagram) -> ArcTable:
    event_arc = []
    for comp in d.components:
        idx, j = [], 0
        for e in comp:
            if not e.over:
                j += 1
            # an under event opens the next arc; over events sit on the current one
            idx.append(j if e.over else j - 1)
        event_arc.append(tuple(idx))
    where: dict[int, Arc] = {}
    for i, comp in enumerate(d.components):
        for k, e in enumerate(comp):
            if e.over:
                where[e.crossing] = (i, event_arc[i][k])
    r, over, signs, writhe = [], [], [], []
    for i, comp in enumerate(d.components):
        us = [e for e in comp if not e.over]
        r.append(len(us))
        over.append(tuple(where[e.crossing] for e in us))
        signs.append(tuple(e.sign for e in us))
        writhe.append(sum(e.sign for e in us if where[e.crossing][0] == i))
    return ArcTable(tuple(r), tuple(over), tuple(signs), tuple(writhe), tuple(event_arc))


# -- moves -----------------------------------------------------------------

MOVE_KINDS = ("R1-insert", "R1-delete", "R2-insert", "R2-delete", "R3", "OC", "rebase", "crossing-change")
FUZZ_KINDS = ("R1-insert", "R1-delete", "R2-insert", "R2-delete", "R3", "OC")


@dataclass(frozen=True)
class MoveSpec:
    """One move with its location parameters.

    Parameters by kind (components and indices 0-based):

    - R1-insert: component, slot, order ('OU' or 'UO'), sign
    - R1-delete: component, index (events index, index+1 form the kink)
    - R2-insert: over_component, over_slot, under_component, under_slot, sign, parallel
    - R2-delete: crossings (two ids)
    - R3: crossings (three ids)
    - OC: component, index (swap events index, index+1)
    - rebase: component, steps (+1 moves the base point past the first event)
    - crossing-change: crossing
    """

    kind: str
    params: tuple[tuple[str, object], ...] = ()

    @classmethod
    def make(cls, kind: str, **params) -> "MoveSpec":
        if kind not in MOVE_KINDS:
            raise ValueError(f"unknown move kind {kind!r}")
        return cls(kind, tuple(sorted((k, _freeze(v)) for k, v in params.items())))

    def __getitem__(self, key: str):
        for k, v in self.params:
            if k == key:
                return v
        raise KeyError(key)

    def get(self, key: str, default=None):
        try:
            return self[key]
        except KeyError:
            return default

    def to_json(self) -> dict:
        return {"kind": self.kind, **{k: list(v) if isinstance(v, tuple) else v for k, v in self.params}}

    @classmethod
    def from_json(cls, obj: dict) -> "MoveSpec":
        obj = dict(obj)
        return cls.make(obj.pop("kind"), **obj)


def _freeze(v):
    return tuple(v) if isinstance(v, list) else v


def _fresh(d: BasedDiagram, k: int = 1) -> list[int]:
    top = max(d.crossing_ids(), default=0)
    return list(range(top + 1, top + 1 + k))


def _with(comps: list[list[Event]]) -> BasedDiagram:
    return BasedDiagram(tuple(tuple(c) for c in comps))


def apply_move(d: BasedDiagram, m: MoveSpec) -> BasedDiagram:
    """Apply one move; raises MoveNotApplicable when its predicate fails."""
    handler = _HANDLERS.get(m.kind)
    if handler is None:
        raise ValueError(f"unknown move kind {m.kind!r}")
    return handler(d, m)


def _component(d: BasedDiagram, i) -> list[Event]:
    if not isinstance(i, int) or not 0 <= i < d.n:
        raise MoveNotApplicable(f"no component {i!r}")
    return list(d.components[i])


def _r1_insert(d: BasedDiagram, m: MoveSpec) -> BasedDiagram:
    comps = [list(c) for c in d.components]
    i, slot = m["component"], m["slot"]
    comp = _component(d, i)
    if not 0 <= slot <= len(comp):
        raise MoveNotApplicable(f"slot {slot} outside 0..{len(comp)}")
    sign = m["sign"]
    if sign not in (1, -1) or m["order"] not in ("OU", "UO"):
        raise MoveNotApplicable("R1-insert needs sign +-1 and order OU or UO")
    (c,) = _fresh(d)
    pair = [Event(c, True, sign), Event(c, False, sign)]
    if m["order"] == "UO":
        pair.reverse()
    comps[i][slot:slot] = pair
    return _with(comps)


def _pair_at(d: BasedDiagram, i: int, k: int) -> tuple[Event, Event]:
    comp = _component(d, i)
    if not 0 <= k < len(comp):
        raise MoveNotApplicable(f"index {k} outside component {i}")
    if k + 1 >= len(comp):
        raise BasePointError("the event pair would straddle the base point")
    return comp[k], comp[k + 1]


def _r1_delete(d: BasedDiagram, m: MoveSpec) -> BasedDiagram:
    i, k = m["component"], m["index"]
    a, b = _pair_at(d, i, k)
    if a.crossing != b.crossing:
        raise MoveNotApplicable("events are not the two ends of one kink crossing")
    comps = [list(c) for c in d.components]
    del comps[i][k : k + 2]
    return _with(comps)


def _r2_insert(d: BasedDiagram, m: MoveSpec) -> BasedDiagram:
    io, so = m["over_component"], m["over_slot"]
    iu, su = m["under_component"], m["under_slot"]
    sign = m["sign"]
    if sign not in (1, -1):
        raise MoveNotApplicable("R2-insert sign must be +-1")
    for i, s in ((io, so), (iu, su)):
        comp = _component(d, i)
        if not 0 <= s <= len(comp):
            raise MoveNotApplicable(f"slot {s} outside 0..{len(comp)}")
    c1, c2 = _fresh(d, 2)
    overs = [Event(c1, True, sign), Event(c2, True, -sign)]
    unders = [Event(c1, False, sign), Event(c2, False, -sign)]
    if not m["parallel"]:
        unders.reverse()
    comps = [list(c) for c in d.components]
    if io == iu and so == su:
        comps[io][so:so] = overs + unders
    elif io == iu and su > so:
        comps[iu][su:su] = unders
        comps[io][so:so] = overs
    else:
        comps[io][so:so] = overs
        comps[iu][su:su] = unders
    return _with(comps)


def _adjacent(loc1: Location, loc2: Location) -> bool:
    return loc1[0] == loc2[0] and abs(loc1[1] - loc2[1]) == 1


def _r2_delete(d: BasedDiagram, m: MoveSpec) -> BasedDiagram:
    c1, c2 = m["crossings"]
    where = d.locate()
    if c1 == c2 or c1 not in where or c2 not in where:
        raise MoveNotApplicable("R2-delete needs two distinct existing crossings")
    if d.sign(c1) != -d.sign(c2):
        raise MoveNotApplicable("R2 crossings must have opposite signs")
    o1, o2 = where[c1]["over"], where[c2]["over"]
    u1, u2 = where[c1]["under"], where[c2]["under"]
    if not (_adjacent(o1, o2) and _adjacent(u1, u2)):
        raise MoveNotApplicable("R2 needs adjacent over events and adjacent under events")
    comps = [[e for e in comp if e.crossing not in (c1, c2)] for comp in d.components]
    return _with(comps)


# Braid-relation R3 shapes.  Strands are (top, middle, bottom); each strand is an
# adjacent event pair written as (role, crossing-name).  X = top/middle,
# Y = top/bottom, Z = middle/bottom.  The move reverses every pair.
_R3_SHAPES = {
    # sigma1 sigma2 sigma1 with all crossings of one sign
    1: ((("O", "X"), ("O", "Y")), (("U", "X"), ("O", "Z")), (("U", "Y"), ("U", "Z"))),
    # its mirror image
    -1: ((("U", "X"), ("U", "Y")), (("O", "X"), ("U", "Z")), (("O", "Y"), ("O", "Z"))),
}


def _r3_shapes():
    for sign, strands in _R3_SHAPES.items():
        yield sign, strands
        yield sign, tuple(tuple(reversed(s)) for s in strands)


def _r3_match(d: BasedDiagram, crossings: tuple[int, int, int]) -> list[tuple[Location, Location]] | None:
    where = d.locate()
    if len(set(crossings)) != 3 or any(c not in where for c in crossings):
        return None
    signs = {d.sign(c) for c in crossings}
    if len(signs) != 1:
        return None
    (sign,) = signs
    locs = sorted(where[c][r] for c in crossings for r in ("over", "under"))
    pairs = []
    k = 0
    while k < len(locs):
        if k + 1 < len(locs) and _adjacent(locs[k], locs[k + 1]):
            pairs.append((locs[k], locs[k + 1]))
            k += 2
        else:
            return None
    if len(pairs) != 3:
        return None

    def describe(loc):
        i, k = loc
        e = d.components[i][k]
        return ("O" if e.over else "U"), e.crossing

    for shape_sign, strands in _r3_shapes():
        if shape_sign != sign:
            continue
        for names in permutations(crossings):
            label = dict(zip("XYZ", names))
            want = {tuple((role, label[x]) for role, x in s) for s in strands}
            have = {tuple(describe(loc) for loc in p) for p in pairs}
            if want == have:
                return pairs
    return None


def _r3(d: BasedDiagram, m: MoveSpec) -> BasedDiagram:
    crossings = tuple(m["crossings"])
    pairs = _r3_match(d, crossings)
    if pairs is None:
        raise MoveNotApplicable(f"crossings {crossings} do not form a supported R3 configuration")
    comps = [list(c) for c in d.components]
    for (i, k1), (_, k2) in pairs:
        comps[i][k1], comps[i][k2] = comps[i][k2], comps[i][k1]
    return _with(comps)


def _oc(d: BasedDiagram, m: MoveSpec) -> BasedDiagram:
    i, k = m["component"], m["index"]
    a, b = _pair_at(d, i, k)
    if not (a.over and b.over):
        raise MoveNotApplicable("OC swaps two adjacent over events")
    comps = [list(c) for c in d.components]
    comps[i][k], comps[i][k + 1] = b, a
    return _with(comps)


def _rebase(d: BasedDiagram, m: MoveSpec) -> BasedDiagram:
    i, steps = m["component"], m["steps"]
    comp = _component(d, i)
    comps = [list(c) for c in d.components]
    if comp:
        s = steps % len(comp)
        comps[i] = comp[s:] + comp[:s]
    return _with(comps)


def _crossing_change(d: BasedDiagram, m: MoveSpec) -> BasedDiagram:
    c = m["crossing"]
    if c not in d.locate():
        raise MoveNotApplicable(f"no crossing {c}")
    comps = [
        [Event(e.crossing, not e.over, -e.sign) if e.crossing == c else e for e in comp]
        for comp in d.components
    ]
    return _with(comps)


_HANDLERS = {
    "R1-insert": _r1_insert,
    "R1-delete": _r1_delete,
    "R2-insert": _r2_insert,
    "R2-delete": _r2_delete,
    "R3": _r3,
    "OC": _oc,
    "rebase": _rebase,
    "crossing-change": _crossing_change,
}


# -- site enumeration and fuzzing -------------------------------------------


def applicable_sites(d: BasedDiagram, kind: str) -> list[MoveSpec]:
    """Every applicable site of a deletion-type kind (R1-delete, R2-delete, R3, OC)."""
    out: list[MoveSpec] = []
    if kind in ("R1-delete", "OC"):
        for i, comp in enumerate(d.components):
            for k in range(len(comp) - 1):
                a, b = comp[k], comp[k + 1]
                if kind == "R1-delete" and a.crossing == b.crossing:
                    out.append(MoveSpec.make(kind, component=i, index=k))
                if kind == "OC" and a.over and b.over:
                    out.append(MoveSpec.make(kind, component=i, index=k))
    elif kind == "R2-delete":
        ids = d.crossing_ids()
        where = d.locate()
        for x in ids:
            for y in ids:
                if x < y and d.sign(x) == -d.sign(y):
                    if _adjacent(where[x]["over"], where[y]["over"]) and _adjacent(
                        where[x]["under"], where[y]["under"]
                    ):
                        out.append(MoveSpec.make(kind, crossings=(x, y)))
    elif kind == "R3":
        # candidate triples come from adjacent event pairs sharing no crossing
        adj = set()
        for comp in d.components:
            for k in range(len(comp) - 1):
                a, b = comp[k].crossing, comp[k + 1].crossing
                if a != b:
                    adj.add(frozenset((a, b)))
        seen = set()
        for p in adj:
            for r in adj:
                tri = p | r
                if len(tri) == 3 and tri not in seen:
                    seen.add(tri)
                    t = tuple(sorted(tri))
                    if _r3_match(d, t) is not None:
                        out.append(MoveSpec.make("R3", crossings=t))
    else:
        raise ValueError(f"site enumeration is not defined for {kind!r}")
    return out


def _sample_insert(d: BasedDiagram, kind: str, rng: random.Random) -> MoveSpec:
    if kind == "R1-insert":
        i = rng.randrange(d.n)
        return MoveSpec.make(
            kind,
            component=i,
            slot=rng.randint(0, len(d.components[i])),
            order=rng.choice(("OU", "UO")),
            sign=rng.choice((1, -1)),
        )
    io, iu = rng.randrange(d.n), rng.randrange(d.n)
    return MoveSpec.make(
        "R2-insert",
        over_component=io,
        over_slot=rng.randint(0, len(d.components[io])),
        under_component=iu,
        under_slot=rng.randint(0, len(d.components[iu])),
        sign=rng.choice((1, -1)),
        parallel=rng.random() < 0.5,
    )


def random_move(d: BasedDiagram, rng: random.Random, kinds: Iterable[str] = FUZZ_KINDS) -> MoveSpec:
    kinds = list(kinds)
    while True:
        kind = rng.choice(kinds)
        if kind in ("R1-insert", "R2-insert"):
            return _sample_insert(d, kind, rng)
        sites = applicable_sites(d, kind)
        if sites:
            return rng.choice(sites)


def random_moves(d: BasedDiagram, count: int, seed) -> tuple[BasedDiagram, list[MoveSpec]]:
    """Apply ``count`` random invariance moves (R1, R2, R3, OC); deterministic in ``seed``."""
    if count < 1:
        raise ValueError("count must be positive")
    rng = random.Random(seed)
    trace = []
    for _ in range(count):
        m = random_move(d, rng)
        d = apply_move(d, m)
        trace.append(m)
    return d, trace


def random_diagram(n: int, crossings: int, rng: random.Random) -> BasedDiagram:
    """Uniformly scattered signed Gauss code; every such code is a welded diagram."""
    comps: list[list[Event]] = [[] for _ in range(n)]
    for c in range(1, crossings + 1):
        s = rng.choice((1, -1))
        comps[rng.randrange(n)].append(Event(c, True, s))
        comps[rng.randrange(n)].append(Event(c, False, s))
    for comp in comps:
        rng.shuffle(comp)
    return _with(comps).normalized()
