"""Combinatorial 2-dimensional cut-diagrams and their nu invariants.

A component is a closed surface of genus g cut into regions by arcs.  An
arc lies on one component, separates its ``front`` region from its ``back``
region and is labelled by a region ``z`` of some component; across it the
generators satisfy ``back = z^-1 front z``.  Crossing an arc with sign +1
walks front to back, with sign -1 back to front.

Each non-base region carries a path word from the base region and each
component carries 2g loop words based at the base region.  That is all the
data the group, the loop words and the Chen map need.
"""

from __future__ import annotations

import json
import math
from collections import deque
from dataclasses import dataclass
from functools import lru_cache, reduce
from itertools import combinations
from typing import Sequence

from milnor.engine import sequences
from milnor.gauss import BasedDiagram, arc_table
from milnor.series import TruncSeries
from milnor.words import FreeWord, free_reduce

__all__ = [
    "CutDiagramError",
    "CutArc",
    "CutComponent",
    "CutDiagram",
    "parse_cut",
    "cut_from_json",
    "cut_to_json",
    "loop_word",
    "chen_series_cut",
    "mu_loop",
    "nu",
    "nu_table",
    "NuRecord",
    "tube_from_diagram",
    "rebase_cut",
    "trivial_cut",
]

Region = tuple[int, str]  # (0-based component, region name)
Step = tuple[str, int]  # (arc id, +1 | -1)


class CutDiagramError(ValueError):
    pass


@dataclass(frozen=True)
class CutArc:
    id: str
    label: Region
    front: Region
    back: Region


@dataclass(frozen=True)
class CutComponent:
    genus: int
    regions: tuple[str, ...]
    base: str
    loops: tuple[tuple[Step, ...], ...]


@dataclass(frozen=True)
class CutDiagram:
    components: tuple[CutComponent, ...]
    arcs: tuple[CutArc, ...]
    paths: tuple[tuple[Region, tuple[Step, ...]], ...]

    def __post_init__(self):
        _validate(self)

    @property
    def n(self) -> int:
        return len(self.components)

    def arc(self, arc_id: str) -> CutArc:
        return self._arc_map()[arc_id]

    def _arc_map(self) -> dict[str, CutArc]:
        return {a.id: a for a in self.arcs}

    def path(self, region: Region) -> tuple[Step, ...]:
        if region[1] == self.components[region[0]].base:
            return ()
        return dict(self.paths)[region]

    def regions(self) -> list[Region]:
        return [(i, r) for i, c in enumerate(self.components) for r in c.regions]


def _walk(c: CutDiagram, comp: int, steps: Sequence[Step], what: str) -> Region:
    arcs = c._arc_map()
    here: Region = (comp, c.components[comp].base)
    for k, (aid, s) in enumerate(steps, 1):
        if aid not in arcs:
            raise CutDiagramError(f"{what}: step {k} uses unknown arc {aid!r}")
        a = arcs[aid]
        if s not in (1, -1):
            raise CutDiagramError(f"{what}: step {k} has sign {s!r}, expected +1 or -1")
        src, dst = (a.front, a.back) if s > 0 else (a.back, a.front)
        if here != src:
            raise CutDiagramError(
                f"{what}: step {k} crosses arc {aid} with sign {s:+d} from region "
                f"{_rname(here)}, but that crossing starts at {_rname(src)}"
            )
        here = dst
    return here


def _rname(r: Region) -> str:
    return f"{r[0] + 1}/{r[1]}"


def _validate(c: CutDiagram) -> None:
    if not c.components:
        raise CutDiagramError("no components")
    known = set()
    for i, comp in enumerate(c.components):
        if comp.genus < 0:
            raise CutDiagramError(f"component {i + 1}: negative genus")
        if len(set(comp.regions)) != len(comp.regions):
            raise CutDiagramError(f"component {i + 1}: duplicate region names")
        if comp.base not in comp.regions:
            raise CutDiagramError(f"component {i + 1}: base region {comp.base!r} is not a region")
        if len(comp.loops) != 2 * comp.genus:
            raise CutDiagramError(
                f"component {i + 1}: genus {comp.genus} needs {2 * comp.genus} loops, got {len(comp.loops)}"
            )
        known.update((i, r) for r in comp.regions)
    ids = [a.id for a in c.arcs]
    if len(set(ids)) != len(ids):
        raise CutDiagramError("duplicate arc ids")
    for a in c.arcs:
        for role in ("label", "front", "back"):
            if getattr(a, role) not in known:
                raise CutDiagramError(f"arc {a.id}: {role} region {_rname(getattr(a, role))} does not exist")
        if a.front[0] != a.back[0]:
            raise CutDiagramError(f"arc {a.id}: front and back lie on different components")
    paths = dict(c.paths)
    if len(paths) != len(c.paths):
        raise CutDiagramError("a region has two path words")
    for r in paths:
        if r not in known:
            raise CutDiagramError(f"path given for unknown region {_rname(r)}")
    for i, comp in enumerate(c.components):
        for name in comp.regions:
            if name == comp.base:
                if paths.get((i, name)):
                    raise CutDiagramError(f"base region {_rname((i, name))} must have the empty path")
                continue
            if (i, name) not in paths:
                raise CutDiagramError(f"region {_rname((i, name))} has no path word")
            end = _walk(c, i, paths[(i, name)], f"path to {_rname((i, name))}")
            if end != (i, name):
                raise CutDiagramError(f"path to {_rname((i, name))} ends at {_rname(end)}")
        for j, loop in enumerate(comp.loops, 1):
            end = _walk(c, i, loop, f"loop {j} of component {i + 1}")
            if end != (i, comp.base):
                raise CutDiagramError(f"loop {j} of component {i + 1} ends at {_rname(end)}, not the base")


# -- JSON -------------------------------------------------------------------


def _ref(obj, what: str) -> Region:
    try:
        return int(obj["comp"]) - 1, str(obj["region"])
    except (KeyError, TypeError, ValueError):
        raise CutDiagramError(f"{what}: expected {{comp, region}}, got {obj!r}") from None


def _steps(seq, what: str) -> tuple[Step, ...]:
    if not isinstance(seq, list):
        raise CutDiagramError(f"{what}: expected a list of steps")
    out = []
    for k, st in enumerate(seq, 1):
        try:
            out.append((str(st["arc"]), int(st["sign"])))
        except (KeyError, TypeError, ValueError):
            raise CutDiagramError(f"{what}: step {k} must be {{arc, sign}}") from None
    return tuple(out)


def cut_from_json(doc: dict) -> CutDiagram:
    """Build a cut-diagram from the parsed ``.cutd`` document (components numbered from 1)."""
    if not isinstance(doc, dict):
        raise CutDiagramError("document must be a JSON object")
    try:
        comps_raw = doc["components"]
        arcs_raw = doc.get("arcs", [])
        paths_raw = doc.get("paths", {})
    except (KeyError, AttributeError):
        raise CutDiagramError("document needs a 'components' list") from None
    if not isinstance(comps_raw, list) or not isinstance(arcs_raw, list) or not isinstance(paths_raw, dict):
        raise CutDiagramError("components and arcs must be lists, paths an object")
    comps = []
    for i, cr in enumerate(comps_raw, 1):
        try:
            regions = tuple(str(r) for r in cr["regions"])
            base = str(cr.get("base", regions[0] if regions else ""))
            loops = tuple(_steps(l, f"component {i} loop {j}") for j, l in enumerate(cr.get("loops", []), 1))
            comps.append(CutComponent(int(cr["genus"]), regions, base, loops))
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, CutDiagramError):
                raise
            raise CutDiagramError(f"component {i}: needs genus, regions, base and loops") from None
    arcs = []
    for k, ar in enumerate(arcs_raw, 1):
        if not isinstance(ar, dict) or "id" not in ar:
            raise CutDiagramError(f"arc {k}: needs an id")
        what = f"arc {ar['id']}"
        arcs.append(
            CutArc(str(ar["id"]), _ref(ar.get("label"), what), _ref(ar.get("front"), what), _ref(ar.get("back"), what))
        )
    paths = []
    for key, steps in paths_raw.items():
        try:
            cs, name = str(key).split("/", 1)
            region = (int(cs) - 1, name)
        except ValueError:
            raise CutDiagramError(f"path key {key!r} must look like '<comp>/<region>'") from None
        paths.append((region, _steps(steps, f"path {key}")))
    paths.sort()
    return CutDiagram(tuple(comps), tuple(arcs), tuple(paths))


def parse_cut(text: str) -> CutDiagram:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CutDiagramError(f"not valid JSON: {exc}") from None
    return cut_from_json(doc)


def cut_to_json(c: CutDiagram) -> dict:
    def ref(r: Region) -> dict:
        return {"comp": r[0] + 1, "region": r[1]}

    def steps(seq) -> list:
        return [{"arc": a, "sign": s} for a, s in seq]

    return {
        "components": [
            {"genus": comp.genus, "regions": list(comp.regions), "base": comp.base, "loops": [steps(l) for l in comp.loops]}
            for comp in c.components
        ],
        "arcs": [{"id": a.id, "label": ref(a.label), "front": ref(a.front), "back": ref(a.back)} for a in c.arcs],
        "paths": {_rname(r): steps(p) for r, p in c.paths},
    }


def trivial_cut(genera: Sequence[int]) -> CutDiagram:
    """Components with one region each and no arcs; every loop is empty."""
    comps = tuple(CutComponent(g, ("a0",), "a0", tuple(() for _ in range(2 * g))) for g in genera)
    return CutDiagram(comps, (), ())


# -- words and series ----------------------------------------------------------


def loop_word(c: CutDiagram, i: int, loop: Sequence[Step]) -> FreeWord:
    """``w(l) = a_i0^-w u_1^e1 u_2^e2 ...``, w summing the signs whose label lies on component i."""
    end = _walk(c, i, loop, f"loop on component {i + 1}")
    if end != (i, c.components[i].base):
        raise CutDiagramError(f"loop on component {i + 1} does not return to the base region")
    arcs = c._arc_map()
    labels = [(arcs[aid].label, s) for aid, s in loop]
    w = sum(s for lab, s in labels if lab[0] == i)
    base = (i, c.components[i].base)
    return FreeWord([(base, -1 if w > 0 else 1)] * abs(w) + labels)


@lru_cache(maxsize=256)
def _cut_coloring(c: CutDiagram, q: int, degree: int) -> dict:
    n = c.n
    arcs = c._arc_map()
    one = TruncSeries.one(n, degree)
    gens = [TruncSeries.generator(i + 1, n, degree) for i in range(n)]
    cur = {r: gens[r[0]] for r in c.regions()}
    for _ in range(q - 1):
        inv = {r: s.inverse() for r, s in cur.items()}
        new = {}
        for r in c.regions():
            p, pinv = one, one
            for aid, s in c.path(r):
                z = arcs[aid].label
                if s > 0:
                    p, pinv = p * cur[z], inv[z] * pinv
                else:
                    p, pinv = p * inv[z], cur[z] * pinv
            new[r] = one + pinv.times_var(r[0] + 1) * p
        if new == cur:
            break
        cur = new
    return cur


def chen_series_cut(c: CutDiagram, q: int, degree: int | None = None) -> dict:
    """``E(eta_q(a))`` for every region, truncated above ``degree`` (default ``q``)."""
    if q < 1:
        raise ValueError("order must be positive")
    return dict(_cut_coloring(c, q, q if degree is None else degree))


def _word_series(c: CutDiagram, w: FreeWord, q: int, degree: int) -> TruncSeries:
    table = _cut_coloring(c, q, degree)
    s = TruncSeries.one(c.n, degree)
    for r, e in free_reduce(w):
        s = s * (table[r] if e > 0 else table[r].inverse())
    return s


def mu_loop(c: CutDiagram, seq: Sequence[int], i: int, j: int, q: int | None = None) -> int:
    """Coefficient of ``X_I`` in ``E(eta_q(w(l_ij)))``; i and j count from 1, an empty I gives 0."""
    seq = tuple(seq)
    if not 1 <= i <= c.n:
        raise ValueError(f"component {i} outside 1..{c.n}")
    loops = c.components[i - 1].loops
    if not 1 <= j <= len(loops):
        raise ValueError(f"component {i} has no loop {j}")
    for k in seq:
        if not 1 <= k <= c.n:
            raise ValueError(f"index {k} outside 1..{c.n}")
    if not seq:
        return 0
    q = len(seq) + 1 if q is None else q
    if q <= len(seq):
        raise ValueError("order must exceed the sequence length")
    return _word_series(c, loop_word(c, i - 1, loops[j - 1]), q, len(seq))[seq]


@dataclass(frozen=True)
class NuRecord:
    seq: tuple[int, ...]
    m: int
    delta: int
    nu: int

    def tsv(self) -> str:
        return f"{' '.join(map(str, self.seq))}\t{self.m}\t{self.delta}\t{self.nu}"

    def to_json(self) -> dict:
        return {"I": list(self.seq), "m": self.m, "Delta": self.delta, "nu": self.nu}


class _CutTable:
    """All m-values up to a length, read off one set of loop series."""

    def __init__(self, c: CutDiagram, max_len: int):
        self.c = c
        deg = max(max_len - 1, 1)
        self.loop_series = []
        for i, comp in enumerate(c.components):
            self.loop_series.append([_word_series(c, loop_word(c, i, l), deg + 1, deg) for l in comp.loops])
        self.delta_memo: dict[tuple[int, ...], int] = {}

    def m(self, seq: tuple[int, ...]) -> int:
        if len(seq) < 2:
            return 0
        return reduce(math.gcd, (abs(s[seq[:-1]]) for s in self.loop_series[seq[-1] - 1]), 0)

    def delta(self, seq: tuple[int, ...]) -> int:
        if len(seq) <= 2:
            return 0
        hit = self.delta_memo.get(seq)
        if hit is None:
            hit = 0
            for k in range(len(seq)):
                j = seq[:k] + seq[k + 1 :]
                for s in range(len(j)):
                    jj = j[s:] + j[:s]
                    hit = math.gcd(hit, self.m(jj), self.delta(jj))
            self.delta_memo[seq] = hit
        return hit

    def record(self, seq: tuple[int, ...]) -> NuRecord:
        m, dl = self.m(seq), self.delta(seq)
        return NuRecord(seq, m, dl, math.gcd(m, dl))


def nu(c: CutDiagram, seq: Sequence[int]) -> NuRecord:
    """``(m, Delta, nu)`` for ``I i``: m is the gcd over the longitude system of component i."""
    seq = tuple(seq)
    if len(seq) < 2:
        raise ValueError("nu needs a sequence of length at least 2")
    for k in seq:
        if not 1 <= k <= c.n:
            raise ValueError(f"index {k} outside 1..{c.n}")
    return _CutTable(c, len(seq)).record(seq)


def nu_table(c: CutDiagram, max_len: int) -> list[NuRecord]:
    if max_len < 2:
        return []
    t = _CutTable(c, max_len)
    return [t.record(seq) for seq in sequences(c.n, 2, max_len)]


def delta_cut_direct(c: CutDiagram, seq: Sequence[int]) -> int:
    """Delta by enumerating all cyclic permutations of proper subsequences."""
    seq = tuple(seq)
    t = _CutTable(c, len(seq))
    out = 0
    for size in range(1, len(seq)):
        for idx in combinations(range(len(seq)), size):
            j = tuple(seq[k] for k in idx)
            for s in range(size):
                out = math.gcd(out, t.m(j[s:] + j[:s]))
    return out


# -- constructions -------------------------------------------------------------


def tube_from_diagram(d: BasedDiagram) -> CutDiagram:
    """Spin every component into a torus.

    Arc ``a_kj`` becomes region ``aj``; the last arc closes up with ``a0``
    through the base point.  The under event ending ``a_k(j-1)`` becomes a
    cut arc labelled by the region of its over-arc.  Loop 1 runs once along
    the component and loop 2 around the tube, which crosses nothing.
    """
    at = arc_table(d)

    def region(arc: tuple[int, int]) -> Region:
        k, j = arc
        return (k, "a0" if j == at.r[k] else f"a{j}")

    comps, arcs, paths = [], [], []
    for k in range(d.n):
        r = at.r[k]
        names = tuple(f"a{j}" for j in range(max(r, 1)))
        steps = []
        for j in range(1, r + 1):
            eps = at.sign[k][j - 1]
            aid = f"x{k + 1}_{j}"
            before, after = region((k, j - 1)), region((k, j))
            front, back = (before, after) if eps > 0 else (after, before)
            arcs.append(CutArc(aid, region(at.over_arc[k][j - 1]), front, back))
            steps.append((aid, eps))
            if j < r:
                paths.append(((k, f"a{j}"), tuple(steps)))
        comps.append(CutComponent(1, names, "a0", (tuple(steps), ())))
    return CutDiagram(tuple(comps), tuple(arcs), tuple(sorted(paths)))


def _region_paths(c: CutDiagram, i: int, base: str) -> dict[str, tuple[Step, ...]]:
    found = {base: ()}
    todo = deque([base])
    arcs = sorted((a for a in c.arcs if a.front[0] == i), key=lambda a: a.id)
    while todo:
        here = todo.popleft()
        for a in arcs:
            for s, src, dst in ((1, a.front, a.back), (-1, a.back, a.front)):
                if src[1] == here and dst[1] not in found:
                    found[dst[1]] = found[here] + ((a.id, s),)
                    todo.append(dst[1])
    return found


def rebase_cut(c: CutDiagram, i: int, new_base: str) -> CutDiagram:
    """Move the base region of component i (0-based), recomputing paths and conjugating loops."""
    comp = c.components[i]
    if new_base not in comp.regions:
        raise CutDiagramError(f"component {i + 1} has no region {new_base!r}")
    found = _region_paths(c, i, new_base)
    missing = [r for r in comp.regions if r not in found]
    if missing:
        raise CutDiagramError(f"regions {missing} are not reachable from {new_base!r}")
    to_old = found[comp.base]
    back = tuple((a, -s) for a, s in reversed(to_old))
    loops = tuple(to_old + l + back for l in comp.loops)
    new_comp = CutComponent(comp.genus, comp.regions, new_base, loops)
    comps = c.components[:i] + (new_comp,) + c.components[i + 1 :]
    paths = [(r, p) for r, p in c.paths if r[0] != i]
    paths += [((i, name), p) for name, p in found.items() if name != new_base]
    return CutDiagram(comps, c.arcs, tuple(sorted(paths)))
