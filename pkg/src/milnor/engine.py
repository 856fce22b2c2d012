"""Longitudes, the Chen-Milnor map and Milnor invariants of based diagrams.

Arcs are addressed as ``(i, j)`` with ``i`` the 0-based component index and
``j`` the arc number along it (``a_i0`` leaves the base point).  Meridian
generators are the integers ``1..n``; component ``i`` carries ``alpha_{i+1}``.

Two engines evaluate the Chen-Milnor map:

* the series engine runs the recursion directly on truncated Magnus series,
  with prefix products of the conjugating chains shared along each component;
* the word engine builds the literal words in the free group and exists as an
  independent reference.  Its word lengths grow exponentially with the order,
  so it refuses to start when the estimated length exceeds a guard.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from functools import lru_cache, reduce
from itertools import combinations, product
from typing import Iterable, Sequence

from milnor.gauss import ArcTable, BasedDiagram, arc_table
from milnor.series import TruncSeries
from milnor.words import FreeWord, commutator, free_reduce

__all__ = [
    "PeripheralData",
    "ColoringTable",
    "InvariantRecord",
    "GuardExceeded",
    "longitudes",
    "chen_series",
    "chen_word",
    "chen_words",
    "longitude_series",
    "longitude_words",
    "mu",
    "delta",
    "delta_direct",
    "delta_and_mubar",
    "mu_table",
    "phi_q",
    "nilpotent_presentation",
    "word_length_estimate",
    "guard_limit",
    "r_of",
    "sequences",
]

DEFAULT_GUARD = 10**6

Arc = tuple[int, int]


class GuardExceeded(RuntimeError):
    def __init__(self, estimate: int, guard: int):
        super().__init__(f"estimated word length {estimate} exceeds the guard {guard}")
        self.estimate = estimate
        self.guard = guard


def guard_limit() -> int:
    raw = os.environ.get("MILNOR_GUARD")
    if raw is None or not raw.strip():
        return DEFAULT_GUARD
    try:
        value = int(raw)
    except ValueError:
        raise ValueError(f"MILNOR_GUARD must be an integer, got {raw!r}") from None
    if value < 1:
        raise ValueError("MILNOR_GUARD must be positive")
    return value


def arc_name(a: Arc) -> str:
    return f"a{a[0] + 1}{a[1]}" if a[0] < 9 and a[1] < 10 else f"a{a[0] + 1}_{a[1]}"


# -- longitudes ----------------------------------------------------------


@dataclass(frozen=True)
class PeripheralData:
    """Meridian arc and longitude word (arc alphabet) per component."""

    meridians: tuple[Arc, ...]
    longitudes: tuple[FreeWord, ...]

    def to_text(self) -> str:
        lines = []
        for i, (m, lam) in enumerate(zip(self.meridians, self.longitudes), 1):
            lines.append(f"m{i} = {arc_name(m)}\tl{i} = {lam.to_text(arc_name)}")
        return "\n".join(lines)


def _longitude_letters(at: ArcTable, i: int) -> list[tuple[Arc, int]]:
    w = at.writhe[i]
    letters = [((i, 0), -1 if w > 0 else 1)] * abs(w)
    letters += list(zip(at.over_arc[i], at.sign[i]))
    return letters


def longitudes(d: BasedDiagram) -> PeripheralData:
    at = arc_table(d)
    lams = tuple(free_reduce(FreeWord(_longitude_letters(at, i))) for i in range(d.n))
    return PeripheralData(tuple((i, 0) for i in range(d.n)), lams)


# -- series engine ---------------------------------------------------------


@dataclass(frozen=True)
class ColoringTable:
    """``S_q(a) = E(eta_q(a))`` for every arc, truncated above ``degree``."""

    q: int
    degree: int
    series: dict = field(repr=False)

    def __getitem__(self, arc: Arc) -> TruncSeries:
        return self.series[arc]

    def arcs(self) -> list[Arc]:
        return sorted(self.series)

    def to_text(self) -> str:
        return "\n".join(f"{arc_name(a)}\t{self.series[a].to_text(sep=' + ')}" for a in self.arcs())


def _check_order(q: int) -> None:
    if not isinstance(q, int) or q < 1:
        raise ValueError(f"order q must be a positive integer, got {q!r}")


@lru_cache(maxsize=512)
def _coloring(d: BasedDiagram, q: int, degree: int) -> tuple[dict, int]:
    """Series of every arc at order ``q``; also returns the level at which it stabilised."""
    at = arc_table(d)
    n = d.n
    one = TruncSeries.one(n, degree)
    gens = [TruncSeries.generator(i + 1, n, degree) for i in range(n)]
    cur = {(i, j): gens[i] for i in range(n) for j in range(at.r[i] + 1)}
    overs = {u for row in at.over_arc for u in row}
    level = 1
    while level < q:
        inv = {u: cur[u].inverse() for u in overs}
        new = {}
        for i in range(n):
            new[(i, 0)] = gens[i]
            p, pinv = one, one
            for j, (u, eps) in enumerate(zip(at.over_arc[i], at.sign[i]), 1):
                if eps > 0:
                    p, pinv = p * cur[u], inv[u] * pinv
                else:
                    p, pinv = p * inv[u], cur[u] * pinv
                new[(i, j)] = one + pinv.times_var(i + 1) * p
        level += 1
        if new == cur:
            # the recursion is a fixed map of the table, so nothing changes from here on
            level = q
        cur = new
    return cur, level


def chen_series(d: BasedDiagram, q: int, degree: int | None = None) -> ColoringTable:
    """Evaluate ``eta_q`` on every arc through Magnus series.

    ``degree`` defaults to ``q``.  Only degrees below ``q`` are determined by
    the nilpotent quotient; callers reading Milnor numbers use ``q - 1``.
    """
    _check_order(q)
    degree = q if degree is None else degree
    if degree < 0:
        raise ValueError("degree must be nonnegative")
    table, _ = _coloring(d, q, degree)
    return ColoringTable(q, degree, dict(table))


def longitude_series(d: BasedDiagram, q: int, degree: int | None = None) -> list[TruncSeries]:
    """``E(eta_q(lambda_k))`` for every component k."""
    _check_order(q)
    degree = q if degree is None else degree
    return list(_longitude_series(d, q, degree))


@lru_cache(maxsize=512)
def _longitude_series(d: BasedDiagram, q: int, degree: int) -> tuple[TruncSeries, ...]:
    table, _ = _coloring(d, q, degree)
    at = arc_table(d)
    out = []
    for k in range(d.n):
        s = TruncSeries.one(d.n, degree)
        for arc, eps in _longitude_letters(at, k):
            s = s * (table[arc] if eps > 0 else table[arc].inverse())
        out.append(s)
    return tuple(out)


# -- word engine -------------------------------------------------------------


def word_length_estimate(d: BasedDiagram, q: int) -> int:
    """Unreduced length bound for the words of ``eta_q`` on arcs and longitudes.

    ``L_1 = 1`` and ``L_{p+1}(a_ij) = 2 * sum_{l <= j} L_p(u_il) + 1``.
    """
    _check_order(q)
    at = arc_table(d)
    cur = {a: 1 for a in at.arcs()}
    for _ in range(q - 1):
        new = {}
        for i in range(d.n):
            new[(i, 0)] = 1
            acc = 0
            for j, u in enumerate(at.over_arc[i], 1):
                acc += cur[u]
                new[(i, j)] = 2 * acc + 1
        cur = new
    lon = [abs(at.writhe[k]) + sum(cur[u] for u in at.over_arc[k]) for k in range(d.n)]
    return max(list(cur.values()) + lon, default=0)


@dataclass
class WordRun:
    words: dict
    peak: int = 0


def _word_levels(d: BasedDiagram, q: int, guard: int | None) -> WordRun:
    _check_order(q)
    guard = guard_limit() if guard is None else guard
    est = word_length_estimate(d, q)
    if est > guard:
        raise GuardExceeded(est, guard)
    at = arc_table(d)
    cur = {a: FreeWord([(a[0] + 1, 1)]) for a in at.arcs()}
    run = WordRun(cur, 1 if cur else 0)
    for _ in range(q - 1):
        inv = {a: w.inverse() for a, w in cur.items()}
        new = {}
        for i in range(d.n):
            alpha = FreeWord([(i + 1, 1)])
            new[(i, 0)] = alpha
            v = FreeWord()
            for j, (u, eps) in enumerate(zip(at.over_arc[i], at.sign[i]), 1):
                v = free_reduce(v * (cur[u] if eps > 0 else inv[u]))
                w = free_reduce(v.inverse() * alpha * v)
                run.peak = max(run.peak, len(v), len(w))
                new[(i, j)] = w
        cur = new
    run.words = cur
    return run


def chen_words(d: BasedDiagram, q: int, guard: int | None = None) -> dict:
    """Literal free-reduced words ``eta_q(a)`` for all arcs."""
    return dict(_word_levels(d, q, guard).words)


def chen_word(d: BasedDiagram, q: int, a: Arc, guard: int | None = None) -> FreeWord:
    words = chen_words(d, q, guard)
    if a not in words:
        raise KeyError(f"no arc {a!r}")
    return words[a]


def longitude_words(d: BasedDiagram, q: int, guard: int | None = None) -> tuple[list[FreeWord], int]:
    """``eta_q(lambda_k)`` for every component plus the peak reduced length seen."""
    run = _word_levels(d, q, guard)
    at = arc_table(d)
    out = []
    for k in range(d.n):
        w = FreeWord()
        for arc, eps in _longitude_letters(at, k):
            w = free_reduce(w * (run.words[arc] if eps > 0 else run.words[arc].inverse()))
            run.peak = max(run.peak, len(w))
        out.append(w)
    return out, run.peak


# -- Milnor numbers ----------------------------------------------------------


def _check_sequence(d: BasedDiagram, seq: Sequence[int]) -> tuple[int, ...]:
    seq = tuple(seq)
    if not seq:
        raise ValueError("index sequence must be nonempty")
    for i in seq:
        if not isinstance(i, int) or not 1 <= i <= d.n:
            raise ValueError(f"index {i!r} outside 1..{d.n}")
    return seq


def mu(d: BasedDiagram, seq: Sequence[int], q: int | None = None) -> int:
    """Milnor number ``mu(i_1 ... i_s k)``: coefficient of ``X_i1...X_is`` in ``E(eta_q(lambda_k))``.

    ``q`` defaults to ``len(seq)``, the least order that determines it.
    """
    seq = _check_sequence(d, seq)
    if len(seq) == 1:
        return 0
    q = len(seq) if q is None else q
    if q < len(seq):
        raise ValueError(f"order {q} is too small for a sequence of length {len(seq)}")
    lam = _longitude_series(d, q, len(seq) - 1)[seq[-1] - 1]
    return lam[seq[:-1]]


def r_of(seq: Sequence[int]) -> int:
    """Largest multiplicity of an index in ``seq``."""
    return max((list(seq).count(i) for i in set(seq)), default=0)


def _one_deletions(seq: tuple[int, ...]) -> set[tuple[int, ...]]:
    out = set()
    for k in range(len(seq)):
        j = seq[:k] + seq[k + 1 :]
        for s in range(len(j)):
            out.add(j[s:] + j[:s])
    return out


def _proper_cyclic_subsequences(seq: tuple[int, ...]) -> set[tuple[int, ...]]:
    out = set()
    for size in range(1, len(seq)):
        for idx in combinations(range(len(seq)), size):
            j = tuple(seq[k] for k in idx)
            for s in range(size):
                out.add(j[s:] + j[:s])
    return out


def delta_direct(mu_of, seq: Sequence[int]) -> int:
    """gcd of ``|mu(J)|`` over cyclic permutations J of proper subsequences, by enumeration."""
    return reduce(math.gcd, (abs(mu_of(j)) for j in _proper_cyclic_subsequences(tuple(seq))), 0)


class _DeltaMemo:
    """``Delta(I) = gcd over one-index deletions J (cyclically permuted) of gcd(|mu(J)|, Delta(J))``."""

    def __init__(self, mu_of):
        self.mu_of = mu_of
        self.memo: dict[tuple[int, ...], int] = {}

    def __call__(self, seq: tuple[int, ...]) -> int:
        if len(seq) <= 2:
            return 0
        hit = self.memo.get(seq)
        if hit is None:
            hit = 0
            for j in _one_deletions(seq):
                hit = math.gcd(hit, abs(self.mu_of(j)), self(j))
                if hit == 1:
                    break
            self.memo[seq] = hit
        return hit


def delta(d: BasedDiagram, seq: Sequence[int]) -> int:
    seq = _check_sequence(d, seq)
    return _DeltaMemo(lambda j: mu(d, j))(seq)


@dataclass(frozen=True)
class InvariantRecord:
    seq: tuple[int, ...]
    mu: int
    delta: int
    mubar: int
    r: int

    def tsv(self) -> str:
        return f"{' '.join(map(str, self.seq))}\t{self.mu}\t{self.delta}\t{self.mubar}"

    def to_json(self) -> dict:
        return {"I": list(self.seq), "mu": self.mu, "Delta": self.delta, "mubar": self.mubar, "r": self.r}


def _record(seq: tuple[int, ...], m: int, dl: int) -> InvariantRecord:
    return InvariantRecord(seq, m, dl, m % dl if dl > 0 else m, r_of(seq))


def delta_and_mubar(d: BasedDiagram, seq: Sequence[int]) -> InvariantRecord:
    seq = _check_sequence(d, seq)
    if len(seq) < 2:
        raise ValueError("Delta and mu-bar need a sequence of length at least 2")
    return _record(seq, mu(d, seq), delta(d, seq))


def sequences(n: int, min_len: int, max_len: int) -> Iterable[tuple[int, ...]]:
    for s in range(min_len, max_len + 1):
        yield from product(range(1, n + 1), repeat=s)


def mu_table(d: BasedDiagram, max_len: int, min_len: int = 2) -> list[InvariantRecord]:
    """Records for every sequence with ``min_len <= |I| <= max_len``.

    All numbers are read off one longitude computation at order ``max_len``.
    """
    if max_len < 2:
        return []
    lams = _longitude_series(d, max_len, max_len - 1)

    def mu_of(j: tuple[int, ...]) -> int:
        return 0 if len(j) == 1 else lams[j[-1] - 1][j[:-1]]

    dm = _DeltaMemo(mu_of)
    return [_record(seq, mu_of(seq), dm(seq)) for seq in sequences(d.n, max(min_len, 2), max_len)]


# -- automorphism and presentation ---------------------------------------------


def phi_q(d: BasedDiagram, q: int) -> list[TruncSeries]:
    """Images ``alpha_k -> a_{k r_k}`` of the automorphism of ``F / Gamma_q F`` as series.

    Truncation at degree ``q - 1`` is exact on the quotient, so equal lists
    mean equal automorphisms.
    """
    _check_order(q)
    table, _ = _coloring(d, q, q - 1)
    at = arc_table(d)
    return [table[(k, at.r[k])] for k in range(d.n)]


def nilpotent_presentation(d: BasedDiagram, q: int, guard: int | None = None) -> str:
    """``< alpha_1..alpha_n | [alpha_i, eta_q(lambda_i)], Gamma_q F >`` with trivial relators dropped."""
    words, _ = longitude_words(d, q, guard)
    gens = ", ".join(f"a{i}" for i in range(1, d.n + 1))
    rels = []
    for i, w in enumerate(words, 1):
        if len(w) == 0:
            continue
        rel = free_reduce(commutator(FreeWord([(i, 1)]), w))
        if len(rel) == 0:
            continue
        rels.append(f"[a{i}, {w.to_text()}]")
    rels.append(f"Gamma_{q}(F)")
    return f"< {gens} | {', '.join(rels)} >"
