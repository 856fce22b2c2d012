"""Acceptance criteria, one test and one PASS/FAIL line each.

Run ``pytest tests/test_acceptance.py -v`` or ``python tests/test_acceptance.py``.
"""

from __future__ import annotations

import itertools
import math
import random
import sys
import time
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from milnor.arrows import random_wk_tree, surgery_with_trees  # noqa: E402
from milnor.cut import nu, nu_table, rebase_cut, trivial_cut, tube_from_diagram  # noqa: E402
from milnor.engine import (  # noqa: E402
    GuardExceeded,
    chen_series,
    chen_words,
    longitude_words,
    mu,
    mu_table,
    phi_q,
)
from milnor.fixtures import FIXTURES, fixture  # noqa: E402
from milnor.fuzz import check_homotopy, check_moves, check_wk, corpus_diagram, iteration_rng  # noqa: E402
from milnor.gauss import MoveSpec, apply_move, random_diagram, random_moves  # noqa: E402
from milnor.series import TruncSeries, in_gamma_q, magnus_expand  # noqa: E402
from milnor.words import FreeWord, alpha_word, commutator  # noqa: E402

from oracles import delta_brute, linking, mu_brute, raw  # noqa: E402

SEED = 20240517


def report(number: int, title: str, ok: bool, detail: str = "") -> None:
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {number:>2}: {title}" + (f" ({detail})" if detail else "")
    _emit(line)
    assert ok, line


_printer = None


def _emit(line: str) -> None:
    if _printer is not None:
        with _printer.disabled():
            print(line)
    else:
        print(line)


@pytest.fixture(autouse=True)
def _direct_output(capsys):
    global _printer
    _printer = capsys
    yield
    _printer = None


def test_01_magnus_axioms():
    rng = random.Random(SEED)
    start = time.perf_counter()
    bad = 0
    for _ in range(1000):
        n, q = rng.randint(1, 4), rng.randint(1, 6)

        def word():
            return FreeWord((rng.randint(1, n), rng.choice((1, -1))) for _ in range(rng.randint(0, 12)))

        g, h = word(), word()
        eg, eh = magnus_expand(g, n, q), magnus_expand(h, n, q)
        if magnus_expand(g * h, n, q) != eg * eh:
            bad += 1
        if eg * magnus_expand(g.inverse(), n, q) != TruncSeries.one(n, q):
            bad += 1
    elapsed = time.perf_counter() - start
    report(1, "Magnus homomorphism and inverse on 1000 word pairs", bad == 0 and elapsed < 10, f"{bad} failures, {elapsed:.2f}s")


def _left_normed(gens):
    w = alpha_word([gens[-1]])
    for g in reversed(gens[:-1]):
        w = commutator(alpha_word([g]), w)
    return w


def test_02_gamma_detection():
    checked = bad = 0
    for k in range(2, 6):
        n = max(4, k)
        for gens in itertools.permutations(range(1, n + 1), k):
            w = _left_normed(list(gens))
            checked += 1
            if not (in_gamma_q(w, k, n) and not in_gamma_q(w, k + 1, n)):
                bad += 1
    report(2, "left-normed commutators sit in Gamma_k and not Gamma_k+1", bad == 0, f"{checked} commutators")


def test_03_linking_oracle():
    rng = random.Random(SEED + 3)
    bad = 0
    for _ in range(200):
        d = random_diagram(rng.randint(1, 3), rng.randint(0, 10), rng)
        for i in range(1, d.n + 1):
            for k in range(1, d.n + 1):
                if mu(d, (i, k)) != linking(raw(d), i, k):
                    bad += 1
    report(3, "mu(i,k) equals the signed crossing count on 200 diagrams", bad == 0, f"{bad} mismatches")


def test_04_fixture_values():
    def brute(name):
        d = raw(fixture(name))
        return (lambda s: mu_brute(d, s)), d

    checks = []
    hopf_mu, _ = brute("hopf")
    checks.append(hopf_mu((1, 2)) == 1 and delta_brute(hopf_mu, (1, 2)) == 0)
    checks.append(mu(fixture("hopf"), (1, 2)) == 1)

    kink_mu, _ = brute("kink")
    checks.append(all(kink_mu(s) == 0 for L in range(1, 5) for s in itertools.product([1], repeat=L)))
    checks.append(all(r.mu == 0 for r in mu_table(fixture("kink"), 6)))

    bor_mu, _ = brute("borromean")
    bd = delta_brute(bor_mu, (1, 2, 3))
    checks.append(bd == 0 and abs(bor_mu((1, 2, 3))) == 1)
    rec = next(r for r in mu_table(fixture("borromean"), 3) if r.seq == (1, 2, 3))
    checks.append(rec.delta == 0 and abs(rec.mubar) == 1)

    dc_mu, _ = brute("double_clasp")
    checks.append(delta_brute(dc_mu, (1, 1, 2)) == 2)
    rec = next(r for r in mu_table(fixture("double_clasp"), 3) if r.seq == (1, 1, 2))
    checks.append(rec.delta == 2)
    report(4, "Hopf, kink, Borromean and double-clasp values (brute force, then series)", all(checks), f"{sum(checks)}/{len(checks)}")


def test_05_move_invariance():
    start = time.perf_counter()
    plain = check_moves(500, SEED, max_len=4, max_moves=30, rebase=False)
    rebased = check_moves(500, SEED + 1, max_len=4, max_moves=30, rebase=True)
    elapsed = time.perf_counter() - start
    ok = not plain and not rebased and elapsed < 60
    report(5, "500 move traces keep mu; 500 rebased traces keep (Delta, mu-bar)", ok, f"{len(plain)}+{len(rebased)} violations, {elapsed:.1f}s")


def test_06_q_stability():
    bad = total = 0
    for name in FIXTURES:
        d = fixture(name)
        length = 4 if d.n <= 2 else 3
        for r in mu_table(d, length):
            for extra in (1, 2, 3):
                total += 1
                if mu(d, r.seq, q=len(r.seq) + extra) != r.mu:
                    bad += 1
    report(6, "mu identical at orders |I|+1, |I|+2, |I|+3", bad == 0, f"{total} comparisons")


def test_07_wk_invariance():
    found = check_wk(100, SEED, k=None, self_only=False)
    report(7, "100 W_k-tree surgeries (k in 2..4) keep mu of length <= k", not found, f"{len(found)} violations")


def test_08_self_wk_and_homotopy():
    found = check_wk(100, SEED, k=None, self_only=True, max_len=5)
    homotopy = check_homotopy(100, SEED)
    ok = not found and not homotopy
    report(8, "100 self W_k surgeries keep mu with r(I) <= k (|I| <= 5); self-crossing changes keep non-repeated mu", ok, f"{len(found)}+{len(homotopy)} violations")


def _pairs():
    for it in range(60):
        rng = iteration_rng(SEED, it)
        d = corpus_diagram(rng, max_crossings=6)
        yield d, random_moves(d, rng.randint(1, 15), rng.randrange(2**32))[0]
        k = rng.choice((1, 2, 3))
        yield d, surgery_with_trees(d, [random_wk_tree(d, k, rng.random() < 0.3, rng.randrange(2**32))])
        ids = d.crossing_ids()
        if ids:
            yield d, apply_move(d, MoveSpec.make("crossing-change", crossing=rng.choice(ids)))


def test_09_phi_matches_mu():
    agree = disagree = equal_pairs = unequal_pairs = 0
    for a, b in _pairs():
        if a.n != b.n:
            continue
        ta, tb = mu_table(a, 3), mu_table(b, 3)
        for q in (2, 3, 4):
            same_mu = all(x.mu == y.mu for x, y in zip(ta, tb) if len(x.seq) <= q - 1)
            same_phi = phi_q(a, q) == phi_q(b, q)
            if same_mu == same_phi:
                agree += 1
            else:
                disagree += 1
            equal_pairs += same_mu
            unequal_pairs += not same_mu
    ok = disagree == 0 and equal_pairs > 0 and unequal_pairs > 0
    report(9, "phi_q equality coincides with equality of mu up to length q-1 (q <= 4)", ok, f"{agree} agree, {disagree} disagree, {unequal_pairs} unequal")


def test_10_engine_equivalence():
    arcs = bad = 0
    for name in FIXTURES:
        d = fixture(name)
        for q in range(1, 6):
            table = chen_series(d, q)
            for a, w in chen_words(d, q).items():
                arcs += 1
                if magnus_expand(w, d.n, q) != table[a]:
                    bad += 1
    report(10, "word engine + Magnus equals the series engine on every arc, q <= 5", bad == 0, f"{arcs} arc/order pairs")


def test_11_cut_suite():
    checks = []
    checks.append(all((r.m, r.delta, r.nu) == (0, 0, 0) for r in nu_table(trivial_cut([0, 1, 2]), 4)))
    spheres = trivial_cut([0, 0, 0])
    checks.append(all(r.m == 0 and r.nu == r.delta for r in nu_table(spheres, 4)))
    r = nu(tube_from_diagram(fixture("hopf")), (1, 2))
    checks.append((r.m, r.delta, r.nu) == (1, 0, 1))

    rng = random.Random(SEED + 11)
    corpus = [fixture(n) for n in ("hopf", "double_clasp", "whitehead")] + [random_diagram(2, rng.randint(0, 7), rng) for _ in range(20)]
    compatible = True
    for d in corpus:
        ref = {x.seq: x for x in mu_table(d, 4)}
        for x in nu_table(tube_from_diagram(d), 4):
            if x.nu != math.gcd(abs(ref[x.seq].mu), ref[x.seq].delta):
                compatible = False
    checks.append(compatible)

    stable = True
    for name in ("hopf", "double_clasp", "whitehead", "borromean"):
        c = tube_from_diagram(fixture(name))
        length = 4 if c.n <= 2 else 3
        base = [(x.delta, x.nu) for x in nu_table(c, length)]
        for i, comp in enumerate(c.components):
            for region in comp.regions:
                if [(x.delta, x.nu) for x in nu_table(rebase_cut(c, i, region), length)] != base:
                    stable = False
    checks.append(stable)
    report(11, "cut-diagram conventions, tube of Hopf, tube compatibility, base-region independence", all(checks), f"{sum(checks)}/{len(checks)}")


def test_12_performance():
    d = fixture("chain12")
    start = time.perf_counter()
    table = mu_table(d, 8)
    elapsed = time.perf_counter() - start
    trips = {}
    for q in range(2, 13):
        try:
            if q <= 9:
                longitude_words(d, q)
            else:
                chen_words(d, q)
            trips[q] = False
        except GuardExceeded:
            trips[q] = True
    guard_ok = all(trips[q] == (q >= 10) for q in trips)
    ok = elapsed < 60 and guard_ok and len(table) == sum(3**s for s in range(2, 9))
    report(12, "series engine: all mu up to length 8 on 12 crossings / 3 components; word guard trips exactly for q >= 10", ok, f"{elapsed:.2f}s, {len(table)} sequences")


if __name__ == "__main__":
    failures = 0
    for name, fn in sorted(globals().items()):
        if name.startswith("test_") and callable(fn):
            try:
                fn()
            except AssertionError:
                failures += 1
    sys.exit(1 if failures else 0)
