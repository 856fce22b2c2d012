import random

import pytest

from milnor.engine import (
    GuardExceeded,
    chen_series,
    chen_word,
    chen_words,
    delta,
    delta_and_mubar,
    delta_direct,
    guard_limit,
    longitude_series,
    longitude_words,
    longitudes,
    mu,
    mu_table,
    nilpotent_presentation,
    phi_q,
    r_of,
    word_length_estimate,
)
from milnor.fixtures import FIXTURES, fixture
from milnor.gauss import BasedDiagram, arc_table, random_diagram
from milnor.series import TruncSeries, in_gamma_q, magnus_expand
from milnor.words import FreeWord, alpha_word

from oracles import delta_brute, eta_words, linking, magnus, mu_brute, raw

SMALL = [f for f in FIXTURES if f != "chain12"]


def test_longitudes_examples():
    assert all(len(w) == 0 for w in longitudes(BasedDiagram.trivial(3)).longitudes)
    hopf = longitudes(fixture("hopf"))
    assert hopf.longitudes[0] == FreeWord([((1, 0), 1)])
    assert hopf.longitudes[1] == FreeWord([((0, 1), 1)])
    assert len(longitudes(fixture("kink")).longitudes[0]) == 0


def test_chen_series_order_one():
    for name in SMALL:
        d = fixture(name)
        table = chen_series(d, 1)
        for (i, j) in table.arcs():
            assert table[(i, j)] == TruncSeries.generator(i + 1, d.n, 1)


def test_chen_series_hopf_order_two():
    table = chen_series(fixture("hopf"), 2)
    assert table[(0, 1)].to_dict() == {(): 1, (1,): 1, (1, 2): 1, (2, 1): -1}
    assert table[(0, 1)] == magnus_expand(alpha_word([-2, 1, 2]), 2, 2)


@pytest.mark.parametrize("q", [1, 2, 3, 5])
def test_base_arcs_are_generators(q):
    d = fixture("borromean")
    table = chen_series(d, q)
    for i in range(d.n):
        assert table[(i, 0)] == TruncSeries.generator(i + 1, d.n, q)


def test_chen_word_examples():
    d = fixture("hopf")
    for a in arc_table(d).arcs():
        assert chen_word(d, 1, a) == FreeWord([(a[0] + 1, 1)])
    assert chen_word(d, 2, (0, 1)) == alpha_word([-2, 1, 2])


@pytest.mark.parametrize("name", FIXTURES)
def test_word_and_series_engines_agree(name):
    d = fixture(name)
    for q in range(1, 6):
        words = chen_words(d, q)
        table = chen_series(d, q)
        for a, w in words.items():
            assert magnus_expand(w, d.n, q) == table[a], (a, q)


@pytest.mark.parametrize("name", SMALL)
def test_words_match_oracle(name):
    d = fixture(name)
    for q in range(1, 5):
        ref = eta_words(raw(d), q)
        for a, w in chen_words(d, q).items():
            assert list(w) == ref[a]


def test_mu_examples():
    assert mu(fixture("hopf"), (2,)) == 0
    assert mu(fixture("hopf"), (1, 2)) == 1
    assert abs(mu(fixture("borromean"), (1, 2, 3))) == 1
    with pytest.raises(ValueError):
        mu(fixture("hopf"), (1, 3))
    with pytest.raises(ValueError):
        mu(fixture("hopf"), ())
    with pytest.raises(ValueError):
        mu(fixture("hopf"), (1, 2, 1), q=2)


@pytest.mark.parametrize("name", SMALL)
def test_mu_matches_brute_force(name):
    d = fixture(name)
    length = 3 if d.n >= 3 else 4
    for r in mu_table(d, length):
        assert r.mu == mu_brute(raw(d), r.seq)
        assert r.mu == mu(d, r.seq)


def test_delta_examples():
    d = fixture("hopf")
    rec = delta_and_mubar(d, (1, 2))
    assert (rec.delta, rec.mubar) == (0, rec.mu)
    b = delta_and_mubar(fixture("borromean"), (1, 2, 3))
    assert b.delta == 0 and b.mubar == b.mu and abs(b.mu) == 1
    dc = delta_and_mubar(fixture("double_clasp"), (1, 1, 2))
    assert dc.delta == 2 and 0 <= dc.mubar < 2
    with pytest.raises(ValueError):
        delta_and_mubar(d, (1,))


@pytest.mark.parametrize("name", ["hopf", "double_clasp", "whitehead", "borromean"])
def test_delta_memo_matches_enumeration(name):
    d = fixture(name)
    length = 3 if d.n >= 3 else 4
    for r in mu_table(d, length):
        assert r.delta == delta_direct(lambda j: mu(d, j), r.seq)
        assert r.delta == delta_brute(lambda j: mu_brute(raw(d), j), r.seq)
        assert r.delta == delta(d, r.seq)
        if r.delta:
            assert 0 <= r.mubar < r.delta and (r.mu - r.mubar) % r.delta == 0
        assert r.r == r_of(r.seq)


@pytest.mark.parametrize("name", SMALL)
def test_q_stability(name):
    d = fixture(name)
    length = 3 if d.n >= 3 else 4
    for r in mu_table(d, length):
        for extra in (1, 2, 3):
            assert mu(d, r.seq, q=len(r.seq) + extra) == r.mu


def test_linking_oracle_on_random_diagrams():
    rng = random.Random(2024)
    for _ in range(200):
        d = random_diagram(rng.randint(2, 3), rng.randint(0, 10), rng)
        for i in range(1, d.n + 1):
            for k in range(1, d.n + 1):
                assert mu(d, (i, k)) == linking(raw(d), i, k)


@pytest.mark.parametrize("name", SMALL)
def test_coloring_satisfies_crossing_relations(name):
    d = fixture(name)
    at = arc_table(d)
    for q in range(1, 6):
        table = chen_series(d, q, q - 1)
        for i in range(d.n):
            for j, (u, eps) in enumerate(zip(at.over_arc[i], at.sign[i]), 1):
                s = table[u] if eps > 0 else table[u].inverse()
                assert table[(i, j)] == s.inverse() * table[(i, j - 1)] * s


@pytest.mark.parametrize("name", SMALL)
def test_eta_stability(name):
    d = fixture(name)
    for q in range(1, 6):
        lo, hi = chen_series(d, q, q), chen_series(d, q + 1, q)
        for a in lo.arcs():
            diff = lo[a] * hi[a].inverse()
            low = diff.min_degree()
            assert low is None or low >= q


def test_phi_examples():
    triv = BasedDiagram.trivial(3)
    for q in (1, 2, 4):
        assert phi_q(triv, q) == [TruncSeries.generator(i, 3, q - 1) for i in (1, 2, 3)]
    for name in SMALL:
        d = fixture(name)
        assert phi_q(d, 2) == [TruncSeries.generator(i, d.n, 1) for i in range(1, d.n + 1)]
    assert phi_q(fixture("hopf"), 3)[0] == magnus_expand(alpha_word([-2, 1, 2]), 2, 2)


def test_presentation_examples():
    assert nilpotent_presentation(BasedDiagram.trivial(2), 3) == "< a1, a2 | Gamma_3(F) >"
    assert nilpotent_presentation(fixture("kink"), 4) == "< a1 | Gamma_4(F) >"
    # eta_2 of the second longitude is a conjugate of alpha_1, equal to it modulo Gamma_2
    text = nilpotent_presentation(fixture("hopf"), 2)
    assert text == "< a1, a2 | [a1, a2], [a2, a2^-1 a1 a2], Gamma_2(F) >"
    assert in_gamma_q(alpha_word([-2, 1, 2, -1]), 2)


def test_longitude_words_match_series():
    d = fixture("whitehead")
    words, peak = longitude_words(d, 4)
    assert peak >= max(len(w) for w in words)
    for w, s in zip(words, longitude_series(d, 4, 4)):
        assert magnus_expand(w, d.n, 4) == s
        assert magnus(list(w), d.n, 4) == s.to_dict()


def test_guard(monkeypatch):
    d = fixture("chain12")
    assert guard_limit() == 10**6
    assert word_length_estimate(d, 9) <= 10**6 < word_length_estimate(d, 10)
    with pytest.raises(GuardExceeded):
        chen_words(d, 10)
    monkeypatch.setenv("MILNOR_GUARD", "100")
    assert guard_limit() == 100
    with pytest.raises(GuardExceeded):
        chen_words(d, 4)
    monkeypatch.setenv("MILNOR_GUARD", "many")
    with pytest.raises(ValueError):
        guard_limit()


def test_chain12_words_grow_with_q():
    d = fixture("chain12")
    peaks = [longitude_words(d, q)[1] for q in (3, 5, 7)]
    assert peaks[0] < peaks[1] < peaks[2]
    assert peaks[2] > 4 * peaks[1]
