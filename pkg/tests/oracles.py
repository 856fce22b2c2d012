"""Brute-force reference computations that share no code with the package.

Words are plain lists of ``(generator, exponent)`` pairs, series are plain
dicts, and arcs are re-derived from the raw event lists.
"""

from __future__ import annotations

import math
from itertools import combinations


def magnus(word, n, q):
    """Dict Magnus expansion: alpha_g -> 1 + X_g, alpha_g^-1 -> sum (-X_g)^k."""
    series = {(): 1}
    for g, e in word:
        out = dict(series)
        if e == 1:
            for mono, c in series.items():
                if len(mono) < q:
                    key = mono + (g,)
                    out[key] = out.get(key, 0) + c
        else:
            for mono, c in series.items():
                for k in range(1, q - len(mono) + 1):
                    key = mono + (g,) * k
                    out[key] = out.get(key, 0) + c * (-1) ** k
        series = {m: c for m, c in out.items() if c}
    return series


def reduce_word(word):
    out = []
    for g, e in word:
        if out and out[-1][0] == g and out[-1][1] == -e:
            out.pop()
        else:
            out.append((g, e))
    return out


def inverse(word):
    return [(g, -e) for g, e in reversed(word)]


def arcs_of(components):
    """components: list of lists of (crossing, is_over, sign).

    Returns (r, over_arc, signs, writhe) where over_arc[i] lists, for each
    under event of component i in order, the arc (comp, index) holding the
    matching over event.
    """
    over_at = {}
    for i, comp in enumerate(components):
        arc = 0
        for c, is_over, s in comp:
            if is_over:
                over_at[c] = (i, arc)
            else:
                arc += 1
    r, over_arc, signs, writhe = [], [], [], []
    for i, comp in enumerate(components):
        unders = [(c, s) for c, is_over, s in comp if not is_over]
        r.append(len(unders))
        over_arc.append([over_at[c] for c, _ in unders])
        signs.append([s for _, s in unders])
        writhe.append(sum(s for c, s in unders if over_at[c][0] == i))
    return r, over_arc, signs, writhe


def eta_words(components, q):
    """Literal eta_q words (meridian letters 1..n) for every arc."""
    r, over_arc, signs, _ = arcs_of(components)
    n = len(components)
    words = {(i, j): [(i + 1, 1)] for i in range(n) for j in range(r[i] + 1)}
    for _ in range(q - 1):
        new = {}
        for i in range(n):
            new[(i, 0)] = [(i + 1, 1)]
            v = []
            for j in range(1, r[i] + 1):
                u = words[over_arc[i][j - 1]]
                v = reduce_word(v + (u if signs[i][j - 1] > 0 else inverse(u)))
                new[(i, j)] = reduce_word(inverse(v) + [(i + 1, 1)] + v)
        words = new
    return words


def longitude_eta(components, q, k):
    r, over_arc, signs, writhe = arcs_of(components)
    words = eta_words(components, q)
    w = writhe[k]
    out = [(k + 1, -1 if w > 0 else 1)] * abs(w)
    for u, s in zip(over_arc[k], signs[k]):
        out += words[u] if s > 0 else inverse(words[u])
    return reduce_word(out)


def mu_brute(components, seq):
    if len(seq) == 1:
        return 0
    q = len(seq)
    lam = longitude_eta(components, q, seq[-1] - 1)
    return magnus(lam, len(components), q - 1).get(tuple(seq[:-1]), 0)


def linking(components, i, k):
    """Signed count of crossings with the over event on i and the under event on k (1-based)."""
    over_comp, under_comp, sign = {}, {}, {}
    for idx, comp in enumerate(components, 1):
        for c, is_over, s in comp:
            (over_comp if is_over else under_comp)[c] = idx
            sign[c] = s
    if i == k:
        return 0
    return sum(sign[c] for c in sign if over_comp[c] == i and under_comp[c] == k)


def delta_brute(mu_of, seq):
    g = 0
    for size in range(1, len(seq)):
        for idx in combinations(range(len(seq)), size):
            j = [seq[t] for t in idx]
            for s in range(size):
                g = math.gcd(g, abs(mu_of(tuple(j[s:] + j[:s]))))
    return g


def raw(d):
    """Plain nested lists from a package diagram."""
    return [[(e.crossing, e.over, e.sign) for e in comp] for comp in d.components]
