"""Truncated non-commutative power series and the Magnus expansion.

A series in the variables ``X_1 .. X_n`` is kept up to total degree ``q``.
Coefficients live in one flat integer array, degree blocks laid out one
after another; inside a block the monomial ``X_{i1} ... X_{id}`` sits at the
base-``n`` index of ``(i1-1, ..., id-1)``.  Concatenating two monomials is
then a flattened outer product, which is what makes multiplication cheap.

Arrays are ``int64`` while a product is provably overflow free and switch to
Python integers (``object`` dtype) otherwise, so coefficients are exact and
unbounded either way.
"""

from __future__ import annotations

from itertools import product as _cartesian
from typing import Iterable, Iterator, Mapping

import numpy as np

from milnor.words import FreeWord

__all__ = [
    "TruncSeries",
    "magnus_expand",
    "series_multiply",
    "series_invert",
    "in_gamma_q",
    "min_degree",
]

_INT64_SAFE = 2**62


class SeriesShapeError(ValueError):
    pass


def _offsets(n: int, q: int) -> list[int]:
    out = [0]
    for d in range(q + 1):
        out.append(out[-1] + n**d)
    return out


def _max_abs(arr: np.ndarray) -> int:
    if arr.size == 0:
        return 0
    return int(max(abs(int(arr.max())), abs(int(arr.min()))))


class TruncSeries:
    """Integer series in ``n`` non-commuting variables, truncated above degree ``q``."""

    __slots__ = ("n", "q", "_c", "_off")

    def __init__(self, n: int, q: int, coeffs: np.ndarray | None = None):
        if n < 1 or q < 0:
            raise SeriesShapeError(f"need n >= 1 and q >= 0, got n={n}, q={q}")
        self.n = n
        self.q = q
        self._off = _offsets(n, q)
        if coeffs is None:
            coeffs = np.zeros(self._off[-1], dtype=np.int64)
        elif coeffs.shape != (self._off[-1],):
            raise SeriesShapeError("coefficient array has the wrong length")
        self._c = coeffs

    # -- construction ----------------------------------------------------

    @classmethod
    def one(cls, n: int, q: int) -> "TruncSeries":
        s = cls(n, q)
        s._c[0] = 1
        return s

    @classmethod
    def generator(cls, i: int, n: int, q: int) -> "TruncSeries":
        """``1 + X_i``, the image of the i-th free generator."""
        if not 1 <= i <= n:
            raise ValueError(f"generator index {i} outside 1..{n}")
        s = cls.one(n, q)
        if q >= 1:
            s._c[1 + i - 1] = 1
        return s

    @classmethod
    def from_dict(cls, terms: Mapping[tuple[int, ...], int], n: int, q: int) -> "TruncSeries":
        s = cls(n, q)
        big = any(abs(v) >= _INT64_SAFE for v in terms.values())
        if big:
            s._c = s._c.astype(object)
        for mono, v in terms.items():
            if len(mono) > q:
                continue
            s._c[s._index(mono)] += v
        return s

    # -- indexing ----------------------------------------------------------

    def _index(self, mono: tuple[int, ...]) -> int:
        idx = 0
        for i in mono:
            if not 1 <= i <= self.n:
                raise ValueError(f"variable X_{i} outside X_1..X_{self.n}")
            idx = idx * self.n + (i - 1)
        return self._off[len(mono)] + idx

    def block(self, d: int) -> np.ndarray:
        return self._c[self._off[d] : self._off[d + 1]]

    def __getitem__(self, mono: Iterable[int]) -> int:
        mono = tuple(mono)
        if len(mono) > self.q:
            raise KeyError(f"monomial of degree {len(mono)} exceeds truncation {self.q}")
        return int(self._c[self._index(mono)])

    coefficient = __getitem__

    def items(self) -> Iterator[tuple[tuple[int, ...], int]]:
        """Nonzero terms, sorted lexicographically by index sequence."""
        found = []
        for d in range(self.q + 1):
            blk = self.block(d)
            for k in np.flatnonzero(blk):
                found.append((self._mono(d, int(k)), int(blk[k])))
        found.sort()
        return iter(found)

    def _mono(self, d: int, k: int) -> tuple[int, ...]:
        digits = []
        for _ in range(d):
            k, r = divmod(k, self.n)
            digits.append(r + 1)
        return tuple(reversed(digits))

    def to_dict(self) -> dict[tuple[int, ...], int]:
        return dict(self.items())

    def nnz(self) -> int:
        return int(np.count_nonzero(self._c))

    @property
    def constant(self) -> int:
        return int(self._c[0])

    # -- comparisons -------------------------------------------------------

    def _check_shape(self, other: "TruncSeries") -> None:
        if not isinstance(other, TruncSeries):
            raise TypeError(f"expected TruncSeries, got {type(other).__name__}")
        if (self.n, self.q) != (other.n, other.q):
            raise SeriesShapeError(
                f"mismatched series shapes (n={self.n}, q={self.q}) vs (n={other.n}, q={other.q})"
            )

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TruncSeries):
            return NotImplemented
        if (self.n, self.q) != (other.n, other.q):
            return False
        return bool(np.all(self._c == other._c))

    def __repr__(self) -> str:
        return f"TruncSeries(n={self.n}, q={self.q}, {self.to_text(sep=' + ')!r})"

    # -- arithmetic ----------------------------------------------------------

    def copy(self) -> "TruncSeries":
        return TruncSeries(self.n, self.q, self._c.copy())

    def truncate(self, q: int) -> "TruncSeries":
        if q > self.q:
            raise ValueError(f"cannot raise truncation from {self.q} to {q}")
        return TruncSeries(self.n, q, self._c[: _offsets(self.n, q)[-1]].copy())

    def __add__(self, other: "TruncSeries") -> "TruncSeries":
        self._check_shape(other)
        a, b = _common_dtype(self._c, other._c, 1)
        return TruncSeries(self.n, self.q, _narrow(a + b))

    def __sub__(self, other: "TruncSeries") -> "TruncSeries":
        self._check_shape(other)
        a, b = _common_dtype(self._c, other._c, 1)
        return TruncSeries(self.n, self.q, _narrow(a - b))

    def __neg__(self) -> "TruncSeries":
        return TruncSeries(self.n, self.q, -self._c)

    def __mul__(self, other: "TruncSeries") -> "TruncSeries":
        self._check_shape(other)
        return TruncSeries(self.n, self.q, _multiply(self, other))

    def inverse(self) -> "TruncSeries":
        return series_invert(self)

    def __pow__(self, k: int) -> "TruncSeries":
        base = self if k >= 0 else self.inverse()
        result = TruncSeries.one(self.n, self.q)
        for _ in range(abs(k)):
            result = result * base
        return result

    def times_var(self, i: int) -> "TruncSeries":
        """Right multiplication by the bare variable ``X_i``."""
        out = np.zeros_like(self._c)
        for d in range(1, self.q + 1):
            dst = out[self._off[d] : self._off[d + 1]].reshape(-1, self.n)
            dst[:, i - 1] = self.block(d - 1)
        return TruncSeries(self.n, self.q, out)

    def var_times(self, i: int) -> "TruncSeries":
        """Left multiplication by ``X_i``."""
        out = np.zeros_like(self._c)
        for d in range(1, self.q + 1):
            width = self.n ** (d - 1)
            start = self._off[d] + (i - 1) * width
            out[start : start + width] = self.block(d - 1)
        return TruncSeries(self.n, self.q, out)

    def min_degree(self) -> int | None:
        """Lowest degree >= 1 carrying a nonzero coefficient, or None."""
        for d in range(1, self.q + 1):
            if np.any(self.block(d)):
                return d
        return None

    # -- text ----------------------------------------------------------------

    def to_text(self, sep: str = "\n") -> str:
        """Stable text form, one ``coef * X_i1...X_is`` term per entry."""
        terms = [f"{v} * {_mono_text(m)}" for m, v in self.items()]
        return sep.join(terms) if terms else "0"


def _mono_text(mono: tuple[int, ...]) -> str:
    if not mono:
        return "1"
    return "".join(f"X_{i}" for i in mono)


def _common_dtype(a: np.ndarray, b: np.ndarray, factor: int) -> tuple[np.ndarray, np.ndarray]:
    if a.dtype == object or b.dtype == object:
        return a.astype(object), b.astype(object)
    if (_max_abs(a) + _max_abs(b)) * factor >= _INT64_SAFE:
        return a.astype(object), b.astype(object)
    return a, b


def _narrow(arr: np.ndarray) -> np.ndarray:
    if arr.dtype == object and _max_abs(arr) < _INT64_SAFE:
        return arr.astype(np.int64)
    return arr


def _multiply(a: TruncSeries, b: TruncSeries) -> np.ndarray:
    n, q, off = a.n, a.q, a._off
    ca, cb = a._c, b._c
    bound = (q + 1) * _max_abs(ca) * _max_abs(cb)
    if bound >= _INT64_SAFE or ca.dtype == object or cb.dtype == object:
        ca, cb = ca.astype(object), cb.astype(object)
    out = np.zeros(off[-1], dtype=ca.dtype)
    live_a = [bool(np.any(ca[off[d] : off[d + 1]])) for d in range(q + 1)]
    live_b = [bool(np.any(cb[off[d] : off[d + 1]])) for d in range(q + 1)]
    for da in range(q + 1):
        if not live_a[da]:
            continue
        blk_a = ca[off[da] : off[da + 1]]
        for db in range(q + 1 - da):
            if not live_b[db]:
                continue
            blk_b = cb[off[db] : off[db + 1]]
            d = da + db
            if da == 0:
                out[off[d] : off[d + 1]] += blk_a[0] * blk_b
            elif db == 0:
                out[off[d] : off[d + 1]] += blk_a * blk_b[0]
            else:
                out[off[d] : off[d + 1]] += np.multiply.outer(blk_a, blk_b).ravel()
    return _narrow(out)


def series_multiply(a: TruncSeries, b: TruncSeries) -> TruncSeries:
    """Truncated product ``a * b``; both factors must share ``(n, q)``."""
    return a * b


def series_invert(a: TruncSeries) -> TruncSeries:
    """Inverse of a series with constant term 1, solved degree by degree."""
    if a.constant != 1:
        raise ValueError(f"only series with constant term 1 are invertible here (got {a.constant})")
    n, q, off = a.n, a.q, a._off
    ca = a._c
    # |b_d| <= (2^d) * max|a|^d bounds the growth; fall back to Python ints early.
    if ca.dtype == object or (2 * max(_max_abs(ca), 1)) ** q * (q + 1) >= _INT64_SAFE:
        ca = ca.astype(object)
    out = np.zeros(off[-1], dtype=ca.dtype)
    out[0] = 1
    for d in range(1, q + 1):
        acc = np.zeros(n**d, dtype=ca.dtype)
        for da in range(1, d + 1):
            blk_a = ca[off[da] : off[da + 1]]
            if not np.any(blk_a):
                continue
            blk_b = out[off[d - da] : off[d - da + 1]]
            if d - da == 0:
                acc += blk_a * blk_b[0]
            else:
                acc += np.multiply.outer(blk_a, blk_b).ravel()
        out[off[d] : off[d + 1]] = -acc
    return TruncSeries(n, q, _narrow(out))


def _apply_letter(c: np.ndarray, gen: int, exp: int, n: int, off: list[int]) -> None:
    """In place: c <- c * (1 + X_gen)^exp, exp in {+1, -1}."""
    q = len(off) - 2
    col = gen - 1
    if exp == 1:
        for d in range(q, 0, -1):
            dst = c[off[d] : off[d + 1]].reshape(-1, n)
            dst[:, col] += c[off[d - 1] : off[d]]
    else:
        # c_new[d] = c[d] - c_new[d-1] X_gen
        for d in range(1, q + 1):
            dst = c[off[d] : off[d + 1]].reshape(-1, n)
            dst[:, col] -= c[off[d - 1] : off[d]]


def magnus_expand(w: FreeWord, n: int, q: int) -> TruncSeries:
    """Magnus expansion of a word over the meridian alphabet ``1..n``.

    Letters are integers; ``alpha_i`` maps to ``1 + X_i`` and its inverse
    to the alternating geometric series, truncated at degree ``q``.
    """
    if q < 0:
        raise ValueError("truncation order must be nonnegative")
    s = TruncSeries.one(n, q)
    off = s._off
    c = s._c
    for gen, exp in w:
        if not isinstance(gen, int) or not 1 <= gen <= n:
            raise ValueError(f"letter {gen!r} outside the alphabet 1..{n}")
        if c.dtype != object and _max_abs(c) >= 2**40:
            c = c.astype(object)
        _apply_letter(c, gen, exp, n, off)
    return TruncSeries(n, q, _narrow(c))


def min_degree(s: TruncSeries) -> int | None:
    return s.min_degree()


def in_gamma_q(w: FreeWord, q: int, n: int | None = None) -> bool:
    """True iff the word lies in the q-th lower central subgroup.

    Uses the Magnus criterion: ``E(w) - 1`` has no terms below degree ``q``.
    """
    if q <= 1:
        return True
    if n is None:
        n = max((g for g, _ in w), default=1)
    s = magnus_expand(w, n, q - 1)
    return s.min_degree() is None


def all_monomials(n: int, d: int) -> Iterator[tuple[int, ...]]:
    return _cartesian(range(1, n + 1), repeat=d)
