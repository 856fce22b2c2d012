"""Words in free groups.

A letter is a pair ``(generator, exponent)`` with exponent ``+1`` or ``-1``.
Generators are any hashable labels: plain integers ``i`` stand for the
meridian generators ``alpha_i``, pairs ``(i, j)`` for arc generators and
``(component, region)`` pairs for regions of cut-diagrams.
"""

from __future__ import annotations

from typing import Hashable, Iterable, Iterator, Sequence

__all__ = ["FreeWord", "free_reduce", "commutator", "alpha_word"]

Letter = tuple[Hashable, int]


class FreeWord:
    """An immutable, not necessarily reduced, word of signed letters."""

    __slots__ = ("letters",)

    def __init__(self, letters: Iterable[Letter] = ()):
        letters = tuple(letters)
        for gen, exp in letters:
            if exp not in (1, -1):
                raise ValueError(f"letter exponent must be +1 or -1, got {exp!r} on {gen!r}")
        self.letters: tuple[Letter, ...] = letters

    @classmethod
    def gen(cls, g: Hashable, exp: int = 1) -> "FreeWord":
        """``g ** exp`` spelled out as |exp| letters."""
        sign = 1 if exp >= 0 else -1
        return cls([(g, sign)] * abs(exp))

    def __iter__(self) -> Iterator[Letter]:
        return iter(self.letters)

    def __len__(self) -> int:
        return len(self.letters)

    def __getitem__(self, k):
        if isinstance(k, slice):
            return FreeWord(self.letters[k])
        return self.letters[k]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FreeWord):
            return NotImplemented
        return self.letters == other.letters

    def __hash__(self) -> int:
        return hash(self.letters)

    def __mul__(self, other: "FreeWord") -> "FreeWord":
        return FreeWord(self.letters + other.letters)

    def __pow__(self, k: int) -> "FreeWord":
        base = self if k >= 0 else self.inverse()
        return FreeWord(base.letters * abs(k))

    def inverse(self) -> "FreeWord":
        return FreeWord((g, -e) for g, e in reversed(self.letters))

    def reduce(self) -> "FreeWord":
        return free_reduce(self)

    def is_reduced(self) -> bool:
        return all(
            not (a[0] == b[0] and a[1] == -b[1]) for a, b in zip(self.letters, self.letters[1:])
        )

    def exponent_sum(self, g: Hashable) -> int:
        return sum(e for h, e in self.letters if h == g)

    def map(self, f) -> "FreeWord":
        """Relabel generators through ``f``."""
        return FreeWord((f(g), e) for g, e in self.letters)

    def __repr__(self) -> str:
        return f"FreeWord({self.to_text()!r})"

    def to_text(self, name=None) -> str:
        if not self.letters:
            return "1"
        name = name or _default_name
        return " ".join(name(g) + ("^-1" if e < 0 else "") for g, e in self.letters)


def _default_name(g: Hashable) -> str:
    if isinstance(g, int):
        return f"a{g}"
    if isinstance(g, tuple):
        return "a" + "_".join(str(x) for x in g)
    return str(g)


def free_reduce(w: FreeWord) -> FreeWord:
    """Cancel adjacent ``x x^-1`` pairs until none remain (stack pass)."""
    stack: list[Letter] = []
    for letter in w.letters:
        if stack and stack[-1][0] == letter[0] and stack[-1][1] == -letter[1]:
            stack.pop()
        else:
            stack.append(letter)
    return FreeWord(stack)


def commutator(x: FreeWord, y: FreeWord) -> FreeWord:
    """``[x, y] = x y^-1 x^-1 y``."""
    return x * y.inverse() * x.inverse() * y


def alpha_word(indices: Sequence[int]) -> FreeWord:
    """Meridian word from signed integers: ``[1, -2]`` is ``alpha_1 alpha_2^-1``."""
    out = []
    for k in indices:
        if k == 0:
            raise ValueError("0 is not a generator index")
        out.append((abs(k), 1 if k > 0 else -1))
    return FreeWord(out)
