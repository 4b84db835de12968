"""Exact word arithmetic in finitely generated free groups.

Letters are nonzero signed integers: ``i`` stands for the i-th basis
generator and ``-i`` for its inverse.  Every operation in this module
returns freely reduced words and is pure; values are immutable and safe
to share between threads.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence


def letter_key(letter: int) -> int:
    """Position of a letter in the total order 1 < -1 < 2 < -2 < ...

    This order fixes every canonical choice in the package (canonical
    rotations, lexicographic witnesses, deterministic search order).
    """
    return 2 * abs(letter) - (2 if letter > 0 else 1)


def word_key(letters: Sequence[int]) -> tuple:
    """Sort key for reduced words: by length, then letterwise."""
    return (len(letters), tuple(letter_key(l) for l in letters))


def _reduce_letters(letters: Iterable[int]) -> tuple[int, ...]:
    out: list[int] = []
    for l in letters:
        if out and out[-1] == -l:
            out.pop()
        else:
            out.append(l)
    return tuple(out)


@dataclass(frozen=True)
class Word:
    """A freely reduced word in the free group of the given rank."""

    rank: int
    letters: tuple[int, ...] = ()

    def __post_init__(self):
        if self.rank < 1:
            raise ValueError(f"rank must be a positive integer, got {self.rank}")
        object.__setattr__(self, "letters", tuple(self.letters))
        for l in self.letters:
            if l == 0 or abs(l) > self.rank:
                raise ValueError(f"letter {l} out of range for rank {self.rank}")
        for a, b in zip(self.letters, self.letters[1:]):
            if a == -b:
                raise ValueError(f"word {self.letters} is not freely reduced")

    def __len__(self) -> int:
        return len(self.letters)

    def __bool__(self) -> bool:
        return bool(self.letters)

    def key(self) -> tuple:
        return word_key(self.letters)

    def support(self) -> frozenset[int]:
        """Set of generator indices (unsigned) occurring in the word."""
        return frozenset(abs(l) for l in self.letters)

    # Light operator sugar over the module-level operations.
    def __mul__(self, other: "Word") -> "Word":
        return multiply(self, other)

    def __invert__(self) -> "Word":
        return invert(self)

    def __pow__(self, k: int) -> "Word":
        return power(self, k)


@dataclass(frozen=True)
class CyclicWord:
    """A cyclically reduced word considered up to rotation.

    The stored letter sequence is the canonical rotation: the
    lexicographically least one under the order 1 < -1 < 2 < -2 < ...,
    which makes conjugacy classes hashable and comparable.
    """

    rank: int
    letters: tuple[int, ...] = ()

    def __post_init__(self):
        if self.rank < 1:
            raise ValueError(f"rank must be a positive integer, got {self.rank}")
        letters = tuple(self.letters)
        for l in letters:
            if l == 0 or abs(l) > self.rank:
                raise ValueError(f"letter {l} out of range for rank {self.rank}")
        for a, b in zip(letters, letters[1:]):
            if a == -b:
                raise ValueError(f"cyclic word {letters} is not freely reduced")
        if letters and letters[0] == -letters[-1]:
            raise ValueError(f"cyclic word {letters} is not cyclically reduced")
        object.__setattr__(self, "letters", _canonical_rotation(letters))

    def __len__(self) -> int:
        return len(self.letters)

    def as_word(self) -> Word:
        return Word(self.rank, self.letters)


def _canonical_rotation(letters: tuple[int, ...]) -> tuple[int, ...]:
    if len(letters) < 2:
        return letters
    rotations = (letters[i:] + letters[:i] for i in range(len(letters)))
    return min(rotations, key=lambda rot: tuple(letter_key(l) for l in rot))


def identity(rank: int) -> Word:
    return Word(rank, ())


def generator(rank: int, index: int) -> Word:
    """The basis generator with the given (1-based, possibly negative) index."""
    return Word(rank, (index,))


def reduce(letters: Iterable[int], rank: int) -> Word:
    """Freely reduce a raw signed-index sequence.

    >>> reduce([1, -1], 2).letters
    ()
    >>> reduce([1, 2, -2, -1, 1], 2).letters
    (1,)
    >>> reduce([1, 2, 1], 2).letters
    (1, 2, 1)
    """
    letters = tuple(letters)
    for l in letters:
        if l == 0 or abs(l) > rank:
            raise ValueError(f"letter {l} out of range for rank {rank}")
    return Word(rank, _reduce_letters(letters))


def multiply(u: Word, v: Word) -> Word:
    """Product of two words, freely reduced."""
    if u.rank != v.rank:
        raise ValueError(f"rank mismatch: {u.rank} != {v.rank}")
    out = list(u.letters)
    for l in v.letters:
        if out and out[-1] == -l:
            out.pop()
        else:
            out.append(l)
    return Word(u.rank, tuple(out))


def multiply_all(words: Iterable[Word], rank: int) -> Word:
    prod = identity(rank)
    for w in words:
        prod = multiply(prod, w)
    return prod


def invert(u: Word) -> Word:
    """Inverse word: reversed sequence with negated letters.

    >>> invert(reduce([1, 2, -1, -2], 2)).letters
    (2, 1, -2, -1)
    """
    return Word(u.rank, tuple(-l for l in reversed(u.letters)))


def _strip_ends(letters: tuple[int, ...]) -> tuple[int, int]:
    i, j = 0, len(letters)
    while i < j - 1 and letters[i] == -letters[j - 1]:
        i += 1
        j -= 1
    return i, j


def cyclic_reduce(u: Word) -> tuple[CyclicWord, Word]:
    """Split u as conjugator * core * conjugator^-1 with core cyclically reduced.

    The returned core is the canonical rotation of its conjugacy class and
    the conjugator is adjusted so the identity u = t * core * t^-1 holds
    exactly for the canonical rotation.
    """
    letters = u.letters
    i, j = _strip_ends(letters)
    stripped = letters[i:j]
    core = CyclicWord(u.rank, stripped)
    # The canonical rotation shifts the core; fold the shift into the
    # conjugator: t' = t * prefix, where core = prefix * rest rotated.
    offset = 0
    if len(stripped) >= 2:
        for r in range(len(stripped)):
            if stripped[r:] + stripped[:r] == core.letters:
                offset = r
                break
    conjugator = Word(u.rank, letters[:i] + stripped[:offset])
    return core, conjugator


def power(u: Word, k: int) -> Word:
    """Reduced k-th power, via the cyclically reduced core (k may be negative).

    >>> power(reduce([1, 2], 2), 3).letters
    (1, 2, 1, 2, 1, 2)
    >>> power(reduce([1], 2), -2).letters
    (-1, -1)
    """
    if k == 0 or not u:
        return identity(u.rank)
    if k < 0:
        return power(invert(u), -k)
    # u = t * stripped * t^-1 is a reduced concatenation, and stripped is
    # cyclically reduced, so t * stripped^k * t^-1 is already reduced too.
    i, j = _strip_ends(u.letters)
    t = u.letters[:i]
    stripped = u.letters[i:j]
    raw = t + stripped * k + tuple(-l for l in reversed(t))
    return Word(u.rank, raw)


def is_conjugate(u: Word, v: Word) -> bool:
    """True iff the cyclic reductions agree up to rotation."""
    if u.rank != v.rank:
        raise ValueError(f"rank mismatch: {u.rank} != {v.rank}")
    return cyclic_reduce(u)[0] == cyclic_reduce(v)[0]


def conjugate(u: Word, t: Word) -> Word:
    """t * u * t^-1."""
    return multiply(t, multiply(u, invert(t)))


def primitive_root(u: Word) -> tuple[Word, int, Word]:
    """Write u = t * c^m * t^-1 with m maximal; returns (c, m, t).

    For the empty word returns (empty, 0, empty).
    """
    if not u:
        return identity(u.rank), 0, identity(u.rank)
    core, t = cyclic_reduce(u)
    letters = core.letters
    n = len(letters)
    for p in range(1, n + 1):
        if n % p:
            continue
        if letters[:p] * (n // p) == letters:
            return Word(u.rank, letters[:p]), n // p, t
    raise AssertionError("unreachable: every word is a power of itself")


def enumerate_reduced(rank: int, max_len: int) -> Iterator[tuple[int, ...]]:
    """All freely reduced letter tuples of length <= max_len, in canonical order.

    Canonical order is by length, then lexicographic under letter_key.
    """
    alphabet = sorted(
        [l for i in range(1, rank + 1) for l in (i, -i)], key=letter_key
    )
    layer: list[tuple[int, ...]] = [()]
    yield ()
    for _ in range(max_len):
        nxt = []
        for w in layer:
            for l in alphabet:
                if w and w[-1] == -l:
                    continue
                nxt.append(w + (l,))
        yield from nxt
        layer = nxt


def enumerate_reduced_words(rank: int, max_len: int) -> Iterator[Word]:
    for letters in enumerate_reduced(rank, max_len):
        yield Word(rank, letters)


def random_reduced_word(rng, rank: int, length: int) -> Word:
    """Uniform-ish random reduced word of exactly the given length."""
    letters: list[int] = []
    choices = [l for i in range(1, rank + 1) for l in (i, -i)]
    for _ in range(length):
        valid = [l for l in choices if not letters or l != -letters[-1]]
        letters.append(rng.choice(valid))
    return Word(rank, tuple(letters))
