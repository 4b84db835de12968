"""Orbit minimization of free-group words under the automorphism group.

The toolkit here is classical: the finite set of Whitehead automorphisms,
greedy length descent to an orbit-minimal cyclic word, breadth-first
closure of the minimal level set, and the two predicates built on top of
it (primitivity, membership in a proper free factor).  Greedy descent
reaching the true orbit minimum is the standard peak-reduction fact and
is cross-checked in the test suite against brute-force orbit enumeration
at small lengths.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Optional

from .automorphisms import (
    Automorphism,
    apply,
    compose_all,
    elementary,
    inverse,
    signed_permutations,
)
from .words import CyclicWord, Word, cyclic_reduce, letter_key


class CutoffExceeded(RuntimeError):
    """A search hit its resource cutoff; partial results are not usable."""

    def __init__(self, message: str, partial_size: int):
        super().__init__(message)
        self.partial_size = partial_size


def type_one_autos(rank: int) -> list[Automorphism]:
    """Whitehead automorphisms of the first kind: signed permutations."""
    return signed_permutations(rank)


def type_two_autos(rank: int) -> list[Automorphism]:
    """Whitehead automorphisms of the second kind.

    For a multiplier letter a and a cut set Y containing a but not a^-1,
    the automorphism fixes a and sends every other generator x to
    a^{-[x^-1 in Y]} * x * a^{[x in Y]}.  Each is assembled from letter
    transvections, so it carries a replayable witness and valid inverse
    images by construction.  Y = {a} gives the identity, which is kept for
    deduplication by the caller.
    """
    letters = sorted(
        (l for i in range(1, rank + 1) for l in (i, -i)), key=letter_key
    )
    autos = []
    for a in letters:
        others = [x for x in range(1, rank + 1) if x != abs(a)]
        rest = [l for l in letters if abs(l) != abs(a)]
        for member in itertools.product((False, True), repeat=len(rest)):
            pieces = []
            chosen = {l for l, m in zip(rest, member) if m}
            for x in others:
                if x in chosen:
                    pieces.append(_right_mult(a, x, rank))
                if -x in chosen:
                    pieces.append(_left_mult(a, x, rank))
            autos.append(compose_all(pieces, rank))
    return autos


def _right_mult(a: int, x: int, rank: int) -> Automorphism:
    # x -> x * a for a signed letter a with |a| != x.
    base = elementary("transvection", (abs(a), x, "right"), rank)
    return base if a > 0 else inverse(base)


def _left_mult(a: int, x: int, rank: int) -> Automorphism:
    # x -> a^-1 * x for a signed letter a with |a| != x.
    base = elementary("transvection", (abs(a), x, "left"), rank)
    return inverse(base) if a > 0 else base


def whitehead_autos(rank: int) -> list[Automorphism]:
    """The full finite set of Whitehead automorphisms, deduplicated.

    Deterministic order: type I first (signed permutations in canonical
    order), then type II by multiplier letter and cut set.
    """
    seen = {}
    for phi in type_one_autos(rank) + type_two_autos(rank):
        if phi.images not in seen:
            seen[phi.images] = phi
    return list(seen.values())


def _cyclic_image(phi: Automorphism, c: CyclicWord) -> CyclicWord:
    return cyclic_reduce(apply(phi, c.as_word()))[0]


@dataclass(frozen=True)
class OrbitLevel:
    """All minimal-length cyclic words connected by length-preserving moves."""

    words: frozenset[CyclicWord]
    moves: tuple[tuple[CyclicWord, Automorphism, CyclicWord], ...]

    def length(self) -> int:
        return len(next(iter(self.words))) if self.words else 0


def minimize(w: Word) -> tuple[Word, list[tuple[Automorphism, Word]]]:
    """Greedy Whitehead descent to a minimal-length orbit representative.

    Returns the canonical minimal cyclic word (as a Word) together with
    the trace of moves: pairs (automorphism, resulting cyclic word), which
    replay the descent from w's conjugacy class.
    """
    autos = whitehead_autos(w.rank)
    current = cyclic_reduce(w)[0]
    trace: list[tuple[Automorphism, Word]] = []
    while len(current) > 0:
        best: Optional[tuple[int, int, CyclicWord]] = None
        for idx, phi in enumerate(autos):
            image = _cyclic_image(phi, current)
            if len(image) < len(current) and (best is None or len(image) < best[0]):
                best = (len(image), idx, image)
        if best is None:
            break
        _, idx, image = best
        trace.append((autos[idx], image.as_word()))
        current = image
    return current.as_word(), trace


def min_orbit_level(w: Word, max_size: int = 20000) -> OrbitLevel:
    """BFS closure of the minimal level set under Whitehead moves.

    Raises CutoffExceeded if the level set would exceed max_size; a
    truncated set must never be used for the predicates below.
    """
    autos = whitehead_autos(w.rank)
    start = cyclic_reduce(minimize(w)[0])[0]
    length = len(start)
    seen = {start}
    frontier = [start]
    moves: list[tuple[CyclicWord, Automorphism, CyclicWord]] = []
    while frontier:
        nxt = []
        for c in sorted(frontier, key=lambda x: x.letters):
            for phi in autos:
                image = _cyclic_image(phi, c)
                if len(image) != length:
                    continue
                moves.append((c, phi, image))
                if image not in seen:
                    seen.add(image)
                    nxt.append(image)
                    if len(seen) > max_size:
                        raise CutoffExceeded(
                            f"orbit level set exceeded {max_size} words", len(seen)
                        )
        frontier = nxt
    return OrbitLevel(frozenset(seen), tuple(moves))


def is_primitive(w: Word) -> bool:
    """True iff w lies in the automorphism orbit of a basis generator."""
    if not w:
        raise ValueError("the identity is not a primitive element")
    return len(minimize(w)[0]) == 1


def in_proper_free_factor(w: Word) -> bool:
    """True iff w is conjugate into a proper free factor.

    Criterion: some minimal-level orbit word omits a basis generator in
    both signs.
    """
    if not w:
        raise ValueError("the identity carries no free-factor information")
    for c in min_orbit_level(w).words:
        if len({abs(l) for l in c.letters}) < w.rank:
            return True
    return False


@dataclass(frozen=True)
class WhiteheadGraph:
    """Letter-adjacency graph of a cyclically reduced word.

    Vertices are the 2n signed letters; each cyclic adjacency x y of the
    word contributes an edge {x^-1, y}.  Connectedness without cut
    vertices certifies that the word is not contained in a proper free
    factor.
    """

    rank: int
    edges: tuple[tuple[int, int], ...]
    connected: bool
    has_cut_vertex: bool

    def vertices(self) -> tuple[int, ...]:
        return tuple(
            sorted((l for i in range(1, self.rank + 1) for l in (i, -i)), key=letter_key)
        )


def _components(vertices: list[int], adjacency: dict[int, set[int]]) -> int:
    remaining = set(vertices)
    count = 0
    while remaining:
        count += 1
        stack = [remaining.pop()]
        while stack:
            v = stack.pop()
            for u in adjacency[v]:
                if u in remaining:
                    remaining.remove(u)
                    stack.append(u)
    return count


def whitehead_graph(w: Word) -> WhiteheadGraph:
    """Build the Whitehead graph of a cyclically reduced word, with flags."""
    if not w:
        raise ValueError("the Whitehead graph needs a nonempty word")
    core, t = cyclic_reduce(w)
    if t != Word(w.rank, ()) or core.as_word().letters != w.letters:
        raise ValueError("whitehead_graph expects a cyclically reduced word")
    letters = w.letters
    edges = []
    for i, x in enumerate(letters):
        y = letters[(i + 1) % len(letters)]
        edges.append(tuple(sorted((-x, y), key=letter_key)))
    edges.sort(key=lambda e: (letter_key(e[0]), letter_key(e[1])))
    vertices = [l for i in range(1, w.rank + 1) for l in (i, -i)]
    adjacency: dict[int, set[int]] = {v: set() for v in vertices}
    for x, y in edges:
        adjacency[x].add(y)
        adjacency[y].add(x)
    connected = _components(vertices, adjacency) == 1
    has_cut = False
    if connected and len(vertices) > 2:
        for v in vertices:
            rest = [u for u in vertices if u != v]
            sub = {u: adjacency[u] - {v} for u in rest}
            if _components(rest, sub) > 1:
                has_cut = True
                break
    return WhiteheadGraph(w.rank, tuple(edges), connected, has_cut)
