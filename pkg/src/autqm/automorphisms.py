"""Automorphisms of free groups as explicit basis-image tables.

An automorphism always carries the images of the basis under its inverse
as well; inverses are therefore a table swap, and composition never needs
a general inversion algorithm.  Every constructor validates the defining
round trip, so an ``Automorphism`` value is correct by construction.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from .words import Word, invert as invert_word, is_conjugate, multiply, power


@dataclass(frozen=True)
class AutoWitness:
    """Reconstruction recipe for an automorphism.

    kind is one of ``transvection`` (i, j, side), ``inversion`` (i,),
    ``permutation`` (images of 1..n), ``conjugation-by-word`` (letters),
    ``composite`` (child witnesses, applied right-to-left like function
    composition).
    """

    kind: str
    params: tuple

    def build(self, rank: int) -> "Automorphism":
        if self.kind == "composite":
            result = identity_automorphism(rank)
            for child in self.params:
                result = compose(result, child.build(rank))
            return result
        if self.kind == "conjugation-by-word":
            return ad(Word(rank, self.params))
        return elementary(self.kind, self.params, rank)

    def inverse(self) -> "AutoWitness":
        if self.kind == "inversion":
            return self
        if self.kind == "permutation":
            images = self.params
            inv = [0] * len(images)
            for i, img in enumerate(images, start=1):
                inv[img - 1] = i
            return AutoWitness("permutation", tuple(inv))
        if self.kind == "transvection":
            i, j, side = self.params
            flip = AutoWitness("inversion", (i,))
            return AutoWitness("composite", (flip, self, flip))
        if self.kind == "conjugation-by-word":
            return AutoWitness(
                "conjugation-by-word", tuple(-l for l in reversed(self.params))
            )
        if self.kind == "composite":
            return AutoWitness(
                "composite", tuple(child.inverse() for child in reversed(self.params))
            )
        raise ValueError(f"unknown witness kind {self.kind!r}")

    def to_obj(self):
        if self.kind == "composite":
            return {"kind": self.kind, "parts": [c.to_obj() for c in self.params]}
        return {"kind": self.kind, "params": list(self.params)}

    @staticmethod
    def from_obj(obj) -> "AutoWitness":
        if obj["kind"] == "composite":
            return AutoWitness(
                "composite", tuple(AutoWitness.from_obj(c) for c in obj["parts"])
            )
        return AutoWitness(obj["kind"], tuple(obj["params"]))


def _substitute(table: Sequence[Word], w: Word, rank: int) -> Word:
    out: list[int] = []
    for l in w.letters:
        img = table[abs(l) - 1].letters
        if l < 0:
            img = tuple(-x for x in reversed(img))
        for x in img:
            if out and out[-1] == -x:
                out.pop()
            else:
                out.append(x)
    return Word(rank, tuple(out))


@dataclass(frozen=True)
class Automorphism:
    """An automorphism of F_rank given by basis images and inverse images.

    Equality and hashing are extensional on the basis images; the witness
    is provenance only.
    """

    rank: int
    images: tuple[Word, ...]
    inverse_images: tuple[Word, ...]
    witness: Optional[AutoWitness] = field(default=None, compare=False)

    def __post_init__(self):
        n = self.rank
        if len(self.images) != n or len(self.inverse_images) != n:
            raise ValueError("image tables must have one word per generator")
        for w in self.images + self.inverse_images:
            if w.rank != n:
                raise ValueError("image word rank differs from automorphism rank")
        for i in range(1, n + 1):
            x = Word(n, (i,))
            fwd = _substitute(self.inverse_images, _substitute(self.images, x, n), n)
            bwd = _substitute(self.images, _substitute(self.inverse_images, x, n), n)
            if fwd != x or bwd != x:
                raise ValueError(
                    "image tables do not define mutually inverse automorphisms"
                )

    def __call__(self, w: Word) -> Word:
        return apply(self, w)

    def key(self) -> tuple:
        return tuple(w.key() for w in self.images)

    def to_obj(self):
        return {
            "rank": self.rank,
            "images": [list(w.letters) for w in self.images],
            "inverse_images": [list(w.letters) for w in self.inverse_images],
            "witness": self.witness.to_obj() if self.witness else None,
        }


def identity_automorphism(rank: int) -> Automorphism:
    gens = tuple(Word(rank, (i,)) for i in range(1, rank + 1))
    return Automorphism(
        rank, gens, gens, AutoWitness("permutation", tuple(range(1, rank + 1)))
    )


def elementary(kind: str, params: Sequence, rank: int) -> Automorphism:
    """A named Nielsen generator of Aut(F_rank).

    transvection (i, j, 'left'|'right'): x_j -> x_i x_j or x_j x_i;
    inversion (i,): x_i -> x_i^-1; permutation (p_1..p_n): x_i -> x_{p_i}.
    """
    params = tuple(params)
    gens = [Word(rank, (i,)) for i in range(1, rank + 1)]
    if kind == "transvection":
        i, j, side = params
        if i == j:
            raise ValueError("transvection requires distinct generator indices")
        if not (1 <= i <= rank and 1 <= j <= rank):
            raise ValueError("transvection indices out of range")
        if side not in ("left", "right"):
            raise ValueError(f"unknown transvection side {side!r}")
        images = list(gens)
        inverse_images = list(gens)
        if side == "left":
            images[j - 1] = Word(rank, (i, j))
            inverse_images[j - 1] = Word(rank, (-i, j))
        else:
            images[j - 1] = Word(rank, (j, i))
            inverse_images[j - 1] = Word(rank, (j, -i))
        return Automorphism(
            rank, tuple(images), tuple(inverse_images), AutoWitness(kind, params)
        )
    if kind == "inversion":
        (i,) = params
        if not 1 <= i <= rank:
            raise ValueError("inversion index out of range")
        images = list(gens)
        images[i - 1] = Word(rank, (-i,))
        return Automorphism(
            rank, tuple(images), tuple(images), AutoWitness(kind, params)
        )
    if kind == "permutation":
        if sorted(params) != list(range(1, rank + 1)):
            raise ValueError(f"{params} is not a permutation of 1..{rank}")
        images = tuple(Word(rank, (params[i - 1],)) for i in range(1, rank + 1))
        inv = [0] * rank
        for i, img in enumerate(params, start=1):
            inv[img - 1] = i
        inverse_images = tuple(Word(rank, (inv[i - 1],)) for i in range(1, rank + 1))
        return Automorphism(
            rank, images, inverse_images, AutoWitness(kind, params)
        )
    raise ValueError(f"unknown elementary kind {kind!r}")


def apply(phi: Automorphism, w: Word) -> Word:
    """Image of a word under the homomorphic extension of the basis images."""
    if phi.rank != w.rank:
        raise ValueError(f"rank mismatch: {phi.rank} != {w.rank}")
    return _substitute(phi.images, w, phi.rank)


def compose(phi: Automorphism, psi: Automorphism) -> Automorphism:
    """The automorphism x -> phi(psi(x))."""
    if phi.rank != psi.rank:
        raise ValueError(f"rank mismatch: {phi.rank} != {psi.rank}")
    n = phi.rank
    images = tuple(_substitute(phi.images, w, n) for w in psi.images)
    inverse_images = tuple(
        _substitute(psi.inverse_images, w, n) for w in phi.inverse_images
    )
    witness = None
    if phi.witness is not None and psi.witness is not None:
        witness = AutoWitness("composite", (phi.witness, psi.witness))
    return Automorphism(n, images, inverse_images, witness)


def compose_all(autos: Iterable[Automorphism], rank: int) -> Automorphism:
    result = identity_automorphism(rank)
    for a in autos:
        result = compose(result, a)
    return result


def inverse(phi: Automorphism) -> Automorphism:
    witness = phi.witness.inverse() if phi.witness is not None else None
    return Automorphism(phi.rank, phi.inverse_images, phi.images, witness)


def ad(g: Word) -> Automorphism:
    """Conjugation x -> g x g^-1 as an automorphism."""
    n = g.rank
    ginv = invert_word(g)
    images = tuple(
        multiply(g, multiply(Word(n, (i,)), ginv)) for i in range(1, n + 1)
    )
    inverse_images = tuple(
        multiply(ginv, multiply(Word(n, (i,)), g)) for i in range(1, n + 1)
    )
    return Automorphism(
        n, images, inverse_images, AutoWitness("conjugation-by-word", g.letters)
    )


def equal(phi: Automorphism, psi: Automorphism) -> bool:
    """Extensional equality: identical basis images."""
    if phi.rank != psi.rank:
        raise ValueError(f"rank mismatch: {phi.rank} != {psi.rank}")
    return phi.images == psi.images


def autocommutator(phi: Automorphism, g: Word) -> Word:
    """The word phi(g) * g^-1."""
    if phi.rank != g.rank:
        raise ValueError(f"rank mismatch: {phi.rank} != {g.rank}")
    return multiply(apply(phi, g), invert_word(g))


def word_transvection(u: Word, j: int, side: str = "left") -> Automorphism:
    """x_j -> u * x_j (or x_j * u), fixing all other generators.

    u must omit generator j entirely, which makes the map invertible with
    the evident inverse table.  The witness is the chain of letter
    transvections multiplying u in one letter at a time.
    """
    n = u.rank
    if not 1 <= j <= n:
        raise ValueError("generator index out of range")
    if j in u.support():
        raise ValueError(f"multiplier word uses generator {j}")
    gens = [Word(n, (i,)) for i in range(1, n + 1)]
    images = list(gens)
    inverse_images = list(gens)
    if side == "left":
        images[j - 1] = multiply(u, gens[j - 1])
        inverse_images[j - 1] = multiply(invert_word(u), gens[j - 1])
    elif side == "right":
        images[j - 1] = multiply(gens[j - 1], u)
        inverse_images[j - 1] = multiply(gens[j - 1], invert_word(u))
    else:
        raise ValueError(f"unknown side {side!r}")
    parts = []
    letters = u.letters if side == "left" else tuple(reversed(u.letters))
    for l in letters:
        w = AutoWitness("transvection", (abs(l), j, side))
        parts.append(w if l > 0 else w.inverse())
    witness = AutoWitness("composite", tuple(parts))
    return Automorphism(n, tuple(images), tuple(inverse_images), witness)


def elementary_automorphisms(rank: int) -> list[Automorphism]:
    """All Nielsen generators in canonical order.

    Order: non-identity permutations (lexicographic by image tuple), then
    inversions by index, then transvections by (i, j, side).  This order
    is the tie-break for every deterministic search in the package.
    """
    autos: list[Automorphism] = []
    for perm in itertools.permutations(range(1, rank + 1)):
        if perm == tuple(range(1, rank + 1)):
            continue
        autos.append(elementary("permutation", perm, rank))
    for i in range(1, rank + 1):
        autos.append(elementary("inversion", (i,), rank))
    for i in range(1, rank + 1):
        for j in range(1, rank + 1):
            if i == j:
                continue
            for side in ("left", "right"):
                autos.append(elementary("transvection", (i, j, side), rank))
    return autos


def signed_permutations(rank: int) -> list[Automorphism]:
    """All 2^n * n! signed permutations of the basis, in canonical order.

    Each sends x_i to x_{p_i} or its inverse; this is the stabilizer of
    the set of signed generators and the default finite group for
    averaging and orbit-closure constructions.
    """
    autos = []
    for perm in itertools.permutations(range(1, rank + 1)):
        base = elementary("permutation", perm, rank)
        for signs in itertools.product((1, -1), repeat=rank):
            phi = base
            for i, s in enumerate(signs, start=1):
                if s < 0:
                    phi = compose(elementary("inversion", (i,), rank), phi)
            autos.append(phi)
    return autos


def composite_pool(rank: int, depth: int) -> list[Automorphism]:
    """Composites of at most `depth` elementary automorphisms.

    Breadth-first by depth, deduplicated by basis-image table; within each
    depth the discovery order follows the canonical elementary order, so
    the returned list is deterministic.
    """
    elems = elementary_automorphisms(rank)
    ident = identity_automorphism(rank)
    seen = {ident.images: ident}
    pool = [ident]
    frontier = [ident]
    for _ in range(depth):
        nxt = []
        for a in frontier:
            for e in elems:
                c = compose(a, e)
                if c.images not in seen:
                    seen[c.images] = c
                    nxt.append(c)
        pool.extend(nxt)
        frontier = nxt
        if not frontier:
            break
    return pool


def achirality_search(
    g: Word, k_max: int, depth: int
) -> Optional[tuple[Automorphism, int]]:
    """Look for phi and k <= k_max with phi(g^k) conjugate to g^-k.

    Searches composites of elementary automorphisms breadth-first up to
    the given depth and returns the first witness in canonical order
    (least depth, then elementary order, then least k).  Returning None
    proves nothing: this is a semi-decision for achirality only.
    """
    if not g:
        raise ValueError("achirality is about nontrivial elements")
    powers = {k: (power(g, k), power(g, -k)) for k in range(1, k_max + 1)}
    for phi in composite_pool(g.rank, depth):
        for k in range(1, k_max + 1):
            pos, neg = powers[k]
            if is_conjugate(apply(phi, pos), neg):
                return phi, k
    return None


def random_composite(rng, rank: int, depth: int) -> Automorphism:
    """Composite of `depth` uniformly random elementary automorphisms."""
    elems = elementary_automorphisms(rank)
    picks = [elems[rng.randrange(len(elems))] for _ in range(depth)]
    return compose_all(picks, rank)


def is_finite_group(autos: Sequence[Automorphism]) -> bool:
    """True iff the list is a group under composition (with inverses)."""
    if not autos:
        return False
    rank = autos[0].rank
    table = {a.images for a in autos}
    if identity_automorphism(rank).images not in table:
        return False
    for a in autos:
        if inverse(a).images not in table:
            return False
        for b in autos:
            if compose(a, b).images not in table:
                return False
    return True
