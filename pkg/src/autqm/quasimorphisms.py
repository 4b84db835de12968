"""Counting quasimorphisms and their calculus, over exact rationals.

Everything here evaluates to fractions.Fraction; no floating point enters
this module.  A Quasimorphism bundles an evaluator with its declared
defect bound, homogeneity flag, and a provenance tree from which the CLI
can rebuild it bit-identically.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Optional, Sequence

from .automorphisms import Automorphism, apply, is_finite_group
from .words import (
    Word,
    cyclic_reduce,
    enumerate_reduced,
    invert,
    multiply,
    power,
    word_key,
)

# Declared defect bound for a counting quasimorphism with a pattern of
# length l.  Deliberately loose; the release gate checks that the exact
# defect of every short pattern stays below it.
DEFAULT_BOUND_FACTOR = 6


def default_brooks_bound(pattern_length: int) -> Fraction:
    return Fraction(DEFAULT_BOUND_FACTOR * pattern_length)


@dataclass(frozen=True)
class FreeGroupDomain:
    """Evaluation domain: the free group of the given rank."""

    rank: int

    def identity(self):
        return Word(self.rank, ())

    def multiply(self, g, h):
        return multiply(g, h)

    def invert(self, g):
        return invert(g)

    def elements(self, max_len: int):
        for letters in enumerate_reduced(self.rank, max_len):
            yield Word(self.rank, letters)

    def sort_key(self, g):
        return word_key(g.letters)

    def describe(self):
        return ("free", self.rank)


@dataclass(frozen=True)
class ProductDomain:
    """Evaluation domain: n-tuples over a common free factor, componentwise."""

    factor_rank: int
    size: int

    def identity(self):
        return tuple(Word(self.factor_rank, ()) for _ in range(self.size))

    def multiply(self, g, h):
        return tuple(multiply(a, b) for a, b in zip(g, h))

    def invert(self, g):
        return tuple(invert(a) for a in g)

    def elements(self, max_len: int):
        factor = [
            Word(self.factor_rank, letters)
            for letters in enumerate_reduced(self.factor_rank, max_len)
        ]
        yield from itertools.product(factor, repeat=self.size)

    def sort_key(self, g):
        return tuple(word_key(a.letters) for a in g)

    def describe(self):
        return ("product", self.factor_rank, self.size)


@dataclass(frozen=True)
class Quasimorphism:
    """An evaluator with declared defect bound and homogeneity flag.

    ``invariant_group`` lists a finite automorphism group under which the
    values are exactly invariant (set by finite_average).  The
    ``aut_invariant`` flag is a caller-level assertion of invariance under
    the full automorphism group; nothing in this artifact can certify it.
    """

    domain: object
    evaluate: Callable = field(compare=False)
    defect_bound: Optional[Fraction]
    homogeneous: bool
    provenance: tuple
    invariant_group: tuple[Automorphism, ...] = field(default=(), compare=False)
    aut_invariant: bool = False

    def __call__(self, g) -> Fraction:
        value = self.evaluate(g)
        if isinstance(value, float):
            raise TypeError("quasimorphism evaluators must stay exact")
        return Fraction(value)


@dataclass(frozen=True)
class DefectCertificate:
    """Either an attained lower bound for the defect, or a declared upper."""

    bound_type: str  # "enumerated-lower" | "declared-upper"
    value: Fraction
    witness: Optional[tuple] = None
    enumeration_range: Optional[int] = None


@dataclass(frozen=True)
class InvarianceReport:
    checked: int
    violations: tuple  # (auto index, sample, value on image, value on sample)

    def ok(self) -> bool:
        return not self.violations


def _count(haystack: tuple, needle: tuple) -> int:
    n = len(needle)
    if n == 0 or n > len(haystack):
        return 0
    return sum(
        1 for i in range(len(haystack) - n + 1) if haystack[i : i + n] == needle
    )


def brooks(w: Word, bound_factor: int = DEFAULT_BOUND_FACTOR) -> Quasimorphism:
    """Counting quasimorphism of a pattern word.

    Counts occurrences of the pattern as a subword of the reduced input
    (overlaps allowed) minus occurrences of the inverse pattern.
    """
    if not w:
        raise ValueError("the counting pattern must be nonempty")
    pattern = w.letters
    anti = invert(w).letters

    def evaluate(g: Word) -> int:
        return _count(g.letters, pattern) - _count(g.letters, anti)

    return Quasimorphism(
        domain=FreeGroupDomain(w.rank),
        evaluate=evaluate,
        defect_bound=Fraction(bound_factor * len(w)),
        homogeneous=False,
        provenance=("brooks", w.rank, w.letters),
    )


def _periodic_count(core: tuple, pattern: tuple) -> int:
    # Occurrences of the pattern in the bi-infinite periodic word, counted
    # once per period: start positions within one period.
    if not core:
        return 0
    repeats = 1 + (len(pattern) + len(core) - 1) // len(core)
    window = core * repeats
    return sum(
        1 for p in range(len(core)) if window[p : p + len(pattern)] == pattern
    )


def brooks_homogeneous(w: Word, bound_factor: int = DEFAULT_BOUND_FACTOR) -> Quasimorphism:
    """Homogenisation of the counting quasimorphism, evaluated exactly.

    On an element with cyclically reduced core c, the value is the number
    of pattern occurrences per period of the periodic word c^infinity,
    minus the same count for the inverse pattern.  Conjugacy-invariant and
    homogeneous by construction; the declared defect bound is twice the
    bound of the inhomogeneous counting function.
    """
    if not w:
        raise ValueError("the counting pattern must be nonempty")
    pattern = w.letters
    anti = invert(w).letters

    def evaluate(g: Word) -> int:
        core = cyclic_reduce(g)[0].letters
        return _periodic_count(core, pattern) - _periodic_count(core, anti)

    return Quasimorphism(
        domain=FreeGroupDomain(w.rank),
        evaluate=evaluate,
        defect_bound=Fraction(2 * bound_factor * len(w)),
        homogeneous=True,
        provenance=("homogenised", ("brooks", w.rank, w.letters)),
    )


def homogenise_numeric(
    f: Quasimorphism, g: Word, n: int
) -> tuple[Fraction, Fraction]:
    """Estimate the homogenisation at g as f(g^n)/n, with error bound D/n."""
    if f.defect_bound is None:
        raise ValueError("numeric homogenisation needs a declared defect bound")
    if n < 1:
        raise ValueError("the power must be positive")
    estimate = f(power(g, n)) / n
    return estimate, Fraction(f.defect_bound, n)


def defect_enumerate(f: Quasimorphism, max_len: int) -> DefectCertificate:
    """Exhaustive defect lower bound over all element pairs up to max_len.

    Returns the maximum of |f(g) + f(h) - f(gh)| with the lexicographically
    least witness pair attaining it.  Monotone nondecreasing in max_len.
    """
    domain = f.domain
    elements = list(domain.elements(max_len))
    best = Fraction(0)
    witness = (domain.identity(), domain.identity())
    witness_key = None
    values = {domain.sort_key(g): f(g) for g in elements}
    for g in elements:
        fg = values[domain.sort_key(g)]
        for h in elements:
            d = abs(fg + values[domain.sort_key(h)] - f(domain.multiply(g, h)))
            if d < best:
                continue
            key = (domain.sort_key(g), domain.sort_key(h))
            if d > best or (witness_key is not None and key < witness_key):
                best = d
                witness = (g, h)
                witness_key = key
    return DefectCertificate("enumerated-lower", best, witness, max_len)


def declared_defect_certificate(f: Quasimorphism) -> DefectCertificate:
    if f.defect_bound is None:
        raise ValueError("no declared defect bound")
    return DefectCertificate("declared-upper", f.defect_bound)


def brooks_defect_exact(w: Word) -> DefectCertificate:
    """The exact defect of brooks(w), with an attaining witness pair.

    For a counting quasimorphism, f(g) + f(h) - f(gh) depends only on the
    letters within pattern reach of the cancellation seam: write g = u*c,
    h = c^-1*v with c the maximal cancellation; occurrences lying fully
    inside u, c, or v cancel out of the sum (using f(c) + f(c^-1) = 0), so
    only crossings of the three junctions remain, and those see at most
    len(w) - 1 letters on each side.  Enumerating u, v up to len(w) - 1
    and c up to len(w) therefore attains the global supremum, realised on
    a pair of words no longer than 2*len(w) - 1.
    """
    if not w:
        raise ValueError("the counting pattern must be nonempty")
    rank = w.rank
    ell = len(w)
    pattern = w.letters
    anti = invert(w).letters
    shorts = list(enumerate_reduced(rank, ell - 1))
    longs = list(enumerate_reduced(rank, ell))
    cache: dict[tuple, int] = {}

    def value(t: tuple) -> int:
        got = cache.get(t)
        if got is None:
            got = _count(t, pattern) - _count(t, anti)
            cache[t] = got
        return got

    uv = {}
    for u in shorts:
        for v in shorts:
            if u and v and u[-1] == -v[0]:
                continue
            uv[(u, v)] = value(u + v)
    best = 0
    witness = ((), ())
    witness_key = None
    for c in longs:
        cinv = tuple(-l for l in reversed(c))
        for u in shorts:
            if u and c and u[-1] == -c[0]:
                continue
            left = value(u + c)
            for v in shorts:
                if c and v and v[0] == c[0]:
                    continue
                pair = uv.get((u, v))
                if pair is None:
                    continue
                d = left + value(cinv + v) - pair
                if d < 0:
                    d = -d
                if d < best:
                    continue
                g, h = u + c, cinv + v
                key = (word_key(g), word_key(h))
                if d > best or (witness_key is not None and key < witness_key):
                    best = d
                    witness = (g, h)
                    witness_key = key
    return DefectCertificate(
        "enumerated-lower",
        Fraction(best),
        (Word(rank, witness[0]), Word(rank, witness[1])),
        2 * ell - 1,
    )


def pullback(
    f: Quasimorphism, images: Sequence[Word], source_rank: Optional[int] = None
) -> Quasimorphism:
    """Precompose f with the homomorphism sending generators to the images."""
    if not isinstance(f.domain, FreeGroupDomain):
        raise ValueError("pullback targets a free-group evaluator")
    images = tuple(images)
    if source_rank is None:
        source_rank = len(images)
    if len(images) != source_rank:
        raise ValueError("one image word per source generator is required")
    for u in images:
        if u.rank != f.domain.rank:
            raise ValueError("image words must live in the target free group")

    def push(g: Word) -> Word:
        out = Word(f.domain.rank, ())
        for l in g.letters:
            piece = images[abs(l) - 1]
            out = multiply(out, piece if l > 0 else invert(piece))
        return out

    return Quasimorphism(
        domain=FreeGroupDomain(source_rank),
        evaluate=lambda g: f(push(g)),
        defect_bound=f.defect_bound,
        homogeneous=f.homogeneous,
        provenance=(
            "pullback",
            f.provenance,
            source_rank,
            tuple(u.letters for u in images),
        ),
        aut_invariant=False,
    )


def finite_average(f: Quasimorphism, autos: Sequence[Automorphism]) -> Quasimorphism:
    """Average f over a finite group of automorphisms.

    The result is exactly invariant under every member of the group; the
    defect bound and homogeneity are inherited (averaging cannot increase
    the defect).
    """
    if not isinstance(f.domain, FreeGroupDomain):
        raise ValueError("finite averaging is defined on free-group evaluators")
    autos = tuple(autos)
    if not is_finite_group(autos):
        raise ValueError("the averaging set must be a finite group of automorphisms")
    weight = Fraction(1, len(autos))

    def evaluate(g: Word) -> Fraction:
        return weight * sum(f(apply(a, g)) for a in autos)

    tables = tuple(
        (
            tuple(tuple(word.letters) for word in a.images),
            tuple(tuple(word.letters) for word in a.inverse_images),
        )
        for a in autos
    )
    return Quasimorphism(
        domain=f.domain,
        evaluate=evaluate,
        defect_bound=f.defect_bound,
        homogeneous=f.homogeneous,
        provenance=("finite_average", f.provenance, tables),
        invariant_group=autos,
    )


def product_average(f: Quasimorphism, k: int, n: int) -> Quasimorphism:
    """Sum f over the first k coordinates of n-tuples.

    The defect bound scales by k; homogeneity is inherited because powers
    act componentwise.
    """
    if not isinstance(f.domain, FreeGroupDomain):
        raise ValueError("product averaging starts from a free-group evaluator")
    if not 1 <= k <= n:
        raise ValueError(f"need 1 <= k <= n, got k={k}, n={n}")

    def evaluate(t) -> Fraction:
        if len(t) != n:
            raise ValueError(f"expected {n}-tuples")
        return sum((f(t[i]) for i in range(k)), Fraction(0))

    return Quasimorphism(
        domain=ProductDomain(f.domain.rank, n),
        evaluate=evaluate,
        defect_bound=None if f.defect_bound is None else k * f.defect_bound,
        homogeneous=f.homogeneous,
        provenance=("product_average", f.provenance, k, n),
    )


def linear_combination(
    terms: Sequence[tuple[Fraction, Quasimorphism]]
) -> Quasimorphism:
    """Exact linear combination of quasimorphisms on a common domain."""
    terms = tuple((Fraction(c), q) for c, q in terms)
    if not terms:
        raise ValueError("empty combination has no domain")
    domain = terms[0][1].domain
    for _, q in terms:
        if q.domain != domain:
            raise ValueError("all summands must share a domain")
    bound = Fraction(0)
    for c, q in terms:
        if q.defect_bound is None:
            bound = None
            break
        bound += abs(c) * q.defect_bound
    return Quasimorphism(
        domain=domain,
        evaluate=lambda g: sum((c * q(g) for c, q in terms), Fraction(0)),
        defect_bound=bound,
        homogeneous=all(q.homogeneous for _, q in terms),
        provenance=(
            "linear_combination",
            tuple((str(c), q.provenance) for c, q in terms),
        ),
    )


def zero(domain) -> Quasimorphism:
    """The zero quasimorphism: the only invariant evaluator always available."""
    return Quasimorphism(
        domain=domain,
        evaluate=lambda g: Fraction(0),
        defect_bound=Fraction(0),
        homogeneous=True,
        provenance=("zero", domain.describe()),
        aut_invariant=True,
    )


def check_invariance(
    f: Quasimorphism,
    autos: Sequence[Automorphism],
    samples: Iterable[Word],
) -> InvarianceReport:
    """Exact comparison of f(a(g)) against f(g) for every auto and sample."""
    violations = []
    checked = 0
    for g in samples:
        fg = f(g)
        for idx, a in enumerate(autos):
            checked += 1
            fag = f(apply(a, g))
            if fag != fg:
                violations.append((idx, g, fag, fg))
    return InvarianceReport(checked, tuple(violations))


def build_quasimorphism(provenance, rank_hint: Optional[int] = None) -> Quasimorphism:
    """Rebuild a quasimorphism from its provenance tree.

    Inverse of the ``provenance`` field for the constructions the CLI
    serializes; rebuilding and re-evaluating is bit-identical because all
    values are exact.
    """
    kind = provenance[0]
    if kind == "brooks":
        _, rank, letters = provenance
        return brooks(Word(rank, tuple(letters)))
    if kind == "homogenised":
        sub = provenance[1]
        if sub[0] != "brooks":
            raise ValueError("only counting quasimorphisms homogenise exactly")
        _, rank, letters = sub
        return brooks_homogeneous(Word(rank, tuple(letters)))
    if kind == "pullback":
        _, sub, source_rank, image_letters = provenance
        f = build_quasimorphism(sub)
        images = [Word(f.domain.rank, tuple(ls)) for ls in image_letters]
        return pullback(f, images, source_rank)
    if kind == "finite_average":
        _, sub, tables = provenance
        f = build_quasimorphism(sub)
        rank = f.domain.rank
        autos = [
            Automorphism(
                rank,
                tuple(Word(rank, tuple(ls)) for ls in images),
                tuple(Word(rank, tuple(ls)) for ls in inverse_images),
            )
            for images, inverse_images in tables
        ]
        return finite_average(f, autos)
    if kind == "product_average":
        _, sub, k, n = provenance
        return product_average(build_quasimorphism(sub), k, n)
    if kind == "linear_combination":
        _, pairs = provenance
        return linear_combination(
            [(Fraction(c), build_quasimorphism(sub)) for c, sub in pairs]
        )
    if kind == "zero":
        desc = provenance[1]
        if desc[0] == "free":
            return zero(FreeGroupDomain(desc[1]))
        if desc[0] == "product":
            return zero(ProductDomain(desc[1], desc[2]))
    raise ValueError(f"unknown provenance {provenance!r}")
