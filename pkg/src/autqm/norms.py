"""Word norms, autocommutator length search, and duality lower bounds.

Exact norms are computed by bidirectional breadth-first search over
finite generating sets.  Autocommutator and commutator length searches
return upper bounds with replayable witnesses: their generating sets are
infinite, so a finite search can fail to find the optimum but can never
undershoot it.  The only unconditional lower bounds are 0 and 1, plus the
duality bounds derived from invariant quasimorphisms.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .automorphisms import (
    Automorphism,
    ad,
    apply,
    autocommutator,
    composite_pool,
    identity_automorphism,
    is_finite_group,
    word_transvection,
)
from .quasimorphisms import Quasimorphism
from .words import (
    Word,
    conjugate,
    enumerate_reduced_words,
    identity,
    invert,
    multiply,
    power,
    primitive_root,
    word_key,
)


@dataclass(frozen=True)
class Factor:
    """One factor of a norm witness: the word used and where it came from."""

    value: Word
    provenance: tuple = ()


@dataclass(frozen=True)
class NormResult:
    """Outcome of a norm computation.

    status 'exact' carries the norm and a witness of exactly that length;
    'cutoff' means the value exceeds the given cutoff; 'infinite' means
    the search space was exhausted without reaching the target.
    """

    status: str  # "exact" | "cutoff" | "infinite"
    value: Optional[int] = None
    cutoff: Optional[int] = None
    witness: Optional[tuple[Factor, ...]] = None

    def found(self) -> bool:
        return self.status == "exact"


def orbit_closure(
    words: Sequence[Word], autos: Sequence[Automorphism]
) -> tuple[Word, ...]:
    """Closure of a finite word set under a finite automorphism group."""
    autos = tuple(autos)
    if not is_finite_group(autos):
        raise ValueError("orbit closure needs a finite group of automorphisms")
    out = {apply(a, s) for a in autos for s in words}
    return tuple(sorted(out, key=lambda u: word_key(u.letters)))


def bfs_norm(g: Word, gens: Sequence[Word], cutoff: int) -> NormResult:
    """Exact word norm over a finite generating set, up to the cutoff.

    Bidirectional search: forward ball from the identity, backward ball
    from g (peeling generators off the right), meeting in the middle.
    Ties between witnesses of minimal length break lexicographically.
    """
    gens = sorted({s for s in gens if s}, key=lambda u: word_key(u.letters))
    if not g:
        return NormResult("exact", 0, cutoff, ())
    if not gens:
        return NormResult("infinite", None, cutoff, None)
    rank = g.rank
    for s in gens:
        if s.rank != rank:
            raise ValueError("generating set and target must share a rank")

    fwd_radius = (cutoff + 1) // 2
    bwd_radius = cutoff // 2
    df = {identity(rank): 0}
    db = {g: 0}
    fparent: dict[Word, tuple[Word, Word]] = {}
    bparent: dict[Word, tuple[Word, Word]] = {}
    frontier_f = [identity(rank)]
    frontier_b = [g]
    exhausted = False
    for _ in range(fwd_radius):
        nxt = []
        for w in sorted(frontier_f, key=lambda u: word_key(u.letters)):
            for s in gens:
                t = multiply(w, s)
                if t not in df:
                    df[t] = df[w] + 1
                    fparent[t] = (w, s)
                    nxt.append(t)
        frontier_f = nxt
        if not frontier_f:
            exhausted = True
            break
    for _ in range(bwd_radius):
        nxt = []
        for w in sorted(frontier_b, key=lambda u: word_key(u.letters)):
            for s in gens:
                t = multiply(w, invert(s))
                if t not in db:
                    db[t] = db[w] + 1
                    bparent[t] = (w, s)
                    nxt.append(t)
        frontier_b = nxt
        if not frontier_b:
            break

    meets = df.keys() & db.keys()
    if not meets:
        if exhausted:
            return NormResult("infinite", None, cutoff, None)
        return NormResult("cutoff", None, cutoff, None)
    best = min(df[w] + db[w] for w in meets)
    if best > cutoff:
        return NormResult("cutoff", None, cutoff, None)

    def witness_of(meet: Word) -> tuple[Factor, ...]:
        left = []
        w = meet
        while df[w]:
            w, s = fparent[w]
            left.append(s)
        left.reverse()
        right = []
        w = meet
        while db[w]:
            w, s = bparent[w]
            right.append(s)
        return tuple(Factor(s) for s in left + right)

    candidates = sorted(
        (w for w in meets if df[w] + db[w] == best),
        key=lambda u: word_key(u.letters),
    )
    witness = min(
        (witness_of(w) for w in candidates),
        key=lambda ws: tuple(word_key(f.value.letters) for f in ws),
    )
    return NormResult("exact", best, cutoff, witness)


def _root_powers(g: Word) -> list[Word]:
    """Conjugated powers of the primitive root of g, natural witness guesses."""
    root, m, t = primitive_root(g)
    if m == 0:
        return []
    out = []
    for j in range(1, m + 1):
        for sign in (1, -1):
            out.append(conjugate(power(root, sign * j), t))
    return out


def _autocommutator_pool(
    g: Word, pool_depth: int, elem_len: int
) -> dict[Word, tuple[Automorphism, Word]]:
    """Candidate autocommutator values keyed by word, canonical first wins.

    The pool combines composites of elementary automorphisms up to
    pool_depth, inner automorphisms by short words, and transvections by
    conjugated root powers of the target (the shapes single-factor
    witnesses actually take).  Element candidates are short words plus
    those same root powers.
    """
    rank = g.rank
    autos: list[Automorphism] = list(composite_pool(rank, pool_depth))
    shorts = [u for u in enumerate_reduced_words(rank, elem_len) if u]
    autos.extend(ad(u) for u in shorts)
    roots = _root_powers(g)
    for u in roots:
        for x in range(1, rank + 1):
            if x not in u.support():
                autos.append(word_transvection(u, x))
    candidates = [identity(rank)] + shorts + [r for r in roots if r not in shorts]
    pool: dict[Word, tuple[Automorphism, Word]] = {}
    for phi in autos:
        for h in candidates:
            value = autocommutator(phi, h)
            if value and value not in pool:
                pool[value] = (phi, h)
    return pool


def _product_search(
    pool: dict[Word, tuple],
    g: Word,
    k_max: int,
    kind: str,
    subpool_size: int = 256,
) -> NormResult:
    """Least k <= k_max with g a product of k pool values.

    k = 1 and 2 search the whole pool; deeper levels draw the leading
    factors from a bounded subpool (shortest values first), which keeps
    the upper-bound semantics while staying desk-sized.
    """
    if not g:
        return NormResult("exact", 0, k_max, ())
    order = sorted(pool, key=lambda u: word_key(u.letters))

    def factor(word: Word) -> Factor:
        return Factor(word, (kind, *pool[word]))

    if k_max >= 1 and g in pool:
        return NormResult("exact", 1, k_max, (factor(g),))
    if k_max >= 2:
        for t in order:
            rest = multiply(invert(t), g)
            if rest in pool:
                return NormResult("exact", 2, k_max, (factor(t), factor(rest)))
    sub = order[:subpool_size]
    for k in range(3, k_max + 1):
        found = _peel(pool, sub, g, k)
        if found is not None:
            return NormResult(
                "exact", k, k_max, tuple(factor(t) for t in found)
            )
    return NormResult("cutoff", None, k_max, None)


def _peel(
    pool: dict[Word, tuple],
    sub: list[Word],
    g: Word,
    k: int,
) -> Optional[tuple[Word, ...]]:
    if k == 1:
        return (g,) if g in pool else None
    for t in sub:
        rest = multiply(invert(t), g)
        tail = _peel(pool, sub, rest, k - 1)
        if tail is not None:
            return (t,) + tail
    return None


def acl_upper(
    g: Word, pool_depth: int = 1, elem_len: int = 3, k_max: int = 2
) -> NormResult:
    """Upper bound for autocommutator length, with a replayable witness.

    Finds the least k within the configured search space such that g is a
    product of k autocommutators; search incompleteness can only
    overestimate the true length.
    """
    if min(pool_depth, elem_len, k_max) < 1:
        raise ValueError("search parameters must be positive")
    if not g:
        return NormResult("exact", 0, k_max, ())
    pool = _autocommutator_pool(g, pool_depth, elem_len)
    return _product_search(pool, g, k_max, "autocommutator")


def cl_upper(g: Word, len_cap: int = 3, k_max: int = 2) -> NormResult:
    """Upper bound for commutator length with both entries capped in length."""
    if min(len_cap, k_max) < 1:
        raise ValueError("search parameters must be positive")
    if not g:
        return NormResult("exact", 0, k_max, ())
    pool: dict[Word, tuple] = {}
    shorts = [u for u in enumerate_reduced_words(g.rank, len_cap)]
    for u in shorts:
        for v in shorts:
            value = multiply(multiply(u, v), multiply(invert(u), invert(v)))
            if value and value not in pool:
                pool[value] = (u, v)
    return _product_search(pool, g, k_max, "commutator")


def transvection_witness(g: Word, x_index: int, n: int) -> tuple[Automorphism, Word]:
    """The single-autocommutator witness for powers of a free-factor element.

    Returns phi with x -> g^n x (fixing the rest of the basis) and the
    word x, so that the autocommutator of (phi, x) is exactly g^n.  The
    caller asserts that g avoids the chosen basis generator; if it does
    not, there is no such transvection and we refuse.
    """
    if not 1 <= x_index <= g.rank:
        raise ValueError("basis index out of range")
    if x_index in g.support():
        raise ValueError(f"generator {x_index} occurs in the word")
    u = power(g, n)
    if not u:
        return identity_automorphism(g.rank), Word(g.rank, (x_index,))
    return word_transvection(u, x_index), Word(g.rank, (x_index,))


@dataclass(frozen=True)
class SaclEstimate:
    """Two-sided information about stable autocommutator length.

    upper: least found acl-upper(g^n)/n; None when no power factorizes
    within the search budget.  lower: best duality bound from evaluators
    asserted invariant under the full automorphism group.  The analogous
    bound from merely finite-group-invariant evaluators constrains only
    the restricted norm, so it is reported separately and never merged.
    """

    upper: Optional[Fraction]
    lower: Fraction
    restricted_lower: Fraction
    trace: tuple[tuple[int, NormResult], ...]


def duality_lower_bound(f: Quasimorphism, g: Word) -> Fraction:
    """|f(g)| / (2 D(f)): the homogeneous-quasimorphism bound on sacl."""
    if f.defect_bound is None or f.defect_bound == 0:
        raise ValueError("the duality bound needs a positive declared defect")
    if not f.homogeneous:
        raise ValueError("the duality bound is stated for homogeneous evaluators")
    return abs(f(g)) / (2 * f.defect_bound)


def sacl_estimate(
    g: Word,
    n_max: int,
    pool_depth: int = 1,
    elem_len: int = 3,
    k_max: int = 2,
    family: Sequence[Quasimorphism] = (),
) -> SaclEstimate:
    """Bracket stable autocommutator length by power search and duality."""
    if n_max < 1:
        raise ValueError("n_max must be positive")
    upper: Optional[Fraction] = None
    trace = []
    for n in range(1, n_max + 1):
        result = acl_upper(power(g, n), pool_depth, elem_len, k_max)
        trace.append((n, result))
        if result.found():
            candidate = Fraction(result.value, n)
            if upper is None or candidate < upper:
                upper = candidate
    lower = Fraction(0)
    restricted = Fraction(0)
    for f in family:
        if f.defect_bound is None or f.defect_bound == 0 or not f.homogeneous:
            continue
        bound = duality_lower_bound(f, g)
        if f.aut_invariant:
            lower = max(lower, bound)
        elif f.invariant_group:
            restricted = max(restricted, bound)
    return SaclEstimate(upper, lower, restricted, tuple(trace))


def invariant_norm_lower_bound(
    f: Quasimorphism, words: Sequence[Word], g: Word
) -> Fraction:
    """Lower bound |f(g)| / (sup_S |f| + D) for the orbit-closure norm.

    Valid for the exact norm over the closure of the word set under the
    group that f is certified invariant for; requires such a certificate
    and a positive denominator.
    """
    if not f.invariant_group and not f.aut_invariant:
        raise ValueError("the bound needs an invariance certificate")
    if f.defect_bound is None:
        raise ValueError("the bound needs a declared defect")
    sup = max((abs(f(s)) for s in words), default=Fraction(0))
    denominator = sup + f.defect_bound
    if denominator == 0:
        raise ValueError("the evaluator is trivial on the set with zero defect")
    return abs(f(g)) / denominator
