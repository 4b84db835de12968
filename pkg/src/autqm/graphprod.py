"""Graph products of cyclic groups: normal forms and the product pipeline.

A finite simple graph with cyclic-order vertex labels presents a group in
which adjacent vertex groups commute.  Elements are normal-form syllable
sequences; the normal form is canonical (identical sequences iff equal
group elements), obtained by full syllable merging followed by the
lexicographically least linearization of the commutation trace.
"""

from __future__ import annotations

import heapq
import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .quasimorphisms import FreeGroupDomain, Quasimorphism
from .words import Word


@dataclass(frozen=True)
class VertexGraph:
    """Finite simple graph with a cyclic-group order per vertex (0 = infinite)."""

    vertices: tuple[int, ...]
    labels: tuple[int, ...]
    edges: frozenset[frozenset[int]]

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(self.vertices))
        object.__setattr__(self, "labels", tuple(self.labels))
        object.__setattr__(
            self, "edges", frozenset(frozenset(e) for e in self.edges)
        )
        if len(set(self.vertices)) != len(self.vertices):
            raise ValueError("duplicate vertex ids")
        if len(self.labels) != len(self.vertices):
            raise ValueError("one label per vertex required")
        if list(self.vertices) != sorted(self.vertices):
            raise ValueError("vertex ids must be listed in increasing order")
        for m in self.labels:
            if m < 0 or m == 1:
                raise ValueError(f"vertex order must be 0 or at least 2, got {m}")
        vs = set(self.vertices)
        for e in self.edges:
            if len(e) != 2 or not e <= vs:
                raise ValueError(f"bad edge {set(e)}")

    @staticmethod
    def build(labels: Sequence[int], edges: Sequence[tuple[int, int]]) -> "VertexGraph":
        n = len(labels)
        return VertexGraph(
            tuple(range(n)), tuple(labels), frozenset(frozenset(e) for e in edges)
        )

    def label(self, v: int) -> int:
        return self.labels[self.vertices.index(v)]

    def adjacent(self, u: int, v: int) -> bool:
        return frozenset((u, v)) in self.edges

    def induced(self, subset: Sequence[int]) -> "VertexGraph":
        subset = tuple(sorted(subset))
        labels = tuple(self.label(v) for v in subset)
        edges = frozenset(e for e in self.edges if e <= set(subset))
        return VertexGraph(subset, labels, edges)

    def is_complete(self) -> bool:
        n = len(self.vertices)
        return len(self.edges) == n * (n - 1) // 2


def _normalize_exponent(label: int, e: int) -> int:
    return e % label if label > 0 else e


def _merge(graph: VertexGraph, sylls: list[tuple[int, int]]) -> list[tuple[int, int]]:
    # Fully merge same-vertex syllables reachable through commuting
    # separators.  A merge to exponent zero deletes the syllable and
    # restarts, since its former neighbours may now interact.
    while True:
        out: list[tuple[int, int]] = []
        restart = False
        for idx, (v, e) in enumerate(sylls):
            i = len(out) - 1
            placed = False
            while i >= 0:
                u, f = out[i]
                if u == v:
                    merged = _normalize_exponent(graph.label(v), f + e)
                    if merged == 0:
                        del out[i]
                        sylls = [*out, *sylls[idx + 1 :]]
                        restart = True
                    else:
                        out[i] = (v, merged)
                    placed = True
                    break
                if not graph.adjacent(u, v):
                    break
                i -= 1
            if restart:
                break
            if not placed:
                out.append((v, e))
        if not restart:
            return out


def _canonical_order(
    graph: VertexGraph, sylls: list[tuple[int, int]]
) -> list[tuple[int, int]]:
    # Lexicographically least linearization of the commutation trace:
    # greedy smallest available vertex in a topological sort of the
    # dependence order (same vertex, or non-adjacent vertices).
    n = len(sylls)
    succs: list[list[int]] = [[] for _ in range(n)]
    indeg = [0] * n
    for i in range(n):
        vi = sylls[i][0]
        for j in range(i + 1, n):
            vj = sylls[j][0]
            if vi == vj or not graph.adjacent(vi, vj):
                succs[i].append(j)
                indeg[j] += 1
    heap = [(sylls[i][0], i) for i in range(n) if indeg[i] == 0]
    heapq.heapify(heap)
    out = []
    while heap:
        _, i = heapq.heappop(heap)
        out.append(sylls[i])
        for j in succs[i]:
            indeg[j] -= 1
            if indeg[j] == 0:
                heapq.heappush(heap, (sylls[j][0], j))
    return out


@dataclass(frozen=True)
class GPWord:
    """Normal-form element of a graph product.

    The constructor insists on normal form; use normal_form() to build
    from raw syllables.
    """

    graph: VertexGraph
    syllables: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        object.__setattr__(
            self, "syllables", tuple((v, e) for v, e in self.syllables)
        )
        for v, e in self.syllables:
            if v not in self.graph.vertices:
                raise ValueError(f"unknown vertex {v}")
            m = self.graph.label(v)
            if e == 0 or (m > 0 and not 0 < e < m):
                raise ValueError(f"exponent {e} invalid for vertex of order {m}")
        merged = _merge(self.graph, list(self.syllables))
        canonical = tuple(_canonical_order(self.graph, merged))
        if canonical != self.syllables:
            raise ValueError(f"{self.syllables} is not in normal form")

    def __len__(self) -> int:
        return len(self.syllables)

    def __bool__(self) -> bool:
        return bool(self.syllables)


def normal_form(graph: VertexGraph, raw: Sequence[tuple[int, int]]) -> GPWord:
    """Canonical normal form of a raw syllable sequence.

    Two sequences represent the same group element iff their normal forms
    are identical.
    """
    sylls = []
    for v, e in raw:
        if v not in graph.vertices:
            raise ValueError(f"unknown vertex {v}")
        e = _normalize_exponent(graph.label(v), e)
        if e:
            sylls.append((v, e))
    merged = _merge(graph, sylls)
    return GPWord(graph, tuple(_canonical_order(graph, merged)))


def gp_identity(graph: VertexGraph) -> GPWord:
    return GPWord(graph, ())


def gp_multiply(x: GPWord, y: GPWord) -> GPWord:
    if x.graph != y.graph:
        raise ValueError("elements live on different graphs")
    return normal_form(x.graph, x.syllables + y.syllables)


def gp_invert(x: GPWord) -> GPWord:
    return normal_form(x.graph, [(v, -e) for v, e in reversed(x.syllables)])


def gp_conjugate(x: GPWord, t: GPWord) -> GPWord:
    return gp_multiply(t, gp_multiply(x, gp_invert(t)))


def gp_generators(graph: VertexGraph) -> list[GPWord]:
    gens = []
    for v in graph.vertices:
        gens.append(GPWord(graph, ((v, 1),)))
        m = graph.label(v)
        inverse_exp = -1 if m == 0 else m - 1
        if m != 2:
            gens.append(GPWord(graph, ((v, _normalize_exponent(m, inverse_exp)),)))
    return gens


@dataclass(frozen=True)
class GraphProductDomain:
    """Quasimorphism evaluation domain for a graph product."""

    graph: VertexGraph

    def identity(self):
        return gp_identity(self.graph)

    def multiply(self, g, h):
        return gp_multiply(g, h)

    def invert(self, g):
        return gp_invert(g)

    def elements(self, max_len: int):
        gens = gp_generators(self.graph)
        seen = {gp_identity(self.graph)}
        yield gp_identity(self.graph)
        frontier = [gp_identity(self.graph)]
        for _ in range(max_len):
            nxt = []
            for x in frontier:
                for s in gens:
                    y = gp_multiply(x, s)
                    if y not in seen:
                        seen.add(y)
                        nxt.append(y)
                        yield y
            frontier = nxt

    def sort_key(self, g):
        return g.syllables

    def describe(self):
        return ("graphproduct", self.graph.labels, tuple(sorted(tuple(sorted(e)) for e in self.graph.edges)))


@dataclass(frozen=True)
class JoinDecomposition:
    """Maximal join decomposition of a vertex graph.

    gamma0 collects the vertices adjacent to everything (the complete
    part); the factors are the complement-graph components of size at
    least two, which are exactly the join-indecomposable parts.  The
    decomposition is unique up to permuting the factors; iso_classes
    groups factor indices by labelled-graph isomorphism.
    """

    graph: VertexGraph
    gamma0: tuple[int, ...]
    factors: tuple[tuple[int, ...], ...]
    iso_classes: tuple[tuple[int, ...], ...]


def _complement_components(graph: VertexGraph) -> list[list[int]]:
    remaining = set(graph.vertices)
    components = []
    for start in graph.vertices:
        if start not in remaining:
            continue
        remaining.remove(start)
        comp = [start]
        stack = [start]
        while stack:
            v = stack.pop()
            linked = [
                u for u in sorted(remaining) if u != v and not graph.adjacent(u, v)
            ]
            for u in linked:
                remaining.remove(u)
                comp.append(u)
                stack.append(u)
        components.append(sorted(comp))
    return components


def factor_isomorphism(
    graph: VertexGraph, source: Sequence[int], target: Sequence[int]
) -> Optional[dict[int, int]]:
    """Canonical labelled isomorphism between two induced subgraphs.

    Maps sorted source vertices onto a permutation of the target; among
    valid matchings the lexicographically least image tuple wins, making
    the choice of compatible isomorphisms deterministic.
    """
    source = tuple(sorted(source))
    target_sorted = tuple(sorted(target))
    if len(source) != len(target_sorted):
        return None
    for image in itertools.permutations(target_sorted):
        mapping = dict(zip(source, image))
        if any(graph.label(v) != graph.label(mapping[v]) for v in source):
            continue
        ok = True
        for u, v in itertools.combinations(source, 2):
            if graph.adjacent(u, v) != graph.adjacent(mapping[u], mapping[v]):
                ok = False
                break
        if ok:
            return mapping
    return None


def join_decompose(graph: VertexGraph) -> JoinDecomposition:
    components = _complement_components(graph)
    gamma0 = tuple(sorted(c[0] for c in components if len(c) == 1))
    factors = tuple(
        tuple(c) for c in sorted((c for c in components if len(c) >= 2), key=min)
    )
    classes: list[list[int]] = []
    for idx, factor in enumerate(factors):
        for cls in classes:
            if factor_isomorphism(graph, factor, factors[cls[0]]) is not None:
                cls.append(idx)
                break
        else:
            classes.append([idx])
    return JoinDecomposition(
        graph, gamma0, factors, tuple(tuple(c) for c in classes)
    )


def is_dinfty(graph: VertexGraph, factor: Sequence[int]) -> bool:
    """True iff the factor is a pair of non-adjacent order-2 vertices."""
    factor = tuple(sorted(factor))
    if len(factor) != 2:
        return False
    u, v = factor
    return (
        not graph.adjacent(u, v)
        and graph.label(u) == 2
        and graph.label(v) == 2
    )


def classify_virtually_abelian(graph: VertexGraph) -> bool:
    """Whether the graph product of the (cyclic) vertex groups is virtually abelian.

    True exactly when every join factor is an infinite-dihedral pair; a
    complete graph has no factors and is abelian outright.  Inputs with
    non-cyclic vertex groups must go through refine() first.
    """
    if not isinstance(graph, VertexGraph):
        raise TypeError("labels must be cyclic orders; apply refine() first")
    d = join_decompose(graph)
    return all(is_dinfty(graph, f) for f in d.factors)


def _primary_parts(m: int) -> list[int]:
    parts = []
    rest = m
    p = 2
    while p * p <= rest:
        if rest % p == 0:
            q = 1
            while rest % p == 0:
                rest //= p
                q *= p
            parts.append(q)
        p += 1
    if rest > 1:
        parts.append(rest)
    return sorted(parts)


def refine(
    abelian_labels: Sequence[Sequence[int]], edges: Sequence[tuple[int, int]]
) -> tuple[VertexGraph, tuple[tuple[int, ...], ...]]:
    """Split finitely generated abelian vertex groups into cyclic vertices.

    Each vertex carries a list of cyclic orders (0 for a free factor,
    composite orders allowed); it becomes a complete cluster of vertices
    labelled by primary cyclic orders and zeros, inheriting all outside
    adjacencies.  Returns the refined graph and the cluster of new ids
    for each original vertex.
    """
    clusters: list[list[int]] = []
    labels: list[int] = []
    for spec in abelian_labels:
        spec = list(spec)
        if not spec:
            raise ValueError("vertex groups must be nontrivial")
        cluster = []
        for m in spec:
            if m == 0:
                parts = [0]
            elif m >= 2:
                parts = _primary_parts(m)
            else:
                raise ValueError(f"invalid cyclic order {m}")
            for part in parts:
                cluster.append(len(labels))
                labels.append(part)
        clusters.append(cluster)
    new_edges: set[tuple[int, int]] = set()
    for cluster in clusters:
        for u, v in itertools.combinations(cluster, 2):
            new_edges.add((u, v))
    for u, v in edges:
        for a in clusters[u]:
            for b in clusters[v]:
                new_edges.add((a, b))
    graph = VertexGraph.build(labels, sorted(new_edges))
    return graph, tuple(tuple(c) for c in clusters)


def project_kill_h0(x: GPWord, d: JoinDecomposition) -> tuple[GPWord, ...]:
    """Image of x in the direct product of the join factors.

    Deletes the complete-part syllables and splits the rest by factor;
    distinct factors commute, so this is a homomorphism on normal forms.
    """
    if d.graph != x.graph:
        raise ValueError("decomposition belongs to a different graph")
    out = []
    for factor in d.factors:
        sub = d.graph.induced(factor)
        sylls = [(v, e) for v, e in x.syllables if v in factor]
        out.append(normal_form(sub, sylls))
    return tuple(out)


def permute_factors(
    x: GPWord, d: JoinDecomposition, sigma: Sequence[int]
) -> GPWord:
    """Apply the factor-permutation automorphism induced by sigma.

    sigma permutes factor indices within isomorphism classes.  Vertices
    travel through the fixed compatible isomorphisms (each factor's
    canonical isomorphism to its class representative), which makes the
    permutation action functorial: composing permutations composes the
    induced maps.  Complete-part syllables stay put.
    """
    sigma = tuple(sigma)
    if sorted(sigma) != list(range(len(d.factors))):
        raise ValueError("sigma must permute the factor indices")
    class_of = {}
    for cls in d.iso_classes:
        for i in cls:
            class_of[i] = cls[0]
    for i, j in enumerate(sigma):
        if class_of[i] != class_of[j]:
            raise ValueError(f"factors {i} and {j} are not isomorphic")
    vertex_map: dict[int, int] = {v: v for v in d.gamma0}
    for cls in d.iso_classes:
        rep = d.factors[cls[0]]
        to_rep = {
            i: factor_isomorphism(d.graph, d.factors[i], rep) for i in cls
        }
        from_rep = {
            i: {b: a for a, b in to_rep[i].items()} for i in cls
        }
        for i in cls:
            j = sigma[i]
            for v in d.factors[i]:
                vertex_map[v] = from_rep[j][to_rep[i][v]]
    return normal_form(x.graph, [(vertex_map[v], e) for v, e in x.syllables])


def _free_factor_rank(graph: VertexGraph, factor: Sequence[int]) -> Optional[int]:
    sub = graph.induced(factor)
    if sub.edges or any(m != 0 for m in sub.labels):
        return None
    return len(sub.vertices)


def gp_pipeline_qm(
    graph: VertexGraph,
    d: JoinDecomposition,
    f: Quasimorphism,
    k: int,
) -> Quasimorphism:
    """Promote a factor quasimorphism to the whole graph product.

    Kills the complete part, pushes each of the first k (pairwise
    isomorphic) factors onto the first through the canonical compatible
    isomorphisms, and sums the factor values.  Only free factors carry
    unbounded homogeneous evaluators; for any other factor type the zero
    quasimorphism is the only admissible input.
    """
    if d.graph != graph:
        raise ValueError("decomposition belongs to a different graph")
    if not 1 <= k <= len(d.factors):
        raise ValueError(f"need 1 <= k <= {len(d.factors)}, got {k}")
    base = d.factors[0]
    isos = []
    for i in range(k):
        iso = factor_isomorphism(graph, d.factors[i], base)
        if iso is None:
            raise ValueError(f"factor {i} is not isomorphic to factor 0")
        isos.append(iso)
    rank = _free_factor_rank(graph, base)
    if rank is None:
        if f.provenance[0] != "zero":
            raise ValueError(
                "non-free factors admit only the zero quasimorphism"
            )
    else:
        if not isinstance(f.domain, FreeGroupDomain) or f.domain.rank != rank:
            raise ValueError(
                f"the evaluator must live on the free factor of rank {rank}"
            )
    base_sorted = tuple(sorted(base))

    def embed(component: GPWord, iso: dict[int, int]) -> Word:
        letters = []
        for v, e in component.syllables:
            index = base_sorted.index(iso[v]) + 1
            letters.extend([index if e > 0 else -index] * abs(e))
        return Word(rank, tuple(letters))

    def evaluate(x: GPWord) -> Fraction:
        components = project_kill_h0(x, d)
        if rank is None:
            return Fraction(0)
        return sum(
            (f(embed(components[i], isos[i])) for i in range(k)), Fraction(0)
        )

    return Quasimorphism(
        domain=GraphProductDomain(graph),
        evaluate=evaluate,
        defect_bound=None if f.defect_bound is None else k * f.defect_bound,
        homogeneous=f.homogeneous,
        provenance=(
            "gp_pipeline",
            GraphProductDomain(graph).describe(),
            f.provenance,
            k,
        ),
    )
