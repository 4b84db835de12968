import random
from collections import deque

import pytest

from autqm.automorphisms import (
    apply,
    elementary_automorphisms,
    equal,
    identity_automorphism,
    random_composite,
)
from autqm.whitehead import (
    CutoffExceeded,
    in_proper_free_factor,
    is_primitive,
    min_orbit_level,
    minimize,
    type_one_autos,
    type_two_autos,
    whitehead_autos,
    whitehead_graph,
)
from autqm.words import (
    CyclicWord,
    Word,
    cyclic_reduce,
    enumerate_reduced_words,
    random_reduced_word,
    reduce,
)


def w(letters, rank=2):
    return reduce(letters, rank)


def orbit_min_length_oracle(word, slack=3):
    """Minimal cyclic length in the Aut-orbit, by brute BFS over Nielsen moves.

    Independent of the Whitehead machinery: applies elementary
    automorphisms only, never Whitehead moves, with a hard length cap.
    """
    elems = elementary_automorphisms(word.rank)
    start = cyclic_reduce(word)[0]
    cap = len(start) + slack
    seen = {start}
    queue = deque([start])
    best = len(start)
    while queue:
        c = queue.popleft()
        for phi in elems:
            image = cyclic_reduce(apply(phi, c.as_word()))[0]
            if len(image) > cap or image in seen:
                continue
            seen.add(image)
            best = min(best, len(image))
            queue.append(image)
    return best


class TestWhiteheadAutos:
    def test_type_one_count_rank_two(self):
        assert len(type_one_autos(2)) == 8

    def test_identity_appears_once(self):
        autos = whitehead_autos(2)
        assert sum(1 for a in autos if equal(a, identity_automorphism(2))) == 1

    def test_round_trip_witnesses(self):
        for phi in whitehead_autos(2):
            assert equal(phi.witness.build(2), phi)

    def test_type_two_shape(self):
        # One automorphism per (multiplier, cut) pair before deduplication.
        assert len(type_two_autos(2)) == 4 * 4
        assert len(type_two_autos(3)) == 6 * 16


class TestMinimize:
    def test_primitive_with_exponent(self):
        minimal, trace = minimize(w([1, 2, 2]))
        assert len(minimal) == 1
        assert trace

    def test_commutator_already_minimal(self):
        minimal, trace = minimize(w([1, 2, -1, -2]))
        assert len(minimal) == 4
        assert trace == []

    def test_single_letter(self):
        assert minimize(w([1]))[0].letters == (1,)

    def test_trace_replays(self):
        rng = random.Random(3)
        for _ in range(20):
            word = random_reduced_word(rng, 2, rng.randrange(1, 10))
            minimal, trace = minimize(word)
            current = cyclic_reduce(word)[0]
            for phi, result in trace:
                current = cyclic_reduce(apply(phi, current.as_word()))[0]
                assert current.as_word() == result
            assert current.as_word() == minimal

    def test_matches_brute_force_orbit_minimum(self):
        for word in enumerate_reduced_words(2, 5):
            if not word:
                continue
            assert len(minimize(word)[0]) == orbit_min_length_oracle(word)

    def test_aut_invariance_of_minimal_length(self):
        rng = random.Random(5)
        for rank in (2, 3):
            for _ in range(50):
                word = random_reduced_word(rng, rank, rng.randrange(1, 13))
                phi = random_composite(rng, rank, rng.randrange(0, 4))
                assert len(minimize(word)[0]) == len(minimize(apply(phi, word))[0])


class TestOrbitLevel:
    def test_basis_letter_level(self):
        level = min_orbit_level(w([1]))
        assert CyclicWord(2, (1,)) in level.words
        assert level.words == {
            CyclicWord(2, (1,)),
            CyclicWord(2, (-1,)),
            CyclicWord(2, (2,)),
            CyclicWord(2, (-2,)),
        }

    def test_commutator_level_contains_both_orientations(self):
        level = min_orbit_level(w([1, 2, -1, -2]))
        assert CyclicWord(2, (1, 2, -1, -2)) in level.words
        assert CyclicWord(2, (2, 1, -2, -1)) in level.words

    def test_level_is_closed_under_moves(self):
        level = min_orbit_level(w([1, 1, 2, 2]))
        autos = whitehead_autos(2)
        length = level.length()
        for c in level.words:
            for phi in autos:
                image = cyclic_reduce(apply(phi, c.as_word()))[0]
                if len(image) == length:
                    assert image in level.words

    def test_cutoff_raises(self):
        with pytest.raises(CutoffExceeded):
            min_orbit_level(w([1, 1, 2, 2]), max_size=1)


class TestPredicates:
    def test_primitive_examples(self):
        assert is_primitive(w([1]))
        assert is_primitive(w([1, 2, 2]))
        assert not is_primitive(w([1, 1]))
        assert not is_primitive(w([1, 2, -1, -2]))

    def test_primitive_rejects_identity(self):
        with pytest.raises(ValueError):
            is_primitive(w([]))

    def test_free_factor_examples(self):
        assert in_proper_free_factor(w([2]))
        assert not in_proper_free_factor(w([1, 2, -1, -2]))
        assert in_proper_free_factor(w([1, 1, 2], rank=3))

    def test_primitive_implies_free_factor_membership(self):
        for word in [w([1]), w([1, 2]), w([1, 2, 2])]:
            assert is_primitive(word)
            assert in_proper_free_factor(word)


class TestWhiteheadGraph:
    def test_commutator_certificate(self):
        graph = whitehead_graph(w([1, 2, -1, -2]))
        assert graph.connected
        assert not graph.has_cut_vertex

    def test_square_graph(self):
        graph = whitehead_graph(w([1, 1]))
        assert graph.edges == ((1, -1), (1, -1))
        assert not graph.connected

    def test_two_letter_word_graph(self):
        # Direct construction: the cyclic word ab contributes the two
        # edges {a^-1, b} and {a, b^-1}, which leave the graph on all four
        # letters disconnected.
        graph = whitehead_graph(w([1, 2]))
        assert graph.edges == ((1, -2), (-1, 2))
        assert not graph.connected

    def test_rejects_non_cyclically_reduced(self):
        with pytest.raises(ValueError):
            whitehead_graph(w([1, 2, -1]))

    def test_certificate_consistency(self):
        # Whenever the graph of the minimal word is connected without a
        # cut vertex, the free-factor predicate must say "no".
        for word in enumerate_reduced_words(2, 5):
            if not word:
                continue
            minimal = minimize(word)[0]
            if not minimal:
                continue
            graph = whitehead_graph(minimal)
            if graph.connected and not graph.has_cut_vertex:
                assert not in_proper_free_factor(word)
