import random

import pytest
from hypothesis import given, strategies as st

from autqm.words import (
    CyclicWord,
    Word,
    conjugate,
    cyclic_reduce,
    enumerate_reduced_words,
    identity,
    invert,
    is_conjugate,
    multiply,
    power,
    primitive_root,
    random_reduced_word,
    reduce,
    word_key,
)


def w(letters, rank=2):
    return reduce(letters, rank)


raw_letters = st.lists(
    st.sampled_from([1, -1, 2, -2]), min_size=0, max_size=40
)


def reduced_words(max_len=12, rank=2):
    return raw_letters.map(lambda ls: reduce(ls[: max_len * 2], rank))


class TestReduce:
    def test_cancellation_to_identity(self):
        assert reduce([1, -1], 2) == identity(2)

    def test_nested_cancellation(self):
        assert reduce([1, 2, -2, -1, 1], 2).letters == (1,)

    def test_already_reduced_fixed_point(self):
        assert reduce([1, 2, 1], 2).letters == (1, 2, 1)

    def test_rejects_zero_letter(self):
        with pytest.raises(ValueError):
            reduce([1, 0], 2)

    def test_rejects_out_of_range_letter(self):
        with pytest.raises(ValueError):
            reduce([3], 2)

    @given(raw_letters)
    def test_idempotent(self, letters):
        once = reduce(letters, 2)
        assert reduce(once.letters, 2) == once


class TestMultiply:
    def test_inverse_pair(self):
        assert multiply(w([1, 2]), w([-2, -1])) == identity(2)

    def test_no_cancellation(self):
        assert multiply(w([1, 2]), w([2, 1])).letters == (1, 2, 2, 1)

    def test_partial_cancellation(self):
        # (aba^-1) * (ab^-1a^-1): the factors are mutual inverses, so the
        # concatenate-and-cancel oracle collapses everything.
        u, v = w([1, 2, -1]), w([1, -2, -1])
        oracle = reduce(u.letters + v.letters, 2)
        assert multiply(u, v) == oracle
        assert oracle == identity(2)

    def test_partial_cancellation_proper(self):
        # (ab, b^-1ab) cancels one letter pair on each side of the seam.
        u, v = w([1, 2]), w([-2, 1, 2])
        oracle = reduce(u.letters + v.letters, 2)
        assert multiply(u, v) == oracle
        assert oracle.letters == (1, 1, 2)

    def test_rank_mismatch(self):
        with pytest.raises(ValueError):
            multiply(identity(2), identity(3))

    @given(raw_letters, raw_letters, raw_letters)
    def test_associative(self, a, b, c):
        u, v, x = reduce(a, 2), reduce(b, 2), reduce(c, 2)
        assert multiply(multiply(u, v), x) == multiply(u, multiply(v, x))

    @given(raw_letters)
    def test_inverse_law(self, a):
        u = reduce(a, 2)
        assert multiply(u, invert(u)) == identity(2)
        assert multiply(invert(u), u) == identity(2)


class TestInvert:
    def test_identity(self):
        assert invert(identity(2)) == identity(2)

    def test_two_letters(self):
        assert invert(w([1, 2])).letters == (-2, -1)

    def test_commutator(self):
        # Reverse-and-negate oracle on aba^-1b^-1.
        u = w([1, 2, -1, -2])
        oracle = reduce([-l for l in reversed(u.letters)], 2)
        assert invert(u) == oracle
        assert oracle.letters == (2, 1, -2, -1)


class TestPower:
    def test_positive(self):
        assert power(w([1, 2]), 3).letters == (1, 2) * 3

    def test_conjugated_core(self):
        # (aba^-1)^2 = ab^2a^-1 via the repeated-multiply oracle.
        u = w([1, 2, -1])
        oracle = multiply(u, u)
        assert power(u, 2) == oracle
        assert oracle.letters == (1, 2, 2, -1)

    def test_negative(self):
        assert power(w([1]), -2).letters == (-1, -1)

    def test_zero(self):
        assert power(w([1, 2]), 0) == identity(2)

    @given(reduced_words(max_len=8), st.integers(min_value=-5, max_value=5))
    def test_matches_repeated_multiplication(self, u, k):
        expected = identity(2)
        step = u if k >= 0 else invert(u)
        for _ in range(abs(k)):
            expected = multiply(expected, step)
        assert power(u, k) == expected


class TestCyclicReduce:
    def test_single_conjugation_layer(self):
        core, t = cyclic_reduce(w([1, 2, -1]))
        assert core.letters == (2,)
        assert t.letters == (1,)

    def test_already_cyclically_reduced(self):
        core, t = cyclic_reduce(w([1, 2, -1, -2]))
        assert core == CyclicWord(2, (1, 2, -1, -2))
        assert t == identity(2)

    def test_strip_matching_ends(self):
        core, t = cyclic_reduce(w([2, 1, 1, -2]))
        assert core.letters == (1, 1)
        assert t.letters == (2,)

    @given(raw_letters)
    def test_replay(self, letters):
        u = reduce(letters, 2)
        core, t = cyclic_reduce(u)
        assert conjugate(core.as_word(), t) == u


class TestConjugacy:
    def test_conjugate_of_generator(self):
        assert is_conjugate(w([1, 2, -1]), w([2]))

    def test_rotation(self):
        assert is_conjugate(w([1, 2]), w([2, 1]))

    def test_distinct_squares(self):
        # Rotation-set oracle: no rotation of aa equals bb.
        u, v = w([1, 1]), w([2, 2])
        rotations = {u.letters, (u.letters[1:] + u.letters[:1])}
        assert v.letters not in rotations
        assert not is_conjugate(u, v)

    def test_conjugation_invariance(self):
        rng = random.Random(7)
        for _ in range(50):
            u = random_reduced_word(rng, 2, rng.randrange(0, 10))
            t = random_reduced_word(rng, 2, rng.randrange(0, 10))
            assert is_conjugate(u, conjugate(u, t))

    def test_equivalence_relation_on_samples(self):
        rng = random.Random(11)
        words = [random_reduced_word(rng, 2, rng.randrange(0, 8)) for _ in range(12)]
        for u in words:
            assert is_conjugate(u, u)
            for v in words:
                assert is_conjugate(u, v) == is_conjugate(v, u)
                for x in words:
                    if is_conjugate(u, v) and is_conjugate(v, x):
                        assert is_conjugate(u, x)


class TestCyclicWord:
    def test_canonical_rotation_is_least(self):
        c = CyclicWord(2, (2, 1))
        assert c.letters == (1, 2)

    def test_rejects_non_cyclically_reduced(self):
        with pytest.raises(ValueError):
            CyclicWord(2, (1, 2, -1))

    def test_empty_allowed(self):
        assert CyclicWord(2, ()).letters == ()


class TestPrimitiveRoot:
    def test_power_detection(self):
        c, m, t = primitive_root(power(w([1, 2]), 5))
        assert (c.letters, m, t) == ((1, 2), 5, identity(2))

    def test_conjugated_power(self):
        u = conjugate(power(w([1, 1, 2]), 3), w([2, 2]))
        c, m, t = primitive_root(u)
        assert m == 3
        assert conjugate(power(c, 3), t) == u

    def test_primitive_word(self):
        c, m, t = primitive_root(w([1, 2, -1, -2]))
        assert m == 1


def test_group_laws_bulk_trials():
    # High-volume seeded sweep at the documented scale: associativity and
    # the inverse law on words up to length 40.
    rng = random.Random(2024)
    for _ in range(1000):
        u, v, x = (
            random_reduced_word(rng, 2, rng.randrange(0, 41)) for _ in range(3)
        )
        assert multiply(multiply(u, v), x) == multiply(u, multiply(v, x))
        assert multiply(u, invert(u)) == identity(2)


def test_doctests():
    import doctest

    import autqm.words

    failures, _ = doctest.testmod(autqm.words)
    assert failures == 0


def test_enumeration_order_and_count():
    words = list(enumerate_reduced_words(2, 3))
    assert len(words) == 1 + 4 + 12 + 36
    keys = [word_key(x.letters) for x in words]
    assert keys == sorted(keys)
    assert words[0] == identity(2)
    assert [x.letters for x in words[1:5]] == [(1,), (-1,), (2,), (-2,)]
