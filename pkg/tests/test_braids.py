import numpy as np
import pytest

from freeholonomy.braids import (
    BraidWord,
    FreeWord,
    Permutation,
    act_free_word,
    act_perm_tuple,
    act_tuple,
    perm_of_braid,
    symbol_tuple,
)


def w(rank, *letters):
    return FreeWord(rank, letters)


def test_free_word_reduction():
    assert w(2, (0, 1), (0, -1)).letters == ()
    assert w(2, (0, 1), (1, 1), (1, -1), (0, 1)).letters == ((0, 1), (0, 1))
    a = w(2, (0, 1), (1, 1))
    assert (a * a.inverse()).letters == ()


def test_generator_rule_ei():
    b1 = BraidWord(2, [(0, 1)])
    assert act_free_word(b1, w(2, (0, 1))) == w(2, (1, 1))


def test_generator_rule_ei_plus_one():
    b1 = BraidWord(2, [(0, 1)])
    # e2 -> e2 e1 e2^-1
    assert act_free_word(b1, w(2, (1, 1))) == w(2, (1, 1), (0, 1), (1, -1))


def test_generator_fixes_others():
    b1 = BraidWord(3, [(0, 1)])
    assert act_free_word(b1, w(3, (2, 1))) == w(3, (2, 1))


def test_action_identity_on_random_words():
    rng = np.random.default_rng(0)
    for _ in range(30):
        k = int(rng.integers(2, 5))
        letters = [(int(rng.integers(0, k)), int(rng.choice([-1, 1]))) for _ in range(8)]
        word = FreeWord(k, letters)
        braid = BraidWord(k, [(int(rng.integers(0, k - 1)), int(rng.choice([-1, 1]))) for _ in range(5)])
        out = act_free_word(braid * braid.inverse(), word)
        assert out == word
        out2 = act_free_word(braid.inverse(), act_free_word(braid, word))
        assert out2 == word


def test_braid_relations_on_free_group():
    rng = np.random.default_rng(1)
    k = 4
    for _ in range(20):
        i = int(rng.integers(0, k - 2))
        lhs = BraidWord(k, [(i, 1), (i + 1, 1), (i, 1)])
        rhs = BraidWord(k, [(i + 1, 1), (i, 1), (i + 1, 1)])
        letters = [(int(rng.integers(0, k)), int(rng.choice([-1, 1]))) for _ in range(6)]
        word = FreeWord(k, letters)
        assert act_free_word(lhs, word) == act_free_word(rhs, word)
    far = BraidWord(4, [(0, 1), (2, 1)])
    raf = BraidWord(4, [(2, 1), (0, 1)])
    for _ in range(10):
        letters = [(int(rng.integers(0, 4)), int(rng.choice([-1, 1]))) for _ in range(6)]
        word = FreeWord(4, letters)
        assert act_free_word(far, word) == act_free_word(raf, word)


def test_braid_relations_on_tuples():
    k = 3
    t = symbol_tuple(k)
    lhs = BraidWord(k, [(0, 1), (1, 1), (0, 1)])
    rhs = BraidWord(k, [(1, 1), (0, 1), (1, 1)])
    assert act_tuple(lhs, t) == act_tuple(rhs, t)


def test_tuple_action_example():
    t = symbol_tuple(2)
    out = act_tuple(BraidWord(2, [(0, 1)]), t)
    x1, x2 = t
    assert out == (x1 * x2 * x1.inverse(), x1)


def test_tuple_action_axiom():
    t = symbol_tuple(3)
    braid = BraidWord(3, [(0, 1), (1, -1), (0, 1)])
    assert act_tuple(braid.inverse() * braid, t) == t


def test_perm_tuple_action():
    t = symbol_tuple(3)
    sigma = Permutation.transposition(3, 0, 1)
    assert act_perm_tuple(sigma, t) == (t[1], t[0], t[2])


def test_perm_of_braid_examples():
    b1 = BraidWord(2, [(0, 1)])
    assert perm_of_braid(b1) == Permutation.transposition(2, 0, 1)
    assert perm_of_braid(BraidWord(3)) == Permutation.identity(3)
    lhs = perm_of_braid(BraidWord(3, [(0, 1), (1, 1), (0, 1)]))
    rhs = perm_of_braid(BraidWord(3, [(1, 1), (0, 1), (1, 1)]))
    assert lhs == rhs == Permutation([2, 1, 0])  # the transposition (1 3)


def test_perm_of_braid_homomorphism():
    rng = np.random.default_rng(3)
    for _ in range(20):
        k = int(rng.integers(2, 6))
        u = BraidWord(k, [(int(rng.integers(0, k - 1)), int(rng.choice([-1, 1]))) for _ in range(4)])
        v = BraidWord(k, [(int(rng.integers(0, k - 1)), int(rng.choice([-1, 1]))) for _ in range(4)])
        assert perm_of_braid(u * v) == perm_of_braid(u) * perm_of_braid(v)


def test_braid_parse():
    b = BraidWord.parse(3, "s1 s2^-1 s1")
    assert b.letters == ((0, 1), (1, -1), (0, 1))
    with pytest.raises(ValueError):
        BraidWord.parse(3, "t1")
    with pytest.raises(ValueError):
        BraidWord.parse(2, "s5")


def test_rank_mismatch_errors():
    with pytest.raises(ValueError):
        act_free_word(BraidWord(3), w(2, (0, 1)))
    with pytest.raises(ValueError):
        act_tuple(BraidWord(3), symbol_tuple(2))
