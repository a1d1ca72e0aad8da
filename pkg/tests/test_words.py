import math

import numpy as np
import pytest

from freeholonomy.levy import CharTriplet
from freeholonomy.words import (
    FixedMarginal,
    HaarMarginal,
    Marginals,
    TripletMarginal,
    WordError,
    canon_word,
    format_word,
    loop_l2_distance,
    parse_word,
    word_concat,
    word_inverse,
    word_moment,
    word_moment_nc,
    word_reversed,
)


def random_triplet(rng):
    n_atoms = int(rng.integers(0, 3))
    atoms = tuple(
        (float(rng.uniform(0.3, np.pi)), float(rng.uniform(0.05, 0.4))) for _ in range(n_atoms)
    )
    return CharTriplet(float(rng.uniform(-1, 1)), float(rng.uniform(0, 1)), atoms)


def random_marginals(seed, k):
    rng = np.random.default_rng(seed)
    return Marginals(
        [TripletMarginal(random_triplet(rng), float(rng.uniform(0.2, 1.5))) for _ in range(k)]
    )


def random_word(rng, k, length, max_exp=3):
    letters = [
        (int(rng.integers(0, k)), int(rng.choice([e for e in range(-max_exp, max_exp + 1) if e])))
        for _ in range(length)
    ]
    return canon_word(letters)


# -- canonical form and parsing ----------------------------------------------------


def test_canon_merges_and_cancels():
    assert canon_word([(0, 1), (0, 2)]) == ((0, 3),)
    assert canon_word([(0, 1), (1, 1), (1, -1), (0, -1)]) == ()
    assert canon_word([(0, 1), (1, 2), (1, -2), (0, 2)]) == ((0, 3),)
    assert canon_word([(0, 0), (1, 1)]) == ((1, 1),)


def test_parse_and_format():
    w = parse_word("a1^2 a2^-1 a1")
    assert w == ((0, 2), (1, -1), (0, 1))
    assert format_word(w) == "a1^2 a2^-1 a1"
    assert parse_word("") == ()
    with pytest.raises(WordError):
        parse_word("b2")


def test_inverse_concat_reverse():
    w = parse_word("a1 a2^-2")
    assert word_inverse(w) == ((1, 2), (0, -1))
    assert word_concat(w, word_inverse(w)) == ()
    assert word_reversed(parse_word("a1 a2 a1^-1")) == ((0, -1), (1, 1), (0, 1))


# -- known values --------------------------------------------------------------------


def test_product_of_free_elements_factorizes():
    m = Marginals([FixedMarginal({1: 0.3}), FixedMarginal({1: 0.7})])
    assert abs(word_moment(parse_word("a1 a2"), m) - 0.21) < 1e-14


def test_haar_commutator_vanishes():
    m = Marginals([HaarMarginal(), HaarMarginal()])
    assert word_moment(parse_word("a1 a2 a1^-1 a2^-1"), m) == 0
    assert word_moment_nc(parse_word("a1 a2 a1 a2"), m) == 0


def test_commutator_first_moment_formula():
    s, r = 0.3, 0.7
    m = Marginals([FixedMarginal({1: s}), FixedMarginal({1: r})])
    val = word_moment(parse_word("a1 a2 a1^-1 a2^-1"), m)
    assert abs(val - (s * s + r * r - s * s * r * r)) < 1e-12


def test_single_generator_words_collapse_to_moments():
    rng = np.random.default_rng(5)
    m = random_marginals(6, 1)
    for _ in range(10):
        e1, e2 = int(rng.integers(-3, 4)), int(rng.integers(-3, 4))
        w = canon_word([(0, e1), (0, e2)])
        want = m.moment(0, e1 + e2)
        assert abs(word_moment(w, m) - want) < 1e-12
        assert abs(word_moment_nc(w, m) - want) < 1e-12


# -- dual-algorithm agreement and structural properties ----------------------------------


def test_dual_algorithm_agreement_random_corpus():
    rng = np.random.default_rng(99)
    m = random_marginals(100, 3)
    for _ in range(120):
        w = random_word(rng, 3, int(rng.integers(1, 9)))
        a = word_moment(w, m)
        b = word_moment_nc(w, m)
        assert abs(a - b) < 1e-9, (w, a, b)


def test_traciality_under_cyclic_rotation():
    rng = np.random.default_rng(17)
    m = random_marginals(18, 2)
    for _ in range(25):
        w = random_word(rng, 2, int(rng.integers(2, 7)))
        if not w:
            continue
        rot = canon_word(list(w[1:]) + [w[0]])
        assert abs(word_moment(w, m) - word_moment(rot, m)) < 1e-9


def test_star_symmetry():
    rng = np.random.default_rng(23)
    m = random_marginals(24, 3)
    for _ in range(25):
        w = random_word(rng, 3, int(rng.integers(1, 7)))
        lhs = word_moment(word_inverse(w), m)
        rhs = word_moment(w, m).conjugate()
        assert abs(lhs - rhs) < 1e-9


def test_word_moments_bounded_by_one():
    rng = np.random.default_rng(31)
    m = random_marginals(32, 2)
    for _ in range(25):
        w = random_word(rng, 2, int(rng.integers(1, 8)))
        assert abs(word_moment(w, m)) <= 1 + 1e-9


def test_braid_invariance_of_free_pairs():
    # tau(P(a, a b a^-1)) = tau(P(a, b)) for random monomials P
    rng = np.random.default_rng(55)
    m = random_marginals(56, 2)
    for _ in range(30):
        deg = int(rng.integers(1, 7))
        p = random_word(rng, 2, deg, max_exp=2)
        substituted = []
        for g, e in p:
            if g == 0:
                substituted.append((0, e))
            else:
                step = [(0, 1), (1, 1), (0, -1)] if e > 0 else [(0, 1), (1, -1), (0, -1)]
                substituted.extend(step * abs(e))
        lhs = word_moment(canon_word(substituted), m)
        rhs = word_moment(p, m)
        assert abs(lhs - rhs) < 1e-9, p


def test_semigroup_identity_via_words():
    trip = CharTriplet(0.3, 0.7, ((math.pi, 0.25),))
    for s, t in ((0.5, 0.5), (0.5, 1.0), (1.0, 1.0)):
        pair = Marginals([TripletMarginal(trip, s), TripletMarginal(trip, t)])
        joint = TripletMarginal(trip, s + t)
        for n in range(1, 6):
            w = canon_word([(0, 1), (1, 1)] * n)
            assert abs(word_moment(w, pair) - joint.moment(n)) < 1e-9


# -- long-word routing and errors -----------------------------------------------------


def test_long_words_use_cumulant_route_consistently():
    rng = np.random.default_rng(77)
    m = random_marginals(78, 2)
    # alternating generators: canonical length is the full 13 letters
    w = tuple((i % 2, int(rng.choice([-2, -1, 1, 2]))) for i in range(13))
    assert len(canon_word(w)) == 13
    val = word_moment(w, m)  # routed to the cumulant evaluator
    ref = word_moment_nc(w, m, max_length=20)
    assert abs(val - ref) < 1e-12
    # and the two routes agree across the cutoff on a sweep of lengths
    for L in (10, 11, 12):
        wl = tuple((i % 2, 1 if i % 4 < 2 else -1) for i in range(L))
        assert abs(word_moment(wl, m) - word_moment_nc(wl, m, max_length=20)) < 1e-10


def test_nc_length_bound_error():
    m = random_marginals(1, 2)
    w = tuple((i % 2, 1) for i in range(14))
    with pytest.raises(WordError, match="word_moment"):
        word_moment_nc(w, m)


def test_fixed_marginal_depth_exhaustion():
    m = Marginals([FixedMarginal({1: 0.5})])
    with pytest.raises(WordError, match="exhausted"):
        word_moment(((0, 3),), m)


# -- loop metric ------------------------------------------------------------------------


def test_distance_zero_on_equal_words():
    m = random_marginals(8, 2)
    w = parse_word("a1 a2^-1")
    assert loop_l2_distance(w, w, m) == 0.0


def test_distance_to_identity_brownian():
    for t in (0.25, 1.0, 2.0):
        m = Marginals([TripletMarginal(CharTriplet(0, 1, ()), t)])
        d = loop_l2_distance(((0, 1),), (), m)
        assert abs(d - math.sqrt(2 - 2 * math.exp(-t / 2))) < 1e-12


def test_triangle_inequality_random_words():
    rng = np.random.default_rng(41)
    m = random_marginals(42, 2)
    for _ in range(20):
        u = random_word(rng, 2, int(rng.integers(0, 4)))
        v = random_word(rng, 2, int(rng.integers(0, 4)))
        z = random_word(rng, 2, int(rng.integers(0, 4)))
        duv = loop_l2_distance(u, v, m)
        dvz = loop_l2_distance(v, z, m)
        duz = loop_l2_distance(u, z, m)
        assert duz <= duv + dvz + 1e-9
        assert abs(duv - loop_l2_distance(v, u, m)) < 1e-12
