import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from linsdmm import codes, linalg
from linsdmm.errors import InvalidPoints, ShapeError, TooLarge
from linsdmm.galois import PrimeField
from linsdmm.schemes import build_hermitian

from . import oracles

F7, F11, F5 = PrimeField(7), PrimeField(11), PrimeField(5)


def test_rs3_gf7_distance_both_routes():
    c = codes.rs_code(F7, range(1, 7), 3)
    assert codes.minimum_distance(c) == 4
    assert codes.minimum_distance_by_codewords(c) == 4
    assert oracles.min_distance(c.gen.tolist(), 7) == 4
    assert codes.is_mds(c)


def test_repetition_code_is_constants():
    c = codes.rs_code(F7, range(1, 7), 1)
    for cw in oracles.codewords(c.gen.tolist(), 7):
        assert len(set(cw)) == 1


def test_grs2_with_square_multipliers_is_mds():
    pts = list(range(1, 7))
    c = codes.grs_code(F7, pts, [a * a % 7 for a in pts], 2)
    assert oracles.min_distance(c.gen.tolist(), 7) == 5
    assert codes.is_mds(c)


def test_rs4_gf11_distance():
    c = codes.rs_code(F11, range(10), 4)
    assert codes.minimum_distance(c) == 7


def test_full_space_and_parity_code():
    f2 = PrimeField(2)
    assert codes.minimum_distance(codes.LinearCode(f2, np.eye(7, dtype=np.int64))) == 1
    parity = np.hstack([np.eye(6, dtype=np.int64), np.ones((6, 1), dtype=np.int64)])
    assert codes.minimum_distance(codes.LinearCode(f2, parity)) == 2


def test_zero_code_sentinel():
    assert codes.minimum_distance(codes.LinearCode(F7, np.zeros((2, 5), dtype=np.int64))) == 6


def test_hermitian_star_code_distance_one():
    star = build_hermitian().star_code
    assert star.rank == 6
    assert codes.minimum_distance(star) == 1
    assert codes.minimum_distance_by_codewords(star) == 1


def test_star_product_rs_example():
    pts = range(1, 6)
    a, b = codes.rs_code(F11, pts, 2), codes.rs_code(F11, pts, 2)
    star = codes.star_product(a, b)
    assert star.rank == 3
    assert star.same_space(codes.rs_code(F11, pts, 3))
    # both inequalities hold with equality
    assert codes.minimum_distance(star) == codes.product_singleton_bound(2, 2, 5)
    assert star.rank == codes.star_dim_lower_bound(2, 2, 5)


def test_star_with_repetition_is_identity():
    rng = np.random.default_rng(3)
    c = codes.LinearCode(F11, F11.random((3, 7), rng))
    rep = codes.rs_code(F11, range(7), 1)
    assert codes.star_product(c, rep).same_space(c)


def test_star_of_random_codes_matches_codeword_enumeration():
    rng = np.random.default_rng(5)
    for _ in range(3):
        c = codes.LinearCode(F5, F5.random((2, 6), rng))
        d = codes.LinearCode(F5, F5.random((2, 6), rng))
        prods = [
            [x * y % 5 for x, y in zip(u, v)]
            for u in oracles.codewords(c.gen.tolist(), 5)
            for v in oracles.codewords(d.gen.tolist(), 5)
        ]
        assert codes.star_product(c, d).rank == oracles.rank(prods, 5)


def test_bound_formulas():
    assert codes.product_singleton_bound(3, 3, 10) == 6
    assert codes.star_dim_lower_bound(3, 3, 10) == 5
    assert codes.product_singleton_bound(1, 1, 9) == 9
    assert codes.star_dim_lower_bound(1, 1, 9) == 1
    assert codes.product_singleton_bound(5, 5, 4) == 1


def test_support_dual_and_mds():
    gen = np.array([[1, 2, 0, 3], [0, 1, 0, 1]])
    c = codes.LinearCode(F7, gen)
    assert codes.support(c) == (0, 1, 3)
    assert not codes.is_mds(c)
    for k in range(1, 7):
        rs = codes.rs_code(F7, range(1, 7), k)
        assert codes.is_mds(rs)
        assert codes.dual(rs).rank == 6 - k


def test_information_sets():
    rs = codes.rs_code(F7, range(1, 7), 3)
    for k_set in itertools.combinations(range(6), 3):
        assert codes.contains_information_set(rs, k_set)
    assert not codes.contains_information_set(rs, (0, 4))
    assert codes.information_set(rs, (5, 2, 4, 0)) == (0, 2, 4)
    star = build_hermitian().star_code
    assert codes.contains_information_set(star, range(7))
    assert not all(codes.contains_information_set(star, set(range(7)) - {i}) for i in range(7))


def test_invalid_inputs():
    with pytest.raises(InvalidPoints):
        codes.rs_code(F7, [1, 1, 2], 2)
    with pytest.raises(InvalidPoints):
        codes.grs_code(F7, [1, 2, 3], [1, 0, 1], 2)
    with pytest.raises(ShapeError):
        codes.rs_code(F7, [1, 2], 3)
    with pytest.raises(TooLarge):
        codes.minimum_distance_by_codewords(codes.rs_code(PrimeField(65537), range(1, 30), 10))


def test_budget_fallback_uses_known_distance():
    big = codes.rs_code(PrimeField(65537), range(1, 41), 12)
    assert codes.minimum_distance(big, budget=1 << 10, subset_budget=1 << 6) == 29


@st.composite
def code_pairs(draw):
    n = draw(st.integers(2, 7))
    k1 = draw(st.integers(1, 3))
    k2 = draw(st.integers(1, 3))
    seed = draw(st.integers(0, 2**32 - 1))
    rng = np.random.default_rng(seed)
    gen1 = F5.random((k1, n), rng)
    gen2 = F5.random((k2, n), rng)
    if draw(st.booleans()):
        gen1[:, draw(st.integers(0, n - 1))] = 0
    return codes.LinearCode(F5, gen1), codes.LinearCode(F5, gen2)


@given(code_pairs())
def test_star_product_invariants(pair):
    c, d = pair
    star = codes.star_product(c, d)
    n = c.length
    assert codes.support(star) == tuple(sorted(set(codes.support(c)) & set(codes.support(d))))
    if star.rank:
        assert codes.minimum_distance(star) <= codes.product_singleton_bound(c.rank, d.rank, n)
    full = len(codes.support(c)) == n and len(codes.support(d)) == n
    if full and (codes.is_mds(c) or codes.is_mds(d)):
        assert star.rank >= codes.star_dim_lower_bound(c.rank, d.rank, n)


@given(code_pairs())
def test_double_dual_is_identity(pair):
    c, _ = pair
    if c.rank:
        assert codes.dual(codes.dual(c)).same_space(c)


@given(st.integers(1, 6), st.integers(0, 2**32 - 1))
def test_rs_distance_is_singleton(k, seed):
    rng = np.random.default_rng(seed)
    pts = rng.choice(11, size=8, replace=False)
    c = codes.rs_code(F11, pts, k)
    assert codes.minimum_distance(c) == 8 - k + 1


@given(st.integers(0, 2**32 - 1))
def test_distance_routes_agree(seed):
    rng = np.random.default_rng(seed)
    c = codes.LinearCode(F5, F5.random((3, 6), rng))
    if c.rank:
        assert codes.minimum_distance(c, budget=0) == codes.minimum_distance_by_codewords(c)
