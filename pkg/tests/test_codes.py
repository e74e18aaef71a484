import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from crtindex import codes
from crtindex.codes import (
    LinearCode,
    cartesian_power,
    centered,
    enumerate_code,
    min_euclidean_distance,
    min_sq_distance,
    rank_over_prime_field,
    reduce_mod,
    row_reduce_mod_p,
    squared_norms,
)
from crtindex.errors import ResourceLimitError


def brute_span(q, n, gens):
    """All Z_q-combinations of the generators, by nested loops."""
    words = set()
    for coeffs in itertools.product(range(q), repeat=len(gens)):
        words.add(tuple(sum(c * g[i] for c, g in zip(coeffs, gens)) % q for i in range(n)))
    return words or {(0,) * n}


def test_enumerate_rank_one_ternary():
    cb = enumerate_code(LinearCode(3, 3, ((1, 2, 2),)))
    assert set(cb) == {(0, 0, 0), (1, 2, 2), (2, 1, 1)}
    assert cb.cardinality == 3


def test_enumerate_zero_code():
    cb = enumerate_code(LinearCode(5, 2))
    assert list(cb) == [(0, 0)]


def test_enumerate_561_code():
    assert enumerate_code(LinearCode(561, 3, ((13, 14, 14),))).cardinality == 561


@settings(max_examples=40, deadline=None)
@given(
    st.sampled_from([2, 3, 4, 5, 6, 7, 9, 10]),
    st.integers(1, 3),
    st.data(),
)
def test_enumerate_matches_brute_force(q, n, data):
    k = data.draw(st.integers(0, 2))
    gens = tuple(tuple(data.draw(st.integers(0, q - 1)) for _ in range(n)) for _ in range(k))
    code = LinearCode(q, n, gens)
    cb = enumerate_code(code)
    assert set(cb) == brute_span(q, n, gens)
    assert q**n % cb.cardinality == 0
    for w in brute_span(q, n, gens):
        assert code.contains(w)


def test_contains_rejects_outside_word():
    code = LinearCode(6, 2, ((2, 4),))
    assert code.contains((4, 2))
    assert not code.contains((1, 2))
    assert not code.contains((3, 0))


def test_enumeration_cap(monkeypatch):
    code = LinearCode(7, 4, ((1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 1, 0)))
    with pytest.raises(ResourceLimitError):
        enumerate_code(code, cap=100)
    monkeypatch.setattr(codes, "ENUMERATION_CAP", 10)
    with pytest.raises(ResourceLimitError):
        enumerate_code(code)


def test_centered_examples():
    assert centered((5, 6, 6, 6), 7) == (-2, -1, -1, -1)
    assert centered((0, 0, 0), 9) == (0, 0, 0)
    assert centered((8, 1, 1), 11) == (-3, 1, 1)
    assert centered((2, 3), 4) == (2, -1)
    arr = centered(np.array([[5, 6, 6, 6]]), 7)
    assert arr.tolist() == [[-2, -1, -1, -1]]


@given(st.integers(2, 50), st.lists(st.integers(-1000, 1000), min_size=1, max_size=5))
def test_centered_is_minimal_lift(q, v):
    c = centered(v, q)
    for a, b in zip(v, c):
        assert (a - b) % q == 0
        assert -q < 2 * b <= q
        assert abs(b) <= min(abs(a % q), abs(a % q - q))


@pytest.mark.parametrize(
    "q,n,gens,d2",
    [
        (3, 3, ((1, 2, 2),), 3),
        (561, 3, ((13, 14, 14),), 561),
        (19, 4, ((4, 1, 1, 1),), 19),
        (5, 2, ((1, 0), (0, 1)), 1),
    ],
)
def test_min_distance_examples(q, n, gens, d2):
    got, d = min_euclidean_distance(enumerate_code(LinearCode(q, n, gens)))
    assert got == d2 and d == pytest.approx(math.sqrt(d2))
    assert min_sq_distance(LinearCode(q, n, gens)) == d2


def test_min_distance_zero_code_is_infinite():
    assert min_euclidean_distance(enumerate_code(LinearCode(7, 3))) == (math.inf, math.inf)
    assert min_sq_distance(LinearCode(7, 3)) == math.inf


def test_streamed_distance_matches_materialized(monkeypatch):
    code = LinearCode(11, 4, ((1, 2, 3, 4), (0, 1, 5, 7), (3, 0, 1, 9)))
    exact = min_euclidean_distance(enumerate_code(code))[0]
    monkeypatch.setattr(codes, "STREAM_THRESHOLD", 10)
    assert min_sq_distance(code) == exact


@settings(max_examples=20, deadline=None)
@given(st.data())
def test_rank1_sum_of_squares_codewords_have_norm_divisible_by_q(data):
    # norm of every centered word of <x> over Z_q, q = |x|^2, is a multiple of q
    x = tuple(data.draw(st.integers(1, 9)) for _ in range(data.draw(st.integers(2, 4))))
    q = sum(v * v for v in x)
    cb = enumerate_code(LinearCode(q, len(x), (x,)))
    assert np.all(squared_norms(cb.words, q) % q == 0)


def test_rank_examples():
    assert rank_over_prime_field(LinearCode(3, 3, ((1, 2, 2),))) == 1
    assert rank_over_prime_field(LinearCode(5, 3, ((1, 0, 0), (0, 1, 0)))) == 2
    assert rank_over_prime_field(LinearCode(3, 2, ((1, 1), (2, 2)))) == 1
    with pytest.raises(ValueError):
        rank_over_prime_field(LinearCode(6, 2, ((1, 1),)))


@settings(max_examples=40, deadline=None)
@given(st.sampled_from([2, 3, 5, 7]), st.integers(1, 3), st.data())
def test_rank_matches_cardinality(p, n, data):
    k = data.draw(st.integers(0, 3))
    gens = tuple(tuple(data.draw(st.integers(0, p - 1)) for _ in range(n)) for _ in range(k))
    code = LinearCode(p, n, gens)
    assert p ** rank_over_prime_field(code) == enumerate_code(code).cardinality
    rref = row_reduce_mod_p(gens, p)
    assert enumerate_code(LinearCode(p, n, tuple(rref))).words.tolist() == enumerate_code(code).words.tolist()


def test_cartesian_power_example():
    lifted = cartesian_power(LinearCode(3, 3, ((1, 2, 2),)), 2)
    assert lifted.generators == ((1, 2, 2, 0, 0, 0), (0, 0, 0, 1, 2, 2))
    assert rank_over_prime_field(lifted) == 2


def test_cartesian_power_identity_and_size():
    code = LinearCode(3, 3, ((1, 2, 2),))
    assert cartesian_power(code, 1) is code
    assert enumerate_code(cartesian_power(code, 3)).cardinality == 27
    with pytest.raises(ValueError):
        cartesian_power(code, 0)


def test_reduce_mod_examples():
    assert reduce_mod((13, 14, 14), 3) == (1, 2, 2)
    assert reduce_mod((0, 0, 0), 5) == (0, 0, 0)
    five = reduce_mod(tuple(5 * v for v in (13, 14, 14)), 17)
    assert five == (14, 2, 2)
    assert centered(five, 17) == (-3, 2, 2)


def test_linear_code_validation():
    with pytest.raises(ValueError):
        LinearCode(1, 2)
    with pytest.raises(ValueError):
        LinearCode(5, 2, ((1, 2, 3),))
    assert LinearCode(5, 2, ((7, -1),)).generators == ((2, 4),)
