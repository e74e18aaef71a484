import itertools
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from crtindex import ring_arith
from crtindex.errors import ResourceLimitError
from crtindex.ring_arith import (
    PrimeSet,
    centered_residue,
    crt_basis,
    extended_gcd,
    is_prime,
    mod_inverse,
    nonempty_subsets,
    scalar_collinear,
    subset_product,
    sum_of_squares,
)

SMALL_PRIMES = [p for p in range(2, 32) if all(p % d for d in range(2, p))]


def brute_sos(P, N):
    r = math.isqrt(P)
    return sorted({tuple(sorted(t)) for t in itertools.product(range(r + 1), repeat=N) if sum(v * v for v in t) == P})


@pytest.mark.parametrize("a,b,g", [(3, 5, 1), (7, 0, 7), (12, 18, 6), (0, 9, 9), (-4, 6, 2)])
def test_extended_gcd_identity(a, b, g):
    got, u, v = extended_gcd(a, b)
    assert got == g
    assert u * a + v * b == g


def test_extended_gcd_with_zero_is_trivial():
    assert extended_gcd(7, 0) == (7, 1, 0)


def test_extended_gcd_rejects_double_zero():
    with pytest.raises(ValueError):
        extended_gcd(0, 0)


@given(st.integers(-10**6, 10**6), st.integers(-10**6, 10**6))
def test_extended_gcd_property(a, b):
    if a == 0 and b == 0:
        return
    g, u, v = extended_gcd(a, b)
    assert g == math.gcd(a, b) and u * a + v * b == g


def test_mod_inverse():
    assert mod_inverse(3, 7) == 5
    with pytest.raises(ValueError):
        mod_inverse(6, 9)


def test_is_prime_matches_sieve():
    assert [p for p in range(100) if is_prime(p)] == [p for p in range(2, 100) if all(p % d for d in range(2, p))]


def test_is_prime_cap():
    with pytest.raises(ResourceLimitError):
        is_prime(2**33 + 1)


def test_prime_set_validation():
    assert PrimeSet((3, 11, 17)).q == 561
    assert PrimeSet((3, 11, 17)).cofactors == (187, 51, 33)
    for bad in [(), (3, 3), (4, 5)]:
        with pytest.raises(ValueError):
            PrimeSet(bad)


@pytest.mark.parametrize(
    "primes,expected",
    [((3, 5), (10, 6)), ((7, 19), (57, 77)), ((3, 11, 17), (187, 408, 528)), ((5,), (1,))],
)
def test_idempotents(primes, expected):
    assert crt_basis(primes).idempotents == expected


def test_idempotents_561_sum_to_one():
    assert sum(crt_basis((3, 11, 17)).idempotents) % 561 == 1


@given(st.lists(st.sampled_from(SMALL_PRIMES), min_size=1, max_size=4, unique=True))
def test_idempotent_residues_against_search(primes):
    crt = crt_basis(primes)
    q = math.prod(primes)
    for j, e in enumerate(crt.idempotents):
        # independent oracle: the multiple of q/p_j that is 1 mod p_j
        m = q // primes[j]
        oracle = next(m * t for t in range(primes[j]) if m * t % primes[j] == 1)
        assert all(oracle % p == (1 if i == j else 0) for i, p in enumerate(primes))
        assert e == oracle
        assert (e * e - e) % q == 0


@pytest.mark.parametrize(
    "P,N,members",
    [
        (133, 4, [(1, 2, 8, 8), (5, 6, 6, 6)]),
        (561, 3, [(13, 14, 14)]),
        (1, 1, [(1,)]),
    ],
)
def test_sum_of_squares_known(P, N, members):
    got = sum_of_squares(P, N)
    for m in members:
        assert m in got


def test_sum_of_squares_65_two():
    assert sum_of_squares(65, 2) == [(1, 8), (4, 7)]


def test_sum_of_squares_empty():
    assert sum_of_squares(3, 2) == []
    assert sum_of_squares(15, 2) == []


@settings(max_examples=60)
@given(st.integers(1, 400), st.integers(1, 4))
def test_sum_of_squares_against_brute_force(P, N):
    assert sum_of_squares(P, N) == brute_sos(P, N)


def test_sum_of_squares_cap(monkeypatch):
    with pytest.raises(ResourceLimitError):
        sum_of_squares(1000, 3, cap=100)
    monkeypatch.setattr(ring_arith, "SUM_OF_SQUARES_CAP", 50)
    with pytest.raises(ResourceLimitError):
        sum_of_squares(133, 4)


def test_centered_residue():
    assert [centered_residue(a, 7) for a in range(7)] == [0, 1, 2, 3, -3, -2, -1]
    assert centered_residue(2, 4) == 2


def _witnesses(x, P):
    return {b for _, b in scalar_collinear(x, P)}


def test_collinear_133():
    assert (-2, -1, -1, -1) in _witnesses((5, 6, 6, 6), 7)
    assert (-4, -1, -1, -1) in _witnesses((5, 6, 6, 6), 19)
    assert scalar_collinear((1, 2, 8, 8), 19) == []


def test_collinear_561_products():
    assert (-1, 4, 4) in _witnesses((13, 14, 14), 33)
    assert (5, -9, -9) in _witnesses((13, 14, 14), 187)


def test_collinear_solutions_satisfy_congruence():
    x = (13, 14, 14)
    for P in (3, 11, 17, 33, 51, 187, 561):
        for lam, b in scalar_collinear(x, P):
            assert math.gcd(lam, P) == 1
            assert sum(v * v for v in b) == P
            assert all((lam * bi - xi) % P == 0 for bi, xi in zip(b, x))


@settings(max_examples=30, deadline=None)
@given(st.sampled_from([5, 7, 11, 13, 17, 19, 23]), st.lists(st.integers(0, 30), min_size=2, max_size=4))
def test_collinear_matches_exhaustive_vector_scan(P, x):
    # oracle: every integer vector of squared norm P, tested for collinearity with x
    n = len(x)
    r = math.isqrt(P)
    oracle = set()
    for b in itertools.product(range(-r, r + 1), repeat=n):
        if sum(v * v for v in b) != P:
            continue
        for lam in range(1, P):
            if all((lam * bi - xi) % P == 0 for bi, xi in zip(b, x)):
                oracle.add(tuple(centered_residue(v, P) for v in b))
    assert _witnesses(x, P) == oracle


def test_collinear_cap():
    with pytest.raises(ResourceLimitError):
        scalar_collinear((1, 2), 1000, cap=10)


def test_subsets_order():
    assert nonempty_subsets(3, proper=True) == [(1,), (2,), (3,), (1, 2), (1, 3), (2, 3)]
    assert nonempty_subsets(3)[-1] == (1, 2, 3)
    assert nonempty_subsets(1, proper=True) == []


def test_subset_product():
    assert [subset_product((3, 11, 17), S) for S in nonempty_subsets(3)] == [3, 11, 17, 33, 51, 187, 561]
