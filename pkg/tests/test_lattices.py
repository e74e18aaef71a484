import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from crtindex.codes import LinearCode, enumerate_code
from crtindex.errors import ResourceLimitError
from crtindex.lattices import (
    IntegerLattice,
    basis_from_generators,
    centre_density,
    centre_density_squared,
    code_size,
    combine_levels,
    construction_a,
    construction_pia,
    hermite_basis,
    kissing_number,
    kissing_number_generic,
    min_distance,
    min_distance_generic,
    quantize,
)
from crtindex.ring_arith import crt_basis


def brute_nearest(basis_cols, y, span=4):
    """Nearest point among small integer combinations; ties by lexicographic order."""
    B = np.array(basis_cols).T
    pts = [tuple(int(v) for v in B @ np.array(c)) for c in itertools.product(range(-span, span + 1), repeat=B.shape[1])]
    return min(pts, key=lambda p: (round(sum((a - b) ** 2 for a, b in zip(p, y)), 9), p))


def test_hnf_shape_and_volume():
    lat = basis_from_generators([(10, 10), (6, 12), (15, 0), (0, 15)])
    assert lat.volume == 15
    M = lat.matrix()
    assert np.all(np.tril(M, -1) == 0)
    for j in range(lat.n):
        assert M[j, j] > 0
        assert all(0 <= M[j, i] < M[j, j] for i in range(j + 1, lat.n))


def test_scaled_cubic_volume():
    gens = [tuple(5 * (i == j) for i in range(3)) for j in range(3)]
    assert basis_from_generators(gens).volume == 125


def test_rank_deficient_rejected():
    with pytest.raises(ValueError):
        basis_from_generators([(1, 2), (2, 4)])


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 4), st.data())
def test_hnf_determinant_and_membership(n, data):
    gens = [tuple(data.draw(st.integers(-9, 9)) for _ in range(n)) for _ in range(data.draw(st.integers(0, 3)))]
    gens += [tuple(7 * (i == j) for i in range(n)) for j in range(n)]
    lat = basis_from_generators(gens)
    # canonical: permuting the generators leaves the basis unchanged
    assert basis_from_generators(list(reversed(gens))).basis == lat.basis
    # the volume divides 7^n and every generator is in the lattice
    assert 7**n % lat.volume == 0
    for g in gens:
        assert lat.contains(g)
    # determinant against a float oracle
    assert abs(abs(np.linalg.det(lat.matrix().astype(float))) - lat.volume) < 1e-6 * lat.volume


def test_construction_a_examples():
    lat = construction_a(LinearCode(3, 3, ((1, 2, 2),)))
    assert lat.volume == 9 and min_distance(lat) == 3
    zero = construction_a(LinearCode(5, 2))
    assert zero.basis == ((5, 0), (0, 5))
    assert min_distance(zero) == 25
    c561 = construction_a(LinearCode(561, 3, ((13, 14, 14),)))
    assert min_distance(c561) == 561


def test_construction_pia_toy():
    crt = crt_basis((3, 5))
    combined, lat = construction_pia([LinearCode(3, 2, ((1, 1),)), LinearCode(5, 2, ((1, 2),))], crt)
    assert enumerate_code(combined).cardinality == 15
    assert lat.volume == 15


def test_construction_pia_561_is_rank_one_code():
    crt = crt_basis((3, 11, 17))
    levels = [LinearCode(3, 3, ((1, 2, 2),)), LinearCode(11, 3, ((8, 1, 1),)), LinearCode(17, 3, ((14, 2, 2),))]
    combined, lat = construction_pia(levels, crt)
    target = LinearCode(561, 3, ((13, 14, 14),))
    assert lat == construction_a(target)
    assert target.contains(tuple(532 * v % 561 for v in (13, 14, 14)))


def test_all_zero_levels_give_scaled_cubic():
    crt = crt_basis((3, 5))
    _, lat = construction_pia([LinearCode(3, 2), LinearCode(5, 2)], crt)
    assert lat.basis == ((15, 0), (0, 15))


def test_combine_levels_validation():
    crt = crt_basis((3, 5))
    with pytest.raises(ValueError):
        combine_levels([LinearCode(3, 2)], crt)
    with pytest.raises(ValueError):
        combine_levels([LinearCode(3, 2), LinearCode(5, 3)], crt)
    with pytest.raises(ValueError):
        combine_levels([LinearCode(5, 2), LinearCode(3, 2)], crt)


def test_code_size_matches_enumeration():
    code = LinearCode(12, 3, ((2, 4, 6), (3, 3, 0)))
    assert code_size(code) == enumerate_code(code).cardinality


def test_min_distance_plain_lattices():
    assert min_distance(IntegerLattice.identity(3)) == 1
    assert min_distance(basis_from_generators([(-4, 7), (-7, -4)])) == 65


def test_kissing_examples():
    for n in (1, 2, 3):
        assert kissing_number(IntegerLattice.identity(n)) == 2 * n
        assert kissing_number(construction_a(LinearCode(5, n))) == 2 * n
    assert kissing_number(construction_a(LinearCode(561, 3, ((13, 14, 14),)))) == 2


def test_kissing_counts_half_q_lifts():
    # over Z_4, the word (2, 0) has two minimal lifts and q^2 = 16 is larger
    lat = construction_a(LinearCode(4, 2, ((2, 0),)))
    assert min_distance(lat) == 4
    assert kissing_number(lat) == kissing_number_generic(lat) == 2


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 15), st.integers(1, 3), st.data())
def test_coset_geometry_matches_generic_search(q, n, data):
    k = data.draw(st.integers(0, 2))
    gens = tuple(tuple(data.draw(st.integers(0, q - 1)) for _ in range(n)) for _ in range(k))
    lat = construction_a(LinearCode(q, n, gens))
    assert min_distance(lat) == min_distance_generic(lat)
    assert kissing_number(lat) == kissing_number_generic(lat)


def test_centre_density_examples():
    assert centre_density(IntegerLattice.identity(2)) == pytest.approx(0.25)
    assert centre_density(construction_a(LinearCode(7, 3))) == pytest.approx(0.125)
    c561 = construction_a(LinearCode(561, 3, ((13, 14, 14),)))
    assert centre_density(c561) == pytest.approx((math.sqrt(561) / 2) ** 3 / 561**2)
    assert centre_density_squared(c561) == Fraction(561, 4) ** 3 / 561**4


def test_quantize_examples():
    Z2 = IntegerLattice.identity(2)
    assert quantize(Z2, (0.6, -0.2)) == (1, 0)
    assert quantize(Z2, (0.5, 0.0)) == (0, 0)
    assert quantize(basis_from_generators([(1, 1), (1, -1)]), (1.2, 0.3)) == (1, 1)


def test_quantize_box_cap():
    lat = basis_from_generators([(1, 0), (0, 1000)])
    with pytest.raises(ResourceLimitError):
        quantize(lat, (0.5, 499.0), cap=1)


@settings(max_examples=40, deadline=None)
@given(st.integers(3, 9), st.data())
def test_quantize_code_lattice_matches_generic_and_brute_force(q, data):
    g = tuple(data.draw(st.integers(0, q - 1)) for _ in range(2))
    code_lat = construction_a(LinearCode(q, 2, (g,)))
    generic = IntegerLattice(code_lat.basis)
    y = tuple(data.draw(st.floats(-2 * q, 2 * q, allow_nan=False)) for _ in range(2))
    a = quantize(code_lat, y)
    b = quantize(generic, y)
    oracle = brute_nearest(list(code_lat.basis), y, span=2 * q + 2)
    d = lambda p: sum((u - v) ** 2 for u, v in zip(p, y))
    assert d(a) == pytest.approx(d(oracle), abs=1e-7)
    assert d(b) == pytest.approx(d(oracle), abs=1e-7)
    assert code_lat.contains(a) and code_lat.contains(b)


def test_hermite_basis_dimension_mismatch():
    with pytest.raises(ValueError):
        hermite_basis([(1, 2, 3)], 2)
