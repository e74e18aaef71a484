"""Full-rank integer lattices.

Bases are kept in a canonical Hermite normal form so that equal lattices
compare equal: basis vectors ``v_1, ..., v_n`` where ``v_j`` is supported on
the first ``j`` coordinates, ``v_j[j] > 0`` and ``0 <= v_i[j] < v_j[j]`` for
``i > j``. Stacked as columns they form an upper-triangular matrix.

Lattices lifted from a code over ``Z_q`` remember the code; their geometry is
computed by coset enumeration, everything else by a bounded coefficient search
whose box is derived from the rows of the inverse basis.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .codes import (
    STREAM_THRESHOLD,
    LinearCode,
    enumerate_code,
    min_sq_distance,
)
from .errors import ResourceLimitError
from .ring_arith import CrtBasis, extended_gcd

BOX_CAP = 5 * 10**6


@dataclass(frozen=True)
class IntegerLattice:
    basis: tuple[tuple[int, ...], ...]
    code: LinearCode | None = field(default=None, compare=False, repr=False)

    @property
    def n(self) -> int:
        return len(self.basis)

    @property
    def volume(self) -> int:
        return math.prod(self.basis[j][j] for j in range(self.n))

    @property
    def q(self) -> int | None:
        return None if self.code is None else self.code.q

    def matrix(self) -> np.ndarray:
        """Basis matrix with the basis vectors as columns."""
        return np.array(self.basis, dtype=np.int64).T

    def rows(self) -> list[list[int]]:
        """Row-major serialization of :meth:`matrix`."""
        return [[self.basis[j][i] for j in range(self.n)] for i in range(self.n)]

    def contains(self, v: Sequence[int]) -> bool:
        rest = [int(a) for a in v]
        if len(rest) != self.n:
            return False
        for j in range(self.n - 1, -1, -1):
            d = self.basis[j][j]
            if rest[j] % d:
                return False
            c = rest[j] // d
            if c:
                rest = [a - c * b for a, b in zip(rest, self.basis[j])]
        return True

    @classmethod
    def identity(cls, n: int) -> "IntegerLattice":
        return cls(tuple(tuple(int(i == j) for i in range(n)) for j in range(n)))


def hermite_basis(gens: Sequence[Sequence[int]], n: int) -> tuple[tuple[int, ...], ...]:
    vecs = [list(map(int, g)) for g in gens if any(g)]
    for g in vecs:
        if len(g) != n:
            raise ValueError(f"generator of length {len(g)} in dimension {n}")
    basis: list[list[int] | None] = [None] * n
    for col in range(n - 1, -1, -1):
        pivot = None
        rest = []
        for v in vecs:
            if v[col] == 0:
                rest.append(v)
            elif pivot is None:
                pivot = v
            else:
                g, a, b = extended_gcd(pivot[col], v[col])
                s, t = pivot[col] // g, v[col] // g
                merged = [a * x + b * y for x, y in zip(pivot, v)]
                killed = [t * x - s * y for x, y in zip(pivot, v)]
                pivot = merged
                if any(killed):
                    rest.append(killed)
        if pivot is None:
            raise ValueError("generators do not span a full-rank lattice")
        if pivot[col] < 0:
            pivot = [-x for x in pivot]
        basis[col] = pivot
        vecs = rest
    for i in range(n):
        vi = basis[i]
        for j in range(i - 1, -1, -1):
            f = vi[j] // basis[j][j]
            if f:
                vi = [a - f * b for a, b in zip(vi, basis[j])]
        basis[i] = vi
    return tuple(tuple(v) for v in basis)


def basis_from_generators(gens: Sequence[Sequence[int]], code: LinearCode | None = None) -> IntegerLattice:
    if not gens:
        raise ValueError("empty generating set")
    n = len(gens[0])
    return IntegerLattice(hermite_basis(gens, n), code)


def construction_a(code: LinearCode) -> IntegerLattice:
    """The lattice ``sigma(C) + q Z^n``."""
    q, n = code.q, code.n
    unit = [tuple(q if i == j else 0 for i in range(n)) for j in range(n)]
    lat = basis_from_generators(list(code.generators) + unit, code)
    if code.predicted_size() <= STREAM_THRESHOLD:
        size = enumerate_code(code).cardinality
        if lat.volume * size != q**n:
            raise AssertionError(f"volume {lat.volume} != q^n/|C| = {q**n}/{size}")
    return lat


def code_size(code: LinearCode) -> int:
    """Exact ``|C|`` from the Construction A volume, no enumeration needed."""
    q, n = code.q, code.n
    unit = [tuple(q if i == j else 0 for i in range(n)) for j in range(n)]
    vol = math.prod(b[j] for j, b in enumerate(hermite_basis(list(code.generators) + unit, n)))
    return q**n // vol


def combine_levels(level_codes: Sequence[LinearCode], crt: CrtBasis) -> LinearCode:
    """Image of ``C_1 x ... x C_r`` under the CRT map, as a code over ``Z_q``."""
    primes = crt.prime_set.primes
    if len(level_codes) != len(primes):
        raise ValueError("one level code per prime required")
    lengths = {c.n for c in level_codes}
    if len(lengths) != 1:
        raise ValueError(f"level codes have different lengths {sorted(lengths)}")
    n = lengths.pop()
    q = crt.q
    gens = []
    for code, p, e in zip(level_codes, primes, crt.idempotents):
        if code.q != p:
            raise ValueError(f"level code over Z_{code.q} paired with prime {p}")
        gens.extend(tuple(e * v % q for v in g) for g in code.generators)
    return LinearCode(q, n, tuple(gens))


def construction_pia(level_codes: Sequence[LinearCode], crt: CrtBasis) -> tuple[LinearCode, IntegerLattice]:
    combined = combine_levels(level_codes, crt)
    return combined, construction_a(combined)


def _inverse_row_norms(lat: IntegerLattice) -> np.ndarray:
    inv = np.linalg.inv(lat.matrix().astype(float))
    return np.sqrt((inv**2).sum(axis=1))


def _box_points(lat: IntegerLattice, center: np.ndarray, radius: float, cap: int | None):
    """Yield chunks of lattice points ``B x`` with ``x`` in a box covering the ball."""
    cap = BOX_CAP if cap is None else cap
    B = lat.matrix()
    coef_center = np.linalg.solve(B.astype(float), center)
    spread = _inverse_row_norms(lat) * radius + 1e-7
    lo = np.ceil(coef_center - spread).astype(np.int64)
    hi = np.floor(coef_center + spread).astype(np.int64)
    ranges = [np.arange(a, b + 1, dtype=np.int64) for a, b in zip(lo, hi)]
    total = math.prod(len(r) for r in ranges)
    if total > cap:
        raise ResourceLimitError(f"coefficient box of {total} points exceeds cap {cap}")
    if total == 0:
        return
    grids = np.meshgrid(*ranges, indexing="ij")
    coeffs = np.stack([g.ravel() for g in grids], axis=1)
    for start in range(0, coeffs.shape[0], 1 << 18):
        yield coeffs[start:start + (1 << 18)] @ B.T


def _generic_shell(lat: IntegerLattice, cap: int | None) -> tuple[int, int]:
    radius2 = min(sum(v * v for v in b) for b in lat.basis)
    best, count = radius2, 0
    for pts in _box_points(lat, np.zeros(lat.n), math.sqrt(radius2), cap):
        norms = np.einsum("ij,ij->i", pts, pts)
        norms = norms[norms > 0]
        if not norms.size:
            continue
        m = int(norms.min())
        if m < best:
            best, count = m, 0
        if m == best:
            count += int((norms == best).sum())
    return best, count


def min_distance(lat: IntegerLattice, cap: int | None = None) -> int:
    """Exact squared minimum norm."""
    if lat.code is not None:
        q = lat.code.q
        return int(min(min_sq_distance(lat.code), q * q))
    return _generic_shell(lat, cap)[0]


def min_distance_generic(lat: IntegerLattice, cap: int | None = None) -> int:
    """Squared minimum norm by coefficient search, ignoring any code provenance."""
    return _generic_shell(lat, cap)[0]


def kissing_number(lat: IntegerLattice, cap: int | None = None) -> int:
    if lat.code is None:
        return _generic_shell(lat, cap)[1]
    code, q = lat.code, lat.code.q
    d2 = min_distance(lat)
    words = enumerate_code(code).words
    c = np.where(2 * (words % q) > q, words % q - q, words % q)
    norms = np.einsum("ij,ij->i", c, c)
    hit = (norms == d2) & (norms > 0)
    # a coordinate equal to q/2 has two minimal lifts, +-q/2
    halves = (2 * c[hit] == q).sum(axis=1)
    count = int((2 ** halves).sum())
    if q * q == d2:
        count += 2 * lat.n
    return count


def kissing_number_generic(lat: IntegerLattice, cap: int | None = None) -> int:
    return _generic_shell(lat, cap)[1]


def centre_density(lat: IntegerLattice, d2: int | None = None) -> float:
    if d2 is None:
        d2 = min_distance(lat)
    return (math.sqrt(d2) / 2) ** lat.n / lat.volume


def centre_density_squared(lat: IntegerLattice, d2: int | None = None) -> Fraction:
    """Exact ``delta^2`` as a rational."""
    if d2 is None:
        d2 = min_distance(lat)
    return Fraction(d2, 4) ** lat.n / lat.volume**2


def _pick_lexicographic(points: np.ndarray) -> tuple[int, ...]:
    order = np.lexsort(points.T[::-1])
    return tuple(int(v) for v in points[order[0]])


def quantize(lat: IntegerLattice, y: Sequence[float], cap: int | None = None, tol: float = 1e-9) -> tuple[int, ...]:
    """Nearest lattice point to ``y``; ties go to the lexicographically smallest point."""
    y = np.asarray(y, dtype=float)
    if y.shape != (lat.n,):
        raise ValueError(f"expected a point of dimension {lat.n}")
    if lat.code is not None:
        q = lat.code.q
        shift = np.floor(y / q)
        y0 = y - q * shift
        words = enumerate_code(lat.code).words
        diff = y0[None, :] - words
        # residual in (-q/2, q/2]; the +q/2 side yields the smaller lift
        resid = q / 2 - np.mod(q / 2 - diff, q)
        d2 = (resid**2).sum(axis=1)
        best = d2.min()
        pts = y0[None, :] - resid[d2 <= best + tol]
        pts = np.rint(pts + q * shift).astype(np.int64)
        return _pick_lexicographic(pts)

    B = lat.matrix().astype(float)
    babai = np.rint(np.linalg.solve(B, y))
    radius = float(np.linalg.norm(y - B @ babai))
    best, found = math.inf, []
    for pts in _box_points(lat, y, radius, cap):
        d2 = ((pts - y) ** 2).sum(axis=1)
        m = d2.min()
        if m < best - tol:
            best, found = m, [pts[d2 <= m + tol]]
        elif m <= best + tol:
            found.append(pts[d2 <= best + tol])
    return _pick_lexicographic(np.concatenate(found))
