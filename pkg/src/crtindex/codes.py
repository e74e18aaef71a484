"""Linear codes over Z_q.

Codewords are stored as integer rows with entries in ``[0, q)``. Geometry
always goes through the centered representative (entries in ``(-q/2, q/2]``),
which is the minimal-norm lift of each coordinate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from .errors import ResourceLimitError
from .ring_arith import is_prime

ENUMERATION_CAP = 10**7
# above this many words, distance searches stream chunks instead of materializing
STREAM_THRESHOLD = 10**5
_CHUNK = 1 << 16


@dataclass(frozen=True)
class LinearCode:
    """Code over ``Z_q`` of length ``n`` spanned by ``generators`` (row vectors).

    An empty generator tuple denotes the zero code. Zero or repeated rows are
    allowed and change nothing.
    """

    q: int
    n: int
    generators: tuple[tuple[int, ...], ...] = ()

    def __post_init__(self) -> None:
        if self.q < 2:
            raise ValueError("modulus must be at least 2")
        if self.n < 1:
            raise ValueError("length must be positive")
        gens = tuple(tuple(int(v) % self.q for v in g) for g in self.generators)
        for g in gens:
            if len(g) != self.n:
                raise ValueError(f"generator {g} has length {len(g)}, expected {self.n}")
        object.__setattr__(self, "generators", gens)

    @classmethod
    def from_rows(cls, q: int, rows: Sequence[Sequence[int]], n: int | None = None) -> "LinearCode":
        rows = [tuple(int(v) for v in r) for r in rows]
        if n is None:
            if not rows:
                raise ValueError("length required for an empty generator list")
            n = len(rows[0])
        return cls(q, n, tuple(rows))

    def matrix(self) -> np.ndarray:
        if not self.generators:
            return np.zeros((0, self.n), dtype=np.int64)
        return np.array(self.generators, dtype=np.int64)

    def generator_orders(self) -> list[int]:
        return [self.q // math.gcd(self.q, *g) for g in self.generators if any(g)]

    def predicted_size(self) -> int:
        """Product of the additive orders of the generators; an upper bound on ``|C|``."""
        return math.prod(self.generator_orders())

    def contains(self, word: Sequence[int]) -> bool:
        """Membership test; exact for every modulus (uses the lattice volume)."""
        from .lattices import basis_from_generators

        w = tuple(int(v) % self.q for v in word)
        if len(w) != self.n:
            return False
        if not any(w):
            return True
        unit = [tuple(self.q if i == j else 0 for i in range(self.n)) for j in range(self.n)]
        base = basis_from_generators(list(self.generators) + unit)
        grown = basis_from_generators(list(self.generators) + [w] + unit)
        return base.volume == grown.volume


@dataclass(frozen=True)
class Codebook:
    """Enumerated codewords of a :class:`LinearCode`, lexicographically sorted."""

    code: LinearCode
    words: np.ndarray

    @property
    def cardinality(self) -> int:
        return int(self.words.shape[0])

    def __len__(self) -> int:
        return self.cardinality

    def __iter__(self) -> Iterator[tuple[int, ...]]:
        for row in self.words:
            yield tuple(int(v) for v in row)

    def __contains__(self, word: Sequence[int]) -> bool:
        w = np.asarray(word, dtype=np.int64) % self.code.q
        return bool(np.any(np.all(self.words == w, axis=1)))


def _span(q: int, n: int, gens: Sequence[Sequence[int]], cap: int) -> np.ndarray:
    words = np.zeros((1, n), dtype=np.int64)
    for g in gens:
        g = np.asarray(g, dtype=np.int64)
        if not g.any():
            continue
        order = q // math.gcd(q, *[int(v) for v in g])
        mult = np.arange(order, dtype=np.int64)[:, None] * g[None, :] % q
        grown = (words[None, :, :] + mult[:, None, :]) % q
        words = np.unique(grown.reshape(-1, n), axis=0)
        if words.shape[0] > cap:
            raise ResourceLimitError(f"code has more than {cap} words")
    return words


def enumerate_code(code: LinearCode, cap: int | None = None) -> Codebook:
    """Materialize every codeword, deduplicated and sorted."""
    cap = ENUMERATION_CAP if cap is None else cap
    size = code.predicted_size()
    if size > cap:
        raise ResourceLimitError(f"code may have up to {size} words, cap is {cap}")
    words = _span(code.q, code.n, code.generators, cap)
    return Codebook(code, words)


def iter_combinations(code: LinearCode, chunk: int = _CHUNK) -> Iterator[np.ndarray]:
    """Stream ``sum u_i g_i mod q`` over all coefficient tuples, in chunks.

    Words may repeat when the generators are dependent; callers that only need
    extremal statistics do not care.
    """
    gens = [np.asarray(g, dtype=np.int64) for g in code.generators if any(g)]
    if not gens:
        yield np.zeros((1, code.n), dtype=np.int64)
        return
    orders = [code.q // math.gcd(code.q, *[int(v) for v in g]) for g in gens]
    G = np.stack(gens)
    total = math.prod(orders)
    radix = np.array(orders, dtype=np.int64)
    for start in range(0, total, chunk):
        idx = np.arange(start, min(start + chunk, total), dtype=np.int64)
        coeffs = np.empty((idx.size, len(orders)), dtype=np.int64)
        rest = idx
        for i in range(len(orders) - 1, -1, -1):
            coeffs[:, i] = rest % radix[i]
            rest = rest // radix[i]
        yield coeffs @ G % code.q


def centered(v, q: int):
    """Map entries of ``v`` (mod ``q``) to ``(-q/2, q/2]``; accepts tuples or arrays."""
    if isinstance(v, np.ndarray):
        r = v % q
        return np.where(2 * r > q, r - q, r)
    out = []
    for a in v:
        r = int(a) % q
        out.append(r - q if 2 * r > q else r)
    return tuple(out)


def squared_norms(words: np.ndarray, q: int) -> np.ndarray:
    c = centered(words, q)
    return np.einsum("ij,ij->i", c, c)


def min_sq_distance(code: LinearCode, cap: int | None = None) -> int | float:
    """Exact minimum squared norm over nonzero centered codewords; ``inf`` for the zero code."""
    cap = ENUMERATION_CAP if cap is None else cap
    size = code.predicted_size()
    if size > cap:
        raise ResourceLimitError(f"distance search over {size} combinations exceeds cap {cap}")
    best: int | float = math.inf
    if size <= STREAM_THRESHOLD:
        chunks: Iterator[np.ndarray] = iter([enumerate_code(code, cap).words])
    else:
        chunks = iter_combinations(code)
    for words in chunks:
        norms = squared_norms(words, code.q)
        norms = norms[norms > 0]
        if norms.size:
            best = min(best, int(norms.min()))
    return best


def min_euclidean_distance(cb: Codebook) -> tuple[int | float, float]:
    """``(d^2, d)`` with ``d^2`` exact; the zero code gives ``(inf, inf)``."""
    norms = squared_norms(cb.words, cb.code.q)
    norms = norms[norms > 0]
    if norms.size == 0:
        return math.inf, math.inf
    d2 = int(norms.min())
    return d2, math.sqrt(d2)


def row_reduce_mod_p(rows: Sequence[Sequence[int]], p: int) -> list[tuple[int, ...]]:
    """Reduced row echelon form over GF(p), zero rows dropped."""
    M = [[int(v) % p for v in r] for r in rows]
    if not M:
        return []
    n = len(M[0])
    pivot_row = 0
    for col in range(n):
        piv = next((i for i in range(pivot_row, len(M)) if M[i][col]), None)
        if piv is None:
            continue
        M[pivot_row], M[piv] = M[piv], M[pivot_row]
        inv = pow(M[pivot_row][col], -1, p)
        M[pivot_row] = [v * inv % p for v in M[pivot_row]]
        for i in range(len(M)):
            if i != pivot_row and M[i][col]:
                f = M[i][col]
                M[i] = [(a - f * b) % p for a, b in zip(M[i], M[pivot_row])]
        pivot_row += 1
        if pivot_row == len(M):
            break
    return [tuple(r) for r in M[:pivot_row]]


def rank_over_prime_field(code: LinearCode) -> int:
    if not is_prime(code.q):
        raise ValueError(f"rank over Z_{code.q} is only computed for prime moduli")
    return len(row_reduce_mod_p(code.generators, code.q))


def cartesian_power(code: LinearCode, m: int) -> LinearCode:
    """Block-diagonal lift: each generator placed in each of ``m`` length-``n`` blocks."""
    if m < 1:
        raise ValueError("m must be at least 1")
    if m == 1:
        return code
    n = code.n
    gens = []
    for block in range(m):
        for g in code.generators:
            row = [0] * (m * n)
            row[block * n:(block + 1) * n] = g
            gens.append(tuple(row))
    return LinearCode(code.q, m * n, tuple(gens))


def reduce_mod(v: Sequence[int], p: int) -> tuple[int, ...]:
    return tuple(int(a) % p for a in v)
