"""CRT lattice index codes.

Messages are level codewords ``w_j`` in ``C_j`` over ``Z_{p_j}``; the encoder
sends ``sum_j e_j w_j mod q`` where ``e_j`` are the CRT idempotents. A receiver
that already knows the levels in a side-information set ``S`` decodes over a
translate of ``Lambda_{S^c}``, the Construction A lattice of the combined code
with the levels in ``S`` zeroed.

Side-information sets are tuples of 1-based level numbers, e.g. ``(1, 3)``.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from .codes import LinearCode, enumerate_code, row_reduce_mod_p
from .errors import InconsistentCodeError, NotApplicableError
from .lattices import (
    IntegerLattice,
    code_size,
    combine_levels,
    construction_a,
    kissing_number,
    min_distance,
)
from .ring_arith import CrtBasis, PrimeSet, crt_basis, nonempty_subsets

GAIN_UNIT_DB = 20 * math.log10(2)
UNIFORM_TOL_DB = 1e-9


class CrtIndexCode:
    """Construction pi_A index code built from one linear code per prime."""

    def __init__(self, primes: Sequence[int] | PrimeSet, levels: Sequence[LinearCode]):
        self.prime_set = primes if isinstance(primes, PrimeSet) else PrimeSet(tuple(primes))
        self.crt: CrtBasis = crt_basis(self.prime_set)
        self.levels = tuple(levels)
        self.combined = combine_levels(self.levels, self.crt)
        self.n = self.combined.n
        self._level_bases = [row_reduce_mod_p(c.generators, c.q) for c in self.levels]
        self.ranks = tuple(len(b) for b in self._level_bases)
        size = code_size(self.combined)
        expected = math.prod(p**k for p, k in zip(self.primes, self.ranks))
        if size != expected:
            raise InconsistentCodeError(f"|C| = {size} but prod p_j^k_j = {expected}")
        self.lattice = construction_a(self.combined)
        self._sub: dict[tuple[int, ...], IntegerLattice] = {}
        self._d0_sq: int | None = None

    @classmethod
    def from_generators(cls, primes: Sequence[int], generators: Sequence[Sequence[Sequence[int]]]) -> "CrtIndexCode":
        """Build from per-level generator rows (integers, reduced mod each prime)."""
        if len(primes) != len(generators):
            raise ValueError("one generator list per prime required")
        n = next((len(rows[0]) for rows in generators if rows), None)
        if n is None:
            raise ValueError("cannot infer the code length from empty generator lists")
        levels = [LinearCode(p, n, tuple(tuple(r) for r in rows)) for p, rows in zip(primes, generators)]
        return cls(primes, levels)

    @property
    def primes(self) -> tuple[int, ...]:
        return self.prime_set.primes

    @property
    def q(self) -> int:
        return self.prime_set.q

    @property
    def r(self) -> int:
        return len(self.primes)

    @property
    def idempotents(self) -> tuple[int, ...]:
        return self.crt.idempotents

    @property
    def cardinality(self) -> int:
        return math.prod(p**k for p, k in zip(self.primes, self.ranks))

    @property
    def rank(self) -> int:
        return max(self.ranks)

    @property
    def d0_sq(self) -> int:
        if self._d0_sq is None:
            self._d0_sq = min_distance(self.lattice)
        return self._d0_sq

    def level_basis(self, j: int) -> list[tuple[int, ...]]:
        """Reduced echelon basis of level ``j`` (1-based)."""
        return list(self._level_bases[j - 1])

    def message_from_info(self, j: int, u: Sequence[int]) -> tuple[int, ...]:
        """Level-``j`` codeword ``u . G_j`` for an information vector of length ``k_j``."""
        basis, p = self._level_bases[j - 1], self.primes[j - 1]
        if len(u) != len(basis):
            raise ValueError(f"level {j} expects {len(basis)} information symbols")
        word = [0] * self.n
        for coef, row in zip(u, basis):
            word = [(a + coef * b) % p for a, b in zip(word, row)]
        return tuple(word)

    def is_level_codeword(self, j: int, w: Sequence[int]) -> bool:
        p = self.primes[j - 1]
        if len(w) != self.n:
            return False
        basis = self._level_bases[j - 1]
        return len(row_reduce_mod_p(basis + [tuple(w)], p)) == len(basis)

    def _check_subset(self, S: Iterable[int], allow_empty: bool = False) -> tuple[int, ...]:
        S = tuple(sorted(set(int(j) for j in S)))
        if any(not 1 <= j <= self.r for j in S):
            raise ValueError(f"levels must lie in 1..{self.r}: {S}")
        if not S and not allow_empty:
            raise ValueError("side-information set must be nonempty")
        if len(S) == self.r:
            raise ValueError("side-information set must leave at least one level unknown")
        return S

    def encode(self, w: Sequence[Sequence[int]]) -> tuple[int, ...]:
        if len(w) != self.r:
            raise ValueError(f"expected {self.r} level messages")
        q = self.q
        out = [0] * self.n
        for j, (wj, e, p) in enumerate(zip(w, self.idempotents, self.primes), start=1):
            wj = tuple(int(v) % p for v in wj)
            if not self.is_level_codeword(j, wj):
                raise ValueError(f"{wj} is not a codeword of level {j}")
            out = [(a + e * b) % q for a, b in zip(out, wj)]
        return tuple(out)

    def decode_exact(self, x: Sequence[int]) -> tuple[tuple[int, ...], ...]:
        """Invert the CRT map: ``w_j = x mod p_j``."""
        msgs = []
        for j, p in enumerate(self.primes, start=1):
            wj = tuple(int(v) % p for v in x)
            if not self.is_level_codeword(j, wj):
                raise InconsistentCodeError(f"residue {wj} mod {p} is not in level {j}")
            msgs.append(wj)
        return tuple(msgs)

    def encode_batch(self, w: Sequence[np.ndarray]) -> np.ndarray:
        """Unchecked vectorized encoder; ``w[j]`` has shape ``(T, n)``."""
        q = self.q
        out = np.zeros_like(np.asarray(w[0], dtype=np.int64))
        for wj, e in zip(w, self.idempotents):
            out = (out + e * np.asarray(wj, dtype=np.int64)) % q
        return out

    def known_zeroed_code(self, S: Iterable[int]) -> LinearCode:
        """Combined code with the levels in ``S`` set to zero."""
        S = self._check_subset(S, allow_empty=True)
        kept = [c if j not in S else LinearCode(c.q, c.n) for j, c in enumerate(self.levels, start=1)]
        return combine_levels(kept, self.crt)

    def sublattice_known(self, S: Iterable[int]) -> IntegerLattice:
        """``Lambda_{S^c}``: what remains to be resolved once the levels in ``S`` are known."""
        S = self._check_subset(S)
        if S not in self._sub:
            self._sub[S] = construction_a(self.known_zeroed_code(S))
        return self._sub[S]

    def translate(self, S: Iterable[int], v: Mapping[int, Sequence[int]]) -> tuple[int, ...]:
        S = self._check_subset(S)
        if set(v) != set(S):
            raise ValueError(f"side information must cover exactly the levels {S}")
        q = self.q
        t = [0] * self.n
        for j in S:
            p, e = self.primes[j - 1], self.idempotents[j - 1]
            vj = tuple(int(a) % p for a in v[j])
            if not self.is_level_codeword(j, vj):
                raise ValueError(f"{vj} is not a codeword of level {j}")
            t = [(a + e * b) % q for a, b in zip(t, vj)]
        return tuple(t)

    def subcode(self, S: Iterable[int], v: Mapping[int, Sequence[int]]) -> "Subcode":
        S = self._check_subset(S)
        t = self.translate(S, v)
        lat = self.sublattice_known(S)
        words = enumerate_code(self.known_zeroed_code(S)).words
        pts = (words + np.asarray(t, dtype=np.int64)) % self.q
        order = np.lexsort(pts.T[::-1])
        return Subcode(S, t, lat, pts[order])

    def d_sq(self, S: Iterable[int]) -> int:
        return min_distance(self.sublattice_known(S))

    def side_info_rate(self, S: Iterable[int]) -> float:
        S = self._check_subset(S)
        return sum(self.ranks[j - 1] * math.log2(self.primes[j - 1]) for j in S) / self.n

    def level_rates(self) -> tuple[float, ...]:
        return tuple(k * math.log2(p) / self.n for p, k in zip(self.primes, self.ranks))


@dataclass(frozen=True)
class Subcode:
    """Translate ``(t + Lambda_{S^c}) mod q`` seen by a receiver knowing ``S``."""

    subset: tuple[int, ...]
    translate: tuple[int, ...]
    lattice: IntegerLattice
    points: np.ndarray = field(repr=False)

    @property
    def cardinality(self) -> int:
        return int(self.points.shape[0])


def surd(d2: int) -> str:
    """Render ``sqrt(d2)`` as ``a*sqrt(b)`` with ``b`` squarefree."""
    a, b = 1, d2
    f = 2
    while f * f <= b:
        while b % (f * f) == 0:
            b //= f * f
            a *= f
        f += 1
    if b == 1:
        return str(a)
    return f"sqrt({b})" if a == 1 else f"{a}*sqrt({b})"


def gain_db(d_sq: int, d0_sq: int, rate: float) -> float:
    return 10 * math.log10(d_sq / d0_sq) / rate


@dataclass(frozen=True)
class GainRow:
    subset: tuple[int, ...]
    d_sq: int
    rate: float
    rate_expr: str
    gain: float

    @property
    def distance(self) -> float:
        return math.sqrt(self.d_sq)

    @property
    def distance_expr(self) -> str:
        return surd(self.d_sq)

    def as_dict(self) -> dict:
        return {
            "subset": list(self.subset),
            "d_sq": self.d_sq,
            "distance": self.distance_expr,
            "distance_float": self.distance,
            "rate": self.rate,
            "rate_expr": self.rate_expr,
            "gain_db": self.gain,
        }


@dataclass(frozen=True)
class GainReport:
    primes: tuple[int, ...]
    n: int
    ranks: tuple[int, ...]
    d0_sq: int
    rows: tuple[GainRow, ...]
    level_rates: tuple[float, ...]
    bound: float | None

    @property
    def total_rate(self) -> float:
        return sum(self.level_rates)

    @property
    def overall_gain(self) -> float | None:
        return min((r.gain for r in self.rows), default=None)

    @property
    def uniform(self) -> bool:
        if not self.rows:
            return False
        gains = [r.gain for r in self.rows]
        return max(gains) - min(gains) <= UNIFORM_TOL_DB

    def as_dict(self) -> dict:
        return {
            "primes": list(self.primes),
            "n": self.n,
            "ranks": list(self.ranks),
            "d0_sq": self.d0_sq,
            "d0": surd(self.d0_sq),
            "level_rates": list(self.level_rates),
            "total_rate": self.total_rate,
            "rows": [r.as_dict() for r in self.rows],
            "overall_gain_db": self.overall_gain,
            "uniform": self.uniform,
            "bound_db": self.bound,
        }

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["index_set", "d_sq", "min_distance", "min_distance_float", "message_rate", "rate_expr", "gain_db"])
        for r in self.rows:
            label = "{" + ",".join(map(str, r.subset)) + "}"
            w.writerow([label, r.d_sq, r.distance_expr, f"{r.distance:.10g}", f"{r.rate:.12g}", r.rate_expr, f"{r.gain:.12g}"])
        return buf.getvalue()


def gain_upper_bound(idx: CrtIndexCode) -> float:
    """``(n/k) 20 log10 2`` for codes whose levels all have rank ``k``."""
    if len(set(idx.ranks)) != 1:
        raise NotApplicableError(f"bound needs equal level ranks, got {idx.ranks}")
    k = idx.ranks[0]
    if k == 0:
        raise NotApplicableError("all levels are zero codes")
    return idx.n / k * GAIN_UNIT_DB


def gain_report(idx: CrtIndexCode) -> GainReport:
    rows = []
    d0 = idx.d0_sq
    for S in nonempty_subsets(idx.r, proper=True):
        rate = idx.side_info_rate(S)
        if rate == 0:
            continue
        d = idx.d_sq(S)
        known = math.prod(idx.primes[j - 1] ** idx.ranks[j - 1] for j in S)
        rows.append(GainRow(S, d, rate, f"1/{idx.n}*log2({known})", gain_db(d, d0, rate)))
    try:
        bound = gain_upper_bound(idx)
    except NotApplicableError:
        bound = None
    return GainReport(idx.primes, idx.n, idx.ranks, d0, tuple(rows), idx.level_rates(), bound)


@dataclass(frozen=True)
class Prop1Row:
    subset: tuple[int, ...]
    volume_ratio: int
    expected_ratio: int
    d0_sq: int
    d_sq: int
    upper_sq: int

    @property
    def passed(self) -> bool:
        return (
            self.volume_ratio == self.expected_ratio
            and self.d0_sq <= self.d_sq <= self.upper_sq
        )


@dataclass(frozen=True)
class Prop1Result:
    rows: tuple[Prop1Row, ...]

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.rows)


def verify_prop1(idx: CrtIndexCode) -> Prop1Result:
    """Volume identity and distance sandwich for every nonempty proper ``S``."""
    rows = []
    vol = idx.lattice.volume
    for S in nonempty_subsets(idx.r, proper=True):
        sub = idx.sublattice_known(S)
        ratio, rem = divmod(sub.volume, vol)
        expected = math.prod(idx.primes[j - 1] ** idx.ranks[j - 1] for j in S)
        prod_p = math.prod(idx.primes[j - 1] for j in S)
        rows.append(Prop1Row(S, ratio if rem == 0 else -1, expected, idx.d0_sq, idx.d_sq(S), prod_p**2 * idx.d0_sq))
    return Prop1Result(tuple(rows))


@dataclass(frozen=True)
class BijectivityResult:
    checked: int
    mismatches: int
    exhaustive: bool
    image_size: int | None = None

    @property
    def passed(self) -> bool:
        return self.mismatches == 0


def _level_words(idx: CrtIndexCode) -> list[np.ndarray]:
    return [enumerate_code(c).words for c in idx.levels]


def check_bijectivity(
    idx: CrtIndexCode, exhaustive_limit: int = 10**5, samples: int = 10**4, seed: int = 0
) -> BijectivityResult:
    """Round-trip the CRT map over all message tuples, or a random sample of them.

    Also confirms that every image lies in the combined code.
    """
    words = _level_words(idx)
    total = idx.cardinality
    combined = enumerate_code(idx.combined).words if total <= exhaustive_limit else None
    if total <= exhaustive_limit:
        grids = np.meshgrid(*[np.arange(len(w)) for w in words], indexing="ij")
        picks = [g.ravel() for g in grids]
        exhaustive = True
    else:
        rng = np.random.default_rng(seed)
        picks = [rng.integers(0, len(w), size=samples) for w in words]
        exhaustive = False
    msgs = [w[i] for w, i in zip(words, picks)]
    x = idx.encode_batch(msgs)
    mismatches = 0
    for w, p in zip(msgs, idx.primes):
        mismatches += int(np.any(x % p != w, axis=1).sum())
    image = None
    if exhaustive:
        uniq = np.unique(x, axis=0)
        image = int(uniq.shape[0])
        mismatches += total - image
        if not np.array_equal(uniq, combined):
            mismatches += 1
    else:
        sample_ok = [idx.combined.contains(tuple(row)) for row in x[:64]]
        mismatches += sample_ok.count(False)
    return BijectivityResult(len(picks[0]), mismatches, exhaustive, image)


def kissing_numbers(idx: CrtIndexCode) -> dict[tuple[int, ...], int]:
    """Kissing number of ``Lambda`` (key ``()``) and of each ``Lambda_{S^c}``."""
    out = {(): kissing_number(idx.lattice)}
    for S in nonempty_subsets(idx.r, proper=True):
        out[S] = kissing_number(idx.sublattice_known(S))
    return out
