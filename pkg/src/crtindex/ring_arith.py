"""Exact integer and modular arithmetic.

Bezout coefficients, CRT idempotents for a set of distinct primes, bounded
enumeration of sums of squares and the scalar-collinearity search used to
certify sum-of-squares code designs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Sequence

from .errors import ResourceLimitError

# Trial division is exact but slow; inputs here stay far below this bound.
PRIMALITY_CAP = 2**32
SUM_OF_SQUARES_CAP = 10**6
COLLINEAR_CAP = 10**5


def extended_gcd(a: int, b: int) -> tuple[int, int, int]:
    """Return ``(g, u, v)`` with ``u*a + v*b == g == gcd(a, b) > 0``."""
    if a == 0 and b == 0:
        raise ValueError("gcd(0, 0) is undefined")
    old_r, r = a, b
    old_u, u = 1, 0
    old_v, v = 0, 1
    while r:
        quot = old_r // r
        old_r, r = r, old_r - quot * r
        old_u, u = u, old_u - quot * u
        old_v, v = v, old_v - quot * v
    if old_r < 0:
        old_r, old_u, old_v = -old_r, -old_u, -old_v
    return old_r, old_u, old_v


def mod_inverse(a: int, m: int) -> int:
    try:
        return pow(a, -1, m)
    except ValueError:
        raise ValueError(f"{a} is not invertible modulo {m}") from None


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    if p > PRIMALITY_CAP:
        raise ResourceLimitError(f"primality by trial division capped at {PRIMALITY_CAP}")
    if p < 4:
        return True
    if p % 2 == 0 or p % 3 == 0:
        return False
    i = 5
    while i * i <= p:
        if p % i == 0 or p % (i + 2) == 0:
            return False
        i += 6
    return True


@dataclass(frozen=True)
class PrimeSet:
    """Ordered distinct primes ``p_1, ..., p_r`` with product ``q``."""

    primes: tuple[int, ...]
    q: int = field(init=False)
    cofactors: tuple[int, ...] = field(init=False)

    def __post_init__(self) -> None:
        primes = tuple(int(p) for p in self.primes)
        if not primes:
            raise ValueError("need at least one prime")
        if len(set(primes)) != len(primes):
            raise ValueError(f"primes must be distinct: {primes}")
        for p in primes:
            if not is_prime(p):
                raise ValueError(f"{p} is not prime")
        q = math.prod(primes)
        object.__setattr__(self, "primes", primes)
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "cofactors", tuple(q // p for p in primes))

    def __len__(self) -> int:
        return len(self.primes)


@dataclass(frozen=True)
class CrtBasis:
    """Bezout coefficients ``x_j`` and idempotents ``e_j = x_j m_j mod q``."""

    prime_set: PrimeSet
    bezout: tuple[int, ...]
    idempotents: tuple[int, ...]

    @property
    def q(self) -> int:
        return self.prime_set.q

    def check(self) -> None:
        ps, q = self.prime_set, self.q
        for j, e in enumerate(self.idempotents):
            if not 0 <= e < q:
                raise AssertionError(f"idempotent {e} not reduced mod {q}")
            if (e * e - e) % q:
                raise AssertionError(f"e_{j + 1}={e} is not idempotent mod {q}")
            for i, p in enumerate(ps.primes):
                if e % p != (1 if i == j else 0):
                    raise AssertionError(f"e_{j + 1}={e} has wrong residue mod {p}")
        if sum(self.idempotents) % q != 1 % q:
            raise AssertionError("idempotents do not sum to 1")


def crt_basis(prime_set: PrimeSet | Sequence[int]) -> CrtBasis:
    if not isinstance(prime_set, PrimeSet):
        prime_set = PrimeSet(tuple(prime_set))
    q = prime_set.q
    bezout = []
    idem = []
    for p, m in zip(prime_set.primes, prime_set.cofactors):
        # x_j * m_j + y * p_j = 1
        g, x, _ = extended_gcd(m, p)
        assert g == 1
        bezout.append(x)
        idem.append((x * m) % q)
    basis = CrtBasis(prime_set, tuple(bezout), tuple(idem))
    basis.check()
    return basis


def sum_of_squares(P: int, N: int, cap: int | None = None) -> list[tuple[int, ...]]:
    """All ways to write ``P`` as a sum of ``N`` squares.

    Solutions are canonicalized to nonnegative nondecreasing tuples and returned
    in lexicographic order. Raises ``ResourceLimitError`` when ``P > cap``.
    """
    if P < 1:
        raise ValueError("P must be positive")
    if not 1 <= N <= 8:
        raise ValueError("N must lie in [1, 8]")
    cap = SUM_OF_SQUARES_CAP if cap is None else cap
    if P > cap:
        raise ResourceLimitError(f"sum_of_squares: P={P} exceeds cap {cap}")

    out: list[tuple[int, ...]] = []
    suffix: list[int] = []

    def place(rem: int, slots: int, ceiling: int) -> None:
        # fills coordinates from the largest down; suffix holds them reversed
        if slots == 0:
            if rem == 0:
                out.append(tuple(reversed(suffix)))
            return
        hi = min(ceiling, math.isqrt(rem))
        # the remaining slots-1 entries are each <= x, so slots*x^2 >= rem
        lo = math.isqrt(rem // slots)
        while lo * lo * slots < rem:
            lo += 1
        for x in range(hi, lo - 1, -1):
            suffix.append(x)
            place(rem - x * x, slots - 1, x)
            suffix.pop()

    place(P, N, math.isqrt(P))
    out.sort()
    return out


def centered_residue(a: int, m: int) -> int:
    """Representative of ``a mod m`` in ``(-m/2, m/2]``."""
    r = a % m
    return r - m if 2 * r > m else r


def scalar_collinear(
    x: Sequence[int], P: int, cap: int | None = None
) -> list[tuple[int, tuple[int, ...]]]:
    """Units ``lam`` mod ``P`` with a short witness ``b``: ``lam*b = x (mod P)``, ``|b|^2 = P``.

    The witness is the centered representative of ``lam^-1 * x mod P``. Every
    integer vector of squared norm ``P`` has coordinates inside ``(-P/2, P/2]``
    once ``P >= 2``, so the scan over units is complete. Results are sorted by
    ``lam``.
    """
    if P < 2:
        raise ValueError("modulus must be at least 2")
    cap = COLLINEAR_CAP if cap is None else cap
    if P > cap:
        raise ResourceLimitError(f"scalar_collinear: P={P} exceeds cap {cap}")
    x = [int(v) for v in x]
    found = []
    for lam in range(1, P):
        if math.gcd(lam, P) != 1:
            continue
        inv = pow(lam, -1, P)
        b = tuple(centered_residue(inv * v, P) for v in x)
        if sum(v * v for v in b) == P:
            found.append((lam, b))
    return found


def nonempty_subsets(r: int, proper: bool = False) -> list[tuple[int, ...]]:
    """Nonempty subsets of levels ``1..r`` ordered by size, then lexicographically."""
    top = r - 1 if proper else r
    return [c for size in range(1, top + 1) for c in combinations(range(1, r + 1), size)]


def subset_product(primes: Iterable[int], subset: Iterable[int]) -> int:
    primes = tuple(primes)
    return math.prod(primes[j - 1] for j in subset)
