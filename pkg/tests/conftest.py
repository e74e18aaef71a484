import math

import numpy as np
import pytest

from crtindex.codes import LinearCode
from crtindex.index_code import CrtIndexCode

C561_PRIMES = (3, 11, 17)
C561_LEVELS = [[(1, 2, 2)], [(8, 1, 1)], [(14, 2, 2)]]
TOY_PRIMES = (3, 5)
TOY_LEVELS = [[(1, 1)], [(1, 2)]]


@pytest.fixture(scope="session")
def c561():
    return CrtIndexCode.from_generators(C561_PRIMES, C561_LEVELS)


@pytest.fixture(scope="session")
def toy():
    return CrtIndexCode.from_generators(TOY_PRIMES, TOY_LEVELS)


def random_small_code(rng: np.random.Generator, max_size: int = 5000, min_levels: int = 2) -> CrtIndexCode:
    """Random CRT code with r <= 3, p <= 7, n <= 4 and at most ``max_size`` words."""
    while True:
        r = int(rng.integers(min_levels, 4))
        primes = tuple(sorted(rng.choice([2, 3, 5, 7], size=r, replace=False).tolist()))
        n = int(rng.integers(1, 5))
        levels = []
        for p in primes:
            rows = int(rng.integers(0, n + 1))
            gens = tuple(tuple(int(v) for v in rng.integers(0, p, size=n)) for _ in range(rows))
            levels.append(LinearCode(p, n, gens))
        idx = CrtIndexCode(primes, levels)
        if idx.cardinality <= max_size:
            return idx


def random_equal_rank_code(rng: np.random.Generator, max_size: int = 5000) -> CrtIndexCode:
    """Random CRT code whose levels all have the same positive rank k < n."""
    from crtindex.codes import rank_over_prime_field

    while True:
        r = int(rng.integers(2, 4))
        primes = tuple(sorted(rng.choice([2, 3, 5, 7], size=r, replace=False).tolist()))
        n = int(rng.integers(2, 5))
        k = int(rng.integers(1, n))
        if math.prod(primes) ** k > max_size:
            continue
        levels = []
        for p in primes:
            while True:
                gens = tuple(tuple(int(v) for v in rng.integers(0, p, size=n)) for _ in range(k))
                code = LinearCode(p, n, gens)
                if rank_over_prime_field(code) == k:
                    break
            levels.append(code)
        return CrtIndexCode(primes, levels)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
