"""Uniform-gain CRT index code designs.

Three families:

* canonical: every level spanned by ``k`` unit vectors sharing one common
  coordinate; gain ``(n/k) 20 log10 2``.
* sum of squares: rank-1 levels ``<x mod p_j>`` where ``q = |x|^2``; when every
  subset product of the primes admits a short collinear witness the gain is
  ``(N/2) 20 log10 2``.
* Cartesian lift of a sum-of-squares design to dimension ``m N``.

Every design is pushed through :func:`gain_report` before it is returned, so
the predicted gain is confirmed rather than assumed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

from .codes import LinearCode, cartesian_power, centered, enumerate_code, min_euclidean_distance
from .index_code import GAIN_UNIT_DB, UNIFORM_TOL_DB, CrtIndexCode, GainReport, gain_report
from .lattices import IntegerLattice, basis_from_generators
from .ring_arith import (
    PrimeSet,
    nonempty_subsets,
    scalar_collinear,
    subset_product,
    sum_of_squares,
)

Witness = tuple[int, tuple[int, ...]]


class DesignError(ValueError):
    pass


@dataclass(frozen=True)
class Theorem1Certificate:
    """Collinear short witnesses for every nonempty subset product of the primes."""

    primes: tuple[int, ...]
    decomposition: tuple[int, ...]
    witnesses: dict[tuple[int, ...], tuple[Witness, ...]]
    failing: tuple[tuple[int, ...], ...]

    @property
    def passed(self) -> bool:
        return not self.failing

    def as_dict(self) -> dict:
        return {
            "decomposition": list(self.decomposition),
            "passed": self.passed,
            "failing": [list(s) for s in self.failing],
            "witnesses": [
                {
                    "subset": list(S),
                    "product": subset_product(self.primes, S),
                    "solutions": [{"lambda": lam, "b": list(b)} for lam, b in sols],
                }
                for S, sols in self.witnesses.items()
            ],
        }


@dataclass
class UniformDesign:
    code: CrtIndexCode
    kind: str
    predicted_gain: float
    report: GainReport
    decomposition: tuple[int, ...] | None = None
    N: int | None = None
    m: int = 1
    certificate: Theorem1Certificate | None = None
    level_witnesses: dict[int, Witness] = field(default_factory=dict)

    @property
    def confirmed(self) -> bool:
        g = self.report.overall_gain
        return self.report.uniform and g is not None and abs(g - self.predicted_gain) <= UNIFORM_TOL_DB

    def metadata(self) -> dict:
        meta: dict = {"kind": self.kind, "predicted_gain_db": self.predicted_gain, "m": self.m}
        if self.decomposition is not None:
            meta["decomposition"] = list(self.decomposition)
            meta["N"] = self.N
        if self.level_witnesses:
            meta["level_witnesses"] = {
                str(j): {"lambda": lam, "b": list(b)} for j, (lam, b) in sorted(self.level_witnesses.items())
            }
        if self.certificate is not None:
            meta["subset_certificate"] = self.certificate.as_dict()
        return meta


def _confirm(design: UniformDesign) -> UniformDesign:
    if not design.confirmed:
        raise DesignError(
            f"{design.kind} design did not confirm: gains "
            f"{[round(r.gain, 12) for r in design.report.rows]} vs predicted {design.predicted_gain}"
        )
    return design


def design_canonical(
    primes: Sequence[int],
    n: int,
    k: int,
    shared: int = 1,
    index_sets: Sequence[Sequence[int]] | None = None,
) -> UniformDesign:
    """Levels spanned by canonical vectors, all containing ``e_shared`` (1-based)."""
    if not 1 <= k < n:
        raise DesignError(f"canonical designs need 1 <= k < n, got k={k}, n={n}")
    if not 1 <= shared <= n:
        raise DesignError(f"shared index {shared} outside 1..{n}")
    if index_sets is None:
        others = [i for i in range(1, n + 1) if i != shared][: k - 1]
        index_sets = [[shared, *others]] * len(primes)
    if len(index_sets) != len(primes):
        raise DesignError("one index set per prime required")
    levels = []
    for p, idxs in zip(primes, index_sets):
        idxs = sorted(set(idxs))
        if len(idxs) != k or shared not in idxs or not all(1 <= i <= n for i in idxs):
            raise DesignError(f"index set {idxs} must have size {k} and contain {shared}")
        gens = tuple(tuple(int(c == i) for c in range(1, n + 1)) for i in idxs)
        levels.append(LinearCode(p, n, gens))
    code = CrtIndexCode(primes, levels)
    return _confirm(UniformDesign(code, "canonical", n / k * GAIN_UNIT_DB, gain_report(code)))


def certify_theorem1(
    primes: Sequence[int], x: Sequence[int], cap: int | None = None
) -> Theorem1Certificate:
    primes = tuple(primes)
    x = tuple(int(v) for v in x)
    q = math.prod(primes)
    if sum(v * v for v in x) != q:
        raise DesignError(f"{x} is not a sum-of-squares decomposition of {q}")
    witnesses = {}
    failing = []
    for S in nonempty_subsets(len(primes)):
        sols = tuple(scalar_collinear(x, subset_product(primes, S), cap))
        witnesses[S] = sols
        if not sols:
            failing.append(S)
    return Theorem1Certificate(primes, x, witnesses, tuple(failing))


def _preferred(sols: Sequence[Witness]) -> Witness:
    return min(sols, key=lambda s: s[1])


@dataclass(frozen=True)
class Rejection:
    decomposition: tuple[int, ...]
    stage: str  # "level" (single prime fails) or "product" (a product of primes fails)
    failing: tuple[tuple[int, ...], ...]

    def describe(self, primes: Sequence[int]) -> str:
        prods = [subset_product(primes, S) for S in self.failing]
        what = "level prime" if self.stage == "level" else "subset product"
        return f"{self.decomposition}: no collinear short witness for {what} {', '.join(map(str, prods))}"


@dataclass
class SosDesignResult:
    primes: tuple[int, ...]
    N: int
    decompositions: list[tuple[int, ...]]
    designs: list[UniformDesign]
    rejections: list[Rejection]

    @property
    def diagnostic(self) -> str:
        q = math.prod(self.primes)
        if not self.decompositions:
            return f"{q} is not a sum of {self.N} squares"
        if not self.designs:
            return f"none of the {len(self.decompositions)} decompositions of {q} passed certification"
        return f"{len(self.designs)} design(s), {len(self.rejections)} rejection(s)"


def build_sos_code(primes: Sequence[int], x: Sequence[int], level_witnesses: dict[int, Witness], m: int = 1) -> CrtIndexCode:
    levels = []
    N = len(x)
    for j, p in enumerate(primes, start=1):
        _, b = level_witnesses[j]
        levels.append(cartesian_power(LinearCode(p, N, (tuple(v % p for v in b),)), m))
    return CrtIndexCode(primes, levels)


def design_sos(
    primes: Sequence[int],
    N: int,
    squares_cap: int | None = None,
    collinear_cap: int | None = None,
) -> SosDesignResult:
    """Rank-1 designs from every decomposition of ``q`` into ``N`` squares.

    A decomposition is rejected at stage ``"level"`` when some prime has no
    short witness, and at stage ``"product"`` when only a composite subset
    product fails.
    """
    primes = tuple(PrimeSet(tuple(primes)).primes)
    if len(primes) < 2:
        raise DesignError("sum-of-squares designs need at least two primes")
    q = math.prod(primes)
    decomps = sum_of_squares(q, N, squares_cap)
    designs, rejections = [], []
    for x in decomps:
        level_sols = {j: scalar_collinear(x, p, collinear_cap) for j, p in enumerate(primes, start=1)}
        bad = tuple((j,) for j, sols in level_sols.items() if not sols)
        if bad:
            rejections.append(Rejection(x, "level", bad))
            continue
        cert = certify_theorem1(primes, x, collinear_cap)
        if not cert.passed:
            rejections.append(Rejection(x, "product", cert.failing))
            continue
        chosen = {j: _preferred(sols) for j, sols in level_sols.items()}
        code = build_sos_code(primes, x, chosen)
        design = UniformDesign(
            code,
            "sos",
            N / 2 * GAIN_UNIT_DB,
            gain_report(code),
            decomposition=x,
            N=N,
            certificate=cert,
            level_witnesses=chosen,
        )
        designs.append(_confirm(design))
    return SosDesignResult(primes, N, decomps, designs, rejections)


def lift_cartesian(design: UniformDesign, m: int) -> UniformDesign:
    if design.kind not in ("sos", "cartesian-lift") or design.decomposition is None:
        raise DesignError("only certified sum-of-squares designs can be lifted")
    if m == design.m:
        return design
    code = build_sos_code(design.code.primes, design.decomposition, design.level_witnesses, m)
    lifted = UniformDesign(
        code,
        "sos" if m == 1 else "cartesian-lift",
        design.predicted_gain,
        gain_report(code),
        decomposition=design.decomposition,
        N=design.N,
        m=m,
        certificate=design.certificate,
        level_witnesses=dict(design.level_witnesses),
    )
    return _confirm(lifted)


def check_lemma1(x: Sequence[int]) -> bool:
    """``<x>`` over ``Z_q`` with ``q = |x|^2`` has minimum distance ``sqrt(q)``."""
    q = sum(v * v for v in x)
    if q < 2:
        return False
    d2, _ = min_euclidean_distance(enumerate_code(LinearCode(q, len(x), (tuple(x),))))
    return d2 == q


@dataclass(frozen=True)
class GaussianComparison:
    a: int
    b: int
    q: int
    pi_a_basis: tuple[tuple[int, ...], ...]
    gaussian_basis: tuple[tuple[int, ...], ...]

    @property
    def equal(self) -> bool:
        return self.pi_a_basis == self.gaussian_basis


def gaussian_equivalence(p1: int, ab1: Sequence[int], p2: int, ab2: Sequence[int]) -> GaussianComparison:
    """Compare the two-level pi_A lattice with the Gaussian-integer lattice ``<(a,b), (-b,a)>``."""
    a1, b1 = map(int, ab1)
    a2, b2 = map(int, ab2)
    if a1 * a1 + b1 * b1 != p1:
        raise DesignError(f"{a1}^2 + {b1}^2 != {p1}")
    if a2 * a2 + b2 * b2 != p2:
        raise DesignError(f"{a2}^2 + {b2}^2 != {p2}")
    a = a1 * a2 - b1 * b2
    b = a2 * b1 + a1 * b2
    code = CrtIndexCode(
        (p1, p2),
        [LinearCode(p1, 2, ((a1 % p1, b1 % p1),)), LinearCode(p2, 2, ((a2 % p2, b2 % p2),))],
    )
    gauss: IntegerLattice = basis_from_generators([(a, b), (-b, a)])
    return GaussianComparison(a, b, a * a + b * b, code.lattice.basis, gauss.basis)


def two_square_split(p: int) -> tuple[int, int]:
    """Some ``(a, b)`` with ``a^2 + b^2 = p``."""
    sols = sum_of_squares(p, 2)
    if not sols:
        raise DesignError(f"{p} is not a sum of two squares")
    return sols[0]


def centered_generator(code: LinearCode) -> tuple[int, ...]:
    return centered(code.generators[0], code.q)
