"""AWGN simulation of CRT index codes with receiver side information.

A receiver knowing the levels in ``S`` decodes over the infinite translate
``t + Lambda_{S^c}``; the nearest point is exact because every coset of
``q Z^n`` is searched with its per-coordinate closest lift. Trials whose noise
is shorter than half the minimum distance are decoded correctly without a
search.

SNR is ``10 log10(P_avg / sigma^2)`` with ``P_avg`` the mean per-dimension
energy of the centered constellation. Only curve ordering and the gaps between
curves are meaningful across conventions.

The reported ``ser`` is the estimated error probability of the lattice decoder
(decoded unknown-message tuple differs from the transmitted one) divided by the
dimension ``n``, i.e. the same per-dimension normalization as the
high-SNR approximation ``(1/n) K Q(d / 2 sigma)``. ``block_error_rate`` keeps
the raw fraction.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .codes import centered, enumerate_code
from .index_code import CrtIndexCode
from .lattices import kissing_number
from .ring_arith import nonempty_subsets

BATCH = 2048
CSV_COLUMNS = ["subset", "snr_db", "sigma2", "trials", "errors", "ser", "stderr", "theory", "block_error_rate"]


def gaussian_tail(x: float) -> float:
    return 0.5 * math.erfc(x / math.sqrt(2))


def theoretical_ser(d_sq: int, kissing: int, n: int, sigma2: float) -> float:
    """High-SNR approximation ``(1/n) K Q(sqrt(d^2 / 4 sigma^2))``."""
    if sigma2 <= 0:
        return 0.0
    return kissing * gaussian_tail(math.sqrt(d_sq / (4 * sigma2))) / n


@dataclass(frozen=True)
class ChannelConfig:
    trials: int
    seed: int
    snr_db: tuple[float, ...] = ()
    sigma2: tuple[float, ...] = ()
    subsets: tuple[tuple[int, ...], ...] | None = None

    def __post_init__(self) -> None:
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        if bool(self.snr_db) == bool(self.sigma2):
            raise ValueError("give exactly one of an SNR grid or a noise-variance list")
        if any(s <= 0 for s in self.sigma2):
            raise ValueError("noise variances must be positive")
        object.__setattr__(self, "snr_db", tuple(float(s) for s in self.snr_db))
        object.__setattr__(self, "sigma2", tuple(float(s) for s in self.sigma2))

    @staticmethod
    def grid(start: float, stop: float, step: float) -> tuple[float, ...]:
        if step <= 0 or stop < start:
            raise ValueError("SNR grid needs step > 0 and stop >= start")
        count = int(math.floor((stop - start) / step + 1e-9)) + 1
        return tuple(round(start + i * step, 10) for i in range(count))


@dataclass(frozen=True)
class SerPoint:
    snr_db: float
    sigma2: float
    trials: int
    errors: int
    ser: float
    stderr: float
    theory: float
    block_error_rate: float


@dataclass(frozen=True)
class SerCurve:
    subset: tuple[int, ...]
    points: tuple[SerPoint, ...]

    @property
    def label(self) -> str:
        return "none" if not self.subset else ",".join(map(str, self.subset))


def average_energy(idx: CrtIndexCode) -> float:
    """Mean per-dimension energy of the centered constellation."""
    words = centered(enumerate_code(idx.combined).words, idx.q)
    return float((words.astype(float) ** 2).sum() / words.size)


class SubsetDecoder:
    """Exact nearest-point decoder for a receiver that knows the levels in ``S``."""

    def __init__(self, idx: CrtIndexCode, S: Sequence[int] = ()):
        self.idx = idx
        self.subset = tuple(sorted(S))
        if self.subset:
            self.lattice = idx.sublattice_known(self.subset)
            self.d_sq = idx.d_sq(self.subset)
        else:
            self.lattice = idx.lattice
            self.d_sq = idx.d0_sq
        self.words = enumerate_code(idx.known_zeroed_code(self.subset)).words
        self._wf = self.words.astype(float)
        self.unknown = tuple(j for j in range(1, idx.r + 1) if j not in self.subset)

    @property
    def kissing(self) -> int:
        return kissing_number(self.lattice)

    def nearest(self, y: np.ndarray, t: np.ndarray) -> np.ndarray:
        """Index into ``self.words`` of the decoded coset for each row of ``y``."""
        q = self.idx.q
        u = y - t
        out = np.empty(u.shape[0], dtype=np.int64)
        for start in range(0, u.shape[0], BATCH):
            diff = u[start:start + BATCH, None, :] - self._wf[None, :, :]
            diff -= q * np.rint(diff / q)
            out[start:start + BATCH] = np.argmin(np.einsum("tmk,tmk->tm", diff, diff), axis=1)
        return out


def transmit_point(idx: CrtIndexCode, w: Sequence[Sequence[int]]) -> tuple[int, ...]:
    """Minimum-energy lift of ``encode(w)``."""
    return centered(idx.encode(w), idx.q)


def ml_decode(
    idx: CrtIndexCode,
    y: Sequence[float],
    S: Sequence[int] = (),
    v: Mapping[int, Sequence[int]] | None = None,
) -> dict[int, tuple[int, ...]]:
    """Decode the unknown levels from ``y`` given side information ``v`` on ``S``."""
    S = tuple(sorted(S))
    v = dict(v or {})
    if S:
        t = np.asarray(idx.translate(S, v), dtype=float)
    else:
        if v:
            raise ValueError("side information given without a subset")
        t = np.zeros(idx.n)
    dec = SubsetDecoder(idx, S)
    k = dec.nearest(np.asarray(y, dtype=float)[None, :], t[None, :])[0]
    word = (dec.words[k] + t.astype(np.int64)) % idx.q
    msgs = idx.decode_exact(tuple(int(a) for a in word))
    return {j: msgs[j - 1] for j in dec.unknown}


def default_subsets(r: int) -> tuple[tuple[int, ...], ...]:
    return ((),) + tuple(nonempty_subsets(r, proper=True))


def _count_errors(
    idx: CrtIndexCode,
    dec: SubsetDecoder,
    level_words: list[np.ndarray],
    sigma: float,
    trials: int,
    rng: np.random.Generator,
) -> int:
    q, n = idx.q, idx.n
    errors = 0
    half_d_sq = dec.d_sq / 4
    for start in range(0, trials, BATCH * 8):
        T = min(BATCH * 8, trials - start)
        # draw every level and the noise in a fixed order so all subsets share them
        picks = [rng.integers(0, len(w), size=T) for w in level_words]
        noise = rng.standard_normal((T, n)) * sigma
        msgs = [w[i] for w, i in zip(level_words, picks)]
        x = centered(idx.encode_batch(msgs), q).astype(float)
        hard = np.einsum("ij,ij->i", noise, noise) >= half_d_sq
        if not hard.any():
            continue
        y = x[hard] + noise[hard]
        t = np.zeros((int(hard.sum()), n), dtype=np.int64)
        for j in dec.subset:
            t = (t + idx.idempotents[j - 1] * msgs[j - 1][hard]) % q
        k = dec.nearest(y, t.astype(float))
        decoded = (dec.words[k] + t) % q
        wrong = np.zeros(decoded.shape[0], dtype=bool)
        for j in dec.unknown:
            wrong |= np.any(decoded % idx.primes[j - 1] != msgs[j - 1][hard], axis=1)
        errors += int(wrong.sum())
    return errors


def monte_carlo(idx: CrtIndexCode, cfg: ChannelConfig) -> list[SerCurve]:
    """SER curves for each side-information set in ``cfg`` (default: all, plus none).

    Point ``i`` of the grid draws from the counter-based stream keyed by
    ``(seed, i)``; every subset sees the same messages and noise there.
    """
    subsets = cfg.subsets if cfg.subsets is not None else default_subsets(idx.r)
    n = idx.n
    p_avg = average_energy(idx)
    if cfg.snr_db:
        grid = [(s, p_avg / 10 ** (s / 10)) for s in cfg.snr_db]
    else:
        grid = [(10 * math.log10(p_avg / s2), s2) for s2 in cfg.sigma2]
    level_words = [enumerate_code(c).words for c in idx.levels]
    curves = []
    for S in subsets:
        dec = SubsetDecoder(idx, S)
        K = dec.kissing
        pts = []
        for i, (snr, s2) in enumerate(grid):
            rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(cfg.seed, spawn_key=(i,))))
            errors = _count_errors(idx, dec, level_words, math.sqrt(s2), cfg.trials, rng)
            pe = errors / cfg.trials
            pts.append(
                SerPoint(
                    snr_db=snr,
                    sigma2=s2,
                    trials=cfg.trials,
                    errors=errors,
                    ser=pe / n,
                    stderr=math.sqrt(pe * (1 - pe) / cfg.trials) / n,
                    theory=theoretical_ser(dec.d_sq, K, n, s2),
                    block_error_rate=pe,
                )
            )
        curves.append(SerCurve(tuple(S), tuple(pts)))
    return curves


def crossing_snr(curve: SerCurve, level: float) -> float | None:
    """SNR where the simulated SER first falls through ``level`` (log-linear interpolation)."""
    pts = curve.points
    for a, b in zip(pts, pts[1:]):
        if a.ser >= level > b.ser:
            if b.ser <= 0:
                return b.snr_db
            la, lb, lt = math.log10(a.ser), math.log10(b.ser), math.log10(level)
            return a.snr_db + (la - lt) / (la - lb) * (b.snr_db - a.snr_db)
    return None


def curves_to_csv(curves: Iterable[SerCurve], emit_theory: bool = True) -> str:
    buf = io.StringIO()
    cols = CSV_COLUMNS if emit_theory else [c for c in CSV_COLUMNS if c != "theory"]
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(cols)
    for c in curves:
        for p in c.points:
            row = {"subset": c.label, **asdict(p)}
            w.writerow([_fmt(row[k]) for k in cols])
    return buf.getvalue()


def curves_to_json(curves: Iterable[SerCurve]) -> str:
    return json.dumps(
        [{"subset": list(c.subset), "points": [asdict(p) for p in c.points]} for c in curves],
        indent=2,
    )


def _fmt(v) -> str:
    if isinstance(v, float):
        return repr(v)
    return str(v)
