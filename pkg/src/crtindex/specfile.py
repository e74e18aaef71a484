"""JSON code-spec files.

Schema (version 1)::

    {
      "format": "crtindex-code-spec",
      "version": 1,
      "primes": [3, 11, 17],
      "n": 3,
      "levels": [[[1, 2, 2]], [[8, 1, 1]], [[14, 2, 2]]],   # generator rows per level, mod p_j
      "design": {...}                                        # optional metadata
    }

``design`` carries whatever the designer attached: ``kind`` (``canonical``,
``sos`` or ``cartesian-lift``), ``predicted_gain_db``, ``m`` and, for
sum-of-squares designs, ``decomposition``, ``N``, ``level_witnesses`` and a
``subset_certificate`` with a witness list for every product of primes.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from .index_code import CrtIndexCode

FORMAT_TAG = "crtindex-code-spec"
VERSION = 1


class SpecFormatError(ValueError):
    pass


@dataclass
class CodeSpec:
    primes: tuple[int, ...]
    n: int
    levels: list[list[tuple[int, ...]]]
    design: dict[str, Any] = field(default_factory=dict)

    def build(self) -> CrtIndexCode:
        return CrtIndexCode.from_generators(self.primes, self.levels)

    @classmethod
    def from_code(cls, idx: CrtIndexCode, design: dict[str, Any] | None = None) -> "CodeSpec":
        return cls(
            idx.primes,
            idx.n,
            [list(c.generators) for c in idx.levels],
            dict(design or {}),
        )

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {
            "format": FORMAT_TAG,
            "version": VERSION,
            "primes": list(self.primes),
            "n": self.n,
            "levels": [[list(g) for g in rows] for rows in self.levels],
        }
        if self.design:
            out["design"] = self.design
        return out

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "CodeSpec":
        if data.get("format") != FORMAT_TAG:
            raise SpecFormatError(f"not a {FORMAT_TAG} document")
        if data.get("version") != VERSION:
            raise SpecFormatError(f"unsupported spec version {data.get('version')!r}")
        try:
            primes = tuple(int(p) for p in data["primes"])
            n = int(data["n"])
            raw = data["levels"]
        except (KeyError, TypeError, ValueError) as exc:
            raise SpecFormatError(f"malformed spec: {exc}") from exc
        if len(raw) != len(primes):
            raise SpecFormatError("one generator list per prime required")
        levels = []
        for p, rows in zip(primes, raw):
            level = []
            for row in rows:
                if len(row) != n:
                    raise SpecFormatError(f"generator {row} does not have length {n}")
                if any(not 0 <= int(v) < p for v in row):
                    raise SpecFormatError(f"generator {row} is not reduced mod {p}")
                level.append(tuple(int(v) for v in row))
            levels.append(level)
        return cls(primes, n, levels, dict(data.get("design") or {}))

    @classmethod
    def loads(cls, text: str) -> "CodeSpec":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise SpecFormatError(f"invalid JSON: {exc}") from exc
        return cls.from_dict(data)

    @classmethod
    def load(cls, path: str | Path) -> "CodeSpec":
        return cls.loads(Path(path).read_text())

    def save(self, path: str | Path) -> None:
        Path(path).write_text(self.dumps() + "\n")
