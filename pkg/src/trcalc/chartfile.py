"""ChartFile: the canonical JSON persistence format for chart tables.

Schema (version 1):

    {"version": 1,
     "spec":    {...job echo...},
     "engine":  "oracle" | "witt-row" | "symbolic" | "compare",
     "cells":   [{"deg": [int..], "dim": int, "exps": [int..],
                  "labels": [str..]}, ...]}

Cells are sorted lexicographically by (deg, dim) and exponents descending,
so identical jobs serialize byte-identically.  Rational exponents appearing
in labels are rendered as "num/p^N" strings.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

SCHEMA_VERSION = 1

ENGINES = ("oracle", "witt-row", "symbolic", "compare")


@dataclass
class ChartFile:
    spec: dict
    engine: str
    cells: list[dict] = field(default_factory=list)
    version: int = SCHEMA_VERSION

    def __post_init__(self):
        if self.engine not in ENGINES:
            raise ValueError(f"unknown engine {self.engine!r}")
        self.cells = canonical_cells(self.cells)

    def add_cell(self, deg, dim: int, exps, labels=()):
        self.cells.append(
            {
                "deg": [int(x) for x in deg],
                "dim": int(dim),
                "exps": sorted((int(e) for e in exps), reverse=True),
                "labels": [str(s) for s in labels],
            }
        )

    def finalize(self) -> "ChartFile":
        self.cells = canonical_cells(self.cells)
        return self

    def to_json(self) -> str:
        obj = {
            "version": self.version,
            "spec": self.spec,
            "engine": self.engine,
            "cells": canonical_cells(self.cells),
        }
        return json.dumps(obj, sort_keys=True, separators=(",", ":")) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "ChartFile":
        obj = json.loads(text)
        if obj.get("version") != SCHEMA_VERSION:
            raise ValueError(f"unsupported schema version {obj.get('version')}")
        cf = cls(spec=obj["spec"], engine=obj["engine"], cells=obj["cells"])
        return cf

    def to_csv(self) -> str:
        lines = ["deg;dim;exps;labels"]
        for c in self.cells:
            lines.append(
                "{};{};{};{}".format(
                    ",".join(map(str, c["deg"])),
                    c["dim"],
                    ",".join(map(str, c["exps"])),
                    "|".join(c["labels"]),
                )
            )
        return "\n".join(lines) + "\n"

    def to_ascii(self) -> str:
        head = ("deg", "dim", "group", "labels")
        rows = []
        p = self.spec.get("p", 0)
        for c in self.cells:
            grp = " + ".join(f"Z/{p**e}" for e in c["exps"]) if c["exps"] else "0"
            rows.append(
                (
                    "(" + ",".join(map(str, c["deg"])) + ")",
                    str(c["dim"]),
                    grp,
                    " ".join(c["labels"]),
                )
            )
        widths = [max(len(r[i]) for r in [head] + rows) for i in range(4)]
        out = ["  ".join(h.ljust(w) for h, w in zip(head, widths))]
        out.append("  ".join("-" * w for w in widths))
        for r in rows:
            out.append("  ".join(v.ljust(w) for v, w in zip(r, widths)))
        return "\n".join(out) + "\n"


def canonical_cells(cells: list[dict]) -> list[dict]:
    norm = []
    for c in cells:
        norm.append(
            {
                "deg": [int(x) for x in c["deg"]],
                "dim": int(c["dim"]),
                "exps": sorted((int(e) for e in c["exps"]), reverse=True),
                "labels": [str(s) for s in c.get("labels", ())],
            }
        )
    return sorted(norm, key=lambda c: (c["deg"], c["dim"]))
