"""Chart container: (weight multidegree, topological dimension) -> PGroup."""

from __future__ import annotations

from typing import Iterable

from .arith import PGroup


class Chart:
    """Finite table of coefficient groups indexed by (multidegree, dimension).

    Charts of this engine are trivial in negative dimensions and outside the
    explicitly computed window; ``get`` returns the trivial group there.
    Cells may carry generator labels (aligned with the exponent multiset).
    """

    def __init__(self, p: int, r: int, nvars: int):
        self.p = p
        self.r = r
        self.nvars = nvars
        self._cells: dict[tuple[tuple[int, ...], int], PGroup] = {}
        self._labels: dict[tuple[tuple[int, ...], int], tuple[str, ...]] = {}

    def set(self, deg, dim: int, group: PGroup, labels: Iterable[str] = ()):
        deg = tuple(int(x) for x in deg)
        if group.is_trivial:
            self._cells.pop((deg, dim), None)
            self._labels.pop((deg, dim), None)
            return
        self._cells[(deg, dim)] = group
        labels = tuple(labels)
        if labels:
            self._labels[(deg, dim)] = labels

    def get(self, deg, dim: int) -> PGroup:
        deg = tuple(int(x) for x in deg)
        return self._cells.get((deg, dim), PGroup.trivial(self.p))

    def labels(self, deg, dim: int) -> tuple[str, ...]:
        return self._labels.get((tuple(deg), dim), ())

    def cells(self):
        """Sorted iteration: (deg, dim, PGroup, labels)."""
        for (deg, dim) in sorted(self._cells):
            yield deg, dim, self._cells[(deg, dim)], self.labels(deg, dim)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Chart):
            return NotImplemented
        return (self.p, self.r, self.nvars) == (other.p, other.r, other.nvars) and (
            self._cells == other._cells
        )

    def __repr__(self):
        return f"Chart(p={self.p}, r={self.r}, nvars={self.nvars}, cells={len(self._cells)})"
