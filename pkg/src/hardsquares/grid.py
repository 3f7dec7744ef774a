"""Cube complex of the rectangle of square centres.

A board of ``w`` by ``h`` unit squares has its centres in a rectangle of
size ``(w-1) x (h-1)``; the integer lattice turns that rectangle into a cube
complex whose vertices are the admissible centre positions.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum
from functools import cached_property

import numpy as np

from .homology import ChainComplex, SparseIntMatrix


class Kind(IntEnum):
    POINT = 0
    INTERVAL = 1


@dataclass(frozen=True, order=True)
class GridCell:
    """A product cell ``X x Y`` where each factor is a lattice point or a unit interval."""

    x_lo: int
    x_kind: Kind
    y_lo: int
    y_kind: Kind

    @property
    def dim(self) -> int:
        return int(self.x_kind) + int(self.y_kind)

    @property
    def x_extent(self) -> tuple[int, int]:
        return self.x_lo, self.x_lo + int(self.x_kind)

    @property
    def y_extent(self) -> tuple[int, int]:
        return self.y_lo, self.y_lo + int(self.y_kind)

    def faces(self) -> list[tuple[GridCell, int]]:
        """Codimension-one faces with incidence signs.

        Intervals are oriented from low to high coordinate and the product
        rule puts the sign ``(-1)^{dim X}`` on faces coming from ``Y``.
        """
        out: list[tuple[GridCell, int]] = []
        if self.x_kind == Kind.INTERVAL:
            out.append((GridCell(self.x_lo, Kind.POINT, self.y_lo, self.y_kind), -1))
            out.append((GridCell(self.x_lo + 1, Kind.POINT, self.y_lo, self.y_kind), 1))
        if self.y_kind == Kind.INTERVAL:
            s = -1 if self.x_kind == Kind.INTERVAL else 1
            out.append((GridCell(self.x_lo, self.x_kind, self.y_lo, Kind.POINT), -s))
            out.append((GridCell(self.x_lo, self.x_kind, self.y_lo + 1, Kind.POINT), s))
        return out


def closures_disjoint(a: GridCell, b: GridCell) -> bool:
    """True iff the closed cells share no point."""
    ax0, ax1 = a.x_extent
    bx0, bx1 = b.x_extent
    if ax1 < bx0 or bx1 < ax0:
        return True
    ay0, ay1 = a.y_extent
    by0, by1 = b.y_extent
    return ay1 < by0 or by1 < ay0


class CubicalComplex:
    """Lattice cube complex on ``[0, width_units] x [0, height_units]``.

    Cells are indexed densely, ordered by ``(dim, y_lo, x_lo, x_kind)``, so
    the vertices come first in row-major order.
    """

    def __init__(self, width_units: int, height_units: int):
        if width_units < 1 or height_units < 1:
            raise ValueError(
                f"rectangle needs positive dimensions, got {width_units}x{height_units}"
            )
        self.width_units = width_units
        self.height_units = height_units
        cells = []
        for xk in (0, 1):
            for yk in (0, 1):
                for y in range(height_units + 1 - yk):
                    for x in range(width_units + 1 - xk):
                        cells.append(GridCell(x, Kind(xk), y, Kind(yk)))
        cells.sort(key=lambda c: (c.dim, c.y_lo, c.x_lo, c.x_kind))
        self.cells: list[GridCell] = cells
        self.index: dict[GridCell, int] = {c: i for i, c in enumerate(cells)}
        self.incidence: list[list[tuple[int, int]]] = [
            [(self.index[f], s) for f, s in c.faces()] for c in cells
        ]

    def __len__(self) -> int:
        return len(self.cells)

    def __repr__(self) -> str:
        return f"CubicalComplex({self.width_units}, {self.height_units})"

    @property
    def board(self) -> tuple[int, int]:
        """The (w, h) board this complex models."""
        return self.width_units + 1, self.height_units + 1

    @cached_property
    def dims(self) -> np.ndarray:
        return np.array([c.dim for c in self.cells], dtype=np.int64)

    @cached_property
    def extents(self) -> np.ndarray:
        """Array of closed extents ``(x0, x1, y0, y1)`` per cell."""
        return np.array([c.x_extent + c.y_extent for c in self.cells], dtype=np.int64)

    @cached_property
    def disjoint(self) -> np.ndarray:
        """Boolean matrix of closure disjointness between all cell pairs."""
        e = self.extents
        x0, x1, y0, y1 = (e[:, i] for i in range(4))
        sep_x = (x1[:, None] < x0[None, :]) | (x1[None, :] < x0[:, None])
        sep_y = (y1[:, None] < y0[None, :]) | (y1[None, :] < y0[:, None])
        return sep_x | sep_y

    def vertex_index(self, x: int, y: int) -> int:
        return self.index[GridCell(x, Kind.POINT, y, Kind.POINT)]

    def cells_of_dim(self, d: int) -> list[int]:
        return [i for i, c in enumerate(self.cells) if c.dim == d]

    def chain_complex(self) -> ChainComplex:
        by_dim = [self.cells_of_dim(d) for d in range(3)]
        local = {}
        for ids in by_dim:
            for j, i in enumerate(ids):
                local[i] = j
        bd = {}
        for d in (1, 2):
            rows, cols, vals = [], [], []
            for j, i in enumerate(by_dim[d]):
                for f, s in self.incidence[i]:
                    rows.append(local[f])
                    cols.append(j)
                    vals.append(s)
            bd[d] = SparseIntMatrix((len(by_dim[d - 1]), len(by_dim[d])), rows, cols, vals)
        return ChainComplex([len(ids) for ids in by_dim], bd)


def build_rect_complex(width_units: int, height_units: int) -> CubicalComplex:
    """Cube complex of the centre rectangle for a ``(width_units+1) x (height_units+1)`` board."""
    return CubicalComplex(width_units, height_units)
