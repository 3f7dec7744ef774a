"""Discrete configuration complexes of labelled squares.

``DF_n`` is the cube complex whose cells are ordered n-tuples of cells of the
centre rectangle with pairwise disjoint closures.  Subdividing each cube by
the Kuhn (Freudenthal) triangulation gives a simplicial model in which every
hyperplane ``x_a = x_b`` or ``y_a = y_b`` is a subcomplex; the right-most
subspaces used by the Mayer-Vietoris cover are predicate subcomplexes of
that model.
"""
from __future__ import annotations

import gzip
import json
import os
from functools import cached_property
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from .grid import CubicalComplex, build_rect_complex
from .homology import ChainComplex, SparseIntMatrix

FORMAT_VERSION = 1
DEFAULT_CELL_CAP = 50_000_000


class BudgetExceeded(RuntimeError):
    """Raised when a complex would exceed the configured cell budget."""


def _ambient_faces(amb: CubicalComplex) -> tuple[np.ndarray, np.ndarray]:
    faces = -np.ones((len(amb), 4), dtype=np.int64)
    signs = np.zeros((len(amb), 4), dtype=np.int64)
    for i, inc in enumerate(amb.incidence):
        for s, (f, sg) in enumerate(inc):
            faces[i, s] = f
            signs[i, s] = sg
    return faces, signs


class ConfigComplex:
    """The cube complex ``DF_n`` of an ambient rectangle complex.

    Cells of dimension ``k`` are rows of ``cells[k]`` (shape ``(count, n)``,
    ambient cell index of each square), sorted lexicographically.
    """

    def __init__(self, ambient: CubicalComplex, n: int, cells: list[np.ndarray], max_dim: int):
        self.ambient = ambient
        self.n = n
        self.cells = cells
        self.max_dim = max_dim
        radix = len(ambient)
        self._weights = np.array([radix ** (n - 1 - i) for i in range(n)], dtype=np.int64)
        self.codes = [c @ self._weights if len(c) else np.zeros(0, dtype=np.int64) for c in cells]

    def __repr__(self) -> str:
        w, h = self.ambient.board
        return f"ConfigComplex(w={w}, h={h}, n={self.n}, sizes={self.sizes})"

    @property
    def sizes(self) -> list[int]:
        return [len(c) for c in self.cells]

    @property
    def board(self) -> tuple[int, int]:
        return self.ambient.board

    def index_of(self, parts: Sequence[int]) -> int:
        """Position of a cell given as a tuple of ambient indices."""
        parts = np.asarray(parts, dtype=np.int64)
        d = int(self.ambient.dims[parts].sum())
        code = int(parts @ self._weights)
        codes = self.codes[d]
        i = int(np.searchsorted(codes, code))
        if i >= len(codes) or codes[i] != code:
            raise KeyError(tuple(parts.tolist()))
        return i

    @cached_property
    def boundaries(self) -> dict[int, SparseIntMatrix]:
        amb_dims = self.ambient.dims
        faces, signs = _ambient_faces(self.ambient)
        out = {}
        for k in range(1, len(self.cells)):
            P = self.cells[k]
            rows, cols, vals = [], [], []
            before = np.zeros(len(P), dtype=np.int64)
            for t in range(self.n):
                part = P[:, t]
                for s in range(4):
                    f = faces[part, s]
                    ok = f >= 0
                    if not ok.any():
                        continue
                    idx = np.nonzero(ok)[0]
                    code = self.codes[k][idx] + (f[idx] - part[idx]) * self._weights[t]
                    r = np.searchsorted(self.codes[k - 1], code)
                    sign = signs[part[idx], s] * np.where(before[idx] % 2, -1, 1)
                    rows.append(r)
                    cols.append(idx)
                    vals.append(sign)
                before += amb_dims[part]
            if rows:
                m = SparseIntMatrix(
                    (len(self.cells[k - 1]), len(P)),
                    np.concatenate(rows),
                    np.concatenate(cols),
                    np.concatenate(vals),
                )
            else:
                m = SparseIntMatrix((len(self.cells[k - 1]), len(P)))
            out[k] = m
        return out

    def chain_complex(self) -> ChainComplex:
        return ChainComplex(self.sizes, dict(self.boundaries))

    def vertex_positions(self) -> np.ndarray:
        """Array ``(V, n, 2)`` of lattice positions ``(x, y)`` of each square at each vertex."""
        e = self.ambient.extents
        v = self.cells[0] if self.cells else np.zeros((0, self.n), dtype=np.int64)
        return np.stack([e[v, 0], e[v, 2]], axis=-1)


def _enumerate_tuples(amb: CubicalComplex, n: int, max_dim: int, cap: int) -> np.ndarray:
    dims = amb.dims
    disjoint = amb.disjoint
    N = len(amb)
    tuples = np.nonzero(dims <= max_dim)[0][:, None].astype(np.int64)
    tot = dims[tuples[:, 0]]
    for _ in range(1, n):
        m = len(tuples)
        if m * N > 4 * cap or m > cap:
            raise BudgetExceeded(f"partial enumeration reached {m} tuples (cap {cap})")
        ok = np.ones((m, N), dtype=bool)
        for t in range(tuples.shape[1]):
            ok &= disjoint[tuples[:, t]]
        ok &= (tot[:, None] + dims[None, :]) <= max_dim
        r, c = np.nonzero(ok)
        tuples = np.concatenate([tuples[r], c[:, None]], axis=1)
        tot = tot[r] + dims[c]
        if len(tuples) == 0:
            break
    if len(tuples) > cap:
        raise BudgetExceeded(f"{len(tuples)} cells exceed the cap {cap}")
    return tuples


def estimate_cells(amb: CubicalComplex, n: int) -> float:
    """Upper bound for the number of cells of ``DF_n``: ordered tuples of distinct cells."""
    N = len(amb)
    est = 1.0
    for i in range(n):
        est *= max(N - i, 0)
    return est


def build_discrete_config(
    ambient: CubicalComplex,
    n: int,
    max_dim: int | None = None,
    cap: int = DEFAULT_CELL_CAP,
) -> ConfigComplex:
    """Build ``DF_n`` of the ambient complex, optionally only up to ``max_dim``.

    Returns an empty complex when ``n`` exceeds the number of lattice vertices.
    """
    if n < 1:
        raise ValueError(f"need at least one square, got n={n}")
    top = 2 * n if max_dim is None else min(max_dim, 2 * n)
    n_vertices = (ambient.width_units + 1) * (ambient.height_units + 1)
    if n > n_vertices:
        return ConfigComplex(ambient, n, [np.zeros((0, n), dtype=np.int64)], 0)
    if float(len(ambient)) ** n >= 2.0**62:
        raise BudgetExceeded("cell codes would overflow 64-bit integers")
    tuples = _enumerate_tuples(ambient, n, top, cap)
    weights = np.array([len(ambient) ** (n - 1 - i) for i in range(n)], dtype=np.int64)
    dsum = ambient.dims[tuples].sum(axis=1)
    codes = tuples @ weights
    order = np.lexsort((codes, dsum))
    tuples, dsum = tuples[order], dsum[order]
    real_top = int(dsum.max()) if len(dsum) else 0
    cells = [tuples[dsum == d] for d in range(real_top + 1)]
    return ConfigComplex(ambient, n, cells, top)


def config_complex(w: int, h: int, n: int, max_dim: int | None = None, cap: int = DEFAULT_CELL_CAP) -> ConfigComplex:
    """Convenience wrapper taking the board size rather than the lattice size."""
    return build_discrete_config(build_rect_complex(w - 1, h - 1), n, max_dim, cap)


# ---------------------------------------------------------------------------
# Simplicial models


class SimplicialComplex:
    """Ordered simplicial complex: each simplex is a strictly ordered vertex tuple.

    Faces delete one vertex and keep the order, so the boundary is the usual
    alternating sum.
    """

    def __init__(self, n_vertices: int, simplices: list[np.ndarray]):
        self.n_vertices = n_vertices
        self.simplices = [np.asarray(s, dtype=np.int64).reshape(-1, k + 1) for k, s in enumerate(simplices)]
        self.index = [{tuple(r): i for i, r in enumerate(s.tolist())} for s in self.simplices]

    @classmethod
    def from_maximal(cls, faces: Sequence[Sequence[int]]) -> SimplicialComplex:
        """Complex generated by the given simplices with vertices in increasing order."""
        from itertools import combinations

        allf: list[set[tuple[int, ...]]] = []
        nv = 0
        for f in faces:
            f = tuple(sorted(f))
            nv = max(nv, max(f) + 1)
            for k in range(1, len(f) + 1):
                while len(allf) < k:
                    allf.append(set())
                allf[k - 1].update(combinations(f, k))
        return cls(nv, [np.array(sorted(s), dtype=np.int64).reshape(-1, k + 1) for k, s in enumerate(allf)])

    @property
    def sizes(self) -> list[int]:
        return [len(s) for s in self.simplices]

    @property
    def dim(self) -> int:
        return len(self.simplices) - 1

    @cached_property
    def boundaries(self) -> dict[int, SparseIntMatrix]:
        out = {}
        for k in range(1, len(self.simplices)):
            S = self.simplices[k]
            idx = self.index[k - 1]
            rows, cols, vals = [], [], []
            lst = S.tolist()
            for j, s in enumerate(lst):
                for i in range(k + 1):
                    rows.append(idx[tuple(s[:i] + s[i + 1 :])])
                    cols.append(j)
                    vals.append(-1 if i % 2 else 1)
            out[k] = SparseIntMatrix((len(self.simplices[k - 1]), len(S)), rows, cols, vals)
        return out

    def chain_complex(self) -> ChainComplex:
        return ChainComplex(self.sizes, dict(self.boundaries))

    def full(self) -> Subcomplex:
        return Subcomplex(self, [np.ones(len(s), dtype=bool) for s in self.simplices])

    def vertex_subcomplex(self, keep: np.ndarray) -> Subcomplex:
        """Full subcomplex on the vertices where ``keep`` is true."""
        keep = np.asarray(keep, dtype=bool)
        return Subcomplex(self, [keep[s].all(axis=1) for s in self.simplices])


class Subcomplex:
    """A subcomplex given by one boolean mask per dimension."""

    def __init__(self, parent: SimplicialComplex, masks: list[np.ndarray]):
        self.parent = parent
        self.masks = [np.asarray(m, dtype=bool) for m in masks]

    @property
    def sizes(self) -> list[int]:
        return [int(m.sum()) for m in self.masks]

    def is_empty(self) -> bool:
        return not any(m.any() for m in self.masks)

    def is_closed(self) -> bool:
        """Check closure under faces."""
        for k, m in self.parent.boundaries.items():
            used = np.zeros(m.shape[0], dtype=bool)
            sel = self.masks[k][m.cols]
            used[m.rows[sel]] = True
            if np.any(used & ~self.masks[k - 1]):
                return False
        return True

    def chain_complex(self) -> ChainComplex:
        sizes = self.sizes
        while len(sizes) > 1 and sizes[-1] == 0:
            sizes = sizes[:-1]
        bd = {
            k: self.parent.boundaries[k].submatrix(self.masks[k - 1], self.masks[k])
            for k in range(1, len(sizes))
        }
        return ChainComplex(sizes, bd)

    def _check_same(self, other: Subcomplex) -> None:
        if other.parent is not self.parent:
            raise ValueError("subcomplexes live in different ambient complexes")

    def __and__(self, other: Subcomplex) -> Subcomplex:
        self._check_same(other)
        return Subcomplex(self.parent, [a & b for a, b in zip(self.masks, other.masks)])

    def __or__(self, other: Subcomplex) -> Subcomplex:
        self._check_same(other)
        return Subcomplex(self.parent, [a | b for a, b in zip(self.masks, other.masks)])

    def __eq__(self, other) -> bool:
        if not isinstance(other, Subcomplex):
            return NotImplemented
        return other.parent is self.parent and all(
            np.array_equal(a, b) for a, b in zip(self.masks, other.masks)
        )

    def components(self) -> int:
        """Number of connected components (union-find on the 1-skeleton)."""
        verts = np.nonzero(self.masks[0])[0]
        if len(verts) == 0:
            return 0
        parent = list(range(self.parent.n_vertices))

        def find(a):
            while parent[a] != a:
                parent[a] = parent[parent[a]]
                a = parent[a]
            return a

        if len(self.masks) > 1:
            for a, b in self.parent.simplices[1][self.masks[1]].tolist():
                ra, rb = find(a), find(b)
                if ra != rb:
                    parent[ra] = rb
        return len({find(int(v)) for v in verts})


def _ordered_set_partitions(items: tuple[int, ...]):
    """All ordered set partitions of ``items`` into nonempty blocks."""
    if not items:
        yield ()
        return
    n = len(items)
    for mask in range(1, 1 << n):
        first = tuple(items[i] for i in range(n) if mask >> i & 1)
        rest = tuple(items[i] for i in range(n) if not mask >> i & 1)
        for tail in _ordered_set_partitions(rest):
            yield (first,) + tail


class OrderedConfigComplex(SimplicialComplex):
    """Kuhn triangulation of ``DF_n``.

    A simplex is a chain ``v_0 < v_1 < ... < v_k`` of lattice points of
    ``Z^{2n}`` where each step raises a nonempty set of coordinates by one;
    its carrier is the cube from ``v_0`` to ``v_k``.  Coordinates are ordered
    ``(x_1, y_1, ..., x_n, y_n)`` and labels run from 1 to n.
    """

    def __init__(self, base: ConfigComplex):
        self.base = base
        n = base.n
        pos = base.vertex_positions()  # (V, n, 2)
        self.coords = pos.reshape(len(pos), 2 * n) if len(pos) else np.zeros((0, 2 * n), dtype=np.int64)
        amb = base.ambient
        vcode = {tuple(r): i for i, r in enumerate(self.coords.tolist())}
        ext = amb.extents
        per_dim: list[list[tuple[int, ...]]] = []
        for k, cells in enumerate(base.cells):
            for parts in cells.tolist():
                lo = []
                free = []
                for i, c in enumerate(parts):
                    x0, x1, y0, y1 = ext[c]
                    lo += [int(x0), int(y0)]
                    if x1 > x0:
                        free.append(2 * i)
                    if y1 > y0:
                        free.append(2 * i + 1)
                for blocks in _ordered_set_partitions(tuple(free)):
                    v = list(lo)
                    chain = [vcode[tuple(v)]]
                    for b in blocks:
                        for c in b:
                            v[c] += 1
                        chain.append(vcode[tuple(v)])
                    d = len(blocks)
                    while len(per_dim) <= d:
                        per_dim.append([])
                    per_dim[d].append(tuple(chain))
        arrays = [np.array(sorted(s), dtype=np.int64).reshape(-1, k + 1) for k, s in enumerate(per_dim)]
        super().__init__(len(self.coords), arrays)

    @property
    def n(self) -> int:
        return self.base.n

    def x(self, label: int) -> np.ndarray:
        return self.coords[:, 2 * (label - 1)]

    def y(self, label: int) -> np.ndarray:
        return self.coords[:, 2 * (label - 1) + 1]

    def region_tags(self, k: int, j: int) -> list[tuple[str, int, int]]:
        """Order relations ``x_a <= x_b`` / ``y_a <= y_b`` holding on all of simplex ``j`` of dim ``k``."""
        verts = self.simplices[k][j]
        tags = []
        for a in range(1, self.n + 1):
            for b in range(1, self.n + 1):
                if a == b:
                    continue
                if np.all(self.x(a)[verts] <= self.x(b)[verts]):
                    tags.append(("x", a, b))
                if np.all(self.y(a)[verts] <= self.y(b)[verts]):
                    tags.append(("y", a, b))
        return tags

    def predicate(self, keep: Callable[[np.ndarray], np.ndarray]) -> Subcomplex:
        """Subcomplex of simplices all of whose vertices satisfy ``keep(coords)``."""
        return self.vertex_subcomplex(keep(self.coords))


def subdivide_order(c: ConfigComplex) -> OrderedConfigComplex:
    if c.max_dim < 2 * c.n and len(c.cells) > c.max_dim:
        raise ValueError("cannot subdivide a truncated complex")
    return OrderedConfigComplex(c)


def _check_labels(n: int, labels: Sequence[int]) -> None:
    if len(set(labels)) != len(labels):
        raise ValueError(f"repeated labels in {tuple(labels)}")
    bad = [l for l in labels if not 1 <= l <= n]
    if bad:
        raise ValueError(f"labels out of range 1..{n}: {bad}")


def rightmost_mask(
    coords: np.ndarray, n: int, pinned: Sequence[int], next_pinned: Sequence[int] = ()
) -> np.ndarray:
    """Vertex predicate for the right-most subspaces.

    ``pinned`` squares have maximal x among all squares and are stacked top
    to bottom in the given order; ``next_pinned`` squares have maximal x
    among the remaining squares and are stacked likewise.  All conditions
    are closed, which is what makes the result a subcomplex.
    """
    x = coords[:, 0::2]
    y = coords[:, 1::2]
    keep = np.ones(len(coords), dtype=bool)
    for tier, others in ((tuple(pinned), range(1, n + 1)), (tuple(next_pinned), [m for m in range(1, n + 1) if m not in pinned])):
        others = list(others)
        for l, i in enumerate(tier):
            for m in others:
                keep &= x[:, m - 1] <= x[:, i - 1]
            if l + 1 < len(tier):
                keep &= y[:, i - 1] >= y[:, tier[l + 1] - 1]
    return keep


def build_rightmost_subcomplex(
    c: OrderedConfigComplex, pinned: Sequence[int], next_pinned: Sequence[int] = ()
) -> Subcomplex:
    """Subcomplex where ``pinned`` (and then ``next_pinned``) are right-most and vertically ordered."""
    _check_labels(c.n, tuple(pinned) + tuple(next_pinned))
    return c.vertex_subcomplex(rightmost_mask(c.coords, c.n, pinned, next_pinned))


def intersect_subcomplexes(a: Subcomplex, b: Subcomplex) -> Subcomplex:
    return a & b


# ---------------------------------------------------------------------------
# Cache format


def save_complex(c: ConfigComplex, path: str | os.PathLike) -> None:
    """Write the complex as (optionally gzipped) JSON, atomically."""
    w, h = c.board
    doc = {
        "format": FORMAT_VERSION,
        "w": w,
        "h": h,
        "n": c.n,
        "subdivided": False,
        "max_dim": c.max_dim,
        "cells": [cells.tolist() for cells in c.cells],
        "boundary": {
            str(k): [[int(r), int(cc), int(v)] for r, cc, v in m.entries()]
            for k, m in c.boundaries.items()
        },
    }
    path = Path(path)
    data = json.dumps(doc, separators=(",", ":"), sort_keys=True).encode()
    if path.suffix == ".gz":
        data = gzip.compress(data, mtime=0)
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_bytes(data)
    os.replace(tmp, path)


def load_complex(path: str | os.PathLike) -> ConfigComplex:
    path = Path(path)
    data = path.read_bytes()
    if path.suffix == ".gz":
        data = gzip.decompress(data)
    doc = json.loads(data)
    if doc.get("format") != FORMAT_VERSION:
        raise ValueError(f"{path}: unsupported format {doc.get('format')}")
    amb = build_rect_complex(doc["w"] - 1, doc["h"] - 1)
    n = doc["n"]
    cells = [np.array(c, dtype=np.int64).reshape(-1, n) for c in doc["cells"]]
    out = ConfigComplex(amb, n, cells, doc["max_dim"])
    bd = {}
    for k, trip in doc["boundary"].items():
        k = int(k)
        t = np.array(trip, dtype=np.int64).reshape(-1, 3)
        bd[k] = SparseIntMatrix((len(cells[k - 1]), len(cells[k])), t[:, 0], t[:, 1], t[:, 2])
    out.__dict__["boundaries"] = bd
    return out
