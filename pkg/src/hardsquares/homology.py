"""Exact homology of finite chain complexes.

The pipeline for a chain complex is:

1. assert that consecutive boundaries compose to zero;
2. shrink the complex with elementary reductions (pairs joined by a unit
   incidence where one cell has no other live face, or the other has no other
   live coface).  Both moves leave the remaining boundary maps as plain
   restrictions, so they are exact over any coefficient ring;
3. run sparse elimination on what is left: Smith normal form over the
   integers (unit pivots first, dense clean-up of the remainder) or ranks
   over a prime field.
"""
from __future__ import annotations

import heapq
import logging
import math
import random
from dataclasses import dataclass, field
from typing import Iterable, Union

import numpy as np
from numba import njit

log = logging.getLogger(__name__)

# Large primes for modular ranks; products of two residues fit in int64 only
# for the first few, but residual elimination runs on Python ints anyway.
PRIMES = (2147483647, 2147483629, 2147483587, 1000000007, 998244353, 1000000009)

Coefficients = Union[str, int]


class ChainComplexError(ValueError):
    """Raised when a boundary operator does not square to zero."""


class SparseIntMatrix:
    """Integer matrix stored as coalesced coordinate triples.

    Values are int64 when every entry fits, otherwise Python ints in an
    object array.  Duplicate coordinates are summed and zeros dropped.
    """

    def __init__(self, shape: tuple[int, int], rows=(), cols=(), vals=()):
        self.shape = (int(shape[0]), int(shape[1]))
        rows = np.asarray(rows, dtype=np.int64).reshape(-1)
        cols = np.asarray(cols, dtype=np.int64).reshape(-1)
        vals = _as_values(vals)
        if not (len(rows) == len(cols) == len(vals)):
            raise ValueError("row, column and value arrays differ in length")
        if len(rows):
            if rows.min() < 0 or rows.max() >= self.shape[0]:
                raise ValueError("row index out of range")
            if cols.min() < 0 or cols.max() >= self.shape[1]:
                raise ValueError("column index out of range")
            key = rows * max(self.shape[1], 1) + cols
            order = np.argsort(key, kind="stable")
            key, rows, cols, vals = key[order], rows[order], cols[order], vals[order]
            if len(key) > 1 and np.any(key[1:] == key[:-1]):
                uniq, start = np.unique(key, return_index=True)
                vals = np.add.reduceat(vals, start)
                rows, cols = rows[start], cols[start]
            keep = vals != 0
            rows, cols, vals = rows[keep], cols[keep], vals[keep]
        self.rows, self.cols, self.vals = rows, cols, vals

    @classmethod
    def from_dense(cls, a) -> SparseIntMatrix:
        a = np.asarray(a, dtype=object)
        if a.ndim != 2:
            a = a.reshape(len(a), -1)
        r, c = np.nonzero(a != 0)
        return cls(a.shape, r, c, [int(v) for v in a[r, c]])

    @classmethod
    def from_dict(cls, shape, entries: dict[tuple[int, int], int]) -> SparseIntMatrix:
        items = list(entries.items())
        return cls(shape, [k[0] for k, _ in items], [k[1] for k, _ in items], [v for _, v in items])

    @property
    def nnz(self) -> int:
        return len(self.vals)

    def entries(self) -> Iterable[tuple[int, int, int]]:
        return zip(self.rows.tolist(), self.cols.tolist(), [int(v) for v in self.vals])

    def to_dict(self) -> dict[tuple[int, int], int]:
        return {(r, c): v for r, c, v in self.entries()}

    def to_dense(self) -> np.ndarray:
        a = np.zeros(self.shape, dtype=object)
        for r, c, v in self.entries():
            a[r, c] = v
        return a

    def transpose(self) -> SparseIntMatrix:
        return SparseIntMatrix(self.shape[::-1], self.cols, self.rows, self.vals)

    def submatrix(self, row_mask: np.ndarray, col_mask: np.ndarray) -> SparseIntMatrix:
        """Restrict to the selected rows and columns, renumbering both."""
        rnew = np.cumsum(row_mask) - 1
        cnew = np.cumsum(col_mask) - 1
        keep = row_mask[self.rows] & col_mask[self.cols]
        return SparseIntMatrix(
            (int(row_mask.sum()), int(col_mask.sum())),
            rnew[self.rows[keep]],
            cnew[self.cols[keep]],
            self.vals[keep],
        )

    def matmul(self, other: SparseIntMatrix) -> SparseIntMatrix:
        if self.shape[1] != other.shape[0]:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        if self.vals.dtype != object and other.vals.dtype != object:
            from scipy import sparse

            a = sparse.csr_matrix((self.vals, (self.rows, self.cols)), shape=self.shape)
            b = sparse.csr_matrix((other.vals, (other.rows, other.cols)), shape=other.shape)
            p = (a @ b).tocoo()
            return SparseIntMatrix(p.shape, p.row, p.col, p.data)
        by_row: dict[int, list[tuple[int, int]]] = {}
        for r, c, v in other.entries():
            by_row.setdefault(r, []).append((c, v))
        out: dict[tuple[int, int], int] = {}
        for r, k, v in self.entries():
            for c, w in by_row.get(k, ()):
                out[(r, c)] = out.get((r, c), 0) + v * w
        return SparseIntMatrix.from_dict((self.shape[0], other.shape[1]), out)

    def __eq__(self, other) -> bool:
        if not isinstance(other, SparseIntMatrix):
            return NotImplemented
        return self.shape == other.shape and self.to_dict() == other.to_dict()

    def __repr__(self) -> str:
        return f"SparseIntMatrix(shape={self.shape}, nnz={self.nnz})"


def _as_values(vals) -> np.ndarray:
    if isinstance(vals, np.ndarray) and vals.dtype != object:
        return vals.astype(np.int64).reshape(-1)
    seq = [int(v) for v in (vals.tolist() if isinstance(vals, np.ndarray) else vals)]
    if all(-(2**62) < v < 2**62 for v in seq):
        return np.array(seq, dtype=np.int64)
    out = np.empty(len(seq), dtype=object)
    out[:] = seq
    return out


@dataclass
class ChainComplex:
    """Finite chain complex of free modules with a chosen basis.

    ``sizes[k]`` is the rank of ``C_k`` and ``boundaries[k]`` the matrix of
    ``C_k -> C_{k-1}`` (missing degrees are zero maps).
    """

    sizes: list[int]
    boundaries: dict[int, SparseIntMatrix] = field(default_factory=dict)

    def __post_init__(self):
        for k, m in self.boundaries.items():
            want = (self.size(k - 1), self.size(k))
            if m.shape != want:
                raise ValueError(f"boundary in degree {k} has shape {m.shape}, expected {want}")

    @property
    def top(self) -> int:
        return len(self.sizes) - 1

    def size(self, k: int) -> int:
        return self.sizes[k] if 0 <= k < len(self.sizes) else 0

    def boundary(self, k: int) -> SparseIntMatrix:
        if k in self.boundaries:
            return self.boundaries[k]
        return SparseIntMatrix((self.size(k - 1), self.size(k)))

    def euler_characteristic(self) -> int:
        return sum((-1) ** k * s for k, s in enumerate(self.sizes))

    def truncate(self, top: int) -> ChainComplex:
        """The subcomplex of cells of dimension at most ``top``."""
        sizes = self.sizes[: top + 1]
        return ChainComplex(sizes, {k: m for k, m in self.boundaries.items() if k <= top})

    def check_boundary_squares_to_zero(self) -> None:
        for k in range(2, self.top + 1):
            if self.size(k) == 0 or self.size(k - 2) == 0:
                continue
            prod = self.boundary(k - 1).matmul(self.boundary(k))
            if prod.nnz:
                raise ChainComplexError(f"boundary does not square to zero in degree {k}")


@dataclass(frozen=True)
class HomologySummary:
    degree: int
    betti: int
    torsion: tuple[int, ...] = ()
    betti_only: bool = False


# ---------------------------------------------------------------------------
# Elementary reductions


@njit(cache=True)
def _reduce_kernel(n_cells, f_ptr, f_idx, f_val, c_ptr, c_idx, c_val):
    alive = np.ones(n_cells, dtype=np.bool_)
    nface = np.empty(n_cells, dtype=np.int64)
    ncof = np.empty(n_cells, dtype=np.int64)
    for i in range(n_cells):
        nface[i] = f_ptr[i + 1] - f_ptr[i]
        ncof[i] = c_ptr[i + 1] - c_ptr[i]
    # FIFO queue; every push is caused by an incidence of a removed cell, so
    # the total number of pushes is bounded and the buffer never wraps
    cap = 2 * n_cells + 4 * len(f_idx) + 16
    queue = np.empty(cap, dtype=np.int64)
    head = 0
    tail = 0
    if n_cells > 1:
        queue[tail] = 1  # first vertex: it pairs with the augmentation cell
        tail += 1
    while True:
        while head < tail:
            c = queue[head]
            head += 1
            if not alive[c]:
                continue
            a = -1
            b = -1
            if nface[c] == 1:
                for t in range(f_ptr[c], f_ptr[c + 1]):
                    if alive[f_idx[t]]:
                        if f_val[t] == 1 or f_val[t] == -1:
                            a = f_idx[t]
                            b = c
                        break
            if a < 0 and ncof[c] == 1:
                for t in range(c_ptr[c], c_ptr[c + 1]):
                    if alive[c_idx[t]]:
                        if c_val[t] == 1 or c_val[t] == -1:
                            a = c
                            b = c_idx[t]
                        break
            if a < 0:
                continue
            alive[a] = False
            alive[b] = False
            for x in (a, b):
                for t in range(c_ptr[x], c_ptr[x + 1]):
                    y = c_idx[t]
                    if alive[y]:
                        nface[y] -= 1
                        if tail < cap:
                            queue[tail] = y
                            tail += 1
                for t in range(f_ptr[x], f_ptr[x + 1]):
                    y = f_idx[t]
                    if alive[y]:
                        ncof[y] -= 1
                        if tail < cap:
                            queue[tail] = y
                            tail += 1
        # restart from any cell that is still reducible
        head = 0
        tail = 0
        for i in range(n_cells):
            if alive[i] and (nface[i] == 1 or ncof[i] == 1):
                queue[tail] = i
                tail += 1
                if tail == n_cells:
                    break
        if tail == 0:
            break
        # guard against cells reducible only through non-unit entries
        progress = False
        for q in range(tail):
            i = queue[q]
            if nface[i] == 1:
                for t in range(f_ptr[i], f_ptr[i + 1]):
                    if alive[f_idx[t]]:
                        if f_val[t] == 1 or f_val[t] == -1:
                            progress = True
                        break
            if not progress and ncof[i] == 1:
                for t in range(c_ptr[i], c_ptr[i + 1]):
                    if alive[c_idx[t]]:
                        if c_val[t] == 1 or c_val[t] == -1:
                            progress = True
                        break
            if progress:
                break
        if not progress:
            break
    return alive


def _csr(n, src, dst, val):
    order = np.argsort(src, kind="stable")
    ptr = np.zeros(n + 1, dtype=np.int64)
    np.add.at(ptr, src + 1, 1)
    return np.cumsum(ptr), dst[order].astype(np.int64), val[order].astype(np.int64)


def reduce_complex(cc: ChainComplex) -> tuple[ChainComplex, bool]:
    """Shrink the augmented complex by elementary reductions.

    Returns the reduced complex in degrees ``-1..top`` shifted up by one
    (index 0 holds the augmentation cell if it survived) and a flag telling
    whether the input was nonempty.  The homology of the returned complex is
    the reduced homology of ``cc``.
    """
    sizes = [1 if sum(cc.sizes) else 0] + list(cc.sizes)
    offsets = np.concatenate([[0], np.cumsum(sizes)]).astype(np.int64)
    n_cells = int(offsets[-1])
    rows, cols, vals = [], [], []
    if sizes[0] and sizes[1]:
        rows.append(np.zeros(sizes[1], dtype=np.int64))
        cols.append(offsets[1] + np.arange(sizes[1], dtype=np.int64))
        vals.append(np.ones(sizes[1], dtype=np.int64))
    for k in range(1, cc.top + 1):
        m = cc.boundary(k)
        if m.nnz == 0:
            continue
        if m.vals.dtype == object:
            # reductions only fire on unit entries; large ones just block them
            v = np.array([x if abs(x) < 2**62 else 2 for x in m.vals], dtype=np.int64)
        else:
            v = m.vals
        rows.append(offsets[k] + m.rows)
        cols.append(offsets[k + 1] + m.cols)
        vals.append(v)
    if rows:
        r, c, v = np.concatenate(rows), np.concatenate(cols), np.concatenate(vals)
    else:
        r = c = v = np.zeros(0, dtype=np.int64)
    f_ptr, f_idx, f_val = _csr(n_cells, c, r, v)
    c_ptr, c_idx, c_val = _csr(n_cells, r, c, v)
    alive = _reduce_kernel(n_cells, f_ptr, f_idx, f_val, c_ptr, c_idx, c_val)
    masks = [alive[offsets[k] : offsets[k + 1]] for k in range(len(sizes))]
    new_sizes = [int(m.sum()) for m in masks]
    bd = {}
    if new_sizes[0] and new_sizes[1]:
        bd[1] = SparseIntMatrix((1, new_sizes[1]), np.zeros(new_sizes[1]), np.arange(new_sizes[1]), np.ones(new_sizes[1], dtype=np.int64))
    for k in range(1, cc.top + 1):
        bd[k + 1] = cc.boundary(k).submatrix(masks[k], masks[k + 1])
    return ChainComplex(new_sizes, bd), bool(sizes[0])


# ---------------------------------------------------------------------------
# Sparse elimination


class _SparseRows:
    """Row-major sparse matrix with column occupancy, used for elimination."""

    def __init__(self, m: SparseIntMatrix, modulus: int | None):
        self.p = modulus
        self.rows: dict[int, dict[int, int]] = {}
        self.cols: dict[int, set[int]] = {}
        for r, c, v in m.entries():
            if modulus:
                v %= modulus
                if v == 0:
                    continue
            self.rows.setdefault(r, {})[c] = v
            self.cols.setdefault(c, set()).add(r)

    def drop(self, r: int, c: int) -> None:
        for cc in self.rows.pop(r):
            s = self.cols[cc]
            s.discard(r)
            if not s:
                del self.cols[cc]
        for rr in list(self.cols.pop(c, ())):
            del self.rows[rr][c]

    def axpy(self, dst: int, src: int, f: int) -> None:
        """row[dst] -= f * row[src]."""
        p = self.p
        drow = self.rows[dst]
        for c, v in self.rows[src].items():
            nv = drow.get(c, 0) - f * v
            if p:
                nv %= p
            if nv:
                if c not in drow:
                    self.cols.setdefault(c, set()).add(dst)
                drow[c] = nv
            elif c in drow:
                del drow[c]
                s = self.cols[c]
                s.discard(dst)
                if not s:
                    del self.cols[c]


def _eliminate(sr: _SparseRows, unit_only: bool) -> int:
    """Pivot until no admissible pivot remains; returns the number of pivots.

    Columns are visited sparsest first (a lazily refreshed heap) and the
    pivot row is the shortest admissible one, a cheap Markowitz heuristic.
    With ``unit_only`` only entries of absolute value one are used.
    """
    count = 0
    p = sr.p
    while True:
        heap = [(len(rs), c) for c, rs in sr.cols.items()]
        heapq.heapify(heap)
        progressed = False
        while heap:
            k, c = heapq.heappop(heap)
            rs = sr.cols.get(c)
            if rs is None:
                continue
            if len(rs) > k:
                heapq.heappush(heap, (len(rs), c))
                continue
            cand = [r for r in rs if not unit_only or abs(sr.rows[r][c]) == 1]
            if not cand:
                continue
            r = min(cand, key=lambda x: len(sr.rows[x]))
            pv = sr.rows[r][c]
            inv = pow(pv, -1, p) if p else pv
            for rr in list(rs):
                if rr == r:
                    continue
                f = sr.rows[rr][c] * inv
                if p:
                    f %= p
                sr.axpy(rr, r, f)
            sr.drop(r, c)
            count += 1
            progressed = True
        if not (unit_only and progressed and sr.cols):
            return count


def rank_mod_p(m: SparseIntMatrix, p: int) -> int:
    """Rank of ``m`` over the prime field of order ``p``."""
    if m.nnz == 0:
        return 0
    return _eliminate(_SparseRows(m, p), unit_only=False)


def _dense_snf_diagonal(a: list[list[int]]) -> list[int]:
    """Nonzero diagonal of the Smith form of a small dense integer matrix."""
    a = [row[:] for row in a]
    nr = len(a)
    nc = len(a[0]) if nr else 0
    diag = []
    t = 0
    while t < min(nr, nc):
        entries = [(abs(a[i][j]), i, j) for i in range(t, nr) for j in range(t, nc) if a[i][j]]
        if not entries:
            break
        _, i, j = min(entries)
        a[t], a[i] = a[i], a[t]
        for row in a:
            row[t], row[j] = row[j], row[t]
        while True:
            piv = a[t][t]
            done = True
            for i in range(t + 1, nr):
                if a[i][t]:
                    q = a[i][t] // piv
                    a[i] = [x - q * y for x, y in zip(a[i], a[t])]
                    if a[i][t]:
                        done = False
            for j in range(t + 1, nc):
                if a[t][j]:
                    q = a[t][j] // piv
                    for row in a:
                        row[j] -= q * row[t]
                    if a[t][j]:
                        done = False
            if not done:
                entries = [(abs(a[i][t]), i, t) for i in range(t, nr) if a[i][t]]
                entries += [(abs(a[t][j]), t, j) for j in range(t, nc) if a[t][j]]
                _, i, j = min(entries)
                a[t], a[i] = a[i], a[t]
                for row in a:
                    row[t], row[j] = row[j], row[t]
                continue
            bad = next(
                (i for i in range(t + 1, nr) for j in range(t + 1, nc) if a[i][j] % piv), None
            )
            if bad is None:
                break
            a[t] = [x + y for x, y in zip(a[t], a[bad])]
        diag.append(abs(a[t][t]))
        t += 1
    # enforce divisibility d_1 | d_2 | ... through gcd/lcm exchanges
    for i in range(len(diag)):
        for j in range(i + 1, len(diag)):
            g = math.gcd(diag[i], diag[j])
            l = diag[i] * diag[j] // g
            diag[i], diag[j] = g, l
    return diag


def smith_normal_form(m: SparseIntMatrix, dense_limit: int = 4000) -> tuple[list[int], int]:
    """Invariant factors and rank of an integer matrix.

    Unit pivots are eliminated sparsely with a fill-minimising choice; the
    block left when no unit entry remains is finished densely.  Raises
    ``MemoryError`` when that block exceeds ``dense_limit`` in either
    dimension.
    """
    if m.nnz == 0:
        return [], 0
    sr = _SparseRows(m, None)
    ones = _eliminate(sr, unit_only=True)
    if not sr.cols:
        return [1] * ones, ones
    rows = sorted(sr.rows)
    cols = sorted(sr.cols)
    if len(rows) > dense_limit or len(cols) > dense_limit:
        raise MemoryError(f"dense Smith block {len(rows)}x{len(cols)} exceeds limit")
    cidx = {c: j for j, c in enumerate(cols)}
    dense = [[0] * len(cols) for _ in rows]
    for i, r in enumerate(rows):
        for c, v in sr.rows[r].items():
            dense[i][cidx[c]] = v
    diag = _dense_snf_diagonal(dense)
    factors = [1] * ones + diag
    return factors, len(factors)


# ---------------------------------------------------------------------------
# Betti numbers


def _pick_primes(k: int, seed: int | None = None) -> list[int]:
    rng = random.Random(seed)
    return rng.sample(PRIMES, k)


def betti_numbers(
    cc: ChainComplex,
    coefficients: Coefficients = "integers",
    max_degree: int | None = None,
    torsion_threshold: int = 4000,
    check: bool = True,
) -> list[HomologySummary]:
    """Homology of ``cc`` in degrees ``0..max_degree``.

    ``coefficients`` is ``"integers"``, ``"rationals"`` or a prime.  Over the
    integers torsion is reported when the residual matrices are small enough
    for exact Smith form; otherwise the summary is flagged ``betti_only`` and
    ranks come from two primes (a third breaks any disagreement).
    """
    if max_degree is None:
        max_degree = cc.top
    if max_degree < 0:
        return []
    if check:
        cc.check_boundary_squares_to_zero()
    # keeping cells above max_degree+1 is harmless and lets the reductions
    # pair off far more of the complex
    red, nonempty = reduce_complex(cc)
    # red is indexed by degree+1; compute ranks of its boundary maps
    prime = coefficients if isinstance(coefficients, int) else None
    if prime is not None and prime < 2:
        raise ValueError(f"bad prime {prime}")
    ranks: dict[int, int] = {}
    torsion: dict[int, tuple[int, ...]] = {}
    flagged: set[int] = set()
    for j in range(1, red.top + 1):
        m = red.boundary(j)
        deg = j - 1  # the map C_deg -> C_{deg-1} of the original complex
        if m.nnz == 0:
            ranks[deg] = 0
            continue
        if prime is not None:
            ranks[deg] = rank_mod_p(m, prime)
            continue
        try:
            factors, r = smith_normal_form(m, dense_limit=torsion_threshold)
            ranks[deg] = r
            torsion[deg] = tuple(f for f in factors if f > 1)
        except MemoryError:
            ranks[deg] = _rational_rank(m)
            flagged.add(deg)
            flagged.add(deg - 1)
    out = []
    for k in range(max_degree + 1):
        j = k + 1
        b = red.size(j) - ranks.get(k, 0) - ranks.get(k + 1, 0)
        if k == 0 and nonempty:
            b += 1
        tors = torsion.get(k + 1, ()) if coefficients == "integers" else ()
        out.append(
            HomologySummary(
                k, int(b), tors, betti_only=(coefficients == "integers" and k in flagged)
            )
        )
    return out


def _rational_rank(m: SparseIntMatrix) -> int:
    a, b = _pick_primes(2)
    ra, rb = rank_mod_p(m, a), rank_mod_p(m, b)
    if ra != rb:
        c = next(p for p in PRIMES if p not in (a, b))
        log.warning("modular ranks disagree (%d vs %d); consulting a third prime", ra, rb)
        return max(ra, rb, rank_mod_p(m, c))
    return ra


def betti_vector(cc: ChainComplex, coefficients: Coefficients = "rationals", max_degree=None) -> list[int]:
    return [h.betti for h in betti_numbers(cc, coefficients, max_degree)]


def solve_mod_p(m: SparseIntMatrix, b: dict[int, int], p: int) -> dict[int, int] | None:
    """A solution ``y`` of ``m y = b`` over GF(p), or ``None`` if inconsistent.

    ``b`` and the result are sparse vectors given as ``{index: value}``.
    """
    rows: dict[int, dict[int, int]] = {}
    for r, c, v in m.entries():
        v %= p
        if v:
            rows.setdefault(r, {})[c] = v
    rhs = {r: v % p for r, v in b.items() if v % p}
    for r in rhs:
        rows.setdefault(r, {})
    pivots: list[tuple[int, int]] = []  # (row, column) in elimination order
    col_rows: dict[int, set[int]] = {}
    for r, row in rows.items():
        for c in row:
            col_rows.setdefault(c, set()).add(r)
    done: set[int] = set()
    for c in sorted(col_rows, key=lambda c: len(col_rows[c])):
        cand = [r for r in col_rows[c] if r not in done and rows[r].get(c)]
        if not cand:
            continue
        r = min(cand, key=lambda x: len(rows[x]))
        inv = pow(rows[r][c], -1, p)
        prow = rows[r]
        for rr in list(col_rows[c]):
            if rr == r:
                continue
            f = rows[rr].get(c, 0) * inv % p
            if not f:
                continue
            target = rows[rr]
            for cc, v in prow.items():
                nv = (target.get(cc, 0) - f * v) % p
                if nv:
                    if cc not in target:
                        col_rows.setdefault(cc, set()).add(rr)
                    target[cc] = nv
                elif cc in target:
                    del target[cc]
                    col_rows[cc].discard(rr)
            nb = (rhs.get(rr, 0) - f * rhs.get(r, 0)) % p
            if nb:
                rhs[rr] = nb
            else:
                rhs.pop(rr, None)
        done.add(r)
        pivots.append((r, c))
    for r, row in rows.items():
        if r not in done and rhs.get(r):
            return None
    # every pivot column has been cleared from all other rows, so each pivot
    # row reads  pivot * y_c + (free columns) = rhs; set free variables to 0
    y = {}
    for r, c in pivots:
        v = rhs.get(r, 0) * pow(rows[r][c], -1, p) % p
        if v:
            y[c] = v
    return y
