"""The augmented Mayer-Vietoris spectral sequence of a cover by subcomplexes.

The double complex has ``C_{p,q} = sum over p-simplices s of the nerve of
C_q(U_s)`` together with the augmentation column ``C_{-1,q} = C_q(X)``.  The
horizontal map is ``d = sum_j (-1)^j d_j`` (inclusion into the face that
drops the j-th piece) and the total differential is ``D = d + (-1)^p del``.
Filtering by ``p`` gives the spectral sequence.

Pages are computed from the persistence pairing of the filtered total
complex: a pair born in column ``a`` and killed in column ``b`` contributes
to every page ``r <= b - a`` at both ends and is the image of ``d^{b-a}``.
An independent computation from explicit subspaces ``Z^r`` and ``B^r`` is
kept for small complexes and used as a cross-check.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from itertools import combinations
from typing import Sequence

import numpy as np

from .config import OrderedConfigComplex, Subcomplex, build_rightmost_subcomplex
from .homology import SparseIntMatrix, betti_numbers, solve_mod_p

# a 31-bit prime keeps products of residues inside int64; ranks agree with
# the rational ones unless the prime divides a relevant minor
DEFAULT_PRIME = 2147483629
SECOND_PRIME = 2147483587


@dataclass
class Cover:
    """A space ``X`` (a subcomplex) and pieces ``U_i`` covering it."""

    space: Subcomplex
    pieces: list[Subcomplex]
    names: list[str] = field(default_factory=list)

    def __post_init__(self):
        if not self.names:
            self.names = [str(i) for i in range(len(self.pieces))]
        if len(self.names) != len(self.pieces):
            raise ValueError("one name per piece")
        for name, u in zip(self.names, self.pieces):
            if u.parent is not self.space.parent:
                raise ValueError(f"piece {name} lives in a different complex")
            if not u.is_closed():
                raise ValueError(f"piece {name} is not a subcomplex")
            if any(np.any(a & ~b) for a, b in zip(u.masks, self.space.masks)):
                raise ValueError(f"piece {name} is not contained in the space")

    def covers(self) -> bool:
        """Whether every simplex of the space lies in some piece."""
        for k, m in enumerate(self.space.masks):
            union = np.zeros_like(m)
            for u in self.pieces:
                union |= u.masks[k]
            if np.any(m & ~union):
                return False
        return True

    def intersection(self, sigma: Sequence[int]) -> Subcomplex:
        out = self.pieces[sigma[0]]
        for i in sigma[1:]:
            out = out & self.pieces[i]
        return out

    def nerve(self) -> list[list[tuple[int, ...]]]:
        """Simplices of the nerve by dimension: piece sets with nonempty intersection."""
        out: list[list[tuple[int, ...]]] = []
        current = [(i,) for i, u in enumerate(self.pieces) if not u.is_empty()]
        while current:
            out.append(current)
            nxt = []
            for s in current:
                for j in range(s[-1] + 1, len(self.pieces)):
                    if not self.intersection(s + (j,)).is_empty():
                        nxt.append(s + (j,))
            current = nxt
        return out


def rightmost_cover(c: OrderedConfigComplex, pinned: Sequence[int] = ()) -> Cover:
    """Cover of the pinned right-most subcomplex by the pieces where a free label ``j`` comes next."""
    pinned = tuple(pinned)
    space = build_rightmost_subcomplex(c, pinned)
    free = [j for j in range(1, c.n + 1) if j not in pinned]
    pieces = [build_rightmost_subcomplex(c, pinned, (j,)) for j in free]
    cov = Cover(space, pieces, [str(j) for j in free])
    if not cov.covers():
        raise AssertionError("right-most pieces do not cover the pinned subcomplex")
    return cov


@dataclass(frozen=True)
class Block:
    p: int
    sigma: tuple[int, ...]  # () for the augmentation column
    q: int
    offset: int
    simplices: np.ndarray  # parent indices of the simplices in this block


class DoubleComplex:
    """Total complex of the augmented double complex with its column filtration.

    Basis elements are ordered by ``(p, q, sigma, simplex)``; ``D`` is the
    total differential as a square sparse matrix in that basis.
    """

    def __init__(self, cover: Cover):
        self.cover = cover
        nerve = cover.nerve()
        self.nerve = nerve
        parent = cover.space.parent
        masks: dict[tuple[int, ...], Subcomplex] = {(): cover.space}
        for simplices in nerve:
            for s in simplices:
                masks[s] = cover.intersection(s)
        top_q = len(parent.simplices) - 1
        blocks = []
        offset = 0
        for p in range(-1, len(nerve)):
            sigmas = [()] if p == -1 else nerve[p]
            for q in range(top_q + 1):
                for s in sigmas:
                    idx = np.nonzero(masks[s].masks[q])[0]
                    if len(idx):
                        blocks.append(Block(p, s, q, offset, idx))
                        offset += len(idx)
        self.blocks = blocks
        self.size = offset
        self.filtration = np.zeros(offset, dtype=np.int64)
        self.qdeg = np.zeros(offset, dtype=np.int64)
        for b in blocks:
            self.filtration[b.offset : b.offset + len(b.simplices)] = b.p
            self.qdeg[b.offset : b.offset + len(b.simplices)] = b.q
        self.degree = self.filtration + self.qdeg
        self._lookup = {(b.sigma, b.q): b for b in blocks}
        self.D = self._assemble(parent)

    def block(self, sigma: tuple[int, ...], q: int) -> Block | None:
        return self._lookup.get((tuple(sigma), q))

    def _positions(self, b: Block, parent_idx: np.ndarray) -> np.ndarray:
        pos = np.searchsorted(b.simplices, parent_idx)
        pos = np.minimum(pos, len(b.simplices) - 1)
        if not np.array_equal(b.simplices[pos], parent_idx):
            raise ValueError("face map leaves the target block")
        return b.offset + pos

    def _assemble(self, parent) -> SparseIntMatrix:
        rows, cols, vals = [], [], []
        for b in self.blocks:
            local = np.arange(len(b.simplices))
            # vertical part (-1)^p del
            if b.q >= 1:
                m = parent.boundaries[b.q]
                sel = np.isin(m.cols, b.simplices)
                if sel.any():
                    target = self.block(b.sigma, b.q - 1)
                    r = self._positions(target, m.rows[sel])
                    c = b.offset + np.searchsorted(b.simplices, m.cols[sel])
                    sign = -1 if b.p % 2 else 1
                    rows.append(r)
                    cols.append(c)
                    vals.append(sign * m.vals[sel].astype(np.int64))
            # horizontal part: inclusions into the faces of sigma
            if b.p == 0:
                faces = [((), 1)]
            elif b.p > 0:
                faces = [(b.sigma[:j] + b.sigma[j + 1 :], (-1) ** j) for j in range(b.p + 1)]
            else:
                faces = []
            for tau, sign in faces:
                target = self.block(tau, b.q)
                rows.append(self._positions(target, b.simplices))
                cols.append(b.offset + local)
                vals.append(np.full(len(local), sign, dtype=np.int64))
        cat = lambda xs: np.concatenate(xs) if xs else np.zeros(0, dtype=np.int64)
        return SparseIntMatrix((self.size, self.size), cat(rows), cat(cols), cat(vals))

    def bidegree(self, i: int) -> tuple[int, int]:
        return int(self.filtration[i]), int(self.qdeg[i])

    def square_defects(self) -> list[tuple[int, int]]:
        """Bidegrees of basis elements ``x`` with ``D(D(x)) != 0`` (source side)."""
        sq = self.D.matmul(self.D)
        cols = sorted(set(sq.cols.tolist()))
        return sorted({self.bidegree(c) for c in cols})

    def with_flipped_sign(self, entry: int) -> DoubleComplex:
        """Copy with the sign of one nonzero entry of ``D`` negated (negative control)."""
        out = object.__new__(DoubleComplex)
        out.__dict__.update(self.__dict__)
        vals = self.D.vals.copy()
        vals[entry] = -vals[entry]
        out.D = SparseIntMatrix(self.D.shape, self.D.rows, self.D.cols, vals)
        return out

    def horizontal_entries(self) -> np.ndarray:
        """Indices of the nonzero entries of ``D`` that belong to ``d``."""
        return np.nonzero(self.filtration[self.D.rows] != self.filtration[self.D.cols])[0]


# ---------------------------------------------------------------------------
# Pages from the persistence pairing


def _reduce_columns(dc: DoubleComplex, prime: int, clearing: bool) -> tuple[dict[int, int], np.ndarray]:
    """Standard column reduction of ``D`` mod ``prime``.

    Returns ``pairs`` (death column -> birth row) and the boolean array of
    columns whose reduced column is zero.
    """
    n = dc.size
    columns: list[dict[int, int]] = [dict() for _ in range(n)]
    for r, c, v in zip(dc.D.rows.tolist(), dc.D.cols.tolist(), dc.D.vals.tolist()):
        v %= prime
        if v:
            columns[c][r] = v
    pivot_of: dict[int, int] = {}  # low row -> column
    pairs: dict[int, int] = {}
    zero = np.zeros(n, dtype=bool)
    cleared = np.zeros(n, dtype=bool)
    order = np.lexsort((np.arange(n), -dc.degree)) if clearing else np.arange(n)
    for j in order.tolist():
        col = columns[j]
        if cleared[j]:
            col.clear()
        while col:
            low = max(col)
            k = pivot_of.get(low)
            if k is None:
                break
            other = columns[k]
            f = col[low] * pow(other[low], -1, prime) % prime
            for r, v in other.items():
                nv = (col.get(r, 0) - f * v) % prime
                if nv:
                    col[r] = nv
                else:
                    col.pop(r, None)
        if col:
            low = max(col)
            pivot_of[low] = j
            pairs[j] = low
            if clearing:
                cleared[low] = True
        else:
            zero[j] = True
        columns[j] = col
    return pairs, zero


@dataclass
class SpectralPages:
    """Page ranks of the column-filtration spectral sequence.

    ``essential`` counts unpaired basis elements by ``(p, q)``; ``pairs``
    lists ``(birth p, birth q, death p, death q)`` for every persistence pair.
    """

    essential: dict[tuple[int, int], int]
    pairs: list[tuple[int, int, int, int]]
    max_page: int
    prime: int
    defects: list[tuple[int, int]] = field(default_factory=list)

    def rank(self, r: int, p: int, q: int) -> int:
        """Rank of ``E^r_{p,q}``."""
        out = self.essential.get((p, q), 0)
        for bp, bq, dp, dq in self.pairs:
            if dp - bp >= r:
                if (bp, bq) == (p, q):
                    out += 1
                if (dp, dq) == (p, q):
                    out += 1
        return out

    def page(self, r: int) -> dict[tuple[int, int], int]:
        out: dict[tuple[int, int], int] = {}
        for (p, q), c in self.essential.items():
            out[(p, q)] = out.get((p, q), 0) + c
        for bp, bq, dp, dq in self.pairs:
            if dp - bp >= r:
                out[(bp, bq)] = out.get((bp, bq), 0) + 1
                out[(dp, dq)] = out.get((dp, dq), 0) + 1
        return {k: v for k, v in sorted(out.items()) if v}

    def differential_rank(self, r: int, p: int, q: int) -> int:
        """Rank of ``d^r : E^r_{p,q} -> E^r_{p-r,q+r-1}``."""
        return sum(1 for bp, bq, dp, dq in self.pairs if (dp, dq) == (p, q) and dp - bp == r)

    @property
    def stable_page(self) -> int:
        """First page after which nothing changes."""
        return max((dp - bp for bp, _, dp, _ in self.pairs), default=0) + 1

    def to_json(self) -> str:
        pages = {
            str(r): {f"{p},{q}": c for (p, q), c in self.page(r).items()}
            for r in range(self.max_page + 1)
        }
        report = check_collapse(self)
        return json.dumps(
            {
                "prime": self.prime,
                "pages": pages,
                "collapse": {"passed": report.passed, "bidegree": report.bidegree, "page": report.page},
            },
            indent=2,
            sort_keys=True,
        )


def compute_pages(dc: DoubleComplex, max_page: int | None = None, prime: int = DEFAULT_PRIME) -> SpectralPages:
    """Pages ``E^0 .. E^max_page`` (ranks over GF(prime), matching the rational ones).

    When ``D`` does not square to zero the reduction still runs, without the
    clearing shortcut, and the defects are recorded for :func:`check_collapse`.
    """
    defects = dc.square_defects()
    pairs, zero = _reduce_columns(dc, prime, clearing=not defects)
    births = set(pairs.values())
    essential: dict[tuple[int, int], int] = {}
    for i in np.nonzero(zero)[0].tolist():
        if i not in births:
            key = dc.bidegree(i)
            essential[key] = essential.get(key, 0) + 1
    plist = [dc.bidegree(b) + dc.bidegree(d) for d, b in pairs.items()]
    if max_page is None:
        max_page = max((dp - bp for bp, _, dp, _ in plist), default=0) + 1
    return SpectralPages(essential, plist, max_page, prime, defects)


@dataclass(frozen=True)
class CollapseReport:
    passed: bool
    page: int
    bidegree: tuple[int, int] | None
    message: str


def check_collapse(sp: SpectralPages) -> CollapseReport:
    """The augmented sequence must die: every entry of the stable page is zero."""
    if sp.defects:
        p, q = sp.defects[0]
        return CollapseReport(False, 0, (p, q), f"D does not square to zero at ({p},{q})")
    r = sp.stable_page
    page = sp.page(r)
    if page:
        (p, q), c = next(iter(page.items()))
        return CollapseReport(False, r, (p, q), f"E^{r}_({p},{q}) has rank {c}")
    return CollapseReport(True, r, None, f"all entries vanish from page {r}")


# ---------------------------------------------------------------------------
# Explicit subspaces (small complexes only)


def _dense(m: SparseIntMatrix, prime: int) -> np.ndarray:
    a = np.zeros(m.shape, dtype=np.int64)
    np.add.at(a, (m.rows, m.cols), m.vals.astype(np.int64))
    return a % prime


def _row_reduce(a: np.ndarray, prime: int) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form mod ``prime`` and the pivot columns."""
    a = a.copy() % prime
    pivots = []
    r = 0
    for c in range(a.shape[1]):
        if r == a.shape[0]:
            break
        nz = np.nonzero(a[r:, c])[0]
        if not len(nz):
            continue
        k = r + nz[0]
        a[[r, k]] = a[[k, r]]
        a[r] = a[r] * pow(int(a[r, c]), -1, prime) % prime
        f = a[:, c].copy()
        f[r] = 0
        a = (a - np.outer(f, a[r]) % prime) % prime
        pivots.append(c)
        r += 1
    return a[:r], pivots


def _rank(a: np.ndarray, prime: int) -> int:
    if a.size == 0:
        return 0
    return len(_row_reduce(a, prime)[1])


def _nullspace(a: np.ndarray, prime: int) -> np.ndarray:
    """Columns spanning ``{x : a x = 0}``."""
    n = a.shape[1]
    if a.shape[0] == 0:
        return np.eye(n, dtype=np.int64)
    rref, piv = _row_reduce(a, prime)
    free = [c for c in range(n) if c not in piv]
    out = np.zeros((n, len(free)), dtype=np.int64)
    for t, f in enumerate(free):
        out[f, t] = 1
        for i, c in enumerate(piv):
            out[c, t] = (-rref[i, f]) % prime
    return out


def explicit_page_ranks(dc: DoubleComplex, r: int, prime: int = 32003) -> dict[tuple[int, int], int]:
    """``E^r_{p,q} = Z^r_p / (Z^{r-1}_{p-1} + D Z^{r-1}_{p+r-1})`` by dense linear algebra.

    ``Z^r_p`` (in total degree ``n``) is the space of chains in ``F_p`` whose
    boundary lies in ``F_{p-r}``.  Meant for complexes with a few thousand
    basis elements.
    """
    D = _dense(dc.D, prime)
    filt, deg = dc.filtration, dc.degree
    ps = sorted(set(filt.tolist()))
    lo, hi = min(ps), max(ps)

    def Z(s: int, p: int, n: int) -> np.ndarray:
        """Basis of Z^s_p in degree n, as full-length column vectors."""
        cols = np.nonzero((filt <= p) & (deg == n))[0]
        rows = np.nonzero((filt > p - s) & (deg == n - 1))[0]
        ns = _nullspace(D[np.ix_(rows, cols)], prime)
        out = np.zeros((dc.size, ns.shape[1]), dtype=np.int64)
        out[cols] = ns
        return out

    result = {}
    for n in sorted(set(deg.tolist())):
        for p in range(lo, hi + 1):
            z = Z(r, p, n)
            if z.shape[1] == 0:
                continue
            # for r = 0 the first term is all of F_{p-1} and the second lies inside it
            low = Z(r - 1, p - 1, n)
            bnd = D @ Z(r - 1, p + r - 1, n + 1) % prime
            denom = np.concatenate([low, bnd], axis=1)
            rank = z.shape[1] - _rank(denom.T, prime)
            if rank:
                result[(p, n - p)] = rank
    return result


def e1_prediction(cover: Cover, max_q: int | None = None) -> dict[tuple[int, int], int]:
    """``E^1_{p,q}`` as the sum of Betti numbers of the intersections over the nerve."""
    out: dict[tuple[int, int], int] = {}
    columns = [[()]] + cover.nerve()
    for p, sigmas in enumerate(columns, start=-1):
        for s in sigmas:
            sub = cover.space if p == -1 else cover.intersection(s)
            for q, b in enumerate(betti_numbers(sub.chain_complex(), coefficients="rationals")):
                if max_q is not None and q > max_q:
                    break
                if b.betti:
                    out[(p, q)] = out.get((p, q), 0) + b.betti
    return dict(sorted(out.items()))


# ---------------------------------------------------------------------------
# The differential on Reutenauer classes


def _permutation_sign(word: Sequence[int]) -> int:
    w = list(word)
    sign = 1
    for i in range(len(w)):
        for j in range(i + 1, len(w)):
            if w[i] > w[j]:
                sign = -sign
    return sign


def lie_class_chain(dc: DoubleComplex, word_coefficients: dict[tuple[int, ...], int]) -> dict[int, int]:
    """Total-complex 0-chain in the top nerve column for a polynomial in the labels.

    The top intersection ``U_{all}`` has one component per vertical order of
    the labels; a word ``w`` (read top to bottom) picks a vertex of that
    component with coefficient ``sign(w) * c_w``.  The cover must be the
    unpinned right-most cover with pieces in label order.
    """
    cov = dc.cover
    parent = cov.space.parent
    sigma = tuple(range(len(cov.pieces)))
    block = dc.block(sigma, 0)
    if block is None:
        raise ValueError("the top intersection is empty")
    labels = [int(x) for x in cov.names]
    ys = parent.coords[:, 1::2]
    verts = block.simplices
    chain: dict[int, int] = {}
    for word, c in word_coefficients.items():
        if sorted(word) != sorted(labels):
            raise ValueError(f"word {word} does not use every label once")
        ok = np.ones(len(verts), dtype=bool)
        for a, b in zip(word, word[1:]):
            ok &= ys[verts, a - 1] > ys[verts, b - 1]
        hits = np.nonzero(ok)[0]
        if not len(hits):
            raise ValueError(f"no vertex with vertical order {word}")
        i = block.offset + int(hits[0])
        chain[i] = chain.get(i, 0) + _permutation_sign(word) * c
    return chain


@dataclass(frozen=True)
class TransgressionResult:
    """Outcome of lifting a class from the top column to the augmentation column."""

    survives: bool  # d^r vanishes for all r < length
    cycle: dict[int, int]  # the resulting chain on X, parent simplex index -> coefficient (mod p)
    degree: int  # dimension of the simplices in ``cycle``


def transgress(dc: DoubleComplex, chain: dict[int, int], prime: int = DEFAULT_PRIME) -> TransgressionResult:
    """Find ``y`` in ``F_{p-1}`` with ``D(x + y)`` in the augmentation column.

    ``x`` is a chain concentrated in one column ``p``; such a ``y`` exists
    exactly when ``d^r[x] = 0`` for ``r <= p`` (the class survives to page
    ``p + 1``), and then ``D(x + y)`` represents ``d^{p+1}[x]`` in ``H(X)``.
    """
    idx = list(chain)
    p = int(dc.filtration[idx[0]])
    n = int(dc.degree[idx[0]])
    if any(int(dc.filtration[i]) != p or int(dc.degree[i]) != n for i in idx):
        raise ValueError("chain must sit in a single column and degree")
    filt, deg = dc.filtration, dc.degree
    unknowns = np.nonzero((filt >= 0) & (filt < p) & (deg == n))[0]
    targets = np.nonzero((filt >= 0) & (deg == n - 1))[0]
    D = dc.D
    # right-hand side -D x restricted to the non-augmentation rows
    colsel = np.isin(D.cols, idx)
    dx: dict[int, int] = {}
    xval = {i: v for i, v in chain.items()}
    for r, c, v in zip(D.rows[colsel].tolist(), D.cols[colsel].tolist(), D.vals[colsel].tolist()):
        dx[r] = dx.get(r, 0) + v * xval[c]
    tpos = {int(t): i for i, t in enumerate(targets)}
    upos = {int(u): i for i, u in enumerate(unknowns)}
    sel = np.isin(D.cols, unknowns) & np.isin(D.rows, targets)
    M = SparseIntMatrix(
        (len(targets), len(unknowns)),
        np.array([tpos[int(r)] for r in D.rows[sel]], dtype=np.int64),
        np.array([upos[int(c)] for c in D.cols[sel]], dtype=np.int64),
        D.vals[sel],
    )
    b = {tpos[r]: -v for r, v in dx.items() if r in tpos}
    y = solve_mod_p(M, b, prime)
    if y is None:
        return TransgressionResult(False, {}, n)
    total = dict(xval)
    for j, v in y.items():
        total[int(unknowns[j])] = v
    out: dict[int, int] = {}
    tcols = np.isin(D.cols, list(total))
    for r, c, v in zip(D.rows[tcols].tolist(), D.cols[tcols].tolist(), D.vals[tcols].tolist()):
        if filt[r] == -1:
            out[r] = (out.get(r, 0) + v * total[c]) % prime
    aug = {b_.q: b_ for b_ in dc.blocks if b_.p == -1}
    cycle = {}
    for r, v in out.items():
        if v:
            blk = aug[int(dc.qdeg[r])]
            cycle[int(blk.simplices[r - blk.offset])] = v
    return TransgressionResult(True, cycle, n)


def winding_number(parent: OrderedConfigComplex, cycle: dict[int, int], a: int, b: int, prime: int | None = None) -> float:
    """Turns of square ``b`` around square ``a`` along a 1-cycle of the Kuhn model.

    Coefficients given mod ``prime`` are lifted to the symmetric range first.
    Each edge moves the relative position along a segment avoiding the
    origin, so its angle change is the principal angle between the ends.
    """
    edges = parent.simplices[1]
    xa, ya, xb, yb = parent.x(a), parent.y(a), parent.x(b), parent.y(b)
    total = 0.0
    for e, c in cycle.items():
        if prime is not None and c > prime // 2:
            c -= prime
        u, v = edges[e]
        p0 = (xb[u] - xa[u], yb[u] - ya[u])
        p1 = (xb[v] - xa[v], yb[v] - ya[v])
        ang = math.atan2(p0[0] * p1[1] - p0[1] * p1[0], p0[0] * p1[0] + p0[1] * p1[1])
        total += c * ang
    return total / (2 * math.pi)


def toy_cover_hexagon() -> Cover:
    """A hexagon covered by three overlapping arcs (small self-test complex)."""
    from .config import SimplicialComplex

    edges = [(i, (i + 1) % 6) for i in range(6)]
    sc = SimplicialComplex.from_maximal(edges)
    full = sc.full()
    arcs = [{0, 1, 2}, {2, 3, 4}, {4, 5, 0}]
    pieces = [sc.vertex_subcomplex(np.array([v in arc for v in range(6)])) for arc in arcs]
    return Cover(full, pieces, ["a", "b", "c"])


def toy_cover_sphere() -> Cover:
    """Boundary of a tetrahedron covered by three of its closed faces plus the fourth."""
    from .config import SimplicialComplex

    faces = list(combinations(range(4), 3))
    sc = SimplicialComplex.from_maximal(faces)
    full = sc.full()
    pieces = [
        Subcomplex(sc, [np.array([set(s) <= set(f) for s in sc.simplices[k].tolist()]) for k in range(3)])
        for f in faces
    ]
    return Cover(full, pieces[:3] + [pieces[3]], ["f0", "f1", "f2", "f3"])


def is_boundary(space: Subcomplex, cycle: dict[int, int], degree: int, prime: int = DEFAULT_PRIME) -> bool:
    """Whether a chain of the space (parent indices, coefficients mod ``prime``) bounds in it."""
    bd = space.parent.boundaries.get(degree + 1)
    if bd is None or not cycle:
        return not cycle
    sub = bd.submatrix(space.masks[degree], space.masks[degree + 1])
    local = np.cumsum(space.masks[degree]) - 1
    return solve_mod_p(sub, {int(local[i]): v for i, v in cycle.items()}, prime) is not None
