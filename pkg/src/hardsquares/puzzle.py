"""Sliding-square puzzles: exhaustive state graphs on the lattice.

Squares sit on lattice cells of a ``w x h`` board; a square of side ``s``
anchored at ``(x, y)`` covers the cells ``x..x+s-1`` by ``y..y+s-1``, with
``y`` increasing upwards.  A move slides one square by one unit into free
cells.  Pinned squares live in the right-most column and keep a fixed top to
bottom order.
"""
from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

DIRECTIONS = {"up": (0, 1), "down": (0, -1), "left": (-1, 0), "right": (1, 0)}


@dataclass(frozen=True)
class PuzzleState:
    """Board size plus ``(label, x, y, side)`` for each square, sorted by label."""

    w: int
    h: int
    squares: tuple[tuple[int, int, int, int], ...]

    def __post_init__(self):
        occ: set[tuple[int, int]] = set()
        for label, x, y, s in self.squares:
            if s < 1:
                raise ValueError(f"square {label} has side {s}")
            if x < 0 or y < 0 or x + s > self.w or y + s > self.h:
                raise ValueError(f"square {label} leaves the board")
            cells = {(x + i, y + j) for i in range(s) for j in range(s)}
            if occ & cells:
                raise ValueError(f"square {label} overlaps another square")
            occ |= cells

    @classmethod
    def from_positions(cls, w: int, h: int, positions: Mapping[int, tuple[int, int]], sizes: Mapping[int, int] | None = None) -> PuzzleState:
        sizes = sizes or {}
        return cls(w, h, tuple(sorted((l, x, y, sizes.get(l, 1)) for l, (x, y) in positions.items())))

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]]) -> PuzzleState:
        """Unit-square board from rows listed top to bottom; 0 marks an empty cell."""
        h = len(rows)
        w = len(rows[0])
        pos = {}
        for r, row in enumerate(rows):
            for x, label in enumerate(row):
                if label:
                    pos[label] = (x, h - 1 - r)
        return cls.from_positions(w, h, pos)

    @property
    def labels(self) -> tuple[int, ...]:
        return tuple(s[0] for s in self.squares)

    def position(self, label: int) -> tuple[int, int]:
        for l, x, y, _ in self.squares:
            if l == label:
                return x, y
        raise KeyError(label)

    def occupancy(self) -> dict[tuple[int, int], int]:
        occ = {}
        for label, x, y, s in self.squares:
            for i in range(s):
                for j in range(s):
                    occ[(x + i, y + j)] = label
        return occ

    def rows(self) -> list[list[int]]:
        occ = self.occupancy()
        return [[occ.get((x, y), 0) for x in range(self.w)] for y in range(self.h - 1, -1, -1)]

    def __str__(self) -> str:
        width = max(len(str(l)) for l in self.labels) if self.squares else 1
        return "\n".join(" ".join(str(v or ".").rjust(width) for v in row) for row in self.rows())


def apply_move(s: PuzzleState, label: int, direction: str) -> PuzzleState:
    """Slide one square one unit; raises ``ValueError`` if the move is blocked."""
    dx, dy = DIRECTIONS[direction]
    squares = []
    for l, x, y, side in s.squares:
        if l == label:
            x, y = x + dx, y + dy
        squares.append((l, x, y, side))
    return PuzzleState(s.w, s.h, tuple(squares))


class MoveGraph:
    """States and unit slides between them.

    ``states`` is an int array of shape ``(count, n)`` holding the anchor
    cell index ``x + w*y`` of each label (in ``labels`` order); rows are
    sorted by their mixed-radix code.  Edge ``e`` joins ``edge_u[e]`` to
    ``edge_v[e]`` by moving ``labels[edge_square[e]]`` right or up.
    """

    def __init__(self, w, h, labels, sides, states, edge_u, edge_v, edge_square, edge_dir, pinned):
        self.w = w
        self.h = h
        self.labels: tuple[int, ...] = tuple(labels)
        self.sides: tuple[int, ...] = tuple(sides)
        self.states = states
        self.weights = np.array([(w * h) ** (len(labels) - 1 - i) for i in range(len(labels))], dtype=np.int64)
        self.codes = states @ self.weights if len(states) else np.zeros(0, dtype=np.int64)
        self.edge_u = edge_u
        self.edge_v = edge_v
        self.edge_square = edge_square
        self.edge_dir = edge_dir  # 0 = right, 1 = up
        self.pinned = pinned
        self._adjacency: list[list[tuple[int, int, str]]] | None = None

    def __len__(self) -> int:
        return len(self.states)

    @property
    def n_edges(self) -> int:
        return len(self.edge_u)

    def state(self, i: int) -> PuzzleState:
        st = self.states[i].tolist()
        return PuzzleState(
            self.w,
            self.h,
            tuple((l, a % self.w, a // self.w, s) for l, a, s in zip(self.labels, st, self.sides)),
        )

    def key(self, s: PuzzleState) -> tuple[int, ...]:
        if (s.w, s.h) != (self.w, self.h) or s.labels != self.labels:
            raise ValueError("state does not belong to this graph")
        return tuple(x + self.w * y for _, x, y, _ in s.squares)

    def find(self, s: PuzzleState) -> int:
        code = int(np.array(self.key(s), dtype=np.int64) @ self.weights)
        i = int(np.searchsorted(self.codes, code))
        if i >= len(self.codes) or self.codes[i] != code:
            raise ValueError("state is not in the graph")
        return i

    def edges(self) -> Iterable[tuple[int, int, int, str]]:
        """Edges as ``(u, v, label, direction from u to v)``."""
        for u, v, i, d in zip(self.edge_u.tolist(), self.edge_v.tolist(), self.edge_square.tolist(), self.edge_dir.tolist()):
            yield u, v, self.labels[i], ("right", "up")[d]

    def adjacency(self) -> list[list[tuple[int, int, str]]]:
        """Neighbour lists ``(state, label, direction)``, built once and cached."""
        if self._adjacency is not None:
            return self._adjacency
        adj: list[list[tuple[int, int, str]]] = [[] for _ in range(len(self.states))]
        inverse = {"up": "down", "right": "left"}
        for u, v, label, d in self.edges():
            adj[u].append((v, label, d))
            adj[v].append((u, label, inverse[d]))
        self._adjacency = adj
        return adj


def _footprint(w: int, x: int, y: int, s: int) -> int:
    m = 0
    for j in range(s):
        m |= ((1 << s) - 1) << ((y + j) * w + x)
    return m


def _check_pins(pinned: Sequence[Sequence[int]], labels: Sequence[int]) -> list[tuple[int, ...]]:
    out = []
    seen: set[int] = set()
    for seq in pinned:
        seq = tuple(seq)
        if len(set(seq)) != len(seq) or seen & set(seq):
            raise ValueError(f"repeated label in pinned sequences at {seq}")
        for l in seq:
            if l not in labels:
                raise ValueError(f"pinned label {l} is not on the board")
        seen |= set(seq)
        out.append(seq)
    return out


def enumerate_states(
    w: int,
    h: int,
    sizes: Mapping[int, int] | int,
    pinned: Sequence[Sequence[int]] = (),
    next_pinned: Sequence[int] = (),
    cap: int = 20_000_000,
) -> MoveGraph:
    """All lattice placements and the unit slides between them.

    ``sizes`` maps labels to side lengths (an int ``n`` means unit squares
    ``1..n``).  Each sequence in ``pinned`` puts its squares against the right
    wall, stacked top to bottom in that order; several sequences are
    intersected.  ``next_pinned`` squares share the largest right edge among
    the squares that are not pinned and are stacked top to bottom.
    """
    if isinstance(sizes, int):
        sizes = {l: 1 for l in range(1, sizes + 1)}
    if w * h > 62:
        raise ValueError("boards are limited to 62 cells (64-bit occupancy masks)")
    labels = tuple(sorted(sizes))
    sides = tuple(sizes[l] for l in labels)
    pins = _check_pins(pinned, labels)
    pin_set = {l for seq in pins for l in seq}
    nxt = tuple(next_pinned)
    if len(set(nxt)) != len(nxt) or pin_set & set(nxt):
        raise ValueError("next-pinned labels must be distinct and not pinned")
    for l in nxt:
        if l not in labels:
            raise ValueError(f"label {l} is not on the board")
    n = len(labels)
    pos_of = {l: i for i, l in enumerate(labels)}
    empty = np.zeros((0, n), dtype=np.int64)
    no_edges = [np.zeros(0, dtype=np.int64)] * 4
    if sum(s * s for s in sides) > w * h or any(s > min(w, h) for s in sides):
        return MoveGraph(w, h, labels, sides, empty, *no_edges, pins)

    # pinned squares are placed first so their constraints prune early
    order = [pos_of[l] for seq in pins for l in seq]
    order += [i for i in range(n) if i not in order]
    above: dict[int, int] = {}  # position in `order` -> position of the square that must sit above it
    for seq in pins:
        for a, b in zip(seq, seq[1:]):
            above[order.index(pos_of[b])] = order.index(pos_of[a])

    anchors = np.zeros((1, 0), dtype=np.int64)
    occ = np.zeros(1, dtype=np.int64)
    for t, i in enumerate(order):
        s = sides[i]
        pinned_here = labels[i] in pin_set
        new_a, new_o = [], []
        for y in range(h - s + 1):
            for x in range(w - s + 1):
                if pinned_here and x + s != w:
                    continue
                fp = _footprint(w, x, y, s)
                ok = (occ & fp) == 0
                if t in above:
                    ok &= anchors[:, above[t]] // w > y
                idx = np.nonzero(ok)[0]
                if len(idx):
                    new_a.append(np.concatenate([anchors[idx], np.full((len(idx), 1), x + w * y)], axis=1))
                    new_o.append(occ[idx] | fp)
        if not new_a:
            return MoveGraph(w, h, labels, sides, empty, *no_edges, pins)
        anchors = np.concatenate(new_a)
        occ = np.concatenate(new_o)
        if len(anchors) > cap:
            raise MemoryError(f"more than {cap} partial states")
    states = np.empty_like(anchors)
    states[:, order] = anchors
    if nxt:
        xs, ys = states % w, states // w
        right = xs + np.array(sides)
        free = [i for i in range(n) if labels[i] not in pin_set]
        edge = right[:, free].max(axis=1)
        keep = np.ones(len(states), dtype=bool)
        for l in nxt:
            keep &= right[:, pos_of[l]] == edge
        for a, b in zip(nxt, nxt[1:]):
            keep &= ys[:, pos_of[a]] > ys[:, pos_of[b]]
        states, occ = states[keep], occ[keep]
    weights = np.array([(w * h) ** (n - 1 - i) for i in range(n)], dtype=np.int64)
    codes = states @ weights
    srt = np.argsort(codes)
    states, occ, codes = states[srt], occ[srt], codes[srt]

    # footprints by anchor for each side length present
    fp_table = {}
    for s in set(sides):
        tab = np.zeros(w * h, dtype=np.int64)
        for y in range(h - s + 1):
            for x in range(w - s + 1):
                tab[x + w * y] = _footprint(w, x, y, s)
        fp_table[s] = tab
    eu, ev, es, ed = [], [], [], []
    xs, ys = states % w, states // w
    for i in range(n):
        s = sides[i]
        tab = fp_table[s]
        own = tab[states[:, i]]
        rest = occ & ~own
        for d, (dx, dy) in enumerate(((1, 0), (0, 1))):
            valid = (xs[:, i] + dx + s <= w) & (ys[:, i] + dy + s <= h)
            na = states[:, i] + dx + w * dy
            na_safe = np.where(valid, na, 0)
            valid &= (rest & tab[na_safe]) == 0
            u = np.nonzero(valid)[0]
            if not len(u):
                continue
            nc = codes[u] + (na[u] - states[u, i]) * weights[i]
            v = np.searchsorted(codes, nc)
            v = np.minimum(v, len(codes) - 1)
            hit = codes[v] == nc
            eu.append(u[hit])
            ev.append(v[hit])
            es.append(np.full(int(hit.sum()), i))
            ed.append(np.full(int(hit.sum()), d))
    cat = lambda xs_: np.concatenate(xs_).astype(np.int64) if xs_ else np.zeros(0, dtype=np.int64)
    return MoveGraph(w, h, labels, sides, states, cat(eu), cat(ev), cat(es), cat(ed), pins)


def component_labels(g: MoveGraph) -> np.ndarray:
    n = len(g.states)
    if n == 0:
        return np.zeros(0, dtype=np.int64)
    m = coo_matrix((np.ones(g.n_edges), (g.edge_u, g.edge_v)), shape=(n, n))
    _, lab = connected_components(m, directed=False)
    return lab


def component_count(g: MoveGraph) -> tuple[int, tuple[int, ...]]:
    """Number of connected components and their sizes (sorted, largest first)."""
    lab = component_labels(g)
    if len(lab) == 0:
        return 0, ()
    sizes = np.bincount(lab)
    return len(sizes), tuple(sorted(sizes.tolist(), reverse=True))


def parity_class(s: PuzzleState) -> str:
    """``'even'`` or ``'odd'``: permutation parity plus blank-position parity.

    Defined for unit squares filling all but one cell of the board.
    """
    if any(side != 1 for _, _, _, side in s.squares):
        raise ValueError("parity is defined for unit squares only")
    if len(s.squares) != s.w * s.h - 1:
        raise ValueError("parity needs exactly one empty cell")
    occ = s.occupancy()
    rank = {l: i + 1 for i, l in enumerate(sorted(s.labels))}
    blank = len(s.squares) + 1
    tokens = []
    bx = by = 0
    for y in range(s.h):
        for x in range(s.w):
            l = occ.get((x, y))
            if l is None:
                tokens.append(blank)
                bx, by = x, y
            else:
                tokens.append(rank[l])
    inversions = sum(1 for i in range(len(tokens)) for j in range(i + 1, len(tokens)) if tokens[i] > tokens[j])
    return "even" if (inversions + bx + by) % 2 == 0 else "odd"


def find_path(g: MoveGraph, a: PuzzleState, b: PuzzleState) -> list[tuple[int, str]] | None:
    """Breadth-first slide sequence from ``a`` to ``b``, or ``None`` if disconnected."""
    ia, ib = g.find(a), g.find(b)
    if ia == ib:
        return []
    adj = g.adjacency()
    prev: dict[int, tuple[int, int, str]] = {ia: (-1, 0, "")}
    queue = deque([ia])
    while queue:
        u = queue.popleft()
        for v, label, d in adj[u]:
            if v in prev:
                continue
            prev[v] = (u, label, d)
            if v == ib:
                moves = []
                while v != ia:
                    u2, l2, d2 = prev[v]
                    moves.append((l2, d2))
                    v = u2
                return moves[::-1]
            queue.append(v)
    return None


def replay(a: PuzzleState, moves: Iterable[tuple[int, str]]) -> PuzzleState:
    for label, d in moves:
        a = apply_move(a, label, d)
    return a


def path_certificate(moves: Sequence[tuple[int, str]]) -> str:
    return json.dumps([{"label": l, "direction": d} for l, d in moves])


def parse_certificate(text: str) -> list[tuple[int, str]]:
    return [(int(m["label"]), str(m["direction"])) for m in json.loads(text)]


def big_square_hypotheses(w: int, h: int, k: int, units: int) -> bool:
    """Whether the board is large enough for the connectivity statement about one big square."""
    n = units + (k + 1)
    return min(w - 1, h) >= k + 2 and w * h - n >= (k + 1) * (k + 2)


def big_square_graph(w: int, h: int, k: int, units: int, pins: int = 0) -> MoveGraph:
    """Unit squares ``1..units`` and one square of side ``k+1`` (label ``units+1``).

    Squares ``1..pins`` are pinned to the right wall in that order.
    """
    sizes = {l: 1 for l in range(1, units + 1)}
    sizes[units + 1] = k + 1
    pinned = [tuple(range(1, pins + 1))] if pins else []
    return enumerate_states(w, h, sizes, pinned=pinned)


def big_square_connectivity(w: int, h: int, k: int, units: int, pins: int = 0) -> bool:
    g = big_square_graph(w, h, k, units, pins)
    return len(g) > 0 and component_count(g)[0] == 1


def number_of_states(w: int, h: int, n: int) -> int:
    """Placements of ``n`` labelled unit squares on a ``w x h`` board."""
    out = 1
    for i in range(n):
        out *= max(w * h - i, 0)
    return out
