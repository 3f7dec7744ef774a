"""The acceptance criteria, one test per criterion (summary lines come from conftest)."""
import math
import os
import random
import time

import numpy as np
import pytest

from hardsquares.config import config_complex, subdivide_order
from hardsquares.homology import betti_numbers
from hardsquares.injective_words import (
    derangements,
    injective_word_complex,
    pi_basis_products,
    pi_n_basis_products,
    reutenauer_basis,
    top_homology_basis,
    top_homology_products,
)
from hardsquares.puzzle import (
    component_count,
    component_labels,
    enumerate_states,
    find_path,
    number_of_states,
    parity_class,
    replay,
)
from hardsquares.spectral import (
    DEFAULT_PRIME,
    DoubleComplex,
    check_collapse,
    compute_pages,
    lie_class_chain,
    rightmost_cover,
    transgress,
    winding_number,
)
from hardsquares.sweep import SweepSpec, stability_sweep
from hardsquares.wheels import (
    Psi,
    W,
    Wheel,
    _order_key,
    apply_antisymmetry,
    apply_jacobi,
    betti_fn,
    bracket_to_wheels,
    canonical_product,
    combination_to_wheels,
    enumerate_wheel_basis,
    er_entry_rank,
    expr_size,
    rewrite_at,
)

from test_injective_words import PI_4_2, PI_4_3, PI_STAR_3, PI_STAR_3_3


@pytest.mark.criterion(1, "wheel basis of H_1 for eight points has 28 elements")
def test_criterion_1_wheel_count():
    t = time.perf_counter()
    basis = enumerate_wheel_basis(8, 1)
    assert len(basis) == 28
    assert len(set(basis)) == 28
    assert time.perf_counter() - t < 1.0


@pytest.mark.criterion(2, "small sliding puzzles: two parity components, then connected")
def test_criterion_2_small_puzzles():
    t = time.perf_counter()
    g = enumerate_states(2, 2, 3)
    assert component_count(g) == (2, (12, 12))
    lab = component_labels(g)
    classes = {}
    for i, c in enumerate(lab.tolist()):
        classes.setdefault(c, set()).add(parity_class(g.state(i)))
    assert all(len(v) == 1 for v in classes.values())
    assert len(set.union(*classes.values())) == 2
    assert component_count(enumerate_states(2, 2, 2))[0] == 1
    assert time.perf_counter() - t < 1.0


@pytest.mark.criterion(3, "discrete model homology equals point configuration homology")
def test_criterion_3_discrete_model():
    t = time.perf_counter()
    for w, h, n, expected in [(2, 2, 2, [1, 1, 0]), (3, 3, 3, [1, 3, 2])]:
        summary = betti_numbers(config_complex(w, h, n).chain_complex(), "integers")
        betti = [s.betti for s in summary]
        assert betti[: len(expected)] == expected
        assert all(b == 0 for b in betti[len(expected):])
        assert betti[:n] == [betti_fn(n, k) for k in range(n)]
        assert not any(s.torsion for s in summary)
        assert not any(s.betti_only for s in summary)
    assert time.perf_counter() - t < 120


@pytest.mark.criterion(4, "stability sweep over n <= 3, w, h <= 6, k <= 2")
def test_criterion_4_sweep():
    t = time.perf_counter()
    jobs = min(4, os.cpu_count() or 1)
    rows = stability_sweep(SweepSpec((1, 2, 3), 6, 6, 2, jobs=jobs))
    stable = [r for r in rows if r.stable_range]
    k1 = [r for r in rows if r.k1_range]
    assert stable and k1
    assert all(r.agrees is True for r in stable)
    assert all(r.agrees is True for r in k1)
    assert len(rows) == 3 * 5 * 5 * 3
    assert time.perf_counter() - t < 30 * 60


@pytest.mark.criterion(5, "injective words: Reutenauer sizes, listed bases, top homology")
def test_criterion_5_injective_words():
    t = time.perf_counter()
    for m in range(2, 8):
        assert len(reutenauer_basis(range(1, m + 1))) == math.factorial(m - 1)
    assert sorted(b.name for b in pi_n_basis_products(4, 2)) == sorted(PI_4_2)
    assert sorted(b.name for b in pi_basis_products(range(1, 5))) == sorted(PI_4_3)
    assert len(PI_4_2) == len(PI_4_3) == 24
    assert sorted(b.name for b in top_homology_products(4, 2)) == sorted(PI_STAR_3)
    assert sorted(b.name for b in top_homology_products(4, 3)) == sorted(PI_STAR_3_3)
    for m in range(1, 6):
        cc, _ = injective_word_complex(m)
        betti = [s.betti for s in betti_numbers(cc, "integers")]
        betti[0] -= 1
        assert betti[:-1] == [0] * (m - 1)
        assert betti[-1] == derangements(m)
        if m >= 2:
            assert len(top_homology_basis(m, 2)) == betti[-1]
    assert time.perf_counter() - t < 300


@pytest.mark.criterion(6, "spectral engine: E1, d2, collapse and E2 closed form")
def test_criterion_6_spectral():
    t = time.perf_counter()
    c = subdivide_order(config_complex(2, 2, 2))
    dc = DoubleComplex(rightmost_cover(c))
    sp = compute_pages(dc)
    assert [sp.rank(1, -1, q) for q in range(4)] == [1, 1, 0, 0]
    assert sp.differential_rank(2, 1, 0) == 1
    assert check_collapse(sp).passed
    lie = reutenauer_basis({1, 2})[0].expansion
    res = transgress(dc, lie_class_chain(dc, lie.terms))
    assert res.survives and round(abs(winding_number(c, res.cycle, 1, 2, DEFAULT_PRIME))) == 1
    for w, h, n in [(2, 2, 1), (2, 2, 2), (3, 3, 2), (3, 3, 3)]:
        sp = compute_pages(DoubleComplex(rightmost_cover(subdivide_order(config_complex(w, h, n)))))
        assert check_collapse(sp).passed
        for p in range(-1, n):
            for q in range(0, 4 - p):
                assert sp.rank(2, p, q) == er_entry_rank(n, p, q, 2), (w, h, n, p, q)
    assert time.perf_counter() - t < 300


def random_expr(rng, labels):
    """Random bracket tree whose leaves are wheels on consecutive chunks of ``labels``."""
    if len(labels) <= 2 and rng.random() < 0.6:
        first = min(labels)
        rest = [x for x in labels if x != first]
        rng.shuffle(rest)
        return Wheel((first, *rest))
    if len(labels) == 1:
        return W(labels[0])
    cut = rng.randint(1, len(labels) - 1)
    return Psi(random_expr(rng, labels[:cut]), random_expr(rng, labels[cut:]))


def shuffled_labels(rng, k):
    labels = list(range(1, k + 1))
    rng.shuffle(labels)
    return labels


def paths_to_brackets(e, prefix=()):
    if isinstance(e, Psi):
        yield prefix, e
        yield from paths_to_brackets(e.left, prefix + (0,))
        yield from paths_to_brackets(e.right, prefix + (1,))


@pytest.mark.criterion(7, "Browder relations and rewriting confluence")
def test_criterion_7_relations():
    rng = random.Random(2024)
    # graded antisymmetry
    for _ in range(1000):
        labels = shuffled_labels(rng, rng.randint(2, 5))
        cut = rng.randint(1, len(labels) - 1)
        a, b = random_expr(rng, labels[:cut]), random_expr(rng, labels[cut:])
        lhs = bracket_to_wheels(Psi(a, b))
        sign = -((-1) ** (expr_size(a) * expr_size(b)))
        assert lhs == {k: sign * v for k, v in bracket_to_wheels(Psi(b, a)).items()}
    # graded Jacobi
    for _ in range(1000):
        labels = shuffled_labels(rng, rng.randint(3, 5))
        i, j = sorted(rng.sample(range(1, len(labels)), 2))
        A, B, C = (random_expr(rng, part) for part in (labels[:i], labels[i:j], labels[j:]))
        a, b, c = expr_size(A), expr_size(B), expr_size(C)
        total = combination_to_wheels(
            [
                ((-1) ** (c * a), Psi(Psi(A, B), C)),
                ((-1) ** (a * b), Psi(Psi(B, C), A)),
                ((-1) ** (b * c), Psi(Psi(C, A), B)),
            ]
        )
        assert total == {}
    # product sign commutation: the sorting sign is the Koszul sign of the permutation
    for _ in range(1000):
        labels = shuffled_labels(rng, rng.randint(2, 9))
        factors, rest = [], labels
        while rest:
            size = rng.randint(1, min(4, len(rest)))
            block, rest = rest[:size], rest[size:]
            first = min(block)
            factors.append(Wheel((first, *[x for x in block if x != first])))
        rng.shuffle(factors)
        sign, product = canonical_product(factors)
        expected = 1
        for x in range(len(factors)):
            for y in range(x + 1, len(factors)):
                if _order_key(factors[x]) > _order_key(factors[y]):
                    expected *= (-1) ** (factors[x].degree * factors[y].degree)
        assert sign == expected
        assert sorted(map(_order_key, factors)) == [_order_key(w) for w in product.factors]
    # confluence on 6-leaf trees
    for _ in range(200):
        labels = shuffled_labels(rng, 6)
        e = random_expr_leaves(rng, labels)
        reference = bracket_to_wheels(e)
        terms = [(1, e)]
        for _ in range(rng.randint(1, 3)):
            new = []
            for coef, t in terms:
                choices = [(p, sub) for p, sub in paths_to_brackets(t)]
                path, sub = rng.choice(choices)
                rules = [apply_antisymmetry] + ([apply_jacobi] if isinstance(sub.left, Psi) else [])
                for c2, t2 in rewrite_at(t, path, rng.choice(rules)):
                    new.append((coef * c2, t2))
            terms = new
        assert combination_to_wheels(terms) == reference


def random_expr_leaves(rng, labels):
    """Random binary tree with one single-spoke wheel per label."""
    if len(labels) == 1:
        return W(labels[0])
    cut = rng.randint(1, len(labels) - 1)
    return Psi(random_expr_leaves(rng, labels[:cut]), random_expr_leaves(rng, labels[cut:]))


def skeleton_matches(w, h, n):
    c = config_complex(w, h, n, max_dim=1)
    g = enumerate_states(w, h, n)
    ext = c.ambient.extents
    # puzzle code of every vertex of the configuration complex
    verts = c.cells[0]
    anchors = ext[verts, 0] + w * ext[verts, 2]
    codes = anchors @ g.weights
    order = np.argsort(codes)
    if not np.array_equal(codes[order], g.codes):
        return False
    vertex_to_state = np.empty(len(codes), dtype=np.int64)
    vertex_to_state[order] = np.arange(len(codes))
    if len(c.cells) < 2:
        return g.n_edges == 0
    m = c.boundaries[1]
    ends = np.zeros((len(c.cells[1]), 2), dtype=np.int64)
    srt = np.lexsort((m.rows, m.cols))
    ends[:] = vertex_to_state[m.rows[srt]].reshape(-1, 2)
    df_edges = {tuple(sorted(e)) for e in ends.tolist()}
    puzzle_edges = {tuple(sorted(e)) for e in zip(g.edge_u.tolist(), g.edge_v.tolist())}
    return len(df_edges) == len(ends) and df_edges == puzzle_edges


BOARDS = [
    (w, h, n)
    for w in range(2, 7)
    for h in range(2, 7)
    for n in range(1, w * h + 1)
    if number_of_states(w, h, n) <= 100_000
]


@pytest.mark.criterion(8, "configuration complex skeleton equals the move graph; paths replay")
def test_criterion_8_cross_module():
    failures = [b for b in BOARDS if not skeleton_matches(*b)]
    assert failures == []
    rng = random.Random(8)
    checked = 0
    graphs = [enumerate_states(w, h, n) for w, h, n in rng.sample(BOARDS, 25)]
    graphs = [g for g in graphs if len(g) > 1]
    while checked < 100:
        g = rng.choice(graphs)
        lab = component_labels(g)
        a = rng.randrange(len(g))
        same = np.nonzero(lab == lab[a])[0]
        b = int(rng.choice(same.tolist()))
        moves = find_path(g, g.state(a), g.state(b))
        assert moves is not None
        assert replay(g.state(a), moves) == g.state(b)
        checked += 1
