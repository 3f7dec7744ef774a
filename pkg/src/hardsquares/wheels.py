"""Wheel bases for the homology of ordered configurations of points in the plane.

A wheel ``W(i_1, ..., i_m)`` (``i_1`` the least spoke) lives in degree
``m - 1``; a basis of ``H_k(F_n)`` is given by products of wheels whose spoke
sets partition ``{1..n}``, written in a canonical factor order.

Browder brackets are evaluated in the free graded Lie algebra on odd
generators, realised inside the algebra of injective words: a wheel maps to
its left-normed word bracket and ``psi`` maps to the word bracket, with the
grading given by the number of letters.  Coordinates in the wheel basis are
then read off from the words that start with the least letter, since the
left-normed bracket ``[[...[s, i_1]...], i_k]`` contains exactly one such
word, ``s i_1 ... i_k``, with coefficient one.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from itertools import permutations
from typing import Iterable, Sequence, Union

from .injective_words import (
    WordPolynomial,
    left_normed,
    lie_bracket,
    set_partitions,
    top_homology_rank,
    tree_polynomial,
)


@dataclass(frozen=True)
class Wheel:
    spokes: tuple[int, ...]

    def __post_init__(self):
        s = tuple(self.spokes)
        object.__setattr__(self, "spokes", s)
        if not s:
            raise ValueError("a wheel needs at least one spoke")
        if len(set(s)) != len(s):
            raise ValueError(f"repeated spoke in {s}")
        if s[0] != min(s):
            raise ValueError(f"first spoke of {s} is not the least")

    @property
    def degree(self) -> int:
        return len(self.spokes) - 1

    @property
    def size(self) -> int:
        return len(self.spokes)

    def __str__(self) -> str:
        return "W(" + ",".join(map(str, self.spokes)) + ")"


def W(*spokes: int) -> Wheel:
    return Wheel(tuple(spokes))


def _order_key(w: Wheel) -> tuple[int, int]:
    # larger wheels first; equal sizes by decreasing first spoke
    return (-w.size, -w.spokes[0])


@dataclass(frozen=True)
class WheelProduct:
    """Product of wheels with pairwise disjoint spokes, in canonical order."""

    factors: tuple[Wheel, ...]

    def __post_init__(self):
        f = tuple(self.factors)
        object.__setattr__(self, "factors", f)
        seen: set[int] = set()
        for w in f:
            if seen & set(w.spokes):
                raise ValueError("wheels in a product must have disjoint spokes")
            seen |= set(w.spokes)
        for a, b in zip(f, f[1:]):
            if not _order_key(a) < _order_key(b):
                raise ValueError(f"factors of {self} are not in canonical order")

    @property
    def degree(self) -> int:
        return sum(w.degree for w in self.factors)

    @property
    def labels(self) -> frozenset[int]:
        return frozenset(x for w in self.factors for x in w.spokes)

    def __str__(self) -> str:
        return "".join(str(w) for w in self.factors) or "1"


def canonical_product(factors: Sequence[Wheel]) -> tuple[int, WheelProduct]:
    """Sort a product of wheels, returning the Koszul sign and the canonical product.

    Swapping adjacent factors of degrees ``a`` and ``b`` costs ``(-1)^{ab}``.
    """
    f = list(factors)
    sign = 1
    # insertion sort keeps track of every adjacent transposition
    for i in range(1, len(f)):
        j = i
        while j > 0 and _order_key(f[j]) < _order_key(f[j - 1]):
            if f[j].degree % 2 and f[j - 1].degree % 2:
                sign = -sign
            f[j], f[j - 1] = f[j - 1], f[j]
            j -= 1
    return sign, WheelProduct(tuple(f))


def _wheels_on(block: tuple[int, ...]) -> list[Wheel]:
    first, rest = block[0], block[1:]
    return [Wheel((first,) + p) for p in permutations(rest)]


def enumerate_wheel_basis(n: int, k: int) -> list[WheelProduct]:
    """Canonical wheel products on exactly the labels ``1..n`` of degree ``k``."""
    if n < 0 or k < 0:
        raise ValueError("n and k must be nonnegative")
    out = []
    for part in set_partitions(tuple(range(1, n + 1))):
        if n - len(part) != k:
            continue
        choices = [_wheels_on(b) for b in part]

        def rec(i, acc):
            if i == len(choices):
                out.append(canonical_product(acc)[1])
                return
            for w in choices[i]:
                rec(i + 1, acc + [w])

        rec(0, [])
    out.sort(key=lambda p: tuple((w.size, w.spokes) for w in p.factors))
    return out


@lru_cache(maxsize=None)
def betti_fn(n: int, k: int) -> int:
    """Rank of ``H_k(F_n)``: the elementary symmetric polynomial ``e_k(1, ..., n-1)``."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    if k < 0:
        return 0
    coeffs = [1]
    for i in range(1, n):
        nxt = coeffs + [0]
        for j in range(len(coeffs)):
            nxt[j + 1] += i * coeffs[j]
        coeffs = nxt
    return coeffs[k] if k < len(coeffs) else 0


def ar_reduced_basis(n: int, k: int, r: int) -> list[WheelProduct]:
    """Basis products whose every wheel has at least ``r + 1`` spokes."""
    return [p for p in enumerate_wheel_basis(n, k) if all(w.size >= r + 1 for w in p.factors)]


def er_entry_rank(n: int, p: int, q: int, r: int) -> int:
    """Predicted rank of ``E^r_{p,q}`` of the augmented spectral sequence for ``F_n``.

    ``binom(n, p+1) * |ar_reduced_basis(n-p-1, q, r-1)| * |T^r_{p+1}|``, where
    ``T^r_m`` is the degree-filtered top homology of injective words on ``m``
    letters (rank 1 for ``m = 0`` and 0 for ``m = 1``).
    """
    if r < 2:
        raise ValueError("the closed form starts at the second page")
    if p < -1 or p + 1 > n or q < 0:
        return 0
    m = p + 1
    reduced = len(ar_reduced_basis(n - m, q, r - 1))
    return math.comb(n, m) * reduced * top_homology_rank(m, r)


# ---------------------------------------------------------------------------
# Browder brackets


@dataclass(frozen=True)
class Psi:
    """Browder bracket node of a bracket expression."""

    left: "BracketExpr"
    right: "BracketExpr"


BracketExpr = Union[Wheel, Psi]


def expr_labels(e: BracketExpr) -> tuple[int, ...]:
    if isinstance(e, Wheel):
        return e.spokes
    return expr_labels(e.left) + expr_labels(e.right)


def expr_size(e: BracketExpr) -> int:
    """Number of labels, the degree used by the bracket signs."""
    return len(expr_labels(e))


def expr_str(e: BracketExpr) -> str:
    if isinstance(e, Wheel):
        return str(e)
    return f"psi({expr_str(e.left)},{expr_str(e.right)})"


def wheel_polynomial(w: Wheel) -> WordPolynomial:
    return tree_polynomial(left_normed(w.spokes))


def expr_polynomial(e: BracketExpr) -> WordPolynomial:
    labels = expr_labels(e)
    if len(set(labels)) != len(labels):
        raise ValueError(f"overlapping labels in {expr_str(e)}")
    if isinstance(e, Wheel):
        return wheel_polynomial(e)
    return lie_bracket(expr_polynomial(e.left), expr_polynomial(e.right))


def polynomial_to_wheels(poly: WordPolynomial) -> dict[WheelProduct, int]:
    """Write a homogeneous Lie polynomial in the wheel basis of its letter set."""
    if not poly:
        return {}
    s = min(poly.letters())
    out: dict[WheelProduct, int] = {}
    check = WordPolynomial()
    for word, c in poly.terms.items():
        if word[0] == s:
            w = Wheel(word)
            out[WheelProduct((w,))] = c
            check = check + c * wheel_polynomial(w)
    if check != poly:
        raise ValueError("polynomial is not in the span of the wheels")
    return out


def bracket_to_wheels(e: BracketExpr) -> dict[WheelProduct, int]:
    """Evaluate a bracket expression as an integer combination of wheels."""
    return polynomial_to_wheels(expr_polynomial(e))


def combination_to_wheels(terms: Iterable[tuple[int, BracketExpr]]) -> dict[WheelProduct, int]:
    out: dict[WheelProduct, int] = {}
    for c, e in terms:
        for w, x in bracket_to_wheels(e).items():
            out[w] = out.get(w, 0) + c * x
    return {w: x for w, x in out.items() if x}


def antisymmetry_sign(a: BracketExpr, b: BracketExpr) -> int:
    """``psi(A, B) = sign * psi(B, A)`` with ``sign = -(-1)^{|A||B|}``, sizes counted in labels."""
    return -((-1) ** (expr_size(a) * expr_size(b)))


def apply_antisymmetry(e: Psi) -> list[tuple[int, BracketExpr]]:
    """Rewrite ``psi(A, B)`` as a signed ``psi(B, A)``."""
    if not isinstance(e, Psi):
        raise ValueError("antisymmetry needs a bracket")
    return [(antisymmetry_sign(e.left, e.right), Psi(e.right, e.left))]


def apply_jacobi(e: Psi) -> list[tuple[int, BracketExpr]]:
    """Rewrite ``psi(psi(A, B), C)`` through the graded Jacobi identity.

    With sizes ``a, b, c`` the identity reads
    ``(-1)^{ca} psi(psi(A,B),C) + (-1)^{ab} psi(psi(B,C),A) + (-1)^{bc} psi(psi(C,A),B) = 0``.
    """
    if not isinstance(e, Psi) or not isinstance(e.left, Psi):
        raise ValueError("Jacobi rewriting needs a left child that is a bracket")
    A, B, C = e.left.left, e.left.right, e.right
    a, b, c = expr_size(A), expr_size(B), expr_size(C)
    s_ca = (-1) ** (c * a)
    return [
        (-s_ca * (-1) ** (a * b), Psi(Psi(B, C), A)),
        (-s_ca * (-1) ** (b * c), Psi(Psi(C, A), B)),
    ]


def rewrite_at(e: BracketExpr, path: Sequence[int], rule) -> list[tuple[int, BracketExpr]]:
    """Apply ``rule`` to the subexpression at ``path`` (0 = left, 1 = right)."""
    if not path:
        return rule(e)
    if not isinstance(e, Psi):
        raise ValueError("path leaves the expression tree")
    head, rest = path[0], path[1:]
    if head == 0:
        return [(c, Psi(sub, e.right)) for c, sub in rewrite_at(e.left, rest, rule)]
    return [(c, Psi(e.left, sub)) for c, sub in rewrite_at(e.right, rest, rule)]
