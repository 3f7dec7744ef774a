"""Injective words, their graded Lie bracket and the Reutenauer-type bases.

Words are tuples of distinct positive labels; a polynomial is an integer
combination of words.  A word of length ``l`` has degree ``l`` for the
bracket ``[A, B] = AB - (-1)^{|A||B|} BA``, and the face maps delete one
letter, so ``Inj(m)`` is a semi-simplicial set with ``(p+1)``-letter words
in degree ``p``.

Lie trees are nested pairs: an ``int`` is a letter, ``(left, right)`` is a
bracket.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property, lru_cache
from itertools import permutations
from typing import Iterable, Iterator, Sequence, Union


from .homology import ChainComplex, SparseIntMatrix

Word = tuple[int, ...]
Tree = Union[int, tuple]


class WordPolynomial:
    """Integer combination of injective words."""

    __slots__ = ("terms",)

    def __init__(self, terms: dict[Word, int] | None = None):
        self.terms: dict[Word, int] = {w: c for w, c in (terms or {}).items() if c}

    @classmethod
    def word(cls, letters: Iterable[int], coef: int = 1) -> WordPolynomial:
        w = tuple(letters)
        if len(set(w)) != len(w):
            raise ValueError(f"word {w} repeats a letter")
        return cls({w: coef})

    @property
    def degree(self) -> int | None:
        """Common word length, ``None`` for the zero polynomial."""
        lengths = {len(w) for w in self.terms}
        if not lengths:
            return None
        if len(lengths) > 1:
            raise ValueError("polynomial is not homogeneous")
        return lengths.pop()

    def letters(self) -> frozenset[int]:
        return frozenset(x for w in self.terms for x in w)

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __iter__(self) -> Iterator[tuple[Word, int]]:
        return iter(sorted(self.terms.items(), key=lambda t: (len(t[0]), t[0])))

    def __eq__(self, other) -> bool:
        if isinstance(other, int) and other == 0:
            return not self.terms
        if not isinstance(other, WordPolynomial):
            return NotImplemented
        return self.terms == other.terms

    def __add__(self, other: WordPolynomial) -> WordPolynomial:
        out = dict(self.terms)
        for w, c in other.terms.items():
            out[w] = out.get(w, 0) + c
        return WordPolynomial(out)

    def __neg__(self) -> WordPolynomial:
        return WordPolynomial({w: -c for w, c in self.terms.items()})

    def __sub__(self, other: WordPolynomial) -> WordPolynomial:
        return self + (-other)

    def __rmul__(self, k: int) -> WordPolynomial:
        return WordPolynomial({w: k * c for w, c in self.terms.items()})

    def __mul__(self, other):
        """Concatenation product (or scaling by an int)."""
        if isinstance(other, int):
            return other * self
        if self.letters() & other.letters():
            raise ValueError("product of polynomials with overlapping letters")
        out: dict[Word, int] = {}
        for a, x in self.terms.items():
            for b, y in other.terms.items():
                out[a + b] = out.get(a + b, 0) + x * y
        return WordPolynomial(out)

    def coefficient(self, w: Sequence[int]) -> int:
        return self.terms.get(tuple(w), 0)

    def boundary(self) -> WordPolynomial:
        out = WordPolynomial()
        for w, c in self.terms.items():
            out = out + c * word_boundary(w)
        return out

    def dump(self) -> str:
        """Textual form ``coef*word + ...`` in canonical term order."""
        if not self.terms:
            return "0"
        parts = []
        for w, c in self:
            s = f"{abs(c)}*{word_str(w)}"
            parts.append(("- " if c < 0 else "+ ") + s)
        text = " ".join(parts)
        return text[2:] if text.startswith("+ ") else "-" + text[2:]

    def __repr__(self) -> str:
        return f"WordPolynomial({self.dump()})"


def word_str(w: Sequence[int]) -> str:
    if not w:
        return "()"
    sep = "" if max(w) < 10 else "."
    return sep.join(str(x) for x in w)


def parse_dump(text: str) -> WordPolynomial:
    """Inverse of :meth:`WordPolynomial.dump`."""
    text = text.strip()
    if text == "0":
        return WordPolynomial()
    tokens = text.replace("- ", "-").replace("+ ", "+").split()
    out: dict[Word, int] = {}
    for tok in tokens:
        coef, word = tok.split("*")
        if word == "()":
            letters: Word = ()
        elif "." in word:
            letters = tuple(int(x) for x in word.split("."))
        else:
            letters = tuple(int(x) for x in word)
        out[letters] = out.get(letters, 0) + int(coef)
    return WordPolynomial(out)


def word_boundary(w: Sequence[int]) -> WordPolynomial:
    """Alternating sum of letter deletions; one-letter words go to the empty word."""
    w = tuple(w)
    if not w:
        raise ValueError("the empty word has no boundary")
    out: dict[Word, int] = {}
    for j in range(len(w)):
        f = w[:j] + w[j + 1 :]
        out[f] = out.get(f, 0) + (-1) ** j
    return WordPolynomial(out)


def lie_bracket(a: WordPolynomial, b: WordPolynomial) -> WordPolynomial:
    """Graded bracket ``[A, B] = AB - (-1)^{|A||B|} BA``, extended bilinearly."""
    if a.letters() & b.letters():
        raise ValueError("bracket of polynomials with overlapping letters")
    if not a or not b:
        return WordPolynomial()
    da, db = a.degree, b.degree
    return a * b - ((-1) ** (da * db)) * (b * a)


# ---------------------------------------------------------------------------
# Lie trees


def tree_letters(t: Tree) -> tuple[int, ...]:
    if isinstance(t, int):
        return (t,)
    return tree_letters(t[0]) + tree_letters(t[1])


def tree_str(t: Tree) -> str:
    if isinstance(t, int):
        return str(t)
    return f"[{tree_str(t[0])},{tree_str(t[1])}]"


def tree_polynomial(t: Tree) -> WordPolynomial:
    if isinstance(t, int):
        return WordPolynomial.word((t,))
    return lie_bracket(tree_polynomial(t[0]), tree_polynomial(t[1]))


def left_normed(seq: Sequence[int]) -> Tree:
    """The tree ``[[...[s_0, s_1], s_2]..., s_k]``."""
    t: Tree = seq[0]
    for x in seq[1:]:
        t = (t, x)
    return t


@dataclass(frozen=True)
class LieBasisElement:
    """Left-normed bracket anchored at the least letter of its set."""

    sequence: tuple[int, ...]

    @property
    def tree(self) -> Tree:
        return left_normed(self.sequence)

    @property
    def letters(self) -> frozenset[int]:
        return frozenset(self.sequence)

    @property
    def size(self) -> int:
        return len(self.sequence)

    @cached_property
    def expansion(self) -> WordPolynomial:
        return tree_polynomial(self.tree)

    def order_key(self) -> tuple:
        """Position in the frozen total order on the factor set B."""
        return (self.size, tuple(sorted(self.sequence)), self.sequence)

    def __str__(self) -> str:
        return tree_str(self.tree)


def reutenauer_basis(S: Iterable[int]) -> list[LieBasisElement]:
    """The ``(|S|-1)!`` left-normed brackets anchored at ``min(S)``."""
    S = sorted(set(S))
    if len(S) < 2:
        return []
    first, rest = S[0], S[1:]
    return [LieBasisElement((first,) + p) for p in permutations(rest)]


def _factor_choices(block: tuple[int, ...]) -> list[LieBasisElement]:
    if len(block) == 1:
        return [LieBasisElement(block)]
    return reutenauer_basis(block)


def set_partitions(items: Sequence[int], min_block: int = 1) -> Iterator[list[tuple[int, ...]]]:
    """Set partitions of ``items`` (blocks listed by least element)."""
    items = tuple(items)
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    n = len(rest)
    for mask in range(1 << n):
        block = (first,) + tuple(rest[i] for i in range(n) if mask >> i & 1)
        if len(block) < min_block:
            continue
        others = tuple(rest[i] for i in range(n) if not mask >> i & 1)
        for tail in set_partitions(others, min_block):
            yield [block] + tail


@dataclass(frozen=True)
class BasisProduct:
    """Ordered product ``P_1 P_2 ... P_m`` of factors from B."""

    factors: tuple[LieBasisElement, ...]

    @cached_property
    def polynomial(self) -> WordPolynomial:
        out = WordPolynomial({(): 1})
        for f in self.factors:
            out = out * f.expansion
        return out

    @property
    def name(self) -> str:
        return "".join(str(f) for f in self.factors)

    def __str__(self) -> str:
        return self.name


def _products(T: Sequence[int], min_block: int) -> list[BasisProduct]:
    out = []
    for part in set_partitions(sorted(T), min_block):
        choices = [_factor_choices(b) for b in part]

        def rec(i, acc):
            if i == len(choices):
                out.append(BasisProduct(tuple(sorted(acc, key=LieBasisElement.order_key))))
                return
            for c in choices[i]:
                rec(i + 1, acc + [c])

        rec(0, [])
    return out


def pi_basis_products(T: Iterable[int]) -> list[BasisProduct]:
    """Basis of the span of all words using exactly the letters of ``T``."""
    return _products(sorted(set(T)), 1)


def pi_basis(T: Iterable[int], p: int) -> list[WordPolynomial]:
    T = sorted(set(T))
    if len(T) != p + 1:
        raise ValueError(f"|T| = {len(T)} does not equal p+1 = {p + 1}")
    return [b.polynomial for b in pi_basis_products(T)]


def pi_n_basis_products(n: int, p: int) -> list[BasisProduct]:
    """Union of the bases over all ``(p+1)``-subsets ``T`` of ``1..n``, subsets in lexicographic order."""
    from itertools import combinations

    return [b for T in combinations(range(1, n + 1), p + 1) for b in pi_basis_products(T)]


def top_homology_products(m: int, r: int = 2) -> list[BasisProduct]:
    """Products of Reutenauer elements over partitions of ``1..m`` into blocks of size >= r."""
    if r < 2:
        raise ValueError("r must be at least 2")
    if m < 2:
        raise ValueError("m must be at least 2")
    return _products(range(1, m + 1), r)


def top_homology_basis(m: int, r: int = 2) -> list[WordPolynomial]:
    return [b.polynomial for b in top_homology_products(m, r)]


@lru_cache(maxsize=None)
def top_homology_rank(m: int, r: int = 2) -> int:
    """``|top_homology_basis(m, r)|`` by counting, valid also for m = 0, 1."""
    if m == 0:
        return 1
    total = 0
    for part in set_partitions(tuple(range(1, m + 1)), max(r, 2)):
        total += math.prod(math.factorial(len(b) - 1) for b in part)
    return total


def derangements(m: int) -> int:
    d = [1, 0]
    for k in range(2, m + 1):
        d.append((k - 1) * (d[-1] + d[-2]))
    return d[m]


# ---------------------------------------------------------------------------
# The chain complex Inj(m)


def injective_words(m: int, length: int) -> list[Word]:
    return sorted(permutations(range(1, m + 1), length))


def injective_word_complex(m: int) -> tuple[ChainComplex, list[list[Word]]]:
    """Unaugmented chain complex with ``(p+1)``-letter words in degree ``p``."""
    words = [injective_words(m, l) for l in range(1, m + 1)]
    index = [{w: i for i, w in enumerate(ws)} for ws in words]
    bd = {}
    for p in range(1, m):
        rows, cols, vals = [], [], []
        for j, w in enumerate(words[p]):
            for f, c in word_boundary(w).terms.items():
                rows.append(index[p - 1][f])
                cols.append(j)
                vals.append(c)
        bd[p] = SparseIntMatrix((len(words[p - 1]), len(words[p])), rows, cols, vals)
    return ChainComplex([len(ws) for ws in words], bd), words


def coefficient_matrix(polys: Sequence[WordPolynomial], words: Sequence[Word]) -> SparseIntMatrix:
    """Columns are the polynomials written in the word basis ``words``."""
    index = {w: i for i, w in enumerate(words)}
    rows, cols, vals = [], [], []
    for j, p in enumerate(polys):
        for w, c in p.terms.items():
            rows.append(index[w])
            cols.append(j)
            vals.append(c)
    return SparseIntMatrix((len(words), len(polys)), rows, cols, vals)
