"""Hilton-Milnor splitting of ``Ω(ΣA_1 ∨ ... ∨ ΣA_k)``.

The loop space splits as a weak product of ``ΩΣ(A_{i_1} ∧ ... ∧ A_{i_j})``,
one factor per basic product.  Basic products are counted by Lyndon words, and
since smash products are symmetric up to homotopy only the letter content of a
word matters for the factor.  That lets the series check run over content
vectors (counted by Witt's formula) instead of enumerating words one by one.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from functools import lru_cache, reduce
from itertools import product as cartesian
from math import factorial, gcd
from typing import Sequence

from sympy import divisors, factorint

from . import series as ps
from .errors import ExpansionTooLarge
from .series import PoincareSeries
from .spaces import (
    Loop,
    Product,
    Space,
    Wedge,
    Susp,
    _atoms_nf,
    _cell_bottom,
    _shift_nf,
    _smash_nf,
    canonical,
    mod_p_series,
    nf_series,
    nf_to_space,
)

DEFAULT_MAX_FACTORS = 10_000


@dataclass(frozen=True)
class LyndonWord:
    """Letters are 1-based indices into the alphabet."""

    letters: tuple
    weight: int

    def __post_init__(self):
        letters = tuple(self.letters)
        if not letters:
            raise ValueError("a Lyndon word is nonempty")
        if self.weight <= 0:
            raise ValueError("weight must be positive")
        if not is_lyndon(letters):
            raise ValueError(f"{letters} is not a Lyndon word")
        object.__setattr__(self, "letters", letters)

    def __len__(self):
        return len(self.letters)

    def __str__(self):
        return "".join(map(str, self.letters)) if all(a < 10 for a in self.letters) else ".".join(map(str, self.letters))

    def content(self, k: int) -> tuple:
        counts = Counter(self.letters)
        return tuple(counts[i] for i in range(1, k + 1))


def is_lyndon(word: Sequence) -> bool:
    """Strictly smaller than every proper rotation."""
    w = tuple(word)
    return bool(w) and all(w < w[i:] + w[:i] for i in range(1, len(w)))


def _duval(k: int, max_len: int):
    # Duval's algorithm: Lyndon words over 1..k of length <= max_len, lex order
    w = [0]
    while w:
        yield tuple(a + 1 for a in w)
        m = len(w)
        while len(w) < max_len:
            w.append(w[len(w) - m])
        while w and w[-1] == k - 1:
            w.pop()
        if w:
            w[-1] += 1


def lyndon_words(letter_degrees: Sequence[int], N: int) -> list[LyndonWord]:
    """Lyndon words of weight <= N, sorted by length then lexicographically."""
    degs = [int(d) for d in letter_degrees]
    if not degs:
        raise ValueError("alphabet must be nonempty")
    if any(d < 1 for d in degs):
        raise ValueError("letter degrees must be >= 1")
    if N < min(degs):
        return []
    out = []
    for letters in _duval(len(degs), N // min(degs)):
        weight = sum(degs[a - 1] for a in letters)
        if weight <= N:
            out.append(LyndonWord(letters, weight))
    out.sort(key=lambda w: (len(w.letters), w.letters))
    return out


@lru_cache(maxsize=None)
def mobius(n: int) -> int:
    exps = factorint(n).values()
    return 0 if any(e > 1 for e in exps) else (-1) ** len(exps)


def necklace_count(k: int, length: int) -> int:
    """Number of Lyndon words of the given length over ``k`` letters."""
    return sum(mobius(d) * k ** (length // d) for d in divisors(length)) // length


def lyndon_count(content: Sequence[int]) -> int:
    """Number of Lyndon words with ``content[i]`` copies of letter ``i``."""
    return _lyndon_count(tuple(sorted(int(x) for x in content if x)))


@lru_cache(maxsize=None)
def _lyndon_count(c: tuple) -> int:
    total = sum(c)
    if total == 0:
        return 0
    g = reduce(gcd, (x for x in c if x))
    acc = 0
    for d in divisors(g):
        mu = mobius(d)
        if mu:
            multinom = factorial(total // d)
            for x in c:
                multinom //= factorial(x // d)
            acc += mu * multinom
    return acc // total


# factors


@dataclass(frozen=True)
class HMFactor:
    """``ΩΣ`` of the smash of letters with the given content, ``count`` times."""

    content: tuple
    weight: int
    count: int
    smash: Counter  # normal form of the smash A^{∧content}

    def space(self) -> Space:
        return canonical(Loop(nf_to_space(_shift_nf(self.smash, 1))))


def _letter_cells(summands: Sequence[Space]) -> list[Counter]:
    cells = [_atoms_nf(a) for a in summands]
    for a, nf in zip(summands, cells):
        if not nf:
            raise ValueError(f"summand {a} is contractible")
    return cells


def letter_degrees(summands: Sequence[Space]) -> list[int]:
    """Bottom reduced homology degree of each summand."""
    return [min(_cell_bottom(c) for c in nf) for nf in _letter_cells(summands)]


def _contents(degs: Sequence[int], N: int):
    ranges = [range(N // d + 1) for d in degs]
    for c in cartesian(*ranges):
        w = sum(x * d for x, d in zip(c, degs))
        if 0 < w <= N:
            yield c, w


def hm_factors(summands: Sequence[Space], N: int) -> list[HMFactor]:
    """Factors of weight <= N grouped by letter content; contractible ones dropped.

    Ordered by (weight, word length, content) with the content compared
    in reverse so that lower letters come first, matching lex order on words.
    """
    cells = _letter_cells(summands)
    degs = letter_degrees(summands)
    smashes: dict[tuple, Counter] = {}
    out = []
    for content, weight in sorted(_contents(degs, N), key=lambda cw: (cw[1], sum(cw[0]), tuple(-x for x in cw[0]))):
        count = lyndon_count(content)
        if not count:
            continue
        smash = _smash_content(content, cells, smashes)
        if smash:
            out.append(HMFactor(content, weight, count, smash))
    return out


def _smash_content(content, cells, memo) -> Counter:
    # not truncated, so a factor does not depend on the bound it was built at
    if content in memo:
        return memo[content]
    i = max(j for j, x in enumerate(content) if x)
    rest = content[:i] + (content[i] - 1,) + content[i + 1 :]
    if not any(rest):
        nf = Counter(cells[i])
    else:
        nf = _smash_nf(_smash_content(rest, cells, memo), cells[i])
    memo[content] = nf
    return nf


def hm_expansion(summands: Sequence[Space], N: int, max_factors: int = DEFAULT_MAX_FACTORS) -> Space:
    """``Ω(ΣA_1 ∨ ... ∨ ΣA_k)`` as the product of its Hilton-Milnor factors up to ``N``.

    Repeated factors are written out, so the product can be large; more than
    ``max_factors`` factors raises :class:`ExpansionTooLarge`.
    """
    factors = hm_factors(summands, N)
    total = sum(f.count for f in factors)
    if total > max_factors:
        raise ExpansionTooLarge(f"{total} factors up to degree {N} (cap {max_factors})")
    kids = []
    for f in factors:
        kids.extend([f.space()] * f.count)
    if len(kids) == 1:
        return kids[0]
    return Product(tuple(kids)) if kids else canonical(Product(()))


def geometric_route(summands: Sequence[Space], p, N: int) -> PoincareSeries:
    """Bott-Samelson: tensor algebra on the reduced homology of the wedge."""
    return mod_p_series(Loop(Wedge(tuple(Susp(a) for a in summands))), p, N)


def lyndon_route(summands: Sequence[Space], p, N: int) -> PoincareSeries:
    """Product over Hilton-Milnor factors, each a tensor algebra raised to its count."""
    grouped: dict[tuple, int] = Counter()
    for f in hm_factors(summands, N):
        red = nf_series(f.smash, p, N)
        if not red.is_zero():
            grouped[red.coeffs] += f.count
    acc = ps.one(N)
    for coeffs, count in sorted(grouped.items()):
        acc = acc * ps.ps_pow(ps.ps_geometric(PoincareSeries(coeffs)), count)
    return acc


def hm_series_check(summands: Sequence[Space], p, N: int) -> bool:
    return geometric_route(summands, p, N) == lyndon_route(summands, p, N)
