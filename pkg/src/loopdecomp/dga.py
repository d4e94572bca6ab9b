"""Free differential graded algebras over F_p.

``T(a_1, ..., a_k; d)`` with ``d`` given on generators and extended as a
derivation with Koszul signs, ``d(ab) = (da)b + (-1)^{|a|} a(db)``.  Homology
is computed degree by degree from the word basis by Gaussian elimination
over F_p.  This is how the Adams-Hilton model of a three-cell complex
``P^{2n}(p^r) ∪ e^{4n-1}`` yields ``H_*(ΩV; F_p)``.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from sympy import isprime

from . import series as ps
from .errors import BasisTooLarge, InvalidDGA
from .series import PoincareSeries

DEFAULT_BASIS_CAP = 250_000

Word = tuple  # of generator indices
Chain = dict  # Word -> coefficient in F_p


@dataclass(frozen=True, eq=False)
class FreeDGA:
    """A free graded algebra with a derivation differential.

    ``diff`` maps a generator name to a dict ``{word: coeff}`` where a word is
    a tuple of generator names.  Generators missing from ``diff`` are cycles.
    ``bocksteins`` is bookkeeping only (``{"y": ("x", r)}`` for ``β^r y = x``);
    it does not enter the homology computation.
    """

    p: int
    generators: tuple
    diff: Mapping[str, Mapping[tuple, int]] = field(default_factory=dict)
    bocksteins: Mapping[str, tuple] = field(default_factory=dict)

    def __post_init__(self):
        if not isprime(self.p):
            raise InvalidDGA(f"{self.p} is not prime")
        gens = tuple((str(name), int(deg)) for name, deg in self.generators)
        names = [g for g, _ in gens]
        if len(set(names)) != len(names):
            raise InvalidDGA("duplicate generator names")
        if any(deg < 1 for _, deg in gens):
            raise InvalidDGA("generator degrees must be >= 1")
        object.__setattr__(self, "generators", gens)
        index = {g: i for i, g in enumerate(names)}
        object.__setattr__(self, "_index", index)
        object.__setattr__(self, "_degrees", tuple(deg for _, deg in gens))

        d_gen = {}
        for name, image in self.diff.items():
            if name not in index:
                raise InvalidDGA(f"differential given on unknown generator {name!r}")
            chain = {}
            for word, coeff in image.items():
                try:
                    w = tuple(index[letter] for letter in word)
                except KeyError as exc:
                    raise InvalidDGA(f"d({name}) uses undeclared generator {exc.args[0]!r}") from None
                if self.degree(w) != gens[index[name]][1] - 1:
                    raise InvalidDGA(f"d({name}) must lower degree by exactly 1")
                c = coeff % self.p
                if c:
                    chain[w] = (chain.get(w, 0) + c) % self.p
            d_gen[index[name]] = {w: c for w, c in chain.items() if c}
        object.__setattr__(self, "_d_gen", d_gen)

        for i in d_gen:
            if self.d_chain(d_gen[i]):
                raise InvalidDGA(f"d∘d != 0 on generator {names[i]!r}")

    def degree(self, word: Word) -> int:
        return sum(self._degrees[i] for i in word)

    def names(self, word: Word) -> tuple:
        return tuple(self.generators[i][0] for i in word)

    def d_word(self, word: Word) -> Chain:
        """Derivation extension: sum over letters with the Koszul sign of the prefix."""
        out: Chain = {}
        prefix_deg = 0
        p = self.p
        for pos, letter in enumerate(word):
            image = self._d_gen.get(letter)
            if image:
                sign = -1 if prefix_deg % 2 else 1
                head, tail = word[:pos], word[pos + 1 :]
                for w, c in image.items():
                    key = head + w + tail
                    out[key] = (out.get(key, 0) + sign * c) % p
            prefix_deg += self._degrees[letter]
        return {w: c for w, c in out.items() if c}

    def d_chain(self, chain: Chain) -> Chain:
        out: Chain = {}
        for word, coeff in chain.items():
            for w, c in self.d_word(word).items():
                out[w] = (out.get(w, 0) + coeff * c) % self.p
        return {w: c for w, c in out.items() if c}

    def word_basis(self, top: int, cap: int = DEFAULT_BASIS_CAP) -> list[list[Word]]:
        """All words by degree, ``0 <= degree <= top``."""
        basis: list[list[Word]] = [[] for _ in range(top + 1)]
        basis[0] = [()]
        for d in range(1, top + 1):
            words = []
            for i, deg in enumerate(self._degrees):
                if deg <= d:
                    words.extend(w + (i,) for w in basis[d - deg])
            if len(words) > cap:
                raise BasisTooLarge(f"{len(words)} words in degree {d} exceeds the cap of {cap}")
            basis[d] = words
        return basis

    def check_d_squared(self, top: int, cap: int = DEFAULT_BASIS_CAP) -> bool:
        return all(not self.d_chain(self.d_word(w)) for words in self.word_basis(top, cap) for w in words)


def graded_commutator(a: str, deg_a: int, b: str, deg_b: int) -> dict:
    """``[a, b] = ab - (-1)^{|a||b|} ba`` as a chain on names."""
    sign = -1 if (deg_a * deg_b) % 2 == 0 else 1
    if a == b:
        return {(a, a): 1 + sign} if 1 + sign else {}
    return {(a, b): 1, (b, a): sign}


def ah_model_V(n: int, p: int, r: int) -> FreeDGA:
    """Adams-Hilton model ``T(x, y, z; dz = [x, y])`` for ``P^{2n}(p^r) ∪ e^{4n-1}``."""
    if n < 2:
        raise InvalidDGA("need n >= 2")
    if r < 1:
        raise InvalidDGA("need r >= 1")
    dx, dy, dz = 2 * n - 2, 2 * n - 1, 4 * n - 2
    return FreeDGA(
        p=p,
        generators=(("x", dx), ("y", dy), ("z", dz)),
        diff={"z": graded_commutator("x", dx, "y", dy)},
        bocksteins={"y": ("x", r)},
    )


def rank_mod_p(rows: Sequence[Mapping[int, int]], p: int) -> int:
    """Rank over F_p of a sparse matrix given as row dicts ``{col: value}``.

    The matrix is split into connected blocks (rows sharing a column) first;
    the differentials here are very block-diagonal so this keeps elimination
    cheap.
    """
    parent: dict = {}

    def find(a):
        while parent.setdefault(a, a) != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    live = [r for r in rows if r]
    for row in live:
        cols = iter(row)
        first = find(next(cols))
        for c in cols:
            root = find(c)
            if root != first:
                parent[root] = first
    blocks = defaultdict(list)
    for row in live:
        blocks[find(next(iter(row)))].append(row)
    return sum(_eliminate(block, p) for block in blocks.values())


def _eliminate(rows, p) -> int:
    pivots: dict[int, dict] = {}
    for row in rows:
        row = dict(row)
        while row:
            col = min(row)
            if col not in pivots:
                inv = pow(row[col], -1, p)
                pivots[col] = {c: v * inv % p for c, v in row.items()}
                break
            factor = row[col]
            for c, v in pivots[col].items():
                nv = (row.get(c, 0) - factor * v) % p
                if nv:
                    row[c] = nv
                else:
                    row.pop(c, None)
    return len(pivots)


def differential_ranks(D: FreeDGA, top: int, cap: int = DEFAULT_BASIS_CAP) -> tuple[list[int], list[int]]:
    """Word counts and ranks of ``d: C_d -> C_{d-1}`` for ``0 <= d <= top``."""
    basis = D.word_basis(top, cap)
    counts = [len(words) for words in basis]
    ranks = [0] * (top + 1)
    for d in range(1, top + 1):
        target = {w: i for i, w in enumerate(basis[d - 1])}
        rows = [{target[w]: c for w, c in D.d_word(word).items()} for word in basis[d]]
        ranks[d] = rank_mod_p(rows, D.p)
    return counts, ranks


def dga_homology_dims(D: FreeDGA, bound: int, cap: int = DEFAULT_BASIS_CAP) -> PoincareSeries:
    """``dim H_d`` for ``d <= bound`` as a series."""
    if bound < 1:
        raise ValueError("bound must be >= 1")
    counts, ranks = differential_ranks(D, bound + 1, cap)
    dims = [counts[d] - ranks[d] - ranks[d + 1] for d in range(bound + 1)]
    return PoincareSeries(tuple(dims))


def poly_dims(deg_x: int, deg_y: int, bound: int) -> PoincareSeries:
    """Graded dimensions of a polynomial algebra on two generators, by counting."""
    if deg_x < 1 or deg_y < 1:
        raise ValueError("generator degrees must be >= 1")
    coeffs = [0] * (bound + 1)
    for i in range(bound // deg_x + 1):
        for j in range((bound - i * deg_x) // deg_y + 1):
            coeffs[i * deg_x + j * deg_y] += 1
    return PoincareSeries(tuple(coeffs))


def generator_series(D: FreeDGA, bound: int) -> PoincareSeries:
    coeffs = [0] * (bound + 1)
    for _, deg in D.generators:
        if deg <= bound:
            coeffs[deg] += 1
    return ps.PoincareSeries(tuple(coeffs))
