"""Space expressions and the rewrite calculus.

Atoms are spheres, Moore spaces ``P^d(q)`` (cofibre of degree ``q`` on
``S^{d-1}``), the fibres ``S^d{p^r}`` of the degree ``p^r`` map, loops on odd
spheres and opaque loop spaces.  Compound nodes are wedge, product, smash,
suspension and loop.

The normal form of a suspension-shaped expression is a finite wedge of spheres
and prime-power Moore spaces.  Infinite wedges (James splitting, the splitting
of ``Σ S^{2n-1}{p^r}``, Bott-Samelson words) are cut off at a degree bound:
a summand is kept iff its lowest nonzero reduced homology degree is at most
the bound, which keeps the mod-p series exact up to that degree.
"""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass
from functools import lru_cache
from math import inf
from typing import Mapping, NamedTuple, Union

from sympy import factorint, isprime

from . import series as ps
from .errors import (
    DimTooLow,
    ExpressionParseError,
    Mod2SmashUnsupported,
    NonzeroConstantTerm,
    UnboundOpaqueLoop,
    UnsupportedLoopShape,
    UnsupportedShape,
)
from .series import PoincareSeries

RATIONAL = "Q"


class Space:
    """Base class for every node; rendering goes through :func:`render`."""

    __slots__ = ()

    def __str__(self):
        return render(self)


# atoms


@dataclass(frozen=True, repr=False)
class Point(Space):
    def __repr__(self):
        return "Point()"


@dataclass(frozen=True, repr=False)
class Sphere(Space):
    dim: int

    def __post_init__(self):
        if self.dim < 1:
            raise DimTooLow(f"sphere dimension must be >= 1, got {self.dim}")

    def __repr__(self):
        return f"Sphere({self.dim})"


@dataclass(frozen=True, repr=False)
class Moore(Space):
    dim: int
    order: int

    def __post_init__(self):
        if self.dim < 3:
            raise DimTooLow(f"only simply-connected Moore spaces (dim >= 3), got P^{self.dim}")
        if self.order < 2:
            raise ValueError(f"Moore space order must be >= 2, got {self.order}")

    def __repr__(self):
        return f"Moore({self.dim}, {self.order})"


@dataclass(frozen=True, repr=False)
class FibS(Space):
    """``S^dim{prime^exponent}``, the homotopy fibre of the degree ``p^r`` map."""

    dim: int
    prime: int
    exponent: int

    def __post_init__(self):
        if self.dim < 3 or self.dim % 2 == 0:
            raise ValueError(f"S^d{{p^r}} needs odd d >= 3, got {self.dim}")
        if not isprime(self.prime):
            raise ValueError(f"{self.prime} is not prime")
        if self.exponent < 1:
            raise ValueError("exponent must be >= 1")

    @property
    def order(self) -> int:
        return self.prime**self.exponent

    def __repr__(self):
        return f"FibS({self.dim}, {self.prime}, {self.exponent})"


@dataclass(frozen=True, repr=False)
class LoopSphere(Space):
    dim: int

    def __post_init__(self):
        if self.dim < 3 or self.dim % 2 == 0:
            raise ValueError(f"LoopSphere needs an odd sphere of dim >= 3, got {self.dim}")

    def __repr__(self):
        return f"LoopSphere({self.dim})"


@dataclass(frozen=True, repr=False)
class OpaqueLoop(Space):
    """A loop space we do not decompose; its series must be supplied."""

    tag: str

    def __post_init__(self):
        if not _TAG_RE.fullmatch(self.tag) or self.tag in ("v", "x", "Om", "Sg"):
            raise ValueError(f"bad opaque tag {self.tag!r}")

    def __repr__(self):
        return f"OpaqueLoop({self.tag!r})"


# compound nodes


@dataclass(frozen=True, repr=False)
class Wedge(Space):
    children: tuple

    def __post_init__(self):
        object.__setattr__(self, "children", tuple(self.children))

    def __repr__(self):
        return f"Wedge({list(self.children)!r})"


@dataclass(frozen=True, repr=False)
class Product(Space):
    children: tuple

    def __post_init__(self):
        object.__setattr__(self, "children", tuple(self.children))

    def __repr__(self):
        return f"Product({list(self.children)!r})"


@dataclass(frozen=True, repr=False)
class Smash(Space):
    left: Space
    right: Space

    def __repr__(self):
        return f"Smash({self.left!r}, {self.right!r})"


@dataclass(frozen=True, repr=False)
class Susp(Space):
    child: Space

    def __repr__(self):
        return f"Susp({self.child!r})"


@dataclass(frozen=True, repr=False)
class Loop(Space):
    child: Space

    def __repr__(self):
        return f"Loop({self.child!r})"


ATOMS = (Point, Sphere, Moore, FibS, LoopSphere, OpaqueLoop)
SpaceExpr = Union[Point, Sphere, Moore, FibS, LoopSphere, OpaqueLoop, Wedge, Product, Smash, Susp, Loop]

POINT = Point()


def wedge(*children: Space) -> Space:
    return canonical(Wedge(children))


def product(*children: Space) -> Space:
    return canonical(Product(children))


def prime_power(q: int) -> tuple[int, int]:
    """Return ``(p, r)`` with ``q == p**r``, or raise ValueError."""
    f = factorint(q)
    if len(f) != 1:
        raise ValueError(f"{q} is not a prime power")
    ((p, r),) = f.items()
    return p, r


# ordering and canonical form


@lru_cache(maxsize=None)
def bottom(x: Space):
    """Lowest degree of nonzero reduced integral homology (``inf`` for a point)."""
    if isinstance(x, Point):
        return inf
    if isinstance(x, Sphere):
        return x.dim
    if isinstance(x, (Moore, FibS, LoopSphere)):
        return x.dim - 1
    if isinstance(x, OpaqueLoop):
        return 0
    if isinstance(x, (Wedge, Product)):
        return min((bottom(c) for c in x.children), default=inf)
    if isinstance(x, Smash):
        return bottom(x.left) + bottom(x.right)
    if isinstance(x, Susp):
        return bottom(x.child) + 1
    if isinstance(x, Loop):
        return bottom(x.child) - 1
    raise TypeError(x)


@lru_cache(maxsize=None)
def top(x: Space):
    if isinstance(x, Point):
        return 0
    if isinstance(x, (Sphere, Moore)):
        return x.dim
    if isinstance(x, (FibS, LoopSphere, OpaqueLoop, Loop)):
        return inf
    if isinstance(x, Wedge):
        return max((top(c) for c in x.children), default=0)
    if isinstance(x, Product):
        return sum(top(c) for c in x.children)
    if isinstance(x, Smash):
        return top(x.left) + top(x.right)
    if isinstance(x, Susp):
        return top(x.child) + 1
    raise TypeError(x)


def _order(x: Space) -> int:
    return getattr(x, "order", 0)


def sort_key(x: Space):
    # connectivity, then dimension, then larger torsion first; rendering breaks ties
    return (bottom(x), top(x), -_order(x), render(x))


@lru_cache(maxsize=None)
def canonical(x: Space) -> Space:
    """Flatten, drop points, apply definitional suspension identities, sort."""
    if isinstance(x, ATOMS):
        return x
    if isinstance(x, (Wedge, Product)):
        kind = type(x)
        flat = []
        for c in x.children:
            c = canonical(c)
            if isinstance(c, Point):
                continue
            if isinstance(c, kind):
                flat.extend(c.children)
            else:
                flat.append(c)
        if not flat:
            return POINT
        if len(flat) == 1:
            return flat[0]
        return kind(tuple(sorted(flat, key=sort_key)))
    if isinstance(x, Smash):
        left, right = canonical(x.left), canonical(x.right)
        if isinstance(left, Point) or isinstance(right, Point):
            return POINT
        if isinstance(left, Sphere) and isinstance(right, Sphere):
            return Sphere(left.dim + right.dim)
        left, right = sorted((left, right), key=sort_key)
        return Smash(left, right)
    if isinstance(x, Susp):
        c = canonical(x.child)
        if isinstance(c, Point):
            return POINT
        if isinstance(c, Sphere):
            return Sphere(c.dim + 1)
        if isinstance(c, Moore):
            return Moore(c.dim + 1, c.order)
        return Susp(c)
    if isinstance(x, Loop):
        c = canonical(x.child)
        if isinstance(c, Point):
            return POINT
        if isinstance(c, Sphere) and c.dim >= 3 and c.dim % 2 == 1:
            return LoopSphere(c.dim)
        return Loop(c)
    raise TypeError(x)


# rendering and parsing

_TAG_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_']*")


def _is_atomic_render(x: Space) -> bool:
    return isinstance(x, ATOMS) or isinstance(x, (Susp, Loop))


def _wrap(x: Space) -> str:
    s = render(x)
    return s if _is_atomic_render(x) else f"({s})"


@lru_cache(maxsize=None)
def render(x: Space) -> str:
    """Stable ASCII rendering, e.g. ``S^7 v P^4(9) v (S^3{9} x Om S^7)``."""
    if isinstance(x, Point):
        return "*"
    if isinstance(x, Sphere):
        return f"S^{x.dim}"
    if isinstance(x, Moore):
        return f"P^{x.dim}({x.order})"
    if isinstance(x, FibS):
        return f"S^{x.dim}{{{x.order}}}"
    if isinstance(x, LoopSphere):
        return f"Om S^{x.dim}"
    if isinstance(x, OpaqueLoop):
        return f"Om {x.tag}"
    if isinstance(x, Wedge):
        return " v ".join(_wrap(c) for c in x.children)
    if isinstance(x, Product):
        return " x ".join(_wrap(c) for c in x.children)
    if isinstance(x, Smash):
        return f"{_wrap(x.left)} /\\ {_wrap(x.right)}"
    if isinstance(x, Susp):
        c = x.child
        return f"Sg {render(c)}" if isinstance(c, ATOMS) else f"Sg ({render(c)})"
    if isinstance(x, Loop):
        c = x.child
        return f"Om {render(c)}" if isinstance(c, ATOMS) else f"Om ({render(c)})"
    raise TypeError(x)


_TOKEN_RE = re.compile(
    r"\s*(?:(?P<fib>S\^\d+\{\d+\})|(?P<sph>S\^\d+)|(?P<moore>P\^\d+\(\d+\))"
    r"|(?P<op>/\\|[()*])|(?P<word>[A-Za-z_][A-Za-z0-9_']*))"
)


def _tokenize(text: str):
    pos, out = 0, []
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m or m.end() == pos:
            raise ExpressionParseError(f"unexpected character {text[pos]!r}", pos)
        kind = m.lastgroup
        out.append((kind, m.group(kind), m.start(kind)))
        pos = m.end()
    return out


class _Parser:
    def __init__(self, text):
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else (None, None, None)

    def take(self, value=None):
        tok = self.peek()
        if tok[0] is None or (value is not None and tok[1] != value):
            raise ExpressionParseError(f"expected {value or 'a term'}, got {tok[1]!r}", tok[2])
        self.i += 1
        return tok

    def parse(self):
        x = self.wedge()
        if self.i != len(self.toks):
            tok = self.peek()
            raise ExpressionParseError(f"trailing input {tok[1]!r}", tok[2])
        return x

    def nary(self, sub, word, cls):
        items = [sub()]
        while self.peek()[1] == word:
            self.take(word)
            items.append(sub())
        return items[0] if len(items) == 1 else cls(tuple(items))

    def wedge(self):
        return self.nary(self.product, "v", Wedge)

    def product(self):
        return self.nary(self.smash, "x", Product)

    def smash(self):
        x = self.unary()
        while self.peek()[1] == "/\\":
            self.take("/\\")
            x = Smash(x, self.unary())
        return x

    def unary(self):
        kind, val, pos = self.peek()
        if val == "Om":
            self.take()
            kind, val, pos = self.peek()
            if kind == "word" and val not in ("v", "x", "Om", "Sg"):
                self.take()
                return OpaqueLoop(val)
            if kind in ("sph", "fib", "moore") or val in ("(", "*"):
                inner = self.primary()
                if isinstance(inner, Sphere) and inner.dim >= 3 and inner.dim % 2:
                    return LoopSphere(inner.dim)
                return Loop(inner)
            raise ExpressionParseError("bad loop operand", pos)
        if val == "Sg":
            self.take()
            return Susp(self.unary())
        return self.primary()

    def primary(self):
        kind, val, pos = self.take()
        try:
            if val == "*":
                return POINT
            if kind == "sph":
                return Sphere(int(val[2:]))
            if kind == "fib":
                d, q = re.fullmatch(r"S\^(\d+)\{(\d+)\}", val).groups()
                p, r = prime_power(int(q))
                return FibS(int(d), p, r)
            if kind == "moore":
                d, q = re.fullmatch(r"P\^(\d+)\((\d+)\)", val).groups()
                return Moore(int(d), int(q))
        except ValueError as exc:
            raise ExpressionParseError(str(exc), pos) from exc
        if val == "(":
            x = self.wedge()
            self.take(")")
            return x
        raise ExpressionParseError(f"unexpected {val!r}", pos)


def parse_expr(text: str) -> Space:
    """Inverse of :func:`render` (the result is not canonicalized)."""
    return _Parser(text).parse()


# normal forms: Counter of cells ('S', dim, 0, 0) / ('P', dim, p, r)

Cell = tuple


class Normalized(NamedTuple):
    space: Space
    truncated: bool


def _cell_bottom(c: Cell) -> int:
    return c[1] if c[0] == "S" else c[1] - 1


def _cell_space(c: Cell) -> Space:
    return Sphere(c[1]) if c[0] == "S" else Moore(c[1], c[2] ** c[3])


def _moore_cells(dim: int, order: int) -> list[Cell]:
    return [("P", dim, p, r) for p, r in sorted(factorint(order).items())]


def _atoms_nf(x: Space) -> Counter:
    """Normal form of an expression that already is a wedge of spheres/Moore spaces."""
    x = canonical(x)
    out = Counter()
    for c in x.children if isinstance(x, Wedge) else (x,):
        if isinstance(c, Point):
            continue
        if isinstance(c, Sphere):
            out[("S", c.dim, 0, 0)] += 1
        elif isinstance(c, Moore):
            out.update(_moore_cells(c.dim, c.order))
        else:
            raise UnsupportedShape(f"{render(c)} is not a sphere or Moore space")
    return out


def nf_to_space(nf: Mapping[Cell, int]) -> Space:
    kids = []
    for c, k in nf.items():
        kids.extend([_cell_space(c)] * k)
    return canonical(Wedge(tuple(kids)))


def _smash_cells(a: Cell, b: Cell) -> list[Cell]:
    if a[0] == "S" and b[0] == "S":
        return [("S", a[1] + b[1], 0, 0)]
    if a[0] == "S" or b[0] == "S":
        s, m = (a, b) if a[0] == "S" else (b, a)
        return [("P", s[1] + m[1], m[2], m[3])]
    if a[2] != b[2]:
        return []
    r = min(a[3], b[3])
    if a[2] ** r == 2:
        raise Mod2SmashUnsupported(
            f"P^{a[1]}({a[2] ** a[3]}) /\\ P^{b[1]}({b[2] ** b[3]}): no splitting when the smaller order is 2"
        )
    d = a[1] + b[1]
    return [("P", d, a[2], r), ("P", d - 1, a[2], r)]


def _smash_nf(x: Mapping[Cell, int], y: Mapping[Cell, int], bound=inf) -> Counter:
    out = Counter()
    for a, ka in x.items():
        for b, kb in y.items():
            if _cell_bottom(a) + _cell_bottom(b) > bound:
                continue
            for c in _smash_cells(a, b):
                out[c] += ka * kb
    return out


def _shift_nf(x: Mapping[Cell, int], k: int) -> Counter:
    return Counter({(c[0], c[1] + k, c[2], c[3]): m for c, m in x.items()})


def _cut(x: Mapping[Cell, int], bound) -> tuple[Counter, bool]:
    kept = Counter({c: m for c, m in x.items() if _cell_bottom(c) <= bound and m})
    return kept, len(kept) != sum(1 for m in x.values() if m)


def _is_suspension(x: Space) -> bool:
    if isinstance(x, (Point, Moore, Susp)):
        return True
    if isinstance(x, Sphere):
        return x.dim >= 2
    if isinstance(x, Wedge):
        return all(_is_suspension(c) for c in x.children)
    if isinstance(x, Smash):
        return _is_suspension(x.left) or _is_suspension(x.right)
    return False


def _susp_nf(x: Space, bound: int) -> tuple[Counter, bool]:
    """Normal form of ``Σx`` keeping summands with bottom degree <= bound."""
    if isinstance(x, Point):
        return Counter(), False
    if isinstance(x, Sphere):
        return _cut(Counter({("S", x.dim + 1, 0, 0): 1}), bound)
    if isinstance(x, Moore):
        return _cut(Counter(_moore_cells(x.dim + 1, x.order)), bound)
    if isinstance(x, FibS):
        # ΣS^{2n-1}{p^r} = ⋁_{k>=1} P^{(2n-2)k+2}(p^r)
        step = x.dim - 1
        out = Counter()
        k = 1
        while step * k + 1 <= bound:
            out[("P", step * k + 2, x.prime, x.exponent)] += 1
            k += 1
        return out, True
    if isinstance(x, LoopSphere):
        step = x.dim - 1
        out = Counter()
        k = 1
        while step * k + 1 <= bound:
            out[("S", step * k + 1, 0, 0)] += 1
            k += 1
        return out, True
    if isinstance(x, OpaqueLoop):
        raise UnsupportedShape(f"cannot normalize opaque loop space {render(x)}")
    if isinstance(x, Wedge):
        out, trunc = Counter(), False
        for c in x.children:
            nf, t = _susp_nf(c, bound)
            out.update(nf)
            trunc |= t
        return out, trunc
    if isinstance(x, Product):
        # Σ(B×C) = ΣB ∨ ΣC ∨ Σ(B∧C)
        acc, trunc = _susp_nf(x.children[0], bound)
        for c in x.children[1:]:
            nf, t = _susp_nf(c, bound)
            cross, t2 = _cut(_shift_nf(_smash_nf(acc, nf, bound + 1), -1), bound)
            acc = acc + nf + cross
            trunc |= t or t2
        return acc, trunc
    if isinstance(x, Smash):
        left, t1 = _susp_nf(x.left, bound)
        right, t2 = _susp_nf(x.right, bound)
        out, t3 = _cut(_shift_nf(_smash_nf(left, right, bound + 1), -1), bound)
        return out, t1 or t2 or t3
    if isinstance(x, Susp):
        nf, t = _susp_nf(x.child, bound - 1)
        return _shift_nf(nf, 1), t
    if isinstance(x, Loop):
        return _susp_loop_nf(x.child, bound)
    raise TypeError(x)


def _susp_loop_nf(c: Space, bound: int) -> tuple[Counter, bool]:
    # ΣΩΣY = ⋁_{k>=1} ΣY^{∧k}; here base = ΣY as a wedge
    c = canonical(c)
    if not _is_suspension(c):
        raise UnsupportedShape(f"cannot split Σ Om ({render(c)}): not a suspension")
    base, trunc = _nf_of_suspension(c, bound)
    if not base:
        return Counter(), trunc
    low = min(_cell_bottom(b) for b in base)
    if low < 2:
        raise UnsupportedShape(f"Om ({render(c)}) is not connected enough to split")
    out = Counter(base)
    power = base
    k = 1
    while True:
        k += 1
        # bottom of the k-th summand is k*(low-1)+1
        if k * (low - 1) + 1 > bound:
            break
        power, t = _cut(_shift_nf(_smash_nf(power, base, bound + 1), -1), bound)
        out.update(power)
    return out, True


def _nf_of_suspension(x: Space, bound: int) -> tuple[Counter, bool]:
    nf, trunc = _susp_nf(x, bound + 1)
    return _shift_nf(nf, -1), trunc


def suspend_normalize(x: Space, bound: int = ps.DEFAULT_BOUND) -> Normalized:
    """Wedge decomposition of ``Σx`` up to ``bound``."""
    nf, trunc = _susp_nf(canonical(x), bound)
    return Normalized(nf_to_space(nf), trunc)


def normalize(x: Space, bound: int = ps.DEFAULT_BOUND) -> Normalized:
    """Wedge decomposition of a suspension-shaped ``x`` up to ``bound``."""
    x = canonical(x)
    if not _is_suspension(x):
        raise UnsupportedShape(f"{render(x)} is not a suspension")
    nf, trunc = _nf_of_suspension(x, bound)
    return Normalized(nf_to_space(nf), trunc)


def normal_form(x: Space, bound: int = ps.DEFAULT_BOUND) -> tuple[Counter, bool]:
    """Like :func:`normalize` but returns the cell multiset."""
    x = canonical(x)
    if not _is_suspension(x):
        raise UnsupportedShape(f"{render(x)} is not a suspension")
    return _nf_of_suspension(x, bound)


def nf_cells(nf: Mapping[Cell, int]) -> list[tuple[Space, int]]:
    """Summands with multiplicities in canonical order."""
    items = [(_cell_space(c), m) for c, m in nf.items() if m]
    return sorted(items, key=lambda item: sort_key(item[0]))


def nf_series(nf: Mapping[Cell, int], p, bound: int) -> PoincareSeries:
    """Reduced mod-p series of a normal form, read off cell by cell."""
    coeffs = [0] * (bound + 1)
    for c, m in nf.items():
        if c[0] == "S":
            if c[1] <= bound:
                coeffs[c[1]] += m
        elif p != RATIONAL and c[2] == p:
            for d in (c[1] - 1, c[1]):
                if d <= bound:
                    coeffs[d] += m
    return PoincareSeries(tuple(coeffs))


def moore_split(dim: int, order: int) -> Space:
    """``P^dim(order)`` as a wedge of prime-power Moore spaces."""
    if dim < 3:
        raise DimTooLow(f"Moore spaces need dim >= 3, got {dim}")
    if order < 2:
        raise ValueError("order must be >= 2")
    return nf_to_space(Counter(_moore_cells(dim, order)))


def smash_normalize(x: Space, y: Space) -> Space:
    return nf_to_space(_smash_nf(_atoms_nf(x), _atoms_nf(y)))


# localization


def localize(x: Space, at) -> Space:
    """Localize at a prime ``at`` or rationally (``at == RATIONAL``)."""
    return canonical(_localize(canonical(x), at))


def _p_part(order: int, p) -> int:
    if p == RATIONAL:
        return 1
    q = 1
    while order % p == 0:
        order //= p
        q *= p
    return q


def _localize(x: Space, at) -> Space:
    if isinstance(x, Moore):
        q = _p_part(x.order, at)
        return POINT if q == 1 else Moore(x.dim, q)
    if isinstance(x, FibS):
        return x if at == x.prime else POINT
    if isinstance(x, ATOMS):
        return x
    if isinstance(x, Wedge):
        return Wedge(tuple(_localize(c, at) for c in x.children))
    if isinstance(x, Product):
        return Product(tuple(_localize(c, at) for c in x.children))
    if isinstance(x, Smash):
        return Smash(_localize(x.left, at), _localize(x.right, at))
    if isinstance(x, Susp):
        return Susp(_localize(x.child, at))
    if isinstance(x, Loop):
        return Loop(_localize(x.child, at))
    raise TypeError(x)


# mod-p series

Bindings = Mapping[str, PoincareSeries]


def mod_p_series(x: Space, p, bound: int = ps.DEFAULT_BOUND, bindings: Bindings | None = None) -> PoincareSeries:
    """Unreduced Poincaré series of ``H_*(x; F_p)`` (``p == RATIONAL`` for Q)."""
    return _series(canonical(x), p, bound, bindings or {})


def rational_series(x: Space, bound: int = ps.DEFAULT_BOUND, bindings: Bindings | None = None) -> PoincareSeries:
    return mod_p_series(x, RATIONAL, bound, bindings)


def _divides(p, order: int) -> bool:
    return p != RATIONAL and order % p == 0


def _series(x: Space, p, bound: int, bindings: Bindings) -> PoincareSeries:
    if isinstance(x, Point):
        return ps.one(bound)
    if isinstance(x, Sphere):
        return ps.one(bound) + ps.monomial(x.dim, bound)
    if isinstance(x, Moore):
        if not _divides(p, x.order):
            return ps.one(bound)
        return ps.one(bound) + ps.monomial(x.dim - 1, bound) + ps.monomial(x.dim, bound)
    if isinstance(x, FibS):
        if p != x.prime:
            return ps.one(bound)
        # Λ(a) ⊗ F_p[b], |a| = dim, |b| = dim - 1
        return ps.ps_from_rational(_one_plus(x.dim, 1), _one_plus(x.dim - 1, -1), bound)
    if isinstance(x, LoopSphere):
        return ps.ps_from_rational([1], _one_plus(x.dim - 1, -1), bound)
    if isinstance(x, OpaqueLoop):
        try:
            s = bindings[x.tag]
        except KeyError:
            raise UnboundOpaqueLoop(f"no series bound for {render(x)} at p={p}") from None
        return s.truncate(bound)
    if isinstance(x, Wedge):
        acc = ps.zero(bound)
        for c, k in Counter(x.children).items():
            acc = acc + ps.scale(_series(c, p, bound, bindings).reduced(), k)
        return acc.unreduced()
    if isinstance(x, Product):
        return ps.product((_series(c, p, bound, bindings) for c in x.children), bound)
    if isinstance(x, Smash):
        return _smash_series(x, p, bound, bindings)
    if isinstance(x, Susp):
        return ps.ps_shift(_series(x.child, p, bound, bindings).reduced(), 1).unreduced()
    if isinstance(x, Loop):
        return _loop_series(x.child, p, bound, bindings)
    raise TypeError(x)


def _smash_series(x: Smash, p, bound, bindings) -> PoincareSeries:
    # a mod-p acyclic factor kills the smash even if the other side is opaque
    reds, missing = [], None
    for c in (x.left, x.right):
        try:
            reds.append(_series(c, p, bound, bindings).reduced())
        except UnboundOpaqueLoop as exc:
            missing = exc
    if any(r.is_zero() for r in reds):
        return ps.one(bound)
    if missing is not None:
        raise missing
    return ps.ps_mul(reds[0], reds[1]).unreduced()


def _loop_series(c: Space, p, bound, bindings) -> PoincareSeries:
    if isinstance(c, Product):
        return ps.product((_loop_series(k, p, bound, bindings) for k in c.children), bound)
    if isinstance(c, Point):
        return ps.one(bound)
    if not _is_suspension(c):
        raise UnsupportedLoopShape(f"no loop-space series rule for Om ({render(c)})")
    red = _series(c, p, bound + 1, bindings).reduced()
    try:
        return ps.ps_geometric(red.desuspend())
    except NonzeroConstantTerm as exc:
        raise UnsupportedLoopShape(f"Om ({render(c)}) is not simply connected") from exc


def _one_plus(degree: int, coeff: int) -> list[int]:
    """Coefficient list of ``1 + coeff * t^degree``."""
    out = [0] * (degree + 1)
    out[0] = 1
    out[degree] += coeff
    return out
