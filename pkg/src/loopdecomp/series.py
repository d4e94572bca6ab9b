"""Truncated Poincaré series with exact integer coefficients.

A :class:`PoincareSeries` records the graded dimensions ``dim H_d`` for
``0 <= d <= bound``.  Results are only meaningful up to the bound, so every
binary operation truncates to the smaller of the two bounds and equality
compares coefficients on that common range.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb
from typing import Iterable, Sequence

from .errors import NegativeCoefficient, NonUnitDenominator, NonzeroConstantTerm

DEFAULT_BOUND = 40


@dataclass(frozen=True, eq=False)
class PoincareSeries:
    coeffs: tuple[int, ...]

    def __post_init__(self):
        coeffs = tuple(int(c) for c in self.coeffs)
        if not coeffs:
            raise ValueError("a series needs at least the degree-0 coefficient")
        if any(c < 0 for c in coeffs):
            raise NegativeCoefficient(f"negative coefficient in {coeffs}")
        object.__setattr__(self, "coeffs", coeffs)

    @property
    def bound(self) -> int:
        return len(self.coeffs) - 1

    def __getitem__(self, d: int) -> int:
        return self.coeffs[d]

    def __iter__(self):
        return iter(self.coeffs)

    def __eq__(self, other):
        if not isinstance(other, PoincareSeries):
            return NotImplemented
        top = min(self.bound, other.bound)
        return self.coeffs[: top + 1] == other.coeffs[: top + 1]

    __hash__ = None

    def __add__(self, other: PoincareSeries) -> PoincareSeries:
        return ps_add(self, other)

    def __mul__(self, other: PoincareSeries) -> PoincareSeries:
        return ps_mul(self, other)

    def __repr__(self):
        return f"PoincareSeries({self.to_string()}; bound={self.bound})"

    def to_string(self, var: str = "t") -> str:
        terms = []
        for d, c in enumerate(self.coeffs):
            if not c:
                continue
            mono = "1" if d == 0 else var if d == 1 else f"{var}^{d}"
            if d == 0:
                terms.append(str(c))
            else:
                terms.append(mono if c == 1 else f"{c}{mono}")
        return " + ".join(terms) if terms else "0"

    def truncate(self, bound: int) -> PoincareSeries:
        if bound > self.bound:
            raise ValueError(f"cannot extend a series known to degree {self.bound} to {bound}")
        return PoincareSeries(self.coeffs[: bound + 1])

    def reduced(self) -> PoincareSeries:
        """Drop the degree-0 unit (the series must have constant term 1)."""
        if self.coeffs[0] != 1:
            raise ValueError("reduced series only makes sense for a connected space")
        return PoincareSeries((0,) + self.coeffs[1:])

    def unreduced(self) -> PoincareSeries:
        if self.coeffs[0] != 0:
            raise ValueError("expected a reduced series")
        return PoincareSeries((1,) + self.coeffs[1:])

    def desuspend(self) -> PoincareSeries:
        """Shift a reduced series down one degree; the bound drops by one."""
        if self.coeffs[0] != 0:
            raise ValueError("only reduced series can be desuspended")
        if self.coeffs[1:2] and self.coeffs[1]:
            raise NonzeroConstantTerm("desuspension would put a class in degree 0")
        return PoincareSeries(self.coeffs[1:])

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def first_difference(self, other: PoincareSeries):
        """Return ``(degree, self[d], other[d])`` at the first mismatch, else None."""
        top = min(self.bound, other.bound)
        for d in range(top + 1):
            if self.coeffs[d] != other.coeffs[d]:
                return d, self.coeffs[d], other.coeffs[d]
        return None


def zero(bound: int = DEFAULT_BOUND) -> PoincareSeries:
    return PoincareSeries((0,) * (bound + 1))


def one(bound: int = DEFAULT_BOUND) -> PoincareSeries:
    return monomial(0, bound)


def monomial(degree: int, bound: int = DEFAULT_BOUND, coeff: int = 1) -> PoincareSeries:
    coeffs = [0] * (bound + 1)
    if degree <= bound:
        coeffs[degree] = coeff
    return PoincareSeries(tuple(coeffs))


def from_coeffs(coeffs: Iterable[int], bound: int) -> PoincareSeries:
    """Pad or cut ``coeffs`` to exactly ``bound + 1`` entries."""
    coeffs = list(coeffs)[: bound + 1]
    coeffs += [0] * (bound + 1 - len(coeffs))
    return PoincareSeries(tuple(coeffs))


def ps_add(a: PoincareSeries, b: PoincareSeries) -> PoincareSeries:
    top = min(a.bound, b.bound)
    return PoincareSeries(tuple(a[d] + b[d] for d in range(top + 1)))


def ps_mul(a: PoincareSeries, b: PoincareSeries) -> PoincareSeries:
    top = min(a.bound, b.bound)
    out = [0] * (top + 1)
    for i, ai in enumerate(a.coeffs[: top + 1]):
        if not ai:
            continue
        for j in range(top + 1 - i):
            bj = b.coeffs[j]
            if bj:
                out[i + j] += ai * bj
    return PoincareSeries(tuple(out))


def ps_shift(a: PoincareSeries, k: int) -> PoincareSeries:
    if k < 0:
        raise ValueError("shift must be nonnegative")
    coeffs = (0,) * k + a.coeffs
    return PoincareSeries(coeffs[: a.bound + 1])


def ps_geometric(a: PoincareSeries) -> PoincareSeries:
    """Sum of all powers of ``a``: the series of the free tensor algebra on a
    graded vector space with series ``a``."""
    if a[0] != 0:
        raise NonzeroConstantTerm(f"geometric series needs a[0] = 0, got {a[0]}")
    g = [0] * (a.bound + 1)
    g[0] = 1
    for d in range(1, a.bound + 1):
        g[d] = sum(a[k] * g[d - k] for k in range(1, d + 1) if a[k])
    return PoincareSeries(tuple(g))


def ps_pow(a: PoincareSeries, k: int) -> PoincareSeries:
    """``a**k`` for ``a`` with constant term 1, cheap even for huge ``k``.

    Expands ``(1 + h)**k`` binomially; ``h`` has no constant term so only
    ``bound // order(h)`` terms survive truncation.
    """
    if k < 0:
        raise ValueError("negative powers are not supported")
    if a[0] != 1:
        raise ValueError("ps_pow expects constant term 1")
    h = a.reduced()
    low = next((d for d, c in enumerate(h.coeffs) if c), None)
    result = one(a.bound)
    if low is None or k == 0:
        return result
    term = one(a.bound)
    for j in range(1, min(k, a.bound // low) + 1):
        term = ps_mul(term, h)
        result = ps_add(result, scale(term, comb(k, j)))
    return result


def scale(a: PoincareSeries, c: int) -> PoincareSeries:
    return PoincareSeries(tuple(c * x for x in a.coeffs))


def product(series: Iterable[PoincareSeries], bound: int) -> PoincareSeries:
    acc = one(bound)
    for s in series:
        acc = ps_mul(acc, s)
    return acc


def ps_from_rational(numer: Sequence[int], denom: Sequence[int], bound: int) -> PoincareSeries:
    """Expand ``numer / denom`` (integer coefficient lists, lowest degree first)."""
    denom = list(denom)
    if not denom or denom[0] not in (1, -1):
        raise NonUnitDenominator(f"denominator must have constant term +-1, got {denom[:1]}")
    numer = list(numer)
    c = [0] * (bound + 1)
    for d in range(bound + 1):
        acc = numer[d] if d < len(numer) else 0
        for k in range(1, min(d, len(denom) - 1) + 1):
            acc -= denom[k] * c[d - k]
        c[d] = acc * denom[0]
    if any(x < 0 for x in c):
        d = next(i for i, x in enumerate(c) if x < 0)
        raise NegativeCoefficient(f"expansion has coefficient {c[d]} in degree {d}")
    return PoincareSeries(tuple(c))


def poly_mul(a: Sequence[int], b: Sequence[int]) -> list[int]:
    """Plain integer polynomial product (coefficient lists)."""
    out = [0] * (len(a) + len(b) - 1) if a and b else []
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return out
