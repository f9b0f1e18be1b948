"""Truncated power series over a prime field, usable as matrix entries.

A :class:`SeriesRing` quacks like :class:`PolyRing` closely enough for
:class:`ExteriorElement` and :class:`GenericConfig`, so every map in
:mod:`clusterbraid.maps` can be applied to a point whose entries are
``a0 + a1 t + ... + a_{N-1} t^{N-1}`` modulo a prime.  Length-1 series are
plain field elements.
"""
from __future__ import annotations

import random
from fractions import Fraction

import flint

from .grassmannian import GenericConfig, omega_star, wedge_all

DEFAULT_PRIME = 2**61 - 1


class SeriesRing:
    def __init__(self, prime: int = DEFAULT_PRIME, precision: int = 1):
        self.prime = prime
        self.precision = precision

    def __repr__(self):
        return f"SeriesRing(p={self.prime}, N={self.precision})"

    def element(self, coeffs) -> "Series":
        return Series(self, flint.nmod_poly([int(c) % self.prime for c in coeffs], self.prime))

    def constant(self, c) -> "Series":
        return self.element([self.reduce(c)])

    def reduce(self, c) -> int:
        c = Fraction(c)
        return c.numerator * pow(c.denominator, -1, self.prime) % self.prime

    @property
    def zero(self) -> "Series":
        return self.element([])

    @property
    def one(self) -> "Series":
        return self.element([1])


class Series:
    __slots__ = ("ring", "poly")

    def __init__(self, ring: SeriesRing, poly):
        self.ring = ring
        self.poly = poly

    def _wrap(self, poly) -> "Series":
        return Series(self.ring, poly)

    def _coerce(self, other):
        if isinstance(other, Series):
            return other.poly
        return flint.nmod_poly([self.ring.reduce(other)], self.ring.prime)

    def __add__(self, other):
        return self._wrap(self.poly + self._coerce(other))

    __radd__ = __add__

    def __sub__(self, other):
        return self._wrap(self.poly - self._coerce(other))

    def __neg__(self):
        return self._wrap(-self.poly)

    def __mul__(self, other):
        return self._wrap(self.poly.mul_low(self._coerce(other), self.ring.precision))

    __rmul__ = __mul__

    def __pow__(self, e: int):
        out = self.ring.one
        for _ in range(e):
            out = out * self
        return out

    def is_zero(self) -> bool:
        return self.poly.is_zero()

    def valuation(self) -> int | None:
        """Order of vanishing at t = 0, or None when zero to working precision."""
        for i, c in enumerate(self.poly.coeffs()):
            if int(c):
                return i
        return None

    def constant_term(self) -> int:
        coeffs = self.poly.coeffs()
        return int(coeffs[0]) if coeffs else 0

    def __repr__(self):
        return f"Series({[int(c) for c in self.poly.coeffs()]})"


def config_from_entries(k: int, n: int, columns) -> GenericConfig:
    return GenericConfig(k, n, tuple(tuple(col) for col in columns))


def random_point(ring: SeriesRing, k: int, n: int, rng: random.Random) -> GenericConfig:
    p = ring.prime
    cols = [[ring.constant(rng.randrange(p)) for _ in range(k)] for _ in range(n)]
    return config_from_entries(k, n, cols)


def random_line_through(ring: SeriesRing, k: int, n: int, columns_dependent, rng: random.Random) -> GenericConfig:
    """Point c0 + t*d with c0 generic subject to the listed columns being dependent.

    The last listed column of c0 is a random combination of the others, so c0
    lies on the divisor of the corresponding maximal minor.
    """
    p = ring.prime
    base = [[rng.randrange(p) for _ in range(k)] for _ in range(n)]
    cols = [j - 1 for j in columns_dependent]
    weights = [rng.randrange(p) for _ in cols[:-1]]
    base[cols[-1]] = [sum(w * base[c][i] for w, c in zip(weights, cols[:-1])) % p for i in range(k)]
    out = [[ring.element([base[j][i], rng.randrange(p)]) for i in range(k)] for j in range(n)]
    return config_from_entries(k, n, out)


def plucker_value(c: GenericConfig, index) -> Series:
    return omega_star(wedge_all([c.vector(j) for j in index]))


def evaluate_poly(f, c: GenericConfig) -> Series:
    """Value of a polynomial in generic matrix entries (row-major) at a series point."""
    ring = c.columns[0][0].ring
    entries = c.entries()
    total = ring.zero
    for exps, coeff in f.terms():
        term = ring.constant(coeff)
        for e, v in zip(exps, entries):
            if e:
                term = term * v**e
        total = total + term
    return total


# points with per-column valuation shifts -------------------------------------


class PrecisionExhausted(ArithmeticError):
    """A series computation ran out of known coefficients."""


def expr_column_degrees(expr, n: int) -> tuple[int, ...]:
    """Multidegree of a vector expression in the input columns."""
    from .maps import Meet, Vec, Wedge

    deg = [0] * n

    def visit(e):
        if isinstance(e, Vec):
            deg[(e.j - 1) % n] += 1
        elif isinstance(e, Wedge):
            for part in e.parts:
                visit(part)
        elif isinstance(e, Meet):
            visit(e.left)
            visit(e.right)
        elif hasattr(e, "arg"):
            visit(e.arg)
        else:
            raise TypeError(f"no column degree for {e!r}")

    visit(expr)
    return tuple(deg)


def poly_column_degrees(f, k: int, n: int) -> tuple[int, ...]:
    """Column multidegree of a polynomial in row-major generic matrix entries."""
    out = None
    for exps, _ in f.terms():
        deg = [0] * n
        for idx, e in enumerate(exps):
            deg[idx % n] += e
        if out is None:
            out = tuple(deg)
        elif tuple(deg) != out:
            raise ValueError("polynomial is not column-multihomogeneous")
    if out is None:
        raise ValueError("zero polynomial has no multidegree")
    return out


class ValuedPoint:
    """A configuration whose column j is ``t^shift[j]`` times a stored column.

    Stored columns always have a unit entry, so degenerations along a line are
    carried by the integer shifts instead of eating series precision.
    ``precision`` counts the coefficients that are still trustworthy.
    """

    def __init__(self, config: GenericConfig, shifts, precision: int):
        self.config = config
        self.shifts = tuple(shifts)
        self.precision = precision

    @classmethod
    def of(cls, config: GenericConfig) -> "ValuedPoint":
        ring = config.columns[0][0].ring
        return cls(config, (0,) * config.n, ring.precision)

    def apply_window(self, m) -> "ValuedPoint":
        from .maps import _Evaluator

        ring = self.config.columns[0][0].ring
        ev = _Evaluator(self.config)
        cols, shifts, precision = [], [], self.precision
        for expr in m.column_exprs():
            image = ev(expr)
            vec = None if _is_zero_vector(image) else image.as_vector()
            vals = [] if vec is None else [v for v in (x.valuation() for x in vec) if v is not None]
            if not vals or min(vals) >= self.precision:
                raise PrecisionExhausted("column vanished to working precision")
            low = min(vals)
            cols.append(tuple(Series(ring, x.poly.right_shift(low)) for x in vec))
            deg = expr_column_degrees(expr, m.n)
            shifts.append(sum(d * s for d, s in zip(deg, self.shifts)) + low)
            precision = min(precision, self.precision - low)
        return ValuedPoint(GenericConfig(m.k, m.n, tuple(cols)), shifts, precision)

    def apply(self, m) -> "ValuedPoint":
        """Apply a window map or a composite of window maps (rightmost first)."""
        parts = getattr(m, "parts", (m,))
        point = self
        for part in reversed(parts):
            if getattr(part, "domain", None) != "gr" or not hasattr(part, "column_exprs"):
                raise ValueError("valued points only support window maps on vector configurations")
            point = point.apply_window(part)
        return point

    def valuation_of(self, value: Series, degrees) -> int:
        v = value.valuation()
        if v is None or v >= self.precision:
            raise PrecisionExhausted("value vanished to working precision")
        return v + sum(d * s for d, s in zip(degrees, self.shifts))


def _is_zero_vector(elem) -> bool:
    return elem.is_zero()
