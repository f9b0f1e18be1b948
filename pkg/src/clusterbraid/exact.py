"""Exact polynomials over the rationals.

Every symbolic quantity in the package is a :class:`MultiPoly` living in a
:class:`PolyRing`, a fixed ordered table of indeterminates with graded
lexicographic term order.  Arithmetic is delegated to python-flint; the
canonical-form and proportionality logic lives here.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from math import gcd, lcm
from typing import Iterable, Sequence

import flint
from flint.utils.flint_exceptions import DomainError

BigRational = Fraction


class ZeroPolynomial(ValueError):
    """Raised when a nonzero polynomial was required."""


def _to_fraction(c) -> Fraction:
    if isinstance(c, flint.fmpq):
        return Fraction(int(c.p), int(c.q))
    return Fraction(c)


def _to_fmpq(c) -> flint.fmpq:
    c = Fraction(c)
    return flint.fmpq(c.numerator, c.denominator)


class PolyRing:
    """An ordered table of indeterminates.

    Rings are interned by their name tuple, so two rings built from the same
    names are the same object and their polynomials interoperate.
    """

    _interned: dict[tuple[str, ...], "PolyRing"] = {}

    def __new__(cls, names: Sequence[str]):
        names = tuple(names)
        ring = cls._interned.get(names)
        if ring is None:
            if len(set(names)) != len(names):
                raise ValueError("duplicate indeterminate names")
            ring = super().__new__(cls)
            ring.names = names
            ring.index = {name: i for i, name in enumerate(names)}
            ring.ctx = flint.fmpq_mpoly_ctx.get(
                tuple(f"_v{i}" for i in range(len(names))) or ("_unused",), "deglex"
            )
            ring._gens = ring.ctx.gens()[: len(names)]
            cls._interned[names] = ring
        return ring

    def __reduce__(self):
        return (PolyRing, (self.names,))

    def __len__(self) -> int:
        return len(self.names)

    def __repr__(self) -> str:
        return f"PolyRing({len(self.names)} vars)"

    def gen(self, name: str) -> "MultiPoly":
        return MultiPoly(self, self._gens[self.index[name]])

    def gens(self) -> list["MultiPoly"]:
        return [MultiPoly(self, g) for g in self._gens]

    def constant(self, c) -> "MultiPoly":
        return MultiPoly(self, self.ctx.constant(_to_fmpq(c)))

    @property
    def zero(self) -> "MultiPoly":
        return self.constant(0)

    @property
    def one(self) -> "MultiPoly":
        return self.constant(1)

    def from_terms(self, terms: dict[tuple[int, ...], object]) -> "MultiPoly":
        width = len(self.ctx.gens())
        raw = {}
        for exps, c in terms.items():
            if len(exps) != len(self.names):
                raise ValueError("exponent vector has the wrong length")
            if any(e < 0 for e in exps):
                raise ValueError("negative exponent")
            padded = tuple(exps) + (0,) * (width - len(exps))
            raw[padded] = _to_fmpq(c)
        return MultiPoly(self, self.ctx.from_dict(raw))

    def parse(self, text: str) -> "MultiPoly":
        return parse_poly(self, text)


class MultiPoly:
    """Immutable polynomial with rational coefficients in a :class:`PolyRing`."""

    __slots__ = ("ring", "raw", "_key")

    def __init__(self, ring: PolyRing, raw):
        self.ring = ring
        self.raw = raw
        self._key = None

    # construction helpers -------------------------------------------------
    def _wrap(self, raw) -> "MultiPoly":
        return MultiPoly(self.ring, raw)

    def _coerce(self, other):
        if isinstance(other, MultiPoly):
            if other.ring is not self.ring:
                raise ValueError("polynomials live in different rings")
            return other.raw
        if isinstance(other, (int, Fraction, flint.fmpq, flint.fmpz)):
            return _to_fmpq(other)
        return NotImplemented

    # arithmetic -------------------------------------------------------------
    def __add__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else self._wrap(self.raw + o)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else self._wrap(self.raw - o)

    def __rsub__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else self._wrap(o - self.raw)

    def __mul__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else self._wrap(self.raw * o)

    __rmul__ = __mul__

    def __neg__(self):
        return self._wrap(-self.raw)

    def __pow__(self, e: int):
        if e < 0:
            raise ValueError("negative power of a polynomial")
        return self._wrap(self.raw**e)

    def scale(self, c) -> "MultiPoly":
        return self._wrap(self.raw * _to_fmpq(c))

    def __eq__(self, other):
        if isinstance(other, MultiPoly):
            return self.ring is other.ring and self.raw == other.raw
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self.raw == o

    def __hash__(self):
        return hash(self.key())

    def __bool__(self):
        return not self.raw.is_zero()

    # inspection -------------------------------------------------------------
    def is_zero(self) -> bool:
        return self.raw.is_zero()

    def is_constant(self) -> bool:
        return self.raw.is_constant()

    def terms(self) -> list[tuple[tuple[int, ...], Fraction]]:
        """Terms in decreasing graded-lex order."""
        n = len(self.ring.names)
        return [(m[:n], _to_fraction(c)) for m, c in self.raw.terms()]

    def coefficients(self) -> list[Fraction]:
        return [_to_fraction(c) for c in self.raw.coeffs()]

    def leading_coefficient(self) -> Fraction:
        if self.is_zero():
            raise ZeroPolynomial("ZeroPolynomial")
        return _to_fraction(self.raw.leading_coefficient())

    def total_degree(self) -> int:
        return int(self.raw.total_degree()) if not self.is_zero() else -1

    def degrees(self) -> tuple[int, ...]:
        return tuple(int(d) for d in self.raw.degrees())[: len(self.ring.names)]

    def variables(self) -> list[str]:
        return [name for name, d in zip(self.ring.names, self.degrees()) if d > 0]

    def __len__(self) -> int:
        return len(self.raw)

    def key(self) -> bytes:
        """Byte string identifying this exact polynomial within its ring."""
        if self._key is None:
            self._key = str(self.raw).encode()
        return self._key

    # substitution -----------------------------------------------------------
    def compose(self, images: Sequence["MultiPoly"], ring: PolyRing | None = None) -> "MultiPoly":
        """Substitute ``images[i]`` for the i-th indeterminate."""
        target = ring if ring is not None else (images[0].ring if images else self.ring)
        if len(images) != len(self.ring.names):
            raise ValueError("need one image per indeterminate")
        pad = len(self.ring.ctx.gens()) - len(images)
        raws = [im.raw for im in images] + [target.ctx.constant(0)] * pad
        if not raws:
            return MultiPoly(target, target.ctx.constant(self.raw.leading_coefficient() if self else 0))
        return MultiPoly(target, self.raw.compose(*raws, ctx=target.ctx))

    def evaluate(self, values: Sequence) -> Fraction:
        """Exact value at a rational point."""
        if len(values) != len(self.ring.names):
            raise ValueError("need one value per indeterminate")
        vals = [_to_fmpq(v) for v in values]
        vals += [flint.fmpq(0)] * (len(self.ring.ctx.gens()) - len(vals))
        return _to_fraction(self.raw(*vals))

    def __str__(self) -> str:
        return format_poly(self)

    def __repr__(self) -> str:
        text = format_poly(self)
        if len(text) > 120:
            text = text[:117] + "..."
        return f"MultiPoly({text})"


# text format ---------------------------------------------------------------

def _format_coeff(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def format_poly(p: MultiPoly) -> str:
    """Render as ``c * x_{i,j}^e * ...`` terms joined by `` + `` / `` - ``."""
    if p.is_zero():
        return "0"
    names = p.ring.names
    out = []
    for exps, c in p.terms():
        factors = []
        for name, e in zip(names, exps):
            if e == 1:
                factors.append(name)
            elif e > 1:
                factors.append(f"{name}^{e}")
        mag = abs(c)
        if not factors:
            body = _format_coeff(mag)
        elif mag == 1:
            body = " * ".join(factors)
        else:
            body = " * ".join([_format_coeff(mag)] + factors)
        if not out:
            out.append(("-" if c < 0 else "") + body)
        else:
            out.append(("- " if c < 0 else "+ ") + body)
    return " ".join(out)


_TERM_SPLIT = re.compile(r"\s*([+-])\s*")
_NUMBER = re.compile(r"^\d+(/\d+)?$")


def parse_poly(ring: PolyRing, text: str) -> MultiPoly:
    """Inverse of :func:`format_poly`; coefficients may be omitted."""
    text = text.strip()
    if not text:
        raise ValueError("empty polynomial text")
    # split on top-level signs that are not inside braces
    pieces, depth, cur, sign = [], 0, [], 1
    i = 0
    while i < len(text):
        ch = text[i]
        if ch == "{":
            depth += 1
        elif ch == "}":
            depth -= 1
        if depth == 0 and ch in "+-" and not (i > 0 and text[i - 1] == "^"):
            if "".join(cur).strip():
                pieces.append((sign, "".join(cur)))
                sign = 1
            cur = []
            sign = sign * (-1 if ch == "-" else 1)
        else:
            cur.append(ch)
        i += 1
    if "".join(cur).strip():
        pieces.append((sign, "".join(cur)))
    terms: dict[tuple[int, ...], Fraction] = {}
    width = len(ring.names)
    for sign, body in pieces:
        coeff = Fraction(sign)
        exps = [0] * width
        for factor in body.split("*"):
            factor = factor.strip()
            if _NUMBER.match(factor):
                coeff *= Fraction(factor)
                continue
            name, _, power = factor.partition("^")
            if name not in ring.index:
                raise ValueError(f"unknown indeterminate {name!r}")
            exps[ring.index[name]] += int(power) if power else 1
        key = tuple(exps)
        terms[key] = terms.get(key, Fraction(0)) + coeff
    return ring.from_terms({m: c for m, c in terms.items() if c})


# canonical forms -------------------------------------------------------------

def normalize(p: MultiPoly) -> tuple[Fraction, MultiPoly]:
    """Split ``p = unit * q`` with q of content 1 and positive leading coefficient."""
    if p.is_zero():
        raise ZeroPolynomial("ZeroPolynomial")
    coeffs = p.coefficients()
    num = 0
    den = 1
    for c in coeffs:
        num = gcd(num, c.numerator)
        den = lcm(den, c.denominator)
    unit = Fraction(num, den)
    if coeffs[0] < 0:
        unit = -unit
    if unit == 1:
        return unit, p
    return unit, p.scale(1 / unit)


def exact_divide(p: MultiPoly, q: MultiPoly) -> MultiPoly | None:
    """Return ``p / q`` if q divides p exactly, else None."""
    if q.is_zero():
        raise ZeroDivisionError("division by the zero polynomial")
    if p.is_zero():
        return p
    if q.is_constant():
        return p.scale(1 / q.leading_coefficient())
    if p.total_degree() < q.total_degree():
        return None
    pd, qd = p.degrees(), q.degrees()
    if any(b > a for a, b in zip(pd, qd)):
        return None
    try:
        return MultiPoly(p.ring, p.raw / q.raw)
    except DomainError:
        return None


@dataclass(frozen=True)
class FrozenLaurentMonomial:
    """A nonzero scalar times a Laurent monomial in a list of frozen polynomials."""

    exponents: tuple[int, ...]
    scalar: Fraction = Fraction(1)

    def __post_init__(self):
        if self.scalar == 0:
            raise ValueError("scalar must be nonzero")
        object.__setattr__(self, "scalar", Fraction(self.scalar))
        object.__setattr__(self, "exponents", tuple(int(e) for e in self.exponents))

    @classmethod
    def one(cls, n_frozen: int) -> "FrozenLaurentMonomial":
        return cls((0,) * n_frozen)

    def inverse(self) -> "FrozenLaurentMonomial":
        return FrozenLaurentMonomial(tuple(-e for e in self.exponents), 1 / self.scalar)

    def __mul__(self, other: "FrozenLaurentMonomial") -> "FrozenLaurentMonomial":
        if len(other.exponents) != len(self.exponents):
            raise ValueError("monomials over different frozen lists")
        return FrozenLaurentMonomial(
            tuple(a + b for a, b in zip(self.exponents, other.exponents)),
            self.scalar * other.scalar,
        )

    def __pow__(self, e: int) -> "FrozenLaurentMonomial":
        return FrozenLaurentMonomial(tuple(a * e for a in self.exponents), self.scalar**e)

    def is_one(self) -> bool:
        return self.scalar == 1 and not any(self.exponents)

    def is_trivial_up_to_sign(self) -> bool:
        return abs(self.scalar) == 1 and not any(self.exponents)

    def split(self, frozen: Sequence[MultiPoly]) -> tuple[MultiPoly, MultiPoly]:
        """Numerator and denominator polynomials (scalar kept in the numerator)."""
        ring = frozen[0].ring if frozen else None
        num = ring.constant(self.scalar) if ring else None
        den = ring.one if ring else None
        for f, e in zip(frozen, self.exponents):
            if e > 0:
                num = num * f**e
            elif e < 0:
                den = den * f ** (-e)
        return num, den

    def describe(self, labels: Sequence[str]) -> str:
        parts = [] if self.scalar == 1 else [_format_coeff(self.scalar)]
        for label, e in zip(labels, self.exponents):
            if e == 1:
                parts.append(label)
            elif e:
                parts.append(f"{label}^{e}")
        return " * ".join(parts) if parts else "1"

    def to_json(self, labels: Sequence[str] | None = None) -> dict:
        out = {"scalar": _format_coeff(self.scalar), "exponents": list(self.exponents)}
        if labels is not None:
            out["monomial"] = self.describe(labels)
        return out


def strip_frozen(p: MultiPoly, frozen: Sequence[MultiPoly]) -> tuple[list[int], MultiPoly]:
    """Divide out every frozen factor of p, in list order, until a full pass stalls."""
    exps = [0] * len(frozen)
    progress = True
    while progress:
        progress = False
        for i, f in enumerate(frozen):
            while True:
                r = exact_divide(p, f)
                if r is None:
                    break
                p = r
                exps[i] += 1
                progress = True
    return exps, p


def proportional(
    p: MultiPoly, q: MultiPoly, frozen: Sequence[MultiPoly]
) -> FrozenLaurentMonomial | None:
    """Return M with ``p = M(frozen) * q``, or None when no such monomial exists."""
    if p.is_zero() or q.is_zero():
        raise ZeroPolynomial("ZeroPolynomial")
    ep, cp = strip_frozen(p, frozen)
    eq, cq = strip_frozen(q, frozen)
    up, np_ = normalize(cp)
    uq, nq = normalize(cq)
    if np_ != nq:
        return None
    return FrozenLaurentMonomial(tuple(a - b for a, b in zip(ep, eq)), up / uq)


def product(polys: Iterable[MultiPoly], ring: PolyRing) -> MultiPoly:
    out = ring.one
    for p in polys:
        out = out * p
    return out
