"""k-periodic maps between vector configurations and flag configurations.

A map is described by expression trees over the input vectors ``v_j`` (or
input flag tensors ``F_{m,(a)}``).  Periodic maps store one window of k
column expressions; column ``qk + l`` is window entry ``l`` with every input
index shifted by ``q`` blocks.  Inputs outside the valid index range wrap
around with the twist ``s_G = (-1)^(k-1)``.
"""
from __future__ import annotations

import functools
from dataclasses import dataclass
from typing import Callable, Sequence, Union

from .exact import FrozenLaurentMonomial, MultiPoly, PolyRing, normalize, strip_frozen
from .fock_goncharov import (
    AffineFlag,
    FGFunction,
    FlagConfig,
    cyclic_P,
    duality,
    generic_flag_config,
    rotation_Theta,
    twist_sign,
)
from .grassmannian import (
    ExteriorElement,
    GenericConfig,
    frozen_pluckers,
    hodge_star,
    meet,
    wedge,
)

# expressions ----------------------------------------------------------------


@dataclass(frozen=True)
class Vec:
    j: int

    def __str__(self):
        return f"v{self.j}"


@dataclass(frozen=True)
class FlagTensor:
    m: int
    a: int

    def __str__(self):
        return f"F{self.m}({self.a})"


@dataclass(frozen=True)
class Wedge:
    parts: tuple

    def __str__(self):
        if all(isinstance(p, Vec) for p in self.parts):
            return "".join(str(p) for p in self.parts)
        return "".join(f"({p})" for p in self.parts)


@dataclass(frozen=True)
class Meet:
    left: object
    right: object

    def __str__(self):
        return f"({self.left})∩({self.right})"


@dataclass(frozen=True)
class Star:
    arg: object

    def __str__(self):
        return f"*({self.arg})"


@dataclass(frozen=True)
class Scaled:
    c: int
    arg: object

    def __str__(self):
        return f"{self.c}·{self.arg}" if self.c != -1 else f"-{self.arg}"


Expr = Union[Vec, FlagTensor, Wedge, Meet, Star, Scaled]


def vs(*idx: int) -> Expr:
    """Wedge of consecutive vector leaves, e.g. ``vs(1, 2)`` is v1 v2."""
    return Vec(idx[0]) if len(idx) == 1 else Wedge(tuple(Vec(j) for j in idx))


def vrange(a: int, b: int) -> Expr:
    return vs(*range(a, b + 1))


def shifted(expr: Expr, dv: int, df: int) -> Expr:
    if isinstance(expr, Vec):
        return Vec(expr.j + dv)
    if isinstance(expr, FlagTensor):
        return FlagTensor(expr.m + df, expr.a)
    if isinstance(expr, Wedge):
        return Wedge(tuple(shifted(p, dv, df) for p in expr.parts))
    if isinstance(expr, Meet):
        return Meet(shifted(expr.left, dv, df), shifted(expr.right, dv, df))
    if isinstance(expr, Star):
        return Star(shifted(expr.arg, dv, df))
    return Scaled(expr.c, shifted(expr.arg, dv, df))


def config_vector(c: GenericConfig, j: int) -> ExteriorElement:
    q, j0 = divmod(j - 1, c.n)
    v = c.vector(j0 + 1)
    return v.scale(-1) if q % 2 and twist_sign(c.k) == -1 else v


class _Evaluator:
    """Evaluates expressions on one input object, sharing repeated subexpressions."""

    def __init__(self, source):
        self.source = source
        self.memo: dict = {}

    def __call__(self, expr: Expr) -> ExteriorElement:
        hit = self.memo.get(expr)
        if hit is not None:
            return hit
        if isinstance(expr, Vec):
            out = config_vector(self.source, expr.j)
        elif isinstance(expr, FlagTensor):
            out = self.source.tensor(expr.m, expr.a)
        elif isinstance(expr, Wedge):
            out = self(expr.parts[0])
            for p in expr.parts[1:]:
                out = wedge(out, self(p))
        elif isinstance(expr, Meet):
            out = meet(self(expr.left), self(expr.right))
        elif isinstance(expr, Star):
            out = hodge_star(self(expr.arg))
        else:
            out = self(expr.arg).scale(expr.c)
        self.memo[expr] = out
        return out


def scalar_invariant(expr: Expr, k: int, n: int) -> MultiPoly:
    """Value of a grade-0 or grade-k expression on the generic k x n matrix."""
    out = _Evaluator(GenericConfig.generic(k, n))(expr)
    return out.as_scalar()


def parse_expr(text: str) -> Expr:
    """Parse ``(v7v8v1)∩(v4v6v7)∩(v2v3)``-style text; ``^`` may replace ``∩``.

    Meets associate to the left; ``*( ... )`` is the Hodge star.
    """
    import re

    tokens = re.findall(r"v-?\d+|\*|\(|\)|∩|\^", text.replace(" ", ""))
    if "".join(tokens) != text.replace(" ", ""):
        raise ValueError(f"cannot parse expression {text!r}")
    pos = 0

    def atom():
        nonlocal pos
        if pos >= len(tokens):
            raise ValueError(f"unexpected end of expression {text!r}")
        if tokens[pos] == "*":
            pos += 1
            return Star(atom())
        if tokens[pos] == "(":
            pos += 1
            e = meets()
            if pos >= len(tokens) or tokens[pos] != ")":
                raise ValueError("unbalanced parentheses")
            pos += 1
            return e
        parts = []
        while pos < len(tokens) and tokens[pos].startswith("v"):
            parts.append(Vec(int(tokens[pos][1:])))
            pos += 1
        if not parts:
            raise ValueError(f"unexpected token {tokens[pos]!r}")
        return parts[0] if len(parts) == 1 else Wedge(tuple(parts))

    def meets():
        nonlocal pos
        e = atom()
        while pos < len(tokens) and tokens[pos] in ("∩", "^"):
            pos += 1
            e = Meet(e, atom())
        return e

    out = meets()
    if pos != len(tokens):
        raise ValueError(f"trailing input in {text!r}")
    return out


# maps -------------------------------------------------------------------------


class ConfigMap:
    """Base class: ``apply`` sends an input configuration to an output configuration."""

    name = "map"
    k: int
    domain: str  # "gr" or "conf"
    codomain: str

    def apply(self, source):
        raise NotImplementedError

    def __call__(self, source):
        return self.apply(source)

    def __matmul__(self, other: "ConfigMap") -> "Composite":
        return Composite((self, other))


@dataclass(frozen=True, eq=False)
class WindowMap(ConfigMap):
    """Map into vector configurations of ``n`` vectors.

    With ``periodic`` the window holds k expressions, otherwise all n.
    ``domain`` says whether leaves are vectors (``"gr"``) or flag tensors
    (``"conf"``); a block of k output vectors consumes k input vectors or
    two input flags respectively.
    """

    k: int
    n: int
    window: tuple
    domain: str = "gr"
    periodic: bool = True
    name: str = "map"
    codomain: str = "gr"

    def column_exprs(self) -> list[Expr]:
        if not self.periodic:
            return list(self.window)
        if self.n % self.k:
            raise ValueError("periodic window maps need k to divide n")
        out = []
        for q in range(self.n // self.k):
            dv, df = (q * self.k, 0) if self.domain == "gr" else (0, 2 * q)
            out.extend(shifted(e, dv, df) for e in self.window)
        return out

    def apply(self, source) -> GenericConfig:
        ev = _Evaluator(source)
        cols = []
        for e in self.column_exprs():
            cols.append(ev(e).as_vector())
        return GenericConfig(self.k, self.n, tuple(cols))

    def describe(self) -> str:
        return "[" + ", ".join(str(e) for e in self.window) + "]"


@dataclass(frozen=True, eq=False)
class FlagMap(ConfigMap):
    """Map into configurations of ``r`` flags; ``pair`` gives two flags per block."""

    k: int
    r: int
    pair: tuple  # two tuples of k-1 tensor expressions
    domain: str = "gr"
    name: str = "flagmap"
    codomain: str = "conf"

    def apply(self, source) -> FlagConfig:
        ev = _Evaluator(source)
        flags = []
        for q in range(self.r // 2):
            dv, df = (q * self.k, 0) if self.domain == "gr" else (0, 2 * q)
            for exprs in self.pair:
                flags.append(AffineFlag(tuple(ev(shifted(e, dv, df)) for e in exprs)))
        return FlagConfig(self.k, tuple(flags))


@dataclass(frozen=True, eq=False)
class FunctionMap(ConfigMap):
    """Wraps a symmetry implemented directly on configurations."""

    k: int
    fn: Callable
    domain: str
    codomain: str
    name: str

    def apply(self, source):
        return self.fn(source)


@dataclass(frozen=True, eq=False)
class Composite(ConfigMap):
    """``Composite((f, g, h))`` is f ∘ g ∘ h: h is applied first."""

    parts: tuple

    def __post_init__(self):
        for outer, inner in zip(self.parts, self.parts[1:]):
            if outer.domain != inner.codomain:
                raise ValueError(f"cannot compose {outer.name} after {inner.name}")

    @property
    def k(self):
        return self.parts[0].k

    @property
    def domain(self):
        return self.parts[-1].domain

    @property
    def codomain(self):
        return self.parts[0].codomain

    @property
    def name(self):
        return "∘".join(p.name for p in self.parts)

    def apply(self, source):
        for p in reversed(self.parts):
            source = p.apply(source)
        return source


def compose(*maps: ConfigMap) -> ConfigMap:
    flat = []
    for m in maps:
        flat.extend(m.parts if isinstance(m, Composite) else [m])
    return flat[0] if len(flat) == 1 else Composite(tuple(flat))


# constructors -----------------------------------------------------------------


def identity(k: int, n: int) -> WindowMap:
    return WindowMap(k, n, tuple(Vec(j) for j in range(1, k + 1)), name="id")


def sigma(k: int, n: int, i: int) -> WindowMap:
    """Artin generator: swap v_i past v_{i+1} and replace it by the meet."""
    if not 1 <= i <= k - 1:
        raise ValueError(f"sigma index must lie in 1..{k - 1}")
    window = []
    for pos in range(1, k + 1):
        if pos < i or pos > i + 1:
            window.append(Vec(pos))
        elif pos == i:
            window.append(Vec(i + 1))
        else:
            window.append(Meet(vs(i, i + 1), vrange(i + 2, k + i)))
    return WindowMap(k, n, tuple(window), name=f"s{i}")


def sigma_inv(k: int, n: int, i: int) -> WindowMap:
    if not 1 <= i <= k - 1:
        raise ValueError(f"sigma index must lie in 1..{k - 1}")
    other = list(range(1, i)) + list(range(n - k + i + 1, n + 1))
    window = [Vec(pos) for pos in range(1, i)]
    window.append(Scaled((-1) ** i, Meet(vs(i, i + 1), vs(*other))))
    window.append(Vec(i))
    window.extend(Vec(pos) for pos in range(i + 2, k + 1))
    return WindowMap(k, n, tuple(window), name=f"s{i}i")


def rho(k: int, n: int) -> WindowMap:
    return WindowMap(k, n, tuple(Vec(j) for j in range(2, k + 2)), name="r")


def rho_inv(k: int, n: int) -> WindowMap:
    return WindowMap(k, n, tuple(Vec(j) for j in range(0, k)), name="ri")


def theta(k: int, n: int) -> WindowMap:
    """Reverse the order of the vectors."""
    return WindowMap(k, n, tuple(Vec(n + 1 - j) for j in range(1, n + 1)), periodic=False, name="th")


def twist_iota(k: int, n: int) -> WindowMap:
    """Column l is the star of v_{l-k+1} ... v_{l-1}."""
    return WindowMap(k, n, tuple(Star(vrange(l - k + 1, l - 1)) for l in range(1, k + 1)), name="tw")


def _require_periodic(k: int, n: int):
    if n % k:
        raise ValueError("flag maps need k to divide n")


def psi_map(k: int, n: int) -> FlagMap:
    """Two opposite flags from each block of k vectors."""
    _require_periodic(k, n)
    first = tuple(vrange(1, a) for a in range(1, k))
    second = tuple(vrange(k - a + 1, k) for a in range(1, k))
    return FlagMap(k, 2 * n // k, (first, second), name="psi")


def x_map(k: int, n: int) -> FlagMap:
    """Like psi, but the flags involve k + 1 of the vectors."""
    _require_periodic(k, n)
    first = (Vec(2), vs(1, 2)) + tuple(vrange(1, a) for a in range(3, k))
    second = tuple(vrange(k - a + 1, k) for a in range(1, k - 1)) + (vrange(3, k + 1),)
    return FlagMap(k, 2 * n // k, (first[: k - 1], second), name="x")


def phi_map(k: int, n: int) -> WindowMap:
    """Window of vectors cut out of flag pairs by meets."""
    _require_periodic(k, n)
    window = [FlagTensor(1, 1)]
    window += [Meet(FlagTensor(1, a), FlagTensor(2, k + 1 - a)) for a in range(2, k)]
    window.append(FlagTensor(2, 1))
    return WindowMap(k, n, tuple(window), domain="conf", name="phi")


def y_map(k: int, n: int) -> WindowMap:
    _require_periodic(k, n)
    window = [Scaled(-1, Meet(FlagTensor(1, 2), FlagTensor(0, k - 1))), FlagTensor(1, 1)]
    window += [Meet(FlagTensor(1, a), FlagTensor(2, k + 1 - a)) for a in range(3, k)]
    window.append(FlagTensor(2, 1))
    return WindowMap(k, n, tuple(window), domain="conf", name="y")


def P_map(k: int, power: int = 1) -> FunctionMap:
    name = "P" if power == 1 else f"P^{power}"
    return FunctionMap(k, lambda c: cyclic_P(c, power), "conf", "conf", name)


def star_map(k: int) -> FunctionMap:
    return FunctionMap(k, duality, "conf", "conf", "*")


def Theta_map(k: int) -> FunctionMap:
    return FunctionMap(k, rotation_Theta, "conf", "conf", "Theta")


# words -------------------------------------------------------------------------

TOKENS = ("s<i>", "s<i>i", "r", "ri", "th", "tw", "psi", "phi", "x", "y", "P", "Pi", "star", "Theta")


def letter(token: str, k: int, n: int) -> ConfigMap:
    if token == "r":
        return rho(k, n)
    if token == "ri":
        return rho_inv(k, n)
    if token == "th":
        return theta(k, n)
    if token == "tw":
        return twist_iota(k, n)
    if token == "psi":
        return psi_map(k, n)
    if token == "phi":
        return phi_map(k, n)
    if token == "x":
        return x_map(k, n)
    if token == "y":
        return y_map(k, n)
    if token == "P":
        return P_map(k)
    if token == "Pi":
        return P_map(k, -1)
    if token == "star":
        return star_map(k)
    if token == "Theta":
        return Theta_map(k)
    if token.startswith("s"):
        body = token[1:]
        inverse = body.endswith("i")
        if inverse:
            body = body[:-1]
        if body.isdigit():
            i = int(body)
            return sigma_inv(k, n, i) if inverse else sigma(k, n, i)
    raise ValueError(f"unknown word token {token!r}")


@dataclass(frozen=True)
class GroupWord:
    """Tokens read left to right; the word acts on points as the composition
    of its letters, so the rightmost letter is applied first."""

    k: int
    n: int
    tokens: tuple[str, ...]

    @classmethod
    def parse(cls, text: str, k: int, n: int) -> "GroupWord":
        tokens = tuple(text.split())
        for t in tokens:
            letter(t, k, n)
        return cls(k, n, tokens)

    def letters(self) -> list[ConfigMap]:
        return [_cached_letter(t, self.k, self.n) for t in self.tokens]

    def as_map(self) -> ConfigMap:
        return compose(*self.letters())

    def inverse(self) -> "GroupWord":
        """Reversed word of inverse letters."""
        return GroupWord(self.k, self.n, tuple(inverse_token(t) for t in reversed(self.tokens)))

    def __add__(self, other: "GroupWord") -> "GroupWord":
        if (self.k, self.n) != (other.k, other.n):
            raise ValueError("words live on different Grassmannians")
        return GroupWord(self.k, self.n, self.tokens + other.tokens)

    def __str__(self):
        return " ".join(self.tokens)


_INVERSE_LETTERS = {"r": "ri", "ri": "r", "th": "th", "P": "Pi", "Pi": "P"}


def inverse_token(t: str) -> str:
    if t in _INVERSE_LETTERS:
        return _INVERSE_LETTERS[t]
    if t.startswith("s") and t[1:].rstrip("i").isdigit():
        return t[:-1] if t.endswith("i") else t + "i"
    raise ValueError(f"no inverse letter known for {t!r}")


@functools.lru_cache(maxsize=None)
def _cached_letter(token, k, n):
    return letter(token, k, n)


# pullbacks ------------------------------------------------------------------------


def generic_source(m: ConfigMap, n: int):
    """Generic input for a map: the generic matrix, or generic flags."""
    if m.domain == "gr":
        return GenericConfig.generic(m.k, n)
    return generic_flag_config(m.k, 2 * n // m.k)


def gauge_slice(k: int, n: int) -> GenericConfig:
    """The configuration [I | Y] with Y a generic k x (n - k) matrix.

    Every GL-orbit of configurations with Δ_{1..k} != 0 meets it, so a
    relative SL-invariant is determined by its restriction, up to the power
    of Δ_{1..k} fixed by its weight.
    """
    ring = PolyRing([f"y_{{{i},{j}}}" for i in range(1, k + 1) for j in range(k + 1, n + 1)])
    g = ring.gens()
    one, zero = ring.constant(1), ring.constant(0)
    cols = [tuple(one if i == j else zero for i in range(k)) for j in range(k)]
    cols += [tuple(g[i * (n - k) + j] for i in range(k)) for j in range(n - k)]
    return GenericConfig(k, n, tuple(cols))


def slice_core(tokens: Sequence[str], f: MultiPoly, k: int, n: int) -> MultiPoly:
    """Restriction to :func:`gauge_slice` of the pullback of f along the letters,
    with the restricted frozen factors divided out and the result normalized.

    The first token pulls back first, as in :func:`dot_action`.
    """
    source = gauge_slice(k, n)
    for token in reversed(tokens):
        source = _cached_letter(token, k, n).apply(source)
    image = source.pullback(f)
    if image.is_zero():
        raise DegenerateMap("DegenerateMap")
    frozen = [gauge_slice(k, n).pullback(x) for x in frozen_pluckers(k, n)]
    _, core = strip_frozen(image, [x for x in frozen if x.total_degree() > 0])
    return normalize(core)[1]


@functools.lru_cache(maxsize=256)
def _image_entries(m: ConfigMap, n: int):
    return apply_generic(m, n)


def apply_generic(m: ConfigMap, n: int):
    return m.apply(generic_source(m, n))


def pullback(m: ConfigMap, f, n: int | None = None) -> MultiPoly:
    """Pull f back along m.

    ``f`` is a polynomial in generic matrix entries when m lands in vector
    configurations, or an :class:`FGFunction` when m lands in flags.
    """
    if n is None:
        n = getattr(m, "n", None) or _infer_n(m)
    image = _image_entries(m, n)
    if isinstance(image, GenericConfig):
        if not isinstance(f, MultiPoly):
            raise TypeError("maps into vector configurations pull back polynomials")
        return image.pullback(f)
    if not isinstance(f, FGFunction):
        raise TypeError("maps into flag configurations pull back flag invariants")
    return f.evaluate(image)


def _infer_n(m: ConfigMap) -> int:
    if isinstance(m, Composite):
        for p in m.parts:
            if getattr(p, "n", None):
                return p.n
            if isinstance(p, FlagMap):
                return p.r * p.k // 2
    if isinstance(m, FlagMap):
        return m.r * m.k // 2
    raise ValueError("cannot infer the number of vectors; pass n")


class DegenerateMap(ArithmeticError):
    """A pullback vanished identically."""


def frozen_pullback_table(m: ConfigMap, k: int, n: int, frozen: Sequence[MultiPoly]):
    """Monomials N_F with m^*(F) = N_F for each frozen F (quasi-automorphisms only)."""
    out = []
    for f in frozen:
        p = pullback(m, f, n)
        if p.is_zero():
            raise DegenerateMap("DegenerateMap")
        exps, core = strip_frozen(p, frozen)
        if not core.is_constant():
            raise ValueError(f"{m.name} does not send frozen variables to frozen monomials")
        out.append(FrozenLaurentMonomial(tuple(exps), core.leading_coefficient()))
    return out


_frozen_tables: dict = {}


def _frozen_table(token: str, k: int, n: int):
    key = (token, k, n)
    if key not in _frozen_tables:
        _frozen_tables[key] = frozen_pullback_table(_cached_letter(token, k, n), k, n, frozen_pluckers(k, n))
    return _frozen_tables[key]


def pull_monomial(table, mono: FrozenLaurentMonomial) -> FrozenLaurentMonomial:
    out = FrozenLaurentMonomial(tuple(0 for _ in mono.exponents), mono.scalar)
    for e, image in zip(mono.exponents, table):
        if e:
            out = out * image**e
    return out


@dataclass(frozen=True)
class DotResult:
    core: MultiPoly
    monomial: FrozenLaurentMonomial
    key: bytes
    known: bool


class CoreTooLarge(ArithmeticError):
    """An intermediate core exceeded the requested size bound."""


def dot_action(word: GroupWord, x: MultiPoly, known: dict | None = None, max_terms: int | None = None) -> DotResult:
    """Pull x back along the word one letter at a time, stripping frozen factors.

    Returns the normalized core with the accumulated frozen monomial so that
    ``word^*(x) = monomial * core``; a frozen monomial x has core 1.
    ``known`` maps keys to labels; new cores are admitted to it.  With
    ``max_terms`` a core larger than the bound is not pulled back further.
    """
    k, n = word.k, word.n
    frozen = frozen_pluckers(k, n)
    exps, core = strip_frozen(x, frozen)
    unit, core = normalize(core)
    mono = FrozenLaurentMonomial(tuple(exps), unit)
    # word^* = (last letter)^* ∘ ... ∘ (first letter)^*: the first token acts first on functions
    for token in word.tokens:
        m = _cached_letter(token, k, n)
        if m.domain != "gr" or m.codomain != "gr":
            raise ValueError("dot action words must map vector configurations to themselves")
        if max_terms is not None and len(core) > max_terms:
            raise CoreTooLarge(f"core with {len(core)} terms before letter {token}")
        mono = pull_monomial(_frozen_table(token, k, n), mono)
        p = pullback(m, core, n)
        if p.is_zero():
            raise DegenerateMap("DegenerateMap")
        exps, stripped = strip_frozen(p, frozen)
        unit, core = normalize(stripped)
        mono = mono * FrozenLaurentMonomial(tuple(exps), unit)
    key = core.key()
    is_known = known is not None and key in known
    if known is not None and not is_known:
        known[key] = f"new{len(known)}"
    return DotResult(core, mono, key, is_known)
