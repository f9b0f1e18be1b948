"""Seeds over a fixed ambient polynomial ring and their mutation."""
from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Sequence

from .exact import MultiPoly, PolyRing, exact_divide, normalize, product
from .quiver import ExtQuiver, canonical_form, mutate


class ExchangeNotPolynomial(ArithmeticError):
    """The exchange binomial was not divisible by the old variable."""


ClusterVarKey = bytes


def var_key(x: MultiPoly) -> ClusterVarKey:
    """Key of the ray through x: equal keys iff the polynomials agree up to a scalar."""
    return normalize(x)[1].key()


@dataclass(frozen=True)
class RationalPair:
    """A reduced fraction of polynomials, used for seeds whose ambient ring is the initial cluster."""

    num: MultiPoly
    den: MultiPoly

    @classmethod
    def of(cls, num: MultiPoly, den: MultiPoly) -> "RationalPair":
        g = MultiPoly(num.ring, num.raw.gcd(den.raw))
        if not g.is_constant():
            num, den = exact_divide(num, g), exact_divide(den, g)
        lc = den.leading_coefficient()
        return cls(num.scale(1 / lc), den.scale(1 / lc))

    def __mul__(self, other: "RationalPair") -> "RationalPair":
        return RationalPair.of(self.num * other.num, self.den * other.den)

    def __add__(self, other: "RationalPair") -> "RationalPair":
        return RationalPair.of(self.num * other.den + other.num * self.den, self.den * other.den)

    def inverse(self) -> "RationalPair":
        return RationalPair.of(self.den, self.num)

    def is_laurent(self) -> bool:
        """True when the denominator is a monomial."""
        return len(self.den) == 1

    def __str__(self) -> str:
        return f"({self.num}) / ({self.den})"


@dataclass(frozen=True)
class Seed:
    quiver: ExtQuiver
    cluster: tuple

    def __post_init__(self):
        object.__setattr__(self, "cluster", tuple(self.cluster))
        if len(self.cluster) != self.quiver.size:
            raise ValueError("cluster length does not match the quiver")
        for x in self.cluster:
            if isinstance(x, MultiPoly) and x.is_zero():
                raise ValueError("cluster entries must be nonzero")

    @property
    def n_mutable(self) -> int:
        return self.quiver.n_mutable

    @property
    def mutable(self) -> tuple:
        return self.cluster[: self.quiver.n_mutable]

    @property
    def frozen(self) -> tuple:
        return self.cluster[self.quiver.n_mutable:]

    def to_json(self) -> dict:
        data = self.quiver.to_json()
        data["cluster"] = [str(x) for x in self.cluster]
        return data

    @classmethod
    def from_json(cls, data: dict | str, ring: PolyRing) -> "Seed":
        if isinstance(data, str):
            data = json.loads(data)
        return cls(ExtQuiver.from_json(data), tuple(ring.parse(t) for t in data["cluster"]))


def exchange_monomials(seed: Seed, k: int) -> tuple:
    b = seed.quiver.b
    ins, outs = [], []
    for i, x in enumerate(seed.cluster):
        w = b[i][k]
        if w > 0:
            ins.extend([x] * w)
        elif w < 0:
            outs.extend([x] * -w)
    return ins, outs


def mutate_seed(seed: Seed, k: int) -> Seed:
    """Mutate at the 0-based mutable index k using the exchange relation."""
    q = mutate(seed.quiver, k)
    ins, outs = exchange_monomials(seed, k)
    xk = seed.cluster[k]
    if isinstance(xk, RationalPair):
        one = RationalPair.of(xk.num.ring.one, xk.num.ring.one)
        p_in = one
        for x in ins:
            p_in = p_in * x
        p_out = one
        for x in outs:
            p_out = p_out * x
        new = (p_in + p_out) * xk.inverse()
    else:
        ring = xk.ring
        binomial = product(ins, ring) + product(outs, ring)
        new = exact_divide(binomial, xk)
        if new is None:
            raise ExchangeNotPolynomial("ExchangeNotPolynomial")
    cluster = list(seed.cluster)
    cluster[k] = new
    return Seed(q, tuple(cluster))


def abstract_seed(q: ExtQuiver, prefix: str = "x") -> Seed:
    """Seed whose ambient ring is generated by its own initial cluster."""
    ring = PolyRing([f"{prefix}{i + 1}" for i in range(q.size)])
    one = ring.one
    return Seed(q, tuple(RationalPair(g, one) for g in ring.gens()))


def cluster_variables(seed: Seed) -> frozenset:
    return frozenset(_entry_key(x) for x in seed.mutable)


def _entry_key(x) -> bytes:
    if isinstance(x, RationalPair):
        return b"%s/%s" % (x.num.key(), x.den.key())
    return var_key(x)


def seed_equal(s1: Seed, s2: Seed, up_to_relabeling: bool = False) -> bool:
    if s1.quiver.n_mutable != s2.quiver.n_mutable or s1.quiver.n_frozen != s2.quiver.n_frozen:
        return False
    k1 = [_entry_key(x) for x in s1.cluster]
    k2 = [_entry_key(x) for x in s2.cluster]
    if not up_to_relabeling:
        return k1 == k2 and s1.quiver == s2.quiver
    if sorted(k1) != sorted(k2):
        return False
    if canonical_form(s1.quiver) != canonical_form(s2.quiver):
        return False
    # cluster entries of a seed are distinct, so the matching permutation is forced
    where = {key: i for i, key in enumerate(k1)}
    perm = [where[key] for key in k2]
    m = s1.quiver.n_mutable
    if any(p >= m for p in perm[:m]):
        return False
    return s1.quiver.relabel(perm) == s2.quiver


def mutation_path(seed: Seed, path: Sequence[int]) -> Seed:
    for k in path:
        seed = mutate_seed(seed, k)
    return seed
