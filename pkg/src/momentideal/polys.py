"""Sparse multivariate polynomials, exponent vectors, and monomial orders.

Exponents are plain ``tuple[int, ...]``; a polynomial is an exponent ->
coefficient map over a :class:`~momentideal.fields.FieldSpec`.  Zero
coefficients are never stored.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from itertools import combinations_with_replacement

from .fields import FieldSpec

Exponent = tuple

LT, EQ, GT = -1, 0, 1


def exp_add(a: Exponent, b: Exponent) -> Exponent:
    return tuple(x + y for x, y in zip(a, b))


def exp_degree(a: Exponent) -> int:
    return sum(a)


def unit_exponent(nvars: int, i: int) -> Exponent:
    return tuple(1 if j == i else 0 for j in range(nvars))


def connected_to_zero(exponents) -> bool:
    """True iff every nonzero exponent has a predecessor one step lower.

    This is connectedness-to-1 of the monomial set on the exponent side:
    each member is reachable from the origin by single-variable steps.
    """
    exps = set(exponents)
    if not exps:
        return True
    for alpha in exps:
        if exp_degree(alpha) == 0:
            continue
        if not any(
            alpha[i] > 0 and tuple(a - (1 if j == i else 0) for j, a in enumerate(alpha)) in exps
            for i in range(len(alpha))
        ):
            return False
    return True


def simplex(nvars: int, degree: int) -> list:
    """All exponents of total degree <= degree, in deglex order."""
    out = []
    for d in range(degree + 1):
        block = []
        for bars in combinations_with_replacement(range(nvars), d):
            alpha = [0] * nvars
            for i in bars:
                alpha[i] += 1
            block.append(tuple(alpha))
        # within one degree, more weight on earlier variables comes first
        block.sort(key=lambda a: tuple(-x for x in a))
        out.extend(block)
    return out


@dataclass(frozen=True)
class MonomialOrder:
    """Total degree first, then a lexicographic tie-break.

    ``perm`` lists variable indices from smallest to largest; the default is
    x1 < x2 < ... < xn.  With deglex the monomial putting more weight on the
    *smaller* variable comes first, which reproduces the traversal
    1, x1, x2, x3, x1^2, x1 x2, ... used throughout the worked examples.
    """

    kind: str = "deglex"
    perm: tuple | None = None

    def __post_init__(self):
        if self.kind not in ("deglex", "degrevlex"):
            raise ValueError(f"unknown monomial order {self.kind!r}")
        if self.perm is not None and sorted(self.perm) != list(range(len(self.perm))):
            raise ValueError("perm must be a permutation of 0..n-1")

    def key(self, alpha: Exponent):
        perm = self.perm if self.perm is not None else range(len(alpha))
        if self.kind == "deglex":
            return (sum(alpha), tuple(-alpha[i] for i in perm))
        return (sum(alpha), tuple(alpha[i] for i in reversed(list(perm))))

    def compare(self, a: Exponent, b: Exponent) -> int:
        ka, kb = self.key(a), self.key(b)
        return LT if ka < kb else (GT if ka > kb else EQ)

    def sort(self, exponents) -> list:
        return sorted(exponents, key=self.key)

    def min(self, exponents):
        return min(exponents, key=self.key)

    def to_json(self) -> dict:
        out = {"kind": self.kind}
        if self.perm is not None:
            out["perm"] = list(self.perm)
        return out

    @staticmethod
    def from_json(obj) -> "MonomialOrder":
        if isinstance(obj, str):
            return MonomialOrder(obj)
        perm = tuple(obj["perm"]) if "perm" in obj else None
        return MonomialOrder(obj.get("kind", "deglex"), perm)


def order_compare(order: MonomialOrder, alpha: Exponent, beta: Exponent) -> int:
    """Compare two exponents; returns LT (-1), EQ (0) or GT (1)."""
    if len(alpha) != len(beta):
        raise ValueError("exponent lengths differ")
    return order.compare(alpha, beta)


# canonical term ordering for printing/serialization (independent of any
# user-chosen order, so output is deterministic)
_CANON = MonomialOrder()


class Polynomial:
    """Sparse multivariate polynomial with exact coefficients."""

    __slots__ = ("nvars", "field", "terms")

    def __init__(self, nvars: int, field: FieldSpec, terms: dict | None = None):
        self.nvars = nvars
        self.field = field
        clean = {}
        if terms:
            for alpha, coeff in terms.items():
                if len(alpha) != nvars:
                    raise ValueError(f"exponent {alpha} has wrong arity")
                if not field.is_zero(coeff):
                    clean[tuple(alpha)] = coeff
        self.terms = clean

    # -- constructors -------------------------------------------------------

    @staticmethod
    def zero(nvars: int, field: FieldSpec) -> "Polynomial":
        return Polynomial(nvars, field)

    @staticmethod
    def one(nvars: int, field: FieldSpec) -> "Polynomial":
        return Polynomial(nvars, field, {(0,) * nvars: field.one})

    @staticmethod
    def monomial(nvars: int, field: FieldSpec, alpha: Exponent, coeff=None) -> "Polynomial":
        c = field.one if coeff is None else coeff
        return Polynomial(nvars, field, {tuple(alpha): c})

    @staticmethod
    def from_clean_terms(nvars: int, field: FieldSpec, terms: dict) -> "Polynomial":
        """Wrap a term map known to be canonical (right arity, no zeros)."""
        poly = Polynomial.__new__(Polynomial)
        poly.nvars = nvars
        poly.field = field
        poly.terms = terms
        return poly

    # -- inspection ----------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def support(self) -> set:
        return set(self.terms)

    def degree(self) -> int:
        return max((exp_degree(a) for a in self.terms), default=0)

    def coeff(self, alpha: Exponent):
        return self.terms.get(tuple(alpha), self.field.zero)

    def lead_exponent(self, order: MonomialOrder) -> Exponent:
        if self.is_zero():
            raise ValueError("zero polynomial has no leading exponent")
        return max(self.terms, key=order.key)

    def sorted_terms(self) -> list:
        return [(a, self.terms[a]) for a in sorted(self.terms, key=_CANON.key)]

    # -- arithmetic -----------------------------------------------------------

    def _like(self, other: "Polynomial"):
        if self.nvars != other.nvars or self.field != other.field:
            raise ValueError("polynomials over different rings")

    def __add__(self, other: "Polynomial") -> "Polynomial":
        self._like(other)
        f = self.field
        terms = dict(self.terms)
        for a, c in other.terms.items():
            terms[a] = f.add(terms.get(a, f.zero), c)
        return Polynomial(self.nvars, f, terms)

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        return self + (-other)

    def __neg__(self) -> "Polynomial":
        f = self.field
        return Polynomial(self.nvars, f, {a: f.neg(c) for a, c in self.terms.items()})

    def scale(self, c) -> "Polynomial":
        f = self.field
        if f.is_zero(c):
            return Polynomial.zero(self.nvars, f)
        return Polynomial(self.nvars, f, {a: f.mul(c, v) for a, v in self.terms.items()})

    def __mul__(self, other: "Polynomial") -> "Polynomial":
        self._like(other)
        f = self.field
        terms = {}
        for a, ca in self.terms.items():
            for b, cb in other.terms.items():
                ab = exp_add(a, b)
                terms[ab] = f.add(terms.get(ab, f.zero), f.mul(ca, cb))
        return Polynomial(self.nvars, f, terms)

    def shift(self, gamma: Exponent) -> "Polynomial":
        """Multiply by the monomial x^gamma."""
        if len(gamma) != self.nvars:
            raise ValueError("shift exponent has wrong arity")
        return Polynomial(
            self.nvars, self.field, {exp_add(a, gamma): c for a, c in self.terms.items()}
        )

    def evaluate(self, point):
        if len(point) != self.nvars:
            raise ValueError("point has wrong arity")
        f = self.field
        total = f.zero
        for alpha, c in self.terms.items():
            v = c
            for x, e in zip(point, alpha):
                if e:
                    v = f.mul(v, f.power(x, e))
            total = f.add(total, v)
        return total

    # -- equality / display ---------------------------------------------------

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Polynomial)
            and self.nvars == other.nvars
            and self.field == other.field
            and self.terms == other.terms
        )

    def __hash__(self):
        return hash((self.nvars, self.field, frozenset(self.terms.items())))

    def __repr__(self):
        return f"Polynomial({self.nvars}, {self.field.kind}, {self!s})"

    def __str__(self):
        if self.is_zero():
            return "0"
        parts = []
        for alpha, c in reversed(self.sorted_terms()):
            mono = "*".join(
                f"x{i + 1}" if e == 1 else f"x{i + 1}^{e}" for i, e in enumerate(alpha) if e
            )
            cs = self.field.format(c)
            if mono:
                piece = mono if cs == "1" else (f"-{mono}" if cs == "-1" else f"{cs}*{mono}")
            else:
                piece = cs
            parts.append(piece)
        out = parts[0]
        for piece in parts[1:]:
            out += f" - {piece[1:]}" if piece.startswith("-") else f" + {piece}"
        return out

    # -- JSON -------------------------------------------------------------------

    def to_json(self) -> list:
        return [
            {"alpha": list(a), "coeff": self.field.format(c)} for a, c in self.sorted_terms()
        ]

    @staticmethod
    def from_json(obj: list, nvars: int, field: FieldSpec) -> "Polynomial":
        terms = {}
        for item in obj:
            alpha = tuple(int(x) for x in item["alpha"])
            terms[alpha] = field.parse(str(item["coeff"]))
        return Polynomial(nvars, field, terms)


@dataclass(frozen=True)
class ScaledMonomial:
    """A nonzero multiple of a single monomial, scale * x^gamma."""

    gamma: Exponent
    scale: object = dc_field(default=1)

    def __post_init__(self):
        if self.scale == 0:
            raise ValueError("scale must be nonzero")
        object.__setattr__(self, "gamma", tuple(self.gamma))

    def to_polynomial(self, nvars: int, field: FieldSpec) -> Polynomial:
        return Polynomial.monomial(nvars, field, self.gamma, self.scale)

    def to_json(self, field: FieldSpec) -> dict:
        return {"gamma": list(self.gamma), "scale": field.format(self.scale)}

    @staticmethod
    def from_json(obj: dict, field: FieldSpec) -> "ScaledMonomial":
        return ScaledMonomial(tuple(int(x) for x in obj["gamma"]), field.parse(str(obj["scale"])))


def mono_mul(p: Polynomial, gamma: Exponent) -> Polynomial:
    """Multiply p by the monomial x^gamma."""
    return p.shift(gamma)


def evaluate(p: Polynomial, point):
    """Exact value of p at a point with coordinates in its field."""
    return p.evaluate(point)
