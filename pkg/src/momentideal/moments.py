"""Truncated dual elements: moment storage, the sigma-bilinear form, and
truncated Hankel matrices.

A :class:`MomentSequence` holds the known values sigma_alpha on a finite
support ``a``.  Pairings are total on the span of the supported monomials
only; any product that leaves the support raises :class:`SupportError` -
out-of-support is "unknown", never silently zero.
"""

from __future__ import annotations

from dataclasses import dataclass

from .fields import FieldSpec
from .polys import Exponent, Polynomial, connected_to_zero, exp_add, simplex, unit_exponent


class SupportError(Exception):
    """A required product left the known support."""

    def __init__(self, missing):
        self.missing = sorted(missing)
        super().__init__(f"exponents outside the support: {self.missing}")


class MomentSequence:
    """Known moments of a linear functional on a finite exponent support.

    The support must contain the origin and be connected to it (every member
    reachable by single-variable steps), which is what the border-basis
    engine requires of its input.
    """

    __slots__ = ("nvars", "field", "values")

    def __init__(self, nvars: int, field: FieldSpec, values: dict):
        self.nvars = nvars
        self.field = field
        vals = {}
        for alpha, v in values.items():
            alpha = tuple(int(x) for x in alpha)
            if len(alpha) != nvars or any(x < 0 for x in alpha):
                raise ValueError(f"bad exponent {alpha}")
            vals[alpha] = v
        if not connected_to_zero(vals):
            raise ValueError("support is not connected to the origin")
        self.values = vals

    @staticmethod
    def on_simplex(nvars: int, field: FieldSpec, degree: int, values: dict) -> "MomentSequence":
        """Sequence on the full simplex |alpha| <= degree; unlisted values are 0."""
        vals = {alpha: field.zero for alpha in simplex(nvars, degree)}
        for alpha, v in values.items():
            alpha = tuple(alpha)
            if alpha not in vals:
                raise ValueError(f"exponent {alpha} exceeds degree {degree}")
            vals[alpha] = v
        return MomentSequence(nvars, field, vals)

    @staticmethod
    def from_function(nvars: int, field: FieldSpec, degree: int, fn) -> "MomentSequence":
        """Sample sigma_alpha = fn(alpha) on the simplex |alpha| <= degree."""
        return MomentSequence(
            nvars, field, {alpha: fn(alpha) for alpha in simplex(nvars, degree)}
        )

    @property
    def support(self) -> set:
        return set(self.values)

    def value(self, alpha: Exponent):
        return self.values[tuple(alpha)]

    def is_zero(self) -> bool:
        return all(self.field.is_zero(v) for v in self.values.values())

    # -- pairings ----------------------------------------------------------

    def apply(self, p: Polynomial):
        """<sigma | p> = sum of p_alpha * sigma_alpha."""
        f = self.field
        missing = [a for a in p.terms if a not in self.values]
        if missing:
            raise SupportError(missing)
        total = f.zero
        for alpha, c in p.terms.items():
            total = f.add(total, f.mul(c, self.values[alpha]))
        return total

    def inner(self, p: Polynomial, q: Polynomial):
        """<p, q>_sigma = <sigma | p*q>."""
        return self.apply(p * q)

    def inner_monomial(self, p: Polynomial, gamma: Exponent):
        """<p, x^gamma>_sigma without building the product polynomial."""
        f = self.field
        total = f.zero
        missing = []
        for alpha, c in p.terms.items():
            s = exp_add(alpha, gamma)
            v = self.values.get(s)
            if v is None:
                missing.append(s)
            elif not missing:
                total = f.add(total, f.mul(c, v))
        if missing:
            raise SupportError(missing)
        return total

    def products_supported(self, p: Polynomial, gamma: Exponent) -> bool:
        """True iff x^gamma * p stays inside the known span."""
        return all(exp_add(alpha, gamma) in self.values for alpha in p.terms)

    # -- serialization -------------------------------------------------------

    def to_json(self) -> dict:
        f = self.field
        moments = [
            {"alpha": list(a), "value": f.format(self.values[a])}
            for a in sorted(self.values)
        ]
        return {"nvars": self.nvars, "field": f.to_json(), "moments": moments}

    @staticmethod
    def from_json(obj: dict) -> "MomentSequence":
        field = FieldSpec.from_json(obj["field"])
        nvars = int(obj["nvars"])
        listed = {
            tuple(int(x) for x in item["alpha"]): field.parse(str(item["value"]))
            for item in obj.get("moments", [])
        }
        if "degree" in obj:
            return MomentSequence.on_simplex(nvars, field, int(obj["degree"]), listed)
        return MomentSequence(nvars, field, listed)

    def __eq__(self, other):
        return (
            isinstance(other, MomentSequence)
            and self.nvars == other.nvars
            and self.field == other.field
            and self.values == other.values
        )

    def __repr__(self):
        return f"MomentSequence(nvars={self.nvars}, |support|={len(self.values)})"


@dataclass
class HankelMatrix:
    """Truncated Hankel matrix: entries[i][j] = <sigma | B[j] * B'[i]>."""

    row_labels: list
    col_labels: list
    entries: list

    def entry(self, i: int, j: int):
        return self.entries[i][j]

    @property
    def shape(self):
        return (len(self.row_labels), len(self.col_labels))


def _as_polynomial(label, nvars: int, field: FieldSpec) -> Polynomial:
    if isinstance(label, Polynomial):
        return label
    return Polynomial.monomial(nvars, field, tuple(label))


def apply(sigma: MomentSequence, p: Polynomial):
    return sigma.apply(p)


def inner(sigma: MomentSequence, p: Polynomial, q: Polynomial):
    return sigma.inner(p, q)


def hankel(sigma: MomentSequence, cols, rows) -> HankelMatrix:
    """Matrix of the truncated Hankel operator on the given label lists.

    ``cols`` plays the role of B and ``rows`` of B'; labels may be exponent
    tuples (monomials) or polynomials.
    """
    n, f = sigma.nvars, sigma.field
    col_polys = [_as_polynomial(b, n, f) for b in cols]
    row_polys = [_as_polynomial(b, n, f) for b in rows]
    entries = [[sigma.inner(bj, bi) for bj in col_polys] for bi in row_polys]
    return HankelMatrix(list(rows), list(cols), entries)


def moments_of_decomposition(dec, support) -> MomentSequence:
    """Brute-force oracle: sigma_alpha = sum of w_i * xi_i^alpha on the support.

    ``dec`` needs ``nvars``, ``field`` and ``terms`` attributes (weight, point
    pairs); an empty decomposition gives the all-zero sequence.
    """
    f = dec.field
    values = {}
    for alpha in support:
        total = f.zero
        for weight, point in dec.terms:
            v = weight
            for x, e in zip(point, alpha):
                if e:
                    v = f.mul(v, f.power(x, e))
            total = f.add(total, v)
        values[tuple(alpha)] = total
    return MomentSequence(dec.nvars, f, values)
