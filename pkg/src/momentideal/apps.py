"""Application drivers: exponential-sum recovery on grids, sparse
interpolation, syndrome decoding, symmetric tensor decomposition, and
vanishing ideals of point sets.

Each driver maps its input to a moment sequence, runs the border-basis
engine, and maps the output back to the application domain.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import factorial

from .border import (
    BorderBasisResult,
    MonomialOrder,
    NotCertified,
    border_basis,
    mult_matrices,
)
from .decomp import (
    Decomposition,
    SingularSystem,
    InconsistentSystem,
    VerificationFailed,
    common_roots,
    decompose,
    solve_weights,
)
from .fields import FieldSpec
from .moments import MomentSequence, moments_of_decomposition
from .polys import Polynomial, exp_degree, simplex


class NotAPower(Exception):
    """A recovered coordinate is not an exact power of the sampling base."""


class DecodingFailure(Exception):
    pass


# -- Prony-type decomposition on an integer grid --------------------------------


def prony_grid(samples: MomentSequence, order: MonomialOrder | None = None, seed: int = 0) -> Decomposition:
    """Decompose grid samples sigma_alpha = sum w_i xi_i^alpha into points and
    weights (the points are the term-wise bases of the exponential sum)."""
    res = border_basis(samples, order)
    if not res.certified:
        raise NotCertified(res.diagnostic)
    tables = mult_matrices(samples, res)
    return decompose(samples, res, tables, seed=seed)


# -- sparse interpolation ---------------------------------------------------------


@dataclass(frozen=True)
class SparseTerm:
    """One monomial of a sparse polynomial: weight * u^exponent."""

    weight: object
    exponent: tuple

    def __post_init__(self):
        if self.weight == 0:
            raise ValueError("weight must be nonzero")
        object.__setattr__(self, "exponent", tuple(self.exponent))


def sample_sparse_poly(terms, zeta, degree: int, field: FieldSpec, nvars: int) -> MomentSequence:
    """Evaluate h(u) = sum w_i u^g_i at the grid points (zeta_1^a1, ...,
    zeta_n^an) for |a| <= degree: the sampling oracle of the interpolation
    workflow."""
    values = {}
    for alpha in simplex(nvars, degree):
        total = field.zero
        for t in terms:
            v = t.weight
            for j in range(nvars):
                v = field.mul(v, field.power(field.from_int(zeta[j] ** t.exponent[j]), alpha[j]))
            total = field.add(total, v)
        values[alpha] = total
    return MomentSequence(nvars, field, values)


def _integer_log(value, base: int, field: FieldSpec) -> int:
    e = 0
    x = value
    while x != field.one:
        q = field.div(x, field.from_int(base))
        # exact powers stay integral all the way down to 1
        if field.kind == "rational" and (q.denominator != 1 or q <= 0):
            raise NotAPower(f"{value} is not a power of {base}")
        x = q
        e += 1
        if e > 64:
            raise NotAPower(f"{value} is not a power of {base}")
    return e


def sparse_interpolate(evals: MomentSequence, zeta, degree: int | None = None, seed: int = 0) -> list:
    """Recover the sparse polynomial behind samples sigma_alpha = h(zeta^alpha).

    The recovered points must be exact powers of the bases; their exponents
    come from iterated exact division (integer logarithm).
    """
    if evals.field.kind != "rational":
        raise ValueError("sparse interpolation needs the rational field")
    if any(z < 2 for z in zeta):
        raise ValueError("sampling bases must be >= 2")
    if len(zeta) != evals.nvars:
        raise ValueError("one base per variable required")
    dec = prony_grid(evals, seed=seed)
    terms = []
    for w, pt in dec.canonical().terms:
        gamma = tuple(_integer_log(x, z, evals.field) for x, z in zip(pt, zeta))
        terms.append(SparseTerm(w, gamma))
    return sorted(terms, key=lambda t: t.exponent)


# -- algebraic-code decoding -------------------------------------------------------


@dataclass
class CodeSpec:
    """Evaluation-code description: the code is the set of words orthogonal
    to every monomial evaluation of degree <= degree at the points."""

    field: FieldSpec
    points: list
    degree: int

    def __post_init__(self):
        if not self.field.is_prime_field:
            raise ValueError("codes are defined over prime fields")
        self.points = [tuple(self.field.from_int(int(x)) for x in pt) for pt in self.points]
        if len({pt for pt in self.points}) != len(self.points):
            raise ValueError("evaluation points must be pairwise distinct")

    @property
    def nvars(self) -> int:
        return len(self.points[0])

    @property
    def length(self) -> int:
        return len(self.points)

    def to_json(self) -> dict:
        return {
            "field": self.field.to_json(),
            "points": [[int(x) for x in pt] for pt in self.points],
            "degree": self.degree,
        }

    @staticmethod
    def from_json(obj: dict) -> "CodeSpec":
        return CodeSpec(FieldSpec.from_json(obj["field"]), obj["points"], int(obj["degree"]))


def syndrome_moments(code: CodeSpec, word) -> MomentSequence:
    """sigma_alpha = sum word_i * xi_i^alpha for |alpha| <= degree."""
    f = code.field
    if len(word) != code.length:
        raise ValueError(f"word length {len(word)} != code length {code.length}")
    word = [f.from_int(int(w)) for w in word]
    values = {}
    for alpha in simplex(code.nvars, code.degree):
        total = f.zero
        for w, pt in zip(word, code.points):
            v = w
            for x, e in zip(pt, alpha):
                if e:
                    v = f.mul(v, f.power(x, e))
            total = f.add(total, v)
        values[alpha] = total
    return MomentSequence(code.nvars, f, values)


@dataclass
class DecodeResult:
    corrected: list
    positions: list  # 1-based column numbers, the usual coding convention
    values: list

    def to_json(self, field: FieldSpec) -> dict:
        return {
            "corrected": [field.format(c) for c in self.corrected],
            "positions": list(self.positions),
            "values": [field.format(v) for v in self.values],
        }


def decode(code: CodeSpec, received) -> DecodeResult:
    """Correct a received word: locate errors as the common roots of the
    syndrome relations, solve for their amplitudes, and verify that the
    corrected word has all-zero syndromes."""
    f = code.field
    sigma = syndrome_moments(code, received)
    received = [f.from_int(int(x)) for x in received]
    if sigma.is_zero():
        return DecodeResult(list(received), [], [])
    res = border_basis(sigma)
    if not res.k:
        raise DecodingFailure("no error-locator relations found")
    loc = common_roots(res.k, code.points)
    if not loc:
        raise DecodingFailure("error locators have no roots among the code points")
    points = [code.points[i] for i in loc]
    exponents = _independent_exponents(points, sigma, f)
    try:
        weights = solve_weights(points, sigma, exponents)
    except (SingularSystem, InconsistentSystem) as exc:
        raise DecodingFailure(f"no consistent error amplitudes: {exc}") from exc
    positions, values = [], []
    corrected = list(received)
    for i, w in zip(loc, weights):
        if f.is_zero(w):
            continue
        positions.append(i + 1)
        values.append(w)
        corrected[i] = f.sub(corrected[i], w)
    if not syndrome_moments(code, corrected).is_zero():
        raise DecodingFailure("corrected word is not a codeword")
    return DecodeResult(corrected, positions, values)


def _independent_exponents(points, sigma: MomentSequence, field: FieldSpec):
    """Greedily pick support exponents whose evaluation rows at the points
    are linearly independent (rank = number of points)."""
    order = MonomialOrder()
    m = len(points)
    chosen = []
    rows = []

    def reduce(row):
        for r in rows:
            lead = next(i for i, v in enumerate(r) if not field.is_zero(v))
            if not field.is_zero(row[lead]):
                c = field.div(row[lead], r[lead])
                row = [field.sub(a, field.mul(c, b)) for a, b in zip(row, r)]
        return row

    for alpha in order.sort(sigma.support):
        row = []
        for pt in points:
            v = field.one
            for x, e in zip(pt, alpha):
                if e:
                    v = field.mul(v, field.power(x, e))
            row.append(v)
        red = reduce(row)
        if any(not field.is_zero(v) for v in red):
            rows.append(red)
            chosen.append(alpha)
        if len(chosen) == m:
            return chosen
    raise DecodingFailure("evaluation rows never reach full rank")


# -- symmetric tensor decomposition ---------------------------------------------


@dataclass
class SymmetricTensor:
    """A degree-d form in x0..xn stored by raw polynomial coefficients
    (what one reads off the printed polynomial, binomials included)."""

    degree: int
    nvars: int  # number of variables including x0
    field: FieldSpec
    coeffs: dict

    def __post_init__(self):
        clean = {}
        for alpha, c in self.coeffs.items():
            alpha = tuple(int(x) for x in alpha)
            if len(alpha) != self.nvars or exp_degree(alpha) != self.degree:
                raise ValueError(f"exponent {alpha} is not degree-{self.degree} in {self.nvars} variables")
            if not self.field.is_zero(c):
                clean[alpha] = c
        self.coeffs = clean

    def to_json(self) -> dict:
        f = self.field
        return {
            "degree": self.degree,
            "nvars": self.nvars,
            "field": f.to_json(),
            "terms": [
                {"alpha": list(a), "coeff": f.format(c)} for a, c in sorted(self.coeffs.items())
            ],
        }

    @staticmethod
    def from_json(obj: dict) -> "SymmetricTensor":
        f = FieldSpec.from_json(obj["field"])
        coeffs = {
            tuple(int(x) for x in t["alpha"]): f.parse(str(t["coeff"])) for t in obj["terms"]
        }
        return SymmetricTensor(int(obj["degree"]), int(obj["nvars"]), f, coeffs)


def _multinomial(d: int, alpha) -> int:
    out = factorial(d)
    for a in alpha:
        out //= factorial(a)
    return out


def tensor_to_moments(t: SymmetricTensor) -> MomentSequence:
    """Dehomogenized moments: sigma_alpha = coeff of x0^(d-|alpha|) x^alpha
    divided by the multinomial coefficient."""
    n = t.nvars - 1
    f = t.field
    values = {}
    for alpha in simplex(n, t.degree):
        full = (t.degree - exp_degree(alpha),) + alpha
        raw = t.coeffs.get(full, f.zero)
        values[alpha] = f.div(raw, f.from_int(_multinomial(t.degree, full)))
    return MomentSequence(n, f, values)


def expand_decomposition(dec: Decomposition, degree: int) -> SymmetricTensor:
    """Re-expand sum of w_i (x0 + xi_1 x1 + ... + xi_n xn)^degree into raw
    coefficients (the verification direction of the tensor workflow)."""
    f = dec.field
    n = dec.nvars
    coeffs = {}
    for full in simplex(n + 1, degree):
        if exp_degree(full) != degree:
            continue
        total = f.zero
        for w, pt in dec.terms:
            v = f.mul(w, f.from_int(_multinomial(degree, full)))
            for x, e in zip(pt, full[1:]):
                if e:
                    v = f.mul(v, f.power(x, e))
            total = f.add(total, v)
        if not f.is_zero(total):
            coeffs[full] = total
    return SymmetricTensor(degree, n + 1, f, coeffs)


def tensor_decompose(t: SymmetricTensor, seed: int = 0) -> Decomposition:
    """Waring-type decomposition with x0-coordinate normalized to 1; verified
    by exact re-expansion against the input."""
    if t.field.kind != "rational":
        raise ValueError("tensor decomposition needs the rational field")
    sigma = tensor_to_moments(t)
    res = border_basis(sigma)
    if not res.certified:
        raise NotCertified(res.diagnostic)
    tables = mult_matrices(sigma, res)
    dec = decompose(sigma, res, tables, seed=seed)
    if expand_decomposition(dec, t.degree).coeffs != t.coeffs:
        raise VerificationFailed(
            "re-expansion differs from the input tensor; a linear change of "
            "coordinates is needed when some x0-coordinate vanishes"
        )
    return dec


# -- vanishing ideals of point sets ------------------------------------------------


def vanishing_ideal(points, degree: int, field: FieldSpec, weights=None):
    """Generators of the ideal of the points plus interpolation polynomials.

    Returns (k, interpolants) where every element of k vanishes on the
    points and interpolant u_i takes value 1 at point i and 0 elsewhere.
    Weights default to 1; any nonzero choice works.
    """
    points = [tuple(pt) for pt in points]
    r = len(points)
    if weights is None:
        weights = [field.one] * r
    dec = Decomposition(len(points[0]), field, list(zip(weights, points)))
    sigma = moments_of_decomposition(dec, simplex(dec.nvars, degree))
    res = border_basis(sigma)
    if not res.certified or res.r != r:
        raise NotCertified(
            res.diagnostic or f"degree {degree} separates only {res.r} of {r} points"
        )
    # interpolants: solve p-basis evaluations against the identity matrix
    evals = [[poly.evaluate(pt) for poly in res.p] for pt in points]
    interpolants = []
    for i in range(r):
        target = [field.one if j == i else field.zero for j in range(r)]
        coeffs = _solve_square(evals, target, field)
        u = Polynomial.zero(dec.nvars, field)
        for cval, poly in zip(coeffs, res.p):
            if not field.is_zero(cval):
                u = u + poly.scale(cval)
        interpolants.append(u)
    return res.k, interpolants


def _solve_square(mat, rhs, field: FieldSpec):
    n = len(mat)
    rows = [list(mat[i]) + [rhs[i]] for i in range(n)]
    for col in range(n):
        pivot = next((i for i in range(col, n) if not field.is_zero(rows[i][col])), None)
        if pivot is None:
            raise SingularSystem("interpolation system is singular")
        rows[col], rows[pivot] = rows[pivot], rows[col]
        inv = field.inv(rows[col][col])
        rows[col] = [field.mul(inv, v) for v in rows[col]]
        for i in range(n):
            if i != col and not field.is_zero(rows[i][col]):
                c = rows[i][col]
                rows[i] = [field.sub(a, field.mul(c, b)) for a, b in zip(rows[i], rows[col])]
    return [rows[i][n] for i in range(n)]
