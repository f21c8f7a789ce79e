"""Recover point/weight decompositions from a certified border-basis result.

Over the rationals, eigenvalues are found exactly: the characteristic
polynomial comes from Faddeev-LeVerrier, and its rational roots from the
rational-root theorem over the factored leading/constant coefficients.  Over
a prime field the roots are found by a vectorized scan of the whole field,
which is cheap for word-sized moduli.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from math import gcd

import numpy as np

from .border import BorderBasisResult, MultTables, NotCertified
from .fields import FieldSpec
from .moments import MomentSequence, moments_of_decomposition
from .polys import Polynomial, unit_exponent


class IrrationalSpectrum(Exception):
    """The characteristic polynomial has roots outside the coefficient field."""


class DefectiveEigenvalue(Exception):
    """A repeated eigenvalue or an eigenspace of dimension != 1."""


class RetriesExhausted(Exception):
    pass


class VerificationFailed(Exception):
    pass


class SingularSystem(Exception):
    pass


class InconsistentSystem(Exception):
    pass


@dataclass
class Decomposition:
    """A rank-r list of (weight, point) pairs with sigma_a = sum w_i xi_i^a."""

    nvars: int
    field: FieldSpec
    terms: list

    def __post_init__(self):
        f = self.field
        terms = [(w, tuple(pt)) for w, pt in self.terms]
        if any(f.is_zero(w) for w, _ in terms):
            raise ValueError("weights must be nonzero")
        if len({pt for _, pt in terms}) != len(terms):
            raise ValueError("points must be pairwise distinct")
        self.terms = terms

    @property
    def rank(self) -> int:
        return len(self.terms)

    def _sort_key(self, term):
        w, pt = term
        return tuple(self.field.format(x) for x in pt)

    def canonical(self) -> "Decomposition":
        return Decomposition(self.nvars, self.field, sorted(self.terms, key=self._sort_key))

    def as_set(self) -> frozenset:
        return frozenset((w, pt) for w, pt in self.terms)

    def __eq__(self, other):
        return (
            isinstance(other, Decomposition)
            and self.nvars == other.nvars
            and self.field == other.field
            and self.as_set() == other.as_set()
        )

    def to_json(self) -> dict:
        f = self.field
        return {
            "nvars": self.nvars,
            "field": f.to_json(),
            "rank": self.rank,
            "terms": [
                {"weight": f.format(w), "point": [f.format(x) for x in pt]}
                for w, pt in self.canonical().terms
            ],
        }

    @staticmethod
    def from_json(obj: dict) -> "Decomposition":
        f = FieldSpec.from_json(obj["field"])
        terms = [
            (f.parse(str(t["weight"])), tuple(f.parse(str(x)) for x in t["point"]))
            for t in obj["terms"]
        ]
        return Decomposition(int(obj["nvars"]), f, terms)


# -- exact linear algebra -----------------------------------------------------


def mat_mul(field: FieldSpec, A, B):
    n, m, k = len(A), len(B[0]), len(B)
    out = [[field.zero] * m for _ in range(n)]
    for i in range(n):
        Ai = A[i]
        for l in range(k):
            a = Ai[l]
            if field.is_zero(a):
                continue
            Bl = B[l]
            row = out[i]
            for j in range(m):
                row[j] = field.add(row[j], field.mul(a, Bl[j]))
    return out


def transpose(A):
    return [list(col) for col in zip(*A)]


def char_poly(mat, field: FieldSpec):
    """Monic characteristic polynomial, coefficients from highest to lowest
    power (Faddeev-LeVerrier; exact in any field of characteristic 0 or > r)."""
    r = len(mat)
    coeffs = [field.one]
    M = [[field.zero] * r for _ in range(r)]
    for k in range(1, r + 1):
        for i in range(r):
            M[i][i] = field.add(M[i][i], coeffs[-1])
        M = mat_mul(field, mat, M)
        trace = field.zero
        for i in range(r):
            trace = field.add(trace, M[i][i])
        coeffs.append(field.neg(field.div(trace, field.from_int(k))))
    return coeffs


def nullspace(mat, field: FieldSpec):
    """Basis of the right kernel, by exact Gauss-Jordan elimination."""
    rows = [list(r) for r in mat]
    nrows = len(rows)
    ncols = len(rows[0]) if nrows else 0
    pivots = []
    pr = 0
    for col in range(ncols):
        pivot = next(
            (i for i in range(pr, nrows) if not field.is_zero(rows[i][col])), None
        )
        if pivot is None:
            continue
        rows[pr], rows[pivot] = rows[pivot], rows[pr]
        inv = field.inv(rows[pr][col])
        rows[pr] = [field.mul(inv, v) for v in rows[pr]]
        for i in range(nrows):
            if i != pr and not field.is_zero(rows[i][col]):
                c = rows[i][col]
                rows[i] = [field.sub(v, field.mul(c, w)) for v, w in zip(rows[i], rows[pr])]
        pivots.append(col)
        pr += 1
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fc in free:
        vec = [field.zero] * ncols
        vec[fc] = field.one
        for i, pc in enumerate(pivots):
            vec[pc] = field.neg(rows[i][fc])
        basis.append(vec)
    return basis


# -- rational root extraction -------------------------------------------------

_DIVISOR_CAP = 200_000


def _divisors(n: int):
    """All positive divisors of n > 0, or None if there are too many."""
    import sympy

    count = 1
    factors = sympy.factorint(n)
    for e in factors.values():
        count *= e + 1
        if count > _DIVISOR_CAP:
            return None
    divs = [1]
    for prime, e in factors.items():
        divs = [d * prime**i for d in divs for i in range(e + 1)]
    return divs


def _eval_descending(coeffs, x: Fraction) -> Fraction:
    acc = Fraction(0)
    for c in coeffs:
        acc = acc * x + c
    return acc


def _deflate(coeffs, root: Fraction):
    out = [coeffs[0]]
    for c in coeffs[1:-1]:
        out.append(c + root * out[-1])
    return out


def rational_roots(coeffs):
    """Roots in Q of a polynomial with Fraction coefficients (descending),
    with multiplicities.  Divisor enumeration over the factored cleared
    leading/constant coefficients; falls back to full factorization when the
    divisor count explodes."""
    r = len(coeffs) - 1
    if r == 0:
        return {}
    denom_lcm = 1
    for c in coeffs:
        denom_lcm = denom_lcm * c.denominator // gcd(denom_lcm, c.denominator)
    ints = [int(c * denom_lcm) for c in coeffs]
    roots: dict[Fraction, int] = {}
    while len(ints) > 1 and ints[-1] == 0:
        roots[Fraction(0)] = roots.get(Fraction(0), 0) + 1
        ints = ints[:-1]
    if len(ints) == 1:
        return roots
    lead_divs = _divisors(abs(ints[0]))
    const_divs = _divisors(abs(ints[-1]))
    work = [Fraction(c) for c in ints]
    if lead_divs is None or const_divs is None:
        return _roots_by_factoring(work, roots)
    candidates = set()
    for num in const_divs:
        for den in lead_divs:
            if gcd(num, den) == 1:
                candidates.add(Fraction(num, den))
                candidates.add(Fraction(-num, den))
    for cand in sorted(candidates):
        while len(work) > 1 and _eval_descending(work, cand) == 0:
            roots[cand] = roots.get(cand, 0) + 1
            work = _deflate(work, cand)
    return roots


def _roots_by_factoring(coeffs, roots):
    import sympy

    x = sympy.Symbol("x")
    poly = sympy.Poly(
        sum(sympy.Rational(c.numerator, c.denominator) * x**i for i, c in enumerate(reversed(coeffs))),
        x,
    )
    for factor, mult in poly.factor_list()[1]:
        if factor.degree() == 1:
            a, b = factor.all_coeffs()
            root = Fraction(int(sympy.numer(-b / a)), int(sympy.denom(-b / a)))
            roots[root] = roots.get(root, 0) + mult
    return roots


def rational_eigen(mat, field: FieldSpec):
    """Exact (eigenvalue, eigenvector) pairs of a rational matrix with simple
    rational spectrum; raises otherwise."""
    if field.kind != "rational":
        raise ValueError("rational_eigen needs the rational field")
    r = len(mat)
    coeffs = char_poly(mat, field)
    roots = rational_roots(coeffs)
    if any(m > 1 for m in roots.values()):
        raise DefectiveEigenvalue(f"repeated eigenvalues: {roots}")
    if sum(roots.values()) < r:
        raise IrrationalSpectrum("characteristic polynomial has irrational roots")
    pairs = []
    for lam in sorted(roots):
        shifted = [
            [field.sub(mat[i][j], lam if i == j else field.zero) for j in range(r)]
            for i in range(r)
        ]
        basis = nullspace(shifted, field)
        if len(basis) != 1:
            raise DefectiveEigenvalue(f"eigenspace of {lam} has dimension {len(basis)}")
        pairs.append((lam, basis[0]))
    return pairs


_PRIME_SCAN_LIMIT = 1 << 20


def prime_eigen(mat, field: FieldSpec):
    """Eigen pairs over Z/pZ via a full root scan of the characteristic
    polynomial (exact float64 Horner over all of F_p)."""
    if not field.is_prime_field:
        raise ValueError("prime_eigen needs a prime field")
    p = field.p
    if p > _PRIME_SCAN_LIMIT:
        raise ValueError(
            "root scan disabled for large moduli; use the common_roots/solve_weights workflow"
        )
    r = len(mat)
    coeffs = char_poly(mat, field)
    xs = np.arange(p, dtype=np.float64)
    vals = np.zeros(p)
    for c in coeffs:
        vals = np.mod(vals * xs + float(c), p)
    root_list = [int(x) for x in np.flatnonzero(vals == 0)]
    if len(root_list) < r:
        raise IrrationalSpectrum("spectrum not contained in the prime field")
    deriv = [(len(coeffs) - 1 - i) * c % p for i, c in enumerate(coeffs[:-1])]
    pairs = []
    for lam in root_list:
        dval = 0
        for c in deriv:
            dval = (dval * lam + c) % p
        if dval == 0:
            raise DefectiveEigenvalue(f"repeated eigenvalue {lam} mod {p}")
        shifted = [
            [field.sub(mat[i][j], lam if i == j else 0) for j in range(r)] for i in range(r)
        ]
        basis = nullspace(shifted, field)
        if len(basis) != 1:
            raise DefectiveEigenvalue(f"eigenspace of {lam} has dimension {len(basis)}")
        pairs.append((lam, basis[0]))
    return pairs


def eigenpairs(mat, field: FieldSpec):
    if field.is_prime_field:
        return prime_eigen(mat, field)
    return rational_eigen(mat, field)


# -- the decomposition driver ---------------------------------------------------


def decompose(
    sigma: MomentSequence,
    res: BorderBasisResult,
    tables: MultTables,
    seed: int = 0,
    max_retries: int = 10,
) -> Decomposition:
    """Points and weights reconstructing sigma from a certified result.

    Draws a random combination M = sum(lambda_k M_k), eigen-decomposes its
    transpose (whose right eigenvectors are the idempotents' coordinates in
    the dual basis q), reads each point off the scale-invariant moment
    ratios, normalizes to the idempotent, and takes its moment as the
    weight.  The reconstruction is verified exactly on the whole support.
    """
    if not res.certified:
        raise NotCertified("decomposition needs a certified result")
    field, n, r = res.field, res.nvars, res.r
    if r == 0:
        return Decomposition(n, field, [])
    if res.q is None:
        raise ValueError("q basis was not computed; rerun with compute_q=True")
    rng = random.Random(seed)
    last_reason = "no attempt made"
    for _ in range(max_retries):
        lam = [rng.randint(1, 2 * r * r) for _ in range(n)]
        combo = [
            [
                sum(
                    (field.mul(field.from_int(lam[k]), tables.mats[k][i][j]) for k in range(n)),
                    start=field.zero,
                )
                for j in range(r)
            ]
            for i in range(r)
        ]
        try:
            pairs = eigenpairs(transpose(combo), field)
        except DefectiveEigenvalue as exc:
            last_reason = str(exc)
            continue
        terms = []
        retry = False
        for _, vec in pairs:
            u = Polynomial.zero(n, field)
            for coeff, q_j in zip(vec, res.q):
                if not field.is_zero(coeff):
                    u = u + q_j.scale(coeff)
            den = sigma.apply(u)
            if field.is_zero(den):
                last_reason = "eigenvector with zero moment"
                retry = True
                break
            point = tuple(
                field.div(sigma.apply(u.shift(unit_exponent(n, j))), den) for j in range(n)
            )
            at_point = u.evaluate(point)
            if field.is_zero(at_point):
                last_reason = "eigenvector vanishing at its own point"
                retry = True
                break
            idem = u.scale(field.inv(at_point))
            weight = sigma.apply(idem)
            if field.is_zero(weight):
                raise VerificationFailed("recovered a zero weight")
            terms.append((weight, point))
        if retry:
            continue
        if len({pt for _, pt in terms}) != r:
            last_reason = "points not separated by this combination"
            continue
        dec = Decomposition(n, field, terms).canonical()
        if moments_of_decomposition(dec, sigma.support) == sigma:
            return dec
        raise VerificationFailed(
            "reconstruction does not match the input moments "
            "(non-simple roots or points outside the field)"
        )
    raise RetriesExhausted(f"gave up after {max_retries} combinations: {last_reason}")


def common_roots(k_polys, candidates) -> list:
    """0-based indices of the candidate points where every relation vanishes."""
    out = []
    for i, pt in enumerate(candidates):
        if all(f.field.is_zero(f.evaluate(pt)) for f in k_polys):
            out.append(i)
    return out


def solve_weights(points, sigma: MomentSequence, exponents) -> list:
    """Exact weights w with sum(w_i * xi_i^alpha) = sigma_alpha on the given
    exponents, verified afterwards against every other in-support moment."""
    field = sigma.field
    m = len(points)
    if len(exponents) < m:
        raise ValueError("need at least as many exponents as points")
    if len({tuple(pt) for pt in points}) != m:
        raise SingularSystem("duplicate points")
    rows = []
    for alpha in exponents:
        alpha = tuple(alpha)
        row = []
        for pt in points:
            v = field.one
            for x, e in zip(pt, alpha):
                if e:
                    v = field.mul(v, field.power(x, e))
            row.append(v)
        rows.append(row + [sigma.value(alpha)])
    # Gauss-Jordan on the augmented matrix of the overdetermined system
    nrows = len(rows)
    pr = 0
    pivots = []
    for col in range(m):
        pivot = next((i for i in range(pr, nrows) if not field.is_zero(rows[i][col])), None)
        if pivot is None:
            continue
        rows[pr], rows[pivot] = rows[pivot], rows[pr]
        inv = field.inv(rows[pr][col])
        rows[pr] = [field.mul(inv, v) for v in rows[pr]]
        for i in range(nrows):
            if i != pr and not field.is_zero(rows[i][col]):
                c = rows[i][col]
                rows[i] = [field.sub(v, field.mul(c, w)) for v, w in zip(rows[i], rows[pr])]
        pivots.append(col)
        pr += 1
    if len(pivots) < m:
        raise SingularSystem("evaluation matrix does not have full column rank")
    for i in range(pr, nrows):
        if not field.is_zero(rows[i][m]):
            raise InconsistentSystem("no exact solution on the given exponents")
    weights = [rows[pivots.index(c)][m] for c in range(m)]
    # verify against the rest of the support
    for alpha in sigma.support:
        total = field.zero
        for w, pt in zip(weights, points):
            v = w
            for x, e in zip(pt, alpha):
                if e:
                    v = field.mul(v, field.power(x, e))
            total = field.add(total, v)
        if total != sigma.value(alpha):
            raise InconsistentSystem(f"weights fail to reproduce the moment at {alpha}")
    return weights
