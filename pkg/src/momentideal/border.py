"""Border bases of the recurrence ideal of a truncated moment sequence.

The main loop keeps five exponent lists: ``b`` (accepted monomial basis),
``c`` (dual monomials pairing with the basis), ``d`` (border monomials whose
orthogonal projection pairs to zero with everything testable, i.e. relation
leading terms), ``s`` (untreated) and ``t`` (monomials still available as
dual candidates).  Each new candidate monomial is projected orthogonally
against the pairs built so far (modified Gram-Schmidt); if some admissible
monomial pairs nonzero with the projection, the candidate joins the basis,
otherwise the projection is a new relation.

Two interchangeable engines implement the loop: a field-generic sparse one
(this module) and a vectorized dense one for prime fields
(:mod:`momentideal.dense`).  Both produce bit-identical results.
"""

from __future__ import annotations

from dataclasses import dataclass

from .fields import FieldSpec
from .moments import MomentSequence, SupportError
from .polys import (
    Exponent,
    MonomialOrder,
    Polynomial,
    ScaledMonomial,
    exp_add,
    unit_exponent,
)


class EmptySupport(Exception):
    pass


class NotCertified(Exception):
    pass


def border_set(b_exps, nvars: int) -> set:
    """Border of a monomial set: one multiplication step outside it.

    The border of the empty set is {0} so the loop starts at the constant.
    """
    if not b_exps:
        return {(0,) * nvars}
    bset = set(b_exps)
    out = set()
    for beta in bset:
        for i in range(nvars):
            out.add(exp_add(beta, unit_exponent(nvars, i)))
    return out - bset


class BorderBasisResult:
    """Everything the engine produces for one input sequence.

    ``b``/``c``/``d`` are exponent lists in processing order; ``p``/``q`` the
    pairwise orthogonal bases indexed by ``b``; ``m`` the scaled dual
    monomials; ``k`` the border relations indexed by ``d``.  ``certified``
    holds iff d covers the whole border of b and all products b+ * c+ stay in
    the support, in which case k is a border basis of the recurrence ideal of
    a (unique) rank-r extension of the input.

    The dense engine hands the polynomial payload over as raw coefficient
    rows; they are materialized into term maps on first access.
    """

    __slots__ = (
        "nvars", "field", "order", "b", "c", "d", "certified",
        "missing_border", "coverage_ok", "_p", "_q", "_m", "_k", "_raw",
    )

    def __init__(self, nvars, field, order, b, c, d, p, q, m, k,
                 certified, missing_border, coverage_ok, raw=None):
        self.nvars = nvars
        self.field = field
        self.order = order
        self.b = b
        self.c = c
        self.d = d
        self._p = p
        self._q = q
        self._m = m
        self._k = k
        self.certified = certified
        self.missing_border = missing_border
        self.coverage_ok = coverage_ok
        self._raw = raw

    def _materialize(self):
        if self._raw is not None:
            self._p, self._q, self._m, self._k = self._raw()
            self._raw = None

    @property
    def p(self) -> list:
        self._materialize()
        return self._p

    @property
    def q(self) -> list | None:
        self._materialize()
        return self._q

    @property
    def m(self) -> list:
        self._materialize()
        return self._m

    @property
    def k(self) -> list:
        self._materialize()
        return self._k

    @property
    def r(self) -> int:
        return len(self.b)

    @property
    def diagnostic(self) -> str | None:
        if self.certified:
            return None
        if self.missing_border:
            missing = ", ".join(str(a) for a in self.missing_border)
            return f"insufficient data: border exponents without relations: {missing}"
        return "insufficient data: basis/dual products leave the support"

    def to_json(self) -> dict:
        f = self.field
        out = {
            "nvars": self.nvars,
            "field": f.to_json(),
            "order": self.order.to_json(),
            "r": self.r,
            "b": [list(a) for a in self.b],
            "c": [list(a) for a in self.c],
            "d": [list(a) for a in self.d],
            "p": [poly.to_json() for poly in self.p],
            "q": [poly.to_json() for poly in self.q] if self.q is not None else None,
            "m": [mono.to_json(f) for mono in self.m],
            "k": [poly.to_json() for poly in self.k],
            "certified": self.certified,
        }
        if not self.certified:
            out["missing_border"] = [list(a) for a in self.missing_border]
            out["diagnostic"] = self.diagnostic
        return out

    @staticmethod
    def from_json(obj: dict) -> "BorderBasisResult":
        field = FieldSpec.from_json(obj["field"])
        nvars = int(obj["nvars"])
        order = MonomialOrder.from_json(obj["order"])
        b = [tuple(a) for a in obj["b"]]
        c = [tuple(a) for a in obj["c"]]
        d = [tuple(a) for a in obj["d"]]
        p = [Polynomial.from_json(t, nvars, field) for t in obj["p"]]
        q = (
            [Polynomial.from_json(t, nvars, field) for t in obj["q"]]
            if obj.get("q") is not None
            else None
        )
        m = [ScaledMonomial.from_json(t, field) for t in obj["m"]]
        k = [Polynomial.from_json(t, nvars, field) for t in obj["k"]]
        missing = [tuple(a) for a in obj.get("missing_border", [])]
        return BorderBasisResult(
            nvars, field, order, b, c, d, p, q, m, k,
            bool(obj["certified"]), missing, bool(obj["certified"]) or not missing,
        )


@dataclass
class MultTables:
    """Multiplication-by-x_k matrices in the orthogonal basis p.

    Column convention: mats[k][i][j] is the coefficient of p_i in x_{k+1}*p_j.
    The transpose is the matrix of the same operator in basis q.
    """

    nvars: int
    field: FieldSpec
    mats: list

    @property
    def r(self) -> int:
        return len(self.mats[0]) if self.mats and self.mats[0] else 0

    def matrix(self, k: int):
        return self.mats[k]

    def to_json(self) -> dict:
        f = self.field
        return {
            "nvars": self.nvars,
            "field": f.to_json(),
            "matrices": [[[f.format(v) for v in row] for row in mat] for mat in self.mats],
        }


def proj(sigma: MomentSequence, f: Polynomial, p_list, m_list) -> Polynomial:
    """Orthogonal projection: subtract <g, m_i> p_i sequentially.

    Requires <p_i, m_j> = 0 for j < i and <p_i, m_i> = 1; then the result is
    the unique g = f - sum(lambda_i p_i) with <g, m_i> = 0 for all i.  The
    loop is the modified Gram-Schmidt form: each pairing uses the updated g.
    """
    field = sigma.field
    g = f
    for p_i, m_i in zip(p_list, m_list):
        lam = sigma.inner(g, m_i)
        if not field.is_zero(lam):
            g = g - p_i.scale(lam)
    return g


def next_monomials(b, d, c, s, a, order: MonomialOrder, nvars: int | None = None) -> list:
    """Candidate monomials: border of b, still untreated, with all products
    by current dual monomials inside the support.  Sorted by the order."""
    if nvars is None:
        nvars = len(next(iter(a)))
    a_set = set(a)
    s_set = set(s)
    d_set = set(d)
    out = [
        alpha
        for alpha in border_set(b, nvars)
        if alpha in s_set
        and alpha not in d_set
        and all(exp_add(alpha, gamma) in a_set for gamma in c)
    ]
    return order.sort(out)


def _plus_set(exps, nvars: int) -> set:
    out = set(exps)
    for e in exps:
        for i in range(nvars):
            out.add(exp_add(e, unit_exponent(nvars, i)))
    return out


def _certify_sets(b, c, d, a, nvars: int):
    """Strict certification: d covers the border of b, and every product of
    b+ by c+ stays inside the support (for a degree-D simplex this is
    exactly maxdeg(b+) + maxdeg(c+) <= D)."""
    missing = border_set(b, nvars) - set(d)
    bplus = _plus_set(b, nvars) if b else {(0,) * nvars}
    cplus = _plus_set(c, nvars) if c else set()
    coverage = _products_inside(bplus, cplus, a, nvars)
    return (not missing) and coverage, missing, coverage


def _products_inside(bplus, cplus, a, nvars: int) -> bool:
    if not bplus or not cplus:
        return True
    if nvars == 0:
        return (0,) * 0 in set(a)
    dims = [2 * max(e[i] for e in a) + 3 for i in range(nvars)]
    table = 1
    for m in dims:
        table *= m
    if table <= 1 << 26:
        import numpy as np

        strides = np.ones(nvars, dtype=np.int64)
        for i in range(1, nvars):
            strides[i] = strides[i - 1] * dims[i - 1]
        member = np.zeros(table, dtype=bool)
        member[np.array(sorted(a), dtype=np.int64) @ strides] = True
        bkeys = np.array(sorted(bplus), dtype=np.int64) @ strides
        ckeys = np.array(sorted(cplus), dtype=np.int64) @ strides
        sums = (bkeys[:, None] + ckeys[None, :]).ravel()
        inside = sums < table
        return bool(inside.all() and member[sums].all())
    a_set = set(a)
    return all(exp_add(be, ce) in a_set for be in bplus for ce in cplus)


def certify(res: BorderBasisResult, a) -> bool:
    """Recompute the certification flag of a result against a support."""
    ok, _, _ = _certify_sets(res.b, res.c, res.d, a, res.nvars)
    return ok


def border_basis(
    sigma: MomentSequence,
    order: MonomialOrder | None = None,
    compute_q: bool = True,
    engine: str = "auto",
) -> BorderBasisResult:
    """Compute orthogonal bases, dual monomials and border relations of the
    recurrence ideal of ``sigma``.

    Candidates are processed one at a time in the monomial order, with the
    eligibility of the remaining ones recomputed after each step (the dual
    set c grows during the loop, and eligibility depends on it).
    """
    if not sigma.support:
        raise EmptySupport("moment sequence has empty support")
    n = sigma.nvars
    if order is None:
        order = MonomialOrder()
    if engine == "auto":
        engine = "dense" if _dense_capable(sigma) else "sparse"
    if engine == "dense":
        from . import dense

        return dense.dense_border_basis(sigma, order, compute_q)
    if engine != "sparse":
        raise ValueError(f"unknown engine {engine!r}")

    field = sigma.field
    a_set = sigma.support
    t_sorted = order.sort(a_set)
    in_t = set(a_set)
    s_set = set(a_set)

    b_exps, c_exps, d_exps = [], [], []
    p_polys, q_polys, m_monos, m_polys, k_polys = [], [], [], [], []

    while True:
        cands = next_monomials(b_exps, d_exps, c_exps, s_set, a_set, order, n)
        if not cands:
            break
        alpha = cands[0]
        g = proj(sigma, Polynomial.monomial(n, field, alpha), p_polys, m_polys)
        hit = None
        for gamma in t_sorted:
            if gamma not in in_t:
                continue
            if not sigma.products_supported(g, gamma):
                continue
            val = sigma.inner_monomial(g, gamma)
            if not field.is_zero(val):
                hit = (gamma, val)
                break
        s_set.discard(alpha)
        if hit is None:
            d_exps.append(alpha)
            k_polys.append(g)
        else:
            gamma, val = hit
            mono = ScaledMonomial(gamma, field.inv(val))
            mpoly = mono.to_polynomial(n, field)
            if compute_q:
                q_polys.append(proj(sigma, mpoly, q_polys, p_polys))
            b_exps.append(alpha)
            p_polys.append(g)
            c_exps.append(gamma)
            m_monos.append(mono)
            m_polys.append(mpoly)
            in_t.discard(gamma)

    certified, missing, coverage = _certify_sets(b_exps, c_exps, d_exps, a_set, n)
    return BorderBasisResult(
        nvars=n,
        field=field,
        order=order,
        b=b_exps,
        c=c_exps,
        d=d_exps,
        p=p_polys,
        q=q_polys if compute_q else None,
        m=m_monos,
        k=k_polys,
        certified=certified,
        missing_border=order.sort(missing),
        coverage_ok=coverage,
    )


def _dense_capable(sigma: MomentSequence) -> bool:
    if not sigma.field.is_prime_field:
        return False
    from . import dense

    return dense.capable(sigma)


def mult_matrices(sigma: MomentSequence, res: BorderBasisResult) -> MultTables:
    """Theorem-of-the-quotient matrices M_k[i][j] = <sigma | x_k p_j q_i>."""
    if not res.certified:
        raise NotCertified("multiplication matrices need a certified result")
    if res.q is None:
        raise ValueError("q basis was not computed; rerun with compute_q=True")
    n, r = res.nvars, res.r
    mats = []
    for k in range(n):
        e_k = unit_exponent(n, k)
        shifted = [p_j.shift(e_k) for p_j in res.p]
        mats.append([[sigma.inner(shifted[j], res.q[i]) for j in range(r)] for i in range(r)])
    return MultTables(n, sigma.field, mats)


def _matvec(field: FieldSpec, mat, vec):
    out = []
    for row in mat:
        acc = field.zero
        for a, x in zip(row, vec):
            acc = field.add(acc, field.mul(a, x))
        out.append(acc)
    return out


def normal_form(res: BorderBasisResult, tables: MultTables, f: Polynomial) -> Polynomial:
    """The unique representative of f in the span of x^b modulo the border
    relations, obtained by applying the multiplication matrices to the
    coordinates of 1 and converting back to monomial coordinates."""
    if not res.certified:
        raise NotCertified("normal form needs a certified result")
    field, n, r = res.field, res.nvars, res.r
    if r == 0:
        return Polynomial.zero(n, field)
    # coordinates of the class of 1 in basis p: first accepted exponent is 0
    acc = [field.zero] * r
    for alpha, coeff in f.terms.items():
        v = [field.zero] * r
        v[0] = field.one
        for k in range(n):
            for _ in range(alpha[k]):
                v = _matvec(field, tables.mats[k], v)
        for i in range(r):
            acc[i] = field.add(acc[i], field.mul(coeff, v[i]))
    # p_j = x^{b_j} + lower basis monomials, so converting p-coordinates to
    # monomial coordinates is a triangular pass over the stored p's
    terms = {}
    for j in range(r):
        cj = acc[j]
        if field.is_zero(cj):
            continue
        for beta, coeff in res.p[j].terms.items():
            terms[beta] = field.add(terms.get(beta, field.zero), field.mul(cj, coeff))
    return Polynomial(n, field, terms)


def minimal_groebner(res: BorderBasisResult) -> list:
    """Relations whose leading exponents are componentwise-minimal in d.

    For a certified run under a monomial order these form a minimal reduced
    Groebner basis of the recurrence ideal.
    """
    if not res.certified:
        raise NotCertified("Groebner extraction needs a certified result")

    def dominates(a, b):  # a divides b, strictly below it
        return a != b and all(x <= y for x, y in zip(a, b))

    keep = []
    for i, lead in enumerate(res.d):
        if not any(dominates(other, lead) for other in res.d):
            keep.append(res.k[i])
    return keep
