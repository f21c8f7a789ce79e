"""Dense prime-field engine for the border-basis loop.

Residues are carried in float64 numpy arrays so matvecs hit BLAS; every dot
product is exact because ``capable`` only admits instances with
(s+1)*(p-1)^2 < 2^53 (s = support size), and each accumulated value is
reduced mod p before it can grow past one dot product (a few reductions are
skipped where tighter bounds, checked at run time, still keep the
accumulators below 2^53).

The orthogonal projection is evaluated in closed form: with A the unit
lower-triangular pairing matrix <p_j, m_i>, the tail of a projected monomial
is -v @ W where v_i = <x^a, m_i> and W = (A^-1)^T P (P = coefficient rows of
the p's).  W is maintained through rank-1 updates; to keep full-matrix
reductions off the per-step path, updates are held in a thin pending pair
U, V and folded in by one matrix product every few steps.  In exact
arithmetic the result is identical, pairing for pairing, to the modified
Gram-Schmidt recursion of the sparse engine.

When the support is the full simplex of some degree D (the common case), a
product x^g * f stays supported iff deg(g) + deg(f) <= D, and because the
scan order is degree-compatible the admissible dual candidates for each
projection form a prefix of the support; the general masked path is kept for
other connected supports.
"""

from __future__ import annotations

import heapq
from math import comb

import numpy as np

from .moments import MomentSequence, SupportError
from .polys import MonomialOrder, Polynomial, ScaledMonomial

_FLOAT_EXACT = float(1 << 53)
_MAX_TABLE = 1 << 26
_SCAN_CHUNK = 128
_PENDING = 16  # rank-1 updates folded into W per matrix product


def _m(X, p):
    """Exact mod for float64 arrays of integers below 2^53 in magnitude:
    int64 round-trip (numpy's float fmod is several times slower)."""
    return (X.astype(np.int64) % p).astype(np.float64)


def capable(sigma: MomentSequence) -> bool:
    """Whether this engine can run the instance exactly."""
    if not sigma.field.is_prime_field or sigma.nvars == 0:
        return False
    p = sigma.field.p
    s = len(sigma.values)
    if (s + 1) * (p - 1) ** 2 >= _FLOAT_EXACT:
        return False
    maxc = [0] * sigma.nvars
    for alpha in sigma.values:
        for i, x in enumerate(alpha):
            maxc[i] = max(maxc[i], x)
    table = 1
    for m in maxc:
        table *= 2 * m + 1
    return table <= _MAX_TABLE


class _State:
    """Growable arrays for the accepted basis."""

    def __init__(self, s: int, compute_q: bool, masked: bool, p: int):
        self.cap = 32
        self.r = 0
        self.p = float(p)
        # with r below this bound, v may enter the projection unreduced
        self.nomod_r = int(_FLOAT_EXACT / float(p) ** 3)
        # with r below this bound, the dual-row reduction and scale multiply fuse
        self.fuse_r = int(_FLOAT_EXACT / (float(p) ** 2 * (p - 1))) - _PENDING
        self.P = np.zeros((self.cap, self.cap))
        self.Q = np.zeros((self.cap, self.cap)) if compute_q else None
        self.W = np.zeros((self.cap, self.cap))
        self.U = np.zeros((self.cap, _PENDING))
        self.V = np.zeros((_PENDING, self.cap))
        self.pending = 0
        self.scales = np.zeros(self.cap)
        self.ckeys = np.zeros(self.cap, dtype=np.int64)
        self.Hsb = np.zeros((s, self.cap))
        self.Dsb = np.zeros((s, self.cap), dtype=bool) if masked else None

    def ensure(self, need: int):
        if need <= self.cap:
            return
        new = self.cap
        while new < need:
            new *= 2
        for name in ("P", "Q", "W"):
            old = getattr(self, name)
            if old is None:
                continue
            grown = np.zeros((new, new))
            grown[: self.cap, : self.cap] = old
            setattr(self, name, grown)
        grown = np.zeros((new, _PENDING))
        grown[: self.cap] = self.U
        self.U = grown
        grown = np.zeros((_PENDING, new))
        grown[:, : self.cap] = self.V
        self.V = grown
        for name, dtype in (("scales", float), ("ckeys", np.int64)):
            old = getattr(self, name)
            grown = np.zeros(new, dtype=dtype)
            grown[: self.cap] = old
            setattr(self, name, grown)
        s = self.Hsb.shape[0]
        hs = np.zeros((s, new))
        hs[:, : self.cap] = self.Hsb
        self.Hsb = hs
        if self.Dsb is not None:
            ds = np.zeros((s, new), dtype=bool)
            ds[:, : self.cap] = self.Dsb
            self.Dsb = ds
        self.cap = new

    def tail_of(self, v):
        """-v @ W mod p with the pending low-rank correction applied."""
        r, k, p = self.r, self.pending, self.p
        acc = v @ self.W[:r, :r]
        if k:
            thin = _m(v @ self.U[:r, :k], p)
            acc = acc + thin @ self.V[:k, :r]
        return _m(-acc, p)

    def dual_row(self, hrow, scale: float):
        """-scale * (W @ hrow) mod p: the pairing row of a new dual monomial
        against the inverse pairing matrix."""
        r, k, p = self.r, self.pending, self.p
        acc = self.W[:r, :r] @ hrow
        if k:
            thin = _m(self.V[:k, :r] @ hrow, p)
            acc = acc + self.U[:r, :k] @ thin
        if r <= self.fuse_r:
            return _m(acc * -scale, p)
        return _m(_m(acc, p) * -scale, p)

    def push_pair(self, nr, pb):
        """Record the new basis pair: W gains [[outer(nr, pb), nr], [pb, 1]];
        the rank-1 block is queued and folded in by a gemm every few steps."""
        r, k = self.r, self.pending
        if r:
            self.U[:r, k] = nr
            self.V[k, :r] = pb
            self.pending = k + 1
            self.W[r, :r] = pb
            self.W[:r, r] = nr
        self.W[r, r] = 1.0
        if self.pending == _PENDING:
            self.flush(r + 1)

    def flush(self, r: int):
        k = self.pending
        if k:
            self.W[:r, :r] = _m(self.W[:r, :r] + self.U[:r, :k] @ self.V[:k, :r], self.p)
            self.U[:, :k] = 0.0
            self.V[:k, :] = 0.0
            self.pending = 0


def dense_border_basis(
    sigma: MomentSequence, order: MonomialOrder, compute_q: bool = True
):
    from .border import BorderBasisResult, _certify_sets

    field = sigma.field
    p = field.p
    n = sigma.nvars
    exps = order.sort(sigma.values)
    s = len(exps)
    idx = {e: i for i, e in enumerate(exps)}
    deg_row = np.array([sum(e) for e in exps], dtype=np.int64)
    max_deg = int(deg_row[-1])
    simplex_support = s == comb(max_deg + n, n)

    # positional encoding of exponents; sums of two support exponents stay
    # inside the box, so key(a) + key(b) = key(a + b) without aliasing
    maxc = [max(e[i] for e in exps) for i in range(n)]
    dims = [2 * m + 1 for m in maxc]
    strides = np.ones(n, dtype=np.int64)
    for i in range(1, n):
        strides[i] = strides[i - 1] * dims[i - 1]
    table = int(strides[-1]) * dims[-1]
    emat = np.array(exps, dtype=np.int64).reshape(s, n)
    keys = emat @ strides
    sval = np.zeros(table)
    defined = np.zeros(table, dtype=bool)
    sval[keys] = [float(sigma.values[e]) for e in exps]
    defined[keys] = True

    st = _State(s, compute_q, masked=not simplex_support, p=p)
    in_s = np.ones(s, dtype=bool)
    in_t = np.ones(s, dtype=bool)
    b_idx, c_idx, d_idx = [], [], []
    k_rows = []  # (support index of the lead, coefficient row over b)
    c_max_deg = 0
    t_start = 0  # first index still available as a dual candidate

    zero = (0,) * n
    heap = [idx[zero]]
    pushed = {idx[zero]}

    def first_match(wA, defA, pb, r, cut):
        """First dual candidate pairing nonzero within the admissible prefix
        (whole masked range in general mode).

        The overwhelmingly common case is that the very first available
        monomial pairs nonzero, so probe it with a single dot product before
        falling back to a short window and then a full sweep.
        """
        if defA is None and t_start < cut and in_t[t_start]:
            w0 = wA[t_start] + (st.Hsb[t_start, :r] @ pb if r else 0.0)
            w0 %= p
            if w0 != 0.0:
                return t_start, w0
        if r:
            nz = pb != 0
        start = t_start
        first = True
        while start < cut:
            stop = min(start + _SCAN_CHUNK, cut) if first else cut
            first = False
            sl = slice(start, stop)
            if r:
                w = _m(wA[sl] + st.Hsb[sl, :r] @ pb, p)
            else:
                w = wA[sl]
            valid = in_t[sl]
            if defA is not None:
                valid = valid & defA[sl]
                if r:
                    valid = valid & ~(~st.Dsb[sl, :r] & nz).any(axis=1)
            good = np.flatnonzero(valid & (w != 0))
            if good.size:
                return start + int(good[0]), w[int(good[0])]
            start = stop
        return -1, 0.0

    while heap:
        ai = heapq.heappop(heap)
        if not in_s[ai]:
            continue
        r = st.r
        akey = int(keys[ai])
        adeg = int(deg_row[ai])
        if r:
            if simplex_support:
                if adeg + c_max_deg > max_deg:
                    continue  # c only grows: permanently ineligible
                kk = st.ckeys[:r] + akey
            else:
                kk = st.ckeys[:r] + akey
                if not defined[kk].all():
                    continue
            v = sval[kk] * st.scales[:r]
            if r > st.nomod_r:
                v = _m(v, p)
            pb = st.tail_of(v)
        else:
            pb = np.zeros(0)
        if simplex_support:
            # products x^g * p_a stay supported iff deg(g) <= D - deg(a),
            # and rows are degree-sorted: the admissible set is a prefix
            defA = None
            cut = int(np.searchsorted(deg_row, max_deg - adeg, side="right"))
            wA = sval[keys[:cut] + akey]
        else:
            kk2 = keys + akey
            wA = sval[kk2]
            defA = defined[kk2]
            cut = s
        gi, wval = first_match(wA, defA, pb, r, cut)
        in_s[ai] = False
        if gi < 0:
            d_idx.append(ai)
            k_rows.append((ai, pb.copy()))
            continue
        scale = float(pow(int(wval), p - 2, p))
        nr = None
        if r:
            hrow = st.Hsb[gi, :r]
            if not simplex_support and not st.Dsb[gi, :r].all():
                holes = ~st.Dsb[gi, :r]
                if ((st.P[:r, :r] != 0) & holes).any():
                    raise SupportError(
                        [tuple(map(int, emat[gi] + emat[b_idx[j]])) for j in np.flatnonzero(holes)]
                    )
            nr = st.dual_row(hrow, scale)
        st.ensure(r + 1)
        if r:
            if compute_q:
                # Gram-Schmidt coefficients of the new dual monomial against
                # the p's: <m_new, p_j> = scale * sigma(g + supp(p_j))
                mu = _m(_m(st.P[:r, :r] @ hrow, p) * scale, p)
                st.Q[r, :r] = _m(-(mu @ st.Q[:r, :r]), p)
            st.P[r, :r] = pb
        if compute_q:
            st.Q[r, r] = scale
        st.P[r, r] = 1.0
        # later reads of this column stay within its own admissible prefix
        # (candidates arrive in nondecreasing degree), so the stored slice
        # covers everything the scans and pairings will touch
        st.Hsb[: wA.shape[0], r] = wA
        if st.Dsb is not None:
            st.Dsb[:, r] = defA
        st.scales[r] = scale
        st.ckeys[r] = keys[gi]
        c_max_deg = max(c_max_deg, int(deg_row[gi]))
        b_idx.append(ai)
        c_idx.append(gi)
        in_t[gi] = False
        while t_start < s and not in_t[t_start]:
            t_start += 1
        st.push_pair(nr, pb)
        st.r = r + 1
        alpha = exps[ai]
        for i in range(n):
            nb = tuple(alpha[j] + (1 if j == i else 0) for j in range(n))
            ni = idx.get(nb)
            if ni is not None and ni not in pushed:
                pushed.add(ni)
                heapq.heappush(heap, ni)

    # -- exact output; polynomial maps materialize on first access -------------

    b_exps = [exps[i] for i in b_idx]
    c_exps = [exps[i] for i in c_idx]
    d_exps = [exps[i] for i in d_idx]
    r = st.r

    def assemble():
        def row_terms(row, exps_list, lead=None):
            vals = row.astype(np.int64).tolist()
            terms = {e: v for e, v in zip(exps_list, vals) if v}
            if lead is not None:
                terms[lead] = 1
            return terms

        p_polys = [
            Polynomial.from_clean_terms(n, field, row_terms(st.P[j, : j + 1], b_exps))
            for j in range(r)
        ]
        k_polys = [
            Polynomial.from_clean_terms(n, field, row_terms(row, b_exps, lead=exps[ai]))
            for ai, row in k_rows
        ]
        q_polys = None
        if compute_q:
            q_polys = [
                Polynomial.from_clean_terms(n, field, row_terms(st.Q[j, : j + 1], c_exps))
                for j in range(r)
            ]
        m_monos = [ScaledMonomial(c_exps[j], int(st.scales[j])) for j in range(r)]
        return p_polys, q_polys, m_monos, k_polys

    certified, missing, coverage = _certify_sets(b_exps, c_exps, d_exps, sigma.values, n)
    return BorderBasisResult(
        nvars=n,
        field=field,
        order=order,
        b=b_exps,
        c=c_exps,
        d=d_exps,
        p=None,
        q=None,
        m=None,
        k=None,
        certified=certified,
        missing_border=order.sort(missing),
        coverage_ok=coverage,
        raw=assemble,
    )
