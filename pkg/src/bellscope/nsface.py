"""Face dimensions inside the no-signalling subspace.

Svetlichny vertices signal, so the polytope sticks out of the
no-signalling affine subspace L.  For quantum applications only the
slice Q = P  intersect  L matters, and an inequality tight on the vertex
set W cuts Q in the face conv(W) intersect L.  Its dimension decides
facet-hood with respect to Q.

The computation is exact: the affine-hull upper bound is linear
algebra; when it matches the target, one small LP certifies a point of
conv(W) with full support inside L (then the bound is attained), and a
degenerate fall-back discovers the maximal feasible support explicitly.
"""

from __future__ import annotations

import itertools

from .linalg import affine_basis, nullspace, rank, rref
from .lp import solve_lp
from .rational import QQ, ZERO
from .scenario import Scenario, full_index

__all__ = ["ns_equality_system", "face_dim_in_subspace", "NSFaceContext"]


def ns_equality_system(scenario: Scenario):
    """Independent rows (N, c) with  N p = c  cutting the no-signalling
    affine subspace out of the full-probability space: normalization per
    setting tuple plus marginal-independence per party."""
    n, m, k = scenario.nmk
    keys, pos = full_index(n, m, k)
    dim = len(keys)
    rows, rhs = [], []
    for s in itertools.product(range(m), repeat=n):
        row = [0] * dim
        for r in itertools.product(range(k), repeat=n):
            row[pos[(s, r)]] = 1
        rows.append(row)
        rhs.append(1)
    for i in range(n):
        rest = [q for q in range(n) if q != i]
        for x_rest in itertools.product(range(m), repeat=n - 1):
            for a_rest in itertools.product(range(k), repeat=n - 1):
                for xi in range(1, m):
                    row = [0] * dim
                    for variant, sign in ((0, 1), (xi, -1)):
                        s = [0] * n
                        s[i] = variant
                        for q, xq in zip(rest, x_rest):
                            s[q] = xq
                        for ri in range(k):
                            r = [0] * n
                            r[i] = ri
                            for q, aq in zip(rest, a_rest):
                                r[q] = aq
                            row[pos[(tuple(s), tuple(r))]] += sign
                    rows.append(row)
                    rhs.append(0)
    reduced, pivots = rref([row + [b] for row, b in zip(rows, rhs)])
    N = [row[:-1] for row in reduced]
    c = [row[-1] for row in reduced]
    if dim in pivots:
        raise AssertionError("inconsistent no-signalling system")
    return N, c


class NSFaceContext:
    """Precomputed N.w products for a vertex list, shared across the
    many face-dimension queries of one classification run."""

    def __init__(self, scenario: Scenario):
        self.N, self.c = ns_equality_system(scenario)
        self._cache: dict[tuple, tuple] = {}

    def nw(self, w: tuple) -> tuple:
        out = self._cache.get(w)
        if out is None:
            out = tuple(sum(nj * wj for nj, wj in zip(row, w) if wj)
                        for row in self.N)
            self._cache[w] = out
        return out


def _aff_cap_dim(W, ctx: NSFaceContext) -> int:
    """dim( aff(W) intersect L ), or -1 when the intersection is empty."""
    base, dirs, _ = affine_basis(W)
    if not dirs:
        # a single point: in L or not
        return 0 if ctx.nw(tuple(base)) == tuple(ctx.c) else -1
    M = [[sum(row[j] * d[j] for j in range(len(d)) if d[j]) for d in dirs]
         for row in ctx.N]
    rhs = [ci - nwi for ci, nwi in zip(ctx.c, ctx.nw(tuple(base)))]
    aug_rank = rank([row + [b] for row, b in zip(M, rhs)])
    m_rank = rank(M)
    if aug_rank > m_rank:
        return -1
    return len(dirs) - m_rank


def _support_lp_columns(W, ctx: NSFaceContext):
    cols = [ctx.nw(tuple(w)) + (QQ(1),) for w in W]
    b = list(ctx.c) + [QQ(1)]
    return cols, b


def face_dim_in_subspace(W, ctx: NSFaceContext, upper_target: int | None = None) -> int:
    """Affine dimension of conv(W) intersect L (-1 when empty).

    ``upper_target``: when the affine upper bound falls below this value
    the exact answer cannot reach it, so the bound is returned
    immediately without running the LP (used for facet screening).
    """
    W = [tuple(w) for w in W]
    if not W:
        return -1
    d_up = _aff_cap_dim(W, ctx)
    if d_up < 0:
        return -1
    if upper_target is not None and d_up < upper_target:
        return d_up    # exact value is <= d_up < target: enough to rule out
    cols, b = _support_lp_columns(W, ctx)
    nrows = len(b)
    nw = len(W)
    # max tau  s.t.  sum_w sigma_w col_w + tau (sum_w col_w) = b,
    # sigma, tau >= 0   (rho = sigma + tau has full support iff tau > 0)
    tau_col = [sum(cols[w][r] for w in range(nw)) for r in range(nrows)]
    A = [[cols[w][r] for w in range(nw)] + [tau_col[r]] for r in range(nrows)]
    obj = [ZERO] * nw + [QQ(-1)]
    res = solve_lp(obj, A, b)
    if res.status == "infeasible":
        return -1
    if res.status == "optimal" and -res.value > 0:
        return d_up

    # degenerate: find the maximal support explicitly (each LP confirms
    # every vertex its optimizer touches; optimum zero rules the rest out)
    A0 = [[cols[w][r] for w in range(nw)] for r in range(nrows)]
    undecided = set(range(nw))
    support: set[int] = set()
    while undecided:
        obj = [QQ(-1) if w in undecided else ZERO for w in range(nw)]
        res = solve_lp(obj, A0, b)
        if res.status == "infeasible":
            return -1
        if -res.value <= 0:
            break
        support |= {w for w in range(nw) if res.x[w] > 0}
        undecided -= {w for w in undecided if res.x[w] > 0}
    if not support:
        return -1   # cannot happen with the normalization row, kept for safety
    sup = sorted(support)
    # aff(F) = image of the feasible affine set restricted to the support
    Asup = [[A0[r][w] for w in sup] for r in range(nrows)]
    null = nullspace(Asup)
    if not null:
        return 0
    dim_pts = len(W[0])
    images = []
    for delta in null:
        vec = [ZERO] * dim_pts
        for dw, widx in zip(delta, sup):
            if dw:
                wv = W[widx]
                for j, wj in enumerate(wv):
                    if wj:
                        vec[j] += dw * wj
        images.append(vec)
    return rank(images)
