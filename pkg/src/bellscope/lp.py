"""Exact linear programming (two-phase primal simplex over rationals).

Solves   min c.x   s.t.  A x = b,  x >= 0   with Bland's rule, entirely
in rational arithmetic, so feasibility answers and certificates are
exact.  Infeasible problems come with a Farkas certificate y satisfying
y.A <= 0 componentwise and y.b > 0, which downstream code turns into
separating hyperplanes.

The problems in this package are small and dense (tens of rows, at most
a few thousand columns), so a dense tableau is appropriate.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .rational import QQ, ZERO


@dataclass
class LPResult:
    status: str                 # "optimal" | "infeasible" | "unbounded"
    x: list | None = None       # primal solution over the original columns
    value: object = None        # objective value (mpq)
    farkas: list | None = None  # infeasibility certificate y (per row of A)


class _Tableau:
    def __init__(self, A, b, ncols):
        # b must be >= 0 on entry
        self.m = len(A)
        self.ncols = ncols                    # real columns
        self.total = ncols + self.m           # + one artificial per row
        self.rows = []
        for i in range(self.m):
            row = [QQ(v) for v in A[i]] + [ZERO] * self.m + [QQ(b[i])]
            row[ncols + i] = QQ(1)
            self.rows.append(row)
        self.basis = [ncols + i for i in range(self.m)]
        self.obj = None                       # reduced-cost row, rhs last

    def set_costs(self, costs, allowed):
        """Recompute the reduced-cost row for the given column costs."""
        m, rows, basis = self.m, self.rows, self.basis
        obj = [ZERO] * (self.total + 1)
        for j in allowed:
            cj = costs[j]
            acc = cj
            for r in range(m):
                cb = costs[basis[r]]
                if cb and rows[r][j]:
                    acc -= cb * rows[r][j]
            obj[j] = acc
        rhs = ZERO
        for r in range(m):
            cb = costs[basis[r]]
            if cb:
                rhs -= cb * rows[r][-1]
        obj[-1] = rhs                          # equals -objective value
        self.obj = obj

    def pivot(self, r, j):
        rows = self.rows
        prow = rows[r]
        inv = 1 / prow[j]
        if inv != 1:
            for k in range(self.total + 1):
                if prow[k]:
                    prow[k] *= inv
        for i in range(self.m):
            if i != r:
                f = rows[i][j]
                if f:
                    ri = rows[i]
                    for k in range(self.total + 1):
                        if prow[k]:
                            ri[k] -= f * prow[k]
        f = self.obj[j]
        if f:
            for k in range(self.total + 1):
                if prow[k]:
                    self.obj[k] -= f * prow[k]
        self.basis[r] = j

    def run(self, allowed) -> str:
        """Bland-rule simplex until optimal or unbounded."""
        rows, obj = self.rows, self.obj
        while True:
            enter = -1
            for j in allowed:
                if obj[j] < 0:
                    enter = j
                    break
            if enter < 0:
                return "optimal"
            leave = -1
            best = None
            for r in range(self.m):
                a = rows[r][enter]
                if a > 0:
                    ratio = rows[r][-1] / a
                    if best is None or ratio < best or (
                            ratio == best and self.basis[r] < self.basis[leave]):
                        best = ratio
                        leave = r
            if leave < 0:
                return "unbounded"
            self.pivot(leave, enter)


def solve_lp(c: Sequence, A: Sequence[Sequence], b: Sequence) -> LPResult:
    """min c.x s.t. A x = b, x >= 0.  Rows of A may be redundant."""
    m = len(A)
    if m == 0:
        return LPResult("optimal", x=[ZERO] * len(c), value=ZERO)
    ncols = len(A[0])
    A2, b2 = [], []
    for row, bi in zip(A, b):
        if bi < 0:
            A2.append([-v for v in row])
            b2.append(-QQ(bi))
        else:
            A2.append(list(row))
            b2.append(QQ(bi))
    tab = _Tableau(A2, b2, ncols)

    # phase 1: drive artificials to zero
    costs1 = [ZERO] * ncols + [QQ(1)] * m + [ZERO]
    allowed1 = list(range(ncols + m))
    tab.set_costs(costs1, allowed1)
    tab.run(allowed1)
    p1value = -tab.obj[-1]
    if p1value > 0:
        # Farkas: y = (phase-1 basis costs) . B^{-1}, read off artificial cols
        y = []
        for i in range(m):
            acc = ZERO
            for r in range(tab.m):
                if tab.basis[r] >= ncols:
                    acc += tab.rows[r][ncols + i]
            y.append(acc if b[i] >= 0 else -acc)
        return LPResult("infeasible", farkas=y)

    # kick residual artificials out of the basis (degenerate rows)
    drop = []
    for r in range(tab.m):
        if tab.basis[r] >= ncols:
            pivot_col = -1
            for j in range(ncols):
                if tab.rows[r][j] != 0:
                    pivot_col = j
                    break
            if pivot_col >= 0:
                tab.pivot(r, pivot_col)
            else:
                drop.append(r)   # redundant constraint row
    if drop:
        keep = [r for r in range(tab.m) if r not in drop]
        tab.rows = [tab.rows[r] for r in keep]
        tab.basis = [tab.basis[r] for r in keep]
        tab.m = len(keep)

    # phase 2 over the real columns only
    costs2 = [QQ(v) for v in c] + [ZERO] * m + [ZERO]
    allowed2 = list(range(ncols))
    tab.set_costs(costs2, allowed2)
    status = tab.run(allowed2)
    if status == "unbounded":
        return LPResult("unbounded")
    x = [ZERO] * ncols
    for r in range(tab.m):
        if tab.basis[r] < ncols:
            x[tab.basis[r]] = tab.rows[r][-1]
    value = sum((QQ(ci) * xi for ci, xi in zip(c, x)), ZERO)
    return LPResult("optimal", x=x, value=value)


def feasible_nonneg(A, b) -> LPResult:
    """Feasibility of {x >= 0 : A x = b} (zero objective)."""
    ncols = len(A[0]) if A else 0
    return solve_lp([ZERO] * ncols, A, b)


def convex_combination(points: Sequence[Sequence], target: Sequence):
    """Decompose target as a convex combination of the given points.

    Returns (weights, None) with exact weights summing to one, or
    (None, (h, h0)) with an exact separating functional: h.p <= h0 for
    every point while h.target > h0.
    """
    pts = list(points)
    d = len(target)
    A = [[p[j] for p in pts] for j in range(d)]
    A.append([QQ(1)] * len(pts))
    b = [QQ(v) for v in target] + [QQ(1)]
    res = feasible_nonneg(A, b)
    if res.status == "optimal":
        return list(res.x), None
    y = res.farkas
    h = y[:d]
    h0 = -y[d]
    # exact self-check of the certificate
    for p in pts:
        s = sum((hi * pi for hi, pi in zip(h, p)), ZERO)
        if s > h0:
            raise AssertionError("invalid separation certificate")
    s = sum((hi * ti for hi, ti in zip(h, target)), ZERO)
    if not s > h0:
        raise AssertionError("separation certificate does not cut target")
    return None, (h, h0)


__all__ = ["LPResult", "solve_lp", "feasible_nonneg", "convex_combination"]
