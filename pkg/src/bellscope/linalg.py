"""Exact dense linear algebra over rationals.

Gaussian elimination with exact pivoting is all the polytope engine
needs: ranks, reduced row echelon forms, null spaces and solutions of
small dense systems.  Matrices are lists of lists of gmpy2.mpq; rows
are never longer than a few hundred entries in this package, so dense
elimination is the right tool.
"""

from __future__ import annotations

from typing import Sequence

from .rational import QQ, ZERO


Matrix = list[list]


def _to_rows(mat) -> Matrix:
    return [[QQ(x) for x in row] for row in mat]


def rref(mat) -> tuple[Matrix, list[int]]:
    """Reduced row echelon form.  Returns (rows, pivot_columns); zero rows
    are dropped."""
    rows = _to_rows(mat)
    if not rows:
        return [], []
    ncols = len(rows[0])
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        pivot = None
        for i in range(r, len(rows)):
            if rows[i][c] != 0:
                pivot = i
                break
        if pivot is None:
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        pr = rows[r]
        inv = 1 / pr[c]
        if inv != 1:
            for j in range(c, ncols):
                pr[j] *= inv
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                ri = rows[i]
                for j in range(c, ncols):
                    ri[j] -= f * pr[j]
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    return rows[:r], pivots


def rank(mat) -> int:
    return len(rref(mat)[0])


def nullspace(mat) -> list[tuple]:
    """Basis of {x : mat @ x = 0} as tuples of rationals."""
    if not mat:
        return []
    ncols = len(mat[0])
    rows, pivots = rref(mat)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fc in free:
        v = [ZERO] * ncols
        v[fc] = QQ(1)
        for r, pc in zip(rows, pivots):
            v[pc] = -r[fc]
        basis.append(tuple(v))
    return basis


def solve(mat, rhs) -> tuple | None:
    """One exact solution of mat @ x = rhs, or None if inconsistent."""
    if not mat:
        return tuple() if all(b == 0 for b in rhs) else None
    ncols = len(mat[0])
    aug = [list(row) + [b] for row, b in zip(mat, rhs)]
    rows, pivots = rref(aug)
    x = [ZERO] * ncols
    for r, pc in zip(rows, pivots):
        if pc == ncols:
            return None  # pivot in the rhs column: inconsistent
        x[pc] = r[ncols]
    return tuple(x)


def dot(u: Sequence, v: Sequence):
    acc = ZERO
    for a, b in zip(u, v):
        if a and b:
            acc += a * b
    return acc


class RankTracker:
    """Incremental rank of a growing set of vectors.

    Keeps an echelon basis; add() reports whether the vector increased
    the rank.  Used for affine-rank computations where vectors arrive
    one by one and early exit at full rank matters.
    """

    def __init__(self, ncols: int):
        self.ncols = ncols
        self.basis: list[list] = []   # echelon rows
        self.pivot_cols: list[int] = []

    @property
    def rank(self) -> int:
        return len(self.basis)

    def residual(self, vec) -> list | None:
        """Reduce vec against the basis; None if it is in the span."""
        v = [QQ(x) for x in vec]
        for row, pc in zip(self.basis, self.pivot_cols):
            f = v[pc]
            if f:
                for j in range(pc, self.ncols):
                    if row[j]:
                        v[j] -= f * row[j]
        for j in range(self.ncols):
            if v[j]:
                return v
        return None

    def add(self, vec) -> bool:
        v = self.residual(vec)
        if v is None:
            return False
        pc = next(j for j in range(self.ncols) if v[j])
        inv = 1 / v[pc]
        if inv != 1:
            for j in range(pc, self.ncols):
                v[j] *= inv
        self.basis.append(v)
        self.pivot_cols.append(pc)
        return True

    def contains(self, vec) -> bool:
        return self.residual(vec) is None


def affine_rank(points: Sequence[Sequence]) -> int:
    """Maximal number of affinely independent points (rank of difference
    vectors plus one)."""
    pts = list(points)
    if not pts:
        return 0
    base = pts[0]
    tracker = RankTracker(len(base))
    n = len(base)
    for p in pts[1:]:
        tracker.add([p[j] - base[j] for j in range(n)])
        if tracker.rank == n:
            break
    return tracker.rank + 1


def affine_basis(points: Sequence[Sequence]):
    """Affine hull as (base_point, direction_rows_in_rref, pivot_cols)."""
    pts = list(points)
    base = list(pts[0])
    n = len(base)
    diffs = [[p[j] - base[j] for j in range(n)] for p in pts[1:]]
    rows, pivots = rref(diffs)
    return base, rows, pivots


__all__ = [
    "rref", "rank", "nullspace", "solve", "dot",
    "RankTracker", "affine_rank", "affine_basis",
]
