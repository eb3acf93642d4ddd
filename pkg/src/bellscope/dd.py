"""Double description over the integers.

Enumerates the extreme rays of a pointed cone {x : a.x <= 0 for all
rows a}, inserting constraints one at a time and combining adjacent
rays across the new hyperplane.  All vectors are primitive integer
tuples; tight-constraint sets are bitmasks, and adjacency uses the
combinatorial test (no third ray's tight set contains the pair's
intersection) accelerated by a per-constraint incidence index.

The engine is resumable: state snapshots carry the surviving rays and
the number of constraints already inserted, so multi-hour runs can
checkpoint and continue.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

from .errors import BudgetExhausted, PreconditionError
from .linalg import RankTracker, solve
from .rational import QQ, integerize, vec_gcd


@dataclass
class DDState:
    dim: int
    order: list                  # constraint indices in insertion order
    inserted: int                # how many of `order` are already in
    rays: list                   # list of int tuples
    masks: list                  # tight-set bitmask per ray (bit t = order[t])

    def to_json(self) -> dict:
        return {
            "dim": self.dim,
            "order": list(self.order),
            "inserted": self.inserted,
            "rays": [[str(c) for c in r] for r in self.rays],
            "masks": [str(m) for m in self.masks],
        }

    @staticmethod
    def from_json(data) -> "DDState":
        return DDState(
            dim=data["dim"],
            order=list(data["order"]),
            inserted=data["inserted"],
            rays=[tuple(int(c) for c in r) for r in data["rays"]],
            masks=[int(m) for m in data["masks"]],
        )


def _primitive(vec) -> tuple:
    g = vec_gcd(vec)
    if g > 1:
        return tuple(v // g for v in vec)
    return tuple(vec)


def _initial_state(constraints, dim) -> DDState:
    """Pick the first dim linearly independent constraints as a simplicial
    cone; its rays are the scaled columns of the negated inverse basis."""
    tracker = RankTracker(dim)
    basis_idx = []
    rest = []
    for idx in range(len(constraints)):
        if tracker.rank < dim and tracker.add(constraints[idx]):
            basis_idx.append(idx)
        else:
            rest.append(idx)
    if tracker.rank < dim:
        raise PreconditionError(
            "cone is not pointed: constraint matrix rank "
            f"{tracker.rank} < dimension {dim}")
    B = [list(constraints[i]) for i in basis_idx]
    rays = []
    masks = []
    for i in range(dim):
        rhs = [QQ(0)] * dim
        rhs[i] = QQ(-1)          # ray r with B r = -e_i
        col = solve(B, rhs)
        rays.append(_primitive(integerize(col)))
        masks.append(((1 << dim) - 1) ^ (1 << i))
    return DDState(dim=dim, order=basis_idx + rest, inserted=dim,
                   rays=rays, masks=masks)


def _insert(constraint, bit, dim, rays, masks):
    """One DD step: cut the current cone with constraint <= 0."""
    keep_rays, keep_masks = [], []
    neg, pos = [], []            # indices into rays
    svals = []
    for i, r in enumerate(rays):
        s = sum(a * x for a, x in zip(constraint, r) if x)
        svals.append(s)
        if s == 0:
            keep_rays.append(r)
            keep_masks.append(masks[i] | bit)
        elif s < 0:
            keep_rays.append(r)
            keep_masks.append(masks[i])
            neg.append(i)
        else:
            pos.append(i)
    if not pos or not neg:
        return keep_rays, keep_masks

    # incidence index over the pre-cut ray set, for the adjacency scan
    by_bit: dict[int, list] = {}
    for i, mask in enumerate(masks):
        mm = mask
        while mm:
            low = mm & (-mm)
            by_bit.setdefault(low, []).append(i)
            mm ^= low
    need = dim - 2
    empty: list = []
    for i in neg:
        mi, si, ri = masks[i], svals[i], rays[i]
        for j in pos:
            z = mi & masks[j]
            if z.bit_count() < need:
                continue
            # scan the shortest incidence list among the bits of z; with
            # no common tight constraints every other ray breaks adjacency
            best = None
            mm = z
            while mm:
                low = mm & (-mm)
                lst = by_bit.get(low, empty)
                if best is None or len(lst) < len(best):
                    best = lst
                mm ^= low
            if best is None:
                best = range(len(masks))
            adjacent = True
            for t in best:
                if t != i and t != j and (masks[t] & z) == z:
                    adjacent = False
                    break
            if not adjacent:
                continue
            sj, rj = svals[j], rays[j]
            new = [sj * x - si * y for x, y in zip(ri, rj)]
            keep_rays.append(_primitive(new))
            keep_masks.append(z | bit)
    return keep_rays, keep_masks


def extreme_rays(constraints, *, state: DDState | None = None,
                 deadline: float | None = None,
                 on_progress=None) -> tuple[list, DDState]:
    """Extreme rays of {x : a.x <= 0 for all a in constraints}.

    Returns (sorted primitive rays, final state).  Raises
    BudgetExhausted carrying a resumable state snapshot when the
    deadline passes.
    """
    constraints = [tuple(int(c) for c in row) for row in constraints]
    if not constraints:
        raise PreconditionError("no constraints")
    dim = len(constraints[0])
    if state is None:
        state = _initial_state(constraints, dim)

    while state.inserted < len(state.order):
        if deadline is not None and time.monotonic() > deadline:
            raise BudgetExhausted(
                f"double description stopped after {state.inserted} of "
                f"{len(state.order)} constraints", checkpoint=state.to_json())
        t = state.inserted
        a = constraints[state.order[t]]
        state.rays, state.masks = _insert(a, 1 << t, dim, state.rays, state.masks)
        state.inserted = t + 1
        if on_progress is not None:
            on_progress(state.inserted, len(state.order), len(state.rays))

    paired = sorted(zip(state.rays, state.masks))
    state.rays = [r for r, _ in paired]
    state.masks = [m for _, m in paired]
    return state.rays, state
