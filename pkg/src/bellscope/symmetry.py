"""Party-permutation symmetry: group action, symmetrizer, orbit basis.

The permutation group of the n parties acts on every parametrization by
permuting coordinates.  The symmetrizer averages over the group; its
image is spanned by one coordinate per orbit of coordinate indices (the
orbit-class basis), so projecting onto the symmetric subspace and
re-expressing in class coordinates drops the dimension from d to the
number of orbits d_s.

Because the action permutes coordinates, the symmetric subspace is
linear (no translation needed) and the symmetrizer is an orthogonal
projection, which is what makes facet correspondence work: a facet of
the projected polytope extends to a valid inequality of the full
polytope by spreading each class coefficient uniformly over its orbit.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

from .errors import PreconditionError
from .lp import convex_combination
from .rational import QQ, ZERO
from .scenario import (CorrelationVector, ParamTag, Scenario, cg_index,
                       full_index, fullcorr_index, space_dimension)
from .vertices import LocalStrategy, Polytope


# ---------------------------------------------------------------------------
# coordinate action

def _permute_key(param: ParamTag, key, perm):
    """Image of a coordinate key under a party permutation.

    perm maps new party slots to old ones: slot i of the result takes
    what party perm[i] had.
    """
    if param == ParamTag.FULL_PROBABILITY:
        s, r = key
        return (tuple(s[perm[i]] for i in range(len(s))),
                tuple(r[perm[i]] for i in range(len(r))))
    if param == ParamTag.FULL_CORRELATOR_ONLY:
        return tuple(key[perm[i]] for i in range(len(key)))
    # Collins-Gisin / correlator keys: (parties, settings, outcomes)
    parties, x, a = key
    inv = {perm[i]: i for i in range(len(perm))}
    triples = sorted((inv[p], xi, ai) for p, xi, ai in zip(parties, x, a))
    return (tuple(t[0] for t in triples),
            tuple(t[1] for t in triples),
            tuple(t[2] for t in triples))


def _index_of(scenario: Scenario, param: ParamTag):
    n, m, k = scenario.nmk
    if param == ParamTag.FULL_PROBABILITY:
        return full_index(n, m, k)
    if param == ParamTag.FULL_CORRELATOR_ONLY:
        return fullcorr_index(n, m)
    return cg_index(n, m, k)


@dataclass(frozen=True)
class PartyPermutationAction:
    """The coordinate permutation induced by one party permutation."""
    scenario: Scenario
    param: ParamTag
    perm: tuple
    coordinate_map: tuple   # result[j] = source index of coordinate j

    @staticmethod
    def build(scenario: Scenario, param: ParamTag, perm) -> "PartyPermutationAction":
        perm = tuple(perm)
        keys, pos = _index_of(scenario, param)
        cmap = tuple(pos[_permute_key(param, key, perm)] for key in keys)
        return PartyPermutationAction(scenario, param, perm, cmap)

    def apply(self, coords):
        cmap = self.coordinate_map
        return tuple(coords[cmap[j]] for j in range(len(cmap)))


def act(p: CorrelationVector, perm) -> CorrelationVector:
    """Apply a party permutation to a correlation vector."""
    action = PartyPermutationAction.build(p.scenario, p.param, perm)
    return CorrelationVector(p.scenario, p.param, action.apply(p.coords))


# ---------------------------------------------------------------------------
# symmetric subspace

@dataclass(frozen=True)
class SymmetricSubspace:
    """Orbit-class basis of the party-symmetric subspace.

    ``classes`` partitions the ambient coordinate indices; the class
    value of a symmetric vector is the (equal) value of its members, and
    projecting an arbitrary vector takes the class mean.
    """
    scenario: Scenario
    param: ParamTag
    classes: tuple          # tuple of sorted index tuples

    @property
    def d_s(self) -> int:
        return len(self.classes)

    @property
    def ambient_dim(self) -> int:
        return space_dimension(self.scenario, self.param)

    def project(self, coords) -> tuple:
        """Class coordinates of the symmetric part (orbit means)."""
        out = []
        for cls in self.classes:
            total = ZERO
            for j in cls:
                total += coords[j]
            out.append(total / len(cls))
        return tuple(out)

    def embed(self, class_coords) -> tuple:
        """Full-space vector of a symmetric point given in class coordinates."""
        out = [ZERO] * self.ambient_dim
        for value, cls in zip(class_coords, self.classes):
            for j in cls:
                out[j] = value
        return tuple(out)

    def extend_functional(self, class_coeffs) -> tuple:
        """Full-space coefficients f with f.p = f_s.project(p) for all p:
        each class coefficient is spread uniformly over its orbit."""
        out = [ZERO] * self.ambient_dim
        for value, cls in zip(class_coeffs, self.classes):
            share = QQ(value) / len(cls)
            for j in cls:
                out[j] = share
        return tuple(out)

    def to_json(self) -> dict:
        return {
            "scenario": self.scenario.to_json(),
            "param": self.param.value,
            "classes": [list(c) for c in self.classes],
        }

    @staticmethod
    def from_json(data) -> "SymmetricSubspace":
        return SymmetricSubspace(Scenario.from_json(data["scenario"]),
                                 ParamTag(data["param"]),
                                 tuple(tuple(c) for c in data["classes"]))


@lru_cache(maxsize=None)
def _orbit_classes(scenario: Scenario, param: ParamTag) -> tuple:
    keys, pos = _index_of(scenario, param)
    n = scenario.n
    dim = len(keys)
    # adjacent transpositions generate the symmetric group
    gens = []
    for t in range(n - 1):
        perm = list(range(n))
        perm[t], perm[t + 1] = perm[t + 1], perm[t]
        gens.append(tuple(pos[_permute_key(param, key, tuple(perm))] for key in keys))
    seen = [False] * dim
    classes = []
    for start in range(dim):
        if seen[start]:
            continue
        orbit = {start}
        frontier = [start]
        seen[start] = True
        while frontier:
            j = frontier.pop()
            for g in gens:
                t = g[j]
                if not seen[t]:
                    seen[t] = True
                    orbit.add(t)
                    frontier.append(t)
        classes.append(tuple(sorted(orbit)))
    classes.sort(key=lambda c: c[0])
    return tuple(classes)


def build_symmetric_subspace(scenario: Scenario,
                             param: ParamTag = ParamTag.NO_SIGNALLING) -> SymmetricSubspace:
    return SymmetricSubspace(scenario, param, _orbit_classes(scenario, param))


def symmetrize(p: CorrelationVector) -> CorrelationVector:
    """Average of p over all party permutations (orbit means replicated)."""
    sub = build_symmetric_subspace(p.scenario, p.param)
    return CorrelationVector(p.scenario, p.param, sub.embed(sub.project(p.coords)))


def symmetric_vertex_bound(n: int) -> int:
    """Vertex-count bound of the symmetrized (n,2,2) local polytope:
    multisets of the four single-party strategies."""
    return (n + 1) * (n + 2) * (n + 3) // 6


# ---------------------------------------------------------------------------
# projecting vertex sets

def _extremal_filter(points: list, deadline=None) -> list:
    """Drop points that are convex combinations of the others (exact LP).

    A cheap pre-pass certifies points that uniquely attain a coordinate
    minimum or maximum; the LP then only runs on the rest.
    """
    import time
    if len(points) <= 1:
        return list(points)
    dim = len(points[0])
    certified = set()
    for j in range(dim):
        vals = [p[j] for p in points]
        lo, hi = min(vals), max(vals)
        lo_idx = [i for i, v in enumerate(vals) if v == lo]
        hi_idx = [i for i, v in enumerate(vals) if v == hi]
        if len(lo_idx) == 1:
            certified.add(lo_idx[0])
        if len(hi_idx) == 1:
            certified.add(hi_idx[0])
    keep = []
    for i, p in enumerate(points):
        if deadline is not None and time.monotonic() > deadline:
            from .errors import BudgetExhausted
            raise BudgetExhausted("extremality filtering over budget")
        if i in certified:
            keep.append(p)
            continue
        others = [q for t, q in enumerate(points) if t != i]
        weights, _ = convex_combination(others, p)
        if weights is None:
            keep.append(p)
    return keep


def project_vertices_symmetric(polytope: Polytope, subspace: SymmetricSubspace,
                               deadline=None) -> Polytope:
    """Project vertices onto the symmetric subspace, deduplicate, and keep
    only extremal points: the vertex set of the symmetrized polytope."""
    if polytope.param != subspace.param:
        raise PreconditionError("polytope and subspace parametrizations differ")
    seen = set()
    projected = []
    for v in polytope.vertices:
        pv = subspace.project(v)
        if pv not in seen:
            seen.add(pv)
            projected.append(pv)
    extremal = _extremal_filter(sorted(projected), deadline=deadline)
    return Polytope(polytope.scenario, polytope.param, extremal, basis=subspace)


def symmetric_local_polytope(scenario: Scenario,
                             param: ParamTag = ParamTag.NO_SIGNALLING) -> Polytope:
    """Vertex set of the symmetrized local polytope built directly from
    multisets of single-party strategies (projection depends only on the
    multiset, so one representative per multiset is enough)."""
    n, m, k = scenario.nmk
    sub = build_symmetric_subspace(scenario, param)
    rows = list(itertools.product(range(k), repeat=m))
    seen = set()
    projected = []
    for combo in itertools.combinations_with_replacement(rows, n):
        strat = LocalStrategy(scenario, list(combo))
        coords = (strat.ns_coords() if param == ParamTag.NO_SIGNALLING
                  else strat.full_coords())
        pv = sub.project(coords)
        if pv not in seen:
            seen.add(pv)
            projected.append(pv)
    extremal = _extremal_filter(sorted(projected))
    return Polytope(scenario, param, extremal, basis=sub)


__all__ = [
    "PartyPermutationAction", "SymmetricSubspace", "act", "symmetrize",
    "build_symmetric_subspace", "symmetric_vertex_bound",
    "project_vertices_symmetric", "symmetric_local_polytope",
]
