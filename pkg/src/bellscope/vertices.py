"""Extremal points of the correlation polytopes.

Local vertices are deterministic assignments of an outcome to every
setting of every party; Svetlichny vertices additionally let one pair
of parties produce joint (generally signalling) outputs.  Vertex lists
are exact, duplicate-free and sorted, so downstream geometry is
deterministic.
"""

from __future__ import annotations

import itertools

from .errors import PreconditionError, ScenarioError, TooLargeError
from .rational import ZERO, ONE
from .scenario import (CorrelationVector, ParamTag, Scenario,
                       full_index, fullcorr_index, cg_index)

DEFAULT_VERTEX_CAP = 10 ** 7


# ---------------------------------------------------------------------------
# strategies

class LocalStrategy:
    """Deterministic table r[i][s]: outcome of party i under setting s."""

    def __init__(self, scenario: Scenario, table):
        self.scenario = scenario
        self.table = tuple(tuple(row) for row in table)
        n, m, k = scenario.nmk
        if len(self.table) != n or any(len(row) != m for row in self.table):
            raise PreconditionError("assignment table must be n x m")

    def full_coords(self) -> tuple:
        n, m, k = self.scenario.nmk
        keys, _ = full_index(n, m, k)
        return tuple(
            ONE if all(r[i] == self.table[i][s[i]] for i in range(n)) else ZERO
            for s, r in keys)

    def ns_coords(self) -> tuple:
        n, m, k = self.scenario.nmk
        keys, _ = cg_index(n, m, k)
        return tuple(
            ONE if all(self.table[i][xi] == ai
                       for i, xi, ai in zip(parties, x, a)) else ZERO
            for parties, x, a in keys)


class SvetlichnyStrategy:
    """One communicating pair with joint outputs, one isolated party.

    ``pair`` are the two collaborating party indices; ``alpha`` and
    ``beta`` map the pair's joint settings (x, y) to their outcomes and
    ``gamma`` maps the solo party's setting to its outcome.
    """

    def __init__(self, scenario: Scenario, pair, alpha, beta, gamma):
        self.scenario = scenario
        self.pair = tuple(pair)
        self.solo = next(i for i in range(3) if i not in self.pair)
        self.alpha = alpha    # dict (x, y) -> outcome of pair[0]
        self.beta = beta      # dict (x, y) -> outcome of pair[1]
        self.gamma = gamma    # dict z -> outcome of solo party

    def full_coords(self) -> tuple:
        n, m, k = self.scenario.nmk
        keys, _ = full_index(n, m, k)
        i, j = self.pair
        u = self.solo
        out = []
        for s, r in keys:
            xy = (s[i], s[j])
            ok = (r[i] == self.alpha[xy] and r[j] == self.beta[xy]
                  and r[u] == self.gamma[s[u]])
            out.append(ONE if ok else ZERO)
        return tuple(out)


# ---------------------------------------------------------------------------
# polytope container (vertex list plus parametrization)

class Polytope:
    """A V-representation: exact vertices in a fixed parametrization.

    When ``basis`` is set the vertex coordinates are orbit-class
    coordinates of that symmetric subspace rather than ambient ones.
    The affine hull is computed lazily by the polytope engine; here the
    container only guarantees a sorted duplicate-free vertex list.
    """

    def __init__(self, scenario: Scenario, param: ParamTag, vertices,
                 sort: bool = True, basis=None):
        self.scenario = scenario
        self.param = param
        self.basis = basis
        vs = list(vertices)
        if not vs:
            raise PreconditionError("polytope needs at least one vertex")
        seen = set()
        unique = []
        for v in vs:
            t = tuple(v)
            if t not in seen:
                seen.add(t)
                unique.append(t)
        self.vertices = sorted(unique) if sort else unique

    def __len__(self):
        return len(self.vertices)

    @property
    def dim_ambient(self) -> int:
        return len(self.vertices[0])

    def points(self):
        return [CorrelationVector(self.scenario, self.param, v) for v in self.vertices]

    def to_json(self) -> dict:
        from .rational import vector_to_json
        data = {
            "scenario": self.scenario.to_json(),
            "param": self.param.value,
            "vertices": [vector_to_json(v) for v in self.vertices],
        }
        if self.basis is not None:
            data["symmetric_basis"] = self.basis.to_json()
        return data

    @staticmethod
    def from_json(data: dict) -> "Polytope":
        from .rational import vector_from_json
        basis = None
        if "symmetric_basis" in data:
            from .symmetry import SymmetricSubspace
            basis = SymmetricSubspace.from_json(data["symmetric_basis"])
        return Polytope(Scenario.from_json(data["scenario"]),
                        ParamTag(data["param"]),
                        [vector_from_json(v) for v in data["vertices"]],
                        basis=basis)


# ---------------------------------------------------------------------------
# enumeration

def enumerate_local_vertices(scenario: Scenario, param: ParamTag = ParamTag.NO_SIGNALLING,
                             cap: int = DEFAULT_VERTEX_CAP) -> Polytope:
    """All k^{n m} deterministic local vertices, lexicographic in the
    assignment tables."""
    n, m, k = scenario.nmk
    count = k ** (n * m)
    if count > cap:
        raise TooLargeError(f"{count} local vertices exceed cap {cap}")
    out = []
    for flat in itertools.product(range(k), repeat=n * m):
        table = [flat[i * m:(i + 1) * m] for i in range(n)]
        strat = LocalStrategy(scenario, table)
        out.append(strat.ns_coords() if param == ParamTag.NO_SIGNALLING
                   else strat.full_coords())
    return Polytope(scenario, param, out)


def _pair_functions(m: int, k: int):
    """All functions from joint settings (x, y) to outcomes."""
    cells = list(itertools.product(range(m), repeat=2))
    for values in itertools.product(range(k), repeat=len(cells)):
        yield dict(zip(cells, values))


def enumerate_svetlichny_vertices(scenario: Scenario,
                                  cap: int = DEFAULT_VERTEX_CAP) -> Polytope:
    """Union over the three bipartitions of all deterministic pair
    strategies, exact duplicates removed (fully local strategies occur
    under every bipartition).  Vertices are full-probability vectors."""
    if scenario.n != 3:
        raise ScenarioError("Svetlichny vertices are defined for n = 3")
    n, m, k = scenario.nmk
    per_partition = k ** (2 * m * m) * k ** m
    if 3 * per_partition > cap:
        raise TooLargeError(f"{3 * per_partition} raw strategies exceed cap {cap}")
    seen = set()
    out = []
    for pair in ((0, 1), (0, 2), (1, 2)):
        solo_all = list(itertools.product(range(k), repeat=m))
        for alpha in _pair_functions(m, k):
            for beta in _pair_functions(m, k):
                for solo in solo_all:
                    gamma = dict(enumerate(solo))
                    v = SvetlichnyStrategy(scenario, pair, alpha, beta, gamma).full_coords()
                    if v not in seen:
                        seen.add(v)
                        out.append(v)
    return Polytope(scenario, ParamTag.FULL_PROBABILITY, out)


def project_full_correlators(polytope: Polytope) -> Polytope:
    """Map each vertex to its m^n vector of full n-party correlators
    (products of +-1 outcome signs) and deduplicate."""
    n, m, k = polytope.scenario.nmk
    if k != 2:
        raise ScenarioError("full-correlator projection requires k = 2")
    if polytope.param != ParamTag.FULL_PROBABILITY:
        raise PreconditionError("project vertices from full-probability form")
    keys, _ = fullcorr_index(n, m)
    _, fpos = full_index(n, m, k)
    outs = []
    for v in polytope.vertices:
        point = []
        for s in keys:
            total = ZERO
            for r in itertools.product(range(2), repeat=n):
                val = v[fpos[(s, r)]]
                if val:
                    total += val if sum(r) % 2 == 0 else -val
            point.append(total)
        outs.append(tuple(point))
    return Polytope(polytope.scenario, ParamTag.FULL_CORRELATOR_ONLY, outs)


__all__ = [
    "LocalStrategy", "SvetlichnyStrategy", "Polytope",
    "enumerate_local_vertices", "enumerate_svetlichny_vertices",
    "project_full_correlators", "DEFAULT_VERTEX_CAP",
]
