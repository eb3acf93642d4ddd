"""Exact polyhedral engine.

Affine hulls, V-to-H facet enumeration via double description,
validity / facet tests, completion of valid inequalities to the facets
containing their face, and exact LP membership with certificates.

All geometry happens inside the affine hull of the vertex set: the
engine maps points to hull coordinates (where the polytope is
full-dimensional and the facet cone is pointed), runs the double
description there, and maps the resulting inequalities back to ambient
coordinates.  Hull equalities are reported separately.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

from . import dd
from .errors import PreconditionError
from .lp import convex_combination
from .linalg import affine_rank, dot, nullspace, rref
from .rational import QQ, ZERO, integerize, vector_from_json, vector_to_json
from .scenario import CorrelationVector, ParamTag, Scenario
from .vertices import Polytope

__all__ = [
    "Inequality", "AffineHull", "polytope_hull", "affine_rank",
    "facet_enumeration", "is_valid", "is_facet", "saturating_vertices",
    "lift_to_facets", "is_local_lp", "MembershipResult", "verify_facets",
    "symmetric_extension",
]


# ---------------------------------------------------------------------------
# inequalities

@dataclass(frozen=True)
class Inequality:
    """A linear inequality  coeffs . p <= bound.

    ``basis`` is set when the coefficients live in orbit-class
    coordinates of a symmetric subspace instead of the ambient
    parametrization.  ``provenance`` records which pipeline stage
    produced the inequality.
    """
    scenario: Scenario
    param: ParamTag
    coeffs: tuple
    bound: object
    basis: object = None
    provenance: str = ""

    def __post_init__(self):
        if all(c == 0 for c in self.coeffs) and self.bound == 0:
            raise PreconditionError("the zero inequality is not allowed")

    def evaluate(self, coords) -> object:
        """coeffs . p - bound (positive = violated)."""
        return dot(self.coeffs, coords) - self.bound

    def normal_form(self) -> "Inequality":
        """Unique representative under positive rescaling: integral
        coefficients (bound included) with overall gcd one."""
        scaled = integerize(tuple(self.coeffs) + (QQ(self.bound),))
        return replace(self, coeffs=tuple(QQ(c) for c in scaled[:-1]),
                       bound=QQ(scaled[-1]))

    def dedup_key(self) -> tuple:
        nf = self.normal_form()
        return (tuple(int(c) for c in nf.coeffs), int(nf.bound))

    def to_json(self) -> dict:
        data = {
            "scenario": self.scenario.to_json(),
            "param": self.param.value,
            "coeffs": vector_to_json(self.coeffs),
            "bound": vector_to_json([self.bound])[0],
            "provenance": self.provenance,
        }
        if self.basis is not None:
            data["symmetric_basis"] = self.basis.to_json()
        return data

    @staticmethod
    def from_json(data: dict) -> "Inequality":
        basis = None
        if "symmetric_basis" in data:
            from .symmetry import SymmetricSubspace
            basis = SymmetricSubspace.from_json(data["symmetric_basis"])
        from .rational import pair_to_rat
        return Inequality(
            scenario=Scenario.from_json(data["scenario"]),
            param=ParamTag(data["param"]),
            coeffs=vector_from_json(data["coeffs"]),
            bound=pair_to_rat(data["bound"]),
            basis=basis,
            provenance=data.get("provenance", ""),
        )


def symmetric_extension(ineq: Inequality) -> Inequality:
    """Extend an orbit-class-basis inequality to the full space.

    Each class coefficient is divided by its orbit size so the extended
    functional agrees with the class functional on every point; the
    result is invariant under all party permutations and has no
    component in the antisymmetric complement.
    """
    if ineq.basis is None:
        raise PreconditionError("inequality is not in a symmetric class basis")
    coeffs = ineq.basis.extend_functional(ineq.coeffs)
    return Inequality(ineq.scenario, ineq.param, tuple(coeffs), QQ(ineq.bound),
                      basis=None,
                      provenance=f"symmetric_extension({ineq.provenance})")


# ---------------------------------------------------------------------------
# affine hulls

@dataclass
class AffineHull:
    base: tuple            # one vertex
    directions: list       # RREF rows spanning the hull's direction space
    pivots: list           # pivot columns of the RREF rows
    dim: int = field(init=False)

    def __post_init__(self):
        self.dim = len(self.directions)

    def to_hull_coords(self, point) -> tuple:
        """Coordinates in the direction basis (valid for points in the hull:
        with the RREF basis these are just the pivot-column offsets)."""
        return tuple(point[j] - self.base[j] for j in self.pivots)

    def contains(self, point) -> bool:
        diff = [p - b for p, b in zip(point, self.base)]
        z = self.to_hull_coords(point)
        recon = list(self.base)
        for zt, row in zip(z, self.directions):
            for j, rj in enumerate(row):
                if rj:
                    recon[j] += zt * rj
        return all(r == p for r, p in zip(recon, point))

    def lift_functional(self, g, g0):
        """Map an inequality g.z <= g0 over hull coordinates back to the
        ambient space (supported on the pivot columns)."""
        h = [ZERO] * len(self.base)
        h0 = QQ(g0)
        for gt, j in zip(g, self.pivots):
            h[j] = QQ(gt)
            h0 += QQ(gt) * self.base[j]
        return tuple(h), h0

    def equalities(self) -> list:
        """Functionals (e, e0) with e.p = e0 on the hull."""
        out = []
        for e in nullspace(self.directions):
            e0 = dot(e, self.base)
            out.append((e, e0))
        return out


def polytope_hull(polytope: Polytope) -> AffineHull:
    cached = getattr(polytope, "_hull", None)
    if cached is not None:
        return cached
    base = polytope.vertices[0]
    n = len(base)
    diffs = [[v[j] - base[j] for j in range(n)] for v in polytope.vertices[1:]]
    rows, pivots = rref(diffs)
    hull = AffineHull(base=base, directions=rows, pivots=pivots)
    polytope._hull = hull
    return hull


# ---------------------------------------------------------------------------
# validity and facet tests

def _coeff_space_matches(ineq: Inequality, polytope: Polytope) -> bool:
    return len(ineq.coeffs) == polytope.dim_ambient


def saturating_vertices(ineq: Inequality, polytope: Polytope) -> list:
    return [v for v in polytope.vertices if ineq.evaluate(v) == 0]


def is_valid(ineq: Inequality, polytope: Polytope) -> bool:
    if not _coeff_space_matches(ineq, polytope):
        raise PreconditionError("inequality and polytope dimensions differ")
    return all(ineq.evaluate(v) <= 0 for v in polytope.vertices)


def is_facet(ineq: Inequality, polytope: Polytope) -> bool:
    """Valid and saturated by hull-dimension many affinely independent
    vertices."""
    if not is_valid(ineq, polytope):
        return False
    hull = polytope_hull(polytope)
    sat = saturating_vertices(ineq, polytope)
    if len(sat) < hull.dim:
        return False
    return affine_rank(sat) == hull.dim


# ---------------------------------------------------------------------------
# facet enumeration

def _facet_cone_constraints(polytope: Polytope, hull: AffineHull):
    """Integer rows (z_v, -1) of the dual cone over hull coordinates."""
    rows = []
    for v in polytope.vertices:
        z = hull.to_hull_coords(v)
        rows.append(integerize(tuple(z) + (QQ(-1),)))
    return rows


def facet_enumeration(polytope: Polytope, *, reverse_order: bool = False,
                      deadline: float | None = None,
                      state: dd.DDState | None = None,
                      on_progress=None, verify: bool = False) -> list:
    """Complete irredundant facet list of conv(vertices).

    Works inside the affine hull; vertices are inserted in their sorted
    (lexicographic) order, or reversed when ``reverse_order`` is set
    (the normalized output is identical either way, which the test
    suite checks).  Raises BudgetExhausted with a resumable state when
    a deadline is given and passes.
    """
    hull = polytope_hull(polytope)
    if hull.dim == 0:
        raise PreconditionError("polytope is a single point")
    rows = _facet_cone_constraints(polytope, hull)
    if reverse_order:
        rows = rows[::-1]
    rays, _state = dd.extreme_rays(rows, deadline=deadline, state=state,
                                   on_progress=on_progress)
    facets = []
    for ray in rays:
        g, g0 = ray[:-1], ray[-1]
        h, h0 = hull.lift_functional(g, g0)
        ineq = Inequality(polytope.scenario, polytope.param, h, h0,
                          basis=polytope.basis,
                          provenance="facet_enumeration").normal_form()
        facets.append(ineq)
    facets.sort(key=lambda f: f.dedup_key())
    if verify:
        verify_facets(polytope, facets)
    return facets


def verify_facets(polytope: Polytope, facets: list) -> None:
    """Cross-checks on an enumerated facet list: every facet valid and
    saturated at hull rank, every vertex on at least hull-dim facets."""
    hull = polytope_hull(polytope)
    sat_count = [0] * len(polytope.vertices)
    for f in facets:
        values = [f.evaluate(v) for v in polytope.vertices]
        if any(val > 0 for val in values):
            raise AssertionError("enumerated facet is not valid")
        sat = [v for v, val in zip(polytope.vertices, values) if val == 0]
        if affine_rank(sat) != hull.dim:
            raise AssertionError("enumerated facet has deficient contact rank")
        for i, val in enumerate(values):
            if val == 0:
                sat_count[i] += 1
    if any(c < hull.dim for c in sat_count):
        raise AssertionError("a vertex lies on fewer than hull-dim facets")


# ---------------------------------------------------------------------------
# completing a valid inequality to the facets containing its face

def lift_to_facets(ineq: Inequality, polytope: Polytope,
                   deadline: float | None = None) -> list:
    """All facets of the polytope whose saturating set contains the face
    of the given valid inequality.

    The valid inequalities tight on the face's vertex set W form a
    pointed subcone of the dual cone; its extreme rays are exactly the
    facets containing the face, so one double description run over the
    tightness-reduced coordinates enumerates them.
    """
    if not is_valid(ineq, polytope):
        raise PreconditionError("input inequality is not valid for the polytope")
    hull = polytope_hull(polytope)
    W = saturating_vertices(ineq, polytope)
    if not W:
        raise PreconditionError("inequality touches no vertex; its face is empty")
    if affine_rank(W) == hull.dim:
        return [ineq.normal_form()]

    # tightness system over (g, g0) in hull coordinates
    tight_rows = [list(hull.to_hull_coords(w)) + [QQ(-1)] for w in W]
    null = nullspace(tight_rows)           # basis of the tight-on-W subspace
    q = len(null)
    cone_rows = []
    for v in polytope.vertices:
        zv = tuple(hull.to_hull_coords(v)) + (QQ(-1),)
        row = tuple(dot(zv, nb) for nb in null)
        if any(row):
            cone_rows.append(integerize(row))
    # dedup rows (many vertices can induce the same reduced constraint)
    cone_rows = sorted(set(cone_rows))
    rays, _ = dd.extreme_rays(cone_rows, deadline=deadline)

    out = {}
    for y in rays:
        g_full = [ZERO] * (hull.dim + 1)
        for yi, nb in zip(y, null):
            if yi:
                for j, nbj in enumerate(nb):
                    if nbj:
                        g_full[j] += yi * nbj
        h, h0 = hull.lift_functional(g_full[:-1], g_full[-1])
        cand = Inequality(polytope.scenario, polytope.param, h, h0,
                          basis=polytope.basis,
                          provenance="lift_to_facets").normal_form()
        if is_facet(cand, polytope):
            out[cand.dedup_key()] = cand
    return [out[k] for k in sorted(out)]


# ---------------------------------------------------------------------------
# LP membership

@dataclass
class MembershipResult:
    inside: bool
    weights: list | None = None          # convex weights over the vertices
    certificate: Inequality | None = None  # valid inequality violated by p


def is_local_lp(p: CorrelationVector, polytope: Polytope) -> MembershipResult:
    """Exact membership of p in conv(vertices): convex weights or a
    separating valid inequality."""
    coords = p.coords if isinstance(p, CorrelationVector) else tuple(p)
    if len(coords) != polytope.dim_ambient:
        raise PreconditionError("point and polytope dimensions differ")
    weights, cert = convex_combination(polytope.vertices, coords)
    if weights is not None:
        # exact reconstruction check
        recon = [ZERO] * len(coords)
        for w, v in zip(weights, polytope.vertices):
            if w:
                for j, vj in enumerate(v):
                    if vj:
                        recon[j] += w * vj
        assert tuple(recon) == tuple(coords)
        return MembershipResult(inside=True, weights=weights)
    h, h0 = cert
    ineq = Inequality(polytope.scenario, polytope.param, tuple(h), h0,
                      basis=polytope.basis,
                      provenance="separating_certificate").normal_form()
    return MembershipResult(inside=False, certificate=ineq)
