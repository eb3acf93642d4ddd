import itertools

import pytest

from bellscope.polytope import (Inequality, is_valid, polytope_hull,
                                symmetric_extension)
from bellscope.rational import QQ
from bellscope.scenario import CorrelationVector, ParamTag, Scenario
from bellscope.symmetry import (act, build_symmetric_subspace,
                                project_vertices_symmetric,
                                symmetric_local_polytope,
                                symmetric_vertex_bound, symmetrize)
from bellscope.vertices import enumerate_local_vertices


def _mk(sc, coords):
    return CorrelationVector.make(sc, ParamTag.NO_SIGNALLING, coords)


def test_swap_action_on_marginal_coordinates(sc222):
    # [a1,a2,b1,b2,a1b1,a1b2,a2b1,a2b2] -> [b1,b2,a1,a2,a1b1,a2b1,a1b2,a2b2]
    p = _mk(sc222, [1, 2, 3, 4, 5, 6, 7, 8])
    q = act(p, (1, 0))
    assert q.coords == tuple(QQ(v) for v in [3, 4, 1, 2, 5, 7, 6, 8])


def test_identity_and_involution(sc222):
    p = _mk(sc222, [1, 2, 3, 4, 5, 6, 7, 8])
    assert act(p, (0, 1)).coords == p.coords
    assert act(act(p, (1, 0)), (1, 0)).coords == p.coords


def test_symmetrizer_idempotent_and_permutation_invariant(sc222):
    p = _mk(sc222, [1, 2, 3, 4, 5, 6, 7, 8])
    s = symmetrize(p)
    assert symmetrize(s).coords == s.coords
    assert symmetrize(act(p, (1, 0))).coords == s.coords


def test_symmetric_class_coordinates_222(sc222):
    sub = build_symmetric_subspace(sc222, ParamTag.NO_SIGNALLING)
    assert sub.d_s == 5
    p = _mk(sc222, [1, 2, 3, 4, 5, 6, 7, 8])
    # [(a1+b1)/2, (a2+b2)/2, a1b1, (a1b2+a2b1)/2, a2b2]
    assert sub.project(p.coords) == (QQ(2), QQ(3), QQ(5), QQ(13, 2), QQ(8))


@pytest.mark.parametrize("n,expected", [(2, 5), (3, 9), (4, 14), (5, 20)])
def test_symmetric_dimension_n22(n, expected):
    sub = build_symmetric_subspace(Scenario(n, 2, 2), ParamTag.NO_SIGNALLING)
    assert sub.d_s == expected == n * (n + 3) // 2


def test_symmetric_dimension_other_scenarios():
    assert build_symmetric_subspace(Scenario(2, 2, 4), ParamTag.NO_SIGNALLING).d_s == 27
    assert build_symmetric_subspace(Scenario(2, 4, 2), ParamTag.NO_SIGNALLING).d_s == 14
    assert build_symmetric_subspace(Scenario(3, 3, 2), ParamTag.FULL_CORRELATOR_ONLY).d_s == 10


def test_projection_counts_222(sym222):
    assert len(sym222) == 10
    assert polytope_hull(sym222).dim == 5


def test_projection_counts_422():
    sc = Scenario(4, 2, 2)
    P = enumerate_local_vertices(sc)
    sub = build_symmetric_subspace(sc, ParamTag.NO_SIGNALLING)
    Ps = project_vertices_symmetric(P, sub)
    assert len(Ps) == 35


def test_vertex_bound_values():
    assert symmetric_vertex_bound(4) == 35
    assert symmetric_vertex_bound(5) == 56
    assert symmetric_vertex_bound(1) == 4


def test_vertex_bound_attained_by_direct_enumeration_122():
    sc = Scenario(1, 2, 2)
    P = enumerate_local_vertices(sc)
    sub = build_symmetric_subspace(sc, ParamTag.NO_SIGNALLING)
    Ps = project_vertices_symmetric(P, sub)
    assert len(Ps) == 4 == symmetric_vertex_bound(1)


def test_fast_symmetric_local_polytope_matches_generic():
    for nmk in [(2, 2, 2), (3, 2, 2), (2, 2, 3)]:
        sc = Scenario(*nmk)
        P = enumerate_local_vertices(sc)
        sub = build_symmetric_subspace(sc, ParamTag.NO_SIGNALLING)
        generic = project_vertices_symmetric(P, sub)
        fast = symmetric_local_polytope(sc)
        assert generic.vertices == fast.vertices


def test_extension_agrees_with_class_functional(sym222, sc222):
    sub = sym222.basis
    f_s = Inequality(sc222, ParamTag.NO_SIGNALLING, tuple(QQ(v) for v in (2, 0, -1, -2, 1)),
                     QQ(0), basis=sub)
    ext = symmetric_extension(f_s)
    p = _mk(sc222, [1, 2, 3, 4, 5, 6, 7, 8])
    lhs = sum(c * z for c, z in zip(f_s.coeffs, sub.project(p.coords)))
    rhs = sum(c * z for c, z in zip(ext.coeffs, p.coords))
    assert lhs == rhs
    # invariant under the party swap
    swapped = act(CorrelationVector(sc222, ParamTag.NO_SIGNALLING, ext.coeffs), (1, 0))
    assert swapped.coords == ext.coeffs


def test_chsh_class_extension_is_ch(sym222, sc222):
    # class coefficients of the CHSH facet of the symmetrized polytope
    sub = sym222.basis
    f_s = Inequality(sc222, ParamTag.NO_SIGNALLING,
                     tuple(QQ(v) for v in (-2, 0, 1, 2, -1)), QQ(0), basis=sub)
    ext = symmetric_extension(f_s)
    assert ext.coeffs == tuple(QQ(v) for v in (-1, 0, -1, 0, 1, 1, 1, -1))


def test_every_sym_facet_extension_is_valid(sym222, local222):
    from bellscope.polytope import facet_enumeration
    for f in facet_enumeration(sym222):
        assert is_valid(symmetric_extension(f), local222)


def test_zero_class_inequality_rejected(sym222, sc222):
    from bellscope.errors import PreconditionError
    with pytest.raises(PreconditionError):
        Inequality(sc222, ParamTag.NO_SIGNALLING,
                   tuple(QQ(0) for _ in range(5)), QQ(0), basis=sym222.basis)


def _symmetric_full_facets(sc, P):
    from bellscope.polytope import facet_enumeration
    from bellscope.symmetry import PartyPermutationAction
    import itertools as it
    full = facet_enumeration(P)
    actions = [PartyPermutationAction.build(sc, ParamTag.NO_SIGNALLING, perm)
               for perm in it.permutations(range(sc.n)) if perm != tuple(range(sc.n))]
    out = []
    for f in full:
        nf = f.normal_form()
        if all(a.apply(nf.coeffs) == nf.coeffs for a in actions):
            out.append(nf)
    return full, out


@pytest.mark.parametrize("nmk", [(2, 2, 2), (2, 2, 3)])
def test_facet_correspondence_both_directions(nmk):
    """Extensions of symmetrized-polytope facets are valid, and every
    party-symmetric facet of the full polytope arises as one."""
    from bellscope.polytope import facet_enumeration, is_valid, symmetric_extension
    sc = Scenario(*nmk)
    P = enumerate_local_vertices(sc)
    sub = build_symmetric_subspace(sc, ParamTag.NO_SIGNALLING)
    Ps = project_vertices_symmetric(P, sub)
    raw = facet_enumeration(Ps)
    ext_keys = set()
    for f in raw:
        ext = symmetric_extension(f)
        assert is_valid(ext, P)
        ext_keys.add(ext.normal_form().dedup_key())
    _, sym_facets = _symmetric_full_facets(sc, P)
    assert sym_facets
    for f in sym_facets:
        assert f.dedup_key() in ext_keys


def test_223_full_polytope_class_structure():
    """The (2,2,3) polytope: 1116 facets in four relabeling classes; the
    single genuine three-outcome class is the CGLMP one, the rest are
    liftings (two CHSH merge shapes stay distinct under relabeling)."""
    from bellscope.polytope import facet_enumeration
    from bellscope.canon import classify, detect_lifting
    P = enumerate_local_vertices(Scenario(2, 2, 3))
    full = facet_enumeration(P)
    assert len(full) == 1116
    classes = classify(full)
    assert len(classes) == 4
    genuine = [c for c in classes if detect_lifting(c.form).genuine]
    assert len(genuine) == 1
    assert len(genuine[0].members) == 432
