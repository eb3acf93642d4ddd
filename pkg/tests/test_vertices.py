import pytest

from bellscope.errors import ScenarioError, TooLargeError
from bellscope.rational import QQ
from bellscope.scenario import (CorrelationVector, Model, ParamTag, Scenario,
                                validate_distribution)
from bellscope.vertices import (Polytope, enumerate_local_vertices,
                                enumerate_svetlichny_vertices,
                                project_full_correlators)


def test_local_vertex_counts(local222):
    assert len(local222) == 16
    assert len(enumerate_local_vertices(Scenario(1, 1, 2))) == 2
    assert len(enumerate_local_vertices(Scenario(5, 2, 2),
                                        ParamTag.FULL_PROBABILITY)) == 1024


def test_local_vertex_cap():
    with pytest.raises(TooLargeError):
        enumerate_local_vertices(Scenario(4, 4, 4), cap=10 ** 6)


def test_local_vertices_sorted_and_unique(local222):
    assert local222.vertices == sorted(set(local222.vertices))
    again = enumerate_local_vertices(Scenario(2, 2, 2))
    assert again.vertices == local222.vertices


def test_svetlichny_counts_and_inclusion():
    sc = Scenario(3, 2, 2, Model.SVETLICHNY)
    svet = enumerate_svetlichny_vertices(sc)
    # per bipartition 2^4 * 2^4 * 2^2 = 1024 raw strategies; the 64
    # fully local ones appear under all three bipartitions
    assert 3 * 1024 - 2 * 64 == 2944
    assert len(svet) == 2944
    local = enumerate_local_vertices(Scenario(3, 2, 2), ParamTag.FULL_PROBABILITY)
    svet_set = set(svet.vertices)
    assert all(v in svet_set for v in local.vertices)


def test_svetlichny_requires_three_parties():
    with pytest.raises(ScenarioError):
        Scenario(4, 2, 2, Model.SVETLICHNY)


def test_svetlichny_vertices_normalized_but_signalling():
    sc = Scenario(3, 2, 2, Model.SVETLICHNY)
    svet = enumerate_svetlichny_vertices(sc)
    signalling = 0
    for v in svet.vertices[:40]:
        rep = validate_distribution(CorrelationVector(sc, ParamTag.FULL_PROBABILITY, v))
        assert all(i.ok for i in rep.items if i.check == "normalization")
        assert all(i.ok for i in rep.items if i.check == "nonnegativity")
        if any(not i.ok for i in rep.items if i.check == "no-signalling"):
            signalling += 1
    assert signalling > 0


def test_full_correlator_projection_332():
    sc = Scenario(3, 3, 2, Model.FULL_CORRELATOR)
    full = enumerate_local_vertices(sc, ParamTag.FULL_PROBABILITY)
    assert len(full) == 512
    proj = project_full_correlators(full)
    assert proj.dim_ambient == 27
    # rank-one sign tensors: 8^3 sign choices modulo pairwise flips
    assert len(proj) == 128
    assert all(all(c in (QQ(1), QQ(-1)) for c in v) for v in proj.vertices)


def test_full_correlator_projection_222(local222, sc222):
    full = enumerate_local_vertices(sc222, ParamTag.FULL_PROBABILITY)
    proj = project_full_correlators(full)
    assert len(proj) == 8 and proj.dim_ambient == 4
    assert tuple([QQ(1)] * 4) in set(proj.vertices)


def test_polytope_json_round_trip(local222):
    data = local222.to_json()
    again = Polytope.from_json(data)
    assert again.vertices == local222.vertices
    assert again.param == local222.param
