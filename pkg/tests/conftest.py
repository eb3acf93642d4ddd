import pytest

from bellscope.scenario import ParamTag, Scenario
from bellscope.symmetry import build_symmetric_subspace, project_vertices_symmetric
from bellscope.vertices import enumerate_local_vertices


@pytest.fixture(scope="session")
def sc222():
    return Scenario(2, 2, 2)


@pytest.fixture(scope="session")
def local222(sc222):
    return enumerate_local_vertices(sc222)


@pytest.fixture(scope="session")
def sym222(sc222, local222):
    sub = build_symmetric_subspace(sc222, ParamTag.NO_SIGNALLING)
    return project_vertices_symmetric(local222, sub)
