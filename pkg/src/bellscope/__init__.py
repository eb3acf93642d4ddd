"""bellscope: exact enumeration of party-symmetric Bell-type facet
inequalities via the symmetrized correlation polytope."""

__version__ = "0.1.0"

from .scenario import (CorrelationVector, Model, ParamTag, Scenario,
                       convert, space_dimension, validate_distribution)
from .vertices import (Polytope, enumerate_local_vertices,
                       enumerate_svetlichny_vertices, project_full_correlators)
from .symmetry import (SymmetricSubspace, act, build_symmetric_subspace,
                       project_vertices_symmetric, symmetric_vertex_bound,
                       symmetrize)
from .polytope import (Inequality, affine_rank, facet_enumeration, is_facet,
                       is_local_lp, is_valid, lift_to_facets,
                       symmetric_extension)
from .canon import (CorrelatorForm, are_equivalent, classify, detect_lifting,
                    invariants, noise_resistance, normalize,
                    to_correlator_form)
from .catalog import Catalog, render_cg_table, run_pipeline, verify_catalog

__all__ = [
    "__version__",
    "Scenario", "Model", "ParamTag", "CorrelationVector", "Polytope",
    "Inequality", "CorrelatorForm", "SymmetricSubspace", "Catalog",
    "space_dimension", "convert", "validate_distribution",
    "enumerate_local_vertices", "enumerate_svetlichny_vertices",
    "project_full_correlators", "act", "symmetrize",
    "build_symmetric_subspace", "project_vertices_symmetric",
    "symmetric_vertex_bound", "affine_rank", "facet_enumeration",
    "is_valid", "is_facet", "lift_to_facets", "is_local_lp",
    "symmetric_extension", "to_correlator_form", "normalize", "invariants",
    "are_equivalent", "classify", "detect_lifting", "noise_resistance",
    "render_cg_table", "run_pipeline", "verify_catalog",
]
