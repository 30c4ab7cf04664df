"""Graphical designs on regular graphs: public API.

Implementation is split across:
  graph_core.py, graph_generators.py, spectral_jacobi.py, spectral.py,
  design_reduce.py, design_simplex.py, design.py, walk.py, sampling.py,
  artifacts.py, run_settings.py
"""

from __future__ import annotations

from artifacts import write_csv, write_json, write_text  # noqa: F401
from design import (  # noqa: F401
    METHODS,
    DesignMeasure,
    DesignVerification,
    decay_base,
    design_from_sign_pattern,
    orthogonality_depth,
    solve_design,
    verify_design,
)
from design_reduce import (  # noqa: F401
    NullSpaceError,
    ReductionError,
    basic_signed_solution,
    build_moment_system,
    caratheodory_reduce,
)
from design_simplex import (  # noqa: F401
    FeasibilityCertificate,
    NumericalBreakdownError,
    two_phase_simplex,
)
from graph_core import (  # noqa: F401
    DimensionMismatchError,
    EdgeListParseError,
    Graph,
    GraphValidationError,
    build_graph,
    emit_edge_list,
    load_edge_list,
    walk_matrix_apply,
)
from graph_generators import FAMILIES, RandomRegularError, generate, random_regular  # noqa: F401
from run_settings import DEFAULT_SETTINGS, load_settings  # noqa: F401
from sampling import (  # noqa: F401
    BandIndexError,
    GraphFunction,
    SamplingBatch,
    SamplingReport,
    graph_function,
    make_test_function,
    quadrature,
    sample_batch,
    tailored_design_for,
)
from spectral import (  # noqa: F401
    GapEntry,
    OperatorKind,
    OrderingPolicy,
    SpectralBasis,
    decompose,
    reorder_basis,
    spectral_gap_report,
)
from spectral_jacobi import EigensolverError, jacobi_eigh  # noqa: F401
from walk import (  # noqa: F401
    BoundReport,
    OperatorMismatchError,
    ProbabilityVectorError,
    WalkTrace,
    asymptotic_base,
    iterate_walk,
    rate_fit,
    spectral_distance,
    verify_baseline,
    verify_theorem1,
)
