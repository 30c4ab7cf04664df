"""Walk iteration, the exact spectral distance, and the design / baseline bounds."""

from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from design import solve_design
from graph_core import DimensionMismatchError
from graph_generators import generate
from spectral import OperatorKind, decompose
from walk import (
    TRACE_COLUMNS,
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


def _dirac(n, v=0):
    mu = np.zeros(n)
    mu[v] = 1.0
    return mu


def test_c4_dirac_oscillates(c4):
    trace = iterate_walk(c4, _dirac(4), 2)
    assert trace.distances == pytest.approx((0.75, 0.25, 0.25), abs=1e-15)
    assert np.allclose(trace.measures[1], [0, 0.5, 0, 0.5])
    assert np.allclose(trace.measures[2], [0.5, 0, 0.5, 0])


def test_c4_one_vertex_per_class_is_uniform_after_one_step(c4):
    trace = iterate_walk(c4, [0.5, 0.5, 0.0, 0.0], 1)
    assert trace.distances[1] <= 1e-12


def test_uniform_start_stays_uniform(petersen):
    trace = iterate_walk(petersen, np.full(10, 0.1), 30)
    assert max(trace.distances) <= 1e-30
    assert trace.fitted_rate is None
    assert rate_fit(trace) is None


def test_iterate_walk_validates_initial_measure(petersen):
    with pytest.raises(DimensionMismatchError):
        iterate_walk(petersen, np.full(9, 1 / 9), 3)
    with pytest.raises(ProbabilityVectorError, match="negative"):
        iterate_walk(petersen, np.r_[-0.1, np.full(9, 1.1 / 9)], 3)
    with pytest.raises(ProbabilityVectorError, match="sums to"):
        iterate_walk(petersen, np.full(10, 0.2), 3)
    with pytest.raises(ValueError, match="nonnegative"):
        iterate_walk(petersen, np.full(10, 0.1), -1)


def test_spectral_distance_examples(c4_basis):
    assert math.isclose(spectral_distance(c4_basis, _dirac(4), 0), 0.75, abs_tol=1e-12)
    assert spectral_distance(c4_basis, np.full(4, 0.25), 7) <= 1e-28


def test_spectral_distance_rejects_laplacian_basis(petersen):
    basis = decompose(petersen, OperatorKind.LAPLACIAN)
    with pytest.raises(OperatorMismatchError, match="walk_matrix"):
        spectral_distance(basis, np.full(10, 0.1), 1)


def test_petersen_depth_five_bound(petersen_basis):
    design = solve_design(petersen_basis, 5)
    report = verify_theorem1(petersen_basis, design, 20)
    assert report.passed, report.to_document()
    assert math.isclose(report.base, 1 / 3, abs_tol=1e-9)
    assert spectral_distance(petersen_basis, design.as_vector(), 3) <= (1 / 3) ** 6 + 1e-12


def test_dirac_design_recovers_classical_bound(petersen_basis):
    design = solve_design(petersen_basis, 1)
    report = verify_theorem1(petersen_basis, design, 20)
    assert report.passed
    assert math.isclose(report.base, 2 / 3, abs_tol=1e-9)


def test_c4_depth_two_reaches_uniform(c4_basis):
    design = solve_design(c4_basis, 2)
    report = verify_theorem1(c4_basis, design, 5)
    assert report.passed
    assert abs(report.base) <= 1e-9
    assert all(d <= 1e-12 for d in report.trace.distances[1:])


def test_k33_depth_two_reaches_uniform(k33_basis):
    design = solve_design(k33_basis, 2)
    trace = iterate_walk(k33_basis.graph, design.as_vector(), 1)
    assert trace.distances[1] <= 1e-12


def test_c4_dirac_never_equidistributes(c4):
    trace = iterate_walk(c4, _dirac(4), 10)
    assert all(abs(d - 0.25) <= 1e-12 for d in trace.distances[1:])


def test_bipartite_obstruction_and_design_escape():
    basis = decompose(generate("cycle", {"n": 6}))
    stuck = iterate_walk(basis.graph, _dirac(6), 50)
    assert stuck.distances[-1] >= 1 / 6 - 1e-12
    design = solve_design(basis, 2)
    report = verify_theorem1(basis, design, 50)
    assert report.passed
    assert math.isclose(report.base, 0.5, abs_tol=1e-9)
    assert report.trace.distances[-1] <= 1e-20


def test_design_bound_over_regular_corpus(corpus_designs):
    for basis, designs in corpus_designs:
        for ell, design in designs.items():
            report = verify_theorem1(basis, design, 50)
            assert report.passed, (basis.n, ell, report.to_document())
            assert report.max_disagreement <= 1e-9


@settings(max_examples=25, deadline=None)
@given(st.integers(min_value=0, max_value=2**32 - 1))
def test_iterated_and_spectral_distances_agree(seed):
    basis = decompose(generate("random_regular", {"n": 16, "degree": 3}, seed=seed % 7))
    mu0 = np.random.default_rng(seed).dirichlet(np.ones(16))
    trace = iterate_walk(basis.graph, mu0, 50)
    for k, d in enumerate(trace.distances):
        assert abs(d - spectral_distance(basis, mu0, k)) <= 1e-9


@settings(max_examples=25, deadline=None)
@given(st.integers(min_value=0, max_value=2**32 - 1))
def test_baseline_bound_for_arbitrary_starts(seed):
    basis = decompose(generate("petersen"))
    mu0 = np.random.default_rng(seed).dirichlet(np.full(10, 0.3))
    report = verify_baseline(basis, mu0, 40)
    assert report.passed
    assert report.kind == "baseline"
    assert math.isclose(report.base, 2 / 3, abs_tol=1e-9)


def test_rate_fit_on_geometric_sequence():
    distances = tuple(0.25 ** (2 * k) for k in range(21))
    trace = WalkTrace(mu0=np.ones(1), steps=20, distances=distances, measures=np.ones((21, 1)))
    assert math.isclose(rate_fit(trace), 0.25, abs_tol=1e-6)


def test_rate_fit_needs_three_points():
    trace = WalkTrace(
        mu0=np.ones(1), steps=5, distances=(1.0, 0.5, 0.0, 0.0, 0.0, 0.0), measures=np.ones((6, 1))
    )
    assert rate_fit(trace) is None


def test_rate_fit_petersen_design(petersen_basis):
    design = solve_design(petersen_basis, 5)
    trace = iterate_walk(petersen_basis.graph, design.as_vector(), 40)
    assert math.isclose(rate_fit(trace), 1 / 3, abs_tol=1e-3)
    assert math.isclose(asymptotic_base(petersen_basis, design.as_vector()), 1 / 3, abs_tol=1e-9)


def test_rate_fit_petersen_dirac(petersen_basis):
    mu0 = _dirac(10, 3)
    assert abs(petersen_basis.coefficients(mu0)[1]) > 1e-3
    trace = iterate_walk(petersen_basis.graph, mu0, 40)
    assert math.isclose(rate_fit(trace), 2 / 3, abs_tol=1e-3)
    assert math.isclose(asymptotic_base(petersen_basis, mu0), 2 / 3, abs_tol=1e-9)


def test_trace_rows_carry_bounds(c4_basis):
    report = verify_baseline(c4_basis, _dirac(4), 3)
    rows = report.trace.rows()
    assert TRACE_COLUMNS == ("k", "distance_sq", "bound", "sharpened_bound", "distance")
    assert rows[0][:4] == pytest.approx((0, 0.75, 1.0, 1.0))
    assert rows[1][:3] == pytest.approx((1, 0.25, 1.0))
    assert math.isclose(rows[1][4], 0.5)


def test_report_document_fields(petersen_basis):
    report = verify_theorem1(petersen_basis, solve_design(petersen_basis, 3), 10)
    doc = report.to_document()
    assert doc["kind"] == "design"
    assert doc["first_violation"] is None
    assert doc["passed"] is True
    assert doc["norm_sq"] <= 1.0
