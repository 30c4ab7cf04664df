"""Quadrature with design measures, seeded test functions, tailored designs."""

from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from design import solve_design, verify_design
from graph_core import DimensionMismatchError
from graph_generators import generate
from sampling import (
    BandIndexError,
    graph_function,
    make_test_function,
    quadrature,
    sample_batch,
    tailored_design_for,
)
from spectral import decompose


def sampling_ells(n: int) -> list[int]:
    return sorted({2, math.ceil(n / 4), math.ceil(n / 2)})


def test_constant_function_is_integrated_exactly(petersen_basis):
    design = solve_design(petersen_basis, 4)
    report = quadrature(petersen_basis, design, graph_function(petersen_basis, np.full(10, 3.5)))
    assert report.error <= 1e-14
    assert math.isclose(report.mean, 3.5)
    assert report.passed


def test_next_eigenvector_realizes_unit_bound(petersen_basis):
    ell = 5
    design = solve_design(petersen_basis, ell)
    phi = petersen_basis.phi(ell + 1)
    report = quadrature(petersen_basis, design, graph_function(petersen_basis, phi))
    assert abs(report.mean) <= 1e-12
    assert math.isclose(report.bound, 1.0, abs_tol=1e-9)
    assert math.isclose(report.error, abs(float(phi @ design.as_vector())), abs_tol=1e-12)
    assert report.error <= 1.0
    assert report.passed


@settings(max_examples=30, deadline=None)
@given(st.integers(min_value=0, max_value=2**32 - 1), st.integers(min_value=2, max_value=9))
def test_band_limited_functions_are_exact(seed, ell):
    basis = decompose(generate("petersen"))
    design = solve_design(basis, ell)
    f = make_test_function(basis, "low_pass", band=ell, seed=seed)
    report = quadrature(basis, design, f)
    assert report.error <= 1e-9
    assert report.bound <= 1e-9


def test_quadrature_bound_over_regular_corpus(corpus_designs):
    for basis, designs in corpus_designs:
        for ell in sampling_ells(basis.n):
            design = designs[ell]
            functions = [make_test_function(basis, "random", seed=s) for s in range(100)]
            batch = sample_batch(basis, design, functions)
            assert batch.passed, [r.to_document() for r in batch.reports if not r.passed][:1]
            band = make_test_function(basis, "low_pass", band=ell, seed=ell)
            assert quadrature(basis, design, band).error <= 1e-9
            for r in batch.reports:
                assert r.identity_gap <= 1e-10
                # Cauchy-Schwarz step with ||w||_2 <= 1
                assert abs(r.identity_error) <= r.bound * math.sqrt(design.l2_norm_sq) + 1e-12


def test_quadrature_bound_laplacian(laplacian_bases):
    for basis in laplacian_bases:
        for ell in sampling_ells(basis.n):
            design = solve_design(basis, ell)
            assert verify_design(basis, design).passed
            functions = [make_test_function(basis, "random", seed=s) for s in range(100)]
            assert sample_batch(basis, design, functions).passed
            band = make_test_function(basis, "low_pass", band=ell, seed=1)
            assert quadrature(basis, design, band).error <= 1e-9


def test_parseval_holds(petersen_basis):
    f = make_test_function(petersen_basis, "random", seed=9)
    assert f.parseval_gap <= 1e-9
    assert f.provenance == {"kind": "random", "generator": "numpy.PCG64", "seed": 9}


def test_low_pass_band_one_is_constant(petersen_basis):
    f = make_test_function(petersen_basis, "low_pass", band=1, seed=4)
    assert np.ptp(f.values) <= 1e-12


def test_high_pass_has_all_energy_above_band(petersen_basis):
    ell = 5
    design = solve_design(petersen_basis, ell)
    f = make_test_function(petersen_basis, "high_pass", band=ell, seed=2)
    assert np.allclose(f.coefficients[:ell], 0.0, atol=1e-12)
    report = quadrature(petersen_basis, design, f)
    assert math.isclose(report.high_freq_energy_fraction, 1.0, abs_tol=1e-9)
    assert math.isclose(report.error, abs(report.identity_error), abs_tol=1e-10)
    assert report.error <= report.bound + 1e-9


def test_indicator_coefficients_are_eigenvector_entries(petersen_basis):
    f = make_test_function(petersen_basis, "indicator", vertices=[7])
    assert np.allclose(f.coefficients, petersen_basis.vectors[:, 7], atol=1e-15)


def test_test_functions_are_seeded(petersen_basis):
    a = make_test_function(petersen_basis, "high_pass", band=3, seed=5)
    b = make_test_function(petersen_basis, "high_pass", band=3, seed=5)
    c = make_test_function(petersen_basis, "high_pass", band=3, seed=6)
    assert np.array_equal(a.values, b.values)
    assert not np.array_equal(a.values, c.values)


@pytest.mark.parametrize(
    ("kind", "kwargs", "message"),
    [
        ("low_pass", {"band": 0}, "band must lie in 1..10"),
        ("low_pass", {"band": 11}, "band must lie in 1..10"),
        ("high_pass", {"band": 10}, "band must lie in 0..9"),
        ("low_pass", {}, "needs a band"),
        ("indicator", {"vertices": [10]}, "0..9"),
        ("indicator", {"vertices": []}, "at least one vertex"),
    ],
)
def test_invalid_band_index(petersen_basis, kind, kwargs, message):
    with pytest.raises(BandIndexError, match=message):
        make_test_function(petersen_basis, kind, **kwargs)


def test_unknown_function_kind(petersen_basis):
    with pytest.raises(ValueError, match="unknown function kind"):
        make_test_function(petersen_basis, "sawtooth")


def test_dimension_mismatch(petersen_basis, c4_basis):
    design = solve_design(c4_basis, 2)
    f = make_test_function(petersen_basis, "random", seed=0)
    with pytest.raises(DimensionMismatchError):
        quadrature(petersen_basis, design, f)
    with pytest.raises(DimensionMismatchError):
        graph_function(petersen_basis, np.ones(4))


def test_batch_is_identical_across_worker_counts(petersen_basis):
    design = solve_design(petersen_basis, 3)
    functions = [make_test_function(petersen_basis, "random", seed=s) for s in range(20)]
    serial = sample_batch(petersen_basis, design, functions)
    threaded = sample_batch(petersen_basis, design, functions, jobs=4)
    assert serial.rows() == threaded.rows()
    assert serial.to_document()["count"] == 20


def test_tailored_identity_band_matches_default(petersen_basis):
    default = solve_design(petersen_basis, 4)
    tailored = tailored_design_for(petersen_basis, [2, 3, 4])
    assert tailored.support == default.support
    assert tailored.weights == default.weights
    assert tailored.annihilated == (2, 3, 4)


def test_tailored_petersen_third_eigenspace(petersen_basis):
    band = [6, 7, 8, 9, 10]
    design = tailored_design_for(petersen_basis, band)
    assert design.ell == 6
    assert len(design.support) <= 6
    coeffs = petersen_basis.coefficients(design.as_vector())
    assert np.all(np.abs(coeffs[5:]) <= 1e-9)
    assert verify_design(petersen_basis, design).passed
    f = graph_function(petersen_basis, petersen_basis.vectors[5:].sum(axis=0))
    assert quadrature(petersen_basis, design, f).error <= 1e-9


def test_tailored_highest_frequency_only(regular_corpus):
    basis = regular_corpus[0]
    n = basis.n
    design = tailored_design_for(basis, [n])
    assert design.annihilated == (n,)
    assert len(design.support) <= 2
    assert abs(float(basis.phi(n) @ design.as_vector())) <= 1e-9


@pytest.mark.parametrize(
    ("freqs", "message"),
    [
        ([1, 3], "2..10"),
        ([3, 3], "distinct"),
        ([], "at least one"),
        (list(range(2, 11)), "n-1"),
    ],
)
def test_tailored_rejects_bad_frequencies(petersen_basis, freqs, message):
    with pytest.raises(BandIndexError, match=message):
        tailored_design_for(petersen_basis, freqs)


def test_report_document(petersen_basis):
    design = solve_design(petersen_basis, 5)
    f = make_test_function(petersen_basis, "random", seed=3)
    doc = quadrature(petersen_basis, design, f).to_document()
    assert doc["label"] == "random-3"
    assert doc["provenance"]["generator"] == "numpy.PCG64"
    assert set(doc) >= {"error", "bound", "ratio", "high_freq_energy_fraction", "identity_gap"}
