"""Independent numerical cross-checks of the closed-form spectra."""

import json
import math

import numpy as np
import pytest

from pfspectra import (
    DimensionError,
    DomainError,
    PERP_LABEL,
    SpectralWindow,
    StructureError,
    SubmanifoldSpectralData,
    TruncatedOperator,
    assemble_pf_spectrum,
    build_harmonic_block,
    build_mu_block,
    compare_spectra,
    finite_group_oracle,
    grid_l2_norm,
    group_shape_matrix,
    label_closed_form,
    label_decomposed_path,
    match_multisets,
    mu,
    mu_block_residual,
    shape_apply_raw,
    sphere_geometry,
    split_geometry,
)

COARSE_GRID = 129
COARSE_TOL = 1e-10


# ------------------------------------------------------- truncated operators


def test_mu_block_shape_and_symmetry():
    op = build_mu_block(1.0, 0.5, 10)
    assert op.matrix.shape == (21, 21)
    assert len(op.labels) == 21
    assert np.abs(op.matrix - op.matrix.T).max() == 0.0


def test_mu_block_top_eigenvalue_approaches_closed_form():
    target = mu(2.0, 1.0, 0)
    ev = build_mu_block(2.0, 1.0, 100).eigenvalues()
    best = min(abs(e - target) for e in ev)
    assert best <= 1e-2 * abs(target)


def test_mu_block_rejects_bad_arguments():
    with pytest.raises(DomainError):
        build_mu_block(-1.0, 0.0, 10)
    with pytest.raises(DomainError):
        build_mu_block(1.0, 0.0, 0)


def test_harmonic_block_is_exact():
    for nu, n in [(1.0, 1), (2.0, 3), (math.pi, 2)]:
        ev = sorted(build_harmonic_block(nu, n).eigenvalues())
        c = nu / (n * math.pi)
        np.testing.assert_allclose(ev, [-c, c], atol=1e-12)


def test_harmonic_block_rejects_bad_arguments():
    with pytest.raises(DomainError):
        build_harmonic_block(1.0, 0)
    with pytest.raises(DomainError):
        build_harmonic_block(0.0, 1)


def test_truncated_operator_validates_input():
    with pytest.raises(DimensionError):
        TruncatedOperator(("a",), np.zeros((2, 2)), 1)
    with pytest.raises(StructureError):
        TruncatedOperator(("a", "b"), np.array([[0.0, 1.0], [0.0, 0.0]]), 1)


def test_truncated_operator_json():
    op = build_harmonic_block(1.0, 1)
    doc = json.loads(json.dumps(op.to_json()))
    assert doc["cutoff"] == 1
    assert len(doc["matrix"]) == 2


def test_mu_block_residual_decreases_with_cutoff():
    r50 = mu_block_residual(1.0, 0.5, 0, 50)
    r200 = mu_block_residual(1.0, 0.5, 0, 200)
    assert r200 < r50
    assert r200 <= 1e-2


# ----------------------------------------------------------- window matching


def test_compare_spectra_passes_on_consistent_data():
    data = SubmanifoldSpectralData.sphere_like(1.0, [(0.5, 1)], 2, 0)
    spec = assemble_pf_spectrum(data)
    window = SpectralWindow(m_max=1, n_max=2, tol_abs=1e-10, tol_rel=1e-2)
    rep = compare_spectra(build_mu_block(1.0, 0.5, 200), spec, window)
    assert rep.passed
    rep = compare_spectra(build_harmonic_block(1.0, 1), spec, window)
    assert rep.passed


def test_compare_spectra_detects_wrong_lambda():
    # Relabel a lambda=0.5 block as lambda=0.9 so the predicted family exists
    # but the computed eigenvalues belong to a different operator.
    data = SubmanifoldSpectralData.sphere_like(1.0, [(0.9, 1)], 2, 0)
    spec = assemble_pf_spectrum(data)
    window = SpectralWindow(m_max=1, n_max=1, tol_abs=1e-10, tol_rel=1e-3)
    honest = build_mu_block(1.0, 0.9, 200)
    impostor = build_mu_block(1.0, 0.5, 200)
    relabeled = TruncatedOperator(honest.labels, impostor.matrix, honest.cutoff)
    rep = compare_spectra(relabeled, spec, window)
    assert not rep.passed


def test_compare_spectra_requires_matching_family():
    data = SubmanifoldSpectralData.sphere_like(2.0, [], 2, 0)
    spec = assemble_pf_spectrum(data)
    window = SpectralWindow(m_max=1, n_max=1, tol_abs=1e-10, tol_rel=1e-3)
    with pytest.raises(DomainError):
        compare_spectra(build_mu_block(1.0, 0.5, 50), spec, window)


def test_match_multisets_accounts_for_every_value():
    rep = match_multisets(np.array([0.0, 1.0, 1.0]), [(0.0, 1), (1.0, 2)], 1e-12)
    assert rep.passed
    rep = match_multisets(np.array([0.0, 1.0]), [(0.0, 1), (2.0, 1)], 1e-6)
    assert not rep.passed
    doc = rep.to_json()
    assert doc["passed"] is False


# -------------------------------------------------------------- geometries


def test_sphere_geometry_matches_requested_table():
    rng = np.random.default_rng(0)
    geo = sphere_geometry(5, [(0.7, 1), (-0.3, 2)], rng)
    data = geo.spectral_data()
    nu = data.freq_mult[0][0]
    assert nu == pytest.approx(geo.xi.norm())
    assert dict((lam, m) for _, lam, m in data.mult) == {0.7: 1, -0.3: 2}
    assert data.dim_m0 == 1  # the normal direction xi itself


def test_sphere_geometry_rejects_overfull_tangent():
    rng = np.random.default_rng(1)
    with pytest.raises(DomainError, match="exceeds"):
        sphere_geometry(4, [(0.5, 4)], rng)


def test_split_geometry_populates_kernel_blocks():
    rng = np.random.default_rng(2)
    geo = split_geometry(3, 3, rng, tangent0_lams=[0.4], block_lams=[0.9])
    data = geo.spectral_data()
    assert (0.4, 1) in data.mult0
    assert data.dim_m0 == 3  # rank of the split pair
    kinds = {lb.kind for lb in geo.fourier_labels(1)}
    assert "m_const" in kinds and "m_cos" in kinds


def test_labels_cover_both_normal_modes():
    rng = np.random.default_rng(3)
    geo = split_geometry(3, 3, rng, tangent0_lams=[0.4], block_lams=[0.9])
    modes = {lb.lam == PERP_LABEL for lb in geo.fourier_labels(1) if lb.kind == "m_cos"}
    assert modes == {True, False}


def test_tangent_projection_rejects_normal_vectors():
    rng = np.random.default_rng(4)
    geo = sphere_geometry(4, [(0.5, 1)], rng)
    with pytest.raises(DomainError, match="not tangent"):
        geo.base_shape_apply(geo.xi)


# ---------------------------------------------------- raw-formula equivalence


def test_raw_and_closed_forms_agree_on_a_coarse_grid():
    rng = np.random.default_rng(5)
    geo = sphere_geometry(4, [(0.7, 1)], rng)
    for label in geo.fourier_labels(2):
        path = label_decomposed_path(geo, label, COARSE_GRID)
        raw = shape_apply_raw(geo, path)
        closed = label_closed_form(geo, label, COARSE_GRID)
        resid = grid_l2_norm(raw - closed, geo.xi.algebra)
        assert resid <= COARSE_TOL, label.describe()


def test_decomposed_primitive_vanishes_at_endpoints():
    rng = np.random.default_rng(6)
    geo = sphere_geometry(4, [(0.7, 1)], rng)
    for label in geo.fourier_labels(2):
        path = label_decomposed_path(geo, label, 65)
        assert np.abs(path.q[0]).max() <= 1e-12
        assert np.abs(path.q[-1]).max() <= 1e-12


def test_shape_apply_raw_rejects_bad_decompositions():
    rng = np.random.default_rng(7)
    geo = sphere_geometry(4, [(0.7, 1)], rng)
    label = geo.fourier_labels(1)[0]
    path = label_decomposed_path(geo, label, 65)
    bad_q = path.q.copy()
    bad_q[0] += 1.0
    with pytest.raises(DomainError, match="vanish"):
        shape_apply_raw(geo, type(path)(bad_q, path.x, path.y))
    with pytest.raises(DomainError, match="lie in k"):
        shape_apply_raw(geo, type(path)(path.q, geo.xi, path.y))


def test_grid_l2_norm_of_plain_waves():
    rng = np.random.default_rng(8)
    geo = sphere_geometry(4, [(0.7, 1)], rng)
    alg = geo.xi.algebra
    t = np.linspace(0.0, 1.0, 2049)
    x = alg.basis_element(0)
    const = np.tile(x.coords, (t.size, 1))
    assert grid_l2_norm(const, alg) == pytest.approx(1.0, abs=1e-12)
    wave = np.sin(np.pi * t)[:, None] * x.coords[None, :]
    assert grid_l2_norm(wave, alg) == pytest.approx(1.0 / math.sqrt(2.0), abs=1e-6)


# ------------------------------------------------------------- group oracle


def test_group_shape_matrix_is_symmetric():
    rng = np.random.default_rng(9)
    geo = sphere_geometry(5, [(0.6, 2)], rng)
    mat = group_shape_matrix(geo)
    assert np.abs(mat - mat.T).max() <= 1e-12


def test_finite_group_oracle_passes_on_both_geometries():
    rng = np.random.default_rng(10)
    sphere = sphere_geometry(5, [(0.6, 1), (-0.8, 1)], rng)
    split = split_geometry(2, 3, rng, tangent0_lams=[0.3], block_lams=[-0.7])
    for geo in (sphere, split):
        rep = finite_group_oracle(geo, tol=1e-8)
        assert rep.passed
        json.dumps(rep.to_json())  # report must serialize cleanly
