import numpy as np
import pytest

from lorentzlab.moyal import (MoyalElement, ThetaMatrix, associativity_check,
                              basis_field, basis_values, center_time_check,
                              commutation_check, cross_engine_check,
                              damped_commutator_closed_form,
                              delta_algebra_check, gaussian_oracle_check,
                              gaussian_star_closed_form, involution_check,
                              moyal_grid, operator_norm, project,
                              star_matrix_basis, star_quadrature, star_twisted,
                              synthesize, trace_check, truncation_leakage)

THETA = 0.5


# ------------------------------------------------------------ Theta matrix

def test_theta_validation():
    with pytest.raises(ValueError, match="antisymmetric"):
        ThetaMatrix([[0.0, 0.5], [0.5, 0.0]])
    with pytest.raises(ValueError, match="antisymmetric"):
        ThetaMatrix([[1e-300, 0.0], [0.0, 0.0]])
    with pytest.raises(ValueError, match="square"):
        ThetaMatrix(np.zeros((2, 3)))


def test_theta_entries_frozen():
    th = ThetaMatrix.plane_block(THETA)
    with pytest.raises(ValueError):
        th.entries[0, 1] = 1.0


def test_theta_commutative_time():
    assert ThetaMatrix(np.zeros((3, 3))).commutative_time()
    assert ThetaMatrix.plane_block(THETA, 3, axes=(1, 2)).commutative_time()
    assert not ThetaMatrix.plane_block(THETA, 3, axes=(0, 1)).commutative_time()
    assert not ThetaMatrix.plane_block(THETA, 2).commutative_time()


def test_theta_from_upper_triangle():
    th = ThetaMatrix.from_upper_triangle([1.0, 2.0, 3.0], 3)
    assert th.entries[0, 1] == 1.0
    assert th.entries[0, 2] == 2.0
    assert th.entries[1, 2] == 3.0
    assert th.entries[2, 1] == -3.0
    with pytest.raises(ValueError, match="upper-triangle"):
        ThetaMatrix.from_upper_triangle([1.0], 3)


def test_theta_scalar_2d():
    assert ThetaMatrix.plane_block(0.5).scalar_2d() == 0.5
    with pytest.raises(ValueError):
        ThetaMatrix(np.zeros((3, 3))).scalar_2d()


# ----------------------------------------------------------- star engines

def test_gaussian_closed_form_twisted():
    assert gaussian_oracle_check(points=64) <= 1e-8


def test_gaussian_closed_form_quadrature():
    lat = moyal_grid(7.0, 96)
    a, b = 0.5, 0.8
    f = lambda x, y: np.exp(-a * (x * x + y * y))
    h = lambda x, y: np.exp(-b * (x * x + y * y))
    pts = [(0.0, 0.0), (0.7, -0.2), (1.3, 0.9)]
    got, info = star_quadrature(f, h, THETA, pts, lat)
    r2 = np.array([x * x + y * y for x, y in pts])
    want = gaussian_star_closed_form(a, b, THETA, r2)
    assert np.max(np.abs(got - want)) <= 1e-8
    assert info["slot"] in ("first", "second")


def test_zero_theta_is_pointwise_product():
    lat = moyal_grid(7.0, 64)
    x, y = lat.coordinate_array(0), lat.coordinate_array(1)
    fv = (1.0 + x) * np.exp(-(x * x + y * y) / 2.0)
    hv = y * np.exp(-(x * x + y * y) / 1.5)
    got, _ = star_twisted(fv, hv, lat, 0.0)
    assert np.max(np.abs(got.values - fv * hv)) <= 1e-13


def test_slot_mirror_consistency():
    lat = moyal_grid(7.0, 96)
    f = lambda x, y: x * np.exp(-(x * x + y * y) / 2.0)
    h = lambda x, y: (1.0 - y) * np.exp(-(x * x + y * y) / 3.0)
    pts = [(0.2, 0.1), (-0.5, 0.8)]
    first, _ = star_quadrature(f, h, THETA, pts, lat, slot="first")
    second, _ = star_quadrature(f, h, THETA, pts, lat, slot="second")
    assert np.max(np.abs(first - second)) <= 1e-8


def test_quadrature_refuses_undamped_factor():
    lat = moyal_grid(7.0, 48)
    f = lambda x, y: np.cos(x) + 0 * y
    h = lambda x, y: np.sin(y) + 0 * x
    with pytest.raises(ValueError, match="decay"):
        star_quadrature(f, h, THETA, [(0.0, 0.0)], lat)


def test_quadrature_slot_needs_callable_shift():
    lat = moyal_grid(7.0, 48)
    x, y = lat.coordinate_array(0), lat.coordinate_array(1)
    fv = np.exp(-(x * x + y * y))         # samples only: cannot be shifted
    h = lambda x, y: np.exp(-(x * x + y * y) / 2.0)
    with pytest.raises(ValueError, match="callable"):
        star_quadrature(fv, h, THETA, [(0.0, 0.0)], lat, slot="second")


def test_twisted_needs_2d_periodic():
    with pytest.raises(ValueError, match="2-d periodic"):
        star_twisted(np.zeros((8, 8, 8)), np.zeros((8, 8, 8)),
                     moyal_grid(5.0, 8, dimension=3), THETA)


def test_twisted_warns_on_nyquist_content():
    lat = moyal_grid(3.0, 16)
    rng = np.random.default_rng(0)
    noisy = rng.standard_normal(lat.shape)
    smooth = np.exp(-(lat.coordinate_array(0) ** 2
                      + lat.coordinate_array(1) ** 2))
    with pytest.warns(RuntimeWarning, match="Nyquist"):
        star_twisted(noisy, smooth, lat, THETA)


# ----------------------------------------------------------- matrix basis

def test_ground_state_profile():
    lat = moyal_grid(7.0, 64)
    x, y = lat.coordinate_array(0), lat.coordinate_array(1)
    f00 = basis_values(0, 0, THETA, x, y)
    want = 2.0 * np.exp(-(x * x + y * y) / THETA)
    assert np.max(np.abs(f00 - want)) <= 1e-13


def test_basis_conjugate_symmetry():
    lat = moyal_grid(7.0, 48)
    x, y = lat.coordinate_array(0), lat.coordinate_array(1)
    a = basis_values(2, 5, THETA, x, y)
    b = basis_values(5, 2, THETA, x, y)
    assert np.max(np.abs(a - np.conj(b))) <= 1e-12


def test_delta_algebra():
    rep = delta_algebra_check(truncation=8)
    assert rep.projection_residual <= 1e-10
    assert rep.product_residual <= 1e-10
    assert rep.identity_residual <= 1e-10
    assert rep.norm_ground_residual <= 1e-6
    assert rep.passed


def test_ground_projector_idempotent():
    lat = moyal_grid(7.0, 96)
    c = project(basis_field(0, 0, THETA, lat), lat, THETA, truncation=6)
    e00 = np.zeros((6, 6), dtype=complex)
    e00[0, 0] = 1.0
    assert np.max(np.abs(c - e00)) <= 1e-10
    sq = star_matrix_basis(c, c)
    assert np.max(np.abs(sq - c)) <= 1e-10
    assert abs(operator_norm(c) - 1.0) <= 1e-10


def test_project_synthesize_round_trip():
    rng = np.random.default_rng(2)
    coeffs = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    lat = moyal_grid(7.0, 96)
    fn = synthesize(coeffs, THETA)
    vals = fn(lat.coordinate_array(0), lat.coordinate_array(1))
    back = project(vals, lat, THETA, truncation=4)
    assert np.max(np.abs(back - coeffs)) <= 1e-8


def test_truncation_leakage():
    c = np.zeros((5, 5))
    c[0, 0] = 1.0
    assert truncation_leakage(c) == 0.0
    c[-1, -1] = 2.0
    assert truncation_leakage(c) > 0.5


# ----------------------------------------------------------------- checks

def test_cross_engine_agreement():
    rep = cross_engine_check(truncation=8, points=64)
    assert rep.quadrature_vs_basis <= 1e-4
    assert rep.twisted_vs_basis <= 1e-4
    assert rep.passed


def test_coordinate_commutator():
    rep = commutation_check()
    assert rep.residual <= 1e-6
    assert abs(rep.extrapolated_imag - THETA) <= 1e-6
    assert max(rep.closed_form_residuals) <= 1e-8
    # each damped value matches its own closed form
    for sig, raw in zip(rep.sigmas, rep.raw_imag):
        want = damped_commutator_closed_form(THETA, sig).imag
        assert abs(raw - want) <= 1e-8
    assert rep.passed


def test_center_time_verdicts():
    rep = center_time_check(points=24)
    assert rep.passed
    names = [c["theta_case"] for c in rep.cases]
    assert names == ["zero", "spatial_block", "time_space_block"]
    assert rep.cases[0]["commutative_time"]
    assert rep.cases[1]["commutative_time"]
    assert not rep.cases[2]["commutative_time"]
    assert rep.cases[0]["commutator_residual"] <= 1e-10
    assert rep.cases[1]["commutator_residual"] <= 1e-10
    assert rep.cases[2]["commutator_residual"] >= 1e-3


def test_trace_property():
    assert trace_check(points=64) <= 1e-5


def test_associativity():
    assert associativity_check() <= 1e-5


def test_involution():
    assert involution_check() <= 1e-8


# ----------------------------------------------------------------- symbols

def test_moyal_element_kinds():
    lat = moyal_grid(5.0, 32)
    e = MoyalElement.from_expression("exp(-(x^2 + y^2)/2)")
    assert e.membership == "assumed"
    assert e.to_dict()["membership"] == "assumed"
    vals = e.sample(lat)
    assert vals.shape == lat.shape

    rng = np.random.default_rng(4)
    coeffs = np.zeros((3, 3), dtype=complex)
    coeffs[0, 0] = 1.0
    ec = MoyalElement.from_coefficients(coeffs, THETA)
    x, y = lat.coordinate_array(0), lat.coordinate_array(1)
    assert np.max(np.abs(ec.sample(lat)
                         - basis_values(0, 0, THETA, x, y))) <= 1e-12

    fn = MoyalElement.from_callable(lambda x, y: x + y)
    assert fn.sample(lat).shape == lat.shape
