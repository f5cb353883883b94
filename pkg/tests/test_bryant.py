"""Tests for the steady rotationally symmetric soliton profile.

Reference values marked "independent oracle" were computed with mpmath
(dps=30, ODE tolerance 1e-25, series seed at r0=1e-3) in a throwaway script
and frozen here; the module under test uses an entirely different integrator.
"""

from __future__ import annotations

import numpy as np
import pytest

from ovalflow import bryant

# independent oracle values (mpmath, 30 digits)
PHI_ORACLES = [
    (0.3, 0.98508980701446281458),
    (1.0, 0.84417796771600995419),
    (2.0, 0.49372480819421569297),
]
PHI20_TIMES_400 = 1.0050637179605834721
CHI_AT_20 = 0.99246179409315613094
BSTAR = 2.3195409394259665387  # root of r Phi' + 2 Phi


def test_axis_and_bounds(phi_table):
    rep = bryant.table_report(phi_table)
    assert rep["phi_axis_exact"]
    assert rep["phi_in_unit_interval"]
    assert rep["monotone_decreasing"]


@pytest.mark.parametrize("r,expected", PHI_ORACLES)
def test_phi_frozen_oracles(phi_table, r, expected):
    assert abs(bryant.phi_at(phi_table, r) - expected) < 1e-9


def test_phi_far_oracle(phi_table):
    assert abs(400.0 * bryant.phi_at(phi_table, 20.0) - PHI20_TIMES_400) < 1e-8


def test_near_field_series(phi_table):
    r = np.linspace(0.0, 0.5, 251)
    phi = bryant.phi_at(phi_table, r)
    defect = np.abs(phi - (1.0 - r * r / 6.0))
    assert np.all(defect <= 1e-3)
    # the true quartic coefficient is 1/90; allow it plus slack
    envelope = (1.0 / 90.0 + 1e-3) * r**4
    assert np.all(defect <= envelope + 1e-15)
    # full four-term series is accurate to the next (r^8) order on r <= 0.3
    r = np.linspace(0.0, 0.3, 151)
    phi = bryant.phi_at(phi_table, r)
    series = 1.0 - r**2 / 6.0 + r**4 / 90.0 - r**6 / 3780.0
    assert np.max(np.abs(phi - series)) < 1e-8


def test_far_field_law(phi_table):
    r = np.linspace(20.0, 50.0, 61)
    phi = bryant.phi_at(phi_table, r)
    defect = np.abs(r * r * phi - (1.0 + 2.0 / r**2))
    assert np.all(defect <= 15.0 / r**4)
    # beyond the table the same law is used for evaluation
    assert abs(bryant.phi_at(phi_table, 80.0) - (1.0 + 2.0 / 6400.0) / 6400.0) < 1e-12


def test_equation_residual(phi_table):
    rep = bryant.table_report(phi_table)
    assert rep["max_residual"] < 1e-6
    assert rep["max_residual"] <= rep["residual_bound"]


def test_chi_properties(phi_table):
    assert abs(bryant.eval_chi(phi_table, 1e-8) - 1.0 / 6.0) < 1e-14
    assert abs(bryant.eval_chi(phi_table, 20.0) - CHI_AT_20) < 1e-8
    rep = bryant.table_report(phi_table)
    assert abs(rep["k_phi"] - 6.0) < 1e-12
    assert rep["chi_max"] < 1.0
    # chi increases from 1/6 toward 1
    r = np.linspace(0.1, 49.0, 200)
    chi = np.array([bryant.eval_chi(phi_table, ri) for ri in r])
    assert np.all(np.diff(chi) > 0.0)
    assert np.all(chi >= 1.0 / 6.0 - 1e-12) and np.all(chi < 1.0)


def test_concavity_threshold(phi_table):
    bstar = bryant.concavity_threshold(phi_table)
    assert abs(bstar - BSTAR) < 1e-8
    # g = r Phi' + 2 Phi changes sign exactly there
    g = lambda r: r * bryant.phi_prime_at(phi_table, r) + 2.0 * bryant.phi_at(phi_table, r)
    assert g(1.0) > 0.0 and g(2.0) > 0.0
    assert g(bstar - 1e-3) > 0.0 > g(bstar + 1e-3)


def test_concavity_threshold_needs_range():
    small = bryant.solve_phi(r_max=2.0, dr=1e-3)
    with pytest.raises(ValueError, match="extend"):
        bryant.concavity_threshold(small)


def test_arc_length_curve(phi_table, b_curve):
    assert b_curve.b[0] == 0.0
    # five-term odd series near the origin (coefficients -1/36 and 29/21600)
    z = 0.1
    series = z - z**3 / 36.0 + (29.0 / 21600.0) * z**5
    assert abs(bryant.b_at(b_curve, z) - series) < 1e-9
    # parabolic growth: B(z)^2 / (2 z) -> 1
    b50 = bryant.b_at(b_curve, 50.0)
    assert 0.9 <= b50**2 / 100.0 <= 1.1
    assert abs(b50 * np.sqrt(bryant.phi_at(phi_table, b50)) - 1.0) < 0.05
    # slope field consistency on the stored grid
    resampled = np.sqrt(bryant.phi_at(phi_table, b_curve.b))
    assert np.max(np.abs(b_curve.b_prime - resampled)) < 1e-12


def test_b_squared_second_derivative(phi_table, b_curve):
    # (B^2)'' = B Phi'(B) + 2 Phi(B), by second differences on the grid
    z = b_curve.z_grid
    dz = z[1] - z[0]
    b2 = b_curve.b**2
    d2 = (b2[2:] - 2.0 * b2[1:-1] + b2[:-2]) / dz**2
    rhs = b_curve.b * bryant.phi_prime_at(phi_table, b_curve.b) + 2.0 * bryant.phi_at(
        phi_table, b_curve.b
    )
    assert np.max(np.abs(d2 - rhs[1:-1])) < 5e-4


def test_inverse_roundtrip(b_curve):
    z_pts = np.array([0.3141, 1.718, 7.777, 42.0])
    back = np.array([bryant.z_of_b(b_curve, bryant.b_at(b_curve, z)) for z in z_pts])
    assert np.max(np.abs(back - z_pts)) < 1e-6


def test_range_errors(phi_table, b_curve):
    with pytest.raises(ValueError):
        bryant.phi_at(phi_table, -0.5)
    with pytest.raises(ValueError):
        bryant.eval_chi(phi_table, 51.0)
    with pytest.raises(ValueError):
        bryant.b_at(b_curve, 61.0)
    with pytest.raises(ValueError):
        bryant.z_of_b(b_curve, bryant.b_at(b_curve, 60.0) + 1.0)
    with pytest.raises(ValueError):
        bryant.solve_phi(r_max=50.0, dr=0.0)
    with pytest.raises(ValueError):
        bryant.solve_phi(r_max=0.5, dr=1e-3)


def test_cross_resolution_consistency(phi_table):
    coarse = bryant.solve_phi(r_max=10.0, dr=2e-3)
    for r in (0.7, 2.5, 8.0):
        assert abs(bryant.phi_at(coarse, r) - bryant.phi_at(phi_table, r)) < 1e-8


def test_table_csv_roundtrip(tmp_path, phi_table):
    path = tmp_path / "phi.csv"
    bryant.save_phi_table(phi_table, path)
    loaded = bryant.load_phi_table(path)
    assert np.array_equal(loaded.r_grid, phi_table.r_grid)
    assert np.array_equal(loaded.phi, phi_table.phi)
    assert np.array_equal(loaded.phi_prime, phi_table.phi_prime)
    # deterministic bytes
    path2 = tmp_path / "phi2.csv"
    bryant.save_phi_table(phi_table, path2)
    assert path.read_bytes() == path2.read_bytes()


def test_table_csv_malformed(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("# r,phi,phi_prime\n0.0 1.0\n")
    with pytest.raises(ValueError):
        bryant.load_phi_table(path)
