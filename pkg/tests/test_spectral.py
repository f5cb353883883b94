"""Tests for the Gaussian-weighted spectral tooling."""

from __future__ import annotations

import math

import numpy as np
import pytest

from ovalflow import spectral as sp

SQRT_PI = math.sqrt(math.pi)


def default_f(values):
    xi = sp.gauss_grid()
    return sp.GaussFunction(xi_grid=xi, values=values(xi) if callable(values) else values)


def test_moment_selftest():
    for row in sp.moment_selftest():
        assert row["rel_err"] < 1e-10, row


def test_mode_orthogonality():
    xi = sp.gauss_grid()
    modes = [np.ones_like(xi), xi, xi * xi - 2.0]
    norms = [2.0 * SQRT_PI, 4.0 * SQRT_PI, 16.0 * SQRT_PI]
    for i in range(3):
        for j in range(3):
            val = sp.gauss_inner(default_f(modes[i]), default_f(modes[j]))
            target = norms[i] if i == j else 0.0
            assert abs(val - target) < 1e-10


def test_eigenrelations():
    xi = sp.gauss_grid()
    for vals, lam in [(np.ones_like(xi), 1.0), (xi, 0.5), (xi * xi - 2.0, 0.0)]:
        f = sp.GaussFunction(xi_grid=xi, values=vals)
        defect = np.max(np.abs(sp.apply_drift_L(f).values - lam * vals))
        assert defect < 1e-4


def test_drift_symmetry_compact_support():
    xi = sp.gauss_grid()

    def bump(c, w):
        v = np.zeros_like(xi)
        m = np.abs(xi - c) < w
        v[m] = np.exp(-1.0 / (1.0 - ((xi[m] - c) / w) ** 2))
        return v

    f = default_f(bump(1.0, 2.0))
    g = default_f(bump(-0.5, 1.5))
    lhs = sp.gauss_inner(sp.apply_drift_L(f), g)
    rhs = sp.gauss_inner(f, sp.apply_drift_L(g))
    assert abs(lhs - rhs) < 1e-5


def test_neutral_mode_projection():
    f = default_f(lambda xi: xi * xi - 2.0)
    c = sp.project_modes(f)
    assert abs(c.a - 1.0 / math.sqrt(2.0)) < 1e-12
    assert abs(c.c0) < 1e-12 and abs(c.c1) < 1e-12
    assert c.remainder_norm_H < 1e-10


def test_projection_idempotent_and_reconstruction():
    rng = np.random.default_rng(7)
    xi = sp.gauss_grid()
    for _ in range(5):
        c0, c1, a = rng.uniform(-2.0, 2.0, size=3)
        f = default_f(c0 + c1 * xi + math.sqrt(2.0) * a * (xi * xi - 2.0))
        c = sp.project_modes(f)
        assert abs(c.c0 - c0) < 1e-10 and abs(c.c1 - c1) < 1e-10 and abs(c.a - a) < 1e-10
        assert c.remainder_norm_H < 1e-9
        again = sp.project_modes(default_f(sp.reconstruct(c, xi)))
        assert abs(again.c0 - c.c0) < 1e-10
        assert abs(again.c1 - c.c1) < 1e-10
        assert abs(again.a - c.a) < 1e-10


def test_projection_recovers_coeffs_with_remainder():
    rng = np.random.default_rng(11)
    xi = sp.gauss_grid()
    # remainder orthogonal to all three modes: a bump symmetrized against them
    bump = np.exp(-((xi - 0.8) ** 2))
    b = sp.GaussFunction(xi_grid=xi, values=bump)
    cb = sp.project_modes(b)
    rem = bump - sp.reconstruct(cb, xi)
    for _ in range(5):
        c0, c1, a, s = rng.uniform(-1.0, 1.0, size=4)
        f = default_f(c0 + c1 * xi + math.sqrt(2.0) * a * (xi * xi - 2.0) + s * rem)
        c = sp.project_modes(f)
        assert abs(c.c0 - c0) < 1e-9 and abs(c.c1 - c1) < 1e-9 and abs(c.a - a) < 1e-9
        rem_norm = math.sqrt(sp.gauss_inner(sp.GaussFunction(xi_grid=xi, values=rem),
                                            sp.GaussFunction(xi_grid=xi, values=rem)))
        assert abs(c.remainder_norm_H - abs(s) * rem_norm) < 1e-8


def test_truncation_doubling_stable():
    # doubling X changes nothing above 1e-10 for a decaying profile
    for x_max in (30.0, 60.0):
        xi = sp.gauss_grid(x_max=x_max)
        f = sp.GaussFunction(xi_grid=xi, values=np.exp(-(xi**2) / 8.0) * (xi**2 - 1.0))
        c = sp.project_modes(f)
        if x_max == 30.0:
            base = c
    assert abs(c.c0 - base.c0) < 1e-10
    assert abs(c.c1 - base.c1) < 1e-10
    assert abs(c.a - base.a) < 1e-10


def test_gauss_function_validation():
    with pytest.raises(ValueError):
        sp.GaussFunction(xi_grid=np.linspace(0.0, 1.0, 11), values=np.zeros(11))
    xi = sp.gauss_grid(5.0, 0.1)
    f = sp.GaussFunction(xi_grid=xi, values=np.ones_like(xi))
    g = sp.GaussFunction(xi_grid=sp.gauss_grid(5.0, 0.05), values=np.ones(201))
    with pytest.raises(ValueError, match="grid"):
        sp.gauss_inner(f, g)
    # heavy tail on a short grid trips the truncation guard
    with pytest.raises(ValueError, match="tail"):
        sp.require_truncated(f)


def test_halfline_bound_family():
    rng = np.random.default_rng(314)
    xi = np.linspace(0.0, 30.0, 6001)
    family = sp.random_halfline_family(rng, 100, xi)
    for fv in family:
        lhs, rhs, ok = sp.halfline_bound_check(xi, fv)
        assert ok, (lhs, rhs)
        if rhs > 0:
            assert lhs < rhs  # strict for compactly supported f


def test_halfline_sharpness():
    # f = 1: both sides equal 2 sqrt(pi); the constant 2 cannot be improved
    xi = np.linspace(0.0, 30.0, 6001)
    lhs, rhs, ok = sp.halfline_bound_check(xi, np.ones_like(xi))
    assert ok
    assert abs(lhs / rhs - 1.0) < 1e-9


def test_halfline_step_example():
    xi = np.linspace(0.0, 30.0, 6001)
    fv = np.where(xi <= 4.0, 1.0, 0.0)
    lhs, rhs, ok = sp.halfline_bound_check(xi, fv)
    assert ok and lhs < rhs


def test_halfline_grid_must_start_at_zero():
    xi = np.linspace(1.0, 30.0, 100)
    with pytest.raises(ValueError):
        sp.halfline_bound_check(xi, np.ones_like(xi))


@pytest.mark.parametrize("annulus", [(4.0, 5.0, 7.0), (4.5, 6.0, 9.0), (5.0, 5.5, 8.0)])
def test_cyl_poincare_family(annulus):
    L1, L2, L3 = annulus
    rng = np.random.default_rng(2718)
    xi = np.linspace(0.0, 12.0, 2401)
    for fv in sp.random_annulus_family(rng, 60, xi, L1, L2, L3):
        lhs, rhs, ok = sp.cylindrical_poincare_check(xi, fv, L1, L2, L3)
        assert ok, (annulus, lhs, rhs)


def test_cyl_poincare_constant_function():
    # f with no cutoff structure at all: the (L2-L1)^{-2} term carries it
    xi = np.linspace(0.0, 12.0, 2401)
    lhs, rhs, ok = sp.cylindrical_poincare_check(xi, np.ones_like(xi), 4.0, 5.0, 7.0)
    assert ok and rhs > 0


def test_cyl_poincare_argument_errors():
    xi = np.linspace(0.0, 12.0, 2401)
    f = np.ones_like(xi)
    for bad in [(3.0, 5.0, 7.0), (5.0, 5.0, 7.0), (5.0, 7.0, 6.0)]:
        with pytest.raises(ValueError):
            sp.cylindrical_poincare_check(xi, f, *bad)
    with pytest.raises(ValueError):
        sp.cylindrical_poincare_check(np.linspace(0.0, 10.0, 100), f[:100], 4.0, 5.0, 11.0)


def test_window_norms_constant_series():
    xi = sp.gauss_grid(20.0, 0.02)
    taus = np.arange(-3.0, 0.0001, 0.05)
    series = [sp.GaussFunction(xi_grid=xi, values=np.exp(-(xi**2) / 8.0)) for _ in taus]
    # ||f||_H^2 for e^{-xi^2/8}: int e^{-xi^2/4} e^{-xi^2/4} = sqrt(2 pi)
    out = sp.window_norms(taus, series, 0.0)
    assert abs(out["H_window_sup"] - math.sqrt(2.0 * math.pi)) < 1e-6
    assert out["D_window_sup"] > out["H_window_sup"]


def test_window_norms_growing_series():
    xi = sp.gauss_grid(20.0, 0.02)
    taus = np.arange(-2.0, 0.0001, 0.05)
    series = [
        sp.GaussFunction(xi_grid=xi, values=math.exp(t) * np.exp(-(xi**2) / 8.0)) for t in taus
    ]
    out = sp.window_norms(taus, series, 0.0)
    expected = math.sqrt(2.0 * math.pi) * (1.0 - math.exp(-2.0)) / 2.0
    assert abs(out["H_window_sup"] - expected) / expected < 1e-2


def test_window_norms_errors():
    xi = sp.gauss_grid(20.0, 0.02)
    mk = lambda: sp.GaussFunction(xi_grid=xi, values=np.exp(-(xi**2) / 8.0))
    with pytest.raises(ValueError, match="window"):
        sp.window_norms(np.array([-0.1, -0.05, 0.0]), [mk(), mk(), mk()], 0.0)
    with pytest.raises(ValueError, match="uniform"):
        sp.window_norms(np.array([-2.0, -1.5, -0.7]), [mk(), mk(), mk()], 0.0)
    with pytest.raises(ValueError, match="spacing"):
        taus = np.arange(-3.0, 0.1, 0.5)
        sp.window_norms(taus, [mk() for _ in taus], 0.0)
