"""Direct-pipeline tests: region integrals, both coefficient densities."""

import math

import numpy as np
import pytest

from weylsys import (
    CosphereQuadrature,
    SymbolField,
    first_weyl,
    projection_form_check,
    region_integral,
    second_weyl,
    weyl_coefficients,
)
from weylsys.errors import NotElliptic

SIGMA1 = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA2 = np.array([[0, -1j], [1j, 0]], dtype=complex)

TWO_PI = 2.0 * math.pi
X0 = np.array([0.4, 1.1])


def planar_spin_field(scale1=1.0, scale2=1.0):
    return SymbolField(
        2, 1,
        lambda x, xi: SIGMA1 * scale1 * xi[0] + SIGMA2 * scale2 * xi[1],
    )


def test_quadrature_validation():
    with pytest.raises(ValueError):
        CosphereQuadrature(n_angles=15)
    with pytest.raises(ValueError):
        CosphereQuadrature(n_angles=8)


def test_sphere_rule_integrates_constants():
    quad = CosphereQuadrature(n_angles=64, n_polar=24)
    for n, surface in ((2, TWO_PI), (3, 4.0 * math.pi)):
        omega, weights = quad.nodes(n)
        assert abs(np.sum(weights) - surface) < 1e-12
        np.testing.assert_allclose(np.linalg.norm(omega, axis=1), 1.0, atol=1e-14)


# ---------------------------------------------------------------------------
# region_integral
# ---------------------------------------------------------------------------

def test_unit_disk_area():
    f = planar_spin_field()
    val = region_integral(f, X0, 1, lambda p: 1.0, CosphereQuadrature())
    assert abs(val - math.pi) < 1e-12


def test_ellipse_area():
    # |h| = sqrt(xi1^2 + 4 xi2^2): the sublevel set is an ellipse with
    # semi-axes 1 and 1/2, area pi/2 (analytic oracle)
    f = planar_spin_field(1.0, 2.0)
    val = region_integral(f, X0, 1, lambda p: 1.0, CosphereQuadrature())
    assert abs(val - math.pi / 2.0) < 1e-12


def test_odd_integrand_vanishes():
    f = planar_spin_field()
    val = region_integral(
        f, X0, 1, lambda p: p.xi[0] / np.linalg.norm(p.xi), CosphereQuadrature()
    )
    assert abs(val) < 1e-13


def test_region_integral_negative_sheet():
    f = planar_spin_field()
    val = region_integral(f, X0, -1, lambda p: 1.0, CosphereQuadrature())
    assert abs(val - math.pi) < 1e-12


# ---------------------------------------------------------------------------
# first coefficient
# ---------------------------------------------------------------------------

def test_first_weyl_planar_spin():
    assert abs(first_weyl(planar_spin_field(), X0) - 1.0 / TWO_PI) < 1e-13


def test_first_weyl_negative_definite_is_zero():
    f = SymbolField(
        2, 1, lambda x, xi: -np.linalg.norm(xi) * np.diag([1.0, 2.0]).astype(complex)
    )
    assert first_weyl(f, X0) == 0.0


def test_first_weyl_anisotropic():
    f = planar_spin_field(1.0, 2.0)
    assert abs(first_weyl(f, X0) - 1.0 / (4.0 * math.pi)) < 1e-13


def test_first_weyl_scaling(twisted_model):
    # A -> c A shrinks the sublevel region by c per axis: a1 scales by c^-n
    lead, _ = twisted_model.symbol_fields()
    base = first_weyl(lead, X0)
    for c in (0.5, 2.0):
        scaled = SymbolField(2, 1, lambda x, xi, c=c: c * lead.evaluator(x, xi))
        val = first_weyl(scaled, X0)
        assert abs(val - base / c ** 2) < 1e-12 * base


# ---------------------------------------------------------------------------
# second coefficient
# ---------------------------------------------------------------------------

def test_constant_symbol_second_vanishes():
    res = second_weyl(planar_spin_field(), None, X0)
    assert abs(res.value) < 1e-12


def lattice_second_coefficient(beta, lam_max=120.0):
    """Brute-force lattice oracle for the shifted planar-spin system.

    Counts +-|k| + beta below lam on the integer lattice and fits the
    smoothed count N(lam) ~ pi (lam - beta)^2 / (2 pi)^2, whose derivative
    carries the second coefficient -beta/(2 pi).
    """
    kmax = int(lam_max) + 2
    ks = np.arange(-kmax, kmax + 1)
    k1, k2 = np.meshgrid(ks, ks, indexing="ij")
    norms = np.hypot(k1, k2).ravel()
    lams = np.arange(40.0, lam_max, 0.5)
    counts = np.array([np.sum(norms + beta < lam) for lam in lams]) / TWO_PI ** 2
    design = np.stack([lams ** 2, lams, np.ones_like(lams)], axis=1)
    coef, *_ = np.linalg.lstsq(design, counts, rcond=None)
    # N ~ (a1/2) lam^2 + a0 lam + ...
    return 2.0 * coef[0], coef[1]


def test_shifted_planar_spin_second_coefficient():
    beta = 0.3
    f = planar_spin_field()
    sub = SymbolField(2, 0, lambda x, xi: beta * np.eye(2, dtype=complex))
    res = second_weyl(f, sub, X0)
    want = -beta / TWO_PI
    assert abs(res.value - want) < 1e-12
    # independent brute-force lattice count; the raw staircase fit carries
    # O(lam^1/2) number-theoretic fluctuation, so ask for ~10% only
    a1_lat, a0_lat = lattice_second_coefficient(beta)
    assert abs(a1_lat - 1.0 / TWO_PI) < 2e-4
    assert abs(a0_lat - want) < 0.1 * abs(want)
    # breakdown: pure subprincipal term
    terms = res.sheets[1]
    assert abs(terms.term_sub - want) < 1e-12
    assert abs(terms.term_bracket) < 1e-12
    assert abs(terms.term_curvature) < 1e-12


def test_twisted_has_nonzero_bracket_and_curvature(twisted_model):
    lead, sub = twisted_model.symbol_fields()
    res = second_weyl(lead, sub, np.array([0.9, 0.0]))
    terms = res.sheets[1]
    assert abs(terms.term_bracket) > 1e-4
    assert abs(terms.term_curvature) > 1e-4


def test_vector_and_projection_forms_agree(twisted_model):
    lead, sub = twisted_model.symbol_fields()
    for x1 in (0.0, 0.9, 2.5):
        x = np.array([x1, 0.0])
        a = second_weyl(lead, sub, x, form="projection")
        b = second_weyl(lead, sub, x, form="vector")
        assert abs(a.value - b.value) < 1e-6


def test_projection_form_check_constant():
    cmp = projection_form_check(planar_spin_field(), None, X0, 1)
    assert abs(cmp.c_first_vector) < 1e-10
    assert abs(cmp.c_first_projection) < 1e-10
    assert abs(cmp.c_second_vector) < 1e-10
    assert abs(cmp.c_second_projection) < 1e-10


def test_projection_form_check_shifted():
    beta = 0.3
    sub = SymbolField(2, 0, lambda x, xi: beta * np.eye(2, dtype=complex))
    cmp = projection_form_check(planar_spin_field(), sub, X0, 1)
    assert abs(cmp.c_first_vector - cmp.c_first_projection) < 1e-8
    assert abs(cmp.c_second_vector - cmp.c_second_projection) < 1e-8
    # c_first = -n(n-1) * beta * area of the unit disk
    assert abs(cmp.c_first_projection - (-2.0 * beta * math.pi)) < 1e-10


def test_projection_form_check_twisted(twisted_model):
    lead, sub = twisted_model.symbol_fields()
    cmp = projection_form_check(lead, sub, np.array([1.3, 0.0]), 1)
    assert abs(cmp.c_first_vector - cmp.c_first_projection) < 1e-6
    assert abs(cmp.c_second_vector - cmp.c_second_projection) < 1e-6


# ---------------------------------------------------------------------------
# both branches
# ---------------------------------------------------------------------------

def test_sign_flip_duality(twisted_model):
    """The minus branch equals the direct negative-sheet computation."""
    lead, sub = twisted_model.symbol_fields()
    x = np.array([0.7, 0.0])
    coeffs = weyl_coefficients(lead, sub, x)
    # direct negative-sheet route on the original operator
    quad = CosphereQuadrature()
    vol_neg = region_integral(lead, x, -1, lambda p: 1.0, quad)
    a1_minus_direct = 2.0 / TWO_PI ** 2 * vol_neg
    assert abs(coeffs.a_first_minus - a1_minus_direct) < 1e-12
    from weylsys.coefficients import CospherePanel
    panel = CospherePanel(lead, sub, x, quad)
    neg_terms = panel.second_terms(panel.positions()[0], "projection")
    assert panel.sheets[0] == -1
    a0_minus_direct = -neg_terms.total
    assert abs(coeffs.a_second_minus - a0_minus_direct) < 1e-9


def test_weyl_coefficients_symmetric_model(dirac_model):
    lead, sub = dirac_model.symbol_fields()
    coeffs = weyl_coefficients(lead, sub, np.array([0.2, 0.4]))
    assert abs(coeffs.a_first_plus - coeffs.a_first_minus) < 1e-13
    assert abs(coeffs.a_second_plus) < 1e-12
    assert abs(coeffs.a_second_minus) < 1e-12
    assert coeffs.a_first_plus > 0


def test_not_elliptic_region_integral():
    # leading symbol degenerate along a direction: sigma_1 xi_1 alone
    f = SymbolField(2, 1, lambda x, xi: SIGMA1 * xi[0])
    with pytest.raises(NotElliptic):
        region_integral(f, X0, 1, lambda p: 1.0, CosphereQuadrature())


def test_complex_residue_detected():
    # an anti-Hermitian next-order symbol leaks a constant imaginary part
    # into the subprincipal term, which must be flagged, not dropped
    from weylsys.errors import ComplexResidue

    bad_sub = SymbolField(2, 0, lambda x, xi: 1j * np.eye(2, dtype=complex))
    with pytest.raises(ComplexResidue):
        second_weyl(planar_spin_field(), bad_sub, X0)


def test_three_dimensional_region_volume():
    # n = 3 rule: volume of the unit ball from |h| = |xi|
    f3 = SymbolField(
        2, 1, lambda x, xi: np.linalg.norm(xi) * np.diag([1.0, -1.0]).astype(complex)
    )
    x3 = np.array([0.1, 0.2, 0.3])
    val = region_integral(
        f3, x3, 1, lambda p: 1.0, CosphereQuadrature(n_angles=64, n_polar=24)
    )
    assert abs(val - 4.0 * math.pi / 3.0) < 1e-10
