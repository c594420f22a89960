"""Ground-truth harness tests: models, spectra, mollifier, counting, fits."""

import math

import numpy as np
import pytest

from weylsys import (
    assemble_and_solve,
    build_model,
    build_mollifier,
    catalog_names,
    fit_weyl,
    local_counting_mollified,
)
from weylsys.errors import (
    BudgetExceeded,
    EllipticityViolation,
    IllConditionedFit,
    SupportTooLarge,
    UnknownModel,
    WindowViolation,
)
from weylsys.symbols import PhasePoint, check_field_contract
from weylsys.torus import TrigMatrixField, registration_check

TWO_PI = 2.0 * math.pi


# ---------------------------------------------------------------------------
# fields and models
# ---------------------------------------------------------------------------

def test_trig_field_hermitian_everywhere(rng):
    fld = TrigMatrixField.from_waves(
        2,
        [
            ("const", (0, 0), np.diag([1.0, -1.0])),
            ("sin", (1, 0), np.array([[0, 1], [1, 0]])),
            ("cos", (2, 1), np.array([[0.3, 0.2j], [-0.2j, -0.1]])),
        ],
    )
    for _ in range(10):
        x = rng.uniform(0, TWO_PI, size=2)
        val = fld.value(x)
        assert np.max(np.abs(val - val.conj().T)) < 1e-13
        # gradient vs finite differences
        h = 1e-6
        for alpha in range(2):
            e = np.zeros(2)
            e[alpha] = h
            fd = (fld.value(x + e) - fld.value(x - e)) / (2 * h)
            np.testing.assert_allclose(fld.gradient(x)[alpha], fd, atol=1e-7)


def test_catalog_contents():
    assert catalog_names() == ["dirac", "mass-dirac", "shifted-dirac", "twisted"]


def test_unknown_model():
    with pytest.raises(UnknownModel):
        build_model("nosuch")
    with pytest.raises(UnknownModel):
        build_model("dirac", {"beta": 1.0})


def test_dirac_registration(dirac_model):
    min_abs, min_gap = registration_check(dirac_model)
    assert abs(min_abs - 1.0) < 1e-12
    assert abs(min_gap - 2.0) < 1e-12


def test_twisted_registration_margins():
    model = build_model("twisted", {"eps": 0.2})
    min_abs, min_gap = registration_check(model)
    assert min_abs > 0.7
    assert min_gap > 1.9


def test_twisted_large_coupling_rejected():
    with pytest.raises(EllipticityViolation):
        build_model("twisted", {"eps": 0.9})


def test_model_symbol_contract(twisted_model, rng):
    lead, sub = twisted_model.symbol_fields()
    pts = []
    for _ in range(4):
        x = rng.uniform(0, TWO_PI, size=2)
        xi = rng.normal(size=2)
        xi /= np.linalg.norm(xi)
        pts.append(PhasePoint(x, xi))
    check_field_contract(lead, pts)
    check_field_contract(sub, pts)


def test_analytic_model_derivatives_match_differencing(twisted_model):
    from weylsys.symbols import SymbolField, symbol_jet

    lead, _ = twisted_model.symbol_fields()
    bare = SymbolField(lead.dim, lead.degree, lead.evaluator)
    p = PhasePoint([0.8, 0.3], [0.7, -0.9])
    analytic = symbol_jet(lead, p)
    numeric = symbol_jet(bare, p, step=1e-4)
    np.testing.assert_allclose(analytic.dx, numeric.dx, atol=1e-9)
    np.testing.assert_allclose(analytic.dxi, numeric.dxi, atol=1e-9)


# ---------------------------------------------------------------------------
# assembly and spectra
# ---------------------------------------------------------------------------

def plane_wave_spectrum(K, offset=0.0, mass=0.0):
    ks = np.arange(-K, K + 1)
    k1, k2 = np.meshgrid(ks, ks, indexing="ij")
    r = np.hypot(k1, k2).ravel()
    mag = np.sqrt(r ** 2 + mass ** 2)
    return np.sort(np.concatenate([mag + offset, -mag + offset]))


def test_shifted_dirac_spectrum_exact(shifted_dirac_model):
    spec = assemble_and_solve(shifted_dirac_model, 16)
    # every trusted eigenvalue matches +-|k| + beta over |k| <= 9
    want = plane_wave_spectrum(16, offset=0.3)
    want = want[np.abs(want) <= spec.trusted_max]
    got = spec.trusted()
    assert got.size == want.size
    np.testing.assert_allclose(got, want, atol=1e-10)


def test_dirac_chiral_symmetry(dirac_model):
    # conjugation by sigma_3 flips the sign of the operator, so the
    # spectrum is symmetric under lambda -> -lambda
    spec = assemble_and_solve(dirac_model, 12)
    lam = spec.eigenvalues
    np.testing.assert_allclose(np.sort(lam), np.sort(-lam)[::-1] * -1, atol=1e-10)
    np.testing.assert_allclose(lam, -lam[::-1], atol=1e-10)


def test_mass_dirac_spectrum(mass_dirac_model):
    spec = assemble_and_solve(mass_dirac_model, 16)
    want = plane_wave_spectrum(16, mass=0.5)
    want = want[np.abs(want) <= spec.trusted_max]
    np.testing.assert_allclose(spec.trusted(), want, atol=1e-10)


def test_budget_enforced(dirac_model):
    with pytest.raises(BudgetExceeded):
        assemble_and_solve(dirac_model, 64)


def test_minimum_truncation(dirac_model):
    with pytest.raises(ValueError):
        assemble_and_solve(dirac_model, 4)


def test_constant_weights_are_uniform(shifted_dirac_model):
    spec = assemble_and_solve(shifted_dirac_model, 8)
    xs = np.array([[0.0, 0.0], [1.0, 2.0], [4.0, 0.5]])
    w = spec.weights(xs)
    np.testing.assert_allclose(w, 1.0 / TWO_PI ** 2, atol=1e-12)


def test_weights_nonnegative_and_normalised(twisted_model):
    spec = assemble_and_solve(twisted_model, 8)
    # weights depend on x1 only and have harmonics up to 2K = 16, so a
    # 32-point uniform average integrates them exactly
    grid = np.stack(
        [np.linspace(0, TWO_PI, 32, endpoint=False), np.zeros(32)], axis=1
    )
    w = spec.weights(grid)
    assert np.min(w) >= -1e-13
    avg = np.mean(w, axis=1) * TWO_PI ** 2
    np.testing.assert_allclose(avg, 1.0, atol=1e-10)


def test_galerkin_matches_symbol_pipeline_for_twisted(twisted_model):
    # global eigenvalue count vs the two-term phase-space prediction
    spec = assemble_and_solve(twisted_model, 16)
    lam = spec.trusted()
    lam_max = 0.9 * spec.trusted_max
    from weylsys import first_weyl, second_weyl

    lead, sub = twisted_model.symbol_fields()
    xs = np.linspace(0, TWO_PI, 8, endpoint=False)
    a1_avg = np.mean([first_weyl(lead, np.array([x, 0.0])) for x in xs])
    a0_avg = np.mean(
        [second_weyl(lead, sub, np.array([x, 0.0])).value for x in xs]
    )
    count = np.sum((lam > 0) & (lam < lam_max))
    predicted = (a1_avg / 2.0 * lam_max ** 2 + a0_avg * lam_max) * TWO_PI ** 2
    assert abs(count - predicted) < 0.02 * predicted


# ---------------------------------------------------------------------------
# mollifier
# ---------------------------------------------------------------------------

def test_mollifier_support_bound():
    with pytest.raises(SupportTooLarge):
        build_mollifier(7.0)


def test_mollifier_contract(mollifier_t3):
    moll = mollifier_t3
    assert abs(moll.mass() - 1.0) < 1e-8
    for m in range(1, 7):
        assert moll.moment(m) < 1e-6
    # rapid decay: the fourth-power-weighted envelope is finite and falls
    # hard across decades (decay strictly faster than the fourth power;
    # the far bin sits at the roundoff floor of the transform)
    near = moll.decay_constant(p=4, nu_min=20.0)
    far_mask = np.abs(moll.grid) >= 600.0
    far = float(
        np.max(np.abs(moll.samples[far_mask])
               * (1.0 + np.abs(moll.grid[far_mask])) ** 4)
    )
    assert np.isfinite(near)
    assert far < 0.2 * near
    # plateau of the realized transform
    for t in (0.0, 0.5, 1.2):
        assert abs(moll.transform_back(t) - 1.0) < 1e-9


def test_mollifier_band_vanishes_outside_support():
    moll = build_mollifier(1.0)
    assert abs(moll.transform_back(1.5)) < 1e-9
    assert abs(moll.transform_back(0.25) - 1.0) < 1e-9


def test_mollifier_evaluation_never_extrapolates(mollifier_t3):
    # beyond the fine interpolation core the value is zero, not spline
    # extrapolation garbage
    assert float(mollifier_t3(999.0)) == 0.0
    assert float(mollifier_t3(-120.0)) == 0.0
    assert abs(float(mollifier_t3(50.0))) < 1e-4


# ---------------------------------------------------------------------------
# counting and fitting
# ---------------------------------------------------------------------------

def test_counting_window_enforced(shifted_dirac_model, mollifier_t3):
    spec = assemble_and_solve(shifted_dirac_model, 8)
    with pytest.raises(WindowViolation):
        local_counting_mollified(
            spec, mollifier_t3, np.array([0.0, 0.0]), np.arange(1.0, 10.0, 0.5)
        )


def test_local_counting_matches_global(shifted_dirac_model, mollifier_t3):
    # integral over the torus of the local count equals the global count
    spec = assemble_and_solve(shifted_dirac_model, 12)
    mu = np.arange(3.0, 7.0, 0.5)
    samples = local_counting_mollified(
        spec, mollifier_t3, np.array([0.7, 0.2]), mu
    )
    lam = spec.eigenvalues[spec.eigenvalues > 0]
    global_count = np.array(
        [np.sum(mollifier_t3(m - lam)) for m in mu]
    ) / TWO_PI ** 2
    np.testing.assert_allclose(samples.values, global_count, atol=1e-10)
    # values are finite and smooth at grid resolution
    assert np.all(np.isfinite(samples.values))
    assert np.max(np.abs(np.diff(samples.values, 2))) < 1.0


def test_minus_branch_counts_negative_spectrum(shifted_dirac_model, mollifier_t3):
    spec = assemble_and_solve(shifted_dirac_model, 12)
    mu = np.arange(3.0, 7.0, 0.5)
    samples = local_counting_mollified(
        spec, mollifier_t3, np.array([0.0, 0.0]), mu, branch="minus"
    )
    lam = spec.eigenvalues[spec.eigenvalues < 0]
    want = np.array([np.sum(mollifier_t3(m + lam)) for m in mu]) / TWO_PI ** 2
    np.testing.assert_allclose(samples.values, want, atol=1e-10)


def test_fit_recovers_exact_polynomial(mollifier_t3):
    from weylsys.torus import CountingSamples

    mu = np.arange(3.0, 12.0, 0.05)
    values = 0.2 * mu + 0.05
    samples = CountingSamples(
        x=np.zeros(2), mu=mu, values=values, branch="plus",
        mollifier_support=3.0, trusted_max=20.0,
    )
    fit = fit_weyl(samples, 2, (3.0, 12.0), nuisance=False, bottom_columns=False)
    assert abs(fit.a_leading - 0.2) < 1e-12
    assert abs(fit.a_second - 0.05) < 1e-12
    assert fit.residual_rms < 1e-14


def test_fit_window_must_span_factor_two(mollifier_t3):
    from weylsys.torus import CountingSamples

    mu = np.arange(8.0, 12.0, 0.05)
    samples = CountingSamples(
        x=np.zeros(2), mu=mu, values=np.ones_like(mu), branch="plus",
        mollifier_support=3.0, trusted_max=20.0,
    )
    with pytest.raises(IllConditionedFit):
        fit_weyl(samples, 2, (8.0, 12.0))


def test_fit_window_respects_smearing_scale(mollifier_t3):
    from weylsys.torus import CountingSamples

    mu = np.arange(0.5, 12.0, 0.05)
    samples = CountingSamples(
        x=np.zeros(2), mu=mu, values=np.ones_like(mu), branch="plus",
        mollifier_support=1.0, trusted_max=20.0,
    )
    with pytest.raises(WindowViolation):
        fit_weyl(samples, 2, (0.5, 12.0))


def test_shifted_dirac_fit(shifted_dirac_model, mollifier_t3):
    spec = assemble_and_solve(shifted_dirac_model, 24)
    mu = np.arange(3.0, 14.4 + 0.025, 0.05)
    samples = local_counting_mollified(
        spec, mollifier_t3, np.array([0.3, 0.9]), mu
    )
    fit = fit_weyl(samples, 2, (3.0, 14.4), mollifier=mollifier_t3)
    assert abs(fit.a_leading - 1.0 / TWO_PI) < 0.01 / TWO_PI
    assert abs(fit.a_second - (-0.3 / TWO_PI)) < 0.1 * 0.3 / TWO_PI


def test_dirac_fit_second_coefficient_vanishes(dirac_model, mollifier_t3):
    spec = assemble_and_solve(dirac_model, 32)
    mu = np.arange(3.0, 19.2 + 0.025, 0.05)
    samples = local_counting_mollified(
        spec, mollifier_t3, np.array([1.0, 0.5]), mu
    )
    fit = fit_weyl(samples, 2, (3.0, 19.2), mollifier=mollifier_t3)
    assert abs(fit.a_second) < 0.01 * fit.a_leading
