"""Verification-suite mechanics: reports, controls, determinism.

Full-tolerance suite runs live in the acceptance tests; here the suites
run at reduced sizes to exercise reporting and the failure directions.
"""
import numpy as np
import pytest

from kuralim import (
    NEGATIVE_CONTROLS,
    SUITES,
    DomainError,
    VerificationReport,
    run_suite,
    verify_bridge,
    verify_mean_interaction,
    verify_oa_closure,
    verify_spectrum,
    verify_sync_limit,
)


def test_report_invariant_enforced():
    VerificationReport("demo", {}, 0.5, 1.0, True, 0.0)
    with pytest.raises(DomainError):
        VerificationReport("demo", {}, 0.5, 1.0, False, 0.0)
    with pytest.raises(DomainError):
        VerificationReport("demo", {}, 2.0, 1.0, True, 0.0)


def test_report_json_schema():
    r = verify_spectrum()
    d = r.to_json_dict()
    assert list(d) == ["test", "params", "max_residual", "tolerance", "pass", "runtime_s"]
    assert d["test"] == "spectrum"
    assert d["pass"] is True
    assert d["params"]["n_cells"] == 64


def test_interaction_small_grid():
    r = verify_mean_interaction(alphas=(0.5,), betas=(0.0, 0.3), n_labels=128, n_eval=33)
    assert r.passed and r.max_residual < 1e-8
    bad = verify_mean_interaction(alphas=(0.5,), betas=(0.3,), n_labels=128, n_eval=33, rhs_scale=1.01)
    assert not bad.passed


def test_interaction_beta_zero_slice_is_exact():
    r = verify_mean_interaction(alphas=(1.0, -2.0), betas=(0.0,), n_labels=256, n_eval=65)
    assert r.max_residual < 1e-14


def test_residuals_are_deterministic():
    a = verify_spectrum()
    b = verify_spectrum()
    assert a.max_residual == b.max_residual  # bitwise, not approximate
    c = verify_mean_interaction(alphas=(0.5,), betas=(0.3,), n_labels=128, n_eval=33)
    d = verify_mean_interaction(alphas=(0.5,), betas=(0.3,), n_labels=128, n_eval=33)
    assert c.max_residual == d.max_residual


def test_spectrum_sensitivity_control():
    # the control has the same eigenvalues, so the residual must come
    # from eigenvector alignment, not the spectrum
    good = verify_spectrum()
    assert good.passed
    assert "leading_pair" in good.extras
    bad = verify_spectrum(harmonic=2)
    assert not bad.passed
    assert abs(bad.extras["eigenvalue_residual"]) < 1e-12


def test_closure_detects_off_manifold_start():
    r = verify_oa_closure(t_end=1.0, n_modes=16)
    assert r.passed
    bad = verify_oa_closure(t_end=1.0, n_modes=16, off_manifold=0.05)
    assert not bad.passed
    with pytest.raises(DomainError):
        verify_oa_closure(a0=0.5 + 0.0j)


def test_bridge_reduced_size():
    r = verify_bridge(t_end=1.0, n_cells=256, n_labels=256)
    assert r.passed
    frozen = verify_bridge(t_end=1.0, n_cells=256, n_labels=256, drift_scale=0.0)
    assert not frozen.passed
    assert frozen.max_residual > 0.1  # the anchor drift carries the label shift


def test_sync_limit_probes():
    r = verify_sync_limit(n_labels=256)
    assert r.passed
    assert r.extras["q_deviation"] <= 1e-10
    assert set(r.extras["sups"]) == {"0.99", "0.999", "0.9999"}
    weak = verify_sync_limit(beta_probes=(0.9,), n_labels=256)
    assert not weak.passed


def test_run_suite_dispatch():
    assert set(NEGATIVE_CONTROLS) == set(SUITES)
    r = run_suite("spectrum")
    assert r.passed
    bad = run_suite("spectrum", negative_control=True)
    assert not bad.passed
    with pytest.raises(DomainError):
        run_suite("no-such-suite")
