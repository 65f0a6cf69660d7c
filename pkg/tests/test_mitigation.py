import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from coherent_zxz.decomposition import XErrorModel, erroneous_decomposition
from coherent_zxz.fidelity import best_fidelity_analytic, process_fidelity
from coherent_zxz.mitigation import (
    ConvergenceWarning,
    Method,
    SearchConfig,
    mitigate_closed_form,
    mitigate_numeric,
    unmitigated_fidelity,
)
from coherent_zxz.su2 import DomainError, GateParams, canonicalize_params, mat_from_params
from coherent_zxz.universality import is_coverable
from strategies import angle, errors, params, raw_params

PI = math.pi


@given(raw_params, errors)
def test_closed_form_reaches_best(p, e):
    r = mitigate_closed_form(p, e)
    assert r.method is Method.CLOSED_FORM
    assert r.achieved_fidelity == pytest.approx(best_fidelity_analytic(p, e), abs=1e-9)
    assert r.coverable == is_coverable(p, e)


@given(params, errors)
def test_closed_form_uses_raw_triple(p, e):
    r = mitigate_closed_form(p, e)
    f = process_fidelity(mat_from_params(p), erroneous_decomposition(r.implemented_raw, e))
    assert f == pytest.approx(r.achieved_fidelity, abs=1e-14)
    assert r.implemented == canonicalize_params(*r.implemented_raw)


@given(params, st.floats(-0.45 * PI, 0.45 * PI), angle, angle)
def test_coverable_targets_reach_unity(p, d, px, lx):
    e = XErrorModel.from_delta(d, px, lx)
    r = mitigate_closed_form(p, e)
    if p.theta <= PI - 2 * abs(d) - 1e-9:
        assert r.coverable
        assert r.achieved_fidelity >= 1 - 1e-9


def test_case2_retuning_is_a_shift():
    # theta_x = pi/2: implemented angles are the target shifted by the phase errors
    px, lx = 0.3, 0.5
    e = XErrorModel(PI / 2, px, lx)
    p = GateParams(1.0, 2.0, 3.0)
    r = mitigate_closed_form(p, e)
    assert math.cos(r.implemented_raw.theta - (p.theta + px + lx)) == pytest.approx(1.0)
    assert r.implemented_raw.phi == pytest.approx(p.phi - px)
    assert r.implemented_raw.lam == pytest.approx(p.lam - lx)
    assert r.achieved_fidelity == pytest.approx(1.0, abs=1e-12)


def test_ideal_error_keeps_target():
    p = GateParams(1.0, 2.0, 3.0)
    r = mitigate_closed_form(p, XErrorModel())
    np.testing.assert_allclose(r.implemented_raw, p, atol=1e-12)


@settings(max_examples=15)
@given(params, errors)
def test_numeric_agrees_with_analytic(p, e):
    r = mitigate_numeric(p, e)
    assert r.method is Method.NUMERIC_SEARCH
    assert r.achieved_fidelity == pytest.approx(best_fidelity_analytic(p, e), abs=1e-6)
    f = process_fidelity(mat_from_params(p), erroneous_decomposition(r.implemented_raw, e))
    assert f == pytest.approx(r.achieved_fidelity, abs=1e-14)


def test_numeric_never_below_unmitigated():
    p = GateParams(0.97 * PI, 0.3, 4.0)
    e = XErrorModel.from_delta(0.2 * PI, 0.5, 0.1)
    assert mitigate_numeric(p, e).achieved_fidelity >= unmitigated_fidelity(p, e) - 1e-15


def test_numeric_is_deterministic():
    p = GateParams(0.7, 1.0, 2.0)
    e = XErrorModel.from_delta(0.3, 0.4, 0.5)
    cfg = SearchConfig(rng_seed=3)
    assert mitigate_numeric(p, e, cfg) == mitigate_numeric(p, e, cfg)


def test_numeric_diagonal_gate_fallback():
    p = GateParams(0.6 * PI, 0.1, 0.2)
    r = mitigate_closed_form(p, XErrorModel(PI, 0.3, 0.1))
    assert r.method is Method.NUMERIC_SEARCH
    assert r.achieved_fidelity == pytest.approx((1 + 2 * math.cos(0.3 * PI) ** 2) / 3, abs=1e-9)


def test_convergence_warning():
    p = GateParams(0.7, 1.0, 2.0)
    e = XErrorModel.from_delta(0.3, 0.4, 0.5)
    with pytest.warns(ConvergenceWarning):
        r = mitigate_numeric(p, e, SearchConfig(max_iters=3, restarts=1))
    assert not r.converged


def test_converged_run_is_quiet():
    with warnings.catch_warnings():
        warnings.simplefilter("error", ConvergenceWarning)
        r = mitigate_numeric(GateParams(0.7, 1.0, 2.0), XErrorModel.from_delta(0.3, 0.4, 0.5))
    assert r.converged


@pytest.mark.parametrize(
    "kwargs", [{"grid_per_axis": 1}, {"tol": 0.0}, {"max_iters": 0}, {"restarts": 0}]
)
def test_search_config_validation(kwargs):
    with pytest.raises(ValueError):
        SearchConfig(**kwargs)


def test_non_finite_target():
    with pytest.raises(DomainError):
        mitigate_closed_form((math.nan, 0, 0), XErrorModel())
    with pytest.raises(DomainError):
        mitigate_numeric((0, math.inf, 0), XErrorModel())
