from fractions import Fraction as F

import pytest
import sympy as sp

from etaflow.catalog import ConfigError, product_cp1_model, resolve_manifold
from etaflow.eta import (
    EtaResult,
    adiabatic_integrand,
    adiabatic_limit_eta,
    aps_index,
    aps_resonances,
    corollary_check,
    eta_invariant,
    transgression_raw,
    transgression_term,
)
from etaflow.series import CONVENTION_PAPER_I
from etaflow.spectral import SF_SIGN_STANDARD, SpectralModel


@pytest.fixture(scope="module")
def cp1xcp1():
    return product_cp1_model(2)


@pytest.fixture(scope="module")
def cp1x4():
    return product_cp1_model(4)


def model_of(spec_table):
    spec, table = spec_table
    return SpectralModel(spec.name, spec.n, spec.kappa, table)


# ------------------------------------------------------- adiabatic limit


def adiabatic_series_oracle(r):
    """Independent check on (CP1)^2: expand the integrand as a plain power
    series in the single variable c up to c^2, using the closed forms,
    and integrate with  int c^2 = 2, int c = int 1 = 0.

    On this base the A-hat class is 1 (the tangent roots square to zero),
    so the integrand series is eta_hat_r(c) * exp(rc).
    """
    z = sp.symbols("z")
    r = sp.Rational(r)
    if r == sp.floor(r):
        eta = (z / 2 - sp.tanh(z / 2)) / ((z / 2) * sp.tanh(z / 2))
    else:
        alpha = 1 - 2 * (r - sp.floor(r))
        eta = sp.exp(alpha * z / 2) / sp.sinh(z / 2) - 2 / z
    integrand = sp.series(eta * sp.exp(r * z), z, 0, 3).removeO()
    c2_coeff = integrand.coeff(z, 2)
    return F(1, 2) * F(str(c2_coeff)) * 2  # (1/2) * coeff * int c^2


def test_adiabatic_limit_matches_series_oracle(cp1xcp1):
    spec, _ = cp1xcp1
    assert adiabatic_series_oracle(F(1, 2)) == F(-1, 24)
    assert adiabatic_limit_eta(spec, F(1, 2)) == F(-1, 24)
    for r in (F(0), F(1, 3), F(2, 3), F(5, 4)):
        assert adiabatic_limit_eta(spec, r) == adiabatic_series_oracle(r)


def test_adiabatic_limit_vanishes_at_r0(cp1xcp1, cp1x4):
    assert adiabatic_limit_eta(cp1xcp1[0], 0) == 0
    assert adiabatic_limit_eta(cp1x4[0], 0) == 0


# ------------------------------------------------------- transgression


def test_transgression_vanishes_at_r0(cp1xcp1, cp1x4):
    for spec, _ in (cp1xcp1, cp1x4):
        for eps in (F(1, 10), F(1), F(4)):
            assert transgression_term(spec, 0, eps) == 0


def test_transgression_empty_interval(cp1xcp1):
    assert transgression_term(cp1xcp1[0], F(1, 2), 0) == 0


def test_transgression_fundamental_theorem_cross_check(cp1xcp1):
    # int_0^eps int_X 2c Omega_2 e^{Omega_0} e^{rc} computed two ways:
    # through the delta-integral and through the endpoint difference
    # int_X [e^{Omega_0 at eps} - A-hat] e^{rc}
    from etaflow.exact import poly_integrate_delta
    from etaflow.ring import exp_nilpotent, integrate_top
    from etaflow.series import a_hat_from_roots, omega_forms

    spec, _ = cp1xcp1
    r, eps = F(1, 2), F(1)
    omega0, omega2 = omega_forms(spec.chern_roots, spec.c)
    erc = exp_nilpotent(spec.c * r)
    ahat = a_hat_from_roots(spec.ring, spec.chern_roots)
    lhs = poly_integrate_delta(
        integrate_top(spec.c * 2 * omega2 * exp_nilpotent(omega0) * erc), eps
    ).as_rational()
    rhs = integrate_top(
        (exp_nilpotent(omega0.subs_delta(eps)) - ahat) * erc
    ).as_rational()
    assert lhs == rhs


def test_transgression_paper_i_is_gaussian(cp1xcp1):
    spec, _ = cp1xcp1
    value = transgression_raw(spec, F(1, 2), 1, CONVENTION_PAPER_I)
    # the literal-i convention produces a different (complex-normalized)
    # number; only its N-invariant vanishing statements are shared
    assert value != transgression_raw(spec, F(1, 2), 1)


# ------------------------------------------------------- assembly


def test_eta_invariant_r0(cp1xcp1):
    spec, table = cp1xcp1
    model = model_of(cp1xcp1)
    res = eta_invariant(spec, model, 0, 1)
    assert res.total == 0
    assert res.adiabatic_term == 0
    assert res.transgression_term == 0
    assert res.spectral_flow == 0


def test_eta_invariant_decomposition(cp1xcp1):
    spec, _ = cp1xcp1
    model = model_of(cp1xcp1)
    res = eta_invariant(spec, model, F(1, 2), F(1, 10))
    assert res.adiabatic_term == F(-1, 24)
    assert res.spectral_flow == 0
    # assembly identity, for any convention constant
    for N in (F(1), F(-7, 3), F(355, 113)):
        res_n = EtaResult(
            r=res.r, eps=res.eps, adiabatic_term=res.adiabatic_term,
            transgression_term=res.transgression_term,
            convention_constant=N, convention=res.convention,
            sf_sign=res.sf_sign, flow_report=res.flow_report,
        )
        assert (
            res_n.total - 2 * res_n.spectral_flow
            - N * res_n.transgression_term
            == res_n.adiabatic_term
        )


def test_eta_invariant_reports_both_sign_conventions(cp1xcp1):
    spec, _ = cp1xcp1
    model = model_of(cp1xcp1)
    res = eta_invariant(spec, model, F(1, 2), 1, sf_sign=SF_SIGN_STANDARD)
    assert res.total == res.total_standard_sf
    assert res.total_paper_sf == res.total_standard_sf  # flow is zero here
    data = res.to_json()
    assert data["total_paper_sf"] == data["total_standard_sf"]


def test_eta_invariant_indeterminate_not_zeroed(cp1xcp1):
    spec, _ = cp1xcp1
    model = model_of(cp1xcp1)
    res = eta_invariant(spec, model, F(9, 4), 1)
    assert res.spectral_flow is None
    assert res.total is None
    assert res.flow_report.indeterminate
    assert res.to_json()["total"] is None


def test_eta_refuses_general_type():
    entry = resolve_manifold("hyp:n=4,d=8")
    with pytest.raises(ConfigError):
        entry.require_manifold()


# ------------------------------------------------------- APS index


def aps_brute_force(table, n, eps):
    total = 0
    for p in range(n + 1):
        k = -eps * (F(p) - F(n, 2))
        if k.denominator == 1:
            total += table.h(p, int(k))
    return -F(total, 2)


def test_aps_index_examples(cp1xcp1):
    spec, table = cp1xcp1
    # oracle first: enumerate p in {0, 1, 2} against the Kunneth table
    assert aps_brute_force(table, 2, F(3, 7)) == 0
    assert aps_brute_force(table, 2, F(1)) == -1
    assert aps_index(spec, table, F(3, 7)) == 0
    assert aps_index(spec, table, 1) == -1
    # only p = n/2 gives an integral twist at denominator n + 1
    assert aps_index(spec, table, F(1, 3)) == -F(table.h(1, 0), 2) == 0


def test_aps_index_piecewise_constant(cp1xcp1):
    spec, table = cp1xcp1
    res = aps_resonances(table, 2, F(1, 2), F(2))
    assert res == [F(1), F(2)]
    for eps in (F(3, 5), F(7, 10), F(9, 10), F(999, 1000)):
        assert aps_index(spec, table, eps) == 0
    assert aps_index(spec, table, 1) == -1
    for eps in (F(1001, 1000), F(3, 2), F(1999, 1000)):
        assert aps_index(spec, table, eps) == 0
    assert aps_index(spec, table, 2) == -4  # h^{0,2} = h^{2,-2} = 4


# ------------------------------------------------------- corollary


def test_corollary_check(cp1xcp1, cp1x4):
    for spec_table in (cp1xcp1, cp1x4):
        check = corollary_check(spec_table[0])
        assert check.both_terms_zero
        assert check.witness is None


def test_corollary_negative_control(cp1xcp1):
    # at r = 1/3 the eta-hat series has even powers of c: the adiabatic
    # integrand no longer cancels in top degree
    spec, _ = cp1xcp1
    top = adiabatic_integrand(spec, F(1, 3)).coefficient(
        spec.ring.top_monomial
    )
    assert not top.is_zero
    assert adiabatic_limit_eta(spec, F(1, 3)) != 0


def test_convention_invariance_of_acceptance_values(cp1xcp1):
    # scaling the convention constant never touches the r = 0 statements:
    # the transgression integrand is identically zero there
    spec, _ = cp1xcp1
    model = model_of(cp1xcp1)
    for N in (F(1), F(17), F(-3, 5)):
        res = eta_invariant(spec, model, 0, 1, N=N)
        assert res.total == 0
