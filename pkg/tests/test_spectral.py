import json
from fractions import Fraction as F

import pytest

from etaflow.catalog import (
    general_type_hypersurface_model,
    laplacian_table_load,
    product_cp1_model,
)
from etaflow.exact import sqrt_sign
from etaflow.spectral import (
    CERTIFIED,
    CROSSING,
    EigenvalueFamily,
    INDETERMINATE,
    IndeterminateSpectralFlow,
    MODE_EXPLICIT,
    MODE_NAKANO,
    MUST_VANISH,
    ON_UNKNOWN_SKIP,
    SF_SIGN_STANDARD,
    SpectralModel,
    SpectralWindowError,
    TYPE1,
    TYPE2_MINUS,
    TYPE2_PLUS,
    UNCONSTRAINED,
    UnknownCohomologyError,
    certify_no_crossing,
    enumerate_families,
    kernel_dimension,
    nakano_lower_bound,
    spectral_flow,
    spin_vanishing_predicate,
    type2_multiplicity,
)


def make_model(factors=2, spectrum=None):
    spec, table = product_cp1_model(factors)
    model = SpectralModel(spec.name, spec.n, spec.kappa, table)
    if spectrum is not None:
        model.spectrum = spectrum
    return spec, model


def hyp_model(n=4, d=8):
    spec, table = general_type_hypersurface_model(n, d)
    return spec, SpectralModel(spec.name, n, None, table)


# ------------------------------------------------------------- basic ops


def test_type2_multiplicity_examples():
    assert type2_multiplicity([5]) == 5
    assert type2_multiplicity([2, 3]) == 1
    assert type2_multiplicity([1, 0, 4]) == 5
    with pytest.raises(ValueError):
        type2_multiplicity([])
    with pytest.raises(ValueError):
        type2_multiplicity([1, -1])


def test_nakano_lower_bound_examples():
    assert nakano_lower_bound(1, 3, 2, 2) == 4
    assert nakano_lower_bound(0, 0, 0, 2) == 0
    assert nakano_lower_bound(0, -2, 2, 2) == 6
    # the bound is never negative
    for q in range(3):
        for k in range(-6, 7):
            assert nakano_lower_bound(q, k, 2, 2) >= 0
    with pytest.raises(ValueError):
        nakano_lower_bound(0, 0, -1, 2)


def test_spin_vanishing_examples():
    assert spin_vanishing_predicate(1, 0, 2, 2) == MUST_VANISH
    assert spin_vanishing_predicate(0, 5, 2, 2) == UNCONSTRAINED
    assert spin_vanishing_predicate(0, -1, 2, 2) == MUST_VANISH


# ------------------------------------------------------------ enumeration


def test_enumerate_contains_expected_type1_family():
    _, model = make_model(2)
    families, skipped, _ = enumerate_families(model, 0, 2)
    assert not skipped
    matches = [
        f for f in families if f.kind == TYPE1 and f.q == 0 and f.k == 1
    ]
    assert len(matches) == 1 and matches[0].multiplicity == 1
    a0, slope = matches[0].type1_affine(0)
    assert (a0, slope) == (1, 1)  # lambda(delta) = 1 + delta


def test_enumerate_type2_empty_for_small_eps():
    # with eps = 1/10 the k-window shrinks to {0}, where the curvature
    # bound exceeds the mu^2 window for every q
    _, model = make_model(2)
    families, _, _ = enumerate_families(model, 0, F(1, 10))
    assert all(f.kind == TYPE1 for f in families)


def test_enumerate_hypersurface_known_entry():
    _, model = hyp_model(4, 8)
    families, skipped, _ = enumerate_families(
        model, 0, 1, on_unknown=ON_UNKNOWN_SKIP
    )
    assert skipped  # the partial table leaves most of the window unknown
    assert [(f.q, f.k) for f in families] == [(0, -1)]
    a0, slope = families[0].type1_affine(0)
    assert (a0, slope) == (-1, 2)  # lambda(delta) = -1 + 2 delta

    with pytest.raises(UnknownCohomologyError):
        enumerate_families(model, 0, 1)


def test_enumerate_window_error_names_missing_range(tmp_path):
    path = tmp_path / "small.json"
    path.write_text(json.dumps({
        "half_mu_sq_max": "1/100", "k_min": -1, "k_max": 1,
        "entries": [{"q": 0, "k": 1, "halfMuSq": "1/200", "mult": 1}],
    }))
    spectrum = laplacian_table_load(path, 2, 2)
    _, model = make_model(2, spectrum)
    with pytest.raises(SpectralWindowError):
        enumerate_families(model, 0, 2)  # needs cutoff 1/4


# ------------------------------------------------------------ certification


def test_certify_type1_examples():
    fam = EigenvalueFamily(TYPE1, 0, 1, 2, 1)
    assert certify_no_crossing(fam, 0, 4).status == CERTIFIED

    fam = EigenvalueFamily(TYPE1, 0, -1, 4, 1)
    out = certify_no_crossing(fam, 0, 1)
    assert out.status == CROSSING
    assert out.crossings == ((F(1, 2), -1),)  # negative-to-positive

    # endpoint zero: root exactly at eps counts as kernel, not flow
    out = certify_no_crossing(fam, 0, F(1, 2))
    assert out.status == CERTIFIED and out.zero_at_eps

    # identically zero family is flagged
    fam = EigenvalueFamily(TYPE1, 1, 0, 2, 1)
    out = certify_no_crossing(fam, 0, 1)
    assert out.status == CERTIFIED and "identically zero" in out.note


def test_certify_type2_strict_branch_unconditional():
    # q even: lambda_- is strictly negative; q odd: lambda_+ strictly positive
    fam = EigenvalueFamily(TYPE2_MINUS, 0, 5, 2, 3, half_mu_sq=F(1, 100))
    assert certify_no_crossing(fam, 4, 10).status == CERTIFIED
    fam = EigenvalueFamily(TYPE2_PLUS, 1, 5, 2, 3, half_mu_sq=F(1, 100))
    assert certify_no_crossing(fam, 4, 10).status == CERTIFIED


def test_certify_type2_nakano_regime():
    # inside |r| <= kappa/2 the bound-level quadratic is always nonnegative
    n, kappa = 2, F(2)
    for q in range(n + 1):
        for k in range(-6, 7):
            lam = nakano_lower_bound(q, k, kappa, n)
            for kind in (TYPE2_PLUS, TYPE2_MINUS):
                fam = EigenvalueFamily(
                    kind, q, k, n, None, half_mu_sq=lam, half_mu_sq_is_bound=True
                )
                for r in (F(-1), F(-1, 2), F(0), F(1, 2), F(1)):
                    out = certify_no_crossing(fam, r, 4)
                    assert out.status == CERTIFIED


def test_certify_type2_explicit_crossing():
    # q = 0, k = 2, half = 1/100, r = 9/4: Q = -(23/25) delta + 1/4
    fam = EigenvalueFamily(TYPE2_PLUS, 0, 2, 2, 3, half_mu_sq=F(1, 100))
    out = certify_no_crossing(fam, F(9, 4), 1)
    assert out.status == CROSSING
    assert out.crossings == ((F(25, 92), 1),)  # positive-to-negative


def test_certify_type2_bound_failure_is_indeterminate():
    fam = EigenvalueFamily(
        TYPE2_PLUS, 0, 2, 2, None, half_mu_sq=F(0), half_mu_sq_is_bound=True
    )
    out = certify_no_crossing(fam, F(9, 4), 1)
    assert out.status == INDETERMINATE


def test_branch_exactness_sampling():
    # for q even, sign(lambda_+) at rational sample points equals
    # sqrt_sign(-delta, 1, A(delta)) and matches the quadratic verdict
    fam = EigenvalueFamily(TYPE2_PLUS, 0, 2, 2, 3, half_mu_sq=F(1, 100))
    r, eps = F(9, 4), F(1)
    c2, c1, c0 = fam.quad_coefficients(r)
    for j in range(1, 21):
        delta = eps * j / 20
        q_val = (c2 * delta + c1) * delta + c0
        a_val = q_val + delta * delta
        assert sqrt_sign(-delta, 1, a_val) == (
            1 if q_val > 0 else (-1 if q_val < 0 else 0)
        )


# ------------------------------------------------------------ spectral flow


def test_spectral_flow_vanishes_on_fano():
    _, model = make_model(2)
    report = spectral_flow(model, F(1, 2), 3)
    assert report.total == 0 and report.mode == MODE_NAKANO
    assert not report.indeterminate

    report = spectral_flow(model, 0, 10)
    assert report.total == 0


def test_spectral_flow_counterexample():
    _, model = hyp_model(4, 8)
    report = spectral_flow(model, 0, 1, on_unknown=ON_UNKNOWN_SKIP)
    assert report.partial
    assert report.total_paper != 0
    assert len(report.crossings) == 1
    crossing = report.crossings[0]
    assert crossing.delta_star == F(1, 2)
    assert crossing.multiplicity >= 1
    assert crossing.direction == -1  # rises through zero
    assert report.total_standard == -report.total_paper


def test_spectral_flow_sign_conventions():
    _, model = hyp_model(4, 8)
    paper = spectral_flow(model, 0, 1, on_unknown=ON_UNKNOWN_SKIP)
    standard = spectral_flow(
        model, 0, 1, sf_sign=SF_SIGN_STANDARD, on_unknown=ON_UNKNOWN_SKIP
    )
    assert paper.total == -standard.total
    assert paper.total_paper == standard.total_paper


def test_spectral_flow_indeterminate_outside_regime():
    _, model = make_model(2)
    report = spectral_flow(model, F(9, 4), 1)
    assert report.indeterminate and not report.is_exact


def test_spectral_flow_explicit_mode(tmp_path):
    path = tmp_path / "spec.json"
    path.write_text(json.dumps({
        "half_mu_sq_max": "10", "k_min": -8, "k_max": 8,
        "entries": [
            {"q": 0, "k": 2, "halfMuSq": "1/100", "mult": 3},
            {"q": 1, "k": 3, "halfMuSq": "4", "mult": 2},
        ],
    }))
    spectrum = laplacian_table_load(path, 2, 2)
    _, model = make_model(2, spectrum)
    assert model.mode == MODE_EXPLICIT

    # in the theorem regime the explicit data confirms vanishing
    report = spectral_flow(model, F(1, 2), 1)
    assert report.total == 0 and not report.indeterminate

    # outside it, the explicit eigenvalue resolves what the bound cannot
    report = spectral_flow(model, F(9, 4), 1)
    assert not report.indeterminate
    kinds = {(c.family.kind, c.family.q, c.family.k) for c in report.crossings}
    assert (TYPE2_PLUS, 0, 2) in kinds
    assert (TYPE1, 0, 2) in kinds
    assert report.total_paper == -1  # 3 down (type2) vs 4 up (type1)


def test_window_soundness():
    _, model = make_model(2)
    grid_r = [F(i, 10) for i in range(-10, 11, 5)]
    grid_eps = [F(1, 10), F(1, 2), F(1), F(2), F(4)]
    for r in grid_r:
        for eps in grid_eps:
            base = spectral_flow(model, r, eps).total
            for factor in (2, 4):
                widened = spectral_flow(model, r, eps, window_factor=factor)
                assert widened.total == base == 0


def test_endpoint_zero_reporting():
    _, model = make_model(2)
    # r = k + eps at q = 0 puts a Type 1 zero exactly at delta = eps
    eps = F(1, 2)
    r = 1 + eps
    report = spectral_flow(model, r, eps)
    type1_end = [
        z for z in report.endpoint_zeros
        if z.family.kind == TYPE1 and z.where == "eps"
    ]
    assert any(z.family.k == 1 and z.multiplicity == 1 for z in type1_end)
    assert report.total == 0  # endpoint zeros never count as flow


# ------------------------------------------------------------ kernel


def test_kernel_dimension_examples():
    _, model = make_model(2)
    assert kernel_dimension(model, 0, F(7, 10)) == 0
    # zero multiplicity at a Type 1 resonance contributes nothing
    assert kernel_dimension(model, 0, 1) == 0
    # force a Type 1 zero: r = k + eps with k = 1
    eps = F(1, 2)
    assert kernel_dimension(model, 1 + eps, eps) == 1


def test_kernel_indeterminate_in_bound_mode():
    _, model = make_model(2)
    with pytest.raises(IndeterminateSpectralFlow):
        kernel_dimension(model, F(5, 4), 1)


def test_kernel_resolved_by_explicit_spectrum(tmp_path):
    # the borderline case above: a zero at eps needs mu^2/2 = 3/32 at
    # (q=0, k=1); decide it both ways with explicit tables
    for half, expected in (("3/32", 5), ("1/16", 0)):
        path = tmp_path / "spec.json"
        path.write_text(json.dumps({
            "half_mu_sq_max": "1", "k_min": -4, "k_max": 4,
            "entries": [{"q": 0, "k": 1, "halfMuSq": half, "mult": 5}],
        }))
        spectrum = laplacian_table_load(path, 2, 2)
        _, model = make_model(2, spectrum)
        assert kernel_dimension(model, F(5, 4), 1) == expected


# ------------------------------------------------------------ consistency


def test_inconsistent_alternating_multiplicity_rejected(tmp_path):
    from etaflow.spectral import SpectrumDataError

    # same eigenvalue with a larger multiplicity one level below gives a
    # negative alternating sum at q = 1: the data is inconsistent
    path = tmp_path / "spec.json"
    path.write_text(json.dumps({
        "half_mu_sq_max": "3", "k_min": -40, "k_max": 40,
        "entries": [
            {"q": 0, "k": 0, "halfMuSq": "5/2", "mult": 3},
            {"q": 1, "k": 0, "halfMuSq": "5/2", "mult": 1},
        ],
    }))
    spectrum = laplacian_table_load(path, 2, 2)
    _, model = make_model(2, spectrum)
    with pytest.raises(SpectrumDataError):
        enumerate_families(model, 0, 20)


def test_nakano_consistency_of_tabulated_spectra(tmp_path):
    path = tmp_path / "spec.json"
    path.write_text(json.dumps({
        "half_mu_sq_max": "10", "k_min": -8, "k_max": 8,
        "entries": [
            {"q": 0, "k": 2, "halfMuSq": "1/100", "mult": 3},
            {"q": 1, "k": 3, "halfMuSq": "4", "mult": 2},
            {"q": 2, "k": -4, "halfMuSq": "11", "mult": 1},
        ],
    }))
    spectrum = laplacian_table_load(path, 2, 2)
    for (q, k), entries in spectrum.entries.items():
        bound = nakano_lower_bound(q, k, 2, 2)
        for half, _ in entries:
            assert half >= bound


def test_report_json_shape():
    _, model = make_model(2)
    data = spectral_flow(model, F(1, 2), 1).to_json()
    assert data["mode"] == MODE_NAKANO
    assert data["total"] == 0
    assert data["crossings"] == []
    assert data["indeterminate"] == []
    assert set(data["window"]) == {"type1_k", "type2_k", "half_mu_sq_max", "factor"}

    _, hmodel = hyp_model(4, 8)
    data = spectral_flow(hmodel, 0, 1, on_unknown=ON_UNKNOWN_SKIP).to_json()
    assert data["partial"] is True
    assert data["crossings"][0]["delta_star"] == "1/2"
    assert data["crossings"][0]["kind"] == TYPE1
