"""etaflow: exact eta-invariant, spectral-flow and APS-index calculator
for unit circle bundles of positive line bundles over Fano manifolds.

All arithmetic is exact (rationals, Gaussian rationals, one-square-root
sign tests); spectral-flow vanishing is certified from curvature lower
bounds rather than sampled numerically.
"""

__version__ = "0.1.0"

from .exact import (
    GaussianRational,
    ParamPoly,
    Rational,
    SqrtValue,
    parse_rational,
    poly_integrate_delta,
    quad_nonneg_on_interval,
    rational_str,
    sqrt_sign,
)
from .ring import (
    GradedClass,
    RingSpec,
    eval_series,
    exp_nilpotent,
    integrate_top,
)
from .series import (
    CONVENTION_PAPER_I,
    CONVENTION_REAL,
    FormalSeries,
    a_hat_from_roots,
    omega_forms,
    series_eta_hat,
    series_p,
    series_p_prime,
)
from .spectral import (
    EigenvalueFamily,
    LaplacianSpectrum,
    SpectralFlowReport,
    SpectralModel,
    certify_no_crossing,
    enumerate_families,
    kernel_dimension,
    nakano_lower_bound,
    spectral_flow,
    spin_vanishing_predicate,
    type2_multiplicity,
)
from .catalog import (
    CatalogEntry,
    HypersurfaceSpec,
    ManifoldSpec,
    cohomology_line_cp1,
    general_type_hypersurface_model,
    laplacian_table_load,
    product_cp1_model,
    resolve_manifold,
)
from .eta import (
    EtaResult,
    adiabatic_limit_eta,
    aps_index,
    aps_resonances,
    corollary_check,
    eta_invariant,
    transgression_term,
)

__all__ = [name for name in dir() if not name.startswith("_")]
