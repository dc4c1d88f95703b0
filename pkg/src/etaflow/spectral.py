"""Dirac eigenvalue families, certified crossing analysis, spectral flow.

The restriction of the circle-bundle Dirac operator to the Fourier mode k
has two kinds of eigenvalue families over the deformation interval
delta in (0, eps]:

  Type 1 (harmonic):   lambda(delta) = (-1)^q (k - delta(q - n/2) - r),
                       multiplicity h^{q,k} = dim H^q(X, K^{1/2} (x) L^k);
  Type 2 (excited):    lambda(delta) =
                       ((-1)^{q+1} delta +- sqrt(A(delta))) / 2,
                       A(delta) = (2k - delta(2q+1-n) - 2r)^2 + 4 mu^2 delta,
                       with mu^2/2 a positive eigenvalue of the Kodaira
                       Laplacian in degree q and twist k.

A Type 2 branch can vanish only where Q(delta) = A(delta) - delta^2 does,
and Q is a quadratic in delta with exact rational coefficients, monotone
in mu^2.  Certification therefore reduces to exact sign analysis of
quadratics, using either tabulated Laplacian eigenvalues or the certified
curvature lower bound  mu^2/2 >= max(q(k + kappa/2), (n-q)(-k + kappa/2)).
The search windows are finite because a crossing forces
|2k - 2r| <= eps(n+2) and mu^2 <= eps/4.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .exact import (
    as_fraction,
    exact_value_to_json,
    quad_nonneg_on_interval,
    quad_sign_changes,
    rational_str,
)

TYPE1 = "type1"
TYPE2_PLUS = "type2+"
TYPE2_MINUS = "type2-"

MODE_NAKANO = "nakano_certified"
MODE_EXPLICIT = "explicit_spectrum"

SF_SIGN_PAPER = "paper"  # +1 per positive-to-negative crossing
SF_SIGN_STANDARD = "standard"  # the opposite orientation

MUST_VANISH = "must_vanish"
UNCONSTRAINED = "unconstrained"

PROVENANCE_TABULATED = "tabulated"
PROVENANCE_NAKANO = "nakano_bound_only"


class UnknownCohomologyError(LookupError):
    """A cohomology dimension was requested outside the tabulated range."""


class SpectralWindowError(ValueError):
    """The spectral model does not cover the required search window."""


class SpectrumDataError(ValueError):
    """A Laplacian spectrum table is internally inconsistent."""


class IndeterminateSpectralFlow(RuntimeError):
    """The available spectral data cannot decide a sign question."""


def type2_multiplicity(e_list) -> int:
    """Alternating sum e_q - e_{q-1} + ... +- e_0 of level multiplicities.

    ``e_list[j]`` is the multiplicity of the fixed Laplacian eigenvalue in
    antiholomorphic degree j, for j = 0..q.
    """
    if not e_list:
        raise ValueError("need at least one multiplicity")
    if any(e < 0 for e in e_list):
        raise ValueError("multiplicities must be nonnegative")
    q = len(e_list) - 1
    return sum((-1) ** (q - j) * e for j, e in enumerate(e_list))


def nakano_lower_bound(q: int, k: int, kappa, n: int) -> Fraction:
    """Certified lower bound for every positive Kodaira-Laplacian
    eigenvalue mu^2/2 in degree q and twist k, given Ric >= kappa * omega:
    max(q(k + kappa/2), (n - q)(-k + kappa/2)).  Always >= 0."""
    kappa = as_fraction(kappa)
    if kappa < 0:
        raise ValueError("kappa must be >= 0")
    if not 0 <= q <= n:
        raise ValueError(f"q = {q} outside 0..{n}")
    half = kappa / 2
    return max(q * (k + half), (n - q) * (-k + half))


def spin_vanishing_predicate(q: int, k: int, kappa, n: int) -> str:
    """Vanishing of H^q(X, K^{1/2} (x) L^k) forced by the curvature bound:
    must_vanish iff (q > 0 and k > -kappa/2) or (q < n and k < kappa/2)."""
    kappa = as_fraction(kappa)
    if kappa < 0:
        raise ValueError("kappa must be >= 0")
    if not 0 <= q <= n:
        raise ValueError(f"q = {q} outside 0..{n}")
    half = kappa / 2
    if (q > 0 and k > -half) or (q < n and k < half):
        return MUST_VANISH
    return UNCONSTRAINED


class CohomologyTable:
    """Provider of h^{q,k} = dim H^q(X, K^{1/2} (x) L^k)."""

    name = "table"

    def h(self, q: int, k: int) -> int:
        raise NotImplementedError

    def is_known(self, q: int, k: int) -> bool:
        return True

    def is_lower_bound(self, q: int, k: int) -> bool:
        return False


@dataclass(frozen=True)
class LaplacianSpectrum:
    """Tabulated positive Kodaira-Laplacian eigenvalues per (q, k).

    ``entries[(q, k)]`` is an ascending tuple of (mu^2/2, multiplicity);
    a (q, k) inside the declared window with no entry has no positive
    eigenvalue below the cutoff.  ``provenance`` records whether the data
    is a genuine table or the bound-only placeholder.
    """

    provenance: str = PROVENANCE_NAKANO
    entries: dict = field(default_factory=dict)
    half_mu_sq_max: Fraction | None = None
    k_range: tuple | None = None

    @property
    def is_tabulated(self) -> bool:
        return self.provenance == PROVENANCE_TABULATED

    def covers(self, q: int, k: int) -> bool:
        if self.k_range is None:
            return False
        lo, hi = self.k_range
        return lo <= k <= hi

    def eigenvalues(self, q: int, k: int):
        return self.entries.get((q, k), ())

    def multiplicity_of(self, q: int, k: int, half_mu_sq) -> int:
        for half, mult in self.eigenvalues(q, k):
            if half == half_mu_sq:
                return mult
        return 0


NAKANO_ONLY = LaplacianSpectrum()


@dataclass
class SpectralModel:
    """Everything the engine needs about a base manifold: the complex
    dimension, the Ricci lower bound (None for non-Fano entries), the
    cohomology table and an optional explicit Laplacian spectrum."""

    name: str
    n: int
    kappa: Fraction | None
    table: CohomologyTable
    spectrum: LaplacianSpectrum = NAKANO_ONLY

    @property
    def mode(self) -> str:
        return MODE_EXPLICIT if self.spectrum.is_tabulated else MODE_NAKANO


@dataclass(frozen=True)
class EigenvalueFamily:
    """One eigenvalue family of the deformed Dirac operator.

    For Type 2 in bound-only mode, ``half_mu_sq`` carries the Nakano lower
    bound rather than an actual eigenvalue (``half_mu_sq_is_bound``) and
    the multiplicity is unknown (None); certification is monotone in
    mu^2, so a bound-level certificate covers every actual eigenvalue.
    """

    kind: str
    q: int
    k: int
    n: int
    multiplicity: int | None
    half_mu_sq: Fraction | None = None
    half_mu_sq_is_bound: bool = False
    mult_is_lower_bound: bool = False

    def label(self) -> str:
        extra = ""
        if self.half_mu_sq is not None:
            tag = "bound" if self.half_mu_sq_is_bound else "mu^2/2"
            extra = f", {tag}={self.half_mu_sq}"
        return f"{self.kind}(q={self.q}, k={self.k}{extra})"

    def type1_affine(self, r):
        """(value at delta=0, slope) of the Type 1 eigenvalue."""
        if self.kind != TYPE1:
            raise ValueError("not a Type 1 family")
        s = (-1) ** self.q
        a0 = s * (self.k - as_fraction(r))
        slope = -s * (Fraction(self.q) - Fraction(self.n, 2))
        return a0, slope

    def quad_coefficients(self, r):
        """(c2, c1, c0) of Q(delta) = A(delta) - delta^2 for Type 2."""
        if self.kind == TYPE1:
            raise ValueError("not a Type 2 family")
        B = 2 * (self.k - as_fraction(r))
        C = 2 * self.q + 1 - self.n
        half = self.half_mu_sq
        return Fraction(C * C - 1), 8 * half - 2 * B * C, B * B

    def to_json(self):
        data = {"kind": self.kind, "q": self.q, "k": self.k}
        if self.kind == TYPE1:
            data["muSq"] = None
        else:
            data["muSq"] = rational_str(2 * self.half_mu_sq)
            if self.half_mu_sq_is_bound:
                data["muSqIsBound"] = True
        data["multiplicity"] = self.multiplicity
        if self.mult_is_lower_bound:
            data["multiplicityIsLowerBound"] = True
        return data


CERTIFIED = "certified"
CROSSING = "crossing"
INDETERMINATE = "indeterminate"


@dataclass(frozen=True)
class CertOutcome:
    """Result of certifying a single family on (0, eps].

    ``crossings`` holds (delta_star, direction) pairs with direction +1
    for a positive-to-negative crossing as delta increases; zeros at the
    endpoints are reported separately and never counted as flow.
    """

    status: str
    crossings: tuple = ()
    zero_at_start: bool = False
    zero_at_eps: bool = False
    touch_points: tuple = ()
    note: str = ""


def certify_no_crossing(family: EigenvalueFamily, r, eps) -> CertOutcome:
    """Exact sign certification of one eigenvalue family on (0, eps].

    Type 1 families are affine in delta; Type 2 families reduce to the
    quadratic Q(delta) = A(delta) - delta^2, whose nonnegativity pins the
    sign of the vulnerable branch.  With a Nakano bound in place of the
    eigenvalue, a nonnegative verdict is still a certificate (Q grows
    with mu^2) while a negative one is only inconclusive.
    """
    r = as_fraction(r)
    eps = as_fraction(eps)
    if eps <= 0:
        raise ValueError("eps must be positive")
    if family.n % 2:
        raise ValueError("only even complex dimension is supported")

    if family.kind == TYPE1:
        a0, slope = family.type1_affine(r)
        if slope == 0:
            if a0 == 0:
                return CertOutcome(
                    CERTIFIED,
                    zero_at_start=True,
                    zero_at_eps=True,
                    note="identically zero family (q = n/2, k = r)",
                )
            return CertOutcome(CERTIFIED)
        root = -a0 / slope
        if root <= 0:
            return CertOutcome(CERTIFIED, zero_at_start=root == 0)
        if root < eps:
            direction = 1 if a0 > 0 else -1
            return CertOutcome(CROSSING, crossings=((root, direction),))
        return CertOutcome(CERTIFIED, zero_at_eps=root == eps)

    # Type 2: only one branch per parity can reach zero
    vulnerable = (family.q % 2 == 0) == (family.kind == TYPE2_PLUS)
    if not vulnerable:
        return CertOutcome(CERTIFIED, note="strictly signed branch")

    c2, c1, c0 = family.quad_coefficients(r)
    verdict = quad_nonneg_on_interval(c2, c1, c0, eps)
    if verdict.is_nonnegative:
        if verdict.identically_zero:
            return CertOutcome(
                CERTIFIED,
                zero_at_start=True,
                zero_at_eps=True,
                note="radicand identity: branch vanishes identically",
            )
        start = any(root == 0 for root in verdict.roots)
        end = any(root == eps for root in verdict.roots)
        interior = tuple(root for root in verdict.roots if 0 < root < eps)
        return CertOutcome(
            CERTIFIED, zero_at_start=start, zero_at_eps=end, touch_points=interior
        )

    if family.half_mu_sq_is_bound:
        return CertOutcome(
            INDETERMINATE,
            note=(
                "curvature bound too weak to certify; supply an explicit "
                "spectrum or restrict to |r| <= kappa/2"
            ),
        )

    changes = quad_sign_changes(c2, c1, c0, eps)
    parity = 1 if family.q % 2 == 0 else -1
    crossings = tuple((root, -transition * parity) for root, transition in changes)
    q_at_eps = (c2 * eps + c1) * eps + c0
    outcome = CROSSING if crossings else CERTIFIED
    return CertOutcome(
        outcome,
        crossings=crossings,
        zero_at_start=c0 == 0,
        zero_at_eps=q_at_eps == 0,
    )


ON_UNKNOWN_ERROR = "error"
ON_UNKNOWN_SKIP = "skip"


def _k_interval(center: Fraction, radius: Fraction):
    return math.ceil(center - radius), math.floor(center + radius)


def enumerate_families(model: SpectralModel, r, eps, window_factor=1,
                       on_unknown=ON_UNKNOWN_ERROR):
    """All eigenvalue families that could possibly change sign on (0, eps].

    Type 1 needs |k - r| <= eps*n/2; a Type 2 crossing needs
    |2k - 2r| <= eps(n + 2) and mu^2 <= eps/4 (both follow from
    A(delta) <= delta^2 at a crossing).  ``window_factor`` widens the
    windows for soundness testing.  Returns (families, skipped, window)
    where ``skipped`` describes entries omitted under on_unknown="skip".
    """
    r = as_fraction(r)
    eps = as_fraction(eps)
    if eps <= 0:
        raise ValueError("eps must be positive")
    factor = as_fraction(window_factor)
    n = model.n
    families = []
    skipped = []

    def handle_unknown(message):
        if on_unknown == ON_UNKNOWN_SKIP:
            skipped.append(message)
            return True
        raise UnknownCohomologyError(message)

    type1_radius = eps * n / 2 * factor
    k_lo, k_hi = _k_interval(r, type1_radius)
    for q in range(n + 1):
        for k in range(k_lo, k_hi + 1):
            if not model.table.is_known(q, k):
                handle_unknown(
                    f"h^{{{q},{k}}} unknown in table {model.table.name!r}"
                )
                continue
            mult = model.table.h(q, k)
            if mult:
                families.append(
                    EigenvalueFamily(
                        TYPE1,
                        q,
                        k,
                        n,
                        mult,
                        mult_is_lower_bound=model.table.is_lower_bound(q, k),
                    )
                )

    type2_radius = eps * (n + 2) / 2 * factor
    half_mu_max = eps / 8 * factor
    k2_lo, k2_hi = _k_interval(r, type2_radius)
    window = {
        "type1_k": [k_lo, k_hi],
        "type2_k": [k2_lo, k2_hi],
        "half_mu_sq_max": rational_str(half_mu_max),
        "factor": rational_str(factor),
    }

    if model.spectrum.is_tabulated:
        spectrum = model.spectrum
        if spectrum.half_mu_sq_max is None or spectrum.half_mu_sq_max < half_mu_max:
            raise SpectralWindowError(
                f"spectrum cutoff mu^2/2 <= {spectrum.half_mu_sq_max} below the "
                f"required {half_mu_max} for eps = {eps}"
            )
        for q in range(n + 1):
            for k in range(k2_lo, k2_hi + 1):
                if not spectrum.covers(q, k):
                    handle_unknown(
                        f"Laplacian spectrum missing (q={q}, k={k}); "
                        f"covered k-range is {spectrum.k_range}"
                    )
                    continue
                for half, _ in spectrum.eigenvalues(q, k):
                    if half > half_mu_max:
                        break
                    e_levels = [
                        spectrum.multiplicity_of(j, k, half) for j in range(q + 1)
                    ]
                    d = type2_multiplicity(e_levels)
                    if d < 0:
                        raise SpectrumDataError(
                            f"negative alternating multiplicity {d} at "
                            f"(q={q}, k={k}, mu^2/2={half})"
                        )
                    if d == 0:
                        continue
                    for kind in (TYPE2_PLUS, TYPE2_MINUS):
                        families.append(
                            EigenvalueFamily(kind, q, k, n, d, half_mu_sq=half)
                        )
    else:
        if model.kappa is None:
            handle_unknown(
                "Type 2 certification needs a Ricci lower bound or an "
                "explicit Laplacian spectrum"
            )
        else:
            for q in range(n + 1):
                for k in range(k2_lo, k2_hi + 1):
                    lam = nakano_lower_bound(q, k, model.kappa, n)
                    if lam > half_mu_max:
                        continue  # no eigenvalue can enter the window
                    for kind in (TYPE2_PLUS, TYPE2_MINUS):
                        families.append(
                            EigenvalueFamily(
                                kind,
                                q,
                                k,
                                n,
                                None,
                                half_mu_sq=lam,
                                half_mu_sq_is_bound=True,
                            )
                        )
    return families, skipped, window


@dataclass(frozen=True)
class Crossing:
    family: EigenvalueFamily
    delta_star: object  # Fraction or SqrtValue
    direction: int  # +1 = positive-to-negative as delta increases
    multiplicity: int

    def to_json(self):
        data = self.family.to_json()
        data["delta_star"] = exact_value_to_json(self.delta_star)
        data["direction"] = self.direction
        data["multiplicity"] = self.multiplicity
        return data


@dataclass(frozen=True)
class EndpointZero:
    family: EigenvalueFamily
    where: str  # "start" or "eps"
    multiplicity: int | None

    def to_json(self):
        data = self.family.to_json()
        data["where"] = self.where
        data["multiplicity"] = self.multiplicity
        return data


@dataclass
class SpectralFlowReport:
    """Outcome of the flow computation over (0, eps].

    ``total_paper`` counts a positive-to-negative crossing as +1 (and a
    negative-to-positive one as -1), each weighted by multiplicity;
    ``total_standard`` is its negative.  ``indeterminate`` lists families
    the available data could not certify; when nonempty no total should
    be quoted (``is_exact`` is False).
    """

    mode: str
    sf_sign: str
    crossings: list
    endpoint_zeros: list
    touch_points: list
    indeterminate: list
    skipped: list
    window: dict
    total_paper: int

    @property
    def total_standard(self) -> int:
        return -self.total_paper

    @property
    def total(self) -> int:
        return (
            self.total_paper if self.sf_sign == SF_SIGN_PAPER else self.total_standard
        )

    @property
    def is_exact(self) -> bool:
        return not self.indeterminate

    @property
    def partial(self) -> bool:
        return bool(self.skipped)

    def to_json(self):
        return {
            "mode": self.mode,
            "sf_sign": self.sf_sign,
            "total": self.total if self.is_exact else None,
            "total_paper": self.total_paper if self.is_exact else None,
            "total_standard": self.total_standard if self.is_exact else None,
            "crossings": [c.to_json() for c in self.crossings],
            "endpoint_zeros": [z.to_json() for z in self.endpoint_zeros],
            "touch_points": [
                dict(f.to_json(), delta=exact_value_to_json(d))
                for f, d in self.touch_points
            ],
            "indeterminate": list(self.indeterminate),
            "partial": self.partial,
            "skipped": list(self.skipped),
            "window": dict(self.window),
        }


def _sort_key(family: EigenvalueFamily):
    return (family.q, family.k, family.kind, family.half_mu_sq or 0)


def spectral_flow(model: SpectralModel, r, eps, *, sf_sign=SF_SIGN_PAPER,
                  window_factor=1, on_unknown=ON_UNKNOWN_ERROR) -> SpectralFlowReport:
    """Signed count of eigenvalue crossings over delta in (0, eps].

    Enumerates every family in the finite search window, certifies each
    one exactly, and sums direction * multiplicity over the crossings.
    Endpoint zeros count toward the kernel, not the flow.
    """
    if sf_sign not in (SF_SIGN_PAPER, SF_SIGN_STANDARD):
        raise ValueError(f"unknown sf sign convention {sf_sign!r}")
    families, skipped, window = enumerate_families(
        model, r, eps, window_factor=window_factor, on_unknown=on_unknown
    )
    crossings = []
    endpoint_zeros = []
    touch_points = []
    indeterminate = []
    total = 0
    for family in sorted(families, key=_sort_key):
        outcome = certify_no_crossing(family, r, eps)
        if outcome.status == INDETERMINATE:
            indeterminate.append(f"{family.label()}: {outcome.note}")
            continue
        for delta_star, direction in outcome.crossings:
            crossings.append(Crossing(family, delta_star, direction,
                                      family.multiplicity))
            total += direction * family.multiplicity
        if outcome.zero_at_start:
            endpoint_zeros.append(EndpointZero(family, "start",
                                               family.multiplicity))
        if outcome.zero_at_eps:
            endpoint_zeros.append(EndpointZero(family, "eps",
                                               family.multiplicity))
        for point in outcome.touch_points:
            touch_points.append((family, point))
    return SpectralFlowReport(
        mode=model.mode,
        sf_sign=sf_sign,
        crossings=crossings,
        endpoint_zeros=endpoint_zeros,
        touch_points=touch_points,
        indeterminate=indeterminate,
        skipped=skipped,
        window=window,
        total_paper=total,
    )


def kernel_dimension(model: SpectralModel, r, eps,
                     on_unknown=ON_UNKNOWN_ERROR) -> int:
    """dim ker of the deformed operator at delta = eps (exact zero tests).

    Sums h^{q,k} over Type 1 zeros and the alternating multiplicities
    over Type 2 zeros at eps.  In bound-only mode a Type 2 zero would
    need mu^2/2 equal to a specific value half_star; if that value is
    positive and consistent with the Nakano bound the data cannot decide,
    and IndeterminateSpectralFlow is raised rather than guessed.
    """
    r = as_fraction(r)
    eps = as_fraction(eps)
    if eps <= 0:
        raise ValueError("eps must be positive")
    n = model.n
    total = 0
    skipped = []

    def handle_unknown(message):
        if on_unknown == ON_UNKNOWN_SKIP:
            skipped.append(message)
            return True
        raise UnknownCohomologyError(message)

    # Type 1 zeros at eps: k = r + eps (q - n/2) must be an integer
    for q in range(n + 1):
        kv = r + eps * (Fraction(q) - Fraction(n, 2))
        if kv.denominator != 1:
            continue
        k = int(kv)
        if not model.table.is_known(q, k):
            handle_unknown(f"h^{{{q},{k}}} unknown in table {model.table.name!r}")
            continue
        total += model.table.h(q, k)

    # Type 2 zeros at eps: Q(eps) = 0 on the vulnerable branch
    type2_radius = eps * (n + 2) / 2
    half_mu_max = eps / 8
    k_lo, k_hi = _k_interval(r, type2_radius)
    if model.spectrum.is_tabulated:
        spectrum = model.spectrum
        if spectrum.half_mu_sq_max is None or spectrum.half_mu_sq_max < half_mu_max:
            raise SpectralWindowError(
                f"spectrum cutoff below mu^2/2 = {half_mu_max} needed at eps={eps}"
            )
        for q in range(n + 1):
            for k in range(k_lo, k_hi + 1):
                if not spectrum.covers(q, k):
                    handle_unknown(f"Laplacian spectrum missing (q={q}, k={k})")
                    continue
                B = 2 * (k - r)
                C = 2 * q + 1 - n
                for half, _ in spectrum.eigenvalues(q, k):
                    if half > half_mu_max:
                        break
                    q_eps = (B - C * eps) ** 2 + 8 * half * eps - eps * eps
                    if q_eps == 0:
                        e_levels = [
                            spectrum.multiplicity_of(j, k, half)
                            for j in range(q + 1)
                        ]
                        total += type2_multiplicity(e_levels)
    else:
        if model.kappa is None:
            handle_unknown("Type 2 kernel test needs a Ricci bound or spectrum")
        else:
            for q in range(n + 1):
                for k in range(k_lo, k_hi + 1):
                    lam = nakano_lower_bound(q, k, model.kappa, n)
                    if lam > half_mu_max:
                        continue
                    B = 2 * (k - r)
                    C = 2 * q + 1 - n
                    # the unique eigenvalue that would vanish at eps
                    half_star = (eps * eps - (B - C * eps) ** 2) / (8 * eps)
                    if half_star > 0 and half_star >= lam:
                        raise IndeterminateSpectralFlow(
                            f"kernel at eps={eps} hinges on whether mu^2/2 = "
                            f"{half_star} occurs at (q={q}, k={k}); supply an "
                            "explicit spectrum"
                        )
    return total
