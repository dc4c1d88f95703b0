"""Catalog of base manifolds and their spectral data.

Two families are built in: products of projective lines (Fano, spin, any
even number of factors) with the polarization of multidegree (1, ..., 1),
and general-type hypersurfaces of even degree d > n + 2 in P^{n+1}, which
carry the counterexample twist k0 = (n + 2 - d)/2 < 0.  Line-bundle
cohomology on the products comes from the one-dimensional dimension count
combined with the Kunneth rule; hypersurface cohomology is deliberately
partial (only the constants in twist k0 are asserted).
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from .exact import as_fraction, parse_rational
from .ring import GradedClass, RingSpec
from .spectral import (
    CohomologyTable,
    LaplacianSpectrum,
    NAKANO_ONLY,
    PROVENANCE_TABULATED,
    SpectralModel,
    UnknownCohomologyError,
    nakano_lower_bound,
)


class ConfigError(ValueError):
    """A manifold configuration or data file is invalid."""


class TableValidationError(ConfigError):
    """A Laplacian table entry violates schema or curvature bounds."""


def cohomology_line_cp1(d: int):
    """(h^0, h^1) of the degree-d line bundle on the projective line."""
    h0 = d + 1 if d >= 0 else 0
    h1 = -d - 1 if d <= -2 else 0
    return h0, h1


class KunnethCohomology(CohomologyTable):
    """h^{q,k} for (P^1)^factors with the twist K^{1/2} (x) L^k, which
    restricts to degree k - 1 on every factor.  Valid for every k."""

    def __init__(self, factors: int):
        self.factors = factors
        self.name = f"kunneth[(P1)^{factors}]"

    def h(self, q: int, k: int) -> int:
        if not 0 <= q <= self.factors:
            return 0
        h0, h1 = cohomology_line_cp1(k - 1)
        return math.comb(self.factors, q) * h0 ** (self.factors - q) * h1**q


class PartialCohomology(CohomologyTable):
    """Explicitly partial table: anything not listed is unknown, and the
    listed values may be lower bounds (flagged)."""

    def __init__(self, name: str, entries: dict, lower_bounds=()):
        self.name = name
        self.entries = dict(entries)
        self.lower_bounds = set(lower_bounds)

    def h(self, q: int, k: int) -> int:
        try:
            return self.entries[(q, k)]
        except KeyError:
            raise UnknownCohomologyError(
                f"h^{{{q},{k}}} is not tabulated for {self.name!r}"
            ) from None

    def is_known(self, q: int, k: int) -> bool:
        return (q, k) in self.entries

    def is_lower_bound(self, q: int, k: int) -> bool:
        return (q, k) in self.lower_bounds


@dataclass(frozen=True)
class ManifoldSpec:
    """Base manifold data for the characteristic-class side.

    ``chern_roots`` split the holomorphic tangent bundle; ``c`` is the
    polarization class; ``kappa`` is the Ricci lower bound (None marks a
    non-Fano entry, which the Fano-only operations refuse).
    """

    name: str
    n: int
    ring: RingSpec
    chern_roots: tuple
    c: GradedClass
    kappa: Fraction | None
    canonical_root: str = ""

    def __post_init__(self):
        if self.n != self.ring.complex_dim:
            raise ValueError("dimension disagrees with the ring presentation")

    @property
    def m(self) -> int:
        return self.n // 2

    @property
    def is_fano(self) -> bool:
        return self.kappa is not None

    def require_fano(self):
        if not self.is_fano:
            raise ConfigError(
                f"{self.name!r} has no Ricci lower bound; Fano-only operation"
            )


@dataclass(frozen=True)
class HypersurfaceSpec:
    """Even-degree hypersurface in P^{n+1} with d > n + 2 (general type)."""

    n: int
    degree: int

    def __post_init__(self):
        if self.n % 2 or self.n <= 0:
            raise ConfigError("complex dimension n must be a positive even integer")
        if self.degree % 2:
            raise ConfigError("degree must be even for a spin square root")
        if self.degree <= self.n + 2:
            raise ConfigError("need degree d > n + 2 for general type")

    @property
    def ambient_dim(self) -> int:
        return self.n + 1

    @property
    def k0(self) -> int:
        return (self.n + 2 - self.degree) // 2

    @property
    def name(self) -> str:
        return f"hyp:n={self.n},d={self.degree}"


def product_cp1_model(factors: int):
    """(ManifoldSpec, CohomologyTable) for (P^1)^factors with the
    multidegree-(1,...,1) polarization.

    Ring: Q[a_1..a_s]/(a_i^2), integral of a_1...a_s equal to 1; tangent
    roots 2 a_i; c = sum a_i; Ricci bound kappa = 2 (the first Chern class
    of the anticanonical bundle equals 2c, asserted in the tests).
    """
    if factors % 2 or factors <= 0:
        raise ConfigError("the product model needs an even number of factors")
    gens = tuple(f"a{i + 1}" for i in range(factors))
    ring = RingSpec(f"(CP1)^{factors}", gens, (1,) * factors, Fraction(1))
    a = [GradedClass.generator(ring, g) for g in gens]
    c = a[0]
    for x in a[1:]:
        c = c + x
    roots = tuple(x * 2 for x in a)
    spec = ManifoldSpec(
        name=f"cp1x{factors}" if factors != 2 else "cp1xcp1",
        n=factors,
        ring=ring,
        chern_roots=roots,
        c=c,
        kappa=Fraction(2),
        canonical_root="O(" + ",".join(["-1"] * factors) + ")",
    )
    return spec, KunnethCohomology(factors)


def general_type_hypersurface_model(n: int, d: int):
    """(HypersurfaceSpec, partial table) asserting only the constants:
    h^{0,k0} >= 1 at the twist k0 = (n + 2 - d)/2 where the twisted bundle
    is trivial.  Everything else stays unknown and errors loudly."""
    spec = HypersurfaceSpec(n, d)
    table = PartialCohomology(
        spec.name, {(0, spec.k0): 1}, lower_bounds=[(0, spec.k0)]
    )
    return spec, table


def _parse_entry_field(entry, key):
    if key not in entry:
        raise TableValidationError(f"spectrum entry {entry} lacks {key!r}")
    return entry[key]


def laplacian_table_load(path, n: int, kappa) -> LaplacianSpectrum:
    """Load and validate a Laplacian spectrum table.

    Accepts either a bare JSON array of entries
    ``{"q", "k", "halfMuSq": "p/q", "mult"}`` or an object
    ``{"half_mu_sq_max": "p/q", "k_min", "k_max", "entries": [...]}``
    declaring the enumeration cutoff and covered k-range explicitly (a
    bare array infers both from the entries present).  Every entry must
    satisfy the curvature lower bound; violations are hard errors naming
    the entry.  An empty table falls back to bound-only certification.
    """
    kappa = as_fraction(kappa)
    raw = json.loads(Path(path).read_text())
    if isinstance(raw, list):
        entries_raw = raw
        declared_cutoff = None
        declared_range = None
    elif isinstance(raw, dict):
        entries_raw = raw.get("entries", [])
        declared_cutoff = raw.get("half_mu_sq_max")
        if declared_cutoff is not None:
            declared_cutoff = parse_rational(str(declared_cutoff))
        declared_range = None
        if "k_min" in raw or "k_max" in raw:
            declared_range = (int(raw["k_min"]), int(raw["k_max"]))
    else:
        raise TableValidationError("spectrum file must be a JSON array or object")

    if not entries_raw:
        return NAKANO_ONLY

    collected = {}
    for entry in entries_raw:
        q = int(_parse_entry_field(entry, "q"))
        k = int(_parse_entry_field(entry, "k"))
        half = parse_rational(str(_parse_entry_field(entry, "halfMuSq")))
        mult = int(_parse_entry_field(entry, "mult"))
        if not 0 <= q <= n:
            raise TableValidationError(f"entry (q={q}, k={k}): q outside 0..{n}")
        if half <= 0:
            raise TableValidationError(
                f"entry (q={q}, k={k}): halfMuSq must be positive, got {half}"
            )
        if mult < 1:
            raise TableValidationError(
                f"entry (q={q}, k={k}): multiplicity must be >= 1"
            )
        bound = nakano_lower_bound(q, k, kappa, n)
        if half < bound:
            raise TableValidationError(
                f"entry (q={q}, k={k}, halfMuSq={half}) violates the curvature "
                f"lower bound {bound}"
            )
        collected.setdefault((q, k), []).append((half, mult))

    entries = {}
    for key, values in collected.items():
        values.sort()
        halves = [h for h, _ in values]
        if len(set(halves)) != len(halves):
            raise TableValidationError(f"duplicate eigenvalue for (q,k)={key}")
        entries[key] = tuple(values)

    ks = [k for (_, k) in entries]
    k_range = declared_range or (min(ks), max(ks))
    cutoff = declared_cutoff
    if cutoff is None:
        cutoff = max(h for values in entries.values() for h, _ in values)
    return LaplacianSpectrum(
        provenance=PROVENANCE_TABULATED,
        entries=entries,
        half_mu_sq_max=cutoff,
        k_range=k_range,
    )


@dataclass
class CatalogEntry:
    """A resolved manifold: the characteristic-class side (when it exists)
    plus the spectral model."""

    name: str
    manifold: ManifoldSpec | None
    hypersurface: HypersurfaceSpec | None
    model: SpectralModel

    def require_manifold(self) -> ManifoldSpec:
        if self.manifold is None:
            raise ConfigError(
                f"{self.name!r} has no characteristic-class data (general-type "
                "entries support only the spectral operations)"
            )
        return self.manifold


_HYP_RE = re.compile(r"^hyp:n=(-?\d+),d=(-?\d+)$")
_CP1_RE = re.compile(r"^cp1x(\d+)$")


def _entry_from_product(factors: int, spectrum=NAKANO_ONLY) -> CatalogEntry:
    spec, table = product_cp1_model(factors)
    model = SpectralModel(spec.name, spec.n, spec.kappa, table, spectrum)
    return CatalogEntry(spec.name, spec, None, model)


def _entry_from_hypersurface(n: int, d: int) -> CatalogEntry:
    spec, table = general_type_hypersurface_model(n, d)
    model = SpectralModel(spec.name, spec.n, None, table)
    return CatalogEntry(spec.name, None, spec, model)


def load_config(path) -> CatalogEntry:
    """Build a catalog entry from a JSON config file.

    Schema: {"name", "type": "product_cp1" | "hypersurface_general_type",
    "factors" | {"n", "d"}, optional "laplacian_table": path (relative to
    the config file)}.
    """
    path = Path(path)
    try:
        cfg = json.loads(path.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read manifold config {path}: {exc}") from exc
    kind = cfg.get("type")
    if kind == "product_cp1":
        factors = cfg.get("factors")
        if not isinstance(factors, int):
            raise ConfigError("product_cp1 config needs integer 'factors'")
        entry = _entry_from_product(factors)
    elif kind == "hypersurface_general_type":
        try:
            entry = _entry_from_hypersurface(int(cfg["n"]), int(cfg["d"]))
        except KeyError as exc:
            raise ConfigError(f"hypersurface config needs key {exc}") from exc
    else:
        raise ConfigError(f"unknown manifold type {kind!r} in {path}")
    if "name" in cfg:
        entry.name = str(cfg["name"])
        entry.model.name = entry.name
    table_path = cfg.get("laplacian_table")
    if table_path:
        if entry.model.kappa is None:
            raise ConfigError(
                "laplacian tables require a Fano entry (curvature validation)"
            )
        spectrum = laplacian_table_load(
            path.parent / table_path, entry.model.n, entry.model.kappa
        )
        entry.model.spectrum = spectrum
    return entry


def resolve_manifold(text: str) -> CatalogEntry:
    """Resolve a builtin name ("cp1xcp1", "cp1x4", "hyp:n=4,d=8") or a
    config file path."""
    if text == "cp1xcp1":
        return _entry_from_product(2)
    match = _CP1_RE.match(text)
    if match:
        return _entry_from_product(int(match.group(1)))
    match = _HYP_RE.match(text)
    if match:
        return _entry_from_hypersurface(int(match.group(1)), int(match.group(2)))
    if Path(text).exists():
        return load_config(text)
    raise ConfigError(
        f"unknown manifold {text!r}: expected cp1xcp1, cp1x<2m>, "
        "hyp:n=<n>,d=<d>, or a config file path"
    )
