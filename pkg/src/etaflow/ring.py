"""Truncated graded-commutative cohomology rings.

Models the even part of H^*(X; Q) for the catalog manifolds: a polynomial
ring on degree-2 generators g_1, ..., g_s with per-generator truncation
g_i^{t_i + 1} = 0, together with a normalized integral that picks off the
coefficient of the unique top-degree monomial g_1^{t_1} ... g_s^{t_s}.
Coefficients live in `exact.ParamPoly`, so classes may carry the formal
deformation parameters delta and alpha.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .exact import ParamPoly, as_fraction


class RingMismatchError(ValueError):
    """Operands belong to different rings."""


class NonNilpotentError(ValueError):
    """A nilpotent class was required but a degree-0 part is present."""


class SeriesOrderError(ValueError):
    """A series was truncated below the order needed by an evaluation."""


@dataclass(frozen=True)
class RingSpec:
    """Presentation of the ring: generators, truncations, top integral.

    Each generator has degree 2 and satisfies g_i^{truncations[i]+1} = 0;
    the product of the g_i^{t_i} spans the top degree and integrates to
    ``top_integral``.
    """

    name: str
    generators: tuple
    truncations: tuple
    top_integral: Fraction = field(default=Fraction(1))

    def __post_init__(self):
        if len(self.generators) != len(self.truncations):
            raise ValueError("one truncation exponent per generator")
        if len(set(self.generators)) != len(self.generators):
            raise ValueError("generator names must be distinct")
        if any(t < 1 for t in self.truncations):
            raise ValueError("truncation exponents must be >= 1")
        object.__setattr__(self, "top_integral", as_fraction(self.top_integral))
        if self.top_integral == 0:
            raise ValueError("top integral must be nonzero")

    @property
    def complex_dim(self) -> int:
        return sum(self.truncations)

    @property
    def top_degree(self) -> int:
        return 2 * self.complex_dim

    @property
    def top_monomial(self) -> tuple:
        return tuple(self.truncations)

    def monomial_degree(self, exps) -> int:
        return 2 * sum(exps)

    def monomial_str(self, exps) -> str:
        parts = []
        for name, e in zip(self.generators, exps):
            if e == 1:
                parts.append(name)
            elif e > 1:
                parts.append(f"{name}^{e}")
        return "*".join(parts) if parts else "1"


class GradedClass:
    """Element of a truncated ring with ParamPoly coefficients.

    Immutable; supports +, -, * (by classes, scalars, or ParamPoly) with
    truncation applied during multiplication.
    """

    __slots__ = ("ring", "_terms")

    def __init__(self, ring: RingSpec, terms=None):
        clean = {}
        for exps, coeff in (terms or {}).items():
            exps = tuple(int(e) for e in exps)
            if len(exps) != len(ring.generators):
                raise ValueError(f"monomial {exps} has wrong arity")
            if any(e < 0 for e in exps):
                raise ValueError(f"negative exponent in {exps}")
            if any(e > t for e, t in zip(exps, ring.truncations)):
                raise ValueError(f"monomial {exps} violates truncation")
            c = ParamPoly.coerce(coeff)
            if not c.is_zero:
                clean[exps] = c
        object.__setattr__(self, "ring", ring)
        object.__setattr__(self, "_terms", clean)

    def __setattr__(self, name, value):
        raise AttributeError("GradedClass is immutable")

    @staticmethod
    def zero(ring: RingSpec) -> "GradedClass":
        return GradedClass(ring)

    @staticmethod
    def one(ring: RingSpec) -> "GradedClass":
        return GradedClass(ring, {(0,) * len(ring.generators): 1})

    @staticmethod
    def generator(ring: RingSpec, name: str) -> "GradedClass":
        idx = ring.generators.index(name)
        exps = [0] * len(ring.generators)
        exps[idx] = 1
        return GradedClass(ring, {tuple(exps): 1})

    def items(self):
        return sorted(self._terms.items())

    @property
    def is_zero(self) -> bool:
        return not self._terms

    @property
    def is_nilpotent(self) -> bool:
        """No ring-degree-0 part (the coefficient of the unit monomial)."""
        unit = (0,) * len(self.ring.generators)
        return unit not in self._terms

    def coefficient(self, exps) -> ParamPoly:
        return self._terms.get(tuple(exps), ParamPoly.zero())

    def degrees(self):
        return sorted({self.ring.monomial_degree(e) for e in self._terms})

    def component(self, degree: int) -> "GradedClass":
        return GradedClass(
            self.ring,
            {
                e: c
                for e, c in self._terms.items()
                if self.ring.monomial_degree(e) == degree
            },
        )

    def _check_ring(self, other: "GradedClass"):
        if self.ring != other.ring:
            raise RingMismatchError(
                f"rings differ: {self.ring.name} vs {other.ring.name}"
            )

    def __eq__(self, other) -> bool:
        if not isinstance(other, GradedClass):
            return NotImplemented
        return self.ring == other.ring and self._terms == other._terms

    def __add__(self, other):
        if not isinstance(other, GradedClass):
            return NotImplemented
        self._check_ring(other)
        terms = dict(self._terms)
        for e, c in other._terms.items():
            s = terms.get(e, ParamPoly.zero()) + c
            if s.is_zero:
                terms.pop(e, None)
            else:
                terms[e] = s
        return GradedClass(self.ring, terms)

    def __neg__(self):
        return GradedClass(self.ring, {e: -c for e, c in self._terms.items()})

    def __sub__(self, other):
        if not isinstance(other, GradedClass):
            return NotImplemented
        return self + (-other)

    def __mul__(self, other):
        if not isinstance(other, GradedClass):
            # scalar or ParamPoly multiplication
            c = ParamPoly.coerce(other)
            return GradedClass(
                self.ring, {e: c0 * c for e, c0 in self._terms.items()}
            )
        self._check_ring(other)
        trunc = self.ring.truncations
        terms = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                if any(x > t for x, t in zip(e, trunc)):
                    continue  # monomial dies by nilpotency
                s = terms.get(e, ParamPoly.zero()) + c1 * c2
                if s.is_zero:
                    terms.pop(e, None)
                else:
                    terms[e] = s
        return GradedClass(self.ring, terms)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative power of a GradedClass")
        result = GradedClass.one(self.ring)
        for _ in range(n):
            result = result * self
        return result

    def subs_delta(self, value) -> "GradedClass":
        return GradedClass(
            self.ring, {e: c.subs_delta(value) for e, c in self._terms.items()}
        )

    def derivative_delta(self) -> "GradedClass":
        return GradedClass(
            self.ring, {e: c.derivative_delta() for e, c in self._terms.items()}
        )

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for e, c in self.items():
            mono = self.ring.monomial_str(e)
            if mono == "1":
                parts.append(f"({c})")
            else:
                parts.append(f"({c})*{mono}")
        return " + ".join(parts)

    __repr__ = __str__

    def to_json(self):
        return {self.ring.monomial_str(e): c.to_json() for e, c in self.items()}


def integrate_top(x: GradedClass) -> ParamPoly:
    """Integral over X: coefficient of the top monomial times the
    normalization; every lower-degree term contributes zero."""
    return x.coefficient(x.ring.top_monomial) * ParamPoly.constant(
        x.ring.top_integral
    )


def exp_nilpotent(x: GradedClass) -> GradedClass:
    """exp(x) = sum x^j / j! for nilpotent x; the sum is finite."""
    if not x.is_nilpotent:
        raise NonNilpotentError("exp_nilpotent needs a zero degree-0 part")
    result = GradedClass.one(x.ring)
    term = GradedClass.one(x.ring)
    j = 1
    while True:
        term = term * x * Fraction(1, j)
        if term.is_zero:
            return result
        result = result + term
        j += 1


def eval_series(f, x: GradedClass) -> GradedClass:
    """Evaluate a FormalSeries at a nilpotent class: sum f_j x^j.

    Raises SeriesOrderError when the truncation order of ``f`` is too small
    for the nilpotency degree of ``x`` (never silently truncates).
    """
    if not x.is_nilpotent:
        raise NonNilpotentError("series argument must have zero degree-0 part")
    coeffs = f.coefficients
    result = GradedClass.one(x.ring) * ParamPoly.constant(coeffs[0])
    power = GradedClass.one(x.ring)
    for j in range(1, len(coeffs)):
        power = power * x
        if power.is_zero:
            return result
        result = result + power * ParamPoly.constant(coeffs[j])
    if not (power * x).is_zero:
        raise SeriesOrderError(
            f"series order {f.order} too small for argument of nilpotency "
            f"degree > {f.order}"
        )
    return result
