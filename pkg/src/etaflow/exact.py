"""Exact scalar arithmetic underlying every computation in this package.

Every quantity that enters a sign decision (eigenvalue crossings, spectral
flow counts, characteristic-number integrals) is represented exactly:
arbitrary-precision rationals, Gaussian rationals, polynomials in the two
formal parameters ``delta`` and ``alpha``, and algebraic values of the
shape ``a + b*sqrt(A)``.  Floating point never appears in a decision path.

Rationals are plain :class:`fractions.Fraction` (already reduced, positive
denominator); this module adds the Gaussian and polynomial layers on top.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

Rational = Fraction

ZERO = Fraction(0)
ONE = Fraction(1)


def sign(x) -> int:
    """Exact sign of a rational: -1, 0 or +1."""
    if x > 0:
        return 1
    if x < 0:
        return -1
    return 0


def as_fraction(value) -> Fraction:
    """Coerce ``value`` to an exact rational.  Floats are rejected."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, GaussianRational):
        if value.im:
            raise ValueError(f"{value} has a nonzero imaginary part")
        return value.re
    raise TypeError(f"expected an exact rational, got {type(value).__name__}")


def parse_rational(text: str) -> Fraction:
    """Parse "p/q", "-3", "2" (or an exact decimal literal like "0.5")."""
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"not a rational: {text!r}") from exc


def rational_str(q: Fraction) -> str:
    """Canonical string form "p/q", or "p" when the denominator is 1."""
    return str(as_fraction(q))


def rational_sqrt(value: Fraction) -> Fraction | None:
    """Exact square root of a nonnegative rational, or None if irrational."""
    value = as_fraction(value)
    if value < 0:
        raise ValueError("negative radicand")
    rn = math.isqrt(value.numerator)
    rd = math.isqrt(value.denominator)
    if rn * rn == value.numerator and rd * rd == value.denominator:
        return Fraction(rn, rd)
    return None


class GaussianRational:
    """Element of Q(i): exact complex number with rational real/imag parts."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        object.__setattr__(self, "re", as_fraction(re))
        object.__setattr__(self, "im", as_fraction(im))

    def __setattr__(self, name, value):
        raise AttributeError("GaussianRational is immutable")

    @staticmethod
    def coerce(value) -> "GaussianRational":
        if isinstance(value, GaussianRational):
            return value
        return GaussianRational(as_fraction(value))

    @property
    def is_real(self) -> bool:
        return self.im == 0

    def conjugate(self) -> "GaussianRational":
        return GaussianRational(self.re, -self.im)

    def norm_sq(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    def __bool__(self) -> bool:
        return bool(self.re or self.im)

    def __eq__(self, other) -> bool:
        try:
            other = GaussianRational.coerce(other)
        except TypeError:
            return NotImplemented
        return self.re == other.re and self.im == other.im

    def __hash__(self):
        # consistent with int/Fraction hashing when the value is real
        if self.im == 0:
            return hash(self.re)
        return hash((self.re, self.im))

    def __add__(self, other):
        try:
            other = GaussianRational.coerce(other)
        except TypeError:
            return NotImplemented
        return GaussianRational(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __sub__(self, other):
        try:
            other = GaussianRational.coerce(other)
        except TypeError:
            return NotImplemented
        return GaussianRational(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        return -self + other

    def __mul__(self, other):
        try:
            other = GaussianRational.coerce(other)
        except TypeError:
            return NotImplemented
        return GaussianRational(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = GaussianRational.coerce(other)
        n = other.norm_sq()
        if n == 0:
            raise ZeroDivisionError("division by zero Gaussian rational")
        num = self * other.conjugate()
        return GaussianRational(num.re / n, num.im / n)

    def __rtruediv__(self, other):
        return GaussianRational.coerce(other) / self

    def __str__(self) -> str:
        if self.im == 0:
            return rational_str(self.re)
        if self.re == 0:
            return f"{rational_str(self.im)}*i"
        op = "+" if self.im > 0 else "-"
        return f"{rational_str(self.re)}{op}{rational_str(abs(self.im))}*i"

    __repr__ = __str__

    def to_json(self):
        """Rational string when real, else {"re": ..., "im": ...}."""
        if self.im == 0:
            return rational_str(self.re)
        return {"re": rational_str(self.re), "im": rational_str(self.im)}


I = GaussianRational(0, 1)


def _as_gaussian(value) -> GaussianRational:
    return GaussianRational.coerce(value)


# monomial keys for ParamPoly: (delta exponent, alpha exponent)


def _mono_str(dd: int, da: int) -> str:
    parts = []
    if dd:
        parts.append("delta" if dd == 1 else f"delta^{dd}")
    if da:
        parts.append("alpha" if da == 1 else f"alpha^{da}")
    return "*".join(parts) if parts else "1"


class ParamPoly:
    """Polynomial in the two formal parameters delta and alpha.

    Coefficients are Gaussian rationals; keys are (delta exponent, alpha
    exponent) pairs.  Zero coefficients are never stored and instances are
    immutable, so values are safe to share.
    """

    __slots__ = ("_terms",)

    def __init__(self, terms=None):
        clean = {}
        for key, coeff in (terms or {}).items():
            dd, da = key
            if dd < 0 or da < 0:
                raise ValueError(f"negative exponent in monomial {key}")
            c = _as_gaussian(coeff)
            if c:
                clean[(int(dd), int(da))] = c
        object.__setattr__(self, "_terms", clean)

    def __setattr__(self, name, value):
        raise AttributeError("ParamPoly is immutable")

    @staticmethod
    def constant(value) -> "ParamPoly":
        return ParamPoly({(0, 0): _as_gaussian(value)})

    @staticmethod
    def zero() -> "ParamPoly":
        return ParamPoly()

    @staticmethod
    def one() -> "ParamPoly":
        return ParamPoly.constant(1)

    @staticmethod
    def delta() -> "ParamPoly":
        return ParamPoly({(1, 0): 1})

    @staticmethod
    def alpha() -> "ParamPoly":
        return ParamPoly({(0, 1): 1})

    @staticmethod
    def coerce(value) -> "ParamPoly":
        if isinstance(value, ParamPoly):
            return value
        return ParamPoly.constant(value)

    def items(self):
        return sorted(self._terms.items())

    @property
    def is_zero(self) -> bool:
        return not self._terms

    @property
    def is_constant(self) -> bool:
        return all(key == (0, 0) for key in self._terms)

    @property
    def delta_degree(self) -> int:
        return max((dd for dd, _ in self._terms), default=0)

    @property
    def alpha_degree(self) -> int:
        return max((da for _, da in self._terms), default=0)

    def constant_value(self) -> GaussianRational:
        if not self.is_constant:
            raise ValueError(f"not a constant: {self}")
        return self._terms.get((0, 0), GaussianRational(0))

    def as_rational(self) -> Fraction:
        """Constant real value; raises if delta/alpha/i survive."""
        return as_fraction(self.constant_value())

    def coefficient(self, dd: int, da: int) -> GaussianRational:
        return self._terms.get((dd, da), GaussianRational(0))

    def __eq__(self, other) -> bool:
        if not isinstance(other, ParamPoly):
            try:
                other = ParamPoly.coerce(other)
            except TypeError:
                return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        return hash(frozenset(self._terms.items()))

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __add__(self, other):
        try:
            other = ParamPoly.coerce(other)
        except TypeError:
            return NotImplemented
        terms = dict(self._terms)
        for key, c in other._terms.items():
            s = terms.get(key, GaussianRational(0)) + c
            if s:
                terms[key] = s
            else:
                terms.pop(key, None)
        return ParamPoly(terms)

    __radd__ = __add__

    def __neg__(self):
        return ParamPoly({k: -c for k, c in self._terms.items()})

    def __sub__(self, other):
        try:
            other = ParamPoly.coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return -self + other

    def __mul__(self, other):
        try:
            other = ParamPoly.coerce(other)
        except TypeError:
            return NotImplemented
        terms = {}
        for (d1, a1), c1 in self._terms.items():
            for (d2, a2), c2 in other._terms.items():
                key = (d1 + d2, a1 + a2)
                s = terms.get(key, GaussianRational(0)) + c1 * c2
                if s:
                    terms[key] = s
                else:
                    terms.pop(key, None)
        return ParamPoly(terms)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative power of a ParamPoly")
        result = ParamPoly.one()
        for _ in range(n):
            result = result * self
        return result

    def evaluate(self, delta=0, alpha=0) -> GaussianRational:
        d = _as_gaussian(delta)
        a = _as_gaussian(alpha)
        total = GaussianRational(0)
        for (dd, da), c in self._terms.items():
            term = c
            for _ in range(dd):
                term = term * d
            for _ in range(da):
                term = term * a
            total = total + term
        return total

    def subs_delta(self, value) -> "ParamPoly":
        """Substitute a rational for delta, keeping alpha formal."""
        v = as_fraction(value)
        terms = {}
        for (dd, da), c in self._terms.items():
            s = terms.get((0, da), GaussianRational(0)) + c * v**dd
            if s:
                terms[(0, da)] = s
            else:
                terms.pop((0, da), None)
        return ParamPoly(terms)

    def derivative_delta(self) -> "ParamPoly":
        return ParamPoly(
            {(dd - 1, da): c * dd for (dd, da), c in self._terms.items() if dd}
        )

    def integrate_delta_on(self, upper) -> "ParamPoly":
        """Integrate in delta over [0, upper]; the result is delta-free."""
        u = as_fraction(upper)
        terms = {}
        for (dd, da), c in self._terms.items():
            s = terms.get((0, da), GaussianRational(0)) + c * (u ** (dd + 1) / (dd + 1))
            if s:
                terms[(0, da)] = s
            else:
                terms.pop((0, da), None)
        return ParamPoly(terms)

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for (dd, da), c in self.items():
            mono = _mono_str(dd, da)
            if mono == "1":
                parts.append(str(c))
            elif c == 1:
                parts.append(mono)
            else:
                parts.append(f"({c})*{mono}")
        return " + ".join(parts)

    __repr__ = __str__

    def to_json(self):
        return {_mono_str(dd, da): c.to_json() for (dd, da), c in self.items()}


def poly_integrate_delta(p: ParamPoly, upper) -> ParamPoly:
    """Exact integral of ``p`` in delta over [0, upper] (upper >= 0)."""
    u = as_fraction(upper)
    if u < 0:
        raise ValueError("upper limit must be nonnegative")
    return p.integrate_delta_on(u)


def sqrt_sign(a, b, A) -> int:
    """Exact sign of a + b*sqrt(A) for rationals a, b and A >= 0."""
    a = as_fraction(a)
    b = as_fraction(b)
    A = as_fraction(A)
    if A < 0:
        raise ValueError("negative radicand")
    if A == 0 or b == 0:
        return sign(a)
    if a == 0:
        return sign(b)
    sa, sb = sign(a), sign(b)
    if sa == sb:
        return sa
    # opposite signs: the comparison reduces to a^2 vs b^2*A
    return sa * sign(a * a - b * b * A)


@dataclass(frozen=True)
class SqrtValue:
    """Exact algebraic value a + b*sqrt(radicand), radicand not a square."""

    a: Fraction
    b: Fraction
    radicand: Fraction

    def sign(self) -> int:
        return sqrt_sign(self.a, self.b, self.radicand)

    def cmp(self, q) -> int:
        """Sign of self - q for rational q."""
        return sqrt_sign(self.a - as_fraction(q), self.b, self.radicand)

    def __str__(self) -> str:
        return f"{self.a} + {self.b}*sqrt({self.radicand})"

    def to_json(self):
        return {
            "a": rational_str(self.a),
            "b": rational_str(self.b),
            "radicand": rational_str(self.radicand),
        }


def sqrt_value(a, b, A):
    """Build a + b*sqrt(A) exactly, folding to a Fraction when possible."""
    a = as_fraction(a)
    b = as_fraction(b)
    A = as_fraction(A)
    if A < 0:
        raise ValueError("negative radicand")
    root = rational_sqrt(A)
    if root is not None:
        return a + b * root
    if b == 0:
        return a
    return SqrtValue(a, b, A)


def exact_value_to_json(value):
    if isinstance(value, SqrtValue):
        return value.to_json()
    return rational_str(value)


def cmp_exact(value, q) -> int:
    """Sign of value - q, where value is a Fraction or SqrtValue."""
    if isinstance(value, SqrtValue):
        return value.cmp(q)
    return sign(as_fraction(value) - as_fraction(q))


QUAD_NONNEGATIVE = "nonnegative"
QUAD_TOUCHES_ZERO = "touches_zero"
QUAD_NEGATIVE = "negative_somewhere"


@dataclass(frozen=True)
class QuadVerdict:
    """Outcome of classifying c2*x^2 + c1*x + c0 on [0, hi].

    ``roots`` lists the zeros inside the interval when the polynomial is
    nonnegative there (verdict "touches_zero"); ``witness`` is a rational
    point with a strictly negative value when the verdict is
    "negative_somewhere".  An identically zero polynomial reports
    ``identically_zero`` with an empty root list.
    """

    kind: str
    roots: tuple = ()
    witness: Fraction | None = None
    identically_zero: bool = False

    @property
    def is_nonnegative(self) -> bool:
        return self.kind != QUAD_NEGATIVE


def quad_nonneg_on_interval(c2, c1, c0, hi) -> QuadVerdict:
    """Exact classification of Q(x) = c2*x^2 + c1*x + c0 on [0, hi].

    The minimum of a quadratic over a closed interval is attained at an
    endpoint or at the interior vertex, so checking those finitely many
    rational points decides nonnegativity exactly.
    """
    c2 = as_fraction(c2)
    c1 = as_fraction(c1)
    c0 = as_fraction(c0)
    hi = as_fraction(hi)
    if hi <= 0:
        raise ValueError("interval [0, hi] needs hi > 0")

    def q(x):
        return (c2 * x + c1) * x + c0

    if c2 == 0 and c1 == 0 and c0 == 0:
        return QuadVerdict(QUAD_TOUCHES_ZERO, identically_zero=True)

    candidates = [ZERO, hi]
    if c2 > 0:
        vertex = -c1 / (2 * c2)
        if 0 < vertex < hi:
            candidates.insert(0, vertex)
    for x in candidates:
        if q(x) < 0:
            return QuadVerdict(QUAD_NEGATIVE, witness=x)

    # Q >= 0 on [0, hi]; collect the zeros inside the interval.  Whenever
    # the verdict is nonnegative, any zero in the interval is rational:
    # an irrational root would force strictly negative values nearby.
    roots = []
    if c2 == 0:
        if c1 != 0:
            x0 = -c0 / c1
            if 0 <= x0 <= hi:
                roots.append(x0)
    else:
        disc = c1 * c1 - 4 * c2 * c0
        if disc == 0:
            vertex = -c1 / (2 * c2)
            if 0 <= vertex <= hi:
                roots.append(vertex)
        elif disc > 0:
            root = rational_sqrt(disc)
            if root is not None:
                r1 = (-c1 - root) / (2 * c2)
                r2 = (-c1 + root) / (2 * c2)
                roots.extend(r for r in sorted((r1, r2)) if 0 <= r <= hi)
    if roots:
        return QuadVerdict(QUAD_TOUCHES_ZERO, roots=tuple(sorted(set(roots))))
    return QuadVerdict(QUAD_NONNEGATIVE)


def quad_sign_changes(c2, c1, c0, hi):
    """Sign transitions of Q(x) = c2*x^2 + c1*x + c0 on the open (0, hi).

    Returns [(root, transition)] with transition +1 where Q passes from
    negative to positive as x increases and -1 for the reverse.  Roots are
    Fractions or SqrtValues; touch points (no sign change) are excluded.
    """
    c2 = as_fraction(c2)
    c1 = as_fraction(c1)
    c0 = as_fraction(c0)
    hi = as_fraction(hi)
    changes = []
    if c2 == 0:
        if c1 != 0:
            x0 = -c0 / c1
            if 0 < x0 < hi:
                changes.append((x0, sign(c1)))
        return changes
    disc = c1 * c1 - 4 * c2 * c0
    if disc <= 0:
        return changes
    lo_root = sqrt_value(-c1 / (2 * c2), -abs(Fraction(1) / (2 * c2)), disc)
    hi_root = sqrt_value(-c1 / (2 * c2), abs(Fraction(1) / (2 * c2)), disc)
    # rising/falling pattern: for c2 > 0 the polynomial falls through the
    # smaller root and rises through the larger; reversed for c2 < 0
    pattern = [(lo_root, -sign(c2)), (hi_root, sign(c2))]
    for root, transition in pattern:
        if cmp_exact(root, 0) > 0 and cmp_exact(root, hi) < 0:
            changes.append((root, transition))
    return changes
