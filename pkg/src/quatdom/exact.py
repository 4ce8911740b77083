"""Exact scalars of the form ``rational * pi^(p/2) * 3^(q/2)``.

Every closed-form integral in :mod:`quatdom.closed_forms` lands in this value
domain: gammas at integer and half-integer points only ever contribute
rationals and powers of ``sqrt(pi)``, and the anti-Hermitian family adds powers
of ``sqrt(3)``.  Nothing here touches floating point except :meth:`to_float`
and :meth:`ExactValue.decimal`.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Union

import mpmath

__all__ = [
    "ExactValue",
    "HalfInt",
    "PoleError",
    "NotRepresentable",
    "as_rational",
    "gamma_exact",
    "gamma_ratio",
    "gamma_product",
    "pochhammer",
    "hyp3f2_terminating",
    "binomial_exact",
]

RationalLike = Union[int, Fraction, str, "HalfInt"]


class PoleError(ValueError):
    """A gamma or Pochhammer evaluation hit a pole."""


class NotRepresentable(ValueError):
    """The exact result leaves the rational * pi^(p/2) * 3^(q/2) domain."""


def as_rational(x) -> Fraction:
    """Coerce ``x`` to a Fraction; floats are refused to keep paths exact."""
    if isinstance(x, HalfInt):
        return x.value
    if isinstance(x, bool):
        raise TypeError("booleans are not rational parameters")
    if isinstance(x, (int, Fraction)) or isinstance(x, Rational):
        return Fraction(x)
    if isinstance(x, str):
        s = x.strip()
        if not re.fullmatch(r"[+-]?\d+(/[+-]?\d+)?", s):
            raise ValueError(f"not an exact rational: {x!r} (use integers or p/q)")
        return Fraction(s)
    raise TypeError(f"expected an exact rational, got {type(x).__name__}")


@dataclass(frozen=True, order=True)
class HalfInt:
    """An integer or half-integer, stored as twice its value."""

    twice_value: int

    @classmethod
    def of(cls, x: RationalLike) -> "HalfInt":
        v = as_rational(x) * 2
        if v.denominator != 1:
            raise ValueError(f"{x} is not a half-integer")
        return cls(int(v))

    @property
    def value(self) -> Fraction:
        return Fraction(self.twice_value, 2)

    @property
    def is_integer(self) -> bool:
        return self.twice_value % 2 == 0

    def __add__(self, other):
        if isinstance(other, HalfInt):
            return HalfInt(self.twice_value + other.twice_value)
        return HalfInt.of(self.value + as_rational(other))

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, HalfInt):
            return HalfInt(self.twice_value - other.twice_value)
        return HalfInt.of(self.value - as_rational(other))

    def __str__(self):
        return str(self.value)


@dataclass(frozen=True)
class ExactValue:
    """``coeff * pi^(pi_half_power/2) * 3^(three_half_power/2)`` in canonical form.

    Canonical form keeps ``three_half_power`` in {0, 1} (even powers of sqrt(3)
    are folded into the coefficient) and represents zero with both powers 0, so
    dataclass equality is exact equality of values.
    """

    coeff: Fraction
    pi_half_power: int = 0
    three_half_power: int = 0

    def __post_init__(self):
        c = Fraction(self.coeff)
        p, q = int(self.pi_half_power), int(self.three_half_power)
        if c == 0:
            p = q = 0
        else:
            t, q = divmod(q, 2)
            c *= Fraction(3) ** t
        object.__setattr__(self, "coeff", c)
        object.__setattr__(self, "pi_half_power", p)
        object.__setattr__(self, "three_half_power", q)

    @classmethod
    def of(cls, x) -> "ExactValue":
        if isinstance(x, ExactValue):
            return x
        return cls(as_rational(x))

    @classmethod
    def pi_power(cls, half_power: int) -> "ExactValue":
        return cls(Fraction(1), half_power)

    # arithmetic ---------------------------------------------------------

    def __mul__(self, other):
        if not isinstance(other, ExactValue):
            other = ExactValue.of(other)
        return ExactValue(
            self.coeff * other.coeff,
            self.pi_half_power + other.pi_half_power,
            self.three_half_power + other.three_half_power,
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, ExactValue):
            other = ExactValue.of(other)
        if other.coeff == 0:
            raise ZeroDivisionError("division by exact zero")
        return ExactValue(
            self.coeff / other.coeff,
            self.pi_half_power - other.pi_half_power,
            self.three_half_power - other.three_half_power,
        )

    def __rtruediv__(self, other):
        return ExactValue.of(other) / self

    def __pow__(self, k: int):
        if not isinstance(k, int):
            raise TypeError("only integer powers are exact")
        if k < 0:
            return ExactValue(1) / self ** (-k)
        return ExactValue(self.coeff**k, self.pi_half_power * k, self.three_half_power * k)

    def __neg__(self):
        return ExactValue(-self.coeff, self.pi_half_power, self.three_half_power)

    def _same_basis(self, other: "ExactValue") -> bool:
        return (self.pi_half_power, self.three_half_power) == (
            other.pi_half_power,
            other.three_half_power,
        )

    def __add__(self, other):
        if not isinstance(other, ExactValue):
            other = ExactValue.of(other)
        if self.coeff == 0:
            return other
        if other.coeff == 0:
            return self
        if not self._same_basis(other):
            raise NotRepresentable(f"cannot add {self} and {other} exactly")
        return ExactValue(self.coeff + other.coeff, self.pi_half_power, self.three_half_power)

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-ExactValue.of(other))

    def __rsub__(self, other):
        return ExactValue.of(other) - self

    # inspection / rendering --------------------------------------------

    @property
    def is_zero(self) -> bool:
        return self.coeff == 0

    def sign(self) -> int:
        return (self.coeff > 0) - (self.coeff < 0)

    def to_float(self) -> float:
        if self.coeff == 0:
            return 0.0
        return float(self.to_mpf(30))

    __float__ = to_float

    def to_mpf(self, dps: int = 30):
        with mpmath.workdps(dps):
            v = mpmath.mpf(self.coeff.numerator) / self.coeff.denominator
            if self.pi_half_power:
                v *= mpmath.sqrt(mpmath.pi) ** self.pi_half_power
            if self.three_half_power:
                v *= mpmath.sqrt(3) ** self.three_half_power
            return +v

    def decimal(self, precision: int = 12) -> str:
        """Decimal rendering with ``precision`` significant digits."""
        if self.coeff == 0:
            return "0"
        v = self.to_mpf(precision + 15)
        with mpmath.workdps(precision + 15):
            return mpmath.nstr(v, precision, strip_zeros=True, min_fixed=-6, max_fixed=15)

    def __str__(self):
        parts = [str(self.coeff)]
        if self.pi_half_power:
            parts.append(f"pi^({self.pi_half_power}/2)")
        if self.three_half_power:
            parts.append(f"3^({self.three_half_power}/2)")
        return " * ".join(parts)

    def __repr__(self):
        return f"ExactValue({self})"

    _PATTERN = re.compile(
        r"^\s*(?P<c>[+-]?\d+(?:/\d+)?)"
        r"(?:\s*\*\s*pi\^\((?P<p>[+-]?\d+)/2\))?"
        r"(?:\s*\*\s*3\^\((?P<q>[+-]?\d+)/2\))?\s*$"
    )

    @classmethod
    def parse(cls, text: str) -> "ExactValue":
        """Inverse of ``str``."""
        m = cls._PATTERN.match(text)
        if m is None:
            raise ValueError(f"not a canonical exact value: {text!r}")
        return cls(Fraction(m["c"]), int(m["p"] or 0), int(m["q"] or 0))


# gamma family ----------------------------------------------------------


def _is_nonpositive_integer(x: Fraction) -> bool:
    return x.denominator == 1 and x <= 0


def gamma_exact(x: RationalLike) -> ExactValue:
    """Gamma at an integer or half-integer argument.

    >>> str(gamma_exact(Fraction(5, 2)))
    '3/4 * pi^(1/2)'
    """
    h = HalfInt.of(x)
    v = h.value
    if h.is_integer:
        if v <= 0:
            raise PoleError(f"Gamma has a pole at {v}")
        return ExactValue(Fraction(math.factorial(int(v) - 1)))
    k = int(v - Fraction(1, 2))
    if k >= 0:
        # Gamma(k + 1/2) = (2k)! / (4^k k!) sqrt(pi)
        c = Fraction(math.factorial(2 * k), 4**k * math.factorial(k))
    else:
        k = -k
        # Gamma(1/2 - k) = (-4)^k k! / (2k)! sqrt(pi)
        c = Fraction((-4) ** k * math.factorial(k), math.factorial(2 * k))
    return ExactValue(c, 1)


def pochhammer(a: RationalLike, k: int) -> Fraction:
    """Rising factorial (a)_k."""
    if k < 0:
        raise ValueError("Pochhammer index must be nonnegative")
    a = as_rational(a)
    out = Fraction(1)
    for t in range(k):
        out *= a + t
    return out


def gamma_ratio(a: RationalLike, b: RationalLike) -> Fraction:
    """Gamma(a)/Gamma(b) for ``a - b`` an integer, exactly."""
    a, b = as_rational(a), as_rational(b)
    d = a - b
    if d.denominator != 1:
        raise NotRepresentable(f"Gamma({a})/Gamma({b}) has a non-integer shift")
    for x in (a, b):
        if _is_nonpositive_integer(x):
            raise PoleError(f"Gamma has a pole at {x}")
    d = int(d)
    if d >= 0:
        return pochhammer(b, d)
    return 1 / pochhammer(a, -d)


def gamma_product(numerators: Iterable[RationalLike], denominators: Iterable[RationalLike] = ()) -> ExactValue:
    """prod Gamma(numerators) / prod Gamma(denominators), exactly.

    Arguments are grouped by their residue mod 1.  Inside a residue class
    numerator/denominator pairs collapse to rational Pochhammer ratios, so any
    rational parameter works as long as the unmatched leftovers are integers or
    half-integers.
    """
    nums = [as_rational(x) for x in numerators]
    dens = [as_rational(x) for x in denominators]
    classes: dict[Fraction, tuple[list, list]] = {}
    for x in nums:
        classes.setdefault(x % 1, ([], []))[0].append(x)
    for x in dens:
        classes.setdefault(x % 1, ([], []))[1].append(x)

    out = ExactValue(1)
    for residue, (ns, ds) in classes.items():
        ns.sort()
        ds.sort()
        paired = min(len(ns), len(ds))
        for a, b in zip(ns[:paired], ds[:paired]):
            out = out * gamma_ratio(a, b)
        rest_n, rest_d = ns[paired:], ds[paired:]
        if (rest_n or rest_d) and residue not in (0, Fraction(1, 2)):
            raise NotRepresentable(
                f"unbalanced Gamma arguments with fractional part {residue}"
            )
        for a in rest_n:
            out = out * gamma_exact(a)
        for b in rest_d:
            out = out / gamma_exact(b)
    return out


def hyp3f2_terminating(i: int, b, c, d, e, z=-1) -> ExactValue:
    """3F2(1-i, b, c; d, e; z) for a positive integer ``i``.

    The first upper parameter is a nonpositive integer, so the series stops
    after ``i`` terms.
    """
    if int(i) != i or i < 1:
        raise ValueError("i must be a positive integer")
    i = int(i)
    b, c, d, e, z = (as_rational(t) for t in (b, c, d, e, z))
    for k in range(i - 1):
        if d + k == 0 or e + k == 0:
            raise PoleError(f"lower parameter hits zero at k={k}")
    a = Fraction(1 - i)
    total = Fraction(0)
    term = Fraction(1)
    for k in range(i):
        if k:
            den = (d + k - 1) * (e + k - 1) * k
            term *= (a + k - 1) * (b + k - 1) * (c + k - 1) * z / den
        total += term
    return ExactValue(total)


def binomial_exact(n: int, k: int) -> ExactValue:
    if not 0 <= k <= n:
        raise ValueError(f"binomial({n}, {k}) out of range")
    return ExactValue(Fraction(math.comb(n, k)))
