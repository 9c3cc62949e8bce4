"""Exact real numbers in a single real quadratic field Q(sqrt(d)).

Every action, level and capacity in the package is an :class:`Exact`.  A
value is stored as ``(a + b*sqrt(d)) / c`` with integers ``a, b, c`` and a
square-free ``d > 1``; rationals use ``b = 0, d = 1``.  Comparisons are
decided by integer sign tests, never by floating point.
"""

from __future__ import annotations

import math
import re
from fractions import Fraction
from numbers import Rational
from typing import Union

__all__ = [
    "Exact",
    "FieldMismatchError",
    "ExactParseError",
    "quad_sign",
    "squarefree_split",
    "parse_exact",
    "as_exact",
]


class FieldMismatchError(ValueError):
    """Two values live in different quadratic fields."""


class ExactParseError(ValueError):
    def __init__(self, message: str, text: str, position: int):
        super().__init__(f"{message} at position {position}: {text!r}")
        self.text = text
        self.position = position


def quad_sign(a: int, b: int, d: int) -> int:
    """Sign of ``a + b*sqrt(d)`` for integers, ``d`` a non-square or ``b == 0``."""
    if b == 0:
        return (a > 0) - (a < 0)
    if a == 0:
        return 1 if b > 0 else -1
    if a > 0 and b > 0:
        return 1
    if a < 0 and b < 0:
        return -1
    lhs = a * a
    rhs = b * b * d
    if a > 0:
        return 1 if lhs > rhs else -1
    return 1 if rhs > lhs else -1


def squarefree_split(n: int) -> tuple[int, int]:
    """Write ``n = s**2 * r`` with ``r`` square-free; return ``(s, r)``."""
    if n <= 0:
        raise ValueError(f"expected a positive integer, got {n}")
    s, r = 1, 1
    m = n
    p = 2
    while p * p <= m:
        e = 0
        while m % p == 0:
            m //= p
            e += 1
        s *= p ** (e // 2)
        if e % 2:
            r *= p
        p += 1
    return s, r * m


Number = Union["Exact", int, Fraction]


class Exact:
    __slots__ = ("a", "b", "c", "d")

    def __init__(self, rational: Union[int, Fraction, str] = 0,
                 sqrt_coeff: Union[int, Fraction, str] = 0, d: int = 1):
        p = Fraction(rational)
        q = Fraction(sqrt_coeff)
        if q != 0:
            if d < 1:
                raise ValueError(f"radicand must be positive, got {d}")
            s, d = squarefree_split(d)
            q *= s
            if d == 1:
                p, q = p + q, Fraction(0)
        if q == 0:
            d = 1
        c = p.denominator * q.denominator // math.gcd(p.denominator, q.denominator)
        a = p.numerator * (c // p.denominator)
        b = q.numerator * (c // q.denominator)
        self._set(a, b, c, d)

    def _set(self, a: int, b: int, c: int, d: int) -> None:
        if c < 0:
            a, b, c = -a, -b, -c
        if b == 0:
            d = 1
        g = math.gcd(math.gcd(a, b), c)
        if g > 1:
            a //= g
            b //= g
            c //= g
        self.a, self.b, self.c, self.d = a, b, c, d

    @classmethod
    def from_parts(cls, a: int, b: int, c: int, d: int) -> "Exact":
        """Build ``(a + b*sqrt(d))/c`` from integers; ``d`` must already be square-free."""
        if c == 0:
            raise ZeroDivisionError("zero denominator")
        obj = object.__new__(cls)
        obj._set(a, b, c, d)
        return obj

    # -- structure -------------------------------------------------------

    @property
    def is_rational(self) -> bool:
        return self.b == 0

    @property
    def rational_part(self) -> Fraction:
        return Fraction(self.a, self.c)

    @property
    def sqrt_coeff(self) -> Fraction:
        return Fraction(self.b, self.c)

    @property
    def field(self) -> int:
        """Radicand of the smallest field containing the value (1 for Q)."""
        return self.d

    def _field_with(self, other: "Exact") -> int:
        if self.d == other.d or other.d == 1:
            return self.d
        if self.d == 1:
            return other.d
        raise FieldMismatchError(
            f"values lie in Q(sqrt({self.d})) and Q(sqrt({other.d}))")

    # -- arithmetic ------------------------------------------------------

    def __add__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        d = self._field_with(other)
        return Exact.from_parts(self.a * other.c + other.a * self.c,
                                self.b * other.c + other.b * self.c,
                                self.c * other.c, d)

    __radd__ = __add__

    def __neg__(self):
        return Exact.from_parts(-self.a, -self.b, self.c, self.d)

    def __pos__(self):
        return self

    def __sub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def __mul__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        d = self._field_with(other)
        return Exact.from_parts(self.a * other.a + self.b * other.b * d,
                                self.a * other.b + self.b * other.a,
                                self.c * other.c, d)

    __rmul__ = __mul__

    def inverse(self) -> "Exact":
        norm = self.a * self.a - self.b * self.b * self.d
        if norm == 0:
            raise ZeroDivisionError("inverse of zero")
        return Exact.from_parts(self.c * self.a, -self.c * self.b, norm, self.d)

    def __truediv__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __rtruediv__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return other * self.inverse()

    def __abs__(self):
        return -self if self.sign() < 0 else self

    # -- ordering --------------------------------------------------------

    def sign(self) -> int:
        return quad_sign(self.a, self.b, self.d)

    def _cmp(self, other) -> int:
        other = _coerce(other)
        if other is NotImplemented:
            return None
        d = self._field_with(other)
        return quad_sign(self.a * other.c - other.a * self.c,
                         self.b * other.c - other.b * self.c, d)

    def __eq__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return (self.a, self.b, self.c, self.d) == (other.a, other.b, other.c, other.d)

    def __lt__(self, other):
        s = self._cmp(other)
        return NotImplemented if s is None else s < 0

    def __le__(self, other):
        s = self._cmp(other)
        return NotImplemented if s is None else s <= 0

    def __gt__(self, other):
        s = self._cmp(other)
        return NotImplemented if s is None else s > 0

    def __ge__(self, other):
        s = self._cmp(other)
        return NotImplemented if s is None else s >= 0

    def __hash__(self):
        if self.b == 0:
            return hash(Fraction(self.a, self.c))
        return hash((self.a, self.b, self.c, self.d))

    def __bool__(self):
        return self.a != 0 or self.b != 0

    # -- rounding and rendering ------------------------------------------

    def __floor__(self) -> int:
        # (a + b*sqrt(d)) / c with sqrt(b^2 d) in [r, r+1); irrational part never an integer
        if self.b == 0:
            return self.a // self.c
        r = math.isqrt(self.b * self.b * self.d)
        if self.b > 0:
            return (self.a + r) // self.c
        return (self.a - r - 1) // self.c

    def __ceil__(self) -> int:
        return -math.floor(-self)

    def __float__(self) -> float:
        if self.b == 0:
            return self.a / self.c
        return (self.a + self.b * math.sqrt(self.d)) / self.c

    def interval(self, digits: int = 13) -> tuple[Fraction, Fraction]:
        """Certified enclosure ``lo <= self <= hi`` with ``hi - lo = 10**-digits``."""
        scale = 10 ** digits
        n = math.floor(self * scale)
        return Fraction(n, scale), Fraction(n + 1, scale)

    def decimal(self, digits: int = 12) -> str:
        """Decimal string truncated toward minus infinity; error below 10**-digits."""
        scale = 10 ** digits
        n = math.floor(self * scale)
        sign = "-" if n < 0 else ""
        whole, frac = divmod(abs(n), scale)
        return f"{sign}{whole}.{frac:0{digits}d}"

    def __str__(self):
        p, q = self.rational_part, self.sqrt_coeff
        if q == 0:
            return str(p)
        rad = f"sqrt({self.d})" if q == 1 else f"{q}*sqrt({self.d})"
        if p == 0:
            return rad if q != -1 else f"-sqrt({self.d})"
        if q == -1:
            return f"{p}-sqrt({self.d})"
        if q < 0:
            return f"{p}-{-q}*sqrt({self.d})"
        return f"{p}+{rad}"

    def __repr__(self):
        return f"Exact({str(self)!r})"

    # -- serialization ---------------------------------------------------

    def to_json(self) -> dict:
        p, q = self.rational_part, self.sqrt_coeff
        return {"p": p.numerator, "q": p.denominator,
                "sp": q.numerator, "sq": q.denominator, "d": self.d}

    @classmethod
    def from_json(cls, obj: dict) -> "Exact":
        return cls(Fraction(obj["p"], obj["q"]), Fraction(obj["sp"], obj["sq"]), obj["d"])

    def to_level_json(self) -> dict:
        p, q = self.rational_part, self.sqrt_coeff
        return {"p": p.numerator, "q": p.denominator, "sqrt_coeff_p": q.numerator,
                "sqrt_coeff_q": q.denominator, "d": self.d}

    @classmethod
    def from_level_json(cls, obj: dict) -> "Exact":
        return cls(Fraction(obj["p"], obj["q"]),
                   Fraction(obj["sqrt_coeff_p"], obj["sqrt_coeff_q"]), obj["d"])


def _coerce(x):
    if isinstance(x, Exact):
        return x
    if isinstance(x, int):
        return Exact.from_parts(x, 0, 1, 1)
    if isinstance(x, Rational):
        return Exact.from_parts(x.numerator, 0, x.denominator, 1)
    return NotImplemented


def as_exact(x) -> Exact:
    """Coerce ints, Fractions and parseable strings to :class:`Exact`."""
    if isinstance(x, str):
        return parse_exact(x)
    y = _coerce(x)
    if y is NotImplemented:
        raise TypeError(f"cannot interpret {x!r} as an exact number")
    return y


_RAT = r"[+-]?\d+(?:/\d+)?"
_TERM = re.compile(
    rf"\s*(?:(?P<p>{_RAT})(?=\s*(?:[+-]|$)))?"
    rf"\s*(?:(?P<sgn>[+-])?\s*(?:(?P<q>\d+(?:/\d+)?)\s*\*\s*)?sqrt\(\s*(?P<d>\d+)\s*\))?\s*$")


def parse_exact(text: str, offset: int = 0) -> Exact:
    """Parse ``p/q``, ``sqrt(d)``, ``r/s*sqrt(d)`` or ``p/q+r/s*sqrt(d)``.

    ``offset`` is added to error positions so callers parsing a longer
    string can report where in it the bad token starts.
    """
    m = _TERM.match(text)
    if m is None or (m.group("p") is None and m.group("d") is None):
        pos = _first_bad_char(text)
        raise ExactParseError("cannot parse exact number", text, offset + pos)
    p = Fraction(m.group("p")) if m.group("p") else Fraction(0)
    if m.group("d") is None:
        return Exact(p)
    q = Fraction(m.group("q")) if m.group("q") else Fraction(1)
    if m.group("sgn") == "-":
        q = -q
    elif m.group("sgn") is None and m.group("p") is not None:
        raise ExactParseError("missing '+' or '-' before sqrt", text, offset + m.start("d"))
    d = int(m.group("d"))
    if d == 0:
        raise ExactParseError("radicand must be positive", text, offset + m.start("d"))
    return Exact(p, q, d)


def _first_bad_char(text: str) -> int:
    allowed = set("0123456789/+-*() sqrt")
    for i, ch in enumerate(text):
        if ch not in allowed:
            return i
    return 0
