from __future__ import annotations

import re
from fractions import Fraction
from functools import total_ordering
from math import isqrt
from typing import Union

SQRT2 = "sqrt2"
TAU = "tau"
BASES = (SQRT2, TAU)

Number = Union[int, Fraction]

_TERM = re.compile(
    r"^(?P<a>[+-]?\d+(?:/\d+)?)?"
    r"(?:(?P<sign>[+-])?(?P<b>\d+(?:/\d+)?)?\*?(?P<unit>sqrt2|tau))?$"
)


class BasisMismatchError(ValueError):
    """Raised when values of different quadratic rings are combined."""


def _sign(value: Number) -> int:
    return (value > 0) - (value < 0)


def _sign_surd(p: Fraction, q: Fraction, d: int) -> int:
    """Exact sign of p + q*sqrt(d) for a non-square integer d > 0."""
    sp, sq = _sign(p), _sign(q)
    if sq == 0:
        return sp
    if sp == 0 or sp == sq:
        return sq if sp == 0 else sp
    diff = p * p - d * q * q
    return sp if diff > 0 else -sp


def _format_rational(value: Fraction) -> str:
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


@total_ordering
class quadVal:
    """
    Exact element a + b*beta of Q(sqrt2) or Q(tau), tau = (1 + sqrt5)/2.

    Values are immutable and hashable; all arithmetic is exact rational
    arithmetic on the two coefficients. Ordering is the order of the real
    embedding, decided without floating point.

    Parameters
    ----------
    a : int | Fraction
        Rational part.
    b : int | Fraction
        Coefficient of the irrational unit.
    basis : str
        Either "sqrt2" or "tau".

    Examples
    --------
    >>> t = quadVal(1, 1, "tau")
    >>> t * t
    quadVal(2, 3, 'tau')
    >>> quadVal(2, -1, "tau").conj()
    quadVal(1, 1, 'tau')
    """

    __slots__ = ("_a", "_b", "_basis")

    def __init__(self, a: Number = 0, b: Number = 0, basis: str = SQRT2) -> None:
        if basis not in BASES:
            raise ValueError(f"unknown basis {basis!r}, expected one of {BASES}")
        self._a = Fraction(a)
        self._b = Fraction(b)
        self._basis = basis

    @property
    def a(self) -> Fraction:
        return self._a

    @property
    def b(self) -> Fraction:
        return self._b

    @property
    def basis(self) -> str:
        return self._basis

    @classmethod
    def unit(cls, basis: str) -> quadVal:
        """The irrational unit sqrt2 or tau of the basis."""
        return cls(0, 1, basis)

    @classmethod
    def parse(cls, text: str, basis: str | None = None) -> quadVal:
        """
        Parse the canonical rendering "a+b*sqrt2" / "a+b*tau".

        Parameters
        ----------
        text : str
            Text such as "4-2*sqrt2", "1/2*tau", "-22+16*tau" or "3".
        basis : str | None, optional
            Basis to use when the text has no irrational part.
            default = None, meaning "sqrt2"

        Returns
        -------
        quadVal
            The parsed value.
        """
        match = _TERM.match(text.replace(" ", ""))
        if match is None or not any(match.group("a", "unit")):
            raise ValueError(f"cannot parse {text!r} as a quadratic value")
        a_text, sign, b_text, unit = match.group("a", "sign", "b", "unit")
        if unit is None:
            return cls(Fraction(a_text), 0, basis or SQRT2)
        if basis is not None and basis != unit:
            raise BasisMismatchError(f"{text!r} is not in basis {basis}")
        if sign is None:
            # a lone term such as "2*tau" or "-1/2*sqrt2"
            if b_text is not None:
                raise ValueError(f"cannot parse {text!r} as a quadratic value")
            return cls(0, Fraction(a_text or 1), unit)
        b = Fraction(b_text or 1)
        return cls(Fraction(a_text or 0), -b if sign == "-" else b, unit)

    def _coerce(self, other: object) -> quadVal:
        if isinstance(other, quadVal):
            if other._basis != self._basis:
                raise BasisMismatchError(
                    f"cannot combine basis {self._basis} with basis {other._basis}"
                )
            return other
        if isinstance(other, (int, Fraction)):
            return quadVal(other, 0, self._basis)
        raise TypeError(f"unsupported operand type {type(other).__name__}")

    def __repr__(self) -> str:
        return f"quadVal({_format_rational(self._a)}, {_format_rational(self._b)}, {self._basis!r})"

    def __str__(self) -> str:
        if self._b == 0:
            return _format_rational(self._a)
        magnitude = abs(self._b)
        if magnitude == 1:
            body = self._basis
        else:
            body = f"{_format_rational(magnitude)}*{self._basis}"
        if self._a == 0:
            return ("-" if self._b < 0 else "") + body
        return f"{_format_rational(self._a)}{'-' if self._b < 0 else '+'}{body}"

    def __hash__(self) -> int:
        # rational values compare equal to int and Fraction
        if self._b == 0:
            return hash(self._a)
        return hash((self._a, self._b, self._basis))

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (int, Fraction)):
            return self._b == 0 and self._a == other
        if isinstance(other, quadVal):
            return (
                self._basis == other._basis
                and self._a == other._a
                and self._b == other._b
            )
        return NotImplemented

    def __lt__(self, other: object) -> bool:
        return (self - self._coerce(other)).sign() < 0

    def __bool__(self) -> bool:
        return bool(self._a) or bool(self._b)

    def __neg__(self) -> quadVal:
        return quadVal(-self._a, -self._b, self._basis)

    def __pos__(self) -> quadVal:
        return self

    def __abs__(self) -> quadVal:
        return -self if self.sign() < 0 else self

    def __add__(self, other: object) -> quadVal:
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        return quadVal(self._a + other._a, self._b + other._b, self._basis)

    __radd__ = __add__

    def __sub__(self, other: object) -> quadVal:
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        return quadVal(self._a - other._a, self._b - other._b, self._basis)

    def __rsub__(self, other: object) -> quadVal:
        return (-self) + other

    def __mul__(self, other: object) -> quadVal:
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        a, b, c, d = self._a, self._b, other._a, other._b
        if self._basis == SQRT2:
            return quadVal(a * c + 2 * b * d, a * d + b * c, SQRT2)
        # tau^2 = tau + 1
        bd = b * d
        return quadVal(a * c + bd, a * d + b * c + bd, TAU)

    __rmul__ = __mul__

    def __truediv__(self, other: object) -> quadVal:
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        norm = other.norm()
        if norm == 0:
            raise ZeroDivisionError("division by zero in quadVal")
        numerator = self * other.conj()
        return quadVal(numerator._a / norm, numerator._b / norm, self._basis)

    def __rtruediv__(self, other: object) -> quadVal:
        return self._coerce(other) / self

    def __pow__(self, exponent: int) -> quadVal:
        if exponent < 0:
            return quadVal(1, 0, self._basis) / self ** (-exponent)
        result = quadVal(1, 0, self._basis)
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            base = base * base
            exponent >>= 1
        return result

    def conj(self) -> quadVal:
        """Algebraic conjugate: sqrt2 -> -sqrt2, tau -> 1 - tau."""
        if self._basis == SQRT2:
            return quadVal(self._a, -self._b, SQRT2)
        return quadVal(self._a + self._b, -self._b, TAU)

    def norm(self) -> Fraction:
        """Field norm x * conj(x) as an exact rational."""
        if self._basis == SQRT2:
            return self._a * self._a - 2 * self._b * self._b
        return self._a * self._a + self._a * self._b - self._b * self._b

    def _surd(self) -> tuple[Fraction, Fraction, int]:
        """Rewrite as p + q*sqrt(d) with d = 2 or d = 5."""
        if self._basis == SQRT2:
            return self._a, self._b, 2
        half_b = self._b / 2
        return self._a + half_b, half_b, 5

    def sign(self) -> int:
        """Exact sign of the real embedding, one of -1, 0, +1."""
        return _sign_surd(*self._surd())

    def is_totally_positive(self) -> bool:
        """True if the value and its conjugate are both strictly positive."""
        return self.sign() > 0 and self.conj().sign() > 0

    def is_totally_nonnegative(self) -> bool:
        return self.sign() >= 0 and self.conj().sign() >= 0

    def is_integral(self) -> bool:
        """True for elements of the rings Z[sqrt2] and Z[tau]."""
        return self._a.denominator == 1 and self._b.denominator == 1

    def compare(self, other: object) -> int:
        """Exact three-way comparison -1, 0, +1 via sign(self - other)."""
        return (self - self._coerce(other)).sign()

    def __float__(self) -> float:
        p, q, d = self._surd()
        if q == 0:
            return float(p)
        # q*sqrt(d) = sign(q) * sqrt(n/m) with n/m = q^2 * d
        square = q * q * d
        n, m = square.numerator, square.denominator
        bits = 128 + max(n.bit_length(), m.bit_length())
        while True:
            root = Fraction(isqrt(n * m << (2 * bits)), m << bits)
            approx = p + (root if q > 0 else -root)
            error = Fraction(2, m << bits)
            if approx == 0 or abs(approx) > error * (1 << 64):
                return float(approx)
            bits *= 2

    def to_float(self) -> float:
        return float(self)

    def to_text(self) -> tuple[str, str]:
        """The coefficients (a, b) rendered as "p/q" strings for CSV output."""
        return _format_rational(self._a), _format_rational(self._b)


def sqrt2() -> quadVal:
    return quadVal(0, 1, SQRT2)


def tau() -> quadVal:
    return quadVal(0, 1, TAU)
