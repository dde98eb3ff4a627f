"""Exact nonnegative rational costs with a distinguished infinity.

All cost arithmetic in this package goes through :class:`ExtendedRational`.
Finite values are stored as reduced ``fractions.Fraction`` objects and are
required to be nonnegative.  Infinity is a tag, not a large number, and
multiplication follows the convention ``0 * inf == inf * 0 == 0``.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Union

RatLike = Union[int, Fraction, "ExtendedRational", str]


class ExtendedRational:
    """A nonnegative rational number or infinity, with exact arithmetic."""

    __slots__ = ("_frac",)

    _frac: Fraction | None  # None encodes infinity

    def __init__(self, value: RatLike = 0, denominator: int | None = None):
        if denominator is not None:
            value = Fraction(value, denominator)  # type: ignore[arg-type]
        if isinstance(value, ExtendedRational):
            object.__setattr__(self, "_frac", value._frac)
            return
        if isinstance(value, str):
            object.__setattr__(self, "_frac", _parse_frac(value))
            return
        frac = Fraction(value)
        if frac < 0:
            raise ValueError(f"costs must be nonnegative, got {frac}")
        object.__setattr__(self, "_frac", frac)

    def __setattr__(self, name, value):
        raise AttributeError("ExtendedRational is immutable")

    @classmethod
    def infinity(cls) -> "ExtendedRational":
        obj = cls.__new__(cls)
        object.__setattr__(obj, "_frac", None)
        return obj

    @property
    def is_infinite(self) -> bool:
        return self._frac is None

    @property
    def is_zero(self) -> bool:
        return self._frac == 0

    def as_fraction(self) -> Fraction:
        if self._frac is None:
            raise ValueError("infinite cost has no finite value")
        return self._frac

    def __add__(self, other: RatLike) -> "ExtendedRational":
        other = _coerce(other)
        if self._frac is None or other._frac is None:
            return INF
        return _finite(self._frac + other._frac)

    __radd__ = __add__

    def __mul__(self, other: RatLike) -> "ExtendedRational":
        other = _coerce(other)
        if self._frac == 0 or other._frac == 0:
            return ZERO
        if self._frac is None or other._frac is None:
            return INF
        return _finite(self._frac * other._frac)

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        try:
            other = _coerce(other)
        except (TypeError, ValueError):
            return NotImplemented
        return self._frac == other._frac

    def __lt__(self, other: RatLike) -> bool:
        other = _coerce(other)
        if self._frac is None:
            return False
        if other._frac is None:
            return True
        return self._frac < other._frac

    def __le__(self, other: RatLike) -> bool:
        other = _coerce(other)
        return self == other or self < other

    def __gt__(self, other: RatLike) -> bool:
        return _coerce(other) < self

    def __ge__(self, other: RatLike) -> bool:
        other = _coerce(other)
        return self == other or other < self

    def __hash__(self) -> int:
        return hash(self._frac)

    def __bool__(self) -> bool:
        return self._frac != 0

    def __str__(self) -> str:
        return format_rational(self)

    def __repr__(self) -> str:
        return f"ExtendedRational({format_rational(self)!r})"


def _finite(frac: Fraction) -> ExtendedRational:
    obj = ExtendedRational.__new__(ExtendedRational)
    object.__setattr__(obj, "_frac", frac)
    return obj


def _coerce(value: RatLike) -> ExtendedRational:
    if isinstance(value, ExtendedRational):
        return value
    return ExtendedRational(value)


def _parse_frac(text: str) -> Fraction | None:
    text = text.strip()
    if text == "inf":
        return None
    try:
        frac = Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"cannot parse rational {text!r}") from exc
    if frac < 0:
        raise ValueError(f"costs must be nonnegative, got {text!r}")
    return frac


def parse_rational(text: str) -> ExtendedRational:
    """Parse ``"p/q"``, ``"p"`` or ``"inf"`` into an ExtendedRational."""
    obj = ExtendedRational.__new__(ExtendedRational)
    object.__setattr__(obj, "_frac", _parse_frac(text))
    return obj


def format_rational(value: ExtendedRational | Fraction | int) -> str:
    """Format a value as ``"p/q"``, ``"p"`` or ``"inf"`` (always reduced)."""
    if isinstance(value, ExtendedRational):
        if value._frac is None:
            return "inf"
        value = value._frac
    frac = Fraction(value)
    if frac.denominator == 1:
        return str(frac.numerator)
    return f"{frac.numerator}/{frac.denominator}"


ZERO = ExtendedRational(0)
ONE = ExtendedRational(1)
INF = ExtendedRational.infinity()
