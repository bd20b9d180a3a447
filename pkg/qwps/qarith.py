"""Exact q-combinatorics over Laurent polynomials in q."""
from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from typing import Any, Mapping, Sequence

import regex as re

from qwps import logging_conf
from qwps.models import PreconditionError

LOGGER = logging_conf.LOGGER

Coefficient = int | Fraction

_TERM_PATTERN = (
    r"(?P<sign>[+-])?\s*(?:(?P<coefficient>\d+(?:/\d+)?)\*)?"
    + r"q\^(?P<exponent>-?\d+)"
)


def _normalize(value: Coefficient) -> Coefficient:
    if isinstance(value, Fraction) and value.denominator == 1:
        return int(value.numerator)
    return value


class LaurentScalar:
    """
    Exact Laurent polynomial in q with rational coefficients.

    Stored as exponent -> coefficient with no zero coefficients; \
        integral coefficients are kept as int.
    """

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[int, Coefficient] | None = None) -> None:
        clean: dict[int, Coefficient] = {}
        for exponent, coefficient in (terms or {}).items():
            if isinstance(coefficient, float):
                raise TypeError("Laurent coefficients must be exact.")
            if coefficient:
                clean[int(exponent)] = _normalize(coefficient)
        self._terms = clean
        self._hash: int | None = None

    @classmethod
    def _raw(cls, terms: dict[int, Coefficient]) -> LaurentScalar:
        scalar = cls.__new__(cls)
        scalar._terms = terms
        scalar._hash = None
        return scalar

    @classmethod
    def constant(cls, value: Coefficient) -> LaurentScalar:
        return cls._raw({0: _normalize(value)} if value else {})

    @classmethod
    def q_power(cls, exponent: int, coefficient: Coefficient = 1) -> LaurentScalar:
        return cls._raw({exponent: _normalize(coefficient)} if coefficient else {})

    @classmethod
    def from_text(cls, text: str) -> LaurentScalar:
        """Parses the canonical text form produced by str()."""
        text = text.strip()
        if text == "0":
            return ZERO
        terms: dict[int, Coefficient] = {}
        for found in re.finditer(_TERM_PATTERN, text):
            coefficient = Fraction(found.group("coefficient") or 1)
            if found.group("sign") == "-":
                coefficient = -coefficient
            exponent = int(found.group("exponent"))
            terms[exponent] = terms.get(exponent, 0) + coefficient
        if not terms:
            raise PreconditionError(f"Not a Laurent polynomial: '{text}'")
        return cls(terms)

    @property
    def coefficients(self) -> dict[int, Coefficient]:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def is_zero(self) -> bool:
        return not self._terms

    def constant_term(self) -> Coefficient:
        return self._terms.get(0, 0)

    def degree_range(self) -> tuple[int, int] | None:
        if not self._terms:
            return None
        return min(self._terms), max(self._terms)

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __add__(self, other: Any) -> LaurentScalar:
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if not other._terms:
            return self
        if not self._terms:
            return other
        terms = dict(self._terms)
        for exponent, coefficient in other._terms.items():
            value = terms.get(exponent, 0) + coefficient
            if value:
                terms[exponent] = _normalize(value)
            else:
                del terms[exponent]
        return LaurentScalar._raw(terms)

    __radd__ = __add__

    def __neg__(self) -> LaurentScalar:
        return LaurentScalar._raw(
            {exponent: -value for exponent, value in self._terms.items()}
        )

    def __sub__(self, other: Any) -> LaurentScalar:
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other: Any) -> LaurentScalar:
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other: Any) -> LaurentScalar:
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if not self._terms or not other._terms:
            return ZERO
        if len(other._terms) == 1:
            ((shift, factor),) = other._terms.items()
            return LaurentScalar._raw(
                {
                    exponent + shift: _normalize(value * factor)
                    for exponent, value in self._terms.items()
                }
            )
        terms: dict[int, Coefficient] = {}
        for left_exponent, left in self._terms.items():
            for right_exponent, right in other._terms.items():
                exponent = left_exponent + right_exponent
                terms[exponent] = terms.get(exponent, 0) + left * right
        return LaurentScalar._raw(
            {
                exponent: _normalize(value)
                for exponent, value in terms.items()
                if value
            }
        )

    __rmul__ = __mul__

    def __pow__(self, exponent: int) -> LaurentScalar:
        if exponent < 0:
            raise PreconditionError("Only non-negative powers are exact.")
        result, base = ONE, self
        while exponent:
            if exponent & 1:
                result = result * base
            base = base * base
            exponent >>= 1
        return result

    def __eq__(self, other: Any) -> bool:
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    def shift(self, exponent: int) -> LaurentScalar:
        """Multiplies by q^exponent."""
        return LaurentScalar._raw(
            {key + exponent: value for key, value in self._terms.items()}
        )

    def invert_q(self) -> LaurentScalar:
        """Substitutes q -> q^{-1}."""
        return LaurentScalar._raw(
            {-key: value for key, value in self._terms.items()}
        )

    def evaluate(self, q: int | Fraction | float) -> Fraction | float:
        """
        Evaluates at q.

        Args:
            q (int | Fraction | float): The deformation parameter.

        Returns:
            Fraction | float: Exact for rational q, float for float q.
        """
        if isinstance(q, float):
            return sum(
                (float(value) * q**exponent
                 for exponent, value in self._terms.items()),
                0.0,
            )
        exact = Fraction(q)
        return sum(
            (Fraction(value) * exact**exponent
             for exponent, value in self._terms.items()),
            Fraction(0),
        )

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        parts: list[str] = []
        for exponent in sorted(self._terms):
            value = self._terms[exponent]
            magnitude = abs(value)
            body = (
                f"q^{exponent}" if magnitude == 1
                else f"{magnitude}*q^{exponent}"
            )
            if not parts:
                parts.append(("-" if value < 0 else "") + body)
            else:
                parts.append(("- " if value < 0 else "+ ") + body)
        return " ".join(parts)

    def __repr__(self) -> str:
        return f"LaurentScalar({self})"


def _coerce(value: Any) -> LaurentScalar:
    if isinstance(value, LaurentScalar):
        return value
    if isinstance(value, (int, Fraction)) and not isinstance(value, bool):
        return LaurentScalar.constant(value)
    return NotImplemented


ZERO = LaurentScalar._raw({})
ONE = LaurentScalar._raw({0: 1})
Q = LaurentScalar._raw({1: 1})


def q_int(k: int) -> LaurentScalar:
    """[k]_q = q^{k-1} + q^{k-3} + ... + q^{1-k}."""
    if k < 0:
        raise PreconditionError(f"q-integers need k >= 0, got {k}.")
    return LaurentScalar({k - 1 - 2 * j: 1 for j in range(k)})


@lru_cache(maxsize=None)
def q_factorial(k: int) -> LaurentScalar:
    if k < 0:
        raise PreconditionError(f"q-factorials need k >= 0, got {k}.")
    if k == 0:
        return ONE
    return q_factorial(k - 1) * q_int(k)


@lru_cache(maxsize=None)
def q_binomial(m: int, k: int) -> LaurentScalar:
    """
    The q-binomial [m k], built from the Pascal-type recursion \
        [m+1 k] = q^{-k}[m k] + q^{m-k+1}[m k-1].

    Raises:
        PreconditionError: Unless 0 <= k <= m.
    """
    if not 0 <= k <= m:
        raise PreconditionError(f"q-binomial needs 0 <= k <= m, got {m},{k}.")
    if k == 0 or k == m:
        return ONE
    return q_binomial(m - 1, k).shift(-k) \
        + q_binomial(m - 1, k - 1).shift(m - k)


def q_shifted(m: int, k: int) -> LaurentScalar:
    """
    The brace symbol {m k} = (1 - q^{2k+2})(1 - q^{2k+4})...(1 - q^{2m}).

    Raises:
        PreconditionError: Unless 0 <= k < m.
    """
    if not 0 <= k < m:
        raise PreconditionError(f"Brace symbol needs 0 <= k < m, got {m},{k}.")
    return q_shifted_inclusive(m, k)


def q_shifted_inclusive(m: int, k: int) -> LaurentScalar:
    """Brace symbol extended to the boundary k = m, where it is 1."""
    if not 0 <= k <= m:
        raise PreconditionError(f"Brace symbol needs 0 <= k <= m, got {m},{k}.")
    result = ONE
    for t in range(k + 1, m + 1):
        result = result * LaurentScalar({0: 1, 2 * t: -1})
    return result


def q_shifted_value(m: int, k: int, q: float) -> float:
    """Float value of the brace symbol, 1.0 when k = m."""
    result = 1.0
    for t in range(k + 1, m + 1):
        result *= 1.0 - q ** (2 * t)
    return result


class UnivariatePolynomial:
    """Polynomial in one commuting variable t with LaurentScalar coefficients."""

    __slots__ = ("coefficients",)

    def __init__(self, coefficients: Sequence[LaurentScalar | int]) -> None:
        values = [
            value if isinstance(value, LaurentScalar)
            else LaurentScalar.constant(value)
            for value in coefficients
        ]
        while values and values[-1].is_zero():
            values.pop()
        self.coefficients: tuple[LaurentScalar, ...] = tuple(values)

    @classmethod
    def variable(cls) -> UnivariatePolynomial:
        return cls([ZERO, ONE])

    @classmethod
    def constant(cls, value: LaurentScalar | int) -> UnivariatePolynomial:
        return cls([value])

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    def coefficient(self, k: int) -> LaurentScalar:
        return self.coefficients[k] if 0 <= k < len(self.coefficients) \
            else ZERO

    def _lift(self, other: Any) -> UnivariatePolynomial:
        if isinstance(other, UnivariatePolynomial):
            return other
        return UnivariatePolynomial([other])

    def __add__(self, other: Any) -> UnivariatePolynomial:
        other = self._lift(other)
        size = max(len(self.coefficients), len(other.coefficients))
        return UnivariatePolynomial(
            [self.coefficient(k) + other.coefficient(k) for k in range(size)]
        )

    __radd__ = __add__

    def __neg__(self) -> UnivariatePolynomial:
        return UnivariatePolynomial([-value for value in self.coefficients])

    def __sub__(self, other: Any) -> UnivariatePolynomial:
        return self + (-self._lift(other))

    def __rsub__(self, other: Any) -> UnivariatePolynomial:
        return self._lift(other) + (-self)

    def __mul__(self, other: Any) -> UnivariatePolynomial:
        other = self._lift(other)
        if not self.coefficients or not other.coefficients:
            return UnivariatePolynomial([])
        result = [ZERO] * (len(self.coefficients) + len(other.coefficients) - 1)
        for i, left in enumerate(self.coefficients):
            for j, right in enumerate(other.coefficients):
                result[i + j] = result[i + j] + left * right
        return UnivariatePolynomial(result)

    __rmul__ = __mul__

    def __pow__(self, exponent: int) -> UnivariatePolynomial:
        result = UnivariatePolynomial([ONE])
        for _ in range(exponent):
            result = result * self
        return result

    def __eq__(self, other: Any) -> bool:
        if not isinstance(other, UnivariatePolynomial):
            other = self._lift(other)
        return self.coefficients == other.coefficients

    def __hash__(self) -> int:
        return hash(self.coefficients)

    def evaluate(self, x: Any, one: Any = None) -> Any:
        """
        Horner evaluation at any ring element x.

        Args:
            x (Any): Value for t; must multiply with LaurentScalar.
            one (Any, optional): Unit of x's ring, used so that constant \
                polynomials evaluate inside that ring.

        Returns:
            Any: The value in x's ring.
        """
        if not self.coefficients:
            return ZERO if one is None else one * ZERO
        result = self.coefficients[-1] if one is None \
            else one * self.coefficients[-1]
        for value in reversed(self.coefficients[:-1]):
            result = result * x + value
        return result

    def divide_by_variable(self) -> UnivariatePolynomial:
        """Exact division by t."""
        if self.coefficients and not self.coefficients[0].is_zero():
            raise PreconditionError("Constant term is not zero.")
        return UnivariatePolynomial(self.coefficients[1:])

    def scale_variable(self, factor: LaurentScalar) -> UnivariatePolynomial:
        """Substitutes t -> factor * t."""
        return UnivariatePolynomial(
            [value * factor**k for k, value in enumerate(self.coefficients)]
        )

    def invert_q(self) -> UnivariatePolynomial:
        return UnivariatePolynomial(
            [value.invert_q() for value in self.coefficients]
        )

    def __str__(self) -> str:
        if not self.coefficients:
            return "0"
        return " + ".join(
            f"({value})*t^{k}"
            for k, value in enumerate(self.coefficients)
            if not value.is_zero()
        )

    def __repr__(self) -> str:
        return f"UnivariatePolynomial({self})"


def generating_product(m: int) -> UnivariatePolynomial:
    """prod_{l=0}^{m-1} (1 + q^{2l} t)."""
    result = UnivariatePolynomial([ONE])
    for l in range(m):
        result = result * UnivariatePolynomial([ONE, LaurentScalar.q_power(2 * l)])
    return result


def f_poly(p_0: int) -> UnivariatePolynomial:
    """
    f(t) = sum_k [p_0 k] q^{-k(p_0-1)} (-t)^k.

    Equals prod_{k=0}^{p_0-1} (1 - q^{-2k} t) and satisfies f(0) = 1.
    """
    if p_0 < 1:
        raise PreconditionError(f"f needs p_0 >= 1, got {p_0}.")
    return UnivariatePolynomial(
        [
            q_binomial(p_0, k).shift(-k * (p_0 - 1)) * (-1) ** k
            for k in range(p_0 + 1)
        ]
    )


def f_product(p_0: int) -> UnivariatePolynomial:
    """prod_{k=0}^{p_0-1} (1 - q^{-2k} t)."""
    result = UnivariatePolynomial([ONE])
    for k in range(p_0):
        result = result * UnivariatePolynomial(
            [ONE, LaurentScalar.q_power(-2 * k, -1)]
        )
    return result
