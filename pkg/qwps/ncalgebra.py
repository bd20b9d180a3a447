"""
Exact normal-form engine for the quantum sphere algebra.

Monomials are kept in the order z_0-part, then for i = 1..n the block \
    z_i^{j_i} (z_i^*)^{k_i}; the pair z_0 z_0^* never survives. Products \
        are computed by memoized right multiplication with one generator.
"""
from __future__ import annotations

from functools import lru_cache
from math import comb, factorial, gcd, prod
from typing import Any, Iterable, Mapping, NamedTuple, Sequence

import regex as re

from qwps import logging_conf
from qwps.common import parse_word
from qwps.models import (
    CoefficientSource,
    DimensionMismatchError,
    GenerationStatus,
    GenerationVerdict,
    PairwiseCoprimeVector,
    PreconditionError,
    RelationResult,
    VerificationError,
)
from qwps.qarith import (
    ONE,
    Q,
    ZERO,
    LaurentScalar,
    UnivariatePolynomial,
    f_poly,
    q_binomial,
    q_int,
)
from qwps.weights import (
    as_pairwise_coprime,
    as_weight_vector,
    divisibility_criterion,
    factor_sharp,
    partial_quotient,
)

LOGGER = logging_conf.LOGGER

Letter = tuple[int, bool]
Symbol = tuple[str, int]

Q_INV = LaurentScalar.q_power(-1)
Q_SQUARED = LaurentScalar.q_power(2)


def _scalar(value: Any) -> LaurentScalar:
    if isinstance(value, LaurentScalar):
        return value
    return LaurentScalar.constant(value)


class NormalMonomial(NamedTuple):
    j: tuple[int, ...]
    k: tuple[int, ...]

    @classmethod
    def identity(cls, n: int) -> NormalMonomial:
        return cls((0,) * (n + 1), (0,) * (n + 1))

    @property
    def n(self) -> int:
        return len(self.j) - 1

    def letters(self) -> tuple[Letter, ...]:
        word: list[Letter] = []
        for i in range(len(self.j)):
            word.extend([(i, False)] * self.j[i])
            word.extend([(i, True)] * self.k[i])
        return tuple(word)

    def degree(self) -> int:
        return sum(self.j) + sum(self.k)

    def is_identity(self) -> bool:
        return not any(self.j) and not any(self.k)

    def top_index(self) -> int:
        for i in range(len(self.j) - 1, -1, -1):
            if self.j[i] or self.k[i]:
                return i
        return -1

    def exponent_vector(self) -> tuple[int, ...]:
        return tuple(a - b for a, b in zip(self.j, self.k))

    def to_text(self) -> str:
        if self.is_identity():
            return "1"
        parts: list[str] = []
        for i in range(len(self.j)):
            for power, star in ((self.j[i], ""), (self.k[i], "*")):
                if power == 1:
                    parts.append(f"z{i}{star}")
                elif power > 1:
                    parts.append(f"z{i}{star}^{power}")
        return " ".join(parts)


def grade(monomial: NormalMonomial, weights) -> int:
    """
    U(1) degree sum_i (j_i - k_i) l_i of a monomial.

    Raises:
        DimensionMismatchError: If the lengths differ.
    """
    weights = as_weight_vector(weights)
    if len(weights) != len(monomial.j):
        raise DimensionMismatchError(
            f"Monomial of dimension {monomial.n} graded by {weights}."
        )
    return sum(
        (a - b) * weight
        for a, b, weight in zip(monomial.j, monomial.k, weights.entries)
    )


def _last_letter(monomial: NormalMonomial) -> Letter | None:
    for i in range(len(monomial.j) - 1, -1, -1):
        if monomial.k[i]:
            return (i, True)
        if monomial.j[i]:
            return (i, False)
    return None


def _first_letter(monomial: NormalMonomial) -> Letter | None:
    for i in range(len(monomial.j)):
        if monomial.j[i]:
            return (i, False)
        if monomial.k[i]:
            return (i, True)
    return None


def _bump(monomial: NormalMonomial, letter: Letter, step: int) -> NormalMonomial:
    i, star = letter
    if star:
        k = list(monomial.k)
        k[i] += step
        return NormalMonomial(monomial.j, tuple(k))
    j = list(monomial.j)
    j[i] += step
    return NormalMonomial(tuple(j), monomial.k)


def _in_order(last: Letter, letter: Letter) -> bool:
    a, last_star = last
    i, star = letter
    if i != a:
        return i > a
    if last_star:
        return star
    return not star or a != 0


@lru_cache(maxsize=None)
def _rewrite_pair(
    n: int, last: Letter, letter: Letter
) -> tuple[tuple[LaurentScalar, tuple[Letter, ...]], ...]:
    """Replacement of an out-of-order adjacent pair (last, letter)."""
    a, last_star = last
    i, star = letter
    if i < a:
        return ((Q_INV if star else Q, (letter, last)),)
    if a == 0 and not last_star:
        # z_0 z_0^* = 1 - sum_{j>=1} z_j z_j^*
        return ((ONE, ()),) + tuple(
            (-ONE, ((j, False), (j, True))) for j in range(1, n + 1)
        )
    if a == 0:
        # z_0^* z_0 = 1 - q^2 sum_{j>=1} z_j z_j^*
        return ((ONE, ()),) + tuple(
            (-Q_SQUARED, ((j, False), (j, True))) for j in range(1, n + 1)
        )
    # z_a^* z_a = z_a z_a^* + (1 - q^2) sum_{j>a} z_j z_j^*
    return (((ONE, ((a, False), (a, True))),) + tuple(
        (ONE - Q_SQUARED, ((j, False), (j, True)))
        for j in range(a + 1, n + 1)
    ))


@lru_cache(maxsize=None)
def _times_letter(
    monomial: NormalMonomial, letter: Letter
) -> tuple[tuple[NormalMonomial, LaurentScalar], ...]:
    last = _last_letter(monomial)
    if last is None or _in_order(last, letter):
        return ((_bump(monomial, letter, 1), ONE),)
    prefix = _bump(monomial, last, -1)
    result: dict[NormalMonomial, LaurentScalar] = {}
    for coefficient, word in _rewrite_pair(monomial.n, last, letter):
        partial = {prefix: coefficient}
        for each in word:
            partial = _times_letter_terms(partial, each)
        _accumulate(result, partial)
    return tuple(result.items())


def _accumulate(
    target: dict[NormalMonomial, LaurentScalar],
    source: Mapping[NormalMonomial, LaurentScalar],
    factor: LaurentScalar = ONE,
) -> None:
    for monomial, coefficient in source.items():
        value = target.get(monomial, ZERO) + coefficient * factor
        if value.is_zero():
            target.pop(monomial, None)
        else:
            target[monomial] = value


def _times_letter_terms(
    terms: Mapping[NormalMonomial, LaurentScalar], letter: Letter
) -> dict[NormalMonomial, LaurentScalar]:
    result: dict[NormalMonomial, LaurentScalar] = {}
    for monomial, coefficient in terms.items():
        _accumulate(result, dict(_times_letter(monomial, letter)), coefficient)
    return result


@lru_cache(maxsize=None)
def _monomial_product(
    left: NormalMonomial, right: NormalMonomial
) -> tuple[tuple[NormalMonomial, LaurentScalar], ...]:
    if right.is_identity():
        return ((left, ONE),)
    if left.is_identity():
        return ((right, ONE),)
    last, first = _last_letter(left), _first_letter(right)
    if _in_order(last, first):
        return ((
            NormalMonomial(
                tuple(a + b for a, b in zip(left.j, right.j)),
                tuple(a + b for a, b in zip(left.k, right.k)),
            ),
            ONE,
        ),)
    terms: dict[NormalMonomial, LaurentScalar] = {left: ONE}
    for letter in right.letters():
        terms = _times_letter_terms(terms, letter)
    return tuple(terms.items())


class AlgebraElement:
    """
    Finite linear combination of normal monomials over LaurentScalar.

    Immutable by convention; every operation returns a normal form.
    """

    __slots__ = ("n", "terms")

    def __init__(
        self,
        n: int,
        terms: Mapping[NormalMonomial, LaurentScalar] | None = None,
    ) -> None:
        if n < 0:
            raise PreconditionError(f"Dimension must be >= 0, got {n}.")
        self.n = n
        self.terms: dict[NormalMonomial, LaurentScalar] = {
            monomial: coefficient
            for monomial, coefficient in (terms or {}).items()
            if not coefficient.is_zero()
        }

    @classmethod
    def zero(cls, n: int) -> AlgebraElement:
        return cls(n)

    @classmethod
    def scalar(cls, n: int, value: Any) -> AlgebraElement:
        return cls(n, {NormalMonomial.identity(n): _scalar(value)})

    @classmethod
    def one(cls, n: int) -> AlgebraElement:
        return cls.scalar(n, ONE)

    @classmethod
    def from_text(cls, n: int, text: str) -> AlgebraElement:
        """Parses the canonical text form produced by to_text()."""
        text = text.strip()
        if text == "0":
            return cls.zero(n)
        result = cls.zero(n)
        for found in re.finditer(
            r"\[(?P<coefficient>[^\]]*)\]\s*(?P<monomial>[^\[]*)", text
        ):
            monomial_text = found.group("monomial").strip().rstrip("+").strip()
            coefficient = LaurentScalar.from_text(found.group("coefficient"))
            word = [] if monomial_text == "1" else parse_word(monomial_text)
            result = result + normal_form(word, n) * coefficient
        return result

    def _check(self, other: AlgebraElement) -> None:
        if other.n != self.n:
            raise DimensionMismatchError(
                f"Cannot combine elements of dimension {self.n} and {other.n}."
            )

    def _lift(self, other: Any) -> AlgebraElement:
        if isinstance(other, AlgebraElement):
            self._check(other)
            return other
        return AlgebraElement.scalar(self.n, other)

    def __len__(self) -> int:
        return len(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other: Any) -> AlgebraElement:
        other = self._lift(other)
        terms = dict(self.terms)
        _accumulate(terms, other.terms)
        return AlgebraElement(self.n, terms)

    __radd__ = __add__

    def __neg__(self) -> AlgebraElement:
        return AlgebraElement(
            self.n, {m: -c for m, c in self.terms.items()}
        )

    def __sub__(self, other: Any) -> AlgebraElement:
        return self + (-self._lift(other))

    def __rsub__(self, other: Any) -> AlgebraElement:
        return self._lift(other) + (-self)

    def __mul__(self, other: Any) -> AlgebraElement:
        if not isinstance(other, AlgebraElement):
            factor = _scalar(other)
            return AlgebraElement(
                self.n, {m: c * factor for m, c in self.terms.items()}
            )
        self._check(other)
        result: dict[NormalMonomial, LaurentScalar] = {}
        for left, left_coefficient in self.terms.items():
            for right, right_coefficient in other.terms.items():
                _accumulate(
                    result,
                    dict(_monomial_product(left, right)),
                    left_coefficient * right_coefficient,
                )
        return AlgebraElement(self.n, result)

    def __rmul__(self, other: Any) -> AlgebraElement:
        return self * other

    def __pow__(self, exponent: int) -> AlgebraElement:
        result = AlgebraElement.one(self.n)
        for _ in range(exponent):
            result = result * self
        return result

    def __eq__(self, other: Any) -> bool:
        if isinstance(other, AlgebraElement):
            return self.n == other.n and self.terms == other.terms
        if isinstance(other, (int, LaurentScalar)):
            return self.terms == AlgebraElement.scalar(self.n, other).terms
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.n, frozenset(self.terms.items())))

    def adjoint(self) -> AlgebraElement:
        """Anti-linear involution; coefficients are real for real q."""
        result = AlgebraElement.zero(self.n)
        for monomial, coefficient in self.terms.items():
            word = [(i, not star) for i, star in reversed(monomial.letters())]
            result = result + normal_form(word, self.n) * coefficient
        return result

    def grades(self, weights) -> set[int]:
        return {grade(monomial, weights) for monomial in self.terms}

    def is_invariant(self, weights) -> bool:
        return self.grades(weights) <= {0}

    def is_lens_invariant(self, weights, modulus: int) -> bool:
        return all(value % modulus == 0 for value in self.grades(weights))

    def quotient(self, h: int) -> AlgebraElement:
        """Drops monomials involving an index above h."""
        if not 0 <= h <= self.n:
            raise PreconditionError(f"Level {h} outside 0..{self.n}.")
        terms = {
            NormalMonomial(monomial.j[:h + 1], monomial.k[:h + 1]): coefficient
            for monomial, coefficient in self.terms.items()
            if monomial.top_index() <= h
        }
        return AlgebraElement(h, terms)

    def constant_term(self) -> LaurentScalar:
        return self.terms.get(NormalMonomial.identity(self.n), ZERO)

    def character(self) -> LaurentScalar:
        """Value in the rank-one module where z_i -> 0 for i >= 1."""
        return self.constant_term()

    def sorted_terms(self) -> list[tuple[NormalMonomial, LaurentScalar]]:
        return sorted(
            self.terms.items(),
            key=lambda item: (item[0].degree(), item[0].j, item[0].k),
        )

    def to_text(self) -> str:
        if not self.terms:
            return "0"
        return " + ".join(
            f"[{coefficient}] {monomial.to_text()}"
            for monomial, coefficient in self.sorted_terms()
        )

    def __str__(self) -> str:
        return self.to_text()

    def __repr__(self) -> str:
        return f"AlgebraElement(n={self.n}, {self.to_text()})"


def normal_form(word: Iterable[Letter], n: int) -> AlgebraElement:
    """
    Normal form of a word in z_i and z_i^*.

    Args:
        word (Iterable[Letter]): (index, starred) letters.
        n (int): Dimension, indices run over 0..n.

    Raises:
        PreconditionError: If a letter index is out of range.
    """
    terms: dict[NormalMonomial, LaurentScalar] = {NormalMonomial.identity(n): ONE}
    for letter in word:
        i, star = letter
        if not 0 <= i <= n:
            raise PreconditionError(f"Generator index {i} outside 0..{n}.")
        terms = _times_letter_terms(terms, (int(i), bool(star)))
    return AlgebraElement(n, terms)


def normal_form_right_to_left(word: Sequence[Letter], n: int) -> AlgebraElement:
    """Normal form built by associating the word from the right."""
    result = AlgebraElement.one(n)
    for letter in reversed(list(word)):
        result = generator(n, *letter) * result
    return result


def multiply(a: AlgebraElement, b: AlgebraElement) -> AlgebraElement:
    return a * b


def adjoint(a: AlgebraElement) -> AlgebraElement:
    return a.adjoint()


def verify_relation(lhs: AlgebraElement, rhs: AlgebraElement) -> bool:
    """True iff lhs - rhs normalizes to exactly zero."""
    return (lhs - rhs).is_zero()


def _check_index(n: int, i: int) -> None:
    if not 0 <= i <= n:
        raise PreconditionError(f"Index {i} outside 0..{n}.")


def generator(n: int, i: int, star: bool = False) -> AlgebraElement:
    _check_index(n, i)
    monomial = _bump(NormalMonomial.identity(n), (i, star), 1)
    return AlgebraElement(n, {monomial: ONE})


def z(n: int, i: int) -> AlgebraElement:
    return generator(n, i)


def z_star(n: int, i: int) -> AlgebraElement:
    return generator(n, i, True)


def x(n: int, i: int) -> AlgebraElement:
    """x_i = z_i z_i^*."""
    _check_index(n, i)
    return normal_form([(i, False), (i, True)], n)


def X(n: int, i: int) -> AlgebraElement:
    """X_i = sum_{j>i} x_j."""
    _check_index(n, i)
    result = AlgebraElement.zero(n)
    for j in range(i + 1, n + 1):
        result = result + x(n, j)
    return result


def tail_sum(n: int, i: int) -> AlgebraElement:
    """sum_{j>=i} x_j."""
    return x(n, i) + X(n, i)


def zeta(p, i: int) -> AlgebraElement:
    """zeta_i = z_i^{p_i}."""
    p = as_weight_vector(p)
    _check_index(p.n, i)
    return normal_form([(i, False)] * p[i], p.n)


def zeta_star(p, i: int) -> AlgebraElement:
    p = as_weight_vector(p)
    _check_index(p.n, i)
    return normal_form([(i, True)] * p[i], p.n)


def xi(i: int, j: int, weights) -> AlgebraElement:
    """xi_{i,j} = (z_i^*)^{l_{j:i}} z_j^{l_{i:j}}."""
    weights = as_weight_vector(weights)
    _check_index(weights.n, i)
    _check_index(weights.n, j)
    word = [(i, True)] * partial_quotient(weights, j, i) \
        + [(j, False)] * partial_quotient(weights, i, j)
    return normal_form(word, weights.n)


def monomial_from_exponents(exponents: Sequence[int]) -> AlgebraElement:
    """z^e = z_0^{e_0} ... z_n^{e_n} with z_i^{-k} read as (z_i^*)^k."""
    word: list[Letter] = []
    for i, value in enumerate(exponents):
        word.extend([(i, value < 0)] * abs(value))
    return normal_form(word, len(exponents) - 1)


class CommutingPoly:
    """
    Polynomial in commuting x_1..x_n over LaurentScalar.

    x_0 is eliminated through x_0 = 1 - x_1 - ... - x_n; keys are exponent \
        tuples of length n.
    """

    __slots__ = ("n", "terms")

    def __init__(
        self, n: int, terms: Mapping[tuple[int, ...], LaurentScalar] | None = None
    ) -> None:
        self.n = n
        self.terms: dict[tuple[int, ...], LaurentScalar] = {
            exponents: coefficient
            for exponents, coefficient in (terms or {}).items()
            if not coefficient.is_zero()
        }

    @classmethod
    def constant(cls, n: int, value: Any) -> CommutingPoly:
        return cls(n, {(0,) * n: _scalar(value)})

    @classmethod
    def one(cls, n: int) -> CommutingPoly:
        return cls.constant(n, ONE)

    @classmethod
    def zero(cls, n: int) -> CommutingPoly:
        return cls(n)

    @classmethod
    def variable(cls, n: int, i: int) -> CommutingPoly:
        """x_i, with x_0 expanded as 1 - sum x_j."""
        _check_index(n, i)
        if i == 0:
            result = cls.one(n)
            for j in range(1, n + 1):
                result = result - cls.variable(n, j)
            return result
        exponents = [0] * n
        exponents[i - 1] = 1
        return cls(n, {tuple(exponents): ONE})

    @classmethod
    def tail(cls, n: int, i: int) -> CommutingPoly:
        """X_i = sum_{j>i} x_j."""
        result = cls.zero(n)
        for j in range(i + 1, n + 1):
            result = result + cls.variable(n, j)
        return result

    def _lift(self, other: Any) -> CommutingPoly:
        if isinstance(other, CommutingPoly):
            if other.n != self.n:
                raise DimensionMismatchError(
                    f"Polynomials in {self.n} and {other.n} variables."
                )
            return other
        return CommutingPoly.constant(self.n, other)

    def is_zero(self) -> bool:
        return not self.terms

    def degree(self) -> int:
        return max((sum(key) for key in self.terms), default=0)

    def __add__(self, other: Any) -> CommutingPoly:
        other = self._lift(other)
        terms = dict(self.terms)
        for exponents, coefficient in other.terms.items():
            terms[exponents] = terms.get(exponents, ZERO) + coefficient
        return CommutingPoly(self.n, terms)

    __radd__ = __add__

    def __neg__(self) -> CommutingPoly:
        return CommutingPoly(self.n, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other: Any) -> CommutingPoly:
        return self + (-self._lift(other))

    def __rsub__(self, other: Any) -> CommutingPoly:
        return self._lift(other) + (-self)

    def __mul__(self, other: Any) -> CommutingPoly:
        if not isinstance(other, CommutingPoly):
            factor = _scalar(other)
            return CommutingPoly(
                self.n, {e: c * factor for e, c in self.terms.items()}
            )
        other = self._lift(other)
        terms: dict[tuple[int, ...], LaurentScalar] = {}
        for left, left_coefficient in self.terms.items():
            for right, right_coefficient in other.terms.items():
                key = tuple(a + b for a, b in zip(left, right))
                terms[key] = terms.get(key, ZERO) \
                    + left_coefficient * right_coefficient
        return CommutingPoly(self.n, terms)

    def __rmul__(self, other: Any) -> CommutingPoly:
        return self * other

    def __pow__(self, exponent: int) -> CommutingPoly:
        result, base = CommutingPoly.one(self.n), self
        while exponent:
            if exponent & 1:
                result = result * base
            base = base * base
            exponent >>= 1
        return result

    def __eq__(self, other: Any) -> bool:
        if not isinstance(other, CommutingPoly):
            other = self._lift(other)
        return self.n == other.n and self.terms == other.terms

    def __hash__(self) -> int:
        return hash((self.n, frozenset(self.terms.items())))

    def evaluate(self, values: Sequence[float], q: float) -> float:
        """Numeric value at x_1..x_n = values."""
        return sum(
            coefficient.evaluate(q) * prod(
                value**power for value, power in zip(values, exponents)
            )
            for exponents, coefficient in self.terms.items()
        )

    def to_element(self) -> AlgebraElement:
        """Embedding x_i -> z_i z_i^* into the sphere algebra."""
        result = AlgebraElement.zero(self.n)
        for exponents, coefficient in self.terms.items():
            result = result + _x_power_element(self.n, exponents) * coefficient
        return result

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for exponents in sorted(self.terms):
            factors = " ".join(
                f"x{i + 1}" if power == 1 else f"x{i + 1}^{power}"
                for i, power in enumerate(exponents)
                if power
            )
            parts.append(f"[{self.terms[exponents]}] {factors or '1'}")
        return " + ".join(parts)

    def __repr__(self) -> str:
        return f"CommutingPoly(n={self.n}, {self})"


@lru_cache(maxsize=None)
def _x_power_element(n: int, exponents: tuple[int, ...]) -> AlgebraElement:
    for position in range(n - 1, -1, -1):
        if exponents[position]:
            lowered = list(exponents)
            lowered[position] -= 1
            return _x_power_element(n, tuple(lowered)) * x(n, position + 1)
    return AlgebraElement.one(n)


class Expression:
    """
    Formal combination of words in the symbols z, z*, x, zeta, zeta*.

    The same expression evaluates in the normal-form engine and as a \
        product of generator matrices in a representation.
    """

    __slots__ = ("terms",)

    def __init__(
        self, terms: Mapping[tuple[Symbol, ...], LaurentScalar] | None = None
    ) -> None:
        self.terms: dict[tuple[Symbol, ...], LaurentScalar] = {
            word: coefficient
            for word, coefficient in (terms or {}).items()
            if not coefficient.is_zero()
        }

    @classmethod
    def word(cls, *symbols: Symbol) -> Expression:
        return cls({tuple(symbols): ONE})

    @classmethod
    def constant(cls, value: Any) -> Expression:
        return cls({(): _scalar(value)})

    @classmethod
    def tail(cls, n: int, i: int) -> Expression:
        """X_i = sum_{j>i} x_j as an expression."""
        result = cls()
        for j in range(i + 1, n + 1):
            result = result + cls.word(("x", j))
        return result

    def _lift(self, other: Any) -> Expression:
        return other if isinstance(other, Expression) \
            else Expression.constant(other)

    def __add__(self, other: Any) -> Expression:
        other = self._lift(other)
        terms = dict(self.terms)
        for word, coefficient in other.terms.items():
            terms[word] = terms.get(word, ZERO) + coefficient
        return Expression(terms)

    __radd__ = __add__

    def __neg__(self) -> Expression:
        return Expression({w: -c for w, c in self.terms.items()})

    def __sub__(self, other: Any) -> Expression:
        return self + (-self._lift(other))

    def __mul__(self, other: Any) -> Expression:
        if not isinstance(other, Expression):
            factor = _scalar(other)
            return Expression({w: c * factor for w, c in self.terms.items()})
        terms: dict[tuple[Symbol, ...], LaurentScalar] = {}
        for left, left_coefficient in self.terms.items():
            for right, right_coefficient in other.terms.items():
                word = left + right
                terms[word] = terms.get(word, ZERO) \
                    + left_coefficient * right_coefficient
        return Expression(terms)

    def __rmul__(self, other: Any) -> Expression:
        return self * other

    def symbols(self) -> set[Symbol]:
        return {symbol for word in self.terms for symbol in word}

    def max_length(self) -> int:
        return max((len(word) for word in self.terms), default=0)

    def to_element(self, n: int, p: tuple[int, ...] | None = None) -> AlgebraElement:
        result = AlgebraElement.zero(n)
        for word, coefficient in self.terms.items():
            value = AlgebraElement.scalar(n, coefficient)
            for symbol in word:
                value = value * _symbol_element(n, p, symbol)
            result = result + value
        return result

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        return " + ".join(
            f"[{coefficient}] "
            + (" ".join(f"{kind}{i}" for kind, i in word) or "1")
            for word, coefficient in sorted(self.terms.items())
        )


@lru_cache(maxsize=None)
def _symbol_element(
    n: int, p: tuple[int, ...] | None, symbol: Symbol
) -> AlgebraElement:
    kind, i = symbol
    match kind:
        case "z":
            return generator(n, i)
        case "z*":
            return generator(n, i, True)
        case "x":
            return x(n, i)
        case "zeta" | "zeta*":
            if p is None:
                raise PreconditionError("zeta symbols need the weights p.")
            return normal_form([(i, kind == "zeta*")] * p[i], n)
        case _:
            raise PreconditionError(f"Unknown symbol '{kind}'.")


class Relation(NamedTuple):
    name: str
    indices: tuple[int, ...]
    lhs: Expression
    rhs: Expression


def _word(*symbols: Symbol) -> Expression:
    return Expression.word(*symbols)


def _factor_product(n: int, i: int, shifts: Iterable[LaurentScalar]) -> Expression:
    """prod over shifts c of {x_i + c X_i}."""
    result = Expression.constant(ONE)
    for shift in shifts:
        result = result * (_word(("x", i)) + Expression.tail(n, i) * shift)
    return result


def lens_relation_suite(p, max_power: int = 4) -> list[Relation]:
    """
    Relations among x_i, zeta_i and zeta_i^* together with the \
        auxiliary z-identities used to derive them.

    Args:
        p: Pairwise coprime weights.
        max_power (int, optional): Largest k in the z-identities. \
            Defaults to 4.

    Returns:
        list[Relation]: Named lhs/rhs expression pairs.
    """
    p = as_pairwise_coprime(p)
    n = p.n
    relations: list[Relation] = []
    for i in range(n + 1):
        for j in range(n + 1):
            if i < j:
                relations.append(Relation(
                    "A", (i, j),
                    _word(("x", i), ("x", j)), _word(("x", j), ("x", i)),
                ))
                relations.append(Relation(
                    "B", (i, j),
                    _word(("x", i), ("zeta", j)), _word(("zeta", j), ("x", i)),
                ))
                relations.append(Relation(
                    "C", (i, j),
                    _word(("x", j), ("zeta", i)),
                    _word(("zeta", i), ("x", j))
                    * LaurentScalar.q_power(2 * p[i]),
                ))
                relations.append(Relation(
                    "D", (i, j),
                    _word(("zeta", i), ("zeta", j)),
                    _word(("zeta", j), ("zeta", i))
                    * LaurentScalar.q_power(-p[i] * p[j]),
                ))
            if i != j:
                relations.append(Relation(
                    "E", (i, j),
                    _word(("zeta*", i), ("zeta", j)),
                    _word(("zeta", j), ("zeta*", i))
                    * LaurentScalar.q_power(p[i] * p[j]),
                ))
    for i in range(n + 1):
        relations.append(Relation(
            "F", (i,),
            _word(("x", i), ("zeta", i)) - _word(("zeta", i), ("x", i)),
            _word(("zeta", i)) * Expression.tail(n, i)
            * (ONE - LaurentScalar.q_power(2 * p[i])),
        ))
    total = Expression()
    for i in range(n + 1):
        total = total + _word(("x", i))
    relations.append(Relation("G", (), total, Expression.constant(ONE)))
    for i in range(n + 1):
        relations.append(Relation(
            "H", (i,),
            _word(("zeta", i), ("zeta*", i)),
            _factor_product(
                n, i, (ONE - LaurentScalar.q_power(-2 * s) for s in range(p[i]))
            ),
        ))
        relations.append(Relation(
            "L", (i,),
            _word(("zeta*", i), ("zeta", i)),
            _factor_product(
                n, i,
                (ONE - LaurentScalar.q_power(2 * s) for s in range(1, p[i] + 1)),
            ),
        ))
    for i in range(n + 1):
        for k in range(1, max_power + 1):
            power = (("z", i),) * k
            relations.append(Relation(
                "zstarzi", (i, k),
                Expression.word(("z*", i), *power)
                - Expression.word(*power, ("z*", i)),
                Expression.word(*power[:-1]) * Expression.tail(n, i)
                * (ONE - LaurentScalar.q_power(2 * k)),
            ))
            relations.append(Relation(
                "Y", (i, k),
                Expression.word(*power, *((("z*", i),) * k)),
                _factor_product(
                    n, i, (ONE - LaurentScalar.q_power(-2 * s) for s in range(k))
                ),
            ))
            relations.append(Relation(
                "Z", (i, k),
                Expression.word(*((("z*", i),) * k), *power),
                _factor_product(
                    n, i,
                    (ONE - LaurentScalar.q_power(2 * s) for s in range(1, k + 1)),
                ),
            ))
    return relations


def run_relation_suite(p, max_power: int = 4) -> list[RelationResult]:
    """Checks every relation of the suite exactly in the engine."""
    p = as_pairwise_coprime(p)
    results: list[RelationResult] = []
    for relation in lens_relation_suite(p, max_power):
        holds = verify_relation(
            relation.lhs.to_element(p.n, p.entries),
            relation.rhs.to_element(p.n, p.entries),
        )
        if not holds:
            LOGGER.warning(f"Relation {relation.name}{relation.indices} fails for {p}")
        results.append(RelationResult(
            name=relation.name, indices=relation.indices,
            mode="symbolic", holds=holds,
        ))
    LOGGER.info(
        f"Symbolic relation suite for {p}: "
        + f"{sum(r.holds for r in results)}/{len(results)} hold"
    )
    return results


def displayed_commutator_matches(p, i: int) -> bool:
    """
    Compares [zeta_i^*, zeta_i] with the closed sum
    (q - q^{-1}) sum_k [p_i k] [p_i k]_q (-q T_i)^k T_{i+1}^{p_i - k},
    T_i = sum_{j>=i} x_j, where [p_i k]_q is the q-integer of p_i k.
    """
    p = as_pairwise_coprime(p)
    n, power = p.n, p[i]
    commutator = zeta_star(p, i) * zeta(p, i) - zeta(p, i) * zeta_star(p, i)
    upper = tail_sum(n, i)
    lower = X(n, i)
    displayed = AlgebraElement.zero(n)
    for k in range(power + 1):
        displayed = displayed + (upper * (-Q)) ** k * lower ** (power - k) \
            * (q_binomial(power, k) * q_int(power * k))
    displayed = displayed * (Q - Q_INV)
    matches = verify_relation(commutator, displayed)
    LOGGER.debug(f"Displayed commutator for {p}, i={i} matches: {matches}")
    return matches


def bezout_opposite_sign(a: int, b: int, k: int) -> tuple[int, int]:
    """
    Non-zero r, s of opposite sign with a r + b s = k gcd(a, b).

    Among the solutions near the sign change the one with the smallest \
        |r| + |s| is returned, preferring r > 0 on ties.

    Raises:
        PreconditionError: Unless a, b, k >= 1.
    """
    if min(a, b, k) < 1:
        raise PreconditionError(f"Bezout data must be positive: {a},{b},{k}.")
    old_r, r = a, b
    old_x, x_value = 1, 0
    old_y, y_value = 0, 1
    while r:
        quotient = old_r // r
        old_r, r = r, old_r - quotient * r
        old_x, x_value = x_value, old_x - quotient * x_value
        old_y, y_value = y_value, old_y - quotient * y_value
    divisor = old_r
    step_r, step_s = b // divisor, a // divisor
    base_r, base_s = k * old_x, k * old_y
    centre = -base_r // step_r
    candidates = []
    for t in range(centre - 3, centre + 4):
        r_value, s_value = base_r + t * step_r, base_s - t * step_s
        if r_value * s_value < 0:
            candidates.append((abs(r_value) + abs(s_value), -r_value, r_value, s_value))
    if not candidates:
        raise VerificationError(f"No opposite-sign pair for {a},{b},{k}.")
    _, _, r_value, s_value = min(candidates)
    if a * r_value + b * s_value != k * divisor:
        raise VerificationError(f"Bezout identity fails for {a},{b},{k}.")
    return r_value, s_value


def generator_names(weights) -> list[str]:
    weights = as_weight_vector(weights)
    return [
        f"xi_{i},{j} = {xi(i, j, weights).to_text()}"
        for i in range(len(weights))
        for j in range(len(weights))
    ]


def generation_test(weights) -> GenerationVerdict:
    """
    Decides whether the xi_{i,j} generate the invariant subalgebra.

    Raises:
        PreconditionError: If the weights are not coprime.
        VerificationError: If the certificate is not invariant.
    """
    weights = as_weight_vector(weights)
    factor = factor_sharp(weights)
    names = generator_names(weights)
    if factor is not None:
        return GenerationVerdict(
            weights=weights.entries,
            status=GenerationStatus.GENERATED,
            generators=names,
        )
    i, j, k = divisibility_criterion(weights)
    r, s = bezout_opposite_sign(weights[i], weights[k], weights[j])
    shared = gcd(weights[i], weights[k])
    exponents = [0] * len(weights)
    exponents[i] = -r
    exponents[j] = shared
    exponents[k] = -s
    certificate = monomial_from_exponents(exponents)
    if not certificate.is_invariant(weights):
        raise VerificationError(
            f"Certificate {certificate} for {weights} is not invariant."
        )
    LOGGER.info(f"{weights} is not generated by xi: certificate {certificate}")
    return GenerationVerdict(
        weights=weights.entries,
        status=GenerationStatus.NOT_GENERATED,
        generators=names,
        triple=(i, j, k),
        bezout=(r, s),
        certificate_exponents=tuple(exponents),
        certificate=certificate.to_text(),
    )


# Commutative subalgebra: bivariate forms in (s, T) stand for (x_i, X_i).

def _form_product(shifts: Iterable[LaurentScalar]) -> dict[tuple[int, int], LaurentScalar]:
    form: dict[tuple[int, int], LaurentScalar] = {(0, 0): ONE}
    for shift in shifts:
        updated: dict[tuple[int, int], LaurentScalar] = {}
        for (a, b), coefficient in form.items():
            updated[(a + 1, b)] = updated.get((a + 1, b), ZERO) + coefficient
            updated[(a, b + 1)] = updated.get((a, b + 1), ZERO) + coefficient * shift
        form = updated
    return form


def _form_to_poly(
    form: Mapping[tuple[int, int], LaurentScalar], n: int, i: int
) -> CommutingPoly:
    base, tail = CommutingPoly.variable(n, i), CommutingPoly.tail(n, i)
    result = CommutingPoly.zero(n)
    for (a, b), coefficient in form.items():
        result = result + base**a * tail**b * coefficient
    return result


def _h_shifts(power: int) -> list[LaurentScalar]:
    return [ONE - LaurentScalar.q_power(-2 * s) for s in range(power)]


def _l_shifts(power: int) -> list[LaurentScalar]:
    return [ONE - LaurentScalar.q_power(2 * s) for s in range(1, power + 1)]


def lens_product_h(p, i: int) -> CommutingPoly:
    """zeta_i zeta_i^* as a polynomial in x_1..x_n."""
    p = as_weight_vector(p)
    return _form_to_poly(_form_product(_h_shifts(p[i])), p.n, i)


def lens_product_l(p, i: int) -> CommutingPoly:
    """zeta_i^* zeta_i as a polynomial in x_1..x_n."""
    p = as_weight_vector(p)
    return _form_to_poly(_form_product(_l_shifts(p[i])), p.n, i)


def _tail_quotient(
    target: Mapping[tuple[int, int], LaurentScalar],
    base: Mapping[tuple[int, int], LaurentScalar],
    power: int,
) -> dict[tuple[int, int], LaurentScalar]:
    """(target - base^power) / T, exact because both agree at T = 0."""
    lifted: dict[tuple[int, int], LaurentScalar] = {(0, 0): ONE}
    for _ in range(power):
        updated: dict[tuple[int, int], LaurentScalar] = {}
        for (a, b), left in lifted.items():
            for (c, d), right in base.items():
                key = (a + c, b + d)
                updated[key] = updated.get(key, ZERO) + left * right
        lifted = updated
    difference = dict(target)
    for key, coefficient in lifted.items():
        difference[key] = difference.get(key, ZERO) - coefficient
    quotient: dict[tuple[int, int], LaurentScalar] = {}
    for (a, b), coefficient in difference.items():
        if coefficient.is_zero():
            continue
        if b == 0:
            raise VerificationError("Lens product and base power differ at T = 0.")
        quotient[(a, b - 1)] = coefficient
    return quotient


def _compositions(total: int, parts: int) -> Iterable[tuple[int, ...]]:
    if parts == 1:
        yield (total,)
        return
    for first in range(total, -1, -1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def _multinomial(parts: Sequence[int]) -> int:
    return factorial(sum(parts)) // prod(factorial(part) for part in parts)


def _power_table(value: CommutingPoly, top: int) -> list[CommutingPoly]:
    table = [CommutingPoly.one(value.n)]
    for _ in range(top):
        table.append(table[-1] * value)
    return table


def _recursion(p: PairwiseCoprimeVector, starred: bool) -> list[CommutingPoly]:
    """
    Raises the partition of unity to the power p_k for k = 0..n, moving \
        the k-th term from the z-form to the zeta-form.
    """
    n = p.n
    if starred:
        base_forms = [
            {(1, 0): ONE, (0, 1): ONE - Q_SQUARED} for _ in range(n + 1)
        ]
        target_forms = [_form_product(_l_shifts(p[i])) for i in range(n + 1)]
        coefficients = [
            CommutingPoly.constant(n, LaurentScalar.q_power(2 * i))
            for i in range(n + 1)
        ]
    else:
        base_forms = [{(1, 0): ONE} for _ in range(n + 1)]
        target_forms = [_form_product(_h_shifts(p[i])) for i in range(n + 1)]
        coefficients = [CommutingPoly.one(n) for _ in range(n + 1)]
    bases = [_form_to_poly(base_forms[i], n, i) for i in range(n + 1)]
    targets = [_form_to_poly(target_forms[i], n, i) for i in range(n + 1)]

    for k in range(n + 1):
        power = p[k]
        if power == 1:
            continue
        LOGGER.debug(f"Recursion step k={k} with power {power} for {p}")
        factors = [targets[i] if i < k else bases[i] for i in range(n + 1)]
        coefficient_powers = [_power_table(c, power) for c in coefficients]
        factor_powers = [_power_table(f, power) for f in factors]
        correction = _form_to_poly(
            _tail_quotient(target_forms[k], base_forms[k], power), n, k
        )
        updated = [CommutingPoly.zero(n) for _ in range(n + 1)]
        for parts in _compositions(power, n + 1):
            if parts[k] == power:
                leading = coefficient_powers[k][power]
                updated[k] = updated[k] + leading
                for j in range(k + 1, n + 1):
                    weight = LaurentScalar.q_power(2 * (j - k - 1)) if starred \
                        else ONE
                    updated[j] = updated[j] - leading * correction * weight
                continue
            first = min(i for i, part in enumerate(parts) if part)
            bucket = first if first < k else min(
                j for j in range(k + 1, n + 1) if parts[j]
            )
            term = CommutingPoly.constant(n, _multinomial(parts))
            for t, part in enumerate(parts):
                if not part:
                    continue
                term = term * coefficient_powers[t][part] \
                    * factor_powers[t][part - 1 if t == bucket else part]
            updated[bucket] = updated[bucket] + term
        coefficients = updated
    return coefficients


def _check_identity(
    p: PairwiseCoprimeVector,
    coefficients: Sequence[CommutingPoly],
    starred: bool,
    label: str,
) -> None:
    n = p.n
    products = [
        lens_product_l(p, i) if starred else lens_product_h(p, i)
        for i in range(n + 1)
    ]
    polynomial = CommutingPoly.zero(n)
    for coefficient, value in zip(coefficients, products):
        polynomial = polynomial + coefficient * value
    if polynomial != CommutingPoly.one(n):
        raise VerificationError(
            f"{label} coefficients for {p} fail in the commutative model."
        )
    total = AlgebraElement.zero(n)
    for i, coefficient in enumerate(coefficients):
        pair = zeta_star(p, i) * zeta(p, i) if starred \
            else zeta(p, i) * zeta_star(p, i)
        total = total + coefficient.to_element() * pair
    if total != AlgebraElement.one(n):
        raise VerificationError(
            f"{label} coefficients for {p} fail in the sphere algebra: "
            + f"sum = {total}"
        )
    LOGGER.debug(f"{label} coefficients verified for {p}")


@lru_cache(maxsize=None)
def _cached_coefficients(entries: tuple[int, ...], starred: bool) -> tuple:
    p = PairwiseCoprimeVector(entries=entries)
    coefficients = _recursion(p, starred)
    _check_identity(p, coefficients, starred, "b" if starred else "a")
    return tuple(coefficients)


def connection_coeffs_a(p) -> list[CommutingPoly]:
    """
    a_0..a_n with sum_i a_i zeta_i zeta_i^* = 1.

    Raises:
        VerificationError: If the identity fails (an implementation bug).
    """
    p = as_pairwise_coprime(p)
    return list(_cached_coefficients(p.entries, False))


def connection_coeffs_b(p) -> list[CommutingPoly]:
    """
    b_0..b_n with sum_i b_i zeta_i^* zeta_i = 1.

    Raises:
        VerificationError: If the identity fails (an implementation bug).
    """
    p = as_pairwise_coprime(p)
    return list(_cached_coefficients(p.entries, True))


def _f_of(p_0: int, t: CommutingPoly) -> CommutingPoly:
    return f_poly(p_0).evaluate(t, CommutingPoly.one(t.n))


def _one_minus_f_over_t(p_0: int, t: CommutingPoly) -> CommutingPoly:
    quotient = (UnivariatePolynomial([ONE]) - f_poly(p_0)).divide_by_variable()
    return quotient.evaluate(t, CommutingPoly.one(t.n))


def coeffs_n1_closed(p_0: int, p_1: int) -> tuple[CommutingPoly, CommutingPoly]:
    """
    Closed-form a_0, a_1 for n = 1:
    a_0 = sum_{k=1}^{p_1} C(p_1,k) f^{k-1} (1-f)^{p_1-k}, \
        a_1 = ((1-f)/x_1)^{p_1}, with f = f(x_1).

    Raises:
        PreconditionError: If gcd(p_0, p_1) != 1.
        VerificationError: If the identity fails.
    """
    p = as_pairwise_coprime((p_0, p_1))
    t = CommutingPoly.variable(1, 1)
    f_value = _f_of(p_0, t)
    rest = CommutingPoly.one(1) - f_value
    a_0 = CommutingPoly.zero(1)
    for k in range(1, p_1 + 1):
        a_0 = a_0 + f_value ** (k - 1) * rest ** (p_1 - k) * comb(p_1, k)
    a_1 = _one_minus_f_over_t(p_0, t) ** p_1
    _check_identity(p, (a_0, a_1), False, "closed n=1")
    return a_0, a_1


def coeffs_last_weight(p) -> list[CommutingPoly]:
    """
    For p = (1,...,1,p_n): a_n = 1 and a_i = sum_{k<p_n} x_n^k otherwise.
    """
    p = as_pairwise_coprime(p)
    if any(value != 1 for value in p.entries[:-1]):
        raise PreconditionError(f"{p} is not of the form (1,...,1,p_n).")
    n = p.n
    geometric = CommutingPoly.zero(n)
    for k in range(p[n]):
        geometric = geometric + CommutingPoly.variable(n, n) ** k
    coefficients = [geometric] * n + [CommutingPoly.one(n)]
    _check_identity(p, coefficients, False, "closed last-weight")
    return coefficients


def coeffs_first_weight(p) -> list[CommutingPoly]:
    """
    For p = (p_0,1,...,1): a_0 = 1 and a_i = (1 - f(t))/t otherwise, \
        t = x_1 + ... + x_n.
    """
    p = as_pairwise_coprime(p)
    if any(value != 1 for value in p.entries[1:]):
        raise PreconditionError(f"{p} is not of the form (p_0,1,...,1).")
    n = p.n
    quotient = _one_minus_f_over_t(p[0], CommutingPoly.tail(n, 0))
    coefficients = [CommutingPoly.one(n)] + [quotient] * n
    _check_identity(p, coefficients, False, "closed first-weight")
    return coefficients


def closed_form_coefficients(p) -> list[CommutingPoly]:
    """
    Closed-form a-coefficients where one is known.

    Raises:
        PreconditionError: If p belongs to none of the closed families.
    """
    p = as_pairwise_coprime(p)
    if p.n == 1:
        return list(coeffs_n1_closed(p[0], p[1]))
    if all(value == 1 for value in p.entries[:-1]):
        return coeffs_last_weight(p)
    if all(value == 1 for value in p.entries[1:]):
        return coeffs_first_weight(p)
    raise PreconditionError(f"No closed-form coefficients known for {p}.")


def coefficients_for(p, source: CoefficientSource, starred: bool = False) -> list[CommutingPoly]:
    if starred or source == CoefficientSource.RECURSION:
        return connection_coeffs_b(p) if starred else connection_coeffs_a(p)
    return closed_form_coefficients(p)
