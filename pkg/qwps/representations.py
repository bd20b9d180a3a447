"""
Truncated representations on l^2 of a lattice.

Every representation acts on basis vectors |m> with m in N^h and \
    ||m||_1 <= cutoff. Images beyond the cutoff are dropped and counted, \
        so comparisons are made on interior states only.
"""
from __future__ import annotations

from functools import cached_property
from typing import Any, Callable, Iterable, NamedTuple, Sequence

import numpy as np
from scipy.sparse import csr_matrix, diags, identity

from qwps import logging_conf
from qwps.models import (
    ConstraintKind,
    DimensionMismatchError,
    PreconditionError,
    RelationResult,
    TruncationError,
)
from qwps.ncalgebra import (
    AlgebraElement,
    Expression,
    NormalMonomial,
    Relation,
    lens_relation_suite,
)
from qwps.qarith import q_shifted_value
from qwps.weights import as_pairwise_coprime, as_weight_vector

LOGGER = logging_conf.LOGGER

State = tuple[int, ...]
Symbol = tuple[str, int]


class ConstraintTag(NamedTuple):
    kind: ConstraintKind = ConstraintKind.NONE
    data: tuple[int, ...] = ()


class BasisState(NamedTuple):
    m: State
    tag: ConstraintTag


def _compositions(total: int, parts: int) -> Iterable[State]:
    if parts == 0:
        if total == 0:
            yield ()
        return
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def lattice_states(n: int, cutoff: int) -> list[State]:
    """All m in N^n with ||m||_1 <= cutoff, by norm then lexicographically."""
    states: list[State] = []
    for norm in range(cutoff + 1):
        states.extend(sorted(_compositions(norm, n)))
    return states


def _non_decreasing(values: Sequence[int]) -> bool:
    return all(a <= b for a, b in zip(values, values[1:]))


def _strictly_decreasing(values: Sequence[int]) -> bool:
    return all(a > b for a, b in zip(values, values[1:]))


def in_subspace(m: State, k: int) -> bool:
    """0 <= m_1 <= ... <= m_k and m_{k+1} > ... > m_h >= 0."""
    return _non_decreasing(m[:k]) and _strictly_decreasing(m[k:])


def in_intersection(m: State, k: int) -> bool:
    """0 <= m_1 <= ... <= m_k and m_k > m_{k+1} > ... > m_h >= 0."""
    return _non_decreasing(m[:k]) and _strictly_decreasing(m[k - 1:])


def _check_level(h: int, k: int, lowest: int = 0) -> None:
    if not lowest <= k <= h:
        raise PreconditionError(f"Need {lowest} <= k <= h, got k={k}, h={h}.")


def subspace_basis(h: int, k: int, cutoff: int) -> list[BasisState]:
    _check_level(h, k)
    tag = ConstraintTag(ConstraintKind.PI_K, (k,))
    return [
        BasisState(m, tag) for m in lattice_states(h, cutoff) if in_subspace(m, k)
    ]


def intersection_basis(h: int, k: int, cutoff: int) -> list[BasisState]:
    """Basis of V_{k-1} and V_k intersected, for 1 <= k <= h."""
    _check_level(h, k, 1)
    tag = ConstraintTag(ConstraintKind.PI_K, (k - 1, k))
    return [
        BasisState(m, tag)
        for m in lattice_states(h, cutoff)
        if in_intersection(m, k)
    ]


class TruncatedSpace:
    """Ordered basis with a position index."""

    def __init__(
        self,
        n: int,
        states: Iterable[State],
        cutoff: int,
        tag: ConstraintTag = ConstraintTag(),
    ) -> None:
        self.n = n
        self.cutoff = cutoff
        self.tag = tag
        self.states: tuple[State, ...] = tuple(states)
        self.index: dict[State, int] = {m: i for i, m in enumerate(self.states)}

    @classmethod
    def full(cls, n: int, cutoff: int) -> TruncatedSpace:
        return cls(n, lattice_states(n, cutoff), cutoff)

    @classmethod
    def subspace(cls, h: int, k: int, cutoff: int) -> TruncatedSpace:
        return cls(
            h,
            (state.m for state in subspace_basis(h, k, cutoff)),
            cutoff,
            ConstraintTag(ConstraintKind.PI_K, (k,)),
        )

    def __len__(self) -> int:
        return len(self.states)

    def __contains__(self, m: State) -> bool:
        return m in self.index

    def position(self, m: State) -> int:
        return self.index[m]

    @cached_property
    def norms(self) -> np.ndarray:
        return np.array([sum(m) for m in self.states], dtype=int)

    def basis(self) -> list[BasisState]:
        return [BasisState(m, self.tag) for m in self.states]

    def interior(self, margin: int) -> np.ndarray:
        """Positions of states at least margin away from the cutoff."""
        return np.flatnonzero(self.norms <= self.cutoff - margin)


def interior_states(space: TruncatedSpace, margin: int) -> list[State]:
    return [space.states[i] for i in space.interior(margin)]


class ShiftOperator:
    """
    Sparse operator on a TruncatedSpace.

    Attributes:
        space (TruncatedSpace): Domain and codomain.
        matrix (csr_matrix): Matrix in the space's basis order.
        dropped (int): Amplitudes lost beyond the cutoff while building.
    """

    def __init__(
        self, space: TruncatedSpace, matrix: Any, dropped: int = 0
    ) -> None:
        self.space = space
        self.matrix = csr_matrix(matrix)
        self.dropped = dropped

    @classmethod
    def from_rule(
        cls,
        space: TruncatedSpace,
        rule: Callable[[State], Iterable[tuple[State, complex]]],
        dtype: type = float,
        strict: bool = False,
    ) -> ShiftOperator:
        """
        Builds S with S|m> = sum c |m'> from a rule m -> [(m', c)].

        Raises:
            TruncationError: If strict and an image leaves the space.
        """
        rows: list[int] = []
        columns: list[int] = []
        data: list[complex] = []
        dropped = 0
        for column, m in enumerate(space.states):
            for target, amplitude in rule(m):
                if amplitude == 0:
                    continue
                row = space.index.get(target)
                if row is None:
                    if strict:
                        raise TruncationError(
                            f"Image {target} of {m} lies outside the space."
                        )
                    dropped += 1
                    continue
                rows.append(row)
                columns.append(column)
                data.append(amplitude)
        size = len(space)
        matrix = csr_matrix(
            (np.array(data, dtype=dtype), (np.array(rows, dtype=int),
                                           np.array(columns, dtype=int))),
            shape=(size, size),
        )
        return cls(space, matrix, dropped)

    @classmethod
    def diagonal_operator(
        cls, space: TruncatedSpace, values: Sequence[complex] | np.ndarray
    ) -> ShiftOperator:
        return cls(space, diags(np.asarray(values), format="csr"))

    @classmethod
    def identity(cls, space: TruncatedSpace) -> ShiftOperator:
        return cls(space, identity(len(space), format="csr"))

    @classmethod
    def zero(cls, space: TruncatedSpace) -> ShiftOperator:
        return cls(space, csr_matrix((len(space), len(space))))

    def _check(self, other: ShiftOperator) -> None:
        if other.space is not self.space:
            raise DimensionMismatchError("Operators act on different spaces.")

    def adjoint(self) -> ShiftOperator:
        return ShiftOperator(
            self.space, self.matrix.conj().transpose().tocsr(), self.dropped
        )

    def compose(self, other: ShiftOperator) -> ShiftOperator:
        """self after other."""
        self._check(other)
        return ShiftOperator(
            self.space, self.matrix @ other.matrix, self.dropped + other.dropped
        )

    __matmul__ = compose

    def __add__(self, other: ShiftOperator) -> ShiftOperator:
        self._check(other)
        return ShiftOperator(
            self.space, self.matrix + other.matrix, self.dropped + other.dropped
        )

    def __sub__(self, other: ShiftOperator) -> ShiftOperator:
        self._check(other)
        return ShiftOperator(
            self.space, self.matrix - other.matrix, self.dropped + other.dropped
        )

    def __mul__(self, scalar: complex) -> ShiftOperator:
        return ShiftOperator(self.space, self.matrix * scalar, self.dropped)

    __rmul__ = __mul__

    def diagonal(self) -> np.ndarray:
        return self.matrix.diagonal()

    def apply(self, vector: np.ndarray) -> np.ndarray:
        if len(vector) != len(self.space):
            raise DimensionMismatchError(
                f"Vector of length {len(vector)} on a space of {len(self.space)}."
            )
        return self.matrix @ vector

    def action(self) -> dict[State, list[tuple[State, complex]]]:
        """Basis state -> weighted images."""
        coo = self.matrix.tocoo()
        table: dict[State, list[tuple[State, complex]]] = {
            m: [] for m in self.space.states
        }
        for row, column, value in zip(coo.row, coo.col, coo.data):
            table[self.space.states[column]].append(
                (self.space.states[row], value)
            )
        return table

    def max_deviation(self, other: ShiftOperator, columns: np.ndarray) -> float:
        """Largest entry of self - other in the given columns."""
        self._check(other)
        if len(columns) == 0:
            return 0.0
        difference = (self.matrix - other.matrix)[:, columns]
        return float(abs(difference).max()) if difference.nnz else 0.0

    def to_coordinate_text(self) -> str:
        coo = self.matrix.tocoo()
        return "\n".join(
            f"{row} {column} {value:.17g}"
            for row, column, value in sorted(zip(coo.row, coo.col, coo.data))
        )


class Representation:
    """
    Generator table of a truncated representation.

    Subclasses provide _build(symbol) for the symbols they support.
    """

    space: TruncatedSpace
    q: float
    p: tuple[int, ...] | None

    def __init__(self) -> None:
        self._generators: dict[Symbol, ShiftOperator] = {}

    @property
    def max_shift(self) -> int:
        raise NotImplementedError

    def _build(self, symbol: Symbol) -> ShiftOperator:
        raise NotImplementedError

    def generator(self, symbol: Symbol) -> ShiftOperator:
        if symbol not in self._generators:
            kind, i = symbol
            if kind == "zeta*":
                self._generators[symbol] = self.generator(("zeta", i)).adjoint()
            elif kind == "z*":
                self._generators[symbol] = self.generator(("z", i)).adjoint()
            else:
                self._generators[symbol] = self._build(symbol)
        return self._generators[symbol]

    def supports(self, symbols: Iterable[Symbol]) -> bool:
        return all(kind in self.symbol_kinds for kind, _ in symbols)

    symbol_kinds: frozenset[str] = frozenset()

    def expression_matrix(self, expression: Expression) -> ShiftOperator:
        """Evaluates a formal expression with generator matrices."""
        result = ShiftOperator.zero(self.space)
        for word, coefficient in expression.terms.items():
            term = ShiftOperator.identity(self.space) * coefficient.evaluate(self.q)
            for symbol in word:
                term = term @ self.generator(symbol)
            result = result + term
        return result

    def matrix_of(self, element: AlgebraElement) -> ShiftOperator:
        raise NotImplementedError

    def apply(self, element: AlgebraElement, vector: np.ndarray) -> np.ndarray:
        operator = self.matrix_of(element)
        if operator.dropped:
            LOGGER.debug(f"{operator.dropped} amplitudes dropped at the cutoff")
        return operator.apply(vector)


class SphereRepresentation(Representation):
    """
    The faithful representation of the sphere algebra on l^2(N^n), with \
        z_n twisted by a unit-modulus lambda.
    """

    symbol_kinds = frozenset({"z", "z*", "x", "zeta", "zeta*"})

    def __init__(
        self,
        n: int,
        q: float,
        cutoff: int,
        lam: complex = 1.0,
        p: Sequence[int] | None = None,
    ) -> None:
        super().__init__()
        if not 0 < q < 1:
            raise PreconditionError(f"q must satisfy 0 < q < 1, got {q}.")
        if abs(abs(lam) - 1) > 1e-12:
            raise PreconditionError(f"lambda must have modulus one, got {lam}.")
        if p is not None and len(p) != n + 1:
            raise DimensionMismatchError(f"Weights {p} do not match n={n}.")
        self.n = n
        self.q = q
        self.lam = lam
        self.p = tuple(p) if p is not None else None
        self.space = TruncatedSpace.full(n, cutoff)
        self.dtype = float if lam == 1 else complex

    @property
    def max_shift(self) -> int:
        return max(self.p) if self.p else 1

    def _build(self, symbol: Symbol) -> ShiftOperator:
        kind, i = symbol
        if not 0 <= i <= self.n:
            raise PreconditionError(f"Index {i} outside 0..{self.n}.")
        q, n = self.q, self.n
        match kind:
            case "z" if i < n:
                def rule(m: State) -> list[tuple[State, float]]:
                    target = m[:i] + (m[i] + 1,) + m[i + 1:]
                    return [(
                        target,
                        q ** sum(m[:i]) * (1 - q ** (2 * (m[i] + 1))) ** 0.5,
                    )]
                return ShiftOperator.from_rule(self.space, rule, self.dtype)
            case "z":
                return ShiftOperator.diagonal_operator(
                    self.space,
                    np.array([self.lam * q ** sum(m) for m in self.space.states],
                             dtype=self.dtype),
                )
            case "x":
                return ShiftOperator.diagonal_operator(
                    self.space, np.array([
                        q ** (2 * sum(m[:i])) * (1 - q ** (2 * m[i])) if i < n
                        else q ** (2 * sum(m))
                        for m in self.space.states
                    ]),
                )
            case "zeta":
                if self.p is None:
                    raise PreconditionError("zeta needs the weights p.")
                result = ShiftOperator.identity(self.space)
                for _ in range(self.p[i]):
                    result = result @ self.generator(("z", i))
                return result
            case _:
                raise PreconditionError(f"Unknown symbol '{kind}'.")

    def matrix_of(self, element: AlgebraElement) -> ShiftOperator:
        if element.n != self.n:
            raise DimensionMismatchError(
                f"Element of dimension {element.n} on a sphere of dimension {self.n}."
            )
        result = ShiftOperator.zero(self.space)
        for monomial, coefficient in element.terms.items():
            term = ShiftOperator.identity(self.space) * coefficient.evaluate(self.q)
            for i, star in monomial.letters():
                term = term @ self.generator(("z*" if star else "z", i))
            result = result + term
        return result


def sphere_rep(
    n: int,
    q: float,
    lam: complex = 1.0,
    cutoff: int = 12,
    p: Sequence[int] | None = None,
) -> SphereRepresentation:
    return SphereRepresentation(n, q, cutoff, lam, p)


def energy(m: State, p: Sequence[int], r: Sequence[int], i: int) -> int:
    """E_i(m) = sum_{t<i} (r_t + p_t (m_{t+1} - m_t)) with m_0 = 0."""
    padded = (0,) + tuple(m)
    return sum(r[t] + p[t] * (padded[t + 1] - padded[t]) for t in range(i))


class PiRepresentation(Representation):
    """
    The representation pi^{(h)}_k of the lens algebra on V_k.

    x_i and zeta_i vanish for i > k; x_k and zeta_k are diagonal; for \
        i < k, zeta_i raises m_{i+1}, ..., m_k by one.
    """

    symbol_kinds = frozenset({"x", "zeta", "zeta*"})

    def __init__(
        self,
        p: Sequence[int],
        r: Sequence[int],
        k: int,
        q: float,
        cutoff: int,
    ) -> None:
        super().__init__()
        h = len(p) - 1
        if len(r) != h:
            raise PreconditionError(f"Need {h} remainders for level {h}, got {r}.")
        if any(not 0 <= value < weight for value, weight in zip(r, p)):
            raise PreconditionError(f"Remainders {r} out of range for {p}.")
        _check_level(h, k)
        if not 0 < q < 1:
            raise PreconditionError(f"q must satisfy 0 < q < 1, got {q}.")
        self.p = tuple(p)
        self.r = tuple(r)
        self.h = h
        self.k = k
        self.q = q
        self.space = TruncatedSpace.subspace(h, k, cutoff)

    @property
    def max_shift(self) -> int:
        return max(self.h, 1)

    def _energies(self, i: int) -> np.ndarray:
        return np.array(
            [energy(m, self.p, self.r, i) for m in self.space.states], dtype=float
        )

    @cached_property
    def x_diagonals(self) -> list[np.ndarray]:
        """Diagonal of x_i for i = 0..h."""
        q, p, r = self.q, self.p, self.r
        values: list[np.ndarray] = []
        for i in range(self.h + 1):
            if i > self.k:
                values.append(np.zeros(len(self.space)))
            elif i == self.k:
                values.append(q ** (2 * self._energies(i)))
            else:
                gaps = np.array([
                    ((0,) + m)[i + 1] - ((0,) + m)[i] for m in self.space.states
                ], dtype=float)
                values.append(
                    q ** (2 * self._energies(i)) * (1 - q ** (2 * (r[i] + p[i] * gaps)))
                )
        return values

    def tail_diagonal(self, i: int) -> np.ndarray:
        """Diagonal of sum_{j>=i} x_j."""
        if i > self.h:
            return np.zeros(len(self.space))
        return np.sum(self.x_diagonals[i:], axis=0)

    def _build(self, symbol: Symbol) -> ShiftOperator:
        kind, i = symbol
        if not 0 <= i <= self.h:
            raise PreconditionError(f"Index {i} outside 0..{self.h}.")
        match kind:
            case "x":
                return ShiftOperator.diagonal_operator(
                    self.space, self.x_diagonals[i]
                )
            case "zeta" if i > self.k:
                return ShiftOperator.zero(self.space)
            case "zeta" if i == self.k:
                return ShiftOperator.diagonal_operator(
                    self.space, self.q ** (self.p[i] * self._energies(i))
                )
            case "zeta":
                return ShiftOperator.from_rule(self.space, self._zeta_rule(i))
            case _:
                raise PreconditionError(
                    f"Symbol '{kind}' is not defined on the lens algebra."
                )

    def _zeta_rule(self, i: int) -> Callable[[State], list[tuple[State, float]]]:
        q, p, r, k = self.q, self.p[i], self.r[i], self.k

        def rule(m: State) -> list[tuple[State, float]]:
            gap = ((0,) + m)[i + 1] - ((0,) + m)[i]
            target = tuple(
                value + 1 if i <= position < k else value
                for position, value in enumerate(m)
            )
            amplitude = q ** (p * energy(m, self.p, self.r, i)) * q_shifted_value(
                p * (gap + 1) + r, p * gap + r, q
            ) ** 0.5
            return [(target, amplitude)]

        return rule

    def _y_diagonal(self, i: int, power: int) -> np.ndarray:
        """Diagonal of z_i^power (z_i^*)^power."""
        x_i = self.x_diagonals[i]
        tail = self.tail_diagonal(i + 1)
        result = np.ones(len(self.space))
        for s in range(power):
            result = result * (x_i + (1 - self.q ** (-2 * s)) * tail)
        return result

    def _block(self, i: int, plain: int, starred: int) -> ShiftOperator:
        """z_i^plain (z_i^*)^starred as zeta powers times a diagonal."""
        weight = self.p[i]
        if (plain - starred) % weight:
            raise PreconditionError(
                f"Block z{i}^{plain} z{i}*^{starred} is not a lens element."
            )
        diagonal = ShiftOperator.diagonal_operator(
            self.space, self._y_diagonal(i, min(plain, starred))
        )
        if plain >= starred:
            result = ShiftOperator.identity(self.space)
            for _ in range((plain - starred) // weight):
                result = result @ self.generator(("zeta", i))
            return result @ diagonal
        result = diagonal
        for _ in range((starred - plain) // weight):
            result = result @ self.generator(("zeta*", i))
        return result

    def monomial_matrix(self, monomial: NormalMonomial) -> ShiftOperator:
        result = ShiftOperator.identity(self.space)
        for i in range(len(monomial.j)):
            if monomial.j[i] or monomial.k[i]:
                result = result @ self._block(i, monomial.j[i], monomial.k[i])
        return result

    def matrix_of(self, element: AlgebraElement) -> ShiftOperator:
        if element.n != self.h:
            raise DimensionMismatchError(
                f"Element of dimension {element.n} at level {self.h}."
            )
        result = ShiftOperator.zero(self.space)
        for monomial, coefficient in element.terms.items():
            result = result \
                + self.monomial_matrix(monomial) * coefficient.evaluate(self.q)
        return result

    def diagonal_of(self, element: AlgebraElement) -> np.ndarray:
        """
        Diagonal of pi(element) for an invariant element.

        Only monomials with j_i = k_i for every i reach the diagonal; any \
            other invariant monomial shifts the lattice.
        """
        if element.n != self.h:
            raise DimensionMismatchError(
                f"Element of dimension {element.n} at level {self.h}."
            )
        result = np.zeros(len(self.space))
        for monomial, coefficient in element.terms.items():
            if monomial.j != monomial.k:
                continue
            term = np.full(len(self.space), float(coefficient.evaluate(self.q)))
            for i, power in enumerate(monomial.j):
                if power:
                    term = term * self._y_diagonal(i, power)
            result = result + term
        return result

    def exponent_table(self, upto: int) -> np.ndarray:
        """
        Integer q^2-exponents of sum_{j>=i} x_j for i = 1..upto; -1 marks a \
            zero eigenvalue.

        The sum telescopes to q^{2 E_i(m)} for i <= k and vanishes for \
            i > k, so the table holds the exact energies.
        """
        table = np.full((len(self.space), upto), -1, dtype=int)
        for column in range(min(upto, self.k)):
            table[:, column] = [
                energy(m, self.p, self.r, column + 1) for m in self.space.states
            ]
        return table


def pi_k(
    h: int, k: int, p: Sequence[int], r: Sequence[int], q: float, cutoff: int = 12
) -> PiRepresentation:
    """pi^{(h)}_k built from the first h + 1 weights of p."""
    p = as_weight_vector(p)
    if h > p.n:
        raise PreconditionError(f"Level {h} exceeds n={p.n}.")
    return PiRepresentation(p.entries[:h + 1], r, k, q, cutoff)


def lens_irrep(
    p: Sequence[int], r: Sequence[int], q: float, cutoff: int = 12
) -> PiRepresentation:
    """The irreducible lens representation, pi^{(n)}_n on 0 <= m_1 <= ... <= m_n."""
    p = as_pairwise_coprime(p)
    return PiRepresentation(p.entries, r, p.n, q, cutoff)


def apply(
    element: AlgebraElement, rep: Representation, vector: np.ndarray
) -> np.ndarray:
    return rep.apply(element, vector)


def matrix_of(element: AlgebraElement, rep: Representation) -> ShiftOperator:
    return rep.matrix_of(element)


def expression_matrix(expression: Expression, rep: Representation) -> ShiftOperator:
    return rep.expression_matrix(expression)


def relabel_sphere_state(m: State, p: Sequence[int], r: Sequence[int]) -> State:
    """k_i = p_{i-1} (m_i - m_{i-1}) + r_{i-1} with m_0 = 0."""
    padded = (0,) + tuple(m)
    return tuple(
        p[i] * (padded[i + 1] - padded[i]) + r[i] for i in range(len(m))
    )


def relabeling_deviation(
    p: Sequence[int], r: Sequence[int], q: float, cutoff: int = 10
) -> float:
    """
    Largest amplitude mismatch between the lens irrep and the sphere \
        representation restricted to the relabeled sublattice.
    """
    lens = lens_irrep(p, r, q, cutoff)
    entries = lens.p
    n = lens.h
    relabeled = {m: relabel_sphere_state(m, entries, r) for m in lens.space.states}
    inverse = {value: m for m, value in relabeled.items()}
    sphere_cutoff = max(sum(value) for value in relabeled.values()) + max(entries)
    sphere = sphere_rep(n, q, cutoff=sphere_cutoff, p=entries)
    margin = n
    deviation = 0.0
    for kind in ("x", "zeta"):
        for i in range(n + 1):
            lens_table = lens.generator((kind, i)).action()
            sphere_table = sphere.generator((kind, i)).action()
            for m in interior_states(lens.space, margin):
                expected = {target: value for target, value in lens_table[m]}
                for target, value in sphere_table[relabeled[m]]:
                    source = inverse.get(target)
                    if source is None:
                        deviation = max(deviation, abs(value))
                        continue
                    deviation = max(
                        deviation, abs(value - expected.pop(source, 0.0))
                    )
                for value in expected.values():
                    deviation = max(deviation, abs(value))
    LOGGER.debug(f"Relabeling deviation for p={entries}, r={tuple(r)}: {deviation}")
    return deviation


def _margin(rep: Representation, relation: Relation) -> int:
    length = max(relation.lhs.max_length(), relation.rhs.max_length(), 1)
    return length * rep.max_shift


def numeric_relation_results(
    rep: Representation,
    relations: Sequence[Relation],
    tolerance: float = 1e-10,
) -> list[RelationResult]:
    """
    Checks relations entrywise on interior columns of a representation.

    Relations using symbols the representation does not define are skipped.
    """
    results: list[RelationResult] = []
    for relation in relations:
        if not rep.supports(relation.lhs.symbols() | relation.rhs.symbols()):
            continue
        columns = rep.space.interior(_margin(rep, relation))
        residual = rep.expression_matrix(relation.lhs).max_deviation(
            rep.expression_matrix(relation.rhs), columns
        )
        results.append(RelationResult(
            name=relation.name,
            indices=relation.indices,
            mode="numeric",
            holds=residual < tolerance,
            residual=residual,
        ))
    return results


def numeric_relation_suite(
    p, q: float = 0.5, cutoff: int = 10, tolerance: float = 1e-10,
    max_power: int = 4,
) -> list[RelationResult]:
    """
    Runs the relation suite in the sphere representation, every lens \
        irrep and every pi^{(h)}_k at the top level h = n.
    """
    p = as_pairwise_coprime(p)
    relations = lens_relation_suite(p, max_power)
    results = numeric_relation_results(
        sphere_rep(p.n, q, cutoff=cutoff * max(p.entries), p=p.entries),
        relations,
        tolerance,
    )
    for r in remainder_labels(p.entries[:-1]):
        for k in range(p.n + 1):
            results.extend(numeric_relation_results(
                PiRepresentation(p.entries, r, k, q, cutoff), relations, tolerance
            ))
    LOGGER.info(
        f"Numeric relation suite for {p}: "
        + f"{sum(result.holds for result in results)}/{len(results)} hold"
    )
    return results


def remainder_labels(weights: Sequence[int]) -> list[tuple[int, ...]]:
    """All r with 0 <= r_i < weights_i, lexicographically."""
    labels: list[tuple[int, ...]] = [()]
    for weight in weights:
        labels = [label + (value,) for label in labels for value in range(weight)]
    return labels
