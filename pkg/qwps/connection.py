"""Strong connections of the U(1)-bundle over a lens space and their idempotents."""
from __future__ import annotations

from functools import lru_cache

from qwps import logging_conf
from qwps.fredholm import as_label, pairing_idempotent
from qwps.models import (
    CoefficientSource,
    IdempotentReport,
    NontrivialityReport,
    PairingReport,
    VerificationError,
)
from qwps.ncalgebra import (
    AlgebraElement,
    CommutingPoly,
    coefficients_for,
    zeta,
    zeta_star,
)
from qwps.qarith import ONE, LaurentScalar, f_poly
from qwps.representations import remainder_labels
from qwps.weights import as_pairwise_coprime, sharp

LOGGER = logging_conf.LOGGER


class TensorElement:
    """
    Finite sum of left (x) right pairs of algebra elements.

    Attributes:
        pairs (list[tuple[AlgebraElement, AlgebraElement]]): The summands.
        unmerged_size (int): Summand count before merging.
    """

    def __init__(
        self,
        pairs: list[tuple[AlgebraElement, AlgebraElement]],
        unmerged_size: int | None = None,
    ) -> None:
        self.pairs = pairs
        self.unmerged_size = len(pairs) if unmerged_size is None else unmerged_size

    def __len__(self) -> int:
        return len(self.pairs)

    @property
    def n(self) -> int:
        return self.pairs[0][0].n

    def contract(self) -> AlgebraElement:
        """sum of left * right."""
        total = AlgebraElement.zero(self.n)
        for left, right in self.pairs:
            total = total + left * right
        return total

    def merged(self) -> TensorElement:
        """
        Combines pairs whose right factors are scalar multiples of the same \
            monomial; the scalar moves to the left factor.
        """
        combined: dict = {}
        order: list = []
        for left, right in self.pairs:
            if len(right.terms) != 1:
                key = ("element", right)
                scale, unit = ONE, right
            else:
                ((monomial, scale),) = right.terms.items()
                key = ("monomial", monomial)
                unit = AlgebraElement(right.n, {monomial: ONE})
            if key not in combined:
                combined[key] = [AlgebraElement.zero(left.n), unit]
                order.append(key)
            combined[key][0] = combined[key][0] + left * scale
        pairs = [
            (combined[key][0], combined[key][1])
            for key in order
            if not combined[key][0].is_zero()
        ]
        return TensorElement(pairs, self.unmerged_size)

    def line_module_indices(self, p) -> list[tuple[set[int], set[int]]]:
        """Grades of the left and right factors, in units of p_0 ... p_n."""
        p = as_pairwise_coprime(p)
        weights = sharp(p)
        return [
            (
                {value // p.product for value in left.grades(weights)},
                {value // p.product for value in right.grades(weights)},
            )
            for left, right in self.pairs
        ]


@lru_cache(maxsize=None)
def _strong_connection(
    k: int, entries: tuple[int, ...], source: CoefficientSource
) -> TensorElement:
    p = as_pairwise_coprime(entries)
    n = p.n
    if k == 0:
        one = AlgebraElement.one(n)
        return TensorElement([(one, one)])
    starred = k < 0
    coefficients = [
        coefficient.to_element()
        for coefficient in coefficients_for(p, source, starred)
    ]
    previous = _strong_connection(k + 1 if starred else k - 1, entries, source)
    pairs: list[tuple[AlgebraElement, AlgebraElement]] = []
    for i in range(n + 1):
        head = coefficients[i] * (zeta_star(p, i) if starred else zeta(p, i))
        tail = zeta(p, i) if starred else zeta_star(p, i)
        for left, right in previous.pairs:
            pairs.append((head * left, right * tail))
    connection = TensorElement(pairs, previous.unmerged_size * (n + 1)).merged()
    if connection.contract() != AlgebraElement.one(n):
        raise VerificationError(
            f"Strong connection for k={k}, p={p} does not contract to 1."
        )
    LOGGER.debug(
        f"Strong connection k={k}, p={p}: {len(connection)} terms "
        + f"({connection.unmerged_size} before merging)"
    )
    return connection


def strong_connection(
    k: int, p, source: CoefficientSource = CoefficientSource.RECURSION
) -> TensorElement:
    """
    omega(u^k), built by sandwiching omega(u^{k-1}) between a_i zeta_i and \
        zeta_i^* (k >= 1), or omega(u^{k+1}) between b_i zeta_i^* and \
            zeta_i (k <= -1).

    Raises:
        VerificationError: If sum left * right is not exactly 1.
    """
    p = as_pairwise_coprime(p)
    return _strong_connection(k, p.entries, source)


class Idempotent:
    """
    Matrix with entries E_ij = right_i * left_j of a strong connection.
    """

    def __init__(self, entries: list[list[AlgebraElement]], unmerged_size: int) -> None:
        self.entries = entries
        self.unmerged_size = unmerged_size

    @property
    def size(self) -> int:
        return len(self.entries)

    def square(self) -> list[list[AlgebraElement]]:
        size = self.size
        result = []
        for i in range(size):
            row = []
            for j in range(size):
                value = AlgebraElement.zero(self.entries[i][j].n)
                for t in range(size):
                    value = value + self.entries[i][t] * self.entries[t][j]
                row.append(value)
            result.append(row)
        return result

    def is_idempotent(self) -> bool:
        return self.square() == self.entries

    def is_coinvariant(self, p) -> bool:
        weights = sharp(as_pairwise_coprime(p))
        return all(entry.is_invariant(weights) for row in self.entries for entry in row)

    def trace(self) -> AlgebraElement:
        total = AlgebraElement.zero(self.entries[0][0].n)
        for i in range(self.size):
            total = total + self.entries[i][i]
        return total

    def to_text(self) -> list[list[str]]:
        return [[entry.to_text() for entry in row] for row in self.entries]


def idempotent(
    k: int, p, source: CoefficientSource = CoefficientSource.RECURSION
) -> Idempotent:
    connection = strong_connection(k, p, source)
    entries = [
        [right * left for left, _ in connection.pairs]
        for _, right in connection.pairs
    ]
    return Idempotent(entries, connection.unmerged_size)


def idempotent_report(
    k: int, p, source: CoefficientSource = CoefficientSource.RECURSION,
    with_entries: bool = False,
) -> IdempotentReport:
    """
    Builds E_k and checks E^2 = E and coinvariance exactly.

    Raises:
        VerificationError: If either check fails.
    """
    p = as_pairwise_coprime(p)
    matrix = idempotent(k, p, source)
    squares = matrix.is_idempotent()
    coinvariant = matrix.is_coinvariant(p)
    if not squares or not coinvariant:
        raise VerificationError(
            f"E_{k} for {p}: idempotent={squares}, coinvariant={coinvariant}"
        )
    LOGGER.info(f"E_{k} for {p} has size {matrix.size} and squares to itself")
    return IdempotentReport(
        p=p.entries,
        k=k,
        size=matrix.size,
        unmerged_size=matrix.unmerged_size,
        idempotent=squares,
        coinvariant=coinvariant,
        entries=matrix.to_text() if with_entries else [],
    )


def trace_of_idempotent(
    k: int, p, source: CoefficientSource = CoefficientSource.RECURSION
) -> AlgebraElement:
    """Tr(E_k); for k = 1 this is sum_i zeta_i^* a_i zeta_i."""
    return idempotent(k, p, source).trace()


def trace_closed_form_n1(p_0: int, p_1: int) -> AlgebraElement:
    """1 - (1 - f(q^{2 p_0} x_1))^{p_1} + (1 - f(x_1))^{p_1}."""
    as_pairwise_coprime((p_0, p_1))
    x_1 = CommutingPoly.variable(1, 1)
    one = CommutingPoly.one(1)
    f = f_poly(p_0)
    shifted = f.evaluate(x_1 * LaurentScalar.q_power(2 * p_0), one)
    plain = f.evaluate(x_1, one)
    return (one - (one - shifted) ** p_1 + (one - plain) ** p_1).to_element()


def nontriviality_certificate(
    p,
    q: float = 0.5,
    cutoff: int = 12,
    max_cutoff: int = 80,
    source: CoefficientSource = CoefficientSource.RECURSION,
) -> NontrivialityReport:
    """
    Pairs E_1 with every level-one Fredholm module. The bundle is \
        non-trivial when some pairing differs from that of a free module.
    """
    p = as_pairwise_coprime(p)
    matrix = idempotent(1, p, source)
    if not matrix.is_idempotent():
        raise VerificationError(f"E_1 for {p} is not idempotent.")
    reports: list[PairingReport] = []
    for r in remainder_labels(p.entries[:1]):
        label = as_label(1, r)
        current = cutoff
        while True:
            value, tail = pairing_idempotent(
                matrix.entries, label, p, q, current, check=False
            )
            if tail < 0.25 or current >= max_cutoff:
                break
            current = min(max_cutoff, current + max(4, current // 2))
        reports.append(PairingReport(
            subject="idempotent",
            h=1,
            r=r,
            q=q,
            cutoff=current,
            formula_value=-1,
            oracle_value=value,
            tail_bound=tail,
        ))
    # a free module of any rank pairs to zero with level-one modules
    trivial_value = 0
    nontrivial = any(
        report.tail_bound < 0.25 and round(report.oracle_value) != trivial_value
        for report in reports
    )
    LOGGER.info(
        f"E_1 pairings for {p} at q={q}: "
        + ", ".join(f"{report.oracle_value:.9f}" for report in reports)
    )
    return NontrivialityReport(
        p=p.entries,
        q=q,
        values=reports,
        trivial_value=trivial_value,
        nontrivial=nontrivial,
    )
