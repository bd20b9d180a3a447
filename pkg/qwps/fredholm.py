"""
Fredholm modules over quantum weighted projective spaces and their index \
    pairings with projections and idempotents.
"""
from functools import lru_cache
from itertools import product as cartesian
from math import comb, fsum, prod
from typing import Sequence

import numpy as np
from pydantic import ValidationError

from qwps import logging_conf
from qwps.base import AsyncTaskRunner
from qwps.models import (
    FredholmLabel,
    PairingReport,
    PairwiseCoprimeVector,
    PreconditionError,
    ProjectionLabel,
    RunConfig,
    VerificationError,
)
from qwps.ncalgebra import AlgebraElement
from qwps.representations import (
    PiRepresentation,
    intersection_basis,
    remainder_labels,
)
from qwps.weights import as_pairwise_coprime, sharp

LOGGER = logging_conf.LOGGER

TAIL_LIMIT = 0.25


def fredholm_labels(p) -> list[FredholmLabel]:
    """The rank-one label h = 0 followed by (h, r) for h = 1..n."""
    p = as_pairwise_coprime(p)
    labels = [FredholmLabel(h=0, r=())]
    for h in range(1, p.n + 1):
        labels.extend(
            FredholmLabel(h=h, r=r) for r in remainder_labels(p.entries[:h])
        )
    return labels


def label_count(p) -> int:
    """1 + sum_{k=1}^n p_0 ... p_{k-1}."""
    p = as_pairwise_coprime(p)
    return 1 + sum(prod(p.entries[:k]) for k in range(1, p.n + 1))


def projection_labels(n: int, alpha_max: int, m_max: int | None = None) -> list[ProjectionLabel]:
    m_max = n if m_max is None else min(m_max, n)
    return [
        ProjectionLabel(m=m, alpha=alpha)
        for m in range(1, m_max + 1)
        for alpha in cartesian(range(alpha_max + 1), repeat=m)
    ]


def _check_label(label: FredholmLabel, p: PairwiseCoprimeVector) -> None:
    if label.h > p.n:
        raise PreconditionError(f"Level {label.h} exceeds n={p.n}.")
    if any(value >= weight for value, weight in zip(label.r, p.entries)):
        raise PreconditionError(f"Remainders {label.r} out of range for {p}.")


def as_label(h: int, r: Sequence[int] = ()) -> FredholmLabel:
    try:
        return FredholmLabel(h=h, r=tuple(r))
    except ValidationError as ve:
        raise PreconditionError(f"Invalid Fredholm label ({h}, {r}): {ve}") from ve


def as_projection(alpha: Sequence[int]) -> ProjectionLabel:
    try:
        return ProjectionLabel(m=len(alpha), alpha=tuple(alpha))
    except ValidationError as ve:
        raise PreconditionError(f"Invalid projection label {alpha}: {ve}") from ve


def intersection_tail(h: int, q: float, cutoff: int) -> float:
    """
    sum_k sum_{t > cutoff // h} C(t+k-1, k-1) C(t, h-k) q^t, the weighted \
        count of intersection states beyond the cutoff.
    """
    if h < 1:
        return 0.0
    start = cutoff // h + 1
    total = 0.0
    for k in range(1, h + 1):
        t = start
        while True:
            term = comb(t + k - 1, k - 1) * comb(t, h - k) * q**t
            total += term
            if t > start + h and term < 1e-18:
                break
            t += 1
    return total


def _representations(
    p: Sequence[int], r: Sequence[int], h: int, q: float, cutoff: int
) -> list[PiRepresentation]:
    return [PiRepresentation(p[:h + 1], r, k, q, cutoff) for k in range(h + 1)]


def trace_difference(
    a: AlgebraElement,
    label: FredholmLabel,
    p,
    q: float,
    cutoff: int,
) -> tuple[float, float]:
    """
    Truncated trace of pi_+(a) - pi_-(a) in the Fredholm module of label.

    The trace is the alternating sum over k of the diagonal differences \
        of pi_{k-1}(a) and pi_k(a) on V_{k-1} and V_k intersected.

    Args:
        a (AlgebraElement): An invariant element.
        label (FredholmLabel): The module.
        p: Pairwise coprime weights.
        q (float): Deformation parameter.
        cutoff (int): Lattice truncation.

    Raises:
        PreconditionError: If a is not invariant or the label is invalid.

    Returns:
        tuple[float, float]: Value and tail bound.
    """
    p = as_pairwise_coprime(p)
    _check_label(label, p)
    if a.n != p.n:
        raise PreconditionError(f"Element of dimension {a.n} for weights {p}.")
    if not a.is_invariant(sharp(p)):
        raise PreconditionError(f"Element {a} is not invariant under {sharp(p)}.")
    if label.h == 0:
        return float(a.character().evaluate(q)), 0.0
    h = label.h
    restricted = a.quotient(h)
    reps = _representations(p.entries, label.r, h, q, cutoff)
    diagonals = [rep.diagonal_of(restricted) for rep in reps]
    terms: list[float] = []
    constant = 0.0
    for k in range(1, h + 1):
        sign = (-1) ** (k - 1)
        for state in intersection_basis(h, k, cutoff):
            before = diagonals[k - 1][reps[k - 1].space.position(state.m)]
            after = diagonals[k][reps[k].space.position(state.m)]
            difference = sign * (before - after)
            terms.append(difference)
            peak = state.m[k - 1]
            if peak > cutoff // (2 * h):
                constant = max(constant, abs(difference) * q ** (-peak))
    tail = constant * intersection_tail(h, q, cutoff)
    value = fsum(terms)
    LOGGER.debug(
        f"Trace difference at (h={h}, r={label.r}), cutoff {cutoff}: "
        + f"{value} (tail {tail:.3e})"
    )
    return value, tail


def spectral_projection_states(
    i: int,
    alpha_partial_sum: int,
    label: FredholmLabel,
    p,
    q: float,
    cutoff: int,
    k: int,
) -> list[tuple[int, ...]]:
    """
    States of V_k on which sum_{j>=i} x_j has eigenvalue \
        q^{2 alpha_partial_sum}, compared on integer exponents.
    """
    p = as_pairwise_coprime(p)
    _check_label(label, p)
    if not 1 <= i <= label.h:
        return []
    norms, table, states = _exponent_table(
        p.entries[:label.h + 1], label.r, k, q, cutoff
    )
    return [
        state for state, exponent in zip(states, table[:, i - 1])
        if exponent == alpha_partial_sum
    ]


@lru_cache(maxsize=256)
def _exponent_table(
    p: tuple[int, ...], r: tuple[int, ...], k: int, q: float, cutoff: int
) -> tuple[np.ndarray, np.ndarray, tuple[tuple[int, ...], ...]]:
    rep = PiRepresentation(p, r, k, q, cutoff)
    return rep.space.norms, rep.exponent_table(len(r)), rep.space.states


def pairing_formula(label: FredholmLabel, proj: ProjectionLabel, p) -> int:
    """
    (-1)^m C(N, h - m) with N = sum_i (alpha_{i+1} - r_i) / p_i when h >= m \
        and every alpha_{i+1} - r_i lies in p_i N; zero otherwise.
    """
    p = as_pairwise_coprime(p)
    _check_label(label, p)
    h, m = label.h, proj.m
    if h < m:
        return 0
    total = 0
    for i in range(m):
        difference = proj.alpha[i] - label.r[i]
        if difference < 0 or difference % p[i]:
            return 0
        total += difference // p[i]
    return (-1) ** m * comb(total, h - m)


def pairing_oracle(
    label: FredholmLabel,
    proj: ProjectionLabel,
    p,
    q: float,
    cutoff: int,
) -> tuple[float, float]:
    """
    Truncated trace of sum_k (-1)^k pi_k(P_m(alpha)).

    Returns:
        tuple[float, float]: The value and the total absolute shell sum \
            over the last h norm shells below the cutoff.
    """
    p = as_pairwise_coprime(p)
    _check_label(label, p)
    h, m = label.h, proj.m
    if m > h:
        return 0.0, 0.0
    targets = np.cumsum(proj.alpha)
    shells = np.zeros(cutoff + 1)
    for k in range(h + 1):
        norms, table, _ = _exponent_table(
            p.entries[:h + 1], label.r, k, q, cutoff
        )
        selected = np.all(table[:, :m] == targets, axis=1)
        shells += (-1) ** k * np.bincount(norms[selected], minlength=cutoff + 1)
    value = fsum(shells)
    tail = float(np.abs(shells[max(cutoff - h + 1, 0):]).sum())
    return value, tail


def pairing_report(
    label: FredholmLabel,
    proj: ProjectionLabel,
    p,
    q: float,
    cutoff: int,
    max_cutoff: int = 80,
) -> PairingReport:
    """
    Formula and oracle side by side, raising the cutoff until the tail \
        bound is below the rounding threshold or max_cutoff is reached.
    """
    p = as_pairwise_coprime(p)
    cutoff = max(cutoff, max(proj.alpha) + label.h + 5)
    max_cutoff = max(max_cutoff, cutoff)
    while True:
        value, tail = pairing_oracle(label, proj, p, q, cutoff)
        if tail < TAIL_LIMIT or cutoff >= max_cutoff:
            break
        cutoff = min(max_cutoff, cutoff + max(4, cutoff // 2))
    if tail >= TAIL_LIMIT:
        LOGGER.warning(
            f"Tail bound {tail:.3e} not certified for h={label.h}, "
            + f"r={label.r}, alpha={proj.alpha} at cutoff {cutoff}"
        )
    return PairingReport(
        h=label.h,
        r=label.r,
        m=proj.m,
        alpha=proj.alpha,
        q=q,
        cutoff=cutoff,
        formula_value=pairing_formula(label, proj, p),
        oracle_value=value,
        tail_bound=tail,
    )


def pairing_table(
    p,
    grid: tuple[int, int, int],
    config: RunConfig,
) -> list[PairingReport]:
    """
    Pairing reports for every label with h <= h_max against every \
        projection with m <= m_max and entries <= alpha_max.
    """
    p = as_pairwise_coprime(p)
    h_max, m_max, alpha_max = grid
    items = [
        (label, proj)
        for label in fredholm_labels(p)
        if label.h <= h_max
        for proj in projection_labels(p.n, alpha_max, m_max)
    ]
    LOGGER.info(f"Computing {len(items)} pairings for {p}")

    def compute(item: tuple[FredholmLabel, ProjectionLabel]) -> PairingReport:
        label, proj = item
        return pairing_report(
            label, proj, p, config.q, config.cutoff, config.max_cutoff
        )

    reports = AsyncTaskRunner(config.threads).map(compute, items)
    mismatches = [report for report in reports if not report.agrees]
    if mismatches:
        LOGGER.warning(f"{len(mismatches)} of {len(reports)} pairings disagree")
    return reports


def alpha_from_family(s: Sequence[int], beta: Sequence[int], p) -> tuple[int, ...]:
    """alpha_{i+1} = s_i + p_i beta_{i+1}."""
    p = as_pairwise_coprime(p)
    if len(s) != len(beta):
        raise PreconditionError(f"Family data {s} and {beta} differ in length.")
    if any(not 0 <= value < p[i] for i, value in enumerate(s)):
        raise PreconditionError(f"Remainders {s} out of range for {p}.")
    return tuple(value + p[i] * beta[i] for i, value in enumerate(s))


def family_pairing(
    h: int, r: Sequence[int], s: Sequence[int], beta: Sequence[int]
) -> int:
    """(-1)^m [r_i = s_i for i < m] C(beta_1 + ... + beta_m, h - m)."""
    m = len(s)
    if h < m or tuple(r[:m]) != tuple(s):
        return 0
    return (-1) ** m * comb(sum(beta), h - m)


def dual_family_matrix(
    p, q: float = 0.5, cutoff: int = 12, max_cutoff: int = 80
) -> tuple[list[FredholmLabel], np.ndarray]:
    """
    Oracle pairings of every module with the projections P_m(alpha(s, 0)), \
        columns indexed by the same labels; the h = 0 column is the unit.
    """
    p = as_pairwise_coprime(p)
    labels = fredholm_labels(p)
    unit = AlgebraElement.one(p.n)
    matrix = np.zeros((len(labels), len(labels)))
    for row, label in enumerate(labels):
        for column, target in enumerate(labels):
            if target.h == 0:
                matrix[row, column] = trace_difference(unit, label, p, q, cutoff)[0]
                continue
            proj = ProjectionLabel(
                m=target.h,
                alpha=alpha_from_family(target.r, (0,) * target.h, p),
            )
            matrix[row, column] = pairing_report(
                label, proj, p, q, cutoff, max_cutoff
            ).oracle_value
    return labels, matrix


def dual_family_certificate(p, q: float = 0.5, cutoff: int = 12) -> bool:
    """True iff the dual-family matrix is diagonal with entries (-1)^h."""
    labels, matrix = dual_family_matrix(p, q, cutoff)
    expected = np.diag([(-1) ** label.h for label in labels])
    return bool(np.all(np.abs(matrix - expected) < 1e-6))


def _matrix_square(
    entries: Sequence[Sequence[AlgebraElement]],
) -> list[list[AlgebraElement]]:
    size = len(entries)
    square = []
    for i in range(size):
        row = []
        for j in range(size):
            value = AlgebraElement.zero(entries[i][j].n)
            for t in range(size):
                value = value + entries[i][t] * entries[t][j]
            row.append(value)
        square.append(row)
    return square


def pairing_idempotent(
    entries: Sequence[Sequence[AlgebraElement]],
    label: FredholmLabel,
    p,
    q: float,
    cutoff: int,
    check: bool = True,
) -> tuple[float, float]:
    """
    Pairing of a Fredholm module with an idempotent matrix: the trace \
        difference of its matrix trace.

    Raises:
        PreconditionError: If check is set and entries is not idempotent.
    """
    p = as_pairwise_coprime(p)
    if not entries:
        return 0.0, 0.0
    if check and _matrix_square(entries) != [list(row) for row in entries]:
        raise PreconditionError("Matrix is not idempotent.")
    trace = AlgebraElement.zero(p.n)
    for i in range(len(entries)):
        trace = trace + entries[i][i]
    if trace.is_zero():
        return 0.0, 0.0
    return trace_difference(trace, label, p, q, cutoff)


def certified_trace_difference(
    a: AlgebraElement,
    label: FredholmLabel,
    p,
    q: float,
    cutoff: int,
    max_cutoff: int = 80,
    tolerance: float = 1e-6,
) -> tuple[float, float, int]:
    """
    Raises the cutoff until the tail bound drops below tolerance.

    Raises:
        VerificationError: If max_cutoff is reached without certification.
    """
    while True:
        value, tail = trace_difference(a, label, p, q, cutoff)
        if tail < tolerance:
            return value, tail, cutoff
        if cutoff >= max_cutoff:
            raise VerificationError(
                f"Tail {tail:.3e} above {tolerance} at cutoff {cutoff}."
            )
        cutoff = min(max_cutoff, cutoff + max(4, cutoff // 2))
