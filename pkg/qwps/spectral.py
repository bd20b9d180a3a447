"""Spectral-triple diagnostics for the Fredholm modules."""
from math import comb, log
from typing import Callable, Sequence

import numpy as np
from scipy.sparse import bmat, csr_matrix, diags

from qwps import logging_conf
from qwps.models import (
    CommutatorProfile,
    DiracSpec,
    FredholmLabel,
    LambdaKind,
    PreconditionError,
    ZetaDiagnostic,
)
from qwps.ncalgebra import AlgebraElement
from qwps.representations import (
    PiRepresentation,
    ShiftOperator,
    State,
    TruncatedSpace,
    lattice_states,
)
from qwps.weights import as_pairwise_coprime, sharp

LOGGER = logging_conf.LOGGER


def multiplicity(n: int, value: int) -> int:
    """Number of m in N^n with ||m||_1 = value, C(value+n-1, n-1)."""
    if n < 1 or value < 0:
        raise PreconditionError(f"Multiplicity needs n >= 1, value >= 0: {n}, {value}.")
    return comb(value + n - 1, n - 1)


def multiplicity_by_enumeration(n: int, value: int) -> int:
    return sum(1 for m in lattice_states(n, value) if sum(m) == value)


def multiplicity_total(n: int, cutoff: int) -> int:
    """sum_{t<=cutoff} C(t+n-1, n-1) = C(cutoff+n, n)."""
    return comb(cutoff + n, n)


def dirac_modulus(space: TruncatedSpace, spec: DiracSpec | None = None) -> ShiftOperator:
    """|D| |m> = lambda(||m||_1) |m>."""
    value: Callable[[int], float] = spec.value if spec is not None else float
    return ShiftOperator.diagonal_operator(
        space, np.array([value(int(norm)) for norm in space.norms])
    )


def weighted_shift(
    space: TruncatedSpace, k: Sequence[int], c: Callable[[State], float]
) -> ShiftOperator:
    """S(k, c): |m> -> c(m) |m + k>, zero where m + k leaves N^n."""
    if len(k) != space.n:
        raise PreconditionError(f"Shift {k} does not match lattice dimension {space.n}.")

    def rule(m: State) -> list[tuple[State, float]]:
        target = tuple(a + b for a, b in zip(m, k))
        if min(target, default=0) < 0:
            return []
        return [(target, c(m))]

    return ShiftOperator.from_rule(space, rule)


def derivation_defect(shift: ShiftOperator, k: Sequence[int]) -> float:
    """Largest entry of [|D|, S] - (k_1 + ... + k_n) S."""
    modulus = dirac_modulus(shift.space)
    commutator = modulus @ shift - shift @ modulus
    defect = (commutator - shift * float(sum(k))).matrix
    return float(abs(defect).max()) if defect.nnz else 0.0


def _embedding(rep: PiRepresentation, full: TruncatedSpace) -> csr_matrix:
    rows = [full.position(m) for m in rep.space.states]
    return csr_matrix(
        (np.ones(len(rows)), (rows, np.arange(len(rows)))),
        shape=(len(full), len(rep.space)),
    )


def graded_representation(
    a: AlgebraElement, label: FredholmLabel, p, q: float, cutoff: int
) -> tuple[TruncatedSpace, csr_matrix, csr_matrix]:
    """pi_+(a) and pi_-(a), the sums of pi_k(a) over even and odd k."""
    p = as_pairwise_coprime(p)
    h = label.h
    if h < 1:
        raise PreconditionError("Commutator profiles need a level h >= 1.")
    full = TruncatedSpace.full(h, cutoff)
    restricted = a.quotient(h)
    plus = csr_matrix((len(full), len(full)))
    minus = csr_matrix((len(full), len(full)))
    for k in range(h + 1):
        rep = PiRepresentation(p.entries[:h + 1], label.r, k, q, cutoff)
        embed = _embedding(rep, full)
        block = embed @ rep.matrix_of(restricted).matrix @ embed.transpose()
        if k % 2:
            minus = minus + block
        else:
            plus = plus + block
    return full, plus.tocsr(), minus.tocsr()


def commutator_norm(
    a: AlgebraElement, spec: DiracSpec, label: FredholmLabel, p, q: float, cutoff: int
) -> float:
    """Largest column norm of [D, pi(a)] with D = [[0, L], [L, 0]]."""
    full, plus, minus = graded_representation(a, label, p, q, cutoff)
    modulus = diags(np.array([spec.value(int(t)) for t in full.norms]), format="csr")
    upper = modulus @ minus - plus @ modulus
    lower = modulus @ plus - minus @ modulus
    commutator = bmat([[None, upper], [lower, None]], format="csr")
    squares = np.asarray(commutator.multiply(commutator.conj()).sum(axis=0)).ravel()
    return float(np.sqrt(squares.max())) if squares.size else 0.0


def dirac_envelope(h: int, q: float, cutoff: int, shift: int = 0) -> float:
    """
    max_{t <= cutoff} h t q^{max(t - shift, 0)}.

    With shift 0 this is the h m q^m envelope of a weighted shift: the \
        amplitude decays like q^m while |D| grows like h m.
    """
    return max(h * t * q ** max(t - shift, 0) for t in range(cutoff + 1))


def commutator_envelope(a: AlgebraElement, h: int, q: float, cutoff: int) -> float:
    """
    Monomial-wise envelope sum_M |c_M| (h L_M + 2 dirac_envelope(h, q, \
        cutoff, L_M)), L_M the degree of M.

    A monomial of degree L moves a state by at most L in norm, so |D| \
        changes by at most h L across it and its amplitude decay starts \
            L steps later; for L = 0 the bound is twice the h m q^m envelope.
    """
    total = 0.0
    for monomial, coefficient in a.terms.items():
        length = monomial.degree()
        peak = dirac_envelope(h, q, cutoff, length)
        total += abs(float(coefficient.evaluate(q))) * (h * length + 2 * peak)
    return total


def commutator_profile(
    a: AlgebraElement,
    spec: DiracSpec,
    label: FredholmLabel,
    p,
    q: float,
    cutoffs: Sequence[int],
) -> CommutatorProfile:
    """
    Commutator norms of an invariant element at increasing cutoffs.

    Boundedness is asserted only for Lipschitz lambda (IDENTITY, or \
        POWER with d >= n); other profiles are reported as observed.

    Raises:
        PreconditionError: If cutoffs are not increasing or a is not invariant.
    """
    p = as_pairwise_coprime(p)
    if list(cutoffs) != sorted(set(cutoffs)):
        raise PreconditionError(f"Cutoffs must increase: {cutoffs}.")
    if not a.is_invariant(sharp(p)):
        raise PreconditionError(f"Element {a} is not invariant under {sharp(p)}.")
    norms = [commutator_norm(a, spec, label, p, q, cutoff) for cutoff in cutoffs]
    envelope = [commutator_envelope(a, label.h, q, cutoff) for cutoff in cutoffs]
    lipschitz = spec.lambda_kind == LambdaKind.IDENTITY or (
        spec.lambda_kind == LambdaKind.POWER and spec.d >= spec.n
    )
    bounded = max(norms) <= max(envelope) if lipschitz else None
    LOGGER.debug(f"Commutator profile of {a}: {norms}")
    return CommutatorProfile(
        element=a.to_text(),
        lambda_kind=spec.lambda_kind,
        cutoffs=list(cutoffs),
        norms=norms,
        envelope=envelope,
        bounded=bounded,
    )


def lambda_samples(spec: DiracSpec, upto: int) -> list[float]:
    return [spec.value(t) for t in range(upto + 1)]


def lipschitz_norm(samples: Sequence[float]) -> float:
    """Largest |lambda(t+1) - lambda(t)| on the integer grid."""
    if len(samples) < 2:
        raise PreconditionError("Lipschitz norm needs at least two samples.")
    values = np.asarray(samples, dtype=float)
    return float(np.max(np.abs(np.diff(values))))


def zeta_partial(spec: DiracSpec, s: float, terms: int) -> ZetaDiagnostic:
    """
    Partial sums of sum_{j>=1} mu_j lambda(j)^{-s} with a decay diagnostic.

    The tail exponent is the log2 ratio of the increments at terms and \
        terms / 2; the series is reported convergent when it lies below -1.
    """
    if s <= 0:
        raise PreconditionError(f"s must be positive, got {s}.")
    if terms < 4:
        raise PreconditionError(f"Need at least 4 terms, got {terms}.")

    def increment(j: int) -> float:
        value = spec.value(j)
        return multiplicity(spec.n, j) * value ** (-s) if value > 0 else 0.0

    increments = [increment(j) for j in range(1, terms + 1)]
    running = np.cumsum(increments)
    checkpoints = sorted({max(terms // 8, 1), terms // 4, terms // 2, terms})
    late, early = increments[terms - 1], increments[terms // 2 - 1]
    exponent = log(late / early) / log(terms / (terms // 2)) \
        if late > 0 and early > 0 else float("-inf")
    diagnostic = ZetaDiagnostic(
        s=s,
        terms=terms,
        partial_sums=[float(running[t - 1]) for t in checkpoints],
        tail_exponent=exponent,
        convergent=exponent < -1 - 1e-3,
    )
    LOGGER.debug(
        f"Zeta partial sum s={s}, {terms} terms: {diagnostic.partial_sums[-1]} "
        + f"(tail exponent {exponent:.4f})"
    )
    return diagnostic


def spectrum_rows(spec: DiracSpec) -> list[dict]:
    """lambda(t) and its multiplicity for t = 0..cutoff."""
    return [
        {
            "t": t,
            "lambda": spec.value(t),
            "multiplicity": multiplicity(spec.n, t),
            "enumerated": multiplicity_by_enumeration(spec.n, t),
        }
        for t in range(spec.cutoff + 1)
    ]
