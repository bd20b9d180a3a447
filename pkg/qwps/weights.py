"""Weight-vector arithmetic and the CP^n classification of weighted spaces."""
from collections import deque
from functools import reduce
from itertools import combinations, permutations
from math import gcd, prod

from pydantic import ValidationError
from sympy import isprime, primefactors, factorint

from qwps import logging_conf
from qwps.common import get_boolean_from_environment_string, get_max_bits
from qwps.models import (
    AdmissibleMove,
    ArithmeticCapacityError,
    ClassificationReport,
    MoveKind,
    PairwiseCoprimeVector,
    PreconditionError,
    WeightVector,
)

LOGGER = logging_conf.LOGGER


def as_weight_vector(entries) -> WeightVector:
    """
    Builds a WeightVector from any sequence, mapping validation errors.

    Raises:
        PreconditionError: If entries are not a valid weight vector.
    """
    if isinstance(entries, WeightVector):
        return entries
    try:
        return WeightVector(entries=tuple(int(value) for value in entries))
    except ValidationError as ve:
        raise PreconditionError(f"Invalid weight vector {entries}: {ve}") from ve


def as_pairwise_coprime(entries) -> PairwiseCoprimeVector:
    """
    Builds a PairwiseCoprimeVector, mapping validation errors.

    Raises:
        PreconditionError: If entries are not pairwise coprime weights.
    """
    if isinstance(entries, PairwiseCoprimeVector):
        return entries
    values = entries.entries if isinstance(entries, WeightVector) else entries
    try:
        return PairwiseCoprimeVector(
            entries=tuple(int(value) for value in values)
        )
    except ValidationError as ve:
        raise PreconditionError(
            f"Invalid pairwise coprime vector {values}: {ve}"
        ) from ve


def _check_capacity(value: int) -> int:
    max_bits = get_max_bits()
    if value.bit_length() > max_bits:
        raise ArithmeticCapacityError(
            f"Integer with {value.bit_length()} bits exceeds the "
            + f"{max_bits}-bit capacity."
        )
    return value


def sharp(p) -> WeightVector:
    """
    The sharp map: entry i is the product of all p_j with j != i.

    Raises:
        ArithmeticCapacityError: If a product exceeds the bit capacity.
    """
    p = as_weight_vector(p)
    entries = tuple(
        _check_capacity(prod(p.entries[:i] + p.entries[i + 1:]))
        for i in range(len(p))
    )
    return WeightVector(entries=entries)


def sharp_twice_factor(weights) -> int:
    """m with sharp(sharp(l)) = m * l, namely (prod l_i)^{n-1}."""
    weights = as_weight_vector(weights)
    return _check_capacity(prod(weights.entries) ** (weights.n - 1))


def overall_gcd(weights) -> int:
    return reduce(gcd, as_weight_vector(weights).entries)


def normalize_gcd(weights) -> WeightVector:
    """Divides by the overall gcd; the weighted space is unchanged."""
    weights = as_weight_vector(weights)
    divisor = overall_gcd(weights)
    return WeightVector(entries=tuple(value // divisor for value in weights.entries))


def partial_quotient(weights, i: int, j: int) -> int:
    """l_{i:j} = l_i / gcd(l_i, l_j)."""
    weights = as_weight_vector(weights)
    return weights[i] // gcd(weights[i], weights[j])


def is_coprime(weights) -> bool:
    return overall_gcd(weights) == 1


def is_pairwise_coprime(weights) -> bool:
    weights = as_weight_vector(weights)
    return all(gcd(a, b) == 1 for a, b in combinations(weights.entries, 2))


def is_normalized(weights) -> bool:
    """
    True iff every prime dividing some entry leaves at least two \
        entries undivided.
    """
    weights = as_weight_vector(weights)
    primes = set()
    for value in weights.entries:
        primes.update(primefactors(value))
    return all(
        sum(1 for value in weights.entries if value % prime) >= 2
        for prime in primes
    )


def _require_coprime(weights: WeightVector) -> None:
    if not is_coprime(weights):
        raise PreconditionError(
            f"Weight vector {weights} is not coprime; divide by "
            + f"{overall_gcd(weights)} first."
        )


def divisibility_criterion(weights) -> tuple[int, int, int] | None:
    """
    First triple (i, j, k) with i != j, j != k and l_{i:j} not dividing l_k.

    Returns:
        tuple[int, int, int] | None: The violating triple, or None when \
            l_{i:j} divides l_k for all admissible triples.
    """
    weights = as_weight_vector(weights)
    size = len(weights)
    for i in range(size):
        for j in range(size):
            if i == j:
                continue
            quotient = partial_quotient(weights, i, j)
            for k in range(size):
                if k != j and weights[k] % quotient:
                    LOGGER.debug(
                        f"{weights}: l_{i}:{j}={quotient} does not divide "
                        + f"l_{k}={weights[k]}"
                    )
                    return (i, j, k)
    return None


def factor_sharp(weights) -> PairwiseCoprimeVector | None:
    """
    Recovers the pairwise coprime p with sharp(p) = l.

    Args:
        weights: A coprime weight vector.

    Raises:
        PreconditionError: If the weights are not coprime.

    Returns:
        PairwiseCoprimeVector | None: p, or None when l is not a sharp.
    """
    weights = as_weight_vector(weights)
    _require_coprime(weights)
    size = len(weights)
    entries = tuple(
        partial_quotient(weights, (j + 1) % size, j) for j in range(size)
    )
    if sharp(entries) != weights or not is_pairwise_coprime(entries):
        LOGGER.debug(f"{weights} is not the sharp of {entries}")
        return None
    return PairwiseCoprimeVector(entries=entries)


def is_cpn(weights) -> bool:
    """True iff the weighted projective space is isomorphic to CP^n."""
    return factor_sharp(weights) is not None


def _check_move(weights: WeightVector, k: int, prime: int) -> None:
    if not 0 <= k < len(weights):
        raise PreconditionError(f"Index {k} out of range for {weights}.")
    if not isprime(prime):
        raise PreconditionError(f"{prime} is not a prime number.")


def admissible_mul(weights, k: int, prime: int) -> WeightVector | None:
    """
    The move M_k(p): multiply every entry but the k-th by p.

    Admissible when p is prime and does not divide l_k.

    Raises:
        PreconditionError: If k is out of range or p is not prime.
    """
    weights = as_weight_vector(weights)
    _check_move(weights, k, prime)
    if weights[k] % prime == 0:
        return None
    return WeightVector(
        entries=tuple(
            value if i == k else _check_capacity(prime * value)
            for i, value in enumerate(weights.entries)
        )
    )


def admissible_div(weights, k: int, prime: int) -> WeightVector | None:
    """
    The move D_k(p): divide every entry but the k-th by p.

    Admissible when p is prime, divides l_i for all i != k and does not \
        divide l_k.

    Raises:
        PreconditionError: If k is out of range or p is not prime.
    """
    weights = as_weight_vector(weights)
    _check_move(weights, k, prime)
    if weights[k] % prime == 0:
        return None
    if any(value % prime for i, value in enumerate(weights.entries) if i != k):
        return None
    return WeightVector(
        entries=tuple(
            value if i == k else value // prime
            for i, value in enumerate(weights.entries)
        )
    )


def _prime_factor_count(weights: WeightVector) -> int:
    return sum(
        sum(factorint(value).values()) for value in weights.entries
    )


def reduction_path(weights) -> list[AdmissibleMove] | None:
    """
    Breadth-first search for admissible moves down to (1,...,1).

    Moves use primes dividing some entry of the start vector, and no \
        visited vector carries more prime factors than the start.

    Returns:
        list[AdmissibleMove] | None: Shortest move sequence, [] for the \
            unit vector, None when unreachable within the bound.
    """
    start = as_weight_vector(weights)
    target = tuple([1] * len(start))
    if start.entries == target:
        return []
    budget = _prime_factor_count(start)
    primes = sorted({p for value in start.entries for p in primefactors(value)})
    parents: dict[tuple[int, ...], tuple[tuple[int, ...], AdmissibleMove] | None] = {
        start.entries: None
    }
    queue = deque([start])
    while queue:
        current = queue.popleft()
        for prime in primes:
            for k in range(len(current)):
                for kind, move in (
                    (MoveKind.DIV, admissible_div),
                    (MoveKind.MUL, admissible_mul),
                ):
                    following = move(current, k, prime)
                    if following is None or following.entries in parents:
                        continue
                    if _prime_factor_count(following) > budget:
                        continue
                    parents[following.entries] = (
                        current.entries,
                        AdmissibleMove(
                            kind=kind, k=k, prime=prime,
                            result=following.entries,
                        ),
                    )
                    if following.entries == target:
                        return _unwind(parents, following.entries)
                    queue.append(following)
    LOGGER.debug(f"No admissible path from {start} to {target}")
    return None


def _unwind(parents: dict, entries: tuple[int, ...]) -> list[AdmissibleMove]:
    moves: list[AdmissibleMove] = []
    while parents[entries] is not None:
        entries, move = parents[entries]
        moves.append(move)
    return list(reversed(moves))


def is_cpn_permutation_invariant(weights) -> bool:
    """Checks that is_cpn gives the same verdict on every permutation."""
    weights = as_weight_vector(weights)
    verdicts = {is_cpn(order) for order in permutations(weights.entries)}
    return len(verdicts) == 1


def classify(weights) -> ClassificationReport:
    """
    Bundles the classification data of a weight vector.

    Raises:
        PreconditionError: If the weights are not coprime.
    """
    weights = as_weight_vector(weights)
    _require_coprime(weights)
    factor = factor_sharp(weights)
    path = reduction_path(weights) if factor is not None \
        or get_boolean_from_environment_string("QWPS_SEARCH_ALL_PATHS") \
        else None
    LOGGER.info(
        f"Classified {weights}: "
        + ("CP^n" if factor is not None else "not CP^n")
    )
    return ClassificationReport(
        weights=weights.entries,
        coprime=True,
        pairwise_coprime=is_pairwise_coprime(weights),
        normalized=is_normalized(weights),
        factor=factor.entries if factor is not None else None,
        is_cpn=factor is not None,
        path=path,
    )
