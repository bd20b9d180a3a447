from __future__ import annotations
from enum import Enum
from math import gcd, prod

from pydantic import (
    BaseModel,
    ConfigDict,
    Field,
    computed_field,
    field_validator,
    model_validator,
)


class WeightVector(BaseModel):
    model_config = ConfigDict(frozen=True)

    entries: tuple[int, ...]

    @field_validator("entries")
    @classmethod
    def check_entries(cls, value: tuple[int, ...]) -> tuple[int, ...]:
        if len(value) < 2:
            raise ValueError("A weight vector needs at least two entries.")
        if any(entry < 1 for entry in value):
            raise ValueError(f"Weights must be positive, got {value}.")
        return value

    @classmethod
    def of(cls, *entries: int) -> WeightVector:
        return cls(entries=tuple(entries))

    @property
    def n(self) -> int:
        return len(self.entries) - 1

    def __len__(self) -> int:
        return len(self.entries)

    def __getitem__(self, index: int) -> int:
        return self.entries[index]

    def __str__(self) -> str:
        return "(" + ",".join(str(entry) for entry in self.entries) + ")"


class PairwiseCoprimeVector(WeightVector):
    @field_validator("entries")
    @classmethod
    def check_pairwise_coprime(
        cls, value: tuple[int, ...]
    ) -> tuple[int, ...]:
        for i, left in enumerate(value):
            for right in value[i + 1:]:
                if gcd(left, right) != 1:
                    raise ValueError(
                        f"Entries of {value} are not pairwise coprime."
                    )
        return value

    @computed_field
    @property
    def product(self) -> int:
        return prod(self.entries)


class GenerationStatus(Enum):
    GENERATED = "GENERATED"
    NOT_GENERATED = "NOT_GENERATED"


class MoveKind(Enum):
    MUL = "M"
    DIV = "D"


class ConstraintKind(Enum):
    NONE = "NONE"
    LENS = "LENS"
    PI_K = "PI_K"


class LambdaKind(Enum):
    IDENTITY = "identity"
    POWER = "power"
    CUSTOM = "custom"


class OutputFormat(Enum):
    JSON = "json"
    CSV = "csv"
    TEXT = "text"


class CoefficientSource(Enum):
    RECURSION = "recursion"
    CLOSED_FORM = "closed"


class AdmissibleMove(BaseModel):
    kind: MoveKind
    k: int
    prime: int
    result: tuple[int, ...]

    def __str__(self) -> str:
        return f"{self.kind.value}_{self.k}({self.prime})"


class ClassificationReport(BaseModel):
    weights: tuple[int, ...]
    coprime: bool
    pairwise_coprime: bool
    normalized: bool
    factor: tuple[int, ...] | None = None
    is_cpn: bool
    path: list[AdmissibleMove] | None = None


class GenerationVerdict(BaseModel):
    weights: tuple[int, ...]
    status: GenerationStatus
    generators: list[str] = Field(default_factory=list)
    triple: tuple[int, int, int] | None = None
    bezout: tuple[int, int] | None = None
    certificate_exponents: tuple[int, ...] | None = None
    certificate: str | None = None


class RelationResult(BaseModel):
    name: str
    indices: tuple[int, ...]
    mode: str
    holds: bool
    residual: float | None = None


class FredholmLabel(BaseModel):
    model_config = ConfigDict(frozen=True)

    h: int = Field(ge=0)
    r: tuple[int, ...] = ()

    @model_validator(mode="after")
    def check_remainders(self) -> FredholmLabel:
        if len(self.r) != self.h:
            raise ValueError(
                f"Label at level {self.h} needs {self.h} remainders, "
                + f"got {self.r}."
            )
        if any(value < 0 for value in self.r):
            raise ValueError(f"Remainders must be non-negative: {self.r}.")
        return self


class ProjectionLabel(BaseModel):
    model_config = ConfigDict(frozen=True)

    m: int = Field(ge=1)
    alpha: tuple[int, ...]

    @model_validator(mode="after")
    def check_alpha(self) -> ProjectionLabel:
        if len(self.alpha) != self.m:
            raise ValueError(
                f"Projection of rank index {self.m} needs {self.m} "
                + f"exponents, got {self.alpha}."
            )
        if any(value < 0 for value in self.alpha):
            raise ValueError(f"Exponents must be non-negative: {self.alpha}.")
        return self


class PairingReport(BaseModel):
    subject: str = "projection"
    h: int
    r: tuple[int, ...]
    m: int | None = None
    alpha: tuple[int, ...] | None = None
    q: float
    cutoff: int
    formula_value: int
    oracle_value: float
    tail_bound: float

    @computed_field
    @property
    def agrees(self) -> bool:
        return (
            abs(self.oracle_value - self.formula_value) < 0.5
            and self.tail_bound < 0.25
        )

    def csv_row(self) -> dict:
        return {
            "h": self.h,
            "r": " ".join(str(value) for value in self.r),
            "m": "" if self.m is None else self.m,
            "alpha": (
                "" if self.alpha is None
                else " ".join(str(value) for value in self.alpha)
            ),
            "formula": self.formula_value,
            "oracle": f"{self.oracle_value:.12g}",
            "tail": f"{self.tail_bound:.3e}",
            "agrees": self.agrees,
        }


class IdempotentReport(BaseModel):
    p: tuple[int, ...]
    k: int
    size: int
    unmerged_size: int
    idempotent: bool
    coinvariant: bool
    entries: list[list[str]] = Field(default_factory=list)


class NontrivialityReport(BaseModel):
    p: tuple[int, ...]
    q: float
    values: list[PairingReport]
    trivial_value: int
    nontrivial: bool


class DiracSpec(BaseModel):
    model_config = ConfigDict(frozen=True)

    n: int = Field(ge=1)
    lambda_kind: LambdaKind = LambdaKind.IDENTITY
    d: float | None = None
    samples: tuple[float, ...] | None = None
    cutoff: int = Field(default=16, ge=1)

    @model_validator(mode="after")
    def check_lambda(self) -> DiracSpec:
        match self.lambda_kind:
            case LambdaKind.POWER:
                if self.d is None or self.d <= 0:
                    raise ValueError("POWER lambda needs a positive d.")
            case LambdaKind.CUSTOM:
                if not self.samples:
                    raise ValueError("CUSTOM lambda needs samples.")
                if self.samples[0] < 0:
                    raise ValueError("lambda(0) must be non-negative.")
                if any(
                    later < earlier
                    for earlier, later in zip(self.samples, self.samples[1:])
                ):
                    raise ValueError("lambda must be non-decreasing.")
            case _:
                pass
        return self

    def value(self, t: int) -> float:
        """Evaluate lambda on the integer grid."""
        match self.lambda_kind:
            case LambdaKind.IDENTITY:
                return float(t)
            case LambdaKind.POWER:
                return float(t) ** (self.n / self.d)
            case LambdaKind.CUSTOM:
                if t >= len(self.samples):
                    raise ValueError(
                        f"lambda sampled on 0..{len(self.samples) - 1} only, "
                        + f"asked for {t}."
                    )
                return float(self.samples[t])


class CommutatorProfile(BaseModel):
    element: str
    lambda_kind: LambdaKind
    cutoffs: list[int]
    norms: list[float]
    envelope: list[float]
    bounded: bool | None = None


class ZetaDiagnostic(BaseModel):
    s: float
    terms: int
    partial_sums: list[float]
    tail_exponent: float
    convergent: bool


class RunConfig(BaseModel):
    q: float = 0.5
    cutoff: int = Field(default=12, ge=4)
    max_cutoff: int = 80
    tolerance_relations: float = Field(default=1e-10, gt=0)
    tolerance_traces: float = Field(default=1e-6, gt=0)
    output_format: OutputFormat = OutputFormat.TEXT
    threads: int = Field(default=4, ge=1)
    output: str | None = None

    @field_validator("q")
    @classmethod
    def check_q(cls, value: float) -> float:
        if not 0 < value < 1:
            raise ValueError(f"q must satisfy 0 < q < 1, got {value}.")
        return value

    @model_validator(mode="after")
    def check_max_cutoff(self) -> RunConfig:
        if self.max_cutoff < self.cutoff:
            raise ValueError("max_cutoff must not be below cutoff.")
        return self


class QwpsError(Exception):
    pass


class PreconditionError(QwpsError, ValueError):
    pass


class DimensionMismatchError(PreconditionError):
    pass


class VerificationError(QwpsError, RuntimeError):
    pass


class ArithmeticCapacityError(QwpsError, OverflowError):
    pass


class TruncationError(QwpsError):
    pass


class TokenPattern(Enum):

    WEIGHTS = r"^\s*[1-9]\d*(?:[\s,]+[1-9]\d*)+\s*$"
    WORD_LETTER = r"z(?P<index>\d+)(?P<star>\*)?(?:\^(?P<power>\d+))?"
    WORD = r"^\s*(?:z\d+\*?(?:\^\d+)?\s*)*$"
    LAMBDA = (
        r"^(?:identity|power:(?P<d>\d+(?:\.\d+)?)"
        + r"|custom:(?P<values>\d+(?:\.\d+)?(?:,\d+(?:\.\d+)?)*))$"
    )
    GRID = r"^(?P<h>\d+),(?P<m>\d+),(?P<alpha_max>\d+)$"
    Q = r"^(?:0?\.\d+|\d+/\d+)$"
