from __future__ import annotations

from .models import (
    AdmissibleMove,
    ArithmeticCapacityError,
    ClassificationReport,
    CoefficientSource,
    CommutatorProfile,
    DiracSpec,
    DimensionMismatchError,
    FredholmLabel,
    GenerationStatus,
    GenerationVerdict,
    IdempotentReport,
    LambdaKind,
    NontrivialityReport,
    OutputFormat,
    PairingReport,
    PairwiseCoprimeVector,
    PreconditionError,
    ProjectionLabel,
    QwpsError,
    RelationResult,
    RunConfig,
    TruncationError,
    VerificationError,
    WeightVector,
    ZetaDiagnostic
)
from .base import AsyncTaskRunner
from .logging_conf import setup_logger
from .qarith import LaurentScalar, UnivariatePolynomial
from .ncalgebra import AlgebraElement, CommutingPoly, NormalMonomial
from .representations import (
    PiRepresentation,
    ShiftOperator,
    SphereRepresentation,
    TruncatedSpace
)
from .connection import Idempotent, TensorElement
from . import (
    common,
    connection,
    fredholm,
    logging_conf,
    ncalgebra,
    qarith,
    representations,
    spectral,
    weights
)

__all__ = (
    "AdmissibleMove",
    "AlgebraElement",
    "ArithmeticCapacityError",
    "AsyncTaskRunner",
    "ClassificationReport",
    "CoefficientSource",
    "CommutatorProfile",
    "CommutingPoly",
    "DiracSpec",
    "DimensionMismatchError",
    "FredholmLabel",
    "GenerationStatus",
    "GenerationVerdict",
    "Idempotent",
    "IdempotentReport",
    "LambdaKind",
    "LaurentScalar",
    "NontrivialityReport",
    "NormalMonomial",
    "OutputFormat",
    "PairingReport",
    "PairwiseCoprimeVector",
    "PiRepresentation",
    "PreconditionError",
    "ProjectionLabel",
    "QwpsError",
    "RelationResult",
    "RunConfig",
    "ShiftOperator",
    "SphereRepresentation",
    "TensorElement",
    "TruncatedSpace",
    "TruncationError",
    "UnivariatePolynomial",
    "VerificationError",
    "WeightVector",
    "ZetaDiagnostic",
    "common",
    "connection",
    "fredholm",
    "logging_conf",
    "ncalgebra",
    "qarith",
    "representations",
    "setup_logger",
    "spectral",
    "weights"
)
