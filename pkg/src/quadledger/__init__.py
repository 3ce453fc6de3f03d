"""quadledger: numerical verification of integral and series identities.

A double-exponential quadrature core (tanh-sinh / exp-sinh), iterated 2-D
integration with order-of-integration agreement checks, summation over odd
integers with controlled tails, a small expression language for integrands,
and a ledger of claims that re-checks a double-integral derivation of
sum(1/(2k+1)**2) = pi**2/8 step by step.
"""

from .expr import (
    Binary,
    Call,
    Const,
    DivisionByZero,
    DomainError,
    EvalError,
    Expr,
    ParseError,
    Token,
    TokenKind,
    Unary,
    UnboundVariable,
    Var,
    compile_expr,
    evaluate,
    free_variables,
    parse,
    render,
    substitute,
)
from .ledger import (
    Claim,
    ClaimResult,
    ClosedForm,
    DuplicateId,
    Integral1D,
    Integral2D,
    LinearCombo,
    ManifestError,
    Quantity,
    Report,
    SeriesQuantity,
    builtin_claims,
    load_manifest,
    render_manifest,
    run_all,
    run_claim,
)
from .quad2d import (
    FubiniReport,
    IterationOrder,
    ProductDomain,
    fubini_check,
    integrate_iterated,
)
from .quadcore import (
    DEFAULT_CONFIG,
    EvaluationError,
    IntegrationDomain,
    InvalidDomain,
    NonConvergence,
    QuadConfig,
    QuadResult,
    QuadratureError,
    integrate,
    integrate_finite,
    integrate_semi_infinite,
    refinement_values,
)
from .series import (
    SeriesFamily,
    SeriesResult,
    SeriesSpec,
    ToleranceUnreachable,
    UnsupportedPower,
    moment_integral,
    sum_series,
    zeta2_from_odd,
)
from .summation import CompensatedSum

__version__ = "0.1.0"

__all__ = [
    "Binary", "Call", "Const", "DivisionByZero", "DomainError", "EvalError",
    "Expr", "ParseError", "Token", "TokenKind", "Unary", "UnboundVariable",
    "Var", "compile_expr", "evaluate", "free_variables", "parse", "render",
    "substitute",
    "Claim", "ClaimResult", "ClosedForm", "DuplicateId", "Integral1D",
    "Integral2D", "LinearCombo", "ManifestError", "Quantity", "Report",
    "SeriesQuantity", "builtin_claims", "load_manifest", "render_manifest",
    "run_all", "run_claim",
    "FubiniReport", "IterationOrder", "ProductDomain", "fubini_check",
    "integrate_iterated",
    "DEFAULT_CONFIG", "EvaluationError", "IntegrationDomain", "InvalidDomain",
    "NonConvergence", "QuadConfig", "QuadResult", "QuadratureError",
    "integrate", "integrate_finite", "integrate_semi_infinite",
    "refinement_values",
    "SeriesFamily", "SeriesResult", "SeriesSpec", "ToleranceUnreachable",
    "UnsupportedPower", "moment_integral", "sum_series", "zeta2_from_odd",
    "CompensatedSum",
    "__version__",
]
