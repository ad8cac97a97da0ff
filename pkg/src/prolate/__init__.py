"""Prolate spheroid differential operator on (-a, a).

Frobenius analysis at the singular endpoints, generalized boundary values,
the unitary parameterization of all self-adjoint extensions, the spectrum of
the distinguished extension ``L_I`` and its commutation with the truncated
Fourier operator.
"""

__version__ = "0.1.0"

from .errors import (  # noqa: F401
    ConvergenceWarning,
    DegenerateUnitary,
    EigensolverFailure,
    ExtrapolationDivergence,
    GridMismatch,
    IntegrationFailure,
    NoSignChange,
    NotSelfComplementary,
    OutOfDisc,
    ProlateError,
    RankDeficient,
)
