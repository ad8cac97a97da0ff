"""Exception and warning types shared by the prolate modules."""


class ProlateError(Exception):
    """Base class for errors raised by this package."""


class OutOfDisc(ProlateError, ValueError):
    """A Frobenius series was evaluated outside its disc of convergence."""


class IntegrationFailure(ProlateError, RuntimeError):
    """The interior ODE solve did not reach the requested tolerance."""


class ExtrapolationDivergence(ProlateError, ArithmeticError):
    """Endpoint extrapolants failed to contract.

    Usually means the sampled function is not in the maximal domain.
    """


class RankDeficient(ProlateError, ValueError):
    pass


class NotSelfComplementary(ProlateError, ValueError):
    pass


class EigensolverFailure(ProlateError, RuntimeError):
    pass


class NoSignChange(ProlateError, ValueError):
    pass


class GridMismatch(ProlateError, ValueError):
    pass


class DegenerateUnitary(ProlateError, ValueError):
    """Raised when a non-commutation witness is requested for U = I."""


class ConvergenceWarning(UserWarning):
    """Galerkin eigenvectors whose tail coefficients are not small enough."""
