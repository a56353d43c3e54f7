"""Exception types raised across the package."""


class DomainError(ValueError):
    """Input lies outside the domain an operation is defined on."""


class ParseError(DomainError):
    def __init__(self, lineno: int, message: str):
        self.lineno = lineno
        super().__init__(f"line {lineno}: {message}")


class ConvergenceError(RuntimeError):
    """An iterative solver hit ``max_iter`` before meeting its tolerance.

    ``estimate`` carries the last iterate (or eigenvalue estimate) and
    ``residual`` the last update norm, so callers can decide whether the
    partial answer is usable.
    """

    def __init__(self, message, estimate=None, residual=None, iterations=None):
        super().__init__(message)
        self.estimate = estimate
        self.residual = residual
        self.iterations = iterations


class DivergenceError(DomainError):
    """Katz attenuation factor is at or above ``1 / lambda_1``."""

    def __init__(self, alpha: float, spectral_radius: float):
        self.alpha = alpha
        self.spectral_radius = spectral_radius
        bound = 1.0 / spectral_radius if spectral_radius > 0 else float("inf")
        super().__init__(
            f"alpha={alpha:g} must be below 1/lambda_1={bound:.6g} "
            f"(estimated lambda_1={spectral_radius:.6g}); Katz iteration diverges"
        )


class GeometryError(ValueError):
    """Cluster is too degenerate to fit a line or bounding box."""
