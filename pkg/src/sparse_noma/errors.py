"""Error taxonomy shared across the package.

Configuration and domain problems are ValueErrors so they behave naturally
under argparse-driven entry points; numerical breakdowns are RuntimeErrors
because they indicate the algebra or an iteration failed, not the caller.
"""


class ConfigurationError(ValueError):
    """Inadmissible system parameters (degrees, loads, matrix sizes)."""


class DomainError(ValueError):
    """Input outside the mathematical domain of an operation."""


class NumericalError(RuntimeError):
    """Quadrature, root finding, or linear algebra failed to meet tolerance."""


class GenerationError(NumericalError):
    """Random signature matrix generation failed after repeated repair."""
