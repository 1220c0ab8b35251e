"""Exception types shared across the package."""


class ConfigError(ValueError):
    """Invalid algorithm, oracle or experiment configuration."""


class NonFiniteError(ArithmeticError):
    """A run produced a non-finite function value, gradient or model."""


class DomainExitError(RuntimeError):
    """An accepted iterate left the box on which problem constants are valid."""


class SolverError(RuntimeError):
    """The cubic subproblem root solve did not converge."""


class LemmaViolation(AssertionError):
    """A per-realization inequality from the analysis failed on a trace."""


class MalformedTraceError(ValueError):
    """A trace cannot be diagnosed (for example it neither hit nor was capped)."""
