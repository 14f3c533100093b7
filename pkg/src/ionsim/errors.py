class PreconditionError(ValueError):
    """Input violates a documented precondition of a simulation routine."""


class IntegrationError(RuntimeError):
    """Numerical integration failed or drifted outside its tolerance."""
