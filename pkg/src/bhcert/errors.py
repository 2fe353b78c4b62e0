"""Exception types shared across the package."""


class BHCertError(Exception):
    """Base class for all errors raised by bhcert."""


class MalformedInputError(BHCertError, ValueError):
    """Input data violates a documented precondition."""


class BudgetExceededError(BHCertError):
    """A dense computation would exceed the configured size budget."""


class UnsupportedFamilyError(BHCertError, ValueError):
    """The structural rules do not cover the requested polynomial family."""
