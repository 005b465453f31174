"""Exception types shared across the package."""


class ParameterError(ValueError):
    """An argument is outside the domain an operation is defined on."""


class InfiniteVarianceError(ParameterError):
    """A variance was requested for a distribution that has none."""


class CalibrationError(ParameterError):
    """A privacy-cost precondition is violated; the message names the failed hypothesis."""


class InfeasibleError(CalibrationError):
    """No noise scale (or no grid point) can meet the requested budget."""


class ContractViolationError(ValueError):
    """Input data does not satisfy a documented precondition (e.g. untruncated values)."""


class PrivacyContractError(ValueError):
    """A mechanism configuration does not satisfy its declared privacy budget."""


class EnumerationBudgetError(RuntimeError):
    """A brute-force search would exceed its configured enumeration budget."""
