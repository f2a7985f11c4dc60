"""Exception types shared across the package."""


class ConfigurationError(ValueError):
    """An enumeration size exceeds the configured ``max_order``."""


class ModeMismatch(ValueError):
    """Operands carry different numeric modes or truncation orders."""


class SpaceMismatch(ValueError):
    """Processes are defined on different state spaces."""


class OrderError(ValueError):
    """A requested order exceeds what a process or vector stores."""


class DivisionByZeroConstantTerm(ZeroDivisionError):
    """The divisor has a zero constant term (g0 == 0 or q0 == 0)."""


class ZeroConstantTerm(DivisionByZeroConstantTerm):
    """Deconvolution by a process whose p0 is zero."""
