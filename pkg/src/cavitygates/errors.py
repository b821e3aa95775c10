"""Exception hierarchy shared by all cavitygates modules."""


class CavityGatesError(Exception):
    """Base class for every error raised by this package."""


class ValidationError(CavityGatesError, ValueError):
    """An input violates a documented precondition."""


class SpecError(ValidationError):
    """A system description is malformed or internally inconsistent."""


class CutoffError(SpecError):
    """A basis state violates a Fock cutoff."""


class DimensionCapError(CavityGatesError):
    """The reachable subspace is larger than the configured maximum."""


class StructureError(CavityGatesError, ValueError):
    """Operands do not share a basis, or a basis does not match its spec."""


class ConfigurationError(CavityGatesError, ValueError):
    """A required parameter is missing or unknown."""


class NumericalError(CavityGatesError, ArithmeticError):
    """Base class for numerically degenerate situations."""


class IllConditionedPartitionError(NumericalError):
    """The far-detuned block of a partitioned Hamiltonian is (nearly) singular.

    Usually this means a near-resonant state was assigned to the eliminated
    subspace.
    """


class DegenerateError(NumericalError):
    """A zero denominator or a vanishing coupling made a quantity undefined."""
