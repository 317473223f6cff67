"""Exception types shared across the library."""


class SteerlabError(Exception):
    """Base class for all library errors."""


class DomainError(SteerlabError):
    """A numeric parameter is outside its allowed domain."""


class NotPSD(SteerlabError):
    """Matrix is not positive semidefinite within tolerance."""


class DimensionMismatch(SteerlabError):
    """Operands have incompatible dimensions."""


class ShapeMismatch(SteerlabError):
    """Assemblages have incompatible (m, o, dim) shapes."""


class ZeroProbabilityBranch(SteerlabError):
    """Requested filter outcome occurs with (numerically) zero probability."""


class SolverFailure(SteerlabError):
    """The semidefinite solver did not return a usable solution."""


class InsufficientCounts(SteerlabError):
    """Tomography counts are missing for at least one measurement cell."""
