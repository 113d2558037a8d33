"""Exception and warning types shared across the package."""


class LsiibError(Exception):
    """Base class for package-specific errors."""


class InvalidParameterError(LsiibError, ValueError):
    """A physical or structural parameter is outside its allowed range."""


class InvalidGeometryError(InvalidParameterError):
    """Cavity geometry with nonpositive dimensions or transmittivity not in (0, 1)."""


class BasisMismatchError(LsiibError, ValueError):
    """State and operator carry different labeled bases."""


class PreconditionError(LsiibError, ValueError):
    """A protocol operation was applied to a state violating its precondition."""


class ProtocolViolationError(LsiibError, RuntimeError):
    """The register left its designed subspace (e.g. photon occupation above one)."""


class FitFailureError(LsiibError, RuntimeError):
    """A trajectory does not contain the feature a fit looks for."""


class ConfigError(LsiibError, ValueError):
    """One or more problems found while validating an experiment configuration."""

    def __init__(self, problems):
        if isinstance(problems, str):
            problems = (problems,)
        self.problems = tuple(problems)
        super().__init__("; ".join(self.problems))


class PhysicsRegimeWarning(UserWarning):
    """Parameters are outside the regime where a perturbative result is controlled."""
