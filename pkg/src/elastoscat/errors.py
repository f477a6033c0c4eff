"""Exception taxonomy shared by all solver modules."""


class ElastoscatError(Exception):
    """Base class for all toolkit errors."""


class ConfigError(ElastoscatError):
    """Invalid configuration, scenario file, or argument combination."""


class DomainError(ElastoscatError):
    """Input outside the mathematical domain of an operation."""


class SingularityError(DomainError):
    """Kernel evaluated at (or too close to) its singular point."""


class DegenerateRadiusError(DomainError):
    """Static Green tensor is a singular matrix at this radius."""


class NumericalError(ElastoscatError):
    """A linear-algebra or extrapolation step failed to converge."""


class ResonanceError(NumericalError):
    """Interaction matrix is (numerically) singular at this frequency."""

    def __init__(self, omega: float, cond: float):
        self.omega = omega
        self.cond = cond
        super().__init__(
            f"interaction matrix numerically singular at omega={omega:g} "
            f"(condition estimate {cond:.3e}); frequency lies in the resonance set"
        )
