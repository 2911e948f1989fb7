class ConfigurationError(ValueError):
    """Invalid lattice, state-family or run configuration."""


class UnsupportedFeatureError(NotImplementedError):
    pass


class PreconditionError(ValueError):
    """Input spins violate the norm-nu precondition of a transform."""
