"""Exception types raised across the package."""


class AdequacyError(ValueError):
    """Truncation dimension too small for the requested displacement / Fock index."""


class DimensionMismatch(ValueError):
    pass


class ModeMismatch(ValueError):
    pass


class NotNormalized(ValueError):
    pass


class ZeroInformation(ValueError):
    """Probe carries no phase information (QFI == 0)."""


class ZeroNorm(ValueError):
    pass


class DegenerateFit(ValueError):
    pass
