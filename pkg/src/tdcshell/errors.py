"""Exception hierarchy for tdcshell."""


class TdcError(Exception):
    """Base class for all library errors."""


class ParameterError(TdcError, ValueError):
    pass


class MeshParseError(TdcError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class UnsupportedElementError(MeshParseError):
    pass


class GeometryError(TdcError):
    """Degenerate element (singular extended Jacobian)."""

    def __init__(self, message, element=None):
        self.element = element
        super().__init__(message)


class InvertedElementError(TdcError):
    """det F <= 0 at a material point."""


class CondensationSingularityError(TdcError):
    """The 3x3 normal-normal block of the tangent is singular."""


class LocalDivergenceError(TdcError):
    """Plane-stress director iteration failed to converge."""

    def __init__(self, message, history=None):
        self.history = history if history is not None else []
        super().__init__(message)


class SingularMatrixError(TdcError):
    def __init__(self, message, dof=None):
        self.dof = dof
        super().__init__(message)


class NonConvergenceError(TdcError):
    def __init__(self, message, report=None):
        self.report = report
        super().__init__(message)


class IllPosedError(TdcError):
    pass


class DegenerateMeshError(TdcError):
    pass


class CatenoidExistenceError(TdcError, ValueError):
    pass


class FitError(TdcError, ValueError):
    pass


class ConfigError(TdcError):
    pass
