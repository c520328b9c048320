class CurvedFemError(Exception):
    """Base class for library errors."""


class ConfigurationError(CurvedFemError, ValueError):
    pass


class GeometryError(CurvedFemError, ValueError):
    pass


class DegenerateElementError(GeometryError):
    def __init__(self, message, element=None, point=None):
        super().__init__(message)
        self.element = element
        self.point = point


class MeshParseError(CurvedFemError, ValueError):
    pass


class SolverError(CurvedFemError, RuntimeError):
    pass
