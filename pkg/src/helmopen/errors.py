"""Exception hierarchy shared by every module of the package."""


class HelmOpenError(Exception):
    """Base class for all package errors."""


class InvalidDomain(HelmOpenError, ValueError):
    pass


class MeshQualityFailure(HelmOpenError):
    pass


class RegionOutsideDomain(HelmOpenError, ValueError):
    pass


class OriginSingularity(HelmOpenError, ValueError):
    pass


class NonPositiveIndex(HelmOpenError, ValueError):
    pass


class InadmissibleRefraction(HelmOpenError, ValueError):
    pass


class EmptyFreeDofs(HelmOpenError, ValueError):
    pass


class SingularSystem(HelmOpenError):
    """The discrete Helmholtz operator is (numerically) singular."""


class OriginInDomain(HelmOpenError, ValueError):
    pass


class CircleOutsideDomain(HelmOpenError, ValueError):
    pass


class StagnationError(HelmOpenError):
    """Line-search curvature lost positivity during conjugate gradients."""


class NotConverged(HelmOpenError):
    pass


class DomainError(HelmOpenError, ValueError):
    pass


class InsideObstacle(HelmOpenError, ValueError):
    pass


class ZeroReference(HelmOpenError, ZeroDivisionError):
    pass


class ParseError(HelmOpenError, ValueError):
    pass


class ValidationError(HelmOpenError, ValueError):
    pass
