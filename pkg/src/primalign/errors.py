"""Exception types raised by the registration library."""


class RegistrationError(Exception):
    """Base class for all errors raised by this package."""


class EmptyPointSet(RegistrationError):
    """An operation that needs at least one point pair received none."""


class InvalidThreshold(RegistrationError, ValueError):
    """A threshold parameter was outside its valid range."""


class DegenerateGeometry(RegistrationError):
    """The input geometry does not determine a unique rotation."""


class DegenerateViewpoint(RegistrationError):
    """The viewpoint lies on the line, so no canonical direction exists."""


class SingularHessian(RegistrationError):
    """The Gauss-Newton normal matrix is numerically singular."""


class NoCorrespondences(RegistrationError):
    """A matching round produced too few pairs for the solver."""


class PlyParseError(RegistrationError):
    """A PLY file could not be parsed; the message carries line/offset context."""


class UnsupportedFormat(RegistrationError):
    """The PLY encoding is not one of the supported variants."""


class MissingModel(RegistrationError):
    """A benchmark model file is absent and the synthetic fallback is disabled."""
