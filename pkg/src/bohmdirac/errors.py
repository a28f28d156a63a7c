"""Exception types shared across the package."""


class BohmDiracError(Exception):
    """Base class for all package errors."""


class LightlikeTangent(BohmDiracError):
    """A leaf tangent reached or exceeded the spacelike margin."""


class KinkWithoutSide(BohmDiracError):
    """A one-sided quantity was requested at a kink without a side tag."""


class NotInFuture(BohmDiracError):
    """The query point is not in the causal future of the surface."""


class BisectionFailure(BohmDiracError):
    """Root bracketing or refinement failed."""


class SpacelikeViolation(BohmDiracError):
    """A reconstructed leaf violates the spacelike margin."""


class InvalidFamily(BohmDiracError):
    """Analytic foliation parameters violate ordering or spacelike bounds."""


class NonRealComponent(BohmDiracError):
    """A current component has an imaginary residue above tolerance."""


class NegativeDensity(BohmDiracError):
    """A density that must be nonnegative came out significantly negative."""


class NullCurrent(BohmDiracError):
    """The guiding current vanishes (node of j)."""


class OnKinkSet(BohmDiracError):
    """A chart point lies on the kink set but no side tag was supplied."""


class CornerPoint(BohmDiracError):
    """Two or more particle slots sit on kink curves simultaneously."""


class StepFailure(BohmDiracError):
    """The adaptive stepper could not proceed at the requested tolerance."""


class EnvelopeViolation(BohmDiracError):
    """A rejection-sampling envelope was exceeded by the target density."""


class DegenerateField(BohmDiracError):
    """The two one-sided currents coincide; no violating normal exists."""


class ConfigError(BohmDiracError):
    """A scenario configuration is malformed; message names the field."""
