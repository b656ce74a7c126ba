"""Exception types raised across the package."""


class GeoloopsError(Exception):
    pass


class SingularBasis(GeoloopsError, ValueError):
    pass


class HypothesisNotMet(GeoloopsError):
    pass


class SearchExhausted(GeoloopsError):
    pass


class NotHyperbolic(GeoloopsError, ValueError):
    def __init__(self, kind):
        super().__init__(f"element is {kind}, not hyperbolic")
        self.kind = kind


class EmptyWord(GeoloopsError, ValueError):
    pass


class NotFreeGroup(GeoloopsError, ValueError):
    pass


class GeometryMismatch(GeoloopsError, ValueError):
    pass


class NonpositiveValue(GeoloopsError, ValueError):
    pass


class BadCurvatureOrder(GeoloopsError, ValueError):
    pass


class MalformedInput(GeoloopsError, ValueError):
    """Input file does not follow the documented grammar."""


class CompletenessWarning(UserWarning):
    """Pruned enumeration could not be certified complete."""
