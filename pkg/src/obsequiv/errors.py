"""Exception hierarchy.

Every numerical failure that would otherwise turn into a silently wrong
classification is raised as one of these.
"""


class ObsEquivError(Exception):
    """Base class for all errors raised by this package."""


class NonConvergence(ObsEquivError):
    """The QR iteration behind the real Schur form did not converge."""


class SwapIllConditioned(ObsEquivError):
    """Exchanging two adjacent Schur blocks would be numerically unreliable."""


class SpectraOverlap(ObsEquivError):
    """A Sylvester equation was posed with spectra that are not separated."""


class BorderlineSpectrum(ObsEquivError):
    """Some eigenvalue sits too close to the imaginary axis to classify."""

    def __init__(self, message, eigenvalues=(), threshold=None):
        super().__init__(message)
        self.eigenvalues = tuple(eigenvalues)
        self.threshold = threshold


class AdditivityViolation(ObsEquivError):
    """Sub-ranks k0 + k+ + k- disagree with the Kalman rank of the whole system."""


class NotObservable(ObsEquivError):
    pass


class NotSISO(ObsEquivError):
    pass


class CenterNotObservable(ObsEquivError):
    pass


class MixedSpectrum(ObsEquivError):
    """A 3-D system has both center and hyperbolic eigenvalues."""


class DimensionMismatch(ObsEquivError, ValueError):
    pass


class SingularWitness(ObsEquivError):
    pass


class ParseError(ObsEquivError, ValueError):
    pass


class ShapeError(ObsEquivError, ValueError):
    pass
