"""Exception hierarchy.

Every error raised on bad numerical input derives from :class:`RigidSpinError`
(itself a ``ValueError``) so callers can catch domain failures in one place.
"""


class RigidSpinError(ValueError):
    """Base class for domain validation failures."""


class NotSkew(RigidSpinError):
    pass


class NotUnit(RigidSpinError):
    pass


class NotRotation(RigidSpinError):
    pass


class DegeneratePair(RigidSpinError):
    pass


class ZeroVector(RigidSpinError):
    pass


class NotSPD(RigidSpinError):
    pass


class NotCenterOfMass(RigidSpinError):
    pass


class EmptyBody(RigidSpinError):
    pass


class DegenerateSpectrum(RigidSpinError):
    pass


class DegenerateFirstStep(RigidSpinError):
    """The first observation pair is a half-turn, so the velocity sign is ambiguous."""


class AllSequencesDegenerate(RigidSpinError):
    pass


class InvalidConfig(RigidSpinError):
    pass


class ConservationViolation(RigidSpinError):
    pass


class FormatError(RigidSpinError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class VersionMismatch(RigidSpinError):
    pass
