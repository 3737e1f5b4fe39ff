"""Exception types shared across the package."""


class OrisogenyError(Exception):
    """Base class for all package errors."""


class InputTooLarge(OrisogenyError):
    pass


class NotCoprime(OrisogenyError):
    pass


class NoRoot(OrisogenyError):
    pass


class NotInSubfield(OrisogenyError):
    pass


class InvalidCurve(OrisogenyError):
    pass


class NotOnCurve(OrisogenyError):
    pass


class TorsionUnreachable(OrisogenyError):
    pass


class DegenerateKernel(OrisogenyError):
    pass


class NotSmooth(OrisogenyError):
    """An isogeny degree has a prime factor outside the configured prime set."""


class NotDivisible(OrisogenyError):
    """Negative answer from a division query."""


class NotSeparable(OrisogenyError):
    pass


class VerificationFailed(OrisogenyError):
    pass


class InvalidForm(OrisogenyError):
    pass


class NotInvertible(OrisogenyError):
    pass


class WrongOrder(OrisogenyError):
    pass


class EigenspaceMissing(OrisogenyError):
    pass


class InvalidOrientation(OrisogenyError):
    pass


class Timeout(OrisogenyError):
    pass


class Inert(OrisogenyError):
    """The prime is inert in the order: there is no ideal of that norm."""


class ConductorClash(OrisogenyError):
    """The prime divides the conductor, so its ideals are not invertible."""


class DiscCap(OrisogenyError):
    pass


class GroupTooLarge(OrisogenyError):
    pass


class AtCrater(OrisogenyError):
    """The orientation is already maximal at the requested prime."""


class NoSplitPrimes(OrisogenyError):
    pass


class NoSolution(OrisogenyError):
    pass


class NoShift(OrisogenyError):
    pass
