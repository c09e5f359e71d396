"""
Exception types raised by the NC phase-space toolkit
"""


class NCPhaseError(ValueError):
    """Base class for every semantic failure of a computation"""


class NotSkewSymmetric(NCPhaseError):
    pass


class SingularForm(NCPhaseError):
    pass


class PartitionMismatch(NCPhaseError):
    pass


class NonInvertible(NCPhaseError):
    pass


class DeformationTooLarge(NCPhaseError):
    """No real Seiberg-Witten map of the planar form exists (theta*eta >= hbar^2)"""


class OrderingMismatch(NCPhaseError):
    pass


class IllConditioned(NCPhaseError):
    pass


class DimensionMismatch(NCPhaseError):
    pass


class NegativeOccupation(NCPhaseError):
    pass


class ShapeMismatch(NCPhaseError):
    pass


class SymmetryViolation(NCPhaseError):
    pass


class PictureFormMismatch(NCPhaseError):
    pass


class NotInvolutive(NCPhaseError):
    pass


class ModeCountMismatch(NCPhaseError):
    pass


class PreconditionFailed(NCPhaseError):
    pass


class BudgetExhausted(NCPhaseError):
    """Simplex refinement hit its iteration cap; ``evaluation`` holds the best point found"""

    def __init__(self, message: str, evaluation=None):
        super().__init__(message)
        self.evaluation = evaluation


class ScenarioError(NCPhaseError):
    """Scenario failed validation; ``violations`` lists every (field_path, reason) pair"""

    def __init__(self, violations):
        self.violations = list(violations)
        lines = [f"{path}: {reason}" for path, reason in self.violations]
        super().__init__("Invalid scenario:\n  " + "\n  ".join(lines))


class ScenarioParseError(Exception):
    """Scenario file could not be read or is not valid JSON"""


class NotDarboux(NCPhaseError):
    """Candidate map does not realize S (hbar J) S^T = Omega within tolerance"""


class NotPositiveDefinite(NCPhaseError):
    """Covariance is not positive-definite, so no Gaussian Wigner function represents it"""
