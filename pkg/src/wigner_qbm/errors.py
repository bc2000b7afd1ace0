"""Exception types shared across the package."""


class WignerQbmError(Exception):
    """Base class for all library errors."""


class CausticError(WignerQbmError):
    """Requested time lies within the exclusion window of a zero of G+."""


class StrictOhmicDeltaError(WignerQbmError):
    """A pointwise value of a delta-distribution kernel was requested."""


class ConvergenceError(WignerQbmError):
    """A truncated series cannot meet the requested tolerance."""


class PoleDegeneracyError(WignerQbmError):
    """Two poles of the response function (or a response pole and a
    Matsubara frequency) coincide; residue formulas are ill-conditioned."""


class QuadratureError(WignerQbmError):
    """Adaptive quadrature stalled above the requested tolerance."""


class DegenerateCovarianceError(WignerQbmError):
    """The Gaussian kernel covariance is singular (Lambda <= 0)."""


class GridMismatchError(WignerQbmError):
    """Two sampled paths do not share a common time grid."""


class FitWindowError(WignerQbmError):
    """The separation-rate fit window is unusable."""


class UnderresolvedKernelError(WignerQbmError):
    """The propagating kernel is narrower than the phase-space grid resolves."""


class DiagonalizationError(WignerQbmError):
    """The system-plus-bath stiffness matrix is numerically indefinite."""
