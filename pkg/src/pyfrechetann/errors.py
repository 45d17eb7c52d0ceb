"""Exception hierarchy for pyfrechetann."""


class FrechetANNError(ValueError):
    """Base class for all library errors."""


class DimensionMismatchError(FrechetANNError):
    """Two geometric objects live in different dimensions."""


class ConstraintError(FrechetANNError):
    """A parameter or precondition is outside its documented range."""


class DegenerateDatasetError(ConstraintError):
    """A dataset quantity (delta_min, Lambda) is undefined for the given input."""


class ConvergenceError(FrechetANNError):
    """The Frechet bisection did not reach its tolerance within max_iter steps."""


class NetTreeError(FrechetANNError):
    """A net-tree structural invariant was violated."""


class CurveFileError(FrechetANNError):
    """A curve file or index container could not be parsed."""
