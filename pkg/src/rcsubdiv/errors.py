"""Exception types shared across the package."""


class RCError(Exception):
    """Base class for all rcsubdiv errors."""


class TooFewNodes(RCError, ValueError):
    """A series is too short for the requested stencil."""


class DegenerateSmoothness(RCError, ValueError):
    """A critical-scale formula was asked to divide by a zero derivative bound."""


class IllConditioned(RCError):
    """A local polynomial fit is numerically unreliable (condition estimate too large)."""


class DetectionError(RCError):
    """Singularity detection could not produce usable hypotheses."""


class MultipleSingularitiesTooClose(DetectionError):
    """Two detected cells are closer than the minimum separation rule allows."""


class RowWithoutSingularity(RCError):
    """A row of bivariate data produced no singularity hypothesis."""

    def __init__(self, row_index, message=None):
        self.row_index = row_index
        super().__init__(message or f"row {row_index} produced no singularity hypothesis")


class RowWithMultipleSingularities(RCError):
    """A row of bivariate data produced more than one singularity hypothesis."""

    def __init__(self, row_index, count, message=None):
        self.row_index = row_index
        self.count = count
        super().__init__(message or f"row {row_index} produced {count} hypotheses, expected 1")
